#pragma once

#include <Eigen/Dense>
#include <complex>
#include <set>
#include <utility>
#include <vector>

#include "qsync/hilbert_structure.hpp"

namespace qsync {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

// An operator on a composite Hilbert space: dense matrix plus the
// subsystem layout it acts on.
struct Operator {
    MatrixXc matrix;
    HilbertStructure structure;

    Operator() = default;
    Operator(MatrixXc m, HilbertStructure s);

    int dim() const { return structure.total_dim(); }
    Operator adjoint() const { return Operator(matrix.adjoint(), structure); }
    bool is_hermitian(double tol = 1e-12) const;
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex scale, const Operator& a);
Operator operator*(double scale, const Operator& a);

// A state: Hermitian, positive semidefinite, unit trace. Validated on
// construction; `unchecked` skips validation for internal hot paths.
class DensityMatrix {
public:
    static DensityMatrix from_operator(const Operator& op, double psd_tol = 1e-10,
                                       double trace_tol = 1e-10, double herm_tol = 1e-12);
    static DensityMatrix unchecked(Operator op);

    const Operator& op() const { return op_; }
    const MatrixXc& matrix() const { return op_.matrix; }
    const HilbertStructure& structure() const { return op_.structure; }
    int dim() const { return op_.dim(); }

private:
    explicit DensityMatrix(Operator op) : op_(std::move(op)) {}
    Operator op_;
};

enum class PauliKind { X, Y, Z, Plus, Minus, Identity };

// d x d truncated bosonic annihilation operator, <n-1|a|n> = sqrt(n).
Operator annihilation_op(int d);

// Standard 2x2 Pauli / ladder / identity matrices, sigma_z = diag(1, -1).
Operator pauli(PauliKind which);

// Identity on a composite space.
Operator identity_op(const HilbertStructure& structure);

// Kronecker product; the result's dims are the concatenation of the inputs'.
Operator tensor_product(const Operator& a, const Operator& b);

// Lift a single-site operator into the composite space: I x .. x local x .. x I.
Operator embed(const Operator& local, int site, const HilbertStructure& structure);

// Reduced density matrix on the kept sites (ascending site order).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<int>& keep);

// Partial trace for plain operators (used on projected, sub-normalized states).
Operator partial_trace_op(const Operator& op, const std::set<int>& keep);

// Transpose the indices of the given sites only.
Operator partial_transpose(const Operator& op, const std::set<int>& sites);

// Dimensionless position/momentum quadratures of a bosonic site, embedded in
// the composite space: q = (a + a^dag)/sqrt(2), p = i(a^dag - a)/sqrt(2).
std::pair<Operator, Operator> quadratures(int site, const HilbertStructure& structure);

// |n> in a d-dimensional Fock space.
VectorXc fock_state(int d, int n);

// Truncated coherent state |alpha>, renormalized within the cutoff.
VectorXc coherent_state(int d, Complex alpha);

// Tr(O rho), complex in general.
Complex expectation(const Operator& obs, const DensityMatrix& rho);

// Tr(O rho) for Hermitian observables.
double expectation_real(const Operator& obs, const DensityMatrix& rho);

// Trace distance (1/2)||a - b||_1 between Hermitian matrices.
double trace_distance(const MatrixXc& a, const MatrixXc& b);

}  // namespace qsync
