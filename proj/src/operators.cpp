#include "qsync/operators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsync {

namespace {

MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
    MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Composite indices of every multi-index over `sites`, holding all other
// sites at zero. Full index = entry from the kept table + entry from the
// complement table.
std::vector<int> index_offsets(const HilbertStructure& s, const std::vector<int>& sites) {
    std::vector<int> offsets{0};
    for (int site : sites) {
        std::vector<int> next;
        next.reserve(offsets.size() * static_cast<std::size_t>(s.dim(site)));
        for (int base : offsets)
            for (int n = 0; n < s.dim(site); ++n) next.push_back(base + n * s.stride(site));
        offsets = std::move(next);
    }
    return offsets;
}

std::vector<int> sorted_sites(const std::set<int>& sites, const HilbertStructure& s,
                              const char* what) {
    if (sites.empty()) throw std::invalid_argument(std::string(what) + ": empty site set");
    std::vector<int> out(sites.begin(), sites.end());
    for (int site : out) s.check_site(site);
    return out;
}

}  // namespace

Operator::Operator(MatrixXc m, HilbertStructure s) : matrix(std::move(m)), structure(std::move(s)) {
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("Operator: matrix must be square");
    if (matrix.rows() != structure.total_dim())
        throw std::invalid_argument("Operator: matrix side does not match structure");
}

bool Operator::is_hermitian(double tol) const {
    double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

Operator operator+(const Operator& a, const Operator& b) {
    if (a.structure != b.structure) throw std::invalid_argument("Operator+: structure mismatch");
    return Operator(a.matrix + b.matrix, a.structure);
}

Operator operator-(const Operator& a, const Operator& b) {
    if (a.structure != b.structure) throw std::invalid_argument("Operator-: structure mismatch");
    return Operator(a.matrix - b.matrix, a.structure);
}

Operator operator*(const Operator& a, const Operator& b) {
    if (a.structure != b.structure) throw std::invalid_argument("Operator*: structure mismatch");
    return Operator(a.matrix * b.matrix, a.structure);
}

Operator operator*(Complex scale, const Operator& a) {
    return Operator(scale * a.matrix, a.structure);
}

Operator operator*(double scale, const Operator& a) {
    return Operator(scale * a.matrix, a.structure);
}

DensityMatrix DensityMatrix::from_operator(const Operator& op, double psd_tol, double trace_tol,
                                           double herm_tol) {
    if (!op.is_hermitian(herm_tol))
        throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
    Complex tr = op.matrix.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > trace_tol)
        throw std::invalid_argument("DensityMatrix: trace differs from 1");
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(op.matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_tol)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
    return DensityMatrix(op);
}

DensityMatrix DensityMatrix::unchecked(Operator op) { return DensityMatrix(std::move(op)); }

Operator annihilation_op(int d) {
    if (d < 2) throw std::invalid_argument("annihilation_op: dimension must be >= 2");
    MatrixXc a = MatrixXc::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return Operator(std::move(a), HilbertStructure({d}));
}

Operator pauli(PauliKind which) {
    MatrixXc m = MatrixXc::Zero(2, 2);
    const Complex i(0.0, 1.0);
    switch (which) {
        case PauliKind::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case PauliKind::Y: m(0, 1) = -i; m(1, 0) = i; break;
        case PauliKind::Z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        case PauliKind::Plus: m(0, 1) = 1.0; break;
        case PauliKind::Minus: m(1, 0) = 1.0; break;
        case PauliKind::Identity: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    }
    return Operator(std::move(m), HilbertStructure({2}));
}

Operator identity_op(const HilbertStructure& structure) {
    return Operator(MatrixXc::Identity(structure.total_dim(), structure.total_dim()), structure);
}

Operator tensor_product(const Operator& a, const Operator& b) {
    std::vector<int> dims = a.structure.dims();
    dims.insert(dims.end(), b.structure.dims().begin(), b.structure.dims().end());
    return Operator(kron(a.matrix, b.matrix), HilbertStructure(std::move(dims)));
}

Operator embed(const Operator& local, int site, const HilbertStructure& structure) {
    structure.check_site(site);
    if (local.dim() != structure.dim(site))
        throw std::invalid_argument("embed: local operator does not match site dimension");
    int pre = 1, post = 1;
    for (int s = 0; s < site; ++s) pre *= structure.dim(s);
    for (int s = site + 1; s < structure.num_sites(); ++s) post *= structure.dim(s);
    MatrixXc m = kron(kron(MatrixXc::Identity(pre, pre), local.matrix),
                      MatrixXc::Identity(post, post));
    return Operator(std::move(m), structure);
}

Operator partial_trace_op(const Operator& op, const std::set<int>& keep) {
    const HilbertStructure& s = op.structure;
    std::vector<int> keep_sites = sorted_sites(keep, s, "partial_trace");

    std::vector<int> traced_sites;
    std::vector<int> keep_dims;
    for (int site = 0; site < s.num_sites(); ++site) {
        if (keep.count(site))
            keep_dims.push_back(s.dim(site));
        else
            traced_sites.push_back(site);
    }
    if (traced_sites.empty()) return op;

    const std::vector<int> keep_offsets = index_offsets(s, keep_sites);
    const std::vector<int> traced_offsets = index_offsets(s, traced_sites);
    const int dk = static_cast<int>(keep_offsets.size());

    MatrixXc out = MatrixXc::Zero(dk, dk);
    for (int r = 0; r < dk; ++r) {
        for (int c = 0; c < dk; ++c) {
            Complex sum = 0.0;
            for (int t : traced_offsets) sum += op.matrix(keep_offsets[r] + t, keep_offsets[c] + t);
            out(r, c) = sum;
        }
    }
    return Operator(std::move(out), HilbertStructure(std::move(keep_dims)));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<int>& keep) {
    return DensityMatrix::unchecked(partial_trace_op(rho.op(), keep));
}

Operator partial_transpose(const Operator& op, const std::set<int>& sites) {
    const HilbertStructure& s = op.structure;
    std::vector<int> pt_sites = sorted_sites(sites, s, "partial_transpose");

    const int d = s.total_dim();
    MatrixXc out(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            int ip = i, jp = j;
            for (int site : pt_sites) {
                const int st = s.stride(site);
                const int di = (i / st) % s.dim(site);
                const int dj = (j / st) % s.dim(site);
                ip += (dj - di) * st;
                jp += (di - dj) * st;
            }
            out(ip, jp) = op.matrix(i, j);
        }
    }
    return Operator(std::move(out), s);
}

std::pair<Operator, Operator> quadratures(int site, const HilbertStructure& structure) {
    structure.check_site(site);
    const Operator a = embed(annihilation_op(structure.dim(site)), site, structure);
    const Operator ad = a.adjoint();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Operator q = inv_sqrt2 * (a + ad);
    Operator p = Complex(0.0, inv_sqrt2) * (ad - a);
    return {std::move(q), std::move(p)};
}

VectorXc fock_state(int d, int n) {
    if (n < 0 || n >= d) throw std::invalid_argument("fock_state: level out of range");
    VectorXc v = VectorXc::Zero(d);
    v(n) = 1.0;
    return v;
}

VectorXc coherent_state(int d, Complex alpha) {
    VectorXc v(d);
    v(0) = 1.0;
    for (int n = 1; n < d; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    v.normalize();
    return v;
}

Complex expectation(const Operator& obs, const DensityMatrix& rho) {
    if (obs.structure != rho.structure())
        throw std::invalid_argument("expectation: structure mismatch");
    return (obs.matrix * rho.matrix()).trace();
}

double expectation_real(const Operator& obs, const DensityMatrix& rho) {
    return expectation(obs, rho).real();
}

double trace_distance(const MatrixXc& a, const MatrixXc& b) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qsync
