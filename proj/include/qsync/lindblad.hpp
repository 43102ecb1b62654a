#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsync/operators.hpp"
#include "qsync/timeseries.hpp"

namespace qsync {

using SpMatrixXc = Eigen::SparseMatrix<Complex>;

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct CollapseTerm {
    Operator op;
    double rate = 0.0;
};

// Full definition of a Lindblad evolution,
//   d rho/dt = -i[H, rho] + sum_k rate_k (2 L rho L^dag - L^dag L rho - rho L^dag L).
// The dissipator keeps the explicit factor 2, so a term with rate kappa
// drives population transitions at rate 2*kappa.
struct ModelSpec {
    Operator hamiltonian;
    std::vector<CollapseTerm> collapse_terms;

    const HilbertStructure& structure() const { return hamiltonian.structure; }
    void validate() const;
};

// The master-equation generator acting on column-stacked density matrices:
// vec(A rho B) = (B^T kron A) vec(rho).
struct Liouvillian {
    SpMatrixXc superop;
    HilbertStructure structure;

    int dim() const { return structure.total_dim(); }
    // L applied to a density matrix, returned in matrix form.
    MatrixXc apply(const MatrixXc& rho) const;
};

Liouvillian build_liouvillian(const ModelSpec& model);

VectorXc vectorize(const MatrixXc& m);
MatrixXc devectorize(const VectorXc& v, int dim);

struct SteadyStateOptions {
    double tol = 1e-10;        // residual tolerance on ||L(rho)||_F
    double psd_tol = 1e-8;     // most negative eigenvalue tolerated
    int dense_threshold = 32;  // total_dim <= this: dense null-space solve
    int dense_fallback_limit = 48;  // largest total_dim for the rank-deficient fallback
};

struct SteadyStateReport {
    DensityMatrix rho;
    double residual = 0.0;
    std::vector<int> cutoff_used;  // per-site dimensions actually solved at
    double leakage = 0.0;          // max top-two Fock population over bosonic sites
    bool converged = false;        // set by auto_cutoff once its criteria hold
};

// Lindblad steady state: dense null space for small systems, otherwise a
// sparse direct solve of the trace-augmented system (first row of L replaced
// by the vectorized trace functional, rhs = 1).
SteadyStateReport steady_state(const ModelSpec& model, const SteadyStateOptions& opts = {});

// Max top-two-level population over all sites with dim >= 3.
double fock_leakage(const DensityMatrix& rho);

struct IntegratorOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double trace_drift_tol = 1e-6;
};

// Adaptive Dormand-Prince RK45 over the vectorized master equation, dense
// output interpolated onto the grid; the callback sees every grid state.
void evolve_on_grid(const ModelSpec& model, const DensityMatrix& rho0, const TimeGrid& grid,
                    const std::function<void(int, double, const MatrixXc&)>& sink,
                    const IntegratorOptions& opts = {});

// Expectation values Re Tr(O rho(t)) sampled on the grid.
std::vector<TimeSeries> time_evolve(const ModelSpec& model, const DensityMatrix& rho0,
                                    const TimeGrid& grid, const std::vector<Operator>& observables,
                                    const IntegratorOptions& opts = {});

struct AutoCutoffOptions {
    double leak_tol = 1e-6;
    double obs_tol = 1e-3;
    int max_cutoff = 64;
    SteadyStateOptions solver;
};

// Re-solve on a geometric cutoff schedule (x1.5, rounded up) until the top
// two Fock levels hold less than leak_tol population and the monitored
// observable moved less than obs_tol between consecutive cutoffs.
SteadyStateReport auto_cutoff(const std::function<ModelSpec(int)>& family, int start_cutoff,
                              const std::function<double(const DensityMatrix&)>& observable,
                              const AutoCutoffOptions& opts = {});

}  // namespace qsync
