#pragma once

#include <set>

#include "qsync/operators.hpp"
#include "qsync/timeseries.hpp"

namespace qsync {

// -Tr[rho ln rho] in nats. Eigenvalues below 1e-10 are treated as exact
// zeros; anything below -1e-8 is rejected as an invalid state.
double von_neumann_entropy(const DensityMatrix& rho);

// S(rho_A) + S(rho_B) - S(rho) for a bipartition covering all sites.
double mutual_information(const DensityMatrix& rho, const std::set<int>& part_a,
                          const std::set<int>& part_b);

// Complete-synchronization measure 1 / <p_-^2 + q_-^2> of two bosonic modes,
// with p_- = (p2 - p1)/sqrt(2), q_- = (q2 - q1)/sqrt(2).
double sync_measure_sc(const DensityMatrix& rho, int site1, int site2);

// (||rho^{T_A}||_1 - 1)/2: magnitude of the negative eigenvalue mass of the
// partial transpose.
double negativity(const DensityMatrix& rho, const std::set<int>& part_a);

// Bloch angles of a pair of orthogonal rank-1 qubit projectors
// (I +/- n.sigma)/2.
struct MeasurementBasis {
    double theta = 0.0;  // polar, [0, pi]
    double phi = 0.0;    // azimuthal, [0, 2pi)
};

enum class MeasuredSide { A, B };

struct ClassicalCorrelationsResult {
    double value = 0.0;
    MeasurementBasis basis;
};

struct ClassicalOptions {
    int grid_points = 64;          // per angle, coarse scan
    double simplex_tol = 1e-6;     // Nelder-Mead diameter at convergence
};

// Henderson-Vedral classical correlations of a two-qubit state: maximum over
// orthogonal projective measurements on one side of the information gained
// about the other.
ClassicalCorrelationsResult classical_correlations(const DensityMatrix& rho, MeasuredSide side,
                                                   const ClassicalOptions& opts = {});

// One projective-measurement objective evaluation, exposed for brute-force
// grid oracles: S(rho_other) - sum_a p_a S(rho_other | a).
double measurement_information(const DensityMatrix& rho, MeasuredSide side,
                               const MeasurementBasis& basis);

struct CorrelationBundle {
    double mutual_info = 0.0;
    double classical = 0.0;
    double discord = 0.0;
    double negativity = 0.0;
    MeasurementBasis basis_at_optimum;
};

// Mutual information split into classical correlations and quantum discord,
// plus the negativity, all on one two-qubit state.
CorrelationBundle discord(const DensityMatrix& rho, MeasuredSide side,
                          const ClassicalOptions& opts = {});

// Instantaneous unwrapped phase of an oscillating series: running mean
// removed (window = one estimated period), analytic signal from the
// frequency-domain Hilbert transform, argument unwrapped by 2pi continuity.
TimeSeries extract_phase(const TimeSeries& series);

// cos(phi2 - phi1) of the two unwrapped phases, point-wise.
TimeSeries phase_locking_sp(const TimeSeries& series1, const TimeSeries& series2);

struct WindowStats {
    double mean = 0.0;
    double stddev = 0.0;
};

// Statistics over the final fraction of a series after trimming both edges;
// the default window is used for phase-locking plateau classification.
WindowStats late_window_stats(const TimeSeries& series, double edge_trim = 0.05,
                              double late_fraction = 0.5);

}  // namespace qsync
