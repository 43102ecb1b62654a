#include "qsync/measures.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qsync {

namespace {

double entropy_from_eigenvalues(const Eigen::VectorXd& eigs) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        if (eigs(i) < -1e-8)
            throw std::invalid_argument("von_neumann_entropy: eigenvalue below -1e-8");
        const double lam = std::min(eigs(i), 1.0);
        if (lam < 1e-10) continue;
        s -= lam * std::log(lam);
    }
    return s;
}

// Closed-form entropy of a 2x2 Hermitian state.
double entropy_2x2(const MatrixXc& rho) {
    const double a = rho(0, 0).real();
    const double b = rho(1, 1).real();
    const double mid = 0.5 * (a + b);
    const double off = std::sqrt(0.25 * (a - b) * (a - b) + std::norm(rho(0, 1)));
    Eigen::Vector2d eigs(mid - off, mid + off);
    return entropy_from_eigenvalues(eigs);
}

MatrixXc bloch_projector(double theta, double phi, int sign) {
    const double nx = std::sin(theta) * std::cos(phi);
    const double ny = std::sin(theta) * std::sin(phi);
    const double nz = std::cos(theta);
    MatrixXc p(2, 2);
    const double s = static_cast<double>(sign);
    p(0, 0) = 0.5 * (1.0 + s * nz);
    p(1, 1) = 0.5 * (1.0 - s * nz);
    p(0, 1) = 0.5 * s * Complex(nx, -ny);
    p(1, 0) = 0.5 * s * Complex(nx, ny);
    return p;
}

void require_two_qubits(const DensityMatrix& rho, const char* what) {
    if (rho.structure().dims() != std::vector<int>{2, 2})
        throw std::invalid_argument(std::string(what) + ": expects a two-qubit state");
}

}  // namespace

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho.matrix(), Eigen::EigenvaluesOnly);
    return entropy_from_eigenvalues(es.eigenvalues());
}

double mutual_information(const DensityMatrix& rho, const std::set<int>& part_a,
                          const std::set<int>& part_b) {
    const int sites = rho.structure().num_sites();
    if (part_a.empty() || part_b.empty())
        throw std::invalid_argument("mutual_information: empty partition");
    for (int s : part_a)
        if (part_b.count(s))
            throw std::invalid_argument("mutual_information: partitions overlap");
    if (static_cast<int>(part_a.size() + part_b.size()) != sites)
        throw std::invalid_argument("mutual_information: partitions must cover all sites");

    const double s_a = von_neumann_entropy(partial_trace(rho, part_a));
    const double s_b = von_neumann_entropy(partial_trace(rho, part_b));
    return s_a + s_b - von_neumann_entropy(rho);
}

double sync_measure_sc(const DensityMatrix& rho, int site1, int site2) {
    const auto [q1, p1] = quadratures(site1, rho.structure());
    const auto [q2, p2] = quadratures(site2, rho.structure());
    const double half = 0.5;  // the 1/sqrt(2) of each difference quadrature, squared
    const Operator dq = q2 - q1;
    const Operator dp = p2 - p1;
    const Operator quad_form = half * (dq * dq + dp * dp);
    const double value = expectation_real(quad_form, rho);
    if (value <= 0.0)
        throw std::runtime_error("sync_measure_sc: non-positive quadrature variance "
                                 "(numerically corrupted state)");
    return 1.0 / value;
}

double negativity(const DensityMatrix& rho, const std::set<int>& part_a) {
    const Operator pt = partial_transpose(rho.op(), part_a);
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(pt.matrix, Eigen::EigenvaluesOnly);
    double neg = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        neg += std::max(0.0, -es.eigenvalues()(i));
    return neg;
}

double measurement_information(const DensityMatrix& rho, MeasuredSide side,
                               const MeasurementBasis& basis) {
    require_two_qubits(rho, "measurement_information");
    const int measured = (side == MeasuredSide::A) ? 0 : 1;
    const int other = 1 - measured;

    const Operator reduced_other = partial_trace_op(rho.op(), {other});
    const double s_other = entropy_2x2(reduced_other.matrix);

    double conditional = 0.0;
    for (int sign : {+1, -1}) {
        const Operator proj(bloch_projector(basis.theta, basis.phi, sign), HilbertStructure({2}));
        const Operator projected = embed(proj, measured, rho.structure()) * rho.op();
        const Operator cond = partial_trace_op(projected, {other});
        const double p = cond.matrix.trace().real();
        if (p < 1e-12) continue;
        conditional += p * entropy_2x2(cond.matrix / p);
    }
    return s_other - conditional;
}

namespace {

struct SimplexPoint {
    std::array<double, 2> x;
    double value;  // negated objective, minimized
};

// Standard Nelder-Mead on (theta, phi); the objective is smooth and periodic,
// so the walk is left unconstrained.
SimplexPoint nelder_mead(const std::function<double(const std::array<double, 2>&)>& f,
                         std::array<double, 2> start, double step, double diameter_tol) {
    std::array<SimplexPoint, 3> simplex;
    simplex[0] = {start, f(start)};
    simplex[1] = {{start[0] + step, start[1]}, 0.0};
    simplex[1].value = f(simplex[1].x);
    simplex[2] = {{start[0], start[1] + step}, 0.0};
    simplex[2].value = f(simplex[2].x);

    auto diameter = [&]() {
        double d = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                d = std::max(d, std::hypot(simplex[i].x[0] - simplex[j].x[0],
                                           simplex[i].x[1] - simplex[j].x[1]));
        return d;
    };

    for (int iter = 0; iter < 500 && diameter() >= diameter_tol; ++iter) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const SimplexPoint& a, const SimplexPoint& b) { return a.value < b.value; });
        const std::array<double, 2> centroid{0.5 * (simplex[0].x[0] + simplex[1].x[0]),
                                             0.5 * (simplex[0].x[1] + simplex[1].x[1])};
        auto along = [&](double coeff) {
            return std::array<double, 2>{centroid[0] + coeff * (centroid[0] - simplex[2].x[0]),
                                         centroid[1] + coeff * (centroid[1] - simplex[2].x[1])};
        };

        const std::array<double, 2> xr = along(1.0);
        const double fr = f(xr);
        if (fr < simplex[0].value) {
            const std::array<double, 2> xe = along(2.0);
            const double fe = f(xe);
            simplex[2] = (fe < fr) ? SimplexPoint{xe, fe} : SimplexPoint{xr, fr};
        } else if (fr < simplex[1].value) {
            simplex[2] = {xr, fr};
        } else {
            const std::array<double, 2> xc = along(-0.5);
            const double fc = f(xc);
            if (fc < simplex[2].value) {
                simplex[2] = {xc, fc};
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].x[0] = 0.5 * (simplex[i].x[0] + simplex[0].x[0]);
                    simplex[i].x[1] = 0.5 * (simplex[i].x[1] + simplex[0].x[1]);
                    simplex[i].value = f(simplex[i].x);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const SimplexPoint& a, const SimplexPoint& b) { return a.value < b.value; });
    return simplex[0];
}

}  // namespace

ClassicalCorrelationsResult classical_correlations(const DensityMatrix& rho, MeasuredSide side,
                                                   const ClassicalOptions& opts) {
    require_two_qubits(rho, "classical_correlations");

    double best = -std::numeric_limits<double>::infinity();
    MeasurementBasis best_basis;
    const int n = opts.grid_points;
    for (int i = 0; i < n; ++i) {
        const double theta = M_PI * static_cast<double>(i) / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double phi = 2.0 * M_PI * static_cast<double>(j) / n;
            const double v = measurement_information(rho, side, {theta, phi});
            if (v > best) {
                best = v;
                best_basis = {theta, phi};
            }
        }
    }

    const auto objective = [&](const std::array<double, 2>& x) {
        return -measurement_information(rho, side, {x[0], x[1]});
    };
    const double step = 0.5 * M_PI / n;
    const SimplexPoint refined =
        nelder_mead(objective, {best_basis.theta, best_basis.phi}, step, opts.simplex_tol);

    if (-refined.value > best) {
        best = -refined.value;
        best_basis = {refined.x[0], refined.x[1]};
    }
    return {best, best_basis};
}

CorrelationBundle discord(const DensityMatrix& rho, MeasuredSide side,
                          const ClassicalOptions& opts) {
    require_two_qubits(rho, "discord");
    CorrelationBundle bundle;
    bundle.mutual_info = mutual_information(rho, {0}, {1});
    const ClassicalCorrelationsResult cc = classical_correlations(rho, side, opts);
    bundle.classical = cc.value;
    bundle.basis_at_optimum = cc.basis;
    bundle.discord = bundle.mutual_info - bundle.classical;
    bundle.negativity = qsync::negativity(rho, {0});
    return bundle;
}

namespace {

int dominant_bin(const std::vector<Complex>& spectrum, int n) {
    int best = 1;
    double best_mag = 0.0;
    for (int k = 1; k <= n / 2; ++k) {
        const double mag = std::abs(spectrum[static_cast<std::size_t>(k)]);
        if (mag > best_mag) {
            best_mag = mag;
            best = k;
        }
    }
    return best;
}

std::vector<double> subtract_running_mean(const std::vector<double>& v, int window) {
    const int n = static_cast<int>(v.size());
    const int half = std::max(1, window / 2);
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[static_cast<std::size_t>(i) + 1] = prefix[i] + v[i];
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int h = std::min({half, i, n - 1 - i});  // window shrinks at the edges
        const int lo = i - h, hi = i + h;
        const double mean = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
        out[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] - mean;
    }
    return out;
}

}  // namespace

TimeSeries extract_phase(const TimeSeries& series) {
    const int n = series.size();
    if (n < 64) throw std::invalid_argument("extract_phase: need at least 64 samples");
    if (series.dt <= 0.0) throw std::invalid_argument("extract_phase: non-positive sample step");

    // Dominant period from the spectrum of the mean-free signal.
    const double mean = std::accumulate(series.values.begin(), series.values.end(), 0.0) / n;
    std::vector<Complex> input(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) input[static_cast<std::size_t>(i)] = series.values[i] - mean;

    Eigen::FFT<double> fft;
    std::vector<Complex> spectrum;
    fft.fwd(spectrum, input);
    const int peak = dominant_bin(spectrum, n);
    const double period = static_cast<double>(n) * series.dt / peak;
    if (series.span() < 5.0 * period)
        throw std::invalid_argument("extract_phase: series spans fewer than 5 periods");

    int window = static_cast<int>(std::lround(period / series.dt));
    if (window % 2 == 0) ++window;
    const std::vector<double> centered = subtract_running_mean(series.values, window);

    // Analytic signal: suppress negative frequencies, double positive ones.
    for (int i = 0; i < n; ++i) input[static_cast<std::size_t>(i)] = centered[i];
    fft.fwd(spectrum, input);
    for (int k = 1; k < (n + 1) / 2; ++k) spectrum[static_cast<std::size_t>(k)] *= 2.0;
    for (int k = n / 2 + 1; k < n; ++k) spectrum[static_cast<std::size_t>(k)] = 0.0;
    std::vector<Complex> analytic;
    fft.inv(analytic, spectrum);

    int weak = 0;
    for (const Complex& z : analytic)
        if (std::abs(z) < 1e-12) ++weak;
    if (weak > n / 10)
        throw std::runtime_error("extract_phase: analytic signal amplitude vanishes "
                                 "over more than 10% of the samples");

    TimeSeries phase{series.t0, series.dt, std::vector<double>(static_cast<std::size_t>(n))};
    double prev = std::arg(analytic[0]);
    double offset = 0.0;
    phase.values[0] = prev;
    for (int i = 1; i < n; ++i) {
        const double raw = std::arg(analytic[static_cast<std::size_t>(i)]);
        double jump = raw - prev;
        while (jump > M_PI) {
            offset -= 2.0 * M_PI;
            jump -= 2.0 * M_PI;
        }
        while (jump < -M_PI) {
            offset += 2.0 * M_PI;
            jump += 2.0 * M_PI;
        }
        phase.values[static_cast<std::size_t>(i)] = raw + offset;
        prev = raw;
    }
    return phase;
}

TimeSeries phase_locking_sp(const TimeSeries& series1, const TimeSeries& series2) {
    const double scale = std::max({1.0, std::abs(series1.t0), std::abs(series1.dt)});
    if (series1.size() != series2.size() || std::abs(series1.t0 - series2.t0) > 1e-9 * scale ||
        std::abs(series1.dt - series2.dt) > 1e-9 * scale)
        throw std::invalid_argument("phase_locking_sp: time grids differ");

    const TimeSeries phi1 = extract_phase(series1);
    const TimeSeries phi2 = extract_phase(series2);
    TimeSeries sp{series1.t0, series1.dt,
                  std::vector<double>(static_cast<std::size_t>(series1.size()))};
    for (int i = 0; i < series1.size(); ++i)
        sp.values[static_cast<std::size_t>(i)] =
            std::cos(phi2.values[static_cast<std::size_t>(i)] -
                     phi1.values[static_cast<std::size_t>(i)]);
    return sp;
}

WindowStats late_window_stats(const TimeSeries& series, double edge_trim, double late_fraction) {
    const int n = series.size();
    const int trim = static_cast<int>(std::floor(edge_trim * n));
    const int lo_full = trim, hi = n - trim;  // trimmed window [lo_full, hi)
    if (hi - lo_full < 2) throw std::invalid_argument("late_window_stats: series too short");
    const int lo = hi - static_cast<int>(std::ceil(late_fraction * (hi - lo_full)));

    double mean = 0.0;
    for (int i = lo; i < hi; ++i) mean += series.values[static_cast<std::size_t>(i)];
    mean /= (hi - lo);
    double var = 0.0;
    for (int i = lo; i < hi; ++i) {
        const double d = series.values[static_cast<std::size_t>(i)] - mean;
        var += d * d;
    }
    var /= (hi - lo);
    return {mean, std::sqrt(var)};
}

}  // namespace qsync
