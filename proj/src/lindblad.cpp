#include "qsync/lindblad.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <cmath>

namespace qsync {

namespace {

SpMatrixXc to_sparse(const MatrixXc& m) {
    SpMatrixXc out = m.sparseView(1.0, 0.0);  // keep exact nonzeros
    out.makeCompressed();
    return out;
}

SpMatrixXc sparse_kron(const SpMatrixXc& a, const SpMatrixXc& b) {
    SpMatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka) {
        for (SpMatrixXc::InnerIterator ita(a, ka); ita; ++ita) {
            for (int kb = 0; kb < b.outerSize(); ++kb) {
                for (SpMatrixXc::InnerIterator itb(b, kb); itb; ++itb) {
                    trips.emplace_back(static_cast<int>(ita.row() * b.rows() + itb.row()),
                                       static_cast<int>(ita.col() * b.cols() + itb.col()),
                                       ita.value() * itb.value());
                }
            }
        }
    }
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

void hermitize(MatrixXc& m) { m = ((m + m.adjoint()) * 0.5).eval(); }

double max_abs(const SpMatrixXc& m) {
    double s = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMatrixXc::InnerIterator it(m, k); it; ++it) s = std::max(s, std::abs(it.value()));
    return s;
}

// Trace-augmented system: row 0 of L replaced by the vectorized trace
// functional (scaled to the magnitude of L for pivoting), rhs = scale * e0.
SpMatrixXc augmented_system(const SpMatrixXc& liou, int dim, double scale) {
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(liou.nonZeros()) + static_cast<std::size_t>(dim));
    for (int k = 0; k < liou.outerSize(); ++k)
        for (SpMatrixXc::InnerIterator it(liou, k); it; ++it)
            if (it.row() != 0)
                trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                   it.value());
    for (int i = 0; i < dim; ++i) trips.emplace_back(0, i * dim + i, Complex(scale, 0.0));
    SpMatrixXc a(liou.rows(), liou.cols());
    a.setFromTriplets(trips.begin(), trips.end());
    a.makeCompressed();
    return a;
}

struct PostProcessed {
    DensityMatrix rho;
    double residual;
};

// Normalize the raw solution vector into a state and measure ||L(rho)||_F.
PostProcessed finish_state(VectorXc x, const Liouvillian& liou, const SteadyStateOptions& opts) {
    const int d = liou.dim();
    MatrixXc rho = devectorize(x, d);
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12 * rho.norm())
        throw SolverError("steady_state: solution has vanishing trace (degenerate null space)");
    rho /= tr;
    hermitize(rho);
    rho /= rho.trace().real();

    const double residual = liou.apply(rho).norm();
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -opts.psd_tol)
        throw SolverError("steady_state: negativity " + std::to_string(min_eig) +
                          " beyond tolerance (truncation too small or degenerate steady space)");
    if (residual > opts.tol)
        throw SolverError("steady_state: residual " + std::to_string(residual) +
                          " above tolerance");
    return {DensityMatrix::unchecked(Operator(std::move(rho), liou.structure)), residual};
}

VectorXc dense_least_squares(const Liouvillian& liou, const SteadyStateOptions& opts,
                             double scale) {
    const int d = liou.dim();
    if (d > opts.dense_fallback_limit)
        throw SolverError("steady_state: sparse factorization failed and system too large "
                          "for the dense fallback");
    MatrixXc a(liou.superop);
    a.row(0).setZero();
    for (int i = 0; i < d; ++i) a(0, i * d + i) = scale;
    VectorXc b = VectorXc::Zero(a.rows());
    b(0) = scale;
    // Minimum-norm least squares tolerates a degenerate steady space; the
    // min-norm point of the affine solution set is the Hermitian one.
    Eigen::CompleteOrthogonalDecomposition<MatrixXc> cod(a);
    return cod.solve(b);
}

VectorXc dense_null_space(const Liouvillian& liou) {
    MatrixXc l(liou.superop);
    Eigen::ComplexEigenSolver<MatrixXc> es(l, true);
    Eigen::Index best = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&best);
    return es.eigenvectors().col(best);
}

VectorXc sparse_direct_solve(const Liouvillian& liou, double scale, bool& ok) {
    const SpMatrixXc a = augmented_system(liou.superop, liou.dim(), scale);
    VectorXc b = VectorXc::Zero(a.rows());
    b(0) = scale;

    Eigen::SparseLU<SpMatrixXc, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        ok = false;
        return {};
    }
    VectorXc x = lu.solve(b);
    // Iterative refinement sharpens the residual to near machine precision.
    double prev = std::numeric_limits<double>::max();
    for (int pass = 0; pass < 3; ++pass) {
        VectorXc r = b - a * x;
        const double rn = r.norm();
        if (rn >= prev || rn < 1e-16 * scale * x.norm()) break;
        prev = rn;
        x += lu.solve(r);
    }
    ok = true;
    return x;
}

}  // namespace

void ModelSpec::validate() const {
    if (!hamiltonian.is_hermitian(1e-12))
        throw std::invalid_argument("ModelSpec: Hamiltonian is not Hermitian");
    for (const auto& term : collapse_terms) {
        if (term.rate < 0.0) throw std::invalid_argument("ModelSpec: negative collapse rate");
        if (term.op.structure != hamiltonian.structure)
            throw std::invalid_argument("ModelSpec: collapse operator structure mismatch");
    }
}

VectorXc vectorize(const MatrixXc& m) {
    return Eigen::Map<const VectorXc>(m.data(), m.size());
}

MatrixXc devectorize(const VectorXc& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim)
        throw std::invalid_argument("devectorize: size mismatch");
    return Eigen::Map<const MatrixXc>(v.data(), dim, dim);
}

MatrixXc Liouvillian::apply(const MatrixXc& rho) const {
    const int d = dim();
    Eigen::Map<const VectorXc> v(rho.data(), rho.size());
    VectorXc image = superop * v;
    return devectorize(image, d);
}

Liouvillian build_liouvillian(const ModelSpec& model) {
    model.validate();
    const int d = model.structure().total_dim();
    const SpMatrixXc id = SpMatrixXc(MatrixXc::Identity(d, d).sparseView());
    const SpMatrixXc h = to_sparse(model.hamiltonian.matrix);

    const Complex mi(0.0, -1.0);
    SpMatrixXc superop = mi * (sparse_kron(id, h) - sparse_kron(SpMatrixXc(h.transpose()), id));

    for (const auto& term : model.collapse_terms) {
        if (term.rate == 0.0) continue;
        const SpMatrixXc l = to_sparse(term.op.matrix);
        const SpMatrixXc ldl = SpMatrixXc(l.adjoint()) * l;  // L^dag L
        SpMatrixXc diss = 2.0 * sparse_kron(SpMatrixXc(l.conjugate()), l) -
                          sparse_kron(id, ldl) - sparse_kron(SpMatrixXc(ldl.transpose()), id);
        superop += term.rate * diss;
    }
    superop.makeCompressed();
    return Liouvillian{std::move(superop), model.structure()};
}

double fock_leakage(const DensityMatrix& rho) {
    const HilbertStructure& s = rho.structure();
    double leak = 0.0;
    for (int site = 0; site < s.num_sites(); ++site) {
        if (s.dim(site) < 3) continue;
        Operator red = partial_trace_op(rho.op(), {site});
        const int d = s.dim(site);
        leak = std::max(leak, red.matrix(d - 1, d - 1).real() + red.matrix(d - 2, d - 2).real());
    }
    return leak;
}

SteadyStateReport steady_state(const ModelSpec& model, const SteadyStateOptions& opts) {
    const Liouvillian liou = build_liouvillian(model);
    const double scale = std::max(1.0, max_abs(liou.superop));

    VectorXc x;
    if (liou.dim() <= opts.dense_threshold) {
        x = dense_null_space(liou);
        MatrixXc probe = devectorize(x, liou.dim());
        if (std::abs(probe.trace()) < 1e-10 * probe.norm())
            x = dense_least_squares(liou, opts, scale);
    } else {
        bool ok = false;
        x = sparse_direct_solve(liou, scale, ok);
        if (!ok) x = dense_least_squares(liou, opts, scale);
    }

    PostProcessed post = finish_state(std::move(x), liou, opts);
    SteadyStateReport report{std::move(post.rho), post.residual, model.structure().dims(),
                             0.0, false};
    report.leakage = fock_leakage(report.rho);
    return report;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0;
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0,
                 A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                 A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                 E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;
// Dense-output weights.
constexpr double D1 = -12715105075.0 / 11282082432.0, D3 = 87487479700.0 / 32700410799.0,
                 D4 = -10690763975.0 / 1880347072.0, D5 = 701980252875.0 / 199316789632.0,
                 D6 = -1453857185.0 / 822651844.0, D7 = 69997945.0 / 29380423.0;

void hermitize_vec(VectorXc& y, int d) {
    for (int c = 0; c < d; ++c) {
        y(static_cast<Eigen::Index>(c) * d + c) = Complex(y(c * d + c).real(), 0.0);
        for (int r = c + 1; r < d; ++r) {
            const Complex lo = y(static_cast<Eigen::Index>(c) * d + r);
            const Complex hi = y(static_cast<Eigen::Index>(r) * d + c);
            const Complex avg = 0.5 * (lo + std::conj(hi));
            y(static_cast<Eigen::Index>(c) * d + r) = avg;
            y(static_cast<Eigen::Index>(r) * d + c) = std::conj(avg);
        }
    }
}

double trace_vec(const VectorXc& y, int d) {
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += y(static_cast<Eigen::Index>(i) * d + i).real();
    return tr;
}

double gershgorin_bound(const MatrixXc& h) {
    double bound = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) bound = std::max(bound, h.row(i).cwiseAbs().sum());
    return bound;
}

}  // namespace

void evolve_on_grid(const ModelSpec& model, const DensityMatrix& rho0, const TimeGrid& grid,
                    const std::function<void(int, double, const MatrixXc&)>& sink,
                    const IntegratorOptions& opts) {
    if (rho0.structure() != model.structure())
        throw std::invalid_argument("evolve_on_grid: initial state structure mismatch");
    const Liouvillian liou = build_liouvillian(model);
    const int d = liou.dim();
    const auto rhs = [&](const VectorXc& y) -> VectorXc { return liou.superop * y; };

    VectorXc y = vectorize(rho0.matrix());
    double t = grid.t0;
    const double t_end = grid.t_end();
    int out_idx = 0;

    auto emit = [&](int idx, double time, VectorXc state) {
        hermitize_vec(state, d);
        sink(idx, time, devectorize(state, d));
    };
    emit(out_idx++, t, y);
    if (grid.count == 1) return;

    // Initial step from the Gershgorin bound on the Hamiltonian spectrum.
    const double lam = std::max(gershgorin_bound(model.hamiltonian.matrix), 1e-9);
    double h = std::min(1e-3 * 2.0 * M_PI / lam, (t_end - grid.t0) / 10.0);

    VectorXc k1 = rhs(y), k2, k3, k4, k5, k6, k7, y1;
    const double initial_trace = trace_vec(y, d);

    while (t < t_end) {
        h = std::min(h, t_end - t);
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw SolverError("time_evolve: step size underflow");

        k2 = rhs(y + h * (A21 * k1));
        k3 = rhs(y + h * (A31 * k1 + A32 * k2));
        k4 = rhs(y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        k5 = rhs(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        k6 = rhs(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        y1 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        k7 = rhs(y1);

        const VectorXc err_vec =
            h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        double err_sq = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc =
                opts.abs_tol + opts.rel_tol * std::max(std::abs(y(i)), std::abs(y1(i)));
            const double e = std::abs(err_vec(i)) / sc;
            err_sq += e * e;
        }
        const double err = std::sqrt(err_sq / static_cast<double>(y.size()));

        if (err <= 1.0) {
            // Accepted: emit every grid point inside [t, t+h] via dense output.
            bool rcont_ready = false;
            VectorXc rc2, rc3, rc4, rc5;
            while (out_idx < grid.count && grid.time(out_idx) <= t + h + 1e-12 * h) {
                if (!rcont_ready) {
                    const VectorXc ydiff = y1 - y;
                    rc2 = ydiff;
                    rc3 = h * k1 - ydiff;
                    rc4 = ydiff - h * k7 - rc3;
                    rc5 = h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7);
                    rcont_ready = true;
                }
                const double theta = std::clamp((grid.time(out_idx) - t) / h, 0.0, 1.0);
                const double th1 = 1.0 - theta;
                VectorXc interp =
                    y + theta * (rc2 + th1 * (rc3 + theta * (rc4 + th1 * rc5)));
                emit(out_idx, grid.time(out_idx), std::move(interp));
                ++out_idx;
            }
            t += h;
            y.swap(y1);
            hermitize_vec(y, d);
            if (std::abs(trace_vec(y, d) - initial_trace) > opts.trace_drift_tol)
                throw SolverError("time_evolve: trace drift exceeds tolerance "
                                  "(stiffness or truncation failure)");
            k1 = rhs(y);
            h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(err + 1e-300, -0.2)));
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    // Floating point may leave the final grid point un-emitted.
    while (out_idx < grid.count) {
        emit(out_idx, grid.time(out_idx), y);
        ++out_idx;
    }
}

std::vector<TimeSeries> time_evolve(const ModelSpec& model, const DensityMatrix& rho0,
                                    const TimeGrid& grid, const std::vector<Operator>& observables,
                                    const IntegratorOptions& opts) {
    std::vector<TimeSeries> out(observables.size());
    for (auto& series : out) {
        series.t0 = grid.t0;
        series.dt = grid.dt;
        series.values.assign(static_cast<std::size_t>(grid.count), 0.0);
    }
    evolve_on_grid(model, rho0, grid,
                   [&](int idx, double, const MatrixXc& rho) {
                       for (std::size_t k = 0; k < observables.size(); ++k)
                           out[k].values[static_cast<std::size_t>(idx)] =
                               (observables[k].matrix * rho).trace().real();
                   },
                   opts);
    return out;
}

SteadyStateReport auto_cutoff(const std::function<ModelSpec(int)>& family, int start_cutoff,
                              const std::function<double(const DensityMatrix&)>& observable,
                              const AutoCutoffOptions& opts) {
    if (start_cutoff < 3) throw std::invalid_argument("auto_cutoff: start cutoff must be >= 3");
    double prev_obs = std::numeric_limits<double>::quiet_NaN();
    int cutoff = start_cutoff;
    while (cutoff <= opts.max_cutoff) {
        SteadyStateReport report = steady_state(family(cutoff), opts.solver);
        const double obs = observable(report.rho);
        const bool leak_ok = report.leakage < opts.leak_tol;
        const bool obs_ok = !std::isnan(prev_obs) && std::abs(obs - prev_obs) < opts.obs_tol;
        if (leak_ok && obs_ok) {
            report.converged = true;
            return report;
        }
        prev_obs = obs;
        cutoff = static_cast<int>(std::ceil(1.5 * cutoff));
    }
    throw SolverError("auto_cutoff: exceeded max cutoff " + std::to_string(opts.max_cutoff) +
                      " without convergence");
}

}  // namespace qsync
