#include "chaoscast/dynamics.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>

namespace chaoscast::dynamics {

namespace {

constexpr double kBlowupLimit = 1e6;

void check_finite_or_blowup(const Vec& state, const char* what) {
    if (!state.allFinite() || state.array().abs().maxCoeff() > kBlowupLimit)
        throw std::runtime_error(std::string(what) + ": simulation blowup (state left |x| <= 1e6)");
}

Vec perturbed_uniform(Index n, double level, double base, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec x(n);
    for (Index i = 0; i < n; ++i) x[i] = base + level * gauss(rng);
    return x;
}

TimeSeriesDataset record_trajectory(const std::function<Vec(const Vec&)>& advance, Vec state,
                                    double dt, double t_transient, double t_total,
                                    const char* what) {
    long transient_steps = std::lround(t_transient / dt);
    long n_samples = std::lround((t_total - t_transient) / dt);
    for (long i = 0; i < transient_steps; ++i) {
        state = advance(state);
        if ((i & 0xff) == 0) check_finite_or_blowup(state, what);
    }
    check_finite_or_blowup(state, what);
    TimeSeriesDataset ds;
    ds.dt = dt;
    ds.values.resize(state.size(), n_samples);
    for (long i = 0; i < n_samples; ++i) {
        ds.values.col(i) = state;
        state = advance(state);
        if ((i & 0xff) == 0) check_finite_or_blowup(state, what);
    }
    ds.split = n_samples / 2;
    ds.compute_train_stats();
    return ds;
}

}  // namespace

void Lorenz96Config::validate() const {
    require(grid_size >= 4, "lorenz96: grid size must be >= 4 (stencil needs distinct sites)");
    require(dt > 0, "lorenz96: dt must be positive");
    require(t_transient < t_total, "lorenz96: t_transient must be < t_total");
}

void KSConfig::validate() const {
    require(grid_points >= 8 && grid_points % 2 == 0, "ks: grid points must be even and >= 8");
    require(domain_size > 0 && viscosity > 0, "ks: L and nu must be positive");
    require(dt > 0, "ks: dt must be positive");
    require(t_transient < t_total, "ks: t_transient must be < t_total");
}

Vec lorenz96_rhs(const Vec& state, double forcing) {
    const Index n = state.size();
    require(n >= 4, "lorenz96_rhs: state dimension must be >= 4");
    Vec out(n);
    for (Index j = 0; j < n; ++j) {
        double xp1 = state[(j + 1) % n];
        double xm1 = state[(j - 1 + n) % n];
        double xm2 = state[(j - 2 + n) % n];
        out[j] = (xp1 - xm2) * xm1 - state[j] + forcing;
    }
    return out;
}

Mat lorenz96_jacobian(const Vec& state) {
    const Index n = state.size();
    require(n >= 4, "lorenz96_jacobian: state dimension must be >= 4");
    Mat jac = Mat::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        Index jp1 = (j + 1) % n, jm1 = (j - 1 + n) % n, jm2 = (j - 2 + n) % n;
        jac(j, jp1) += state[jm1];
        jac(j, jm1) += state[jp1] - state[jm2];
        jac(j, jm2) += -state[jm1];
        jac(j, j) += -1.0;
    }
    return jac;
}

Vec rk4_step(const std::function<Vec(const Vec&)>& rhs, const Vec& state, double dt) {
    require(dt > 0, "rk4_step: dt must be positive");
    if (!state.allFinite()) throw std::runtime_error("rk4_step: non-finite state");
    Vec k1 = rhs(state);
    Vec k2 = rhs(state + 0.5 * dt * k1);
    Vec k3 = rhs(state + 0.5 * dt * k2);
    Vec k4 = rhs(state + dt * k3);
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

TimeSeriesDataset simulate_lorenz96(const Lorenz96Config& cfg) {
    cfg.validate();
    Vec x0 = perturbed_uniform(cfg.grid_size, 1e-3, cfg.forcing, cfg.seed);
    auto rhs = [&](const Vec& x) { return lorenz96_rhs(x, cfg.forcing); };
    auto advance = [&](const Vec& x) { return rk4_step(rhs, x, cfg.dt); };
    return record_trajectory(advance, std::move(x0), cfg.dt, cfg.t_transient, cfg.t_total,
                             "simulate_lorenz96");
}

// ---------------------------------------------------------------------------
// Kuramoto-Sivashinsky ETDRK4
// ---------------------------------------------------------------------------

KsSolver::KsSolver(double domain_size, double viscosity, int grid_points, double dt)
    : n_(grid_points), length_(domain_size), dt_(dt) {
    require(n_ >= 8 && n_ % 2 == 0, "KsSolver: grid points must be even and >= 8");
    require(dt_ > 0, "KsSolver: dt must be positive");

    using namespace std::complex_literals;
    const double two_pi = 2.0 * std::numbers::pi;
    wavenumber_.resize(n_);
    Eigen::ArrayXd linear(n_);
    dealias_.resize(n_);
    for (int j = 0; j < n_; ++j) {
        int m = j <= n_ / 2 ? j : j - n_;
        double k = two_pi * m / length_;
        // drop the unmatched Nyquist mode from odd-order derivatives
        wavenumber_[j] = (j == n_ / 2) ? 0.0 : 1i * k;
        linear[j] = k * k - viscosity * k * k * k * k;
        dealias_[j] = (std::abs(m) < n_ / 3) ? 1.0 : 0.0;
    }

    E_ = (dt_ * linear).exp();
    E2_ = (0.5 * dt_ * linear).exp();

    // Contour-averaged phi functions (32 unit-circle points) to avoid
    // cancellation near L = 0.
    const int m_pts = 32;
    Eigen::ArrayXd q = Eigen::ArrayXd::Zero(n_), f1 = q, f2 = q, f3 = q;
    for (int p = 0; p < m_pts; ++p) {
        std::complex<double> r = std::exp(1i * (std::numbers::pi * (p + 0.5) / m_pts));
        for (int j = 0; j < n_; ++j) {
            std::complex<double> lr = dt_ * linear[j] + r;
            std::complex<double> elr = std::exp(lr);
            std::complex<double> lr3 = lr * lr * lr;
            q[j] += ((std::exp(lr / 2.0) - 1.0) / lr).real();
            f1[j] += ((-4.0 - lr + elr * (4.0 - 3.0 * lr + lr * lr)) / lr3).real();
            f2[j] += ((2.0 + lr + elr * (-2.0 + lr)) / lr3).real();
            f3[j] += ((-4.0 - 3.0 * lr - lr * lr + elr * (4.0 - lr)) / lr3).real();
        }
    }
    Q_ = dt_ * q / m_pts;
    f1_ = dt_ * f1 / m_pts;
    f2_ = dt_ * f2 / m_pts;
    f3_ = dt_ * f3 / m_pts;

    set_state(Vec::Zero(n_));
}

Eigen::VectorXcd KsSolver::to_spectral(const Vec& physical) const {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd in = physical.cast<std::complex<double>>(), out(n_);
    fft.fwd(out, in);
    return out;
}

Vec KsSolver::to_physical(const Eigen::VectorXcd& spectral) const {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd out(n_);
    fft.inv(out, spectral);
    return out.real();
}

void KsSolver::set_state(const Vec& u) {
    require(u.size() == n_, "KsSolver: state size mismatch");
    u_ = u;
    uhat_ = to_spectral(u);
}

// N(v) = -u u_x = -1/2 (u^2)_x, pseudospectral with 2/3 dealiasing.
Eigen::VectorXcd KsSolver::nonlinear(const Eigen::VectorXcd& v) const {
    Vec u = to_physical(v);
    Eigen::VectorXcd sq = to_spectral(u.array().square().matrix());
    return (-0.5 * wavenumber_.array() * dealias_ * sq.array()).matrix();
}

// dN/du at base state applied to w:  -(base * w)_x.
Eigen::VectorXcd KsSolver::nonlinear_tangent(const Vec& base_phys, const Eigen::VectorXcd& w) const {
    Vec wp = to_physical(w);
    Eigen::VectorXcd prod = to_spectral((base_phys.array() * wp.array()).matrix());
    return (-wavenumber_.array() * dealias_ * prod.array()).matrix();
}

void KsSolver::step() {
    Eigen::VectorXcd nv = nonlinear(uhat_);
    Eigen::VectorXcd a = (E2_ * uhat_.array() + Q_ * nv.array()).matrix();
    Eigen::VectorXcd na = nonlinear(a);
    Eigen::VectorXcd b = (E2_ * uhat_.array() + Q_ * na.array()).matrix();
    Eigen::VectorXcd nb = nonlinear(b);
    Eigen::VectorXcd c = (E2_ * a.array() + Q_ * (2.0 * nb.array() - nv.array())).matrix();
    Eigen::VectorXcd nc = nonlinear(c);
    uhat_ = (E_ * uhat_.array() + f1_ * nv.array() + 2.0 * f2_ * (na.array() + nb.array()) +
             f3_ * nc.array())
                .matrix();
    u_ = to_physical(uhat_);
}

void KsSolver::step_with_tangent(Mat& tangent) {
    require(tangent.rows() == n_, "KsSolver: tangent row count mismatch");
    // Base stages (kept for linearization points).
    Eigen::VectorXcd nv = nonlinear(uhat_);
    Eigen::VectorXcd a = (E2_ * uhat_.array() + Q_ * nv.array()).matrix();
    Eigen::VectorXcd na = nonlinear(a);
    Eigen::VectorXcd b = (E2_ * uhat_.array() + Q_ * na.array()).matrix();
    Eigen::VectorXcd nb = nonlinear(b);
    Eigen::VectorXcd c = (E2_ * a.array() + Q_ * (2.0 * nb.array() - nv.array())).matrix();
    Eigen::VectorXcd nc = nonlinear(c);

    Vec u_base = u_;
    Vec a_phys = to_physical(a), b_phys = to_physical(b), c_phys = to_physical(c);

    for (Index col = 0; col < tangent.cols(); ++col) {
        Eigen::VectorXcd w = to_spectral(tangent.col(col));
        Eigen::VectorXcd nvw = nonlinear_tangent(u_base, w);
        Eigen::VectorXcd aw = (E2_ * w.array() + Q_ * nvw.array()).matrix();
        Eigen::VectorXcd naw = nonlinear_tangent(a_phys, aw);
        Eigen::VectorXcd bw = (E2_ * w.array() + Q_ * naw.array()).matrix();
        Eigen::VectorXcd nbw = nonlinear_tangent(b_phys, bw);
        Eigen::VectorXcd cw = (E2_ * aw.array() + Q_ * (2.0 * nbw.array() - nvw.array())).matrix();
        Eigen::VectorXcd ncw = nonlinear_tangent(c_phys, cw);
        Eigen::VectorXcd wn = (E_ * w.array() + f1_ * nvw.array() +
                               2.0 * f2_ * (naw.array() + nbw.array()) + f3_ * ncw.array())
                                  .matrix();
        tangent.col(col) = to_physical(wn);
    }

    uhat_ = (E_ * uhat_.array() + f1_ * nv.array() + 2.0 * f2_ * (na.array() + nb.array()) +
             f3_ * nc.array())
                .matrix();
    u_ = to_physical(uhat_);
}

TimeSeriesDataset simulate_ks(const KSConfig& cfg) {
    cfg.validate();
    KsSolver solver(cfg.domain_size, cfg.viscosity, cfg.grid_points, cfg.dt);
    solver.set_state(perturbed_uniform(cfg.grid_points, 1e-3, 0.0, cfg.seed));
    auto advance = [&](const Vec& u) {
        solver.set_state(u);
        solver.step();
        return solver.state();
    };
    return record_trajectory(advance, solver.state(), cfg.dt, cfg.t_transient, cfg.t_total,
                             "simulate_ks");
}

// ---------------------------------------------------------------------------
// True Lyapunov spectra via tangent dynamics + QR
// ---------------------------------------------------------------------------

namespace {

struct QrAccumulator {
    explicit QrAccumulator(Index n) : log_sums(Vec::Zero(n)) {}

    // Re-orthonormalizes columns in place and accumulates log |R_ii|.
    void reorthonormalize(Mat& tangent) {
        Eigen::HouseholderQR<Mat> qr(tangent);
        Mat q = qr.householderQ() * Mat::Identity(tangent.rows(), tangent.cols());
        Mat r = qr.matrixQR().topRows(tangent.cols()).triangularView<Eigen::Upper>();
        for (Index i = 0; i < tangent.cols(); ++i) {
            double d = r(i, i);
            if (d < 0) q.col(i) = -q.col(i);
            log_sums[i] += std::log(std::abs(d));
        }
        tangent = q;
    }

    Vec estimate(double elapsed_time) const {
        Vec l = log_sums / elapsed_time;
        std::sort(l.data(), l.data() + l.size(), std::greater<>());
        return l;
    }

    Vec log_sums;
};

Mat random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat g(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Mat> qr(g);
    return qr.householderQ() * Mat::Identity(rows, cols);
}

lyapunov::LyapunovSpectrum run_qr_spectrum(const std::function<void(Mat&)>& step_both, Index dim,
                                           double dt, const LyapunovOptions& opt) {
    const int n = opt.n_exponents;
    require(n >= 1 && n <= dim, "lyapunov: exponent count must be in [1, state dimension]");
    long total_steps = std::lround(opt.horizon / dt);
    long qr_every = std::max<long>(1, opt.qr_interval);
    long check_every = std::max(qr_every, (opt.check_interval / qr_every) * qr_every);

    Mat tangent = random_orthonormal(dim, n, opt.seed);
    QrAccumulator acc(n);
    lyapunov::LyapunovSpectrum out;
    Vec prev;
    double last_change = std::numeric_limits<double>::infinity();
    for (long t = 1; t <= total_steps; ++t) {
        step_both(tangent);
        if (t % qr_every == 0) {
            acc.reorthonormalize(tangent);
            if (t % check_every == 0) {
                Vec est = acc.estimate(t * dt);
                if (prev.size() > 0) last_change = (est - prev).norm();
                prev = est;
                out.history.push_back(est);
            }
        }
    }
    long done = (total_steps / qr_every) * qr_every;
    out.exponents = acc.estimate(done * dt);
    out.converged = last_change < opt.tolerance;
    out.ky_dimension = lyapunov::kaplan_yorke(out.exponents, &out.ky_saturated);
    return out;
}

}  // namespace

lyapunov::LyapunovSpectrum true_lyapunov_spectrum(const SystemConfig& system,
                                                  const LyapunovOptions& opt) {
    if (std::holds_alternative<Lorenz96Config>(system)) {
        const auto& cfg = std::get<Lorenz96Config>(system);
        cfg.validate();
        auto rhs = [&](const Vec& x) { return lorenz96_rhs(x, cfg.forcing); };
        Vec x = perturbed_uniform(cfg.grid_size, 1e-3, cfg.forcing, cfg.seed);
        long transient_steps = std::lround(cfg.t_transient / cfg.dt);
        for (long i = 0; i < transient_steps; ++i) x = rk4_step(rhs, x, cfg.dt);
        check_finite_or_blowup(x, "true_lyapunov_spectrum(lorenz96)");

        // Joint RK4 of state and tangent block, Jacobian evaluated at the
        // matching base stages.
        auto step_both = [&, dt = cfg.dt](Mat& v) {
            Vec k1 = rhs(x);
            Mat K1 = lorenz96_jacobian(x) * v;
            Vec x2 = x + 0.5 * dt * k1;
            Vec k2 = rhs(x2);
            Mat K2 = lorenz96_jacobian(x2) * (v + 0.5 * dt * K1);
            Vec x3 = x + 0.5 * dt * k2;
            Vec k3 = rhs(x3);
            Mat K3 = lorenz96_jacobian(x3) * (v + 0.5 * dt * K2);
            Vec x4 = x + dt * k3;
            Vec k4 = rhs(x4);
            Mat K4 = lorenz96_jacobian(x4) * (v + dt * K3);
            x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            v += (dt / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
        };
        return run_qr_spectrum(step_both, cfg.grid_size, cfg.dt, opt);
    }

    const auto& cfg = std::get<KSConfig>(system);
    cfg.validate();
    KsSolver solver(cfg.domain_size, cfg.viscosity, cfg.grid_points, cfg.dt);
    solver.set_state(perturbed_uniform(cfg.grid_points, 1e-3, 0.0, cfg.seed));
    long transient_steps = std::lround(cfg.t_transient / cfg.dt);
    for (long i = 0; i < transient_steps; ++i) solver.step();
    check_finite_or_blowup(solver.state(), "true_lyapunov_spectrum(ks)");
    auto step_both = [&](Mat& v) { solver.step_with_tangent(v); };
    return run_qr_spectrum(step_both, cfg.grid_points, cfg.dt, opt);
}

}  // namespace chaoscast::dynamics
