#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "chaoscast/common.hpp"
#include "chaoscast/spectrum.hpp"
#include "chaoscast/timeseries.hpp"

namespace chaoscast::dynamics {

struct Lorenz96Config {
    int grid_size = 40;        // J
    double forcing = 8.0;      // F
    double dt = 0.01;
    double t_transient = 1000.0;
    double t_total = 2000.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct KSConfig {
    double domain_size = 200.0;  // L
    double viscosity = 1.0;      // nu
    int grid_points = 512;       // D, even; periodic grid, dx = L/D
    double dt = 0.25;
    double t_transient = 10000.0;
    double t_total = 60000.0;
    std::uint64_t seed = 1;

    void validate() const;
};

using SystemConfig = std::variant<Lorenz96Config, KSConfig>;

/// Right-hand side of the Lorenz-96 ODE with cyclic boundary:
/// dx_j/dt = (x_{j+1} - x_{j-2}) x_{j-1} - x_j + F.
Vec lorenz96_rhs(const Vec& state, double forcing);

/// Jacobian of lorenz96_rhs (cyclic banded structure), returned dense.
Mat lorenz96_jacobian(const Vec& state);

/// One classical Runge-Kutta-4 step of an autonomous vector field.
/// Throws std::runtime_error if the input state is non-finite.
Vec rk4_step(const std::function<Vec(const Vec&)>& rhs, const Vec& state, double dt);

/// Simulates Lorenz-96 from a perturbed uniform initial condition, drops the
/// transient, and records one sample per dt. Train/test split at the midpoint.
/// Throws on blowup (|x| > 1e6).
TimeSeriesDataset simulate_lorenz96(const Lorenz96Config& cfg);

/// Pseudospectral ETDRK4 integrator for the Kuramoto-Sivashinsky equation
///   u_t = -nu u_xxxx - u_xx - u u_x    on [0, L], periodic.
/// Linear symbol k^2 - nu k^4; nonlinear term dealiased with the 2/3 rule.
/// Exposed as a stepper so tangent dynamics and tests can drive it directly.
class KsSolver {
public:
    KsSolver(double domain_size, double viscosity, int grid_points, double dt);

    int grid_points() const { return n_; }
    double dt() const { return dt_; }

    const Vec& state() const { return u_; }
    void set_state(const Vec& u);

    /// Advances the field one ETDRK4 step.
    void step();

    /// Advances the field together with tangent vectors (columns of `tangent`,
    /// physical space). The tangent update is the exact derivative of the
    /// discrete ETDRK4 map, linearizing u u_x around the stage states.
    void step_with_tangent(Mat& tangent);

private:
    struct Complexified;
    Eigen::VectorXcd to_spectral(const Vec& physical) const;
    Vec to_physical(const Eigen::VectorXcd& spectral) const;
    Eigen::VectorXcd nonlinear(const Eigen::VectorXcd& v) const;
    Eigen::VectorXcd nonlinear_tangent(const Vec& base_phys, const Eigen::VectorXcd& w) const;

    int n_;
    double length_, dt_;
    Vec u_;                       // physical state
    Eigen::VectorXcd uhat_;       // spectral state
    Eigen::VectorXcd wavenumber_; // ik
    Eigen::ArrayXd dealias_;      // 2/3-rule mask
    Eigen::ArrayXd E_, E2_;       // exp(Lh), exp(Lh/2)
    Eigen::ArrayXd Q_, f1_, f2_, f3_;
};

/// Simulates Kuramoto-Sivashinsky per cfg; same sampling/split/blowup
/// contract as simulate_lorenz96.
TimeSeriesDataset simulate_ks(const KSConfig& cfg);

struct LyapunovOptions {
    int n_exponents = 1;
    long qr_interval = 10;      // steps between re-orthonormalizations
    double horizon = 500.0;     // time units
    long check_interval = 200;  // steps between convergence checks
    double tolerance = 1e-3;    // L2 change of the sorted spectrum
    std::uint64_t seed = 7;
};

/// Lyapunov spectrum of the true dynamics: evolves n orthonormal tangent
/// vectors with the exact linearization of the integrator, QR-reorthonormalizes
/// every qr_interval steps, and accumulates log |R_ii|. Non-convergence within
/// the horizon is reported through the flag, not as an error.
lyapunov::LyapunovSpectrum true_lyapunov_spectrum(const SystemConfig& system,
                                                  const LyapunovOptions& opt);

}  // namespace chaoscast::dynamics
