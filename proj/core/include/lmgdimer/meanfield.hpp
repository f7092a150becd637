// meanfield.hpp: the six coupled mean-field equations for the LMG dimer,
// fixed-point search and stability, attractor classification, Lyapunov
// estimates and the analytic phase boundaries.
//
// State ordering everywhere is (X_A, Y_A, Z_A, X_B, Y_B, Z_B). The equations
// do not depend on the spin length S; only g, J, lambda and gamma are read
// from ModelParams.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "lmgdimer/models.hpp"
#include "lmgdimer/ode.hpp"

namespace lmgdimer {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Normalized magnetizations of both sites.
struct BlochPair {
    Vec6 v{Vec6::Zero()};

    BlochPair() = default;
    explicit BlochPair(const Vec6& values) : v(values) {}
    BlochPair(double xa, double ya, double za, double xb, double yb, double zb)
    {
        v << xa, ya, za, xb, yb, zb;
    }

    double xa() const { return v[0]; }
    double ya() const { return v[1]; }
    double za() const { return v[2]; }
    double xb() const { return v[3]; }
    double yb() const { return v[4]; }
    double zb() const { return v[5]; }

    double norm_a() const { return v.head<3>().norm(); }
    double norm_b() const { return v.tail<3>().norm(); }

    /// Largest | |r| - 1 | over the two sites.
    double shell_deviation() const;

    /// (0, 0, -1, 0, 0, 1): spin A down, spin B up.
    static BlochPair normal_state() { return BlochPair(0, 0, -1, 0, 0, 1); }
};

/// The Z2 map (X_A, Y_A, X_B, Y_B) -> -(X_A, Y_A, X_B, Y_B), Z unchanged.
BlochPair z2_image(const BlochPair& s);

Vec6 mf_rhs(const Vec6& s, const ModelParams& p);
BlochPair mf_rhs(const BlochPair& s, const ModelParams& p);
Mat6 mf_jacobian(const Vec6& s, const ModelParams& p);

/// Maximum real part of the Jacobian eigenvalues restricted to the tangent
/// space of the two Bloch spheres at `s` (radial directions excluded).
double tangent_spectral_abscissa(const BlochPair& s, const ModelParams& p);

/// Same, over the full 6x6 Jacobian.
double spectral_abscissa(const Mat6& m);

// ---------------------------------------------------------------- integration

struct Trajectory {
    std::vector<double> times;
    std::vector<BlochPair> states;
    ode::Status status{ode::Status::ok};
    long steps{0};
    long rejected{0};

    bool ok() const { return status == ode::Status::ok; }
};

/// Integrates from t = 0 to t_final. With sample_dt > 0 the trajectory is
/// sampled on the uniform grid 0, dt, 2dt, ... (plus t_final); otherwise every
/// accepted step is recorded.
/// Throws std::invalid_argument unless t_final > 0.
Trajectory integrate(const BlochPair& s0, const ModelParams& p, double t_final,
                     const ode::Options& opts = {}, double sample_dt = 0.0);

// ----------------------------------------------------------- fixed points

struct FixedPointOptions {
    double t_transient{200.0};
    ode::Options ode{};
    double newton_tol{1e-10};     // max-norm of the rhs at a root
    int newton_max_iter{60};
    double cluster_tol{1e-6};     // max-norm merge distance
    double stability_tol{1e-8};   // stable iff abscissa < -stability_tol
    double shell_tol{1e-6};       // roots off the unit spheres are discarded
    double converged_rhs{1e-10};  // early exit from the transient
};

struct FixedPoint {
    BlochPair state;
    double abscissa{0.0};  // tangent-space spectral abscissa
    bool stable{false};
};

struct FixedPointSearch {
    std::vector<FixedPoint> roots;          // distinct on-shell roots found
    std::vector<BlochPair> post_transient;  // one per seed, same order
    std::vector<ode::Status> seed_status;   // integration outcome per seed
    int newton_failures{0};
    int off_shell_roots{0};
    int symmetry_partners_added{0};

    std::vector<FixedPoint> stable() const;
};

/// Integrates each seed through the transient, Newton-refines, clusters and
/// classifies the roots. Z2 images of stable roots are added when the seeds
/// missed them.
FixedPointSearch find_fixed_points(const ModelParams& p, const std::vector<BlochPair>& seeds,
                                   const FixedPointOptions& opts = {});

/// Newton iteration from `start`. Returns false if it does not converge.
bool newton_refine(const ModelParams& p, BlochPair& state, double tol, int max_iter);

/// n points of a Fibonacci lattice on the unit sphere.
std::vector<Eigen::Vector3d> fibonacci_sphere(int n);

/// Product of two n-point Fibonacci lattices, site A index varying slowest.
std::vector<BlochPair> fibonacci_seeds(int per_sphere);

// ------------------------------------------------------------- Lyapunov

struct LyapunovOptions {
    ode::Options ode{};
    double renorm_interval{1.0};
    double t_align{0.0};  // tangent-vector alignment time not counted
};

/// Largest Lyapunov exponent by tangent-vector propagation with periodic
/// renormalization. The tangent vector is kept in the tangent space of the
/// two spheres. Returns NaN if the integration fails.
double lyapunov_estimate(const ModelParams& p, const BlochPair& s0, double t_total,
                         const LyapunovOptions& opts = {});

// -------------------------------------------------------- classification

enum class AttractorClass { fixed_points, limit_cycle, chaotic, unresolved };

const char* to_string(AttractorClass c);

struct ClassifyOptions {
    int seeds_per_sphere{8};
    int window_seeds{4};  // long-run windows when no fixed point is stable
    double t_transient{200.0};
    double t_window{800.0};
    double t_align{50.0};
    ode::Options ode{};
    double lyapunov_tol{0.01};
    double confirm_factor{4.0};          // chaotic windows are re-run this much longer
    double recurrence_tol{1e-3};
    double renorm_interval{1.0};
    int min_returns{40};                 // section returns wanted by the recurrence test
    double t_recurrence_extra{4000.0};   // extra time allowed to collect them
    FixedPointOptions fixed_points() const;
};

struct ClassifyDiagnostics {
    int seeds{0};
    int integration_failures{0};
    int newton_failures{0};
    int off_shell_roots{0};
    int symmetry_partners_added{0};
    int windows{0};
    int averaged_seeds{0};   // seeds entering time_avg when no fixed point is stable
    int section_returns{0};
    double return_distance{0.0};   // worst curve distance of the last returns
    bool recurrent{false};
    bool cycle_aligned_average{false};
    double max_shell_drift{0.0};
    std::string note;
};

struct AttractorReport {
    AttractorClass classification{AttractorClass::unresolved};
    int n_stable{0};
    std::vector<BlochPair> fixed_points;  // the stable ones
    BlochPair time_avg;
    double lyapunov{0.0};
    BlochPair window_start;  // start of the long-run window (no fixed point case)
    ClassifyDiagnostics diagnostics;
};

AttractorReport classify_point(const ModelParams& p, const ClassifyOptions& opts = {});

// ----------------------------------------------------- analytic boundaries

/// Positive root J_c of the normal-state instability condition
/// J_c^2 = ((gamma^2 - lambda^2 + g^2)^2 + 4 lambda^2 g^2) / (4 (lambda^2 + g^2)).
double lmg_boundary(double lambda, double g, double gamma);

/// Lowest-order PT boundary near J = 0: lambda_c = g (1 + 2 J^2 / g^2) / 2.
double pt_boundary(double J, double g);

/// Bisects the coupling at which the normal state first loses stability along
/// the ray J = sign * t, t in [0, j_max]. The result carries the sign of the
/// ray. Returns NaN if no crossing is bracketed.
double normal_state_instability(double lambda, double g, double gamma, double sign,
                                double j_max = 4.0, double tol = 1e-12);

}  // namespace lmgdimer
