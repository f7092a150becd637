#include "lmgdimer/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace lmgdimer {

double BlochPair::shell_deviation() const
{
    return std::max(std::abs(norm_a() - 1.0), std::abs(norm_b() - 1.0));
}

BlochPair z2_image(const BlochPair& s)
{
    return BlochPair(-s.xa(), -s.ya(), s.za(), -s.xb(), -s.yb(), s.zb());
}

Vec6 mf_rhs(const Vec6& s, const ModelParams& p)
{
    const double xa = s[0], ya = s[1], za = s[2], xb = s[3], yb = s[4], zb = s[5];
    const double g = p.g, J = p.J, l = p.lambda, gm = p.gamma;
    const double cross = xa * yb - ya * xb;
    Vec6 d;
    d[0] = g * ya + l * za * yb + gm * xa * za;
    d[1] = -g * xa + 2.0 * J * za * xa - l * za * xb + gm * ya * za;
    d[2] = -2.0 * J * ya * xa - l * cross - gm * (1.0 - za * za);
    d[3] = g * yb + l * zb * ya - gm * xb * zb;
    d[4] = -g * xb + 2.0 * J * zb * xb - l * zb * xa - gm * yb * zb;
    d[5] = -2.0 * J * yb * xb + l * cross + gm * (1.0 - zb * zb);
    return d;
}

BlochPair mf_rhs(const BlochPair& s, const ModelParams& p)
{
    return BlochPair(mf_rhs(s.v, p));
}

Mat6 mf_jacobian(const Vec6& s, const ModelParams& p)
{
    const double xa = s[0], ya = s[1], za = s[2], xb = s[3], yb = s[4], zb = s[5];
    const double g = p.g, J = p.J, l = p.lambda, gm = p.gamma;
    Mat6 m;
    // clang-format off
    m << gm * za,               g,                     l * yb + gm * xa,               0.0,                    l * za,                0.0,
         -g + 2.0 * J * za,     gm * za,               2.0 * J * xa - l * xb + gm * ya, -l * za,               0.0,                   0.0,
         -2.0 * J * ya - l * yb, -2.0 * J * xa + l * xb, 2.0 * gm * za,                 l * ya,                 -l * xa,               0.0,
         0.0,                   l * zb,                0.0,                            -gm * zb,               g,                     l * ya - gm * xb,
         -l * zb,               0.0,                   0.0,                            -g + 2.0 * J * zb,      -gm * zb,              2.0 * J * xb - l * xa - gm * yb,
         l * yb,                -l * xb,               0.0,                            -2.0 * J * yb - l * ya, -2.0 * J * xb + l * xa, -2.0 * gm * zb;
    // clang-format on
    return m;
}

namespace {

// Orthonormal pair spanning the plane orthogonal to n.
void tangent_pair(const Eigen::Vector3d& n, Eigen::Vector3d& e1, Eigen::Vector3d& e2)
{
    const Eigen::Vector3d u = n.normalized();
    const Eigen::Vector3d helper =
        std::abs(u.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    e1 = (helper - u * u.dot(helper)).normalized();
    e2 = u.cross(e1);
}

Eigen::Matrix<double, 6, 4> tangent_basis(const BlochPair& s)
{
    Eigen::Matrix<double, 6, 4> t = Eigen::Matrix<double, 6, 4>::Zero();
    Eigen::Vector3d e1, e2;
    tangent_pair(s.v.head<3>(), e1, e2);
    t.block<3, 1>(0, 0) = e1;
    t.block<3, 1>(0, 1) = e2;
    tangent_pair(s.v.tail<3>(), e1, e2);
    t.block<3, 1>(3, 2) = e1;
    t.block<3, 1>(3, 3) = e2;
    return t;
}

// Removes the radial component on each site.
Vec6 project_tangent(const Vec6& s, Vec6 v)
{
    const Eigen::Vector3d a = s.head<3>(), b = s.tail<3>();
    v.head<3>() -= a * (a.dot(v.head<3>()) / a.squaredNorm());
    v.tail<3>() -= b * (b.dot(v.tail<3>()) / b.squaredNorm());
    return v;
}

}  // namespace

double spectral_abscissa(const Mat6& m)
{
    Eigen::EigenSolver<Mat6> es(m, false);
    return es.eigenvalues().real().maxCoeff();
}

double tangent_spectral_abscissa(const BlochPair& s, const ModelParams& p)
{
    const auto t = tangent_basis(s);
    const Eigen::Matrix4d reduced = t.transpose() * mf_jacobian(s.v, p) * t;
    Eigen::EigenSolver<Eigen::Matrix4d> es(reduced, false);
    return es.eigenvalues().real().maxCoeff();
}

// ---------------------------------------------------------------- integration

namespace {

struct MeanFieldRhs {
    ModelParams p;
    void operator()(double, const Vec6& y, Vec6& dy) const { dy = mf_rhs(y, p); }
};

using Vec12 = Eigen::Matrix<double, 12, 1>;

// Starts closer than this to the unit spheres are kept on them.
constexpr double kOnShell = 1e-6;

// The spheres are invariant but radially repelling wherever gamma Z_A > 0 or
// gamma Z_B < 0, so round-off would grow off-shell without this projection.
void project_shell(Vec6& y)
{
    const double na = y.head<3>().norm(), nb = y.tail<3>().norm();
    if (na > 0.0) y.head<3>() /= na;
    if (nb > 0.0) y.tail<3>() /= nb;
}

template <class Stepper>
void project_stepper(Stepper& stepper)
{
    auto y = stepper.y();
    Vec6 head = y.template head<6>();
    project_shell(head);
    y.template head<6>() = head;
    stepper.set_state(y);
}

struct TangentRhs {
    ModelParams p;
    void operator()(double, const Vec12& y, Vec12& dy) const
    {
        const Vec6 s = y.head<6>();
        dy.head<6>() = mf_rhs(s, p);
        dy.tail<6>() = mf_jacobian(s, p) * y.tail<6>();
    }
};

}  // namespace

Trajectory integrate(const BlochPair& s0, const ModelParams& p, double t_final,
                     const ode::Options& opts, double sample_dt)
{
    if (!(t_final > 0.0) || !std::isfinite(t_final)) {
        throw std::invalid_argument("integrate: t_final must be positive");
    }
    if (!s0.v.allFinite()) throw std::invalid_argument("integrate: non-finite initial state");

    Trajectory out;
    auto stepper = ode::make_stepper<Vec6>(MeanFieldRhs{p}, opts);
    stepper.reset(0.0, s0.v);
    out.times.push_back(0.0);
    out.states.push_back(s0);

    const bool keep_on_shell = s0.shell_deviation() <= kOnShell;
    stepper.enable_dense(sample_dt > 0.0);
    long next = 1;
    while (stepper.t() < t_final) {
        out.status = stepper.step(t_final);
        if (out.status != ode::Status::ok) break;
        if (sample_dt > 0.0) {
            for (;;) {
                const double ts = std::min(next * sample_dt, t_final);
                if (ts > stepper.t()) break;
                Vec6 y = ts == stepper.t() ? stepper.y() : stepper.dense(ts);
                if (keep_on_shell) project_shell(y);
                out.times.push_back(ts);
                out.states.emplace_back(y);
                if (ts >= t_final) break;
                ++next;
            }
        }
        if (keep_on_shell) project_stepper(stepper);
        if (sample_dt <= 0.0) {
            out.times.push_back(stepper.t());
            out.states.emplace_back(stepper.y());
        }
    }
    out.steps = stepper.steps();
    out.rejected = stepper.rejected();
    return out;
}

// ----------------------------------------------------------- fixed points

std::vector<FixedPoint> FixedPointSearch::stable() const
{
    std::vector<FixedPoint> out;
    for (const auto& r : roots) {
        if (r.stable) out.push_back(r);
    }
    return out;
}

bool newton_refine(const ModelParams& p, BlochPair& state, double tol, int max_iter)
{
    Vec6 x = state.v;
    Vec6 f = mf_rhs(x, p);
    for (int it = 0; it <= max_iter; ++it) {
        if (f.lpNorm<Eigen::Infinity>() < tol) {
            state.v = x;
            return true;
        }
        if (it == max_iter) break;
        Eigen::FullPivLU<Mat6> lu(mf_jacobian(x, p));
        if (!lu.isInvertible()) return false;
        const Vec6 dx = lu.solve(-f);
        if (!dx.allFinite()) return false;
        const double f0 = f.norm();
        double alpha = 1.0;
        Vec6 xn = x + dx;
        Vec6 fn = mf_rhs(xn, p);
        while (fn.norm() > (1.0 - 1e-4 * alpha) * f0 && alpha > 1.0 / 1024.0) {
            alpha *= 0.5;
            xn = x + alpha * dx;
            fn = mf_rhs(xn, p);
        }
        x = xn;
        f = fn;
        if (x.lpNorm<Eigen::Infinity>() > 10.0) return false;
    }
    return false;
}

std::vector<Eigen::Vector3d> fibonacci_sphere(int n)
{
    if (n < 1) throw std::invalid_argument("fibonacci_sphere: n must be positive");
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * k;
        pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    }
    return pts;
}

std::vector<BlochPair> fibonacci_seeds(int per_sphere)
{
    const auto pts = fibonacci_sphere(per_sphere);
    std::vector<BlochPair> seeds;
    seeds.reserve(pts.size() * pts.size());
    for (const auto& a : pts) {
        for (const auto& b : pts) {
            seeds.emplace_back(a.x(), a.y(), a.z(), b.x(), b.y(), b.z());
        }
    }
    return seeds;
}

namespace {

bool near_existing(const std::vector<FixedPoint>& roots, const BlochPair& s, double tol)
{
    return std::any_of(roots.begin(), roots.end(), [&](const FixedPoint& r) {
        return (r.state.v - s.v).lpNorm<Eigen::Infinity>() < tol;
    });
}

}  // namespace

FixedPointSearch find_fixed_points(const ModelParams& p, const std::vector<BlochPair>& seeds,
                                   const FixedPointOptions& opts)
{
    FixedPointSearch out;
    out.post_transient.reserve(seeds.size());
    out.seed_status.reserve(seeds.size());

    auto stepper = ode::make_stepper<Vec6>(MeanFieldRhs{p}, opts.ode);
    for (const auto& seed : seeds) {
        stepper.reset(0.0, seed.v);
        const bool keep_on_shell = seed.shell_deviation() <= kOnShell;
        ode::Status st = ode::Status::ok;
        while (stepper.t() < opts.t_transient) {
            st = stepper.step(opts.t_transient);
            if (st != ode::Status::ok) break;
            if (keep_on_shell) project_stepper(stepper);
            if (stepper.dydt().template lpNorm<Eigen::Infinity>() < opts.converged_rhs) break;
        }
        out.post_transient.emplace_back(stepper.y());
        out.seed_status.push_back(st);
        if (st != ode::Status::ok) continue;

        BlochPair candidate(stepper.y());
        if (!newton_refine(p, candidate, opts.newton_tol, opts.newton_max_iter)) {
            ++out.newton_failures;
            continue;
        }
        if (candidate.shell_deviation() > opts.shell_tol) {
            ++out.off_shell_roots;
            continue;
        }
        if (near_existing(out.roots, candidate, opts.cluster_tol)) continue;
        const double a = tangent_spectral_abscissa(candidate, p);
        out.roots.push_back(FixedPoint{candidate, a, a < -opts.stability_tol});
    }

    // Stable roots come in Z2 pairs (or are Z2 invariant).
    const std::size_t n_found = out.roots.size();
    for (std::size_t i = 0; i < n_found; ++i) {
        if (!out.roots[i].stable) continue;
        BlochPair image = z2_image(out.roots[i].state);
        if (near_existing(out.roots, image, opts.cluster_tol)) continue;
        if (!newton_refine(p, image, opts.newton_tol, opts.newton_max_iter)) continue;
        const double a = tangent_spectral_abscissa(image, p);
        out.roots.push_back(FixedPoint{image, a, a < -opts.stability_tol});
        ++out.symmetry_partners_added;
    }
    return out;
}

// ------------------------------------------------------------- Lyapunov

namespace {

struct Section {
    double t;
    Eigen::Vector4d invariants;  // Z_A, Z_B, XA XB + YA YB, XA YB - YA XB
    Vec6 integral;               // running integral of the state at t
};

Eigen::Vector4d rotation_invariants(const Vec6& s)
{
    return Eigen::Vector4d(s[2], s[5], s[0] * s[3] + s[1] * s[4], s[0] * s[4] - s[1] * s[3]);
}

struct WindowResult {
    ode::Status status{ode::Status::ok};
    double lyapunov{std::numeric_limits<double>::quiet_NaN()};
    Vec6 mean{Vec6::Zero()};
    Vec6 aligned_mean{Vec6::Zero()};
    bool aligned{false};
    std::vector<Section> sections;
    Eigen::Vector4d inv_min{Eigen::Vector4d::Constant(std::numeric_limits<double>::infinity())};
    Eigen::Vector4d inv_max{Eigen::Vector4d::Constant(-std::numeric_limits<double>::infinity())};
    double max_shell_drift{0.0};
};

// Cubic-Hermite quadrature of the state over [a, b].
Vec6 hermite_integral(double a, const Vec6& ya, const Vec6& fa, double b, const Vec6& yb,
                      const Vec6& fb)
{
    const double h = b - a;
    return 0.5 * h * (ya + yb) + (h * h / 12.0) * (fa - fb);
}

// Time average of the on-shell trajectory over [0, t_window]. Returns false
// if the integration fails.
bool window_average(const ModelParams& p, const BlochPair& s0, double t_window,
                    const ode::Options& ode_opts, Vec6& avg)
{
    auto stepper = ode::make_stepper<Vec6>(MeanFieldRhs{p}, ode_opts);
    stepper.reset(0.0, s0.v);
    Vec6 sum = Vec6::Zero();
    while (stepper.t() < t_window) {
        const double ta = stepper.t();
        const Vec6 ya = stepper.y(), fa = stepper.dydt();
        if (stepper.step(t_window) != ode::Status::ok) return false;
        sum += hermite_integral(ta, ya, fa, stepper.t(), stepper.y(), stepper.dydt());
        project_stepper(stepper);
    }
    avg = sum / t_window;
    return true;
}

// Long-run tangent propagation shared by classify_point and
// lyapunov_estimate. Sections are taken at local maxima of Z_B.
// With want_sections, integration continues past the window (up to
// t_extend more) until min_returns sections are collected; the averages and
// the exponent only use the window itself.
WindowResult run_window(const ModelParams& p, const BlochPair& s0, double t_align, double t_window,
                        const ode::Options& ode_opts, double renorm, bool want_sections,
                        int min_returns = 0, double t_extend = 0.0)
{
    WindowResult out;
    auto stepper = ode::make_stepper<Vec12>(TangentRhs{p}, ode_opts);
    stepper.enable_dense(want_sections);

    Vec6 v0;
    v0 << 0.31, -0.52, 0.17, 0.68, -0.11, 0.43;
    v0 = project_tangent(s0.v, v0);
    if (v0.norm() < 1e-8) v0 = project_tangent(s0.v, Vec6::Ones());
    v0.normalize();

    Vec12 y;
    y << s0.v, v0;
    stepper.reset(0.0, y);

    const double s0_shell = s0.shell_deviation();
    const bool keep_on_shell = s0_shell <= kOnShell;
    auto renormalize = [&](double& log_sum) {
        Vec12 cur = stepper.y();
        Vec6 state = cur.head<6>();
        if (keep_on_shell) {
            project_shell(state);
            cur.head<6>() = state;
        }
        Vec6 v = project_tangent(state, cur.tail<6>());
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n)) return false;
        log_sum += std::log(n);
        cur.tail<6>() = v / n;
        stepper.set_state(cur);
        return true;
    };

    double discard = 0.0;
    for (double t = 0.0; t < t_align - 1e-12;) {
        const double t_next = std::min(t + renorm, t_align);
        out.status = ode::advance(stepper, t_next);
        if (out.status != ode::Status::ok) return out;
        if (!renormalize(discard)) {
            out.status = ode::Status::non_finite;
            return out;
        }
        t = t_next;
    }

    const double t0 = stepper.t();
    const double t_end = t0 + t_window;
    double log_sum = 0.0;
    Vec6 integral = Vec6::Zero();
    Vec6 f_prev = stepper.dydt().head<6>();
    Vec6 y_prev = stepper.y().head<6>();
    double t_prev = t0;

    auto zb_rate = [&](const Vec6& s) { return mf_rhs(s, p)[5]; };

    auto observe = [&](const auto& st) {
        const Vec6 y_now = st.y().template head<6>();
        const Vec6 f_now = st.dydt().template head<6>();
        if (want_sections && f_prev[5] > 0.0 && f_now[5] <= 0.0) {
            double lo = t_prev, hi = st.t();
            for (int i = 0; i < 60 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++i) {
                const double mid = 0.5 * (lo + hi);
                if (zb_rate(st.dense(mid).template head<6>()) > 0.0) lo = mid; else hi = mid;
            }
            const double tc = 0.5 * (lo + hi);
            const Vec6 yc = st.dense(tc).template head<6>();
            const Vec6 fc = mf_rhs(yc, p);
            out.sections.push_back(Section{tc, rotation_invariants(yc),
                                           integral + hermite_integral(t_prev, y_prev, f_prev, tc, yc, fc)});
        }
        integral += hermite_integral(t_prev, y_prev, f_prev, st.t(), y_now, f_now);
        const Eigen::Vector4d inv = rotation_invariants(y_now);
        out.inv_min = out.inv_min.cwiseMin(inv);
        out.inv_max = out.inv_max.cwiseMax(inv);
        out.max_shell_drift =
            std::max(out.max_shell_drift, std::abs(BlochPair(y_now).shell_deviation() - s0_shell));
        t_prev = st.t();
        y_prev = y_now;
        f_prev = f_now;
        return true;
    };

    for (double t = t0; t < t_end - 1e-12;) {
        const double t_next = std::min(t + renorm, t_end);
        out.status = ode::advance(stepper, t_next, observe);
        if (out.status != ode::Status::ok) return out;
        if (!renormalize(log_sum)) {
            out.status = ode::Status::non_finite;
            return out;
        }
        // The tangent part changed; the state part (and its derivative) did not.
        t = t_next;
    }

    out.lyapunov = log_sum / t_window;
    out.mean = integral / t_window;
    if (out.sections.size() >= 2) {
        const auto& first = out.sections.front();
        const auto& last = out.sections.back();
        if (last.t - first.t > 0.0) {
            out.aligned_mean = (last.integral - first.integral) / (last.t - first.t);
            out.aligned = true;
        }
    }

    const double t_stop = t_end + t_extend;
    for (double t = t_end; want_sections && static_cast<int>(out.sections.size()) < min_returns &&
                           t < t_stop - 1e-12;) {
        const double t_next = std::min(t + renorm, t_stop);
        out.status = ode::advance(stepper, t_next, observe);
        if (out.status != ode::Status::ok) return out;
        if (!renormalize(discard)) {
            out.status = ode::Status::non_finite;
            return out;
        }
        t = t_next;
    }
    return out;
}

double segment_distance(const Eigen::Vector4d& x, const Eigen::Vector4d& a, const Eigen::Vector4d& b)
{
    const Eigen::Vector4d d = b - a;
    const double len2 = d.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (x - (a + t * d)).lpNorm<Eigen::Infinity>();
}

// Distance of the latest section returns from the curve traced by the other
// returns, in rotation-invariant coordinates.
double return_distance(const std::vector<Section>& sections)
{
    const std::size_t n = sections.size();
    const std::size_t probes = std::min<std::size_t>(5, n - 2);
    double worst = 0.0;
    for (std::size_t k = 1; k <= probes; ++k) {
        const std::size_t idx = n - k;
        const Eigen::Vector4d& x = sections[idx].invariants;
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        std::size_t i1 = 0, i2 = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == idx) continue;
            const double d = (sections[j].invariants - x).lpNorm<Eigen::Infinity>();
            if (d < d1) {
                d2 = d1; i2 = i1;
                d1 = d; i1 = j;
            } else if (d < d2) {
                d2 = d; i2 = j;
            }
        }
        worst = std::max(worst, segment_distance(x, sections[i1].invariants, sections[i2].invariants));
    }
    return worst;
}

}  // namespace

double lyapunov_estimate(const ModelParams& p, const BlochPair& s0, double t_total,
                         const LyapunovOptions& opts)
{
    if (!(t_total > 0.0)) throw std::invalid_argument("lyapunov_estimate: t_total must be positive");
    const auto w = run_window(p, s0, opts.t_align, t_total, opts.ode, opts.renorm_interval, false);
    if (w.status != ode::Status::ok) return std::numeric_limits<double>::quiet_NaN();
    return w.lyapunov;
}

// -------------------------------------------------------- classification

const char* to_string(AttractorClass c)
{
    switch (c) {
    case AttractorClass::fixed_points: return "fixed_points";
    case AttractorClass::limit_cycle: return "limit_cycle";
    case AttractorClass::chaotic: return "chaotic";
    case AttractorClass::unresolved: return "unresolved";
    }
    return "unresolved";
}

FixedPointOptions ClassifyOptions::fixed_points() const
{
    FixedPointOptions fp;
    fp.t_transient = t_transient;
    fp.ode = ode;
    return fp;
}

AttractorReport classify_point(const ModelParams& p, const ClassifyOptions& opts)
{
    if (opts.seeds_per_sphere < 1) throw std::invalid_argument("classify_point: need at least one seed");
    validate(p);

    AttractorReport report;
    const auto seeds = fibonacci_seeds(opts.seeds_per_sphere);
    const auto search = find_fixed_points(p, seeds, opts.fixed_points());

    auto& diag = report.diagnostics;
    diag.seeds = static_cast<int>(seeds.size());
    diag.newton_failures = search.newton_failures;
    diag.off_shell_roots = search.off_shell_roots;
    diag.symmetry_partners_added = search.symmetry_partners_added;
    diag.integration_failures = static_cast<int>(std::count_if(
        search.seed_status.begin(), search.seed_status.end(),
        [](ode::Status s) { return s != ode::Status::ok; }));

    const auto stable = search.stable();
    if (!stable.empty()) {
        report.classification = AttractorClass::fixed_points;
        report.n_stable = static_cast<int>(stable.size());
        Vec6 sum = Vec6::Zero();
        report.lyapunov = -std::numeric_limits<double>::infinity();
        for (const auto& fp : stable) {
            report.fixed_points.push_back(fp.state);
            sum += fp.state.v;
            report.lyapunov = std::max(report.lyapunov, fp.abscissa);
        }
        report.time_avg = BlochPair(sum / static_cast<double>(stable.size()));
        return report;
    }

    // No stable fixed point. Several attractors can coexist, so long windows
    // are run from seeds spread evenly over the set. Any chaotic window makes
    // the point chaotic; otherwise the first recurrent window is reported.
    std::vector<std::size_t> picks;
    const std::size_t n_windows = std::min<std::size_t>(std::max(opts.window_seeds, 1), seeds.size());
    for (std::size_t k = 0; k < n_windows; ++k) {
        for (std::size_t i = k * seeds.size() / n_windows; i < seeds.size(); ++i) {
            if (search.seed_status[i] != ode::Status::ok) continue;
            if (std::find(picks.begin(), picks.end(), i) == picks.end()) picks.push_back(i);
            break;
        }
    }
    if (picks.empty()) {
        diag.note = "every seed failed during the transient";
        return report;
    }

    struct Candidate {
        std::size_t seed;
        WindowResult w;
        double distance;
        bool recurrent;
    };
    std::vector<Candidate> runs;
    for (const auto i : picks) {
        auto w = run_window(p, search.post_transient[i], opts.t_align, opts.t_window, opts.ode,
                            opts.renorm_interval, true, opts.min_returns, opts.t_recurrence_extra);
        diag.max_shell_drift = std::max(diag.max_shell_drift, w.max_shell_drift);
        ++diag.windows;
        if (w.status != ode::Status::ok) {
            diag.note = std::string("long-run integration failed: ") + ode::to_string(w.status);
            continue;
        }
        double distance;
        bool recurrent;
        if (w.sections.size() >= 8) {
            distance = return_distance(w.sections);
            recurrent = distance < opts.recurrence_tol;
        } else {
            // Too few returns: recurrent only if the orbit is a rigid rotation.
            distance = (w.inv_max - w.inv_min).lpNorm<Eigen::Infinity>();
            recurrent = distance < opts.recurrence_tol * 1e-3;
        }
        runs.push_back({i, std::move(w), distance, recurrent});
    }
    if (runs.empty()) return report;

    // Shear between neighbouring neutral cycles gives a finite-time exponent
    // that decays like 1/t, so a chaotic window is confirmed on a longer run.
    std::vector<const Candidate*> order;
    for (const auto& c : runs) order.push_back(&c);
    std::stable_sort(order.begin(), order.end(),
                     [](const Candidate* a, const Candidate* b) { return a->w.lyapunov > b->w.lyapunov; });
    const Candidate* chosen = nullptr;
    double confirmed = 0.0;
    LyapunovOptions lo;
    lo.ode = opts.ode;
    lo.renorm_interval = opts.renorm_interval;
    lo.t_align = opts.t_align;
    for (const auto* c : order) {
        if (!(c->w.lyapunov > opts.lyapunov_tol)) break;
        const double longer = lyapunov_estimate(p, search.post_transient[c->seed],
                                                opts.confirm_factor * opts.t_window, lo);
        if (longer > opts.lyapunov_tol) {
            chosen = c;
            confirmed = longer;
            break;
        }
    }
    const bool chaotic = chosen != nullptr;
    if (!chaotic) {
        const auto it = std::find_if(runs.begin(), runs.end(), [](const Candidate& c) { return c.recurrent; });
        chosen = it != runs.end() ? &*it : &runs.front();
    }

    const auto& w = chosen->w;
    report.window_start = search.post_transient[chosen->seed];
    report.lyapunov = chaotic ? confirmed : w.lyapunov;
    diag.cycle_aligned_average = w.aligned;

    // Orbits depend on the starting point (at J = 0 there is a continuum of
    // neutral cycles), so the reported average runs over every seed.
    Vec6 sum = Vec6::Zero();
    int averaged = 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        Vec6 avg;
        if (search.seed_status[i] != ode::Status::ok) continue;
        if (!window_average(p, search.post_transient[i], opts.t_window, opts.ode, avg)) continue;
        sum += avg;
        ++averaged;
    }
    diag.averaged_seeds = averaged;
    report.time_avg = averaged > 0 ? BlochPair(sum / averaged) : BlochPair(w.aligned ? w.aligned_mean : w.mean);
    diag.section_returns = static_cast<int>(w.sections.size());
    diag.return_distance = chosen->distance;
    diag.recurrent = chosen->recurrent;

    if (chaotic) {
        report.classification = AttractorClass::chaotic;
    } else if (chosen->recurrent) {
        report.classification = AttractorClass::limit_cycle;
    } else {
        report.classification = AttractorClass::unresolved;
        diag.note = "regular orbit without recurrence";
    }
    return report;
}

// ----------------------------------------------------- analytic boundaries

double lmg_boundary(double lambda, double g, double gamma)
{
    const double l2 = lambda * lambda, g2 = g * g, gm2 = gamma * gamma;
    const double a = gm2 - l2 + g2;
    return std::sqrt((a * a + 4.0 * l2 * g2) / (4.0 * (l2 + g2)));
}

double pt_boundary(double J, double g)
{
    return 0.5 * g * (1.0 + 2.0 * J * J / (g * g));
}

double normal_state_instability(double lambda, double g, double gamma, double sign, double j_max,
                                double tol)
{
    ModelParams p;
    p.g = g;
    p.lambda = lambda;
    p.gamma = gamma;
    const BlochPair normal = BlochPair::normal_state();
    auto abscissa = [&](double t) {
        p.J = sign * t;
        return tangent_spectral_abscissa(normal, p);
    };
    if (abscissa(0.0) >= 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double scan = 1e-2;
    double lo = 0.0, hi = -1.0;
    for (double t = scan; t <= j_max + 1e-12; t += scan) {
        if (abscissa(t) >= 0.0) {
            hi = t;
            break;
        }
        lo = t;
    }
    if (hi < 0.0) return std::numeric_limits<double>::quiet_NaN();
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (abscissa(mid) < 0.0) lo = mid; else hi = mid;
    }
    return sign * 0.5 * (lo + hi);
}

}  // namespace lmgdimer
