// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance [--work-dir DIR] [--only N[,N...]]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "generators.hpp"
#include "lmgdimer/liouville.hpp"
#include "lmgdimer/meanfield.hpp"
#include "lmgdimer/parallel.hpp"
#include "lmgdimer/spin_ops.hpp"
#include "lmgdimer/sweep.hpp"
#include "lmgdimer/wigner.hpp"

using namespace lmgdimer;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass{true};
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

ModelParams point(double J, double lambda, double gamma = 0.5, int twice_s = 2)
{
    ModelParams p;
    p.J = J;
    p.lambda = lambda;
    p.gamma = gamma;
    p.spin = SpinLength::from_twice(twice_s);
    return p;
}

double max_abs(const ComplexMatrix& m)
{
    return m.cwiseAbs().maxCoeff();
}

// 1. Normal-state exactness
Outcome normal_state_exactness()
{
    Outcome o;
    testgen::Gen gen(101);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        ModelParams p = gen.params(5.0, 5.0);
        p.gamma = gen.uniform(0.0, 3.0);
        worst = std::max(worst, mf_rhs(BlochPair::normal_state(), p).v.cwiseAbs().maxCoeff());
    }
    o.require(worst == 0.0, "max |rhs| = " + fmt(worst));
    o.detail = o.detail.empty() ? "100 parameter sets, max |rhs| = " + fmt(worst) : o.detail;
    return o;
}

// 2. LMG boundary agreement
Outcome lmg_boundary_agreement()
{
    Outcome o;
    double worst = 0.0;
    for (double lambda : {0.0, 0.1, 0.2, 0.3, 0.4}) {
        const double numeric = normal_state_instability(lambda, 1.0, 0.5, +1.0);
        const double err = std::abs(numeric - lmg_boundary(lambda, 1.0, 0.5));
        worst = std::max(worst, std::isfinite(err) ? err : 1e300);
    }
    o.require(worst <= 1e-6, "max |J_num - J_c| = " + fmt(worst));
    const double jc0 = lmg_boundary(0.0, 1.0, 0.5);
    o.require(std::abs(jc0 - 0.625) <= 1e-6, "J_c(0) = " + fmt(jc0));
    if (o.pass) o.detail = "max |J_num - J_c| = " + fmt(worst) + ", J_c(0) = " + fmt(jc0);
    return o;
}

// 3. Phase-diagram topology
struct Grid {
    std::vector<double> Js, lambdas;
    std::vector<int> n;  // n_stable, index j * n_lambda + l
    int at(int j, int l) const { return n[j * lambdas.size() + l]; }
};

int index_of(const std::vector<double>& v, double x)
{
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i] - x) < 1e-9) return static_cast<int>(i);
    return -1;
}

// 4-connected component labels of the cells satisfying pred (-1 elsewhere).
std::vector<int> component_labels(const Grid& g, const std::function<bool(int)>& pred)
{
    const int nj = static_cast<int>(g.Js.size()), nl = static_cast<int>(g.lambdas.size());
    std::vector<int> label(nj * nl, -1);
    int count = 0;
    for (int s = 0; s < nj * nl; ++s) {
        if (label[s] >= 0 || !pred(g.n[s])) continue;
        std::vector<int> stack{s};
        label[s] = count;
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            const int j = c / nl, l = c % nl;
            const int nb[4][2] = {{j + 1, l}, {j - 1, l}, {j, l + 1}, {j, l - 1}};
            for (const auto& q : nb) {
                if (q[0] < 0 || q[0] >= nj || q[1] < 0 || q[1] >= nl) continue;
                const int k = q[0] * nl + q[1];
                if (label[k] < 0 && pred(g.n[k])) {
                    label[k] = count;
                    stack.push_back(k);
                }
            }
        }
        ++count;
    }
    return label;
}

int components(const Grid& g, const std::function<bool(int)>& pred)
{
    const auto label = component_labels(g, pred);
    return label.empty() ? 0 : 1 + *std::max_element(label.begin(), label.end());
}

Outcome phase_diagram(int threads)
{
    Outcome o;
    Grid g;
    g.Js = sweep::Range{-2.0, 2.0, 41}.values();
    g.lambdas = sweep::Range{0.0, 1.0, 41}.values();
    const std::size_t nl = g.lambdas.size();
    g.n.assign(g.Js.size() * nl, -1);
    std::vector<AttractorClass> cls(g.n.size());
    std::vector<BlochPair> single(g.n.size());
    parallel_for(g.n.size(), threads, [&](std::size_t k) {
        const auto rep = classify_point(point(g.Js[k / nl], g.lambdas[k % nl]));
        g.n[k] = rep.n_stable;
        cls[k] = rep.classification;
        if (rep.n_stable == 1) single[k] = rep.fixed_points.front();
    });

    std::set<int> kinds(g.n.begin(), g.n.end());
    o.require(kinds == std::set<int>{0, 1, 2}, "stable-count values are not exactly {0, 1, 2}");

    const int j0 = index_of(g.Js, 0.0), jm = index_of(g.Js, -1.5), jp = index_of(g.Js, 1.5);
    const int l0 = index_of(g.lambdas, 0.0), l01 = index_of(g.lambdas, 0.1), l075 = index_of(g.lambdas, 0.75);
    o.require(g.at(j0, l0) == 1, "(0,0) not in FixedPoints(1)");
    o.require(g.at(jm, l01) == 2, "(-1.5,0.1) not in FixedPoints(2)");
    o.require(g.at(jp, l01) == 2, "(1.5,0.1) not in FixedPoints(2)");
    o.require(g.at(j0, l075) == 0, "(0,0.75) has a stable fixed point");

    // Four region types: the normal region, two LMG lobes (one per sign of J)
    // and the region without stable fixed points.
    // Pockets of FixedPoints(1) away from the main region are allowed only
    // where the normal state itself is linearly stable (re-entrant strips at
    // large lambda, cut off by the pitchfork of the LMG pair).
    const auto normal_label = component_labels(g, [](int n) { return n == 1; });
    const int main_part = normal_label[j0 * nl + l0];
    int pockets = 0;
    bool pockets_normal = true;
    for (std::size_t k = 0; k < g.n.size(); ++k) {
        if (normal_label[k] < 0 || normal_label[k] == main_part) continue;
        ++pockets;
        const auto p = point(g.Js[k / nl], g.lambdas[k % nl]);
        const double dist = (single[k].v - BlochPair::normal_state().v).lpNorm<Eigen::Infinity>();
        if (dist > 1e-6 || !(tangent_spectral_abscissa(BlochPair::normal_state(), p) < 0.0)) pockets_normal = false;
    }
    o.require(pockets_normal, "a detached FixedPoints(1) pocket is not the stable normal state");
    const int lmg_parts = components(g, [](int n) { return n == 2; });
    o.require(lmg_parts == 2, "FixedPoints(2) region has " + std::to_string(lmg_parts) + " parts");
    bool lobes_one_sided = true;
    for (std::size_t j = 0; j < g.Js.size(); ++j)
        for (std::size_t l = 0; l < nl; ++l)
            if (g.at(j, l) == 2 && std::abs(g.Js[j]) < 0.5) lobes_one_sided = false;
    o.require(lobes_one_sided, "FixedPoints(2) cells near J = 0");

    // LMG edge: along rows lambda <= 0.4 the normal region ends at +-J_c.
    const double dJ = g.Js[1] - g.Js[0], dl = g.lambdas[1] - g.lambdas[0];
    double worst12 = 0.0;
    for (std::size_t l = 0; l < nl && g.lambdas[l] <= 0.4 + 1e-12; ++l) {
        const double jc = lmg_boundary(g.lambdas[l], 1.0, 0.5);
        for (int dir : {+1, -1}) {
            int j = j0;
            while (j + dir >= 0 && j + dir < int(g.Js.size()) && g.at(j + dir, l) == 1) j += dir;
            const double inside = std::abs(g.Js[j]), outside = inside + dJ;
            const double miss = jc < inside ? inside - jc : (jc > outside ? jc - outside : 0.0);
            worst12 = std::max(worst12, miss);
        }
    }
    o.require(worst12 <= dJ + 1e-12, "LMG edge off by " + fmt(worst12));

    // PT edge: for |J| <= 0.5 the normal region ends at lambda_c(J).
    double worst13 = 0.0;
    for (std::size_t j = 0; j < g.Js.size(); ++j) {
        if (std::abs(g.Js[j]) > 0.5 + 1e-12) continue;
        std::size_t l = 0;
        while (l + 1 < nl && g.at(j, l + 1) == 1) ++l;
        const double lc = pt_boundary(g.Js[j], 1.0);
        const double inside = g.lambdas[l], outside = inside + dl;
        const double miss = lc < inside ? inside - lc : (lc > outside ? lc - outside : 0.0);
        worst13 = std::max(worst13, miss);
    }
    o.require(worst13 <= dl + 1e-12, "PT edge off by " + fmt(worst13));

    int limit = 0, chaos = 0, unresolved = 0;
    for (auto c : cls) {
        limit += c == AttractorClass::limit_cycle;
        chaos += c == AttractorClass::chaotic;
        unresolved += c == AttractorClass::unresolved;
    }
    std::ostringstream d;
    d << "cells n=1/2/0: " << std::count(g.n.begin(), g.n.end(), 1) << "/" << std::count(g.n.begin(), g.n.end(), 2)
      << "/" << std::count(g.n.begin(), g.n.end(), 0) << " (limit " << limit << ", chaotic " << chaos
      << ", unresolved " << unresolved << "), " << pockets << " re-entrant normal cells, LMG-edge miss " << fmt(worst12) << ", PT-edge miss " << fmt(worst13);
    o.detail = o.pass ? d.str() : o.detail + " | " + d.str();
    return o;
}

// 4. Mean-field PT transition along J = 0
Outcome mf_pt_transition(int threads)
{
    Outcome o;
    const auto lambdas = sweep::Range{0.0, 1.0, 21}.values();
    std::vector<double> zb(lambdas.size());
    parallel_for(lambdas.size(), threads, [&](std::size_t k) {
        if (std::abs(lambdas[k] - 0.5) < 1e-9) return;  // the transition point itself is not tested
        zb[k] = classify_point(point(0.0, lambdas[k])).time_avg.zb();
    });
    double below = 0.0, above = 0.0;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (lambdas[k] <= 0.45 + 1e-9) below = std::max(below, std::abs(zb[k] - 1.0));
        if (lambdas[k] >= 0.55 - 1e-9) above = std::max(above, std::abs(zb[k]));
    }
    o.require(below <= 1e-6, "max |Z_B - 1| below = " + fmt(below));
    o.require(above < 0.05, "max |Z_B| above = " + fmt(above));
    if (o.pass) o.detail = "max |Z_B - 1| (lambda<=0.45) = " + fmt(below) + ", max |Z_B| (lambda>=0.55) = " + fmt(above);
    return o;
}

// 5. Exact PT transition
Outcome exact_pt_transition(int threads)
{
    Outcome o;
    const auto lambdas = sweep::Range{0.0, 1.0, 21}.values();
    const int spins[3] = {2, 4, 6};
    std::vector<double> zb(3 * lambdas.size()), resid(3 * lambdas.size());
    std::vector<int> ok(3 * lambdas.size());
    parallel_for(zb.size(), threads, [&](std::size_t k) {
        const auto p = point(0.0, lambdas[k % lambdas.size()], 0.5, spins[k / lambdas.size()]);
        const auto ss = steady_state(build_liouvillian(build_dimer_model(p)));
        ok[k] = ss.ok();
        resid[k] = ss.residual;
        zb[k] = ss.ok() ? observables(ss.rho, p.spin).zb : NAN;
    });
    double worst_resid = *std::max_element(resid.begin(), resid.end());
    o.require(std::all_of(ok.begin(), ok.end(), [](int v) { return v; }), "some steady state not ok");
    o.require(worst_resid < 1e-10, "residual " + fmt(worst_resid));
    for (int s = 0; s < 3; ++s)
        for (std::size_t l = 1; l < lambdas.size(); ++l) {
            const double prev = zb[s * lambdas.size() + l - 1], cur = zb[s * lambdas.size() + l];
            if (!(cur < prev)) o.require(false, "Z_B not decreasing at S=" + fmt(spins[s] / 2.0) + " lambda=" + fmt(lambdas[l]));
        }

    std::string purity_text;
    for (int tw : spins) {
        const SpinLength s = SpinLength::from_twice(tw);
        const double gamma = 0.5;
        const auto ss = steady_state(build_liouvillian(build_pt_model(10.0 * gamma, gamma, s)));
        o.require(ss.ok(), "PT steady state not ok");
        const double purity = observables(ss.rho, s).purity;
        const double target = 1.0 / std::pow(s.dim(), 2);
        o.require(std::abs(purity - target) <= 0.02, "PT purity " + fmt(purity) + " vs " + fmt(target));
        o.require(ss.residual < 1e-10, "PT residual " + fmt(ss.residual));
        purity_text += (purity_text.empty() ? "" : ", ") + fmt(purity);
    }

    for (double lam : {0.3, 0.7}) {
        const int l = index_of(lambdas, lam);
        const double step = lam < 0.5 ? 1.0 : 0.0;
        const double d1 = std::abs(zb[0 * lambdas.size() + l] - step);
        const double d3 = std::abs(zb[2 * lambdas.size() + l] - step);
        o.require(d3 <= d1, "no steepening at lambda=" + fmt(lam));
    }
    if (o.pass) {
        o.detail = "monotone for S=1,2,3; PT purities " + purity_text + "; max residual " + fmt(worst_resid);
    }
    return o;
}

// 6. Steady state vs long-time evolution
Outcome oracle_equivalence()
{
    Outcome o;
    testgen::Gen gen(606);
    double worst = 0.0, longest = 0.0;
    for (int tw : {1, 2, 4}) {
        for (int k = 0; k < 10; ++k) {
            ModelParams p = gen.params();
            p.gamma = gen.uniform(0.2, 1.0);
            p.spin = SpinLength::from_twice(tw);
            const auto L = build_liouvillian(build_dimer_model(p));
            const auto ss = steady_state(L);
            if (!ss.ok()) {
                o.require(false, "steady state not ok");
                continue;
            }
            Eigen::ComplexEigenSolver<ComplexMatrix> es(L.dense(), false);
            std::vector<double> re;
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) re.push_back(es.eigenvalues()[i].real());
            std::sort(re.begin(), re.end(), std::greater<double>());
            const double gap = -re[1];
            const double t_final = std::max(1e3, 20.0 / gap);
            longest = std::max(longest, t_final);
            const auto ev = evolve(L, DensityMatrix::maximally_mixed(L.hilbert_dim), t_final);
            if (!ev.ok()) {
                o.require(false, "evolution failed");
                continue;
            }
            worst = std::max(worst, max_abs(ev.rho - ss.rho));
        }
    }
    o.require(worst <= 1e-6, "max |rho_evolve - rho_ss| = " + fmt(worst));
    if (o.pass) o.detail = "30 points, max |rho_evolve - rho_ss| = " + fmt(worst) + ", longest t = " + fmt(longest);
    return o;
}

// 7. Symmetry suite
Outcome symmetry_suite()
{
    Outcome o;
    testgen::Gen gen(707);
    for (int i = 0; i < 100; ++i) {
        const auto p = gen.params();
        const auto s = gen.any_state(1.0);
        if (mf_rhs(z2_image(s), p).v != z2_image(mf_rhs(s, p)).v) o.require(false, "Z2 equivariance broken");
    }
    double worst_pt = 0.0;
    for (int tw : {2, 4})
        for (double lambda : {0.05, 0.2, 0.5, 1.0, 5.0}) {
            const SpinLength s = SpinLength::from_twice(tw);
            const auto ss = steady_state(build_liouvillian(build_pt_model(lambda, 0.5, s)));
            o.require(ss.ok(), "PT steady state not ok");
            const auto obs = observables(ss.rho, s);
            worst_pt = std::max(worst_pt, std::abs(obs.za + obs.zb));
        }
    o.require(worst_pt <= 1e-8, "max |Z_A + Z_B| = " + fmt(worst_pt));
    double worst_even = 0.0;
    for (int k = 0; k <= 20; ++k) {
        const double lambda = 0.05 * k;
        const double plus = normal_state_instability(lambda, 1.0, 0.5, +1.0);
        const double minus = normal_state_instability(lambda, 1.0, 0.5, -1.0);
        // The crossing is reported as a signed coupling.
        if (std::isfinite(plus) != std::isfinite(minus)) worst_even = std::numeric_limits<double>::infinity();
        else if (std::isfinite(plus)) worst_even = std::max(worst_even, std::abs(plus + minus));
        const double J = gen.uniform(0.0, 2.0);
        worst_even = std::max(worst_even, std::abs(tangent_spectral_abscissa(BlochPair::normal_state(), point(J, lambda)) -
                                                   tangent_spectral_abscissa(BlochPair::normal_state(), point(-J, lambda))));
    }
    o.require(worst_even <= 1e-12, "boundary not even in J: " + fmt(worst_even));
    if (o.pass) o.detail = "Z2 exact at 100 states, max |Z_A + Z_B| = " + fmt(worst_pt) + ", J-parity defect " + fmt(worst_even);
    return o;
}

// 8. Numerical-calculus suite
Outcome calculus_suite()
{
    Outcome o;
    testgen::Gen gen(808);
    double worst_fd = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto p = gen.params();
        const auto s = gen.on_shell();
        const Mat6 jac = mf_jacobian(s.v, p);
        for (int c = 0; c < 6; ++c) {
            Vec6 up = s.v, dn = s.v;
            up[c] += 1e-6;
            dn[c] -= 1e-6;
            const Vec6 fd = (mf_rhs(up, p) - mf_rhs(dn, p)) / 2e-6;
            worst_fd = std::max(worst_fd, (jac.col(c) - fd).cwiseAbs().maxCoeff());
        }
    }
    o.require(worst_fd <= 1e-6, "Jacobian vs finite differences " + fmt(worst_fd));

    double worst_drift = 0.0;
    for (int i = 0; i < 10; ++i) {
        const auto traj = integrate(gen.on_shell(), gen.params(), 1000.0, {}, 1.0);
        if (!traj.ok()) {
            o.require(false, "integration failed");
            continue;
        }
        for (const auto& st : traj.states) worst_drift = std::max(worst_drift, st.shell_deviation());
    }
    o.require(worst_drift < 1e-6, "Bloch drift " + fmt(worst_drift));

    double worst_alg = 0.0;
    const cplx i(0.0, 1.0);
    for (int tw = 1; tw <= 8; ++tw) {
        const SpinLength s = SpinLength::from_twice(tw);
        const auto m = spin_matrices(s);
        const double S = s.value();
        const ComplexMatrix id = ComplexMatrix::Identity(s.dim(), s.dim());
        worst_alg = std::max({worst_alg, max_abs(m.x * m.x + m.y * m.y + m.z * m.z - S * (S + 1.0) * id),
                              max_abs(commutator(m.x, m.y) - i * m.z), max_abs(commutator(m.y, m.z) - i * m.x),
                              max_abs(commutator(m.z, m.x) - i * m.y), max_abs(commutator(m.plus, m.minus) - 2.0 * m.z)});
    }
    o.require(worst_alg <= 1e-12, "spin algebra defect " + fmt(worst_alg));
    if (o.pass) {
        o.detail = "Jacobian " + fmt(worst_fd) + ", drift " + fmt(worst_drift) + ", algebra " + fmt(worst_alg);
    }
    return o;
}

// 9. Wigner suite
Outcome wigner_suite()
{
    Outcome o;
    const SpinLength s = SpinLength::from_twice(6);
    const double uniform = 1.0 / (4.0 * pi);
    auto site_b = [&](double J, double lambda) {
        const auto p = point(J, lambda, 0.5, 6);
        const auto ss = steady_state(build_liouvillian(build_dimer_model(p)));
        if (!ss.ok()) throw std::runtime_error("steady state not ok");
        return partial_trace(ss.rho, Site::B, s);
    };

    double worst_norm = 0.0;
    const auto mixed = wigner_function(ComplexMatrix::Identity(7, 7) / 7.0);
    worst_norm = std::max(worst_norm, std::abs(mixed.integral() - 1.0));
    const double flat = std::max(std::abs(mixed.values.maxCoeff() - uniform), std::abs(mixed.values.minCoeff() - uniform));
    o.require(flat < 1e-12, "maximally mixed not flat: " + fmt(flat));

    const auto wa = wigner_function(site_b(0.0, 0.0));
    const auto wb = wigner_function(site_b(1.5, 0.0));
    const auto wc = wigner_function(site_b(1.5, 0.5));
    testgen::Gen gen(909);
    const auto wr = wigner_function(gen.density(7));
    for (const auto* w : {&wa, &wb, &wc, &wr}) worst_norm = std::max(worst_norm, std::abs(w->integral() - 1.0));
    o.require(worst_norm <= 1e-6, "normalization defect " + fmt(worst_norm));

    const auto peaks_a = local_maxima(wa, uniform);
    o.require(peaks_a.size() == 1 && peaks_a[0].theta < 0.2, "normal phase not a single north-pole peak");

    const auto peaks = local_maxima(wb, uniform);
    o.require(peaks.size() == 2, "LMG phase has " + std::to_string(peaks.size()) + " maxima");
    std::string where;
    if (peaks.size() == 2) {
        const double dphi = std::abs(std::remainder(peaks[1].phi - peaks[0].phi, 2.0 * pi));
        const double cell = 2.0 * pi / wb.phis.size();
        o.require(std::abs(dphi - pi) <= cell + 1e-12, "maxima not a half turn apart");
        o.require(peaks[0].i_theta == peaks[1].i_theta, "maxima at different polar rows");
        o.require(std::abs(peaks[0].value - peaks[1].value) <= 1e-8 * peaks[0].value, "maxima heights differ");
        // Azimuths predicted by the mean-field fixed points of site B.
        const auto rep = classify_point(point(1.5, 0.0));
        double miss = 1e300;
        for (const auto& fp : rep.fixed_points) {
            const double phi_mf = std::atan2(fp.yb(), fp.xb());
            for (const auto& pk : peaks) miss = std::min(miss, std::abs(std::remainder(pk.phi - phi_mf, 2.0 * pi)));
        }
        o.require(miss <= 0.2, "maxima away from the mean-field azimuth by " + fmt(miss));
        where = "phi = " + fmt(peaks[0].phi) + ", " + fmt(peaks[1].phi);
    }
    const double contrast_b = wb.values.maxCoeff() - wb.values.minCoeff();
    const double contrast_c = wc.values.maxCoeff() - wc.values.minCoeff();
    o.require(contrast_c < contrast_b, "contrast (c) " + fmt(contrast_c) + " not below (b) " + fmt(contrast_b));
    if (o.pass) {
        o.detail = "two lobes at " + where + ", contrast b/c = " + fmt(contrast_b) + "/" + fmt(contrast_c) +
                   ", normalization " + fmt(worst_norm);
    }
    return o;
}

// 10. Chaos indicator
Outcome chaos_indicator()
{
    Outcome o;
    const double t_total = 1e4;
    const auto chaos = classify_point(point(-1.5, 0.9));
    o.require(chaos.n_stable == 0, "stable fixed point found at (-1.5, 0.9)");
    LyapunovOptions lo;
    lo.t_align = 50.0;
    const double lam_chaos = lyapunov_estimate(point(-1.5, 0.9), chaos.window_start, t_total, lo);
    o.require(lam_chaos > 0.0, "chaotic exponent " + fmt(lam_chaos));
    const auto cycle = classify_point(point(0.0, 0.75));
    o.require(cycle.n_stable == 0, "stable fixed point on the J = 0 cycle");
    const double lam_cycle = lyapunov_estimate(point(0.0, 0.75), cycle.window_start, t_total, lo);
    o.require(std::abs(lam_cycle) <= 0.01, "cycle exponent " + fmt(lam_cycle));
    if (o.pass) o.detail = "exponent " + fmt(lam_chaos) + " at (-1.5, 0.9), " + fmt(lam_cycle) + " at (0, 0.75)";
    return o;
}

// 11. Determinism of the CLI
std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli_determinism(const fs::path& work)
{
    Outcome o;
#ifndef LMG_SWEEP_PATH
    o.require(false, "lmg-sweep was not built");
    (void)work;
#else
    fs::create_directories(work);
    const fs::path cfg = work / "determinism.json";
    {
        std::ofstream out(cfg);
        out << R"({
  "model": {"gamma": 0.5, "spin": 1},
  "grid": {"J": {"min": -1.5, "max": 1.5, "steps": 3}, "lambda": {"min": 0.1, "max": 0.9, "steps": 3}},
  "meanfield": {"seeds_per_sphere": 4, "t_transient": 100, "t_window": 300},
  "exact": {"spins": [0.5, 1]},
  "point": {"J": 1.5, "lambda": 0.5},
  "wigner": {"n_theta": 16, "n_phi": 32},
  "trajectory": {"t_final": 50, "sample_dt": 0.5},
  "boundaries": {"lambda": {"min": 0, "max": 0.4, "steps": 9}, "J": {"min": -0.5, "max": 0.5, "steps": 11}}
})";
    }
    const char* commands[] = {"mf-sweep", "ed-sweep", "boundaries", "wigner", "mf-trajectory"};
    std::string done;
    for (const char* cmd : commands) {
        std::vector<std::string> outputs;
        for (const char* threads : {"1", "1", "3"}) {
            const fs::path out = work / (std::string(cmd) + "_" + std::to_string(outputs.size()) + ".csv");
            const std::string line = std::string("\"") + LMG_SWEEP_PATH + "\" " + cmd + " -c \"" + cfg.string() +
                                     "\" --threads " + threads + " -o \"" + out.string() + "\" 2>/dev/null";
            const int rc = std::system(line.c_str());
            if (rc != 0) {
                o.require(false, std::string(cmd) + " exited with " + std::to_string(rc));
                break;
            }
            outputs.push_back(slurp(out));
        }
        if (outputs.size() != 3) continue;
        o.require(!outputs[0].empty(), std::string(cmd) + " wrote nothing");
        o.require(outputs[0] == outputs[1], std::string(cmd) + ": serial runs differ");
        o.require(outputs[0] == outputs[2], std::string(cmd) + ": parallel run differs");
        done += (done.empty() ? "" : ", ") + std::string(cmd);
    }
    if (o.pass) o.detail = "byte-identical serial x2 and 3 threads: " + done;
#endif
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    fs::path work = fs::temp_directory_path() / "lmgdimer_acceptance";
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--work-dir" && i + 1 < argc) {
            work = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream list(argv[++i]);
            for (std::string item; std::getline(list, item, ',');) only.insert(std::stoi(item));
        } else {
            std::cerr << "usage: acceptance [--work-dir DIR] [--only N[,N...]]\n";
            return 2;
        }
    }
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("LMG_THREADS")) threads = std::max(1, std::atoi(env));

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"normal-state exactness", normal_state_exactness},
        {"LMG boundary agreement", lmg_boundary_agreement},
        {"phase-diagram topology", [&] { return phase_diagram(threads); }},
        {"PT transition, mean field", [&] { return mf_pt_transition(threads); }},
        {"PT transition, exact", [&] { return exact_pt_transition(threads); }},
        {"steady state vs evolution", oracle_equivalence},
        {"symmetry suite", symmetry_suite},
        {"numerical-calculus suite", calculus_suite},
        {"Wigner suite", wigner_suite},
        {"chaos indicator", chaos_indicator},
        {"CLI determinism", [&] { return cli_determinism(work); }},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome result;
        try {
            result = criteria[k].second();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d %s: %s [%.1fs]\n", result.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                    result.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !result.pass;
    }
    return failures == 0 ? 0 : 1;
}
