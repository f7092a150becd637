#include "lmgdimer/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "lmgdimer/parallel.hpp"

namespace lmgdimer::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Row {
    std::string text;
    bool flagged{false};
};

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const Config& cfg, Command cmd, const char* header) : out_(out)
    {
        out_ << "# lmgdimer " << LMGDIMER_VERSION_STRING << ' ' << to_string(cmd)
             << " config=" << config_record(cfg, cmd) << '\n'
             << header << '\n';
    }

    void write(const std::vector<Row>& rows, RunSummary& summary)
    {
        for (const auto& r : rows) {
            out_ << r.text << '\n';
            ++summary.rows;
            if (r.flagged) ++summary.flagged;
        }
        out_.flush();
    }

private:
    std::ostream& out_;
};

template <class... Ts>
std::string join(const Ts&... parts)
{
    std::string out;
    bool first = true;
    ((out += (first ? "" : ","), out += parts, first = false), ...);
    return out;
}

std::string num(double v)
{
    return format_number(v);
}

ModelParams point_params(const Config& cfg, double J, double lambda, int spin_twice)
{
    ModelParams p;
    p.g = 1.0;
    p.J = J;
    p.lambda = lambda;
    p.gamma = cfg.gamma;
    p.spin = SpinLength::from_twice(spin_twice);
    return p;
}

std::string spin_value(int twice)
{
    return format_number(0.5 * twice);
}

RunSummary run_mf_sweep(const Config& cfg, std::ostream& out)
{
    const auto Js = cfg.J.values();
    const auto lambdas = cfg.lambda.values();
    const std::size_t n = Js.size() * lambdas.size();
    std::vector<Row> rows(n);
    parallel_for(n, cfg.threads, [&](std::size_t k) {
        const double J = Js[k / lambdas.size()];
        const double lambda = lambdas[k % lambdas.size()];
        const auto rep = classify_point(point_params(cfg, J, lambda, cfg.spin_twice), cfg.classify);
        const auto& a = rep.time_avg;
        rows[k].text = join(num(J), num(lambda), std::string(to_string(rep.classification)),
                            std::to_string(rep.n_stable), num(a.za()), num(a.zb()), num(a.xa()),
                            num(a.xb()), num(a.ya()), num(a.yb()), num(rep.lyapunov));
        rows[k].flagged = rep.classification == AttractorClass::unresolved;
    });
    RunSummary summary;
    CsvWriter w(out, cfg, Command::mf_sweep, "J,lambda,class,n_stable,ZA,ZB,XA,XB,YA,YB,lyapunov");
    w.write(rows, summary);
    return summary;
}

RunSummary run_ed_sweep(const Config& cfg, std::ostream& out)
{
    const auto spins = cfg.ed_spins_twice.empty() ? std::vector<int>{cfg.spin_twice} : cfg.ed_spins_twice;
    const auto Js = cfg.J.values();
    const auto lambdas = cfg.lambda.values();
    const std::size_t per_spin = Js.size() * lambdas.size();
    const std::size_t n = spins.size() * per_spin;
    std::vector<Row> rows(n);
    parallel_for(n, exact_worker_width(cfg), [&](std::size_t k) {
        const int tw = spins[k / per_spin];
        const std::size_t r = k % per_spin;
        const double J = Js[r / lambdas.size()];
        const double lambda = lambdas[r % lambdas.size()];
        const auto p = point_params(cfg, J, lambda, tw);
        const auto ss = steady_state(build_liouvillian(build_dimer_model(p)));
        double za = kNaN, zb = kNaN, purity = kNaN;
        if (ss.ok()) {
            const auto o = observables(ss.rho, p.spin);
            za = o.za;
            zb = o.zb;
            purity = o.purity;
        }
        rows[k].text = join(num(J), num(lambda), spin_value(tw), num(za), num(zb), num(purity),
                            num(ss.residual), std::string(to_string(ss.status)));
        rows[k].flagged = !ss.ok();
    });
    RunSummary summary;
    CsvWriter w(out, cfg, Command::ed_sweep, "J,lambda,S,ZA,ZB,purity,residual,status");
    w.write(rows, summary);
    return summary;
}

RunSummary run_boundaries(const Config& cfg, std::ostream& out)
{
    std::vector<Row> rows;
    for (double lambda : cfg.boundary_lambda.values()) {
        rows.push_back({join(std::string("lambda"), num(lambda), num(lmg_boundary(lambda, 1.0, cfg.gamma)))});
    }
    for (double J : cfg.boundary_J.values()) {
        rows.push_back({join(std::string("J"), num(J), num(pt_boundary(J, 1.0)))});
    }
    RunSummary summary;
    CsvWriter w(out, cfg, Command::boundaries, "axis,value,boundary");
    w.write(rows, summary);
    return summary;
}

RunSummary run_wigner(const Config& cfg, std::ostream& out)
{
    const auto p = point_params(cfg, cfg.point_J, cfg.point_lambda, cfg.spin_twice);
    const auto ss = steady_state(build_liouvillian(build_dimer_model(p)));
    if (!ss.ok()) {
        throw NumericalError(std::string("steady state is ") + to_string(ss.status) + " at the requested point");
    }
    const auto grid = wigner_function(partial_trace(ss.rho, cfg.site, p.spin), cfg.wigner_grid);
    std::vector<Row> rows;
    rows.reserve(grid.thetas.size() * grid.phis.size());
    for (std::size_t i = 0; i < grid.thetas.size(); ++i) {
        for (std::size_t j = 0; j < grid.phis.size(); ++j) {
            rows.push_back({join(num(grid.thetas[i]), num(grid.phis[j]),
                                 num(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))))});
        }
    }
    RunSummary summary;
    CsvWriter w(out, cfg, Command::wigner, "theta,phi,W");
    w.write(rows, summary);
    return summary;
}

RunSummary run_mf_trajectory(const Config& cfg, std::ostream& out)
{
    BlochPair s0 = cfg.state0;
    s0.v.head<3>().normalize();
    s0.v.tail<3>().normalize();
    const auto p = point_params(cfg, cfg.point_J, cfg.point_lambda, cfg.spin_twice);
    const auto traj = integrate(s0, p, cfg.t_final, cfg.classify.ode, cfg.sample_dt);
    if (!traj.ok()) {
        throw NumericalError(std::string("trajectory integration failed: ") + ode::to_string(traj.status));
    }
    std::vector<Row> rows;
    rows.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        rows.push_back({join(num(traj.times[i]), num(s.xa()), num(s.ya()), num(s.za()), num(s.xb()),
                             num(s.yb()), num(s.zb()))});
    }
    RunSummary summary;
    CsvWriter w(out, cfg, Command::mf_trajectory, "t,XA,YA,ZA,XB,YB,ZB");
    w.write(rows, summary);
    return summary;
}

}  // namespace

const char* version()
{
    return LMGDIMER_VERSION_STRING;
}

int exact_worker_width(const Config& cfg)
{
    int tw = cfg.ed_spins_twice.empty() ? cfg.spin_twice : 1;
    for (int s : cfg.ed_spins_twice) tw = std::max(tw, s);
    const std::size_t per_point = steady_state_bytes(SpinLength::from_twice(tw));
    const std::size_t cap = cfg.memory_cap_mb * 1024 * 1024;
    const std::size_t by_memory = std::max<std::size_t>(1, cap / std::max<std::size_t>(1, per_point));
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(1, cfg.threads)), by_memory));
}

RunSummary run(Command cmd, const Config& cfg, std::ostream& out)
{
    validate(cfg, cmd);
    switch (cmd) {
    case Command::mf_sweep: return run_mf_sweep(cfg, out);
    case Command::ed_sweep: return run_ed_sweep(cfg, out);
    case Command::boundaries: return run_boundaries(cfg, out);
    case Command::wigner: return run_wigner(cfg, out);
    case Command::mf_trajectory: return run_mf_trajectory(cfg, out);
    }
    throw ConfigError("unknown command");
}

}  // namespace lmgdimer::sweep
