#include "lmgdimer/sweep.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace lmgdimer::sweep {

using json = nlohmann::json;

std::vector<double> Range::values() const
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(points, 0)));
    if (points == 1) {
        out.push_back(min);
        return out;
    }
    for (int i = 0; i < points; ++i) {
        // Endpoints are exact; interior points are min + i * step.
        out.push_back(i == points - 1 ? max : min + (max - min) * i / (points - 1));
    }
    return out;
}

const char* to_string(Command c)
{
    switch (c) {
    case Command::mf_sweep: return "mf-sweep";
    case Command::ed_sweep: return "ed-sweep";
    case Command::boundaries: return "boundaries";
    case Command::wigner: return "wigner";
    case Command::mf_trajectory: return "mf-trajectory";
    }
    return "unknown";
}

std::optional<Command> command_from_string(const std::string& name)
{
    for (auto c : {Command::mf_sweep, Command::ed_sweep, Command::boundaries, Command::wigner,
                   Command::mf_trajectory}) {
        if (name == to_string(c)) return c;
    }
    return std::nullopt;
}

const char* to_string(Engine e)
{
    switch (e) {
    case Engine::meanfield: return "meanfield";
    case Engine::exact: return "exact";
    case Engine::both: return "both";
    }
    return "both";
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drops the sign of -0
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace {

// Reads the keys of one JSON object and rejects the ones nobody asked for.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void number(const std::string& key, double& dst)
    {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
        dst = v.get<double>();
        if (!std::isfinite(dst)) throw ConfigError(where(key) + ": must be finite");
    }

    void integer(const std::string& key, int& dst)
    {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        dst = v.get<int>();
    }

    void text(const std::string& key, std::string& dst)
    {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
        dst = v.get<std::string>();
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError("unknown configuration key '" + where(it.key()) + "'");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

int spin_twice_from_json(const json& v, const std::string& where)
{
    if (!v.is_number()) throw ConfigError(where + ": spin length must be a number");
    try {
        return SpinLength::from_value(v.get<double>()).twice();
    } catch (const std::invalid_argument&) {
        throw ConfigError(where + ": spin length must be a positive half-integer");
    }
}

// An axis is either a number (fixed) or {min, max, steps}.
Range range_from_json(const json& v, const std::string& where)
{
    if (v.is_number()) {
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(where + ": must be finite");
        return Range::fixed(x);
    }
    Section s(v, where);
    Range r;
    if (!s.has("min") || !s.has("max") || !s.has("steps")) {
        throw ConfigError(where + ": a range needs min, max and steps");
    }
    s.number("min", r.min);
    s.number("max", r.max);
    s.integer("steps", r.points);
    s.finish();
    return r;
}

json range_to_json(const Range& r)
{
    if (r.points == 1) return r.min;
    return json{{"min", r.min}, {"max", r.max}, {"steps", r.points}};
}

void check_range(const Range& r, const std::string& name)
{
    if (!std::isfinite(r.min) || !std::isfinite(r.max)) throw ConfigError(name + ": range must be finite");
    if (r.points < 1) throw ConfigError(name + ": steps must be at least 1");
    if (r.points == 1 && r.min != r.max) throw ConfigError(name + ": a one-point range needs min == max");
    if (r.points > 1 && !(r.max > r.min)) throw ConfigError(name + ": range needs max > min");
}

std::string spin_text(int twice)
{
    return twice % 2 == 0 ? std::to_string(twice / 2) : std::to_string(twice) + "/2";
}

}  // namespace

Config parse_config(const std::string& json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }

    Config cfg;
    try {
        Section top(root, "");
        if (top.has("engine")) {
            std::string engine;
            top.text("engine", engine);
            if (engine == "meanfield") cfg.engine = Engine::meanfield;
            else if (engine == "exact") cfg.engine = Engine::exact;
            else if (engine == "both") cfg.engine = Engine::both;
            else throw ConfigError("engine: expected meanfield, exact or both");
        }
        if (top.has("model")) {
            Section s(top.raw("model"), "model");
            s.number("gamma", cfg.gamma);
            if (s.has("spin")) cfg.spin_twice = spin_twice_from_json(s.raw("spin"), "model.spin");
            s.finish();
        }
        if (top.has("grid")) {
            Section s(top.raw("grid"), "grid");
            if (s.has("J")) cfg.J = range_from_json(s.raw("J"), "grid.J");
            if (s.has("lambda")) cfg.lambda = range_from_json(s.raw("lambda"), "grid.lambda");
            s.finish();
        }
        if (top.has("meanfield")) {
            Section s(top.raw("meanfield"), "meanfield");
            auto& c = cfg.classify;
            s.integer("seeds_per_sphere", c.seeds_per_sphere);
            s.integer("window_seeds", c.window_seeds);
            s.number("t_transient", c.t_transient);
            s.number("t_window", c.t_window);
            s.number("t_align", c.t_align);
            s.number("rtol", c.ode.rtol);
            s.number("atol", c.ode.atol);
            s.number("lyapunov_tol", c.lyapunov_tol);
            s.number("confirm_factor", c.confirm_factor);
            s.number("recurrence_tol", c.recurrence_tol);
            s.number("renorm_interval", c.renorm_interval);
            s.finish();
        }
        if (top.has("exact")) {
            Section s(top.raw("exact"), "exact");
            if (s.has("spin_cap")) cfg.spin_cap_twice = spin_twice_from_json(s.raw("spin_cap"), "exact.spin_cap");
            if (s.has("spins")) {
                const json& list = s.raw("spins");
                if (!list.is_array() || list.empty()) throw ConfigError("exact.spins: expected a non-empty array");
                cfg.ed_spins_twice.clear();
                for (const auto& v : list) cfg.ed_spins_twice.push_back(spin_twice_from_json(v, "exact.spins"));
            }
            s.finish();
        }
        if (top.has("point")) {
            Section s(top.raw("point"), "point");
            s.number("J", cfg.point_J);
            s.number("lambda", cfg.point_lambda);
            s.finish();
        }
        if (top.has("wigner")) {
            Section s(top.raw("wigner"), "wigner");
            if (s.has("site")) {
                std::string site;
                s.text("site", site);
                if (site == "A") cfg.site = Site::A;
                else if (site == "B") cfg.site = Site::B;
                else throw ConfigError("wigner.site: expected \"A\" or \"B\"");
            }
            s.integer("n_theta", cfg.wigner_grid.n_theta);
            s.integer("n_phi", cfg.wigner_grid.n_phi);
            s.finish();
        }
        if (top.has("trajectory")) {
            Section s(top.raw("trajectory"), "trajectory");
            if (s.has("state0")) {
                const json& v = s.raw("state0");
                if (!v.is_array() || v.size() != 6) {
                    throw ConfigError("trajectory.state0: expected [XA, YA, ZA, XB, YB, ZB]");
                }
                for (std::size_t i = 0; i < 6; ++i) {
                    if (!v[i].is_number()) throw ConfigError("trajectory.state0: entries must be numbers");
                    cfg.state0.v[static_cast<Eigen::Index>(i)] = v[i].get<double>();
                }
            }
            s.number("t_final", cfg.t_final);
            s.number("sample_dt", cfg.sample_dt);
            s.finish();
        }
        if (top.has("boundaries")) {
            Section s(top.raw("boundaries"), "boundaries");
            if (s.has("lambda")) cfg.boundary_lambda = range_from_json(s.raw("lambda"), "boundaries.lambda");
            if (s.has("J")) cfg.boundary_J = range_from_json(s.raw("J"), "boundaries.J");
            s.finish();
        }
        if (top.has("output")) {
            Section s(top.raw("output"), "output");
            s.text("path", cfg.out_path);
            s.finish();
        }
        if (top.has("execution")) {
            Section s(top.raw("execution"), "execution");
            s.integer("threads", cfg.threads);
            if (s.has("memory_cap_mb")) {
                int mb = 0;
                s.integer("memory_cap_mb", mb);
                if (mb < 1) throw ConfigError("execution.memory_cap_mb: must be positive");
                cfg.memory_cap_mb = static_cast<std::size_t>(mb);
            }
            s.finish();
        }
        top.finish();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("configuration error: ") + e.what());
    }
    return cfg;
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const Config& cfg, Command cmd)
{
    if (!std::isfinite(cfg.gamma) || cfg.gamma < 0.0) throw ConfigError("model.gamma must be finite and >= 0");
    if (cfg.spin_twice < 1) throw ConfigError("model.spin must be a positive half-integer");
    if (cfg.threads < 1) throw ConfigError("execution.threads must be at least 1");
    if (cfg.memory_cap_mb < 1) throw ConfigError("execution.memory_cap_mb must be positive");

    const bool wants_mf = cmd == Command::mf_sweep || cmd == Command::mf_trajectory;
    const bool wants_exact = cmd == Command::ed_sweep || cmd == Command::wigner;
    if (wants_mf && cfg.engine == Engine::exact) {
        throw ConfigError(std::string(to_string(cmd)) + " needs engine meanfield or both");
    }
    if (wants_exact && cfg.engine == Engine::meanfield) {
        throw ConfigError(std::string(to_string(cmd)) + " needs engine exact or both");
    }

    switch (cmd) {
    case Command::mf_sweep: {
        check_range(cfg.J, "grid.J");
        check_range(cfg.lambda, "grid.lambda");
        const auto& c = cfg.classify;
        if (c.seeds_per_sphere < 1) throw ConfigError("meanfield.seeds_per_sphere must be at least 1");
        if (c.window_seeds < 1) throw ConfigError("meanfield.window_seeds must be at least 1");
        if (!(c.confirm_factor >= 1.0)) throw ConfigError("meanfield.confirm_factor must be at least 1");
        if (!(c.t_transient > 0.0) || !(c.t_window > 0.0) || !(c.t_align >= 0.0)) {
            throw ConfigError("meanfield times must be positive (t_align may be 0)");
        }
        if (!(c.ode.rtol > 0.0) || !(c.ode.atol > 0.0)) throw ConfigError("meanfield tolerances must be positive");
        if (!(c.lyapunov_tol > 0.0) || !(c.recurrence_tol > 0.0) || !(c.renorm_interval > 0.0)) {
            throw ConfigError("meanfield.lyapunov_tol, recurrence_tol and renorm_interval must be positive");
        }
        break;
    }
    case Command::ed_sweep: {
        check_range(cfg.J, "grid.J");
        check_range(cfg.lambda, "grid.lambda");
        const auto spins = cfg.ed_spins_twice.empty() ? std::vector<int>{cfg.spin_twice} : cfg.ed_spins_twice;
        for (int tw : spins) {
            if (tw > cfg.spin_cap_twice) {
                throw ConfigError("spin " + spin_text(tw) + " exceeds exact.spin_cap " + spin_text(cfg.spin_cap_twice));
            }
        }
        break;
    }
    case Command::wigner:
        if (cfg.spin_twice > cfg.spin_cap_twice) {
            throw ConfigError("model.spin exceeds exact.spin_cap " + spin_text(cfg.spin_cap_twice));
        }
        if (cfg.wigner_grid.n_theta < 2 || cfg.wigner_grid.n_phi < 3) {
            throw ConfigError("wigner grid needs n_theta >= 2 and n_phi >= 3");
        }
        break;
    case Command::mf_trajectory: {
        if (!(cfg.t_final > 0.0)) throw ConfigError("trajectory.t_final must be positive");
        if (!(cfg.sample_dt > 0.0)) throw ConfigError("trajectory.sample_dt must be positive");
        if (!cfg.state0.v.allFinite()) throw ConfigError("trajectory.state0 must be finite");
        if (cfg.state0.shell_deviation() > 1e-6) {
            throw ConfigError("trajectory.state0 is not on the unit spheres (tolerance 1e-6)");
        }
        break;
    }
    case Command::boundaries:
        check_range(cfg.boundary_lambda, "boundaries.lambda");
        check_range(cfg.boundary_J, "boundaries.J");
        break;
    }
}

std::string config_record(const Config& cfg, Command cmd)
{
    json j;
    j["model"] = json{{"gamma", cfg.gamma}, {"g", 1.0}};
    switch (cmd) {
    case Command::mf_sweep: {
        const auto& c = cfg.classify;
        j["grid"] = json{{"J", range_to_json(cfg.J)}, {"lambda", range_to_json(cfg.lambda)}};
        j["meanfield"] = json{{"seeds_per_sphere", c.seeds_per_sphere}, {"window_seeds", c.window_seeds},
                              {"t_transient", c.t_transient},
                              {"t_window", c.t_window},   {"t_align", c.t_align},
                              {"rtol", c.ode.rtol},       {"atol", c.ode.atol},
                              {"lyapunov_tol", c.lyapunov_tol}, {"confirm_factor", c.confirm_factor},
                              {"recurrence_tol", c.recurrence_tol},
                              {"renorm_interval", c.renorm_interval}};
        break;
    }
    case Command::ed_sweep: {
        j["grid"] = json{{"J", range_to_json(cfg.J)}, {"lambda", range_to_json(cfg.lambda)}};
        json spins = json::array();
        const auto list = cfg.ed_spins_twice.empty() ? std::vector<int>{cfg.spin_twice} : cfg.ed_spins_twice;
        for (int tw : list) spins.push_back(0.5 * tw);
        j["exact"] = json{{"spins", spins}};
        break;
    }
    case Command::wigner:
        j["model"]["spin"] = 0.5 * cfg.spin_twice;
        j["point"] = json{{"J", cfg.point_J}, {"lambda", cfg.point_lambda}};
        j["wigner"] = json{{"site", cfg.site == Site::A ? "A" : "B"},
                           {"n_theta", cfg.wigner_grid.n_theta},
                           {"n_phi", cfg.wigner_grid.n_phi}};
        break;
    case Command::mf_trajectory: {
        json s0 = json::array();
        for (int i = 0; i < 6; ++i) s0.push_back(cfg.state0.v[i]);
        j["point"] = json{{"J", cfg.point_J}, {"lambda", cfg.point_lambda}};
        j["trajectory"] = json{{"state0", s0}, {"t_final", cfg.t_final}, {"sample_dt", cfg.sample_dt}};
        j["meanfield"] = json{{"rtol", cfg.classify.ode.rtol}, {"atol", cfg.classify.ode.atol}};
        break;
    }
    case Command::boundaries:
        j["boundaries"] = json{{"lambda", range_to_json(cfg.boundary_lambda)}, {"J", range_to_json(cfg.boundary_J)}};
        break;
    }
    return j.dump();
}

}  // namespace lmgdimer::sweep
