// lmg-sweep: command-line front end for the mean-field and exact solvers.
//
// Exit codes: 0 success (possibly with flagged rows), 2 configuration
// error, 3 numerical failure that aborted the run.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "lmgdimer/sweep.hpp"

namespace {

namespace sw = lmgdimer::sweep;

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Overrides {
    std::string config_path;
    std::optional<double> gamma;
    std::optional<double> spin;
    std::optional<std::string> out;
    std::optional<int> threads;
    std::optional<int> memory_cap_mb;
    std::optional<double> J;
    std::optional<double> lambda;
};

void add_common(CLI::App* sub, Overrides& o, bool point)
{
    sub->add_option("-c,--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--gamma", o.gamma, "dissipation rate in units of g");
    sub->add_option("--spin", o.spin, "spin length S (half-integer)");
    sub->add_option("-o,--out", o.out, "output CSV path, '-' for stdout");
    sub->add_option("--threads", o.threads, "worker threads (fallback: LMG_THREADS)");
    sub->add_option("--memory-cap", o.memory_cap_mb, "memory cap for exact sweeps in MB");
    if (point) {
        sub->add_option("--J", o.J, "nonlinearity J/g at the single point");
        sub->add_option("--lambda", o.lambda, "coupling lambda/g at the single point");
    }
}

std::optional<int> threads_from_env()
{
    const char* env = std::getenv("LMG_THREADS");
    if (!env || !*env) return std::nullopt;
    try {
        std::size_t used = 0;
        const int n = std::stoi(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing text");
        return n;
    } catch (const std::exception&) {
        throw sw::ConfigError(std::string("LMG_THREADS is not an integer: '") + env + "'");
    }
}

sw::Config resolve(const Overrides& o)
{
    sw::Config cfg = o.config_path.empty() ? sw::Config{} : sw::load_config(o.config_path);
    if (o.gamma) cfg.gamma = *o.gamma;
    if (o.spin) {
        try {
            cfg.spin_twice = lmgdimer::SpinLength::from_value(*o.spin).twice();
        } catch (const std::invalid_argument&) {
            throw sw::ConfigError("--spin must be a positive half-integer");
        }
        cfg.ed_spins_twice.clear();
    }
    if (o.out) cfg.out_path = *o.out;
    if (o.threads) {
        cfg.threads = *o.threads;
    } else if (auto env = threads_from_env()) {
        cfg.threads = *env;
    }
    if (o.memory_cap_mb) {
        if (*o.memory_cap_mb < 1) throw sw::ConfigError("--memory-cap must be positive");
        cfg.memory_cap_mb = static_cast<std::size_t>(*o.memory_cap_mb);
    }
    if (o.J) cfg.point_J = *o.J;
    if (o.lambda) cfg.point_lambda = *o.lambda;
    return cfg;
}

int execute(sw::Command cmd, const Overrides& o)
{
    try {
        const sw::Config cfg = resolve(o);
        sw::validate(cfg, cmd);
        sw::RunSummary summary;
        if (cfg.out_path == "-") {
            summary = sw::run(cmd, cfg, std::cout);
        } else {
            // Write to memory first so a failed run leaves no partial file.
            std::ostringstream buffer;
            summary = sw::run(cmd, cfg, buffer);
            std::ofstream file(cfg.out_path, std::ios::binary);
            if (!file) throw sw::ConfigError("cannot open output file '" + cfg.out_path + "'");
            file << buffer.str();
            if (!file) throw sw::ConfigError("failed writing '" + cfg.out_path + "'");
        }
        if (summary.flagged > 0) {
            std::cerr << "lmg-sweep: " << summary.flagged << " of " << summary.rows
                      << " rows flagged (unresolved or degenerate)\n";
        }
        return 0;
    } catch (const sw::ConfigError& e) {
        std::cerr << "lmg-sweep: configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const sw::NumericalError& e) {
        std::cerr << "lmg-sweep: numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "lmg-sweep: numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mean-field and exact steady states of the dissipative LMG dimer"};
    app.set_version_flag("--version", std::string("lmg-sweep ") + sw::version());
    app.require_subcommand(1);

    struct Sub {
        sw::Command cmd;
        const char* help;
        bool point;
    };
    const Sub subs[] = {
        {sw::Command::mf_sweep, "classify mean-field attractors over a (J, lambda) grid", false},
        {sw::Command::ed_sweep, "exact steady-state observables over a (J, lambda) grid", false},
        {sw::Command::boundaries, "tabulate the analytic phase boundaries", false},
        {sw::Command::wigner, "spin Wigner function of one site's steady state", true},
        {sw::Command::mf_trajectory, "sampled mean-field trajectory from a given state", true},
    };

    Overrides overrides;
    std::optional<sw::Command> chosen;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(sw::to_string(s.cmd), s.help);
        add_common(sub, overrides, s.point);
        sub->callback([&chosen, cmd = s.cmd] { chosen = cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    return execute(*chosen, overrides);
}
