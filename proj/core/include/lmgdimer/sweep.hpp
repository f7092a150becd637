// sweep.hpp: run configuration and the commands behind the lmg-sweep tool.
//
// Configurations are JSON documents (see configs/ in the repository for
// complete examples). Every command writes a CSV whose first line is a
// '#'-prefixed record of the version and the effective configuration,
// followed by a header row.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmgdimer/liouville.hpp"
#include "lmgdimer/meanfield.hpp"
#include "lmgdimer/wigner.hpp"

namespace lmgdimer::sweep {

/// Library version, e.g. "0.1.0".
const char* version();

/// Bad or inconsistent configuration (exit code 2 in the CLI).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure that makes the requested output meaningless (exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `points` evenly spaced values from min to max inclusive; one point means {min}.
struct Range {
    double min{0.0};
    double max{0.0};
    int points{1};

    static Range fixed(double v) { return Range{v, v, 1}; }
    std::vector<double> values() const;
};

enum class Command { mf_sweep, ed_sweep, boundaries, wigner, mf_trajectory };

const char* to_string(Command c);
std::optional<Command> command_from_string(const std::string& name);

/// Which solvers a configuration is meant for; a command outside the engine is a config error.
enum class Engine { meanfield, exact, both };

const char* to_string(Engine e);

struct Config {
    Engine engine{Engine::both};

    // model
    double gamma{0.5};
    int spin_twice{2};  // 2S

    // grid for the sweeps; row order is J outer, lambda inner
    Range J{-2.0, 2.0, 41};
    Range lambda{0.0, 1.0, 41};

    // meanfield
    ClassifyOptions classify{};

    // exact
    int spin_cap_twice{8};
    std::vector<int> ed_spins_twice{};  // empty: use spin_twice

    // single parameter point for wigner and mf-trajectory
    double point_J{0.0};
    double point_lambda{0.0};

    // wigner
    Site site{Site::B};
    GridSpec wigner_grid{};

    // trajectory
    BlochPair state0{0.6, 0.0, -0.8, 0.6, 0.0, 0.8};
    double t_final{100.0};
    double sample_dt{0.1};

    // boundaries
    Range boundary_lambda{0.0, 1.0, 21};
    Range boundary_J{-1.0, 1.0, 21};

    // output and execution; not part of the recorded metadata
    std::string out_path{"-"};
    int threads{1};
    std::size_t memory_cap_mb{2048};
};

/// Parses a JSON document on top of the defaults. Unknown keys, wrong types
/// and out-of-range values raise ConfigError.
Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);

/// Re-checks invariants after command-line overrides; throws ConfigError.
void validate(const Config& cfg, Command cmd);

/// Compact JSON of every field that affects the output of `cmd`.
std::string config_record(const Config& cfg, Command cmd);

/// Shortest round-trip decimal text of a double.
std::string format_number(double v);

struct RunSummary {
    std::size_t rows{0};
    std::size_t flagged{0};  // unresolved or degenerate rows
};

/// Runs one command and writes its CSV to `out`. Throws ConfigError or
/// NumericalError.
RunSummary run(Command cmd, const Config& cfg, std::ostream& out);

/// Worker count for exact sweeps: min(threads, memory cap / per-point size), at least 1.
int exact_worker_width(const Config& cfg);

}  // namespace lmgdimer::sweep
