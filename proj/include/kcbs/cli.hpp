#pragma once

// Command layer behind the `kcbs` executable. Each command takes parsed JSON
// input and returns a report plus the process exit code, so the same code
// paths are reachable from tests without spawning processes.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace kcbs::cli {

using nlohmann::json;

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kBadInput = 2,
    kInfeasible = 3,
    kIndeterminate = 4,
};

struct Options {
    std::string mode = "exact";  // exact | float
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    bool normalize = false;
    std::string format = "json";  // json | csv
};

struct CommandResult {
    int exit_code = kOk;
    json report;
    /// Populated when the command produces a table and csv output was requested.
    std::string csv;
};

/// {"state": ..., "pentagram": ...}. The pentagram is {"legs": ...}, chain
/// parameters, {"regular": {"axis": [...], "chi": x}}, or "regular" (about z, the default).
CommandResult cmd_eval(const json& input, const Options& opt);

/// A marginal model, {"state": ..., "pentagram": ...}, or
/// {"structure": {...}, "joint": {...}}. Exit 0 feasible, 3 infeasible, 4 indeterminate.
CommandResult cmd_certify(const json& input, const Options& opt);

/// Structure name ("pentagram5", "chsh", "pair") or a structure object.
CommandResult cmd_cone(const json& structure, const Options& opt);

/// {"ray": ..., "model": ...}: expectation of a cone element under a model.
CommandResult cmd_expect(const json& input, const Options& opt);

/// {"state": ..., "config": {...}} or {"grid": [c...], "config": {...}}.
CommandResult cmd_search(const json& input, const Options& opt);

/// action is plan | simulate | sweep.
CommandResult cmd_biphoton(const std::string& action, const json& input, const Options& opt);

/// Reads --input: inline JSON when it starts with '{' or '[', a file path otherwise.
json load_input(const std::string& arg);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace kcbs::cli
