#pragma once

#include <functional>
#include <stdexcept>

#include <CLI11.hpp>

namespace forestfire::cli {

// Bad flag values found after parsing; exits with status 2 like a parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Action = std::function<int()>;

// Each registers a subcommand and returns the action to run once it is selected.
Action add_keygen(CLI::App& app);
Action add_simulate(CLI::App& app);
Action add_replay(CLI::App& app);
Action add_serve(CLI::App& app);
Action add_report(CLI::App& app);

}  // namespace forestfire::cli
