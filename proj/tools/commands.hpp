#pragma once

#include <CLI11.hpp>

namespace lh::cli {

// Registers every subcommand on `app`. Callbacks throw lh::Error on failure.
void add_commands(CLI::App& app);

}  // namespace lh::cli
