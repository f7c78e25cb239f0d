#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgad/cli/config.hpp"
#include "sgad/linalg.hpp"

namespace sgad::cli {

/// Exit statuses of `execute`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Zoo point by name (m1, m2, m3, s, s1, s2) at its quoted four decimals.
/// "example2-slowfast" shares the points of its closed-form average.
Vector reference_point(const std::string& model, const std::string& name);

/// reference_point Newton-refined on the deterministic model.
Vector named_point(const std::string& model, const std::string& name);

/// Saddles of a zoo model, by name.
std::vector<std::string> saddle_names(const std::string& model);

/// Runs one configured command, writes its outputs and "run.manifest" under
/// output_dir and returns kExitOk, kExitNotConverged or kExitError. Progress goes
/// to `log`. Module errors propagate as exceptions.
int execute(const RunConfig& cfg, std::ostream& log);

}  // namespace sgad::cli
