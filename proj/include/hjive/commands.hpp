#pragma once

// Subcommands behind the `jive` executable. Each returns the process exit
// status: 0 success, 1 config or input error, 2 I/O error, 3 degenerate
// numerics.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hjive/errors.hpp"
#include "hjive/weighting.hpp"

namespace hjive {

int exit_code(ErrorKind kind) noexcept;

int cmd_generate(const std::filesystem::path& config, const std::filesystem::path& out_dir,
                 std::ostream& out, std::ostream& err);

struct EstimateRequest {
  std::vector<std::string> views;  // paths or glob patterns
  std::string ranks;               // "r,r1,...,rK"; "r,rk" applies rk to every view
  std::string method = "heterojive";
  std::optional<std::string> weights;  // "w1,...,wK"
  std::optional<std::filesystem::path> truth;
  std::filesystem::path out_dir = ".";
  IterationOptions iteration;
  bool refresh_each_iter = false;
};

int cmd_estimate(const EstimateRequest& request, std::ostream& out, std::ostream& err);

/// Data-driven weights only; writes weights.json.
int cmd_weights(const EstimateRequest& request, std::ostream& out, std::ostream& err);

int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out_dir, unsigned jobs,
                 std::ostream& out, std::ostream& err);

}  // namespace hjive
