#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hma {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNonConvergence = 3,
  kExitIo = 4,
  kExitCheckFailure = 5,
  kExitKernelDegeneracy = 6,
};

/// Command-line overrides applied on top of the scenario.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<long> trials;
  std::vector<std::string> checks;
};

// Each command writes progress to `out` and a single "error[class]: message"
// line to `err` on failure, returning the exit code.

/// Writes phi.hmaf, summary.json, iterations.csv and a copy of the config.
int run_solve(const std::filesystem::path& config, const std::filesystem::path& out_dir, const Overrides& ov,
              std::ostream& out, std::ostream& err);

/// Reads phi and b from a solve directory and writes diagnostics.json and diagnostics.txt there.
int run_diagnose(const std::filesystem::path& config, const std::filesystem::path& solution_dir, const Overrides& ov,
                 std::ostream& out, std::ostream& err);

/// Writes u.hmaf and gauduchon.json.
int run_gauduchon(const std::filesystem::path& config, const std::filesystem::path& out_dir, const Overrides& ov,
                  std::ostream& out, std::ostream& err);

/// kind: "moser", "residual", or "slice:xA=i,xB=j,..." fixing all but two axes
/// by grid index. Writes <kind-stem>.csv into the solution directory.
int emit_plotdata(const std::filesystem::path& solution_dir, const std::string& kind, std::ostream& out,
                  std::ostream& err);

/// Standalone pointwise-inequality sampler; writes pointwise.json when out_dir is non-empty.
int run_verify_pointwise(int n, long trials, double eps, std::uint64_t seed, const std::filesystem::path& out_dir,
                         std::ostream& out, std::ostream& err);

/// File name emit_plotdata uses for a kind.
std::string plotdata_file_name(const std::string& kind);

}  // namespace hma
