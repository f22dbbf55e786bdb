#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hma/diagnostics.hpp"
#include "hma/gauduchon.hpp"
#include "hma/hermitian.hpp"
#include "hma/ma_solver.hpp"

namespace hma {

/// Invalid or inconsistent scenario; key() is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// c cos(k.x) + s sin(k.x).
struct TrigMode {
  std::vector<int> k;
  double c = 0.0;
  double s = 0.0;
};

/// C cos(k.x) + S sin(k.x) with Hermitian C, S.
struct MatrixMode {
  std::vector<int> k;
  HMat c;
  HMat s;
};

enum class MetricFamily { flat_kahler, kahler_potential, conformal_kahler, hermitian_perturbed };

struct MetricSpec {
  MetricFamily family = MetricFamily::flat_kahler;
  HMat base;                            // constant Hermitian part, identity by default
  std::vector<TrigMode> potential;      // rho: adds ddbar rho
  std::vector<TrigMode> conformal;      // v: multiplies by e^v
  std::vector<MatrixMode> perturbation;
};

struct FSpec {
  std::vector<TrigMode> modes;
  /// When nonempty, F = manufacture(metric, phi*) and the modes above are ignored.
  std::vector<TrigMode> manufactured;
  bool sup_zero = false;
  double shift = 0.0;                   // added after normalization
};

struct Scenario {
  std::string name;
  int n = 2;
  std::vector<int> sizes;
  MetricSpec metric;
  FSpec f;
  SolveOptions solve;
  std::vector<TrigMode> initial_guess;
  GauduchonOptions gauduchon;
  DiagnosticsOptions diagnostics;
  std::vector<std::string> checks;      // empty: all
  std::uint64_t seed = 1;

  TorusGrid grid() const;
  /// Throws ConfigError("metric", ...) when the field is not positive definite.
  HermitianField build_metric() const;
  ScalarField build_f(const HermitianField& metric) const;
  std::optional<ScalarField> phi_star() const;
  SolveOptions solve_options() const;
};

ScalarField evaluate_modes(const TorusGrid& grid, const std::vector<TrigMode>& modes);

/// Parses and validates a JSON scenario (including the metric positivity check).
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

const char* family_name(MetricFamily f);

}  // namespace hma
