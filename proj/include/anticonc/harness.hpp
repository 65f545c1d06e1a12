#pragma once

// Experiment orchestration: coupled replicates, certificates and reports.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "anticonc/coupling.hpp"

namespace anticonc {

enum class Model {
  Bernoulli,
  EuclideanTsp,
  EuclideanMatching,
  EuclideanRhee,
  SkFreeEnergy,
  SkGroundState,
  FppGraded,
  FppCorridor,
  Assignment,
  MatrixWigner,
  MatrixCovariance,
};

std::string_view to_string(Model model);
Model model_from_string(std::string_view name);
const std::vector<Model>& all_models();

inline constexpr double kSweepMultipliers[] = {0.02, 0.05, 0.1, 0.2, 0.5};

struct ExperimentConfig {
  Model model = Model::Bernoulli;
  std::size_t n = 0;  // 0 selects the model default; matrix order N for matrix-wigner
  std::size_t p = 0;  // matrix-covariance dimension
  double alpha = 0.5;
  double beta = 1.0;  // SK inverse temperature; Rhee mixing strength
  double delta_multiplier = 0.1;
  std::size_t samples = 1000;
  double confidence = 0.95;
  std::uint64_t seed = 1;
  std::string density;     // empty selects the model default
  std::string functional;  // euclidean models; empty selects the default
  double slack = 0.01;     // fpp-corridor exponent slack
  std::size_t m = 0;       // fpp-graded edges in the lower bound; 0 selects floor(distance / 2)
  bool sweep = false;
  unsigned threads = 0;  // 0 uses the hardware concurrency
  std::string report_path;
  std::string csv_path;

  /// Fills model defaults for n, p, density and functional.
  ExperimentConfig resolved() const;
  /// Throws ConfigError (or a subclass) on any invariant or size-cap failure.
  void validate() const;
};

/// Applies "key=value" pairs (keys as in the CLI flags, without dashes).
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Reads a key=value file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// delta = multiplier * fluctuation_scale(cfg) for a resolved config.
double fluctuation_scale(const ExperimentConfig& cfg);

struct GapStats {
  double min = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;
  std::size_t witness_replicate = 0;  // replicate attaining the smallest |X - Y|
  double witness_x = 0.0;
  double witness_y = 0.0;
  bool operator==(const GapStats&) const = default;
};

struct TvDecomposition {
  double value = 0.0;
  double per_coordinate_affinity = 1.0;
  double coordinate_count = 0.0;
  std::string method;
  bool operator==(const TvDecomposition&) const = default;
};

struct SweepPoint {
  double multiplier = 0.0;
  double delta = 0.0;
  double p_close_hat = 0.0;
  double bound = 1.0;
  double concentration = 0.0;
  bool operator==(const SweepPoint&) const = default;
};

struct ConcentrationReport {
  double delta = 0.0;
  double value = 0.0;             // empirical sup-interval probability at delta
  double bound_plus_slack = 1.0;  // certificate bound + 2 slack
  bool within_bound = true;
  bool operator==(const ConcentrationReport&) const = default;
};

struct ViolationReport {
  std::size_t count = 0;
  std::size_t checks = 0;
  std::vector<std::string> details;
  bool operator==(const ViolationReport&) const = default;
};

struct ExperimentReport {
  ExperimentConfig config;
  double fluctuation_scale = 1.0;
  GapStats gaps;
  TvDecomposition tv;
  CouplingCertificate certificate;
  std::vector<SweepPoint> sweep;
  ConcentrationReport concentration;
  ViolationReport violations;
  std::map<std::string, double> statistics;
  double wall_clock_seconds = 0.0;
  std::string version;
};

struct Experiment {
  ExperimentReport report;
  std::vector<double> x;  // per replicate
  std::vector<double> y;
};

/// Runs cfg.samples coupled replicates. Replicate r draws from
/// SeedStream(cfg.seed, r). A failed exact per-sample check raises
/// ViolationError after all replicates finish.
Experiment run(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

/// Field-for-field equality, optionally ignoring the wall-clock field.
bool same_report(const ExperimentReport& a, const ExperimentReport& b, bool ignore_wall_clock = true);

void emit_report(const ExperimentReport& report, const std::filesystem::path& path);
ExperimentReport read_report(const std::filesystem::path& path);

/// Rows "replicate,x,y,gap".
void dump_csv(const Experiment& exp, const std::filesystem::path& path);

}  // namespace anticonc
