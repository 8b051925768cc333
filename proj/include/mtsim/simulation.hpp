#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtsim/distributions.hpp"
#include "mtsim/metrics.hpp"
#include "mtsim/model.hpp"
#include "mtsim/procedures.hpp"

namespace mtsim {

inline constexpr const char* kLibraryVersion = "1.0.0";

/// FDR level per cell: a fixed q, or q_n = 1/ln(n).
struct QPolicy {
  enum class Kind { Fixed, LogSchedule };
  Kind kind = Kind::Fixed;
  double q = 0.05;

  static QPolicy fixed(double q) { return {Kind::Fixed, q}; }
  static QPolicy log_schedule() { return {Kind::LogSchedule, 0.0}; }
};

double resolve_q(const QPolicy& policy, std::size_t n);

struct SweepConfig {
  std::vector<NullModel> null_models{NullModel::normal()};
  std::vector<std::size_t> n_values;
  std::vector<double> beta_values;
  std::vector<double> r_values;
  QPolicy q_policy;
  std::vector<Procedure> procedures;
  std::size_t replicates = 1;
  std::uint64_t base_seed = 0;
  std::size_t parallelism = 1;
  /// Preset name echoed into the manifest; empty for ad-hoc sweeps.
  std::string figure;
  std::string description;

  /// Throws ValidationError naming the first offending field.
  void validate() const;
  /// Cells in canonical order: model, then n, then beta, then r.
  std::vector<ExperimentCell> cells() const;
};

struct ResultRow {
  ExperimentCell cell;
  double q = 0.0;
  Procedure procedure = Procedure::BH;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  double threshold = kRejectNothing;
  MetricsRecord metrics;
};

struct AggregateRow {
  ExperimentCell cell;
  double q = 0.0;
  Procedure procedure = Procedure::BH;
  AggregateRecord summary;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;
};

/// One work unit: a single dataset drawn from the (cell, replicate) stream,
/// evaluated by every procedure in order.
std::vector<ResultRow> run_replicate(const ExperimentCell& cell,
                                     std::span<const Procedure> procedures, double q,
                                     std::size_t replicate, std::uint64_t base_seed);

/// All replicates of one cell, replicate-major.
std::vector<ResultRow> run_cell(const ExperimentCell& cell, std::span<const Procedure> procedures,
                                double q, std::size_t replicates, std::uint64_t base_seed);

/// Groups rows by (cell, procedure) in first-appearance order.
std::vector<AggregateRow> aggregate_rows(std::span<const ResultRow> rows);

/// Parallel over (cell, replicate); the result does not depend on
/// config.parallelism.
SweepResult run_sweep(const SweepConfig& config);

// Serialization.

std::string results_csv(std::span<const ResultRow> rows);
/// With boundary_columns, appends `boundary_r,detection_rho` (the latter
/// empty where beta <= 1/2).
std::string aggregate_csv(std::span<const AggregateRow> rows, bool boundary_columns = false);
nlohmann::ordered_json results_json(std::span<const ResultRow> rows);
nlohmann::ordered_json aggregate_json(std::span<const AggregateRow> rows);

nlohmann::ordered_json config_to_json(const SweepConfig& config);
/// Inverse of config_to_json; `parallelism` is not part of the schema and is
/// left at its default.
SweepConfig config_from_json(const nlohmann::json& doc);

struct OutputOptions {
  bool boundary_columns = false;
};

/// Writes results.csv, aggregate.csv, results.json, aggregate.json and
/// manifest.json into `dir` (created if needed). Files are staged and
/// renamed; on failure nothing new is left behind. Throws std::runtime_error.
void write_outputs(const SweepResult& result, const SweepConfig& config,
                   const std::filesystem::path& dir, const OutputOptions& options = {});

/// Boundary overlay table `beta,multiple_testing_boundary,detection_boundary`
/// on an evenly spaced beta grid in (0,1).
std::string boundaries_csv(std::size_t points);

}  // namespace mtsim
