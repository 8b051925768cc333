#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mtsim/distributions.hpp"
#include "mtsim/random.hpp"

namespace mtsim {

/// Indices are zero-based throughout the library.
using IndexSet = std::vector<std::size_t>;

/// One point of the sparse two-group location model: m = floor(n^(1-beta))
/// false nulls shifted by mu = (gamma r log n)^(1/gamma).
struct ExperimentCell {
  NullModel null_model = NullModel::normal();
  std::size_t n = 0;
  double beta = 0.0;
  double r = 0.0;
  std::size_t m = 0;
  double mu = 0.0;
  double epsilon = 0.0;

  /// Canonical text key used for stream derivation, e.g.
  /// "model=normal;gamma=2;scale=1;n=10000;beta=0.5;r=0.9".
  std::string id() const;
};

/// Validates (n, beta, r) and fills in the derived fields.
ExperimentCell derive_cell(const NullModel& null_model, std::size_t n, double beta, double r);

/// Copy of `cell` with mu replaced; for calibration tests that need a shift
/// decoupled from r (mu = 0 gives a pure-null dataset).
ExperimentCell with_mu_override(ExperimentCell cell, double mu);

struct Dataset {
  std::vector<double> statistics;
  IndexSet false_nulls;  // sorted ascending
};

/// Draws n nulls, picks a uniform m-subset as false nulls and shifts those
/// by mu. Deterministic given the stream state.
Dataset generate(const ExperimentCell& cell, RandomStream& rng);

/// Debug dump: `index,statistic,is_false_null`, 17 significant digits.
std::string dataset_to_csv(const Dataset& dataset);

/// Formats a double with 17 significant digits (round-trips exactly);
/// infinities become `inf` / `-inf`.
std::string format_real(double value);

}  // namespace mtsim
