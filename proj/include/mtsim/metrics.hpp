#pragma once

#include <cstddef>
#include <span>

#include "mtsim/model.hpp"
#include "mtsim/procedures.hpp"
#include "mtsim/risk_fraction.hpp"

namespace mtsim {

/// Error proportions of one realization; 0/0 is taken as 0 in both.
struct MetricsRecord {
  double fdp = 0.0;
  double fnp = 0.0;
  std::size_t num_rejections = 0;
  std::size_t num_false_nulls = 0;
  std::size_t false_discoveries = 0;  // |R \ F|
  std::size_t missed = 0;             // |F \ R|

  RiskFraction risk() const {
    return {num_rejections, false_discoveries, num_false_nulls, missed};
  }
};

/// Monte Carlo estimates over the replicates of one cell.
struct AggregateRecord {
  double fdr = 0.0;
  double fnr = 0.0;
  double risk = 0.0;
  double se_fdp = 0.0;
  double se_fnp = 0.0;
  std::size_t replicates = 0;
  double zero_rejection_fraction = 0.0;
};

/// `n` bounds the valid indices of both sets.
MetricsRecord evaluate(const IndexSet& rejected, const IndexSet& truth, std::size_t n);
MetricsRecord evaluate(const Decision& decision, const Dataset& dataset);

/// Sample standard errors use the (reps - 1) divisor; zero for one record.
AggregateRecord aggregate(std::span<const MetricsRecord> records);

}  // namespace mtsim
