#include "mtsim/metrics.hpp"

#include <cmath>
#include <vector>

#include "mtsim/errors.hpp"

namespace mtsim {

namespace {

std::vector<char> membership(const IndexSet& set, std::size_t n, const char* what) {
  std::vector<char> in(n, 0);
  for (auto i : set) {
    if (i >= n) throw ValidationError(std::string(what) + " index out of bounds");
    if (in[i]) throw ValidationError(std::string(what) + " contains a duplicate index");
    in[i] = 1;
  }
  return in;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_and_se(std::span<const MetricsRecord> records, double MetricsRecord::*field) {
  const auto reps = static_cast<double>(records.size());
  double sum = 0.0;
  for (const auto& r : records) sum += r.*field;
  const double mean = sum / reps;
  if (records.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const auto& r : records) {
    const double d = r.*field - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps)};
}

}  // namespace

MetricsRecord evaluate(const IndexSet& rejected, const IndexSet& truth, std::size_t n) {
  const auto is_false = membership(truth, n, "truth");
  membership(rejected, n, "rejected");
  MetricsRecord rec;
  rec.num_rejections = rejected.size();
  rec.num_false_nulls = truth.size();
  std::size_t hits = 0;
  for (auto i : rejected) hits += is_false[i];
  rec.false_discoveries = rejected.size() - hits;
  rec.missed = truth.size() - hits;
  rec.fdp = ratio(rec.false_discoveries, rec.num_rejections);
  rec.fnp = ratio(rec.missed, rec.num_false_nulls);
  return rec;
}

MetricsRecord evaluate(const Decision& decision, const Dataset& dataset) {
  return evaluate(decision.rejected, dataset.false_nulls, dataset.statistics.size());
}

AggregateRecord aggregate(std::span<const MetricsRecord> records) {
  if (records.empty()) throw ValidationError("aggregate requires at least one record");
  const auto fdp = mean_and_se(records, &MetricsRecord::fdp);
  const auto fnp = mean_and_se(records, &MetricsRecord::fnp);
  AggregateRecord agg;
  agg.fdr = fdp.mean;
  agg.fnr = fnp.mean;
  agg.risk = agg.fdr + agg.fnr;
  agg.se_fdp = fdp.se;
  agg.se_fnp = fnp.se;
  agg.replicates = records.size();
  std::size_t empty = 0;
  for (const auto& r : records) empty += r.num_rejections == 0;
  agg.zero_rejection_fraction = ratio(empty, records.size());
  return agg;
}

}  // namespace mtsim
