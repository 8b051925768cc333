#include "mtsim/procedures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "mtsim/errors.hpp"
#include "mtsim/risk_fraction.hpp"

namespace mtsim {

namespace {

void check_level(double q) {
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("q must be in (0,1)");
}

void check_statistics(std::span<const double> statistics) {
  for (double x : statistics) {
    if (!std::isfinite(x)) throw ValidationError("statistics must be finite (no NaN/inf)");
  }
}

// Indices sorted by decreasing key, ties by ascending index.
template <typename Key>
std::vector<std::size_t> descending_order(std::span<const double> statistics, Key key) {
  std::vector<std::size_t> order(statistics.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = key(statistics[a]);
    const double kb = key(statistics[b]);
    return ka > kb || (ka == kb && a < b);
  });
  return order;
}

double identity(double x) { return x; }
double magnitude(double x) { return std::abs(x); }

// Exact sign of q * a - b for integral a, b < 2^53: fma rounds once, and a
// correctly rounded result has the sign of the exact value.
bool scaled_at_least(double q, double a, double b) { return std::fma(q, a, -b) >= 0.0; }

Decision make_decision(Procedure procedure, std::span<const double> statistics, double tau) {
  Decision d;
  d.procedure = procedure;
  d.threshold = tau;
  d.rejected = rejection_set(statistics, tau);
  return d;
}

}  // namespace

std::string to_string(Procedure procedure) {
  switch (procedure) {
    case Procedure::BH: return "bh";
    case Procedure::BC: return "bc";
    case Procedure::CusumSign: return "cusum";
    case Procedure::Oracle: return "oracle";
  }
  return "unknown";
}

Procedure parse_procedure(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "bh") return Procedure::BH;
  if (lower == "bc") return Procedure::BC;
  if (lower == "cusum" || lower == "cusum-sign" || lower == "cusumsign") {
    return Procedure::CusumSign;
  }
  if (lower == "oracle") return Procedure::Oracle;
  throw ValidationError("unknown procedure '" + name + "' (expected bh, bc, cusum, oracle)");
}

IndexSet rejection_set(std::span<const double> statistics, double tau) {
  IndexSet out;
  for (std::size_t i = 0; i < statistics.size(); ++i) {
    if (statistics[i] >= tau) out.push_back(i);
  }
  return out;
}

double empirical_survival(std::span<const double> statistics, double t) {
  if (statistics.empty()) return 0.0;
  const auto count = std::count_if(statistics.begin(), statistics.end(),
                                   [t](double x) { return x >= t; });
  return static_cast<double>(count) / static_cast<double>(statistics.size());
}

Decision bh(std::span<const double> statistics, const NullModel& null_model, double q) {
  check_level(q);
  check_statistics(statistics);
  const auto order = descending_order(statistics, identity);
  const auto n = static_cast<double>(statistics.size());

  std::size_t iota = 0;
  for (std::size_t i = 1; i <= order.size(); ++i) {
    const double p = null_model.survival(statistics[order[i - 1]]);
    if (p <= static_cast<double>(i) * q / n) iota = i;
  }

  const double tau = iota == 0 ? kRejectNothing : statistics[order[iota - 1]];
  Decision d = make_decision(Procedure::BH, statistics, tau);
  d.diagnostics["iota"] = static_cast<double>(iota);
  return d;
}

double fdp_hat(std::span<const double> statistics, double t) {
  if (!(t >= 0.0)) throw ValidationError("fdp_hat requires t >= 0");
  std::size_t below = 0;
  std::size_t above = 0;
  for (double x : statistics) {
    if (x <= -t) ++below;
    if (x >= t) ++above;
  }
  return static_cast<double>(1 + below) / static_cast<double>(std::max<std::size_t>(1, above));
}

Decision bc(std::span<const double> statistics, double q, BcDomain domain) {
  check_level(q);
  check_statistics(statistics);
  auto order = descending_order(statistics, magnitude);
  std::erase_if(order, [&](std::size_t i) { return statistics[i] == 0.0; });

  // Walk |X| downwards one tie group at a time; after a group ending at k,
  // the counts are those of fdp_hat(|X|_(k)).
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t iota = 0;        // group end of the smallest feasible t
  std::size_t next_group = 0;  // first position after that group
  double best_ratio = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double t = std::abs(statistics[order[k]]);
    std::size_t end = k;
    while (end < order.size() && std::abs(statistics[order[end]]) == t) {
      (statistics[order[end]] > 0 ? positives : negatives) += 1;
      ++end;
    }
    const double denominator = static_cast<double>(std::max<std::size_t>(1, positives));
    const double numerator = static_cast<double>(1 + negatives);
    if (scaled_at_least(q, denominator, numerator)) {
      iota = end;
      next_group = end;
      best_ratio = numerator / denominator;
    }
    k = end;
  }

  double tau = kRejectNothing;
  if (iota > 0) {
    tau = std::abs(statistics[order[iota - 1]]);
    if (domain == BcDomain::AllThresholds && next_group < order.size()) {
      tau = std::abs(statistics[order[next_group]]);
    }
  }
  Decision d = make_decision(Procedure::BC, statistics, tau);
  d.diagnostics["iota"] = static_cast<double>(iota);
  if (iota > 0) d.diagnostics["fdp_hat"] = best_ratio;
  return d;
}

SignSequence sign_sequence(std::span<const double> statistics) {
  check_statistics(statistics);
  SignSequence seq;
  seq.order = descending_order(statistics, magnitude);
  seq.signs.reserve(statistics.size());
  seq.partial_sums.reserve(statistics.size());
  std::int64_t sum = 0;
  for (auto i : seq.order) {
    const double x = statistics[i];
    if (x == 0.0) throw ValidationError("sign sequence requires nonzero statistics");
    const std::int8_t s = x > 0 ? 1 : -1;
    sum += s;
    seq.signs.push_back(s);
    seq.partial_sums.push_back(sum);
  }
  return seq;
}

Decision cusum_sign(std::span<const double> statistics, double q) {
  check_level(q);
  const SignSequence seq = sign_sequence(statistics);

  // S_i >= i (1-q)/(1+q)  <=>  q (S_i + i) >= i - S_i.
  std::size_t iota = 0;
  for (std::size_t i = 1; i <= seq.partial_sums.size(); ++i) {
    const auto s = seq.partial_sums[i - 1];
    const auto k = static_cast<std::int64_t>(i);
    if (scaled_at_least(q, static_cast<double>(s + k), static_cast<double>(k - s))) iota = i;
  }

  const double tau = iota == 0 ? kRejectNothing : std::abs(statistics[seq.order[iota - 1]]);
  Decision d = make_decision(Procedure::CusumSign, statistics, tau);
  d.diagnostics["iota"] = static_cast<double>(iota);
  if (iota > 0) d.diagnostics["partial_sum"] = static_cast<double>(seq.partial_sums[iota - 1]);
  return d;
}

Decision oracle_threshold(std::span<const double> statistics, const IndexSet& false_nulls) {
  std::vector<char> is_false(statistics.size(), 0);
  for (auto i : false_nulls) is_false.at(i) = 1;
  const std::size_t m = false_nulls.size();
  const auto order = descending_order(statistics, identity);

  // Candidate +inf: nothing rejected.
  double best_tau = kRejectNothing;
  RiskFraction best(0, 0, m, m);
  std::size_t best_count = 0;

  std::size_t rejected = 0;
  std::size_t true_hits = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double t = statistics[order[k]];
    while (k < order.size() && statistics[order[k]] == t) {
      true_hits += is_false[order[k]];
      ++rejected;
      ++k;
    }
    const RiskFraction risk(rejected, rejected - true_hits, m, m - true_hits);
    if (risk < best) {
      best = risk;
      best_tau = t;
      best_count = rejected;
    }
  }

  Decision d = make_decision(Procedure::Oracle, statistics, best_tau);
  d.diagnostics["objective"] = best.value();
  d.diagnostics["num_rejections"] = static_cast<double>(best_count);
  return d;
}

Decision oracle_threshold(const Dataset& dataset) {
  return oracle_threshold(dataset.statistics, dataset.false_nulls);
}

Decision apply(Procedure procedure, const Dataset& dataset, const NullModel& null_model,
               double q) {
  switch (procedure) {
    case Procedure::BH:
      return bh(dataset.statistics, null_model, q);
    case Procedure::BC:
      return bc(dataset.statistics, q);
    case Procedure::Oracle:
      return oracle_threshold(dataset);
    case Procedure::CusumSign:
      break;
  }
  const auto& x = dataset.statistics;
  if (std::find(x.begin(), x.end(), 0.0) == x.end()) return cusum_sign(x, q);

  std::vector<double> kept;
  std::vector<std::size_t> origin;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) {
      kept.push_back(x[i]);
      origin.push_back(i);
    }
  }
  Decision d = cusum_sign(kept, q);
  for (auto& i : d.rejected) i = origin[i];
  return d;
}

}  // namespace mtsim
