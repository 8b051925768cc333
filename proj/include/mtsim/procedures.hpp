#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mtsim/distributions.hpp"
#include "mtsim/model.hpp"

namespace mtsim {

enum class Procedure { BH, BC, CusumSign, Oracle };

/// bh, bc, cusum, oracle
std::string to_string(Procedure procedure);
/// Accepts the names produced by to_string (case-insensitive); throws
/// ValidationError otherwise.
Procedure parse_procedure(const std::string& name);

constexpr double kRejectNothing = std::numeric_limits<double>::infinity();

/// Output of a threshold procedure: rejected = {i : X_i >= threshold}.
struct Decision {
  Procedure procedure = Procedure::BH;
  double threshold = kRejectNothing;
  IndexSet rejected;  // ascending
  std::map<std::string, double> diagnostics;
};

/// {i : statistics[i] >= tau}, ascending.
IndexSet rejection_set(std::span<const double> statistics, double tau);

/// Fraction of statistics >= t.
double empirical_survival(std::span<const double> statistics, double t);

/// Benjamini-Hochberg step-up on the P-values survival(X_i).
Decision bh(std::span<const double> statistics, const NullModel& null_model, double q);

/// Where the BC infimum ranges: over the sample absolute values only, or
/// over all t >= 0 (at most one extra rejection).
enum class BcDomain { AbsoluteValues, AllThresholds };

/// Barber-Candes: smallest t among |X| whose estimated FDP is <= q. Exact
/// zeros are ignored and never rejected. Does not use the null model.
Decision bc(std::span<const double> statistics, double q,
            BcDomain domain = BcDomain::AbsoluteValues);

/// (1 + #{X_i <= -t}) / max(1, #{X_i >= t}); t must be >= 0.
double fdp_hat(std::span<const double> statistics, double t);

/// Signs of the statistics ordered by decreasing |X| (ties by index) and
/// their running sums.
struct SignSequence {
  std::vector<std::size_t> order;  // original indices, decreasing |X|
  std::vector<std::int8_t> signs;
  std::vector<std::int64_t> partial_sums;
};

/// Throws ValidationError on a zero statistic.
SignSequence sign_sequence(std::span<const double> statistics);

/// CUSUM-of-signs rule: iota = max{i : S_i >= i (1-q)/(1+q)}, threshold
/// |X|_(iota). Zero statistics are rejected with ValidationError.
Decision cusum_sign(std::span<const double> statistics, double q);

/// Threshold minimizing FDP + FNP of this realization given the truth;
/// ties go to the largest threshold.
Decision oracle_threshold(std::span<const double> statistics, const IndexSet& false_nulls);
Decision oracle_threshold(const Dataset& dataset);

/// Runs `procedure` on a dataset. Zero statistics are filtered out for the
/// sign-based procedures and never rejected.
Decision apply(Procedure procedure, const Dataset& dataset, const NullModel& null_model,
               double q);

}  // namespace mtsim
