#pragma once

#include <compare>
#include <cstddef>

namespace mtsim {

/// FDP + FNP of one realization as an exact fraction, with 0/0 = 0 for
/// both terms. Lets per-realization risks be compared without rounding.
class RiskFraction {
 public:
  RiskFraction(std::size_t rejections, std::size_t false_discoveries,
               std::size_t false_nulls, std::size_t missed) {
    const auto r = static_cast<Wide>(rejections == 0 ? 1 : rejections);
    const auto m = static_cast<Wide>(false_nulls == 0 ? 1 : false_nulls);
    numerator_ = static_cast<Wide>(false_discoveries) * m + static_cast<Wide>(missed) * r;
    denominator_ = r * m;
  }

  double value() const {
    return static_cast<double>(numerator_) / static_cast<double>(denominator_);
  }

  friend std::strong_ordering operator<=>(const RiskFraction& a, const RiskFraction& b) {
    return a.numerator_ * b.denominator_ <=> b.numerator_ * a.denominator_;
  }
  friend bool operator==(const RiskFraction& a, const RiskFraction& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  __extension__ using Wide = unsigned __int128;
  Wide numerator_ = 0;
  Wide denominator_ = 1;
};

}  // namespace mtsim
