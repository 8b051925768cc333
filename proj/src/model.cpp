#include "mtsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mtsim/errors.hpp"

namespace mtsim {

std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string ExperimentCell::id() const {
  return "model=" + null_model.name() + ";gamma=" + format_real(null_model.gamma()) +
         ";scale=" + format_real(null_model.scale()) + ";n=" + std::to_string(n) +
         ";beta=" + format_real(beta) + ";r=" + format_real(r);
}

ExperimentCell derive_cell(const NullModel& null_model, std::size_t n, double beta, double r) {
  if (n < 2) throw ValidationError("n must be at least 2");
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must be in (0,1)");
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("r must be positive");

  ExperimentCell cell;
  cell.null_model = null_model;
  cell.n = n;
  cell.beta = beta;
  cell.r = r;
  const auto nd = static_cast<double>(n);
  // Exact integer powers (100^0.5) may come back from pow a few ulps low;
  // absorb that before flooring.
  const double power = std::pow(nd, 1.0 - beta);
  auto m = static_cast<std::size_t>(std::floor(power * (1.0 + 1e-13)));
  m = std::clamp<std::size_t>(m, 1, n);
  cell.m = m;
  const double gamma = null_model.gamma();
  cell.mu = std::pow(gamma * r * std::log(nd), 1.0 / gamma);
  cell.epsilon = static_cast<double>(m) / nd;
  return cell;
}

ExperimentCell with_mu_override(ExperimentCell cell, double mu) {
  if (!std::isfinite(mu)) throw ValidationError("mu must be finite");
  cell.mu = mu;
  return cell;
}

Dataset generate(const ExperimentCell& cell, RandomStream& rng) {
  Dataset data;
  data.statistics = cell.null_model.sample(rng, cell.n);

  // Partial Fisher-Yates: the first m slots end up a uniform m-subset.
  std::vector<std::size_t> order(cell.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < cell.m; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_below(cell.n - i));
    std::swap(order[i], order[j]);
  }
  data.false_nulls.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cell.m));
  std::sort(data.false_nulls.begin(), data.false_nulls.end());
  for (auto i : data.false_nulls) data.statistics[i] += cell.mu;
  return data;
}

std::string dataset_to_csv(const Dataset& dataset) {
  std::vector<char> flag(dataset.statistics.size(), 0);
  for (auto i : dataset.false_nulls) flag.at(i) = 1;
  std::string out = "index,statistic,is_false_null\n";
  for (std::size_t i = 0; i < dataset.statistics.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_real(dataset.statistics[i]);
    out += flag[i] ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace mtsim
