#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "mtsim/errors.hpp"
#include "mtsim/model.hpp"

namespace mtsim {
namespace {

TEST(DeriveCell, SparsityCounts) {
  EXPECT_EQ(derive_cell(NullModel::normal(), 100000, 0.7, 1.0).m, 31u);
  EXPECT_EQ(derive_cell(NullModel::normal(), 100, 0.5, 1.0).m, 10u);
  EXPECT_EQ(derive_cell(NullModel::normal(), 10000, 0.5, 1.0).m, 100u);
  EXPECT_EQ(derive_cell(NullModel::normal(), 1000000, 0.4, 1.0).m, 3981u);
}

TEST(DeriveCell, SignalStrength) {
  const auto cell = derive_cell(NullModel::normal(), 100000, 0.5, 0.9);
  // sqrt(2 * 0.9 * ln 1e5), 40-digit evaluation.
  EXPECT_NEAR(cell.mu, 4.5522813881554390526, 1e-12);
  EXPECT_EQ(cell.epsilon, static_cast<double>(cell.m) / 100000.0);

  const auto laplace = derive_cell(NullModel::unit_variance_laplace(), 1000, 0.4, 0.9);
  EXPECT_NEAR(laplace.mu, 0.9 * std::log(1000.0), 1e-12);
  const auto gg = derive_cell(NullModel::generalized_gaussian(3.0), 1000, 0.4, 0.9);
  EXPECT_NEAR(gg.mu, std::cbrt(3.0 * 0.9 * std::log(1000.0)), 1e-12);
}

TEST(DeriveCell, MatchesFloorDefinitionOnGrid) {
  for (std::size_t n : {2u, 3u, 10u, 57u, 100u, 1000u, 4096u, 100000u}) {
    for (double beta = 0.05; beta < 1.0; beta += 0.05) {
      const auto cell = derive_cell(NullModel::normal(), n, beta, 0.5);
      const long double exact = std::pow(static_cast<long double>(n), 1.0L - beta);
      EXPECT_EQ(cell.m, std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(exact * (1.0L + 1e-13L)))))
          << "n=" << n << " beta=" << beta;
      EXPECT_GE(cell.m, 1u);
      EXPECT_LE(cell.m, n);
    }
  }
}

TEST(DeriveCell, Validation) {
  const auto model = NullModel::normal();
  EXPECT_THROW(derive_cell(model, 1, 0.5, 0.5), ValidationError);
  EXPECT_THROW(derive_cell(model, 100, 0.0, 0.5), ValidationError);
  EXPECT_THROW(derive_cell(model, 100, 1.0, 0.5), ValidationError);
  EXPECT_THROW(derive_cell(model, 100, 1.5, 0.5), ValidationError);
  EXPECT_THROW(derive_cell(model, 100, 0.5, 0.0), ValidationError);
  EXPECT_THROW(derive_cell(model, 100, 0.5, -1.0), ValidationError);
}

TEST(Generate, FullSubsetWhenMEqualsN) {
  // n^(1-beta) < n, so m = n only arises from a hand-built cell.
  auto cell = derive_cell(NullModel::normal(), 5, 0.01, 1.0);
  ASSERT_EQ(cell.m, 4u);
  cell.m = 5;
  cell.epsilon = 1.0;
  RandomStream rng(1);
  const auto data = generate(cell, rng);
  EXPECT_EQ(data.false_nulls, (IndexSet{0, 1, 2, 3, 4}));
}

TEST(Generate, SignalMeanNearMu) {
  const auto cell = derive_cell(NullModel::normal(), 10000, 0.5, 0.9);
  RandomStream rng(2024);
  const auto data = generate(cell, rng);
  ASSERT_EQ(data.false_nulls.size(), cell.m);
  double mean = 0.0;
  for (auto i : data.false_nulls) mean += data.statistics[i];
  mean /= static_cast<double>(cell.m);
  EXPECT_LE(std::abs(mean - cell.mu), 4.0 / std::sqrt(static_cast<double>(cell.m)));
}

TEST(Generate, ZeroShiftIsPureNullByKolmogorovSmirnov) {
  for (const auto& model : {NullModel::normal(), NullModel::unit_variance_laplace()}) {
    const auto cell = with_mu_override(derive_cell(model, 20000, 0.5, 0.9), 0.0);
    RandomStream rng(77);
    auto x = generate(cell, rng).statistics;
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double cdf = 1.0 - model.survival(x[i]);
      ks = std::max({ks, std::abs((i + 1) / n - cdf), std::abs(i / n - cdf)});
    }
    EXPECT_LE(ks, 1.63 / std::sqrt(n)) << model.name();
  }
}

TEST(Generate, ReproducibleAndValidIndices) {
  const auto cell = derive_cell(NullModel::unit_variance_laplace(), 1000, 0.3, 0.7);
  RandomStream a(9), b(9);
  const auto da = generate(cell, a);
  const auto db = generate(cell, b);
  EXPECT_EQ(da.statistics, db.statistics);
  EXPECT_EQ(da.false_nulls, db.false_nulls);
  std::set<std::size_t> unique(da.false_nulls.begin(), da.false_nulls.end());
  EXPECT_EQ(unique.size(), cell.m);
  EXPECT_LT(*unique.rbegin(), cell.n);
}

TEST(Generate, FalseNullsExchangeable) {
  // n = 10, beta with floor(10^(1-beta)) = 3.
  const auto cell = derive_cell(NullModel::normal(), 10, 1.0 - std::log10(3.5), 1.0);
  ASSERT_EQ(cell.m, 3u);
  RandomStream rng(31337);
  std::vector<int> hits(10, 0);
  const int reps = 10000;
  for (int rep = 0; rep < reps; ++rep) {
    for (auto i : generate(cell, rng).false_nulls) ++hits[i];
  }
  for (int h : hits) EXPECT_NEAR(h / static_cast<double>(reps), 0.3, 0.02);
}

TEST(DatasetCsv, ExactDecimalRoundTrip) {
  Dataset data;
  data.statistics = {0.1, -1.0 / 3.0, 2.5e-300};
  data.false_nulls = {1};
  const std::string csv = dataset_to_csv(data);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,statistic,is_false_null");
  EXPECT_NE(csv.find("1,-0.33333333333333331,1\n"), std::string::npos);
  EXPECT_EQ(std::stod("-0.33333333333333331"), -1.0 / 3.0);
  EXPECT_NE(csv.find("0,0.10000000000000001,0\n"), std::string::npos);
}

TEST(CellId, CanonicalAndDistinct) {
  const auto a = derive_cell(NullModel::normal(), 100, 0.5, 0.9);
  const auto b = derive_cell(NullModel::normal(), 100, 0.5, 0.8);
  EXPECT_EQ(a.id(), "model=normal;gamma=2;scale=1;n=100;beta=0.5;r=0.90000000000000002");
  EXPECT_NE(a.id(), b.id());
}

}  // namespace
}  // namespace mtsim
