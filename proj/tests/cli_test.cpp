#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "mtsim/cli.hpp"
#include "mtsim/errors.hpp"
#include "test_util.hpp"

namespace mtsim::cli {
namespace {

using testing_util::slurp;
using testing_util::TempDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = parse_and_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, RunHappyPath) {
  TempDir dir("cli-run");
  const auto r = invoke({"run", "--model", "normal", "--n", "10000", "--beta", "0.5", "--r",
                         "0.9", "--q", "0.05", "--procedures", "bh,bc", "--reps", "5", "--seed",
                         "42", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"results.csv", "aggregate.csv", "manifest.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / name)) << name;
  }
  const std::string agg = slurp(dir.path() / "aggregate.csv");
  EXPECT_NE(agg.find("normal,2,10000,0.5,0.90000000000000002,0.050000000000000003,bh,5,"),
            std::string::npos);
}

TEST(Cli, RunDumpsDataset) {
  TempDir dir("cli-dump");
  const auto r = invoke({"run", "--model", "laplace", "--n", "50", "--beta", "0.5", "--r", "1",
                         "--reps", "1", "--out", dir.path().string(), "--dump-dataset"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir.path() / "dataset.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 51);
}

TEST(Cli, SweepBetaOutOfRange) {
  TempDir dir("cli-bad");
  const auto r = invoke({"sweep", "--beta", "1.5", "--n", "100", "--r", "0.5", "--out",
                         dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("beta must be in (0,1)"), std::string::npos) << r.err;
}

TEST(Cli, UnknownFlagAndMissingSubcommand) {
  EXPECT_EQ(invoke({"run", "--bogus", "1"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
}

TEST(Cli, QAndScheduleAreExclusive) {
  TempDir dir("cli-q");
  EXPECT_EQ(invoke({"sweep", "--n", "100", "--beta", "0.5", "--r", "1", "--q", "0.1",
                    "--q-schedule", "log", "--out", dir.path().string()})
                .code,
            2);
  EXPECT_EQ(invoke({"sweep", "--n", "100", "--beta", "0.5", "--r", "1", "--q-schedule", "exp",
                    "--out", dir.path().string()})
                .code,
            2);
}

TEST(Cli, UnknownPresetListsKnownOnes) {
  TempDir dir("cli-preset");
  const auto r = invoke({"reproduce", "--figure", "nope", "--out", dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("vary-dense"), std::string::npos);
  EXPECT_NE(r.err.find("fnp-normal"), std::string::npos);
}

TEST(Cli, UnwritableOutputIsRuntimeError) {
  TempDir dir("cli-unwritable");
  const auto file = dir.path() / "plain-file";
  std::ofstream(file) << "x";
  const auto r = invoke({"run", "--n", "100", "--beta", "0.5", "--r", "1", "--reps", "1",
                         "--out", (file / "sub").string()});
  EXPECT_EQ(r.code, 1) << r.err;
}

TEST(Cli, SweepFromConfigFileMatchesFlags) {
  TempDir flags_dir("cli-flags");
  TempDir config_dir("cli-config");
  ASSERT_EQ(invoke({"sweep", "--model", "normal,laplace", "--n", "200,500", "--beta", "0.3,0.6",
                    "--r", "0.8", "--q-schedule", "log", "--procedures", "bh,bc,cusum,oracle",
                    "--reps", "2", "--seed", "9", "--jobs", "2", "--out",
                    flags_dir.path().string()})
                .code,
            0);
  const auto manifest = flags_dir.path() / "manifest.json";
  const auto r = invoke({"sweep", "--config", manifest.string(), "--jobs", "3", "--out",
                         config_dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"results.csv", "aggregate.csv", "manifest.json"}) {
    EXPECT_EQ(slurp(flags_dir.path() / name), slurp(config_dir.path() / name)) << name;
  }
}

TEST(Cli, JobsFromEnvironment) {
  TempDir a("cli-env-a");
  TempDir b("cli-env-b");
  ::setenv("MTSIM_JOBS", "4", 1);
  const auto r1 = invoke({"run", "--n", "300", "--beta", "0.5", "--r", "1", "--reps", "6",
                          "--out", a.path().string()});
  ::setenv("MTSIM_JOBS", "zero", 1);
  const auto bad = invoke({"run", "--n", "300", "--beta", "0.5", "--r", "1", "--reps", "6",
                           "--out", b.path().string()});
  ::unsetenv("MTSIM_JOBS");
  EXPECT_EQ(r1.code, 0) << r1.err;
  EXPECT_EQ(bad.code, 2);
}

TEST(Cli, BoundariesToStdoutAndDirectory) {
  const auto r = invoke({"boundaries", "--points", "3"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "beta,multiple_testing_boundary,detection_boundary\n0.25,0.25,\n0.5,0.5,\n"
            "0.75,0.75,0.25\n");
  TempDir dir("cli-bounds");
  ASSERT_EQ(invoke({"boundaries", "--out", dir.path().string()}).code, 0);
  const std::string csv = slurp(dir.path() / "boundaries.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1000);
}

TEST(Presets, GridsMatchFigureDesigns) {
  const auto dense = preset("vary-dense", Scale::Desk);
  EXPECT_EQ(dense.n_values, (std::vector<std::size_t>{100, 1000, 10000, 100000}));
  EXPECT_EQ(dense.beta_values, (std::vector<double>{0.4}));
  EXPECT_EQ(dense.r_values, (std::vector<double>{0.9}));
  EXPECT_EQ(dense.q_policy.kind, QPolicy::Kind::LogSchedule);
  EXPECT_EQ(dense.replicates, 50u);
  EXPECT_EQ(dense.null_models.size(), 2u);

  const auto sparse = preset("vary-sparse-laplace", Scale::Paper);
  EXPECT_EQ(sparse.beta_values, (std::vector<double>{0.7}));
  EXPECT_EQ(sparse.r_values, (std::vector<double>{1.2}));
  EXPECT_EQ(sparse.n_values.back(), 1000000u);
  EXPECT_EQ(sparse.replicates, 100u);
  EXPECT_EQ(sparse.null_models.front(), NullModel::unit_variance_laplace());
  EXPECT_EQ(preset("vary-sparse-normal", Scale::Desk).r_values, (std::vector<double>{1.5}));

  const auto fnp = preset("fnp-normal", Scale::Desk);
  EXPECT_EQ(fnp.n_values, (std::vector<std::size_t>{10000}));
  EXPECT_EQ(fnp.beta_values, (std::vector<double>{0.3, 0.5, 0.7}));
  EXPECT_EQ(fnp.r_values.size(), 10u);
  EXPECT_EQ(fnp.q_policy.q, 0.05);
  EXPECT_EQ(preset("fdp-laplace", Scale::Paper).n_values, (std::vector<std::size_t>{100000}));
  EXPECT_EQ(preset("fdp-laplace", Scale::Paper).r_values.size(), 19u);

  for (const auto& name : preset_names()) {
    EXPECT_EQ(preset(name, Scale::Desk).figure, name);
    EXPECT_FALSE(preset(name, Scale::Desk).description.empty());
  }
  EXPECT_THROW(preset("fdp-cauchy", Scale::Desk), ValidationError);
}

TEST(Cli, ReproduceWritesOverlayAndManifestFigure) {
  TempDir dir("cli-repro");
  const auto r = invoke({"reproduce", "--figure", "vary-sparse-normal", "--scale", "desk",
                         "--reps", "2", "--seed", "3", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string agg = slurp(dir.path() / "aggregate.csv");
  EXPECT_NE(agg.find("boundary_r,detection_rho"), std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(dir.path() / "manifest.json"));
  EXPECT_EQ(manifest.at("figure").get<std::string>(), "vary-sparse-normal");
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "boundaries.csv"));
  EXPECT_EQ(invoke({"reproduce", "--figure", "vary-dense", "--scale", "huge", "--out",
                    dir.path().string()})
                .code,
            2);
}

}  // namespace
}  // namespace mtsim::cli
