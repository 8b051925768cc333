#include "mtsim/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "mtsim/errors.hpp"

namespace mtsim::cli {

namespace {

struct GridOptions {
  std::vector<std::string> models{"normal"};
  double gamma = 2.0;
  std::vector<std::size_t> n_values;
  std::vector<double> beta_values;
  std::vector<double> r_values;
  std::optional<double> q;
  std::string q_schedule;
  std::vector<std::string> procedures{"bh", "bc"};
  std::size_t reps = 50;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out;
  std::string config_path;
  bool dump_dataset = false;
};

NullModel model_from_name(const std::string& name, double gamma) {
  if (name == "normal") return NullModel::normal();
  if (name == "laplace") return NullModel::unit_variance_laplace();
  if (name == "gg") return NullModel::generalized_gaussian(gamma);
  throw ValidationError("unknown model '" + name + "' (expected normal, laplace, gg)");
}

QPolicy policy_from(const GridOptions& o) {
  if (!o.q_schedule.empty()) {
    if (o.q_schedule != "log") {
      throw ValidationError("unknown q-schedule '" + o.q_schedule + "' (expected log)");
    }
    return QPolicy::log_schedule();
  }
  return QPolicy::fixed(o.q.value_or(0.05));
}

SweepConfig config_from_flags(const GridOptions& o) {
  SweepConfig config;
  config.null_models.clear();
  for (const auto& m : o.models) config.null_models.push_back(model_from_name(m, o.gamma));
  config.n_values = o.n_values;
  config.beta_values = o.beta_values;
  config.r_values = o.r_values;
  config.q_policy = policy_from(o);
  for (const auto& p : o.procedures) config.procedures.push_back(parse_procedure(p));
  config.replicates = o.reps;
  config.base_seed = o.seed;
  config.parallelism = o.jobs;
  return config;
}

std::size_t default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void add_common(CLI::App* cmd, GridOptions& o) {
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--jobs", o.jobs, "Worker threads")->envname("MTSIM_JOBS");
  cmd->add_option("--out", o.out, "Output directory")->required();
}

void add_grid(CLI::App* cmd, GridOptions& o, bool lists) {
  const char* suffix = lists ? " (comma-separated list)" : "";
  auto* model = cmd->add_option("--model", o.models, std::string("normal, laplace or gg") + suffix);
  auto* n = cmd->add_option("--n", o.n_values, std::string("Number of hypotheses") + suffix);
  auto* beta = cmd->add_option("--beta", o.beta_values, std::string("Sparsity exponent") + suffix);
  auto* r = cmd->add_option("--r", o.r_values, std::string("Signal exponent") + suffix);
  if (lists) {
    for (auto* opt : {model, n, beta, r}) opt->delimiter(',');
  } else {
    for (auto* opt : {model, n, beta, r}) opt->expected(1);
  }
  cmd->add_option("--gamma", o.gamma, "Exponent of the gg model");
  auto* q = cmd->add_option("--q", o.q, "Fixed FDR level");
  auto* sched = cmd->add_option("--q-schedule", o.q_schedule, "q schedule; 'log' gives 1/ln(n)");
  q->excludes(sched);
  cmd->add_option("--procedures", o.procedures, "bh,bc,cusum,oracle")->delimiter(',');
  cmd->add_option("--reps", o.reps, "Replicates per cell");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.close();
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::vector<double> grid(double first, double step, std::size_t count) {
  std::vector<double> out;
  for (std::size_t k = 0; k < count; ++k) {
    // Round to 12 decimals so that grid points print as short decimals.
    out.push_back(std::round((first + step * static_cast<double>(k)) * 1e12) / 1e12);
  }
  return out;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fdp-normal",       "fnp-normal",         "fdp-laplace",        "fnp-laplace",
          "vary-dense",       "vary-sparse-normal", "vary-sparse-laplace"};
}

SweepConfig preset(const std::string& name, Scale scale) {
  const bool paper = scale == Scale::Paper;
  SweepConfig config;
  config.figure = name;
  config.procedures = {Procedure::BH, Procedure::BC};
  config.replicates = paper ? 100 : 50;

  const bool fixed_n = name.starts_with("fdp-") || name.starts_with("fnp-");
  if (fixed_n) {
    const bool laplace = name.ends_with("-laplace");
    if (!laplace && !name.ends_with("-normal")) throw ValidationError("unknown preset");
    config.null_models = {laplace ? NullModel::unit_variance_laplace() : NullModel::normal()};
    config.n_values = {paper ? 100000u : 10000u};
    config.beta_values = {0.3, 0.5, 0.7};
    config.r_values = paper ? grid(0.05, 0.05, 19) : grid(0.05, 0.1, 10);
    config.q_policy = QPolicy::fixed(0.05);
    config.description = std::string(name.starts_with("fdp-") ? "FDP" : "FNP") +
                         " vs r, fixed n, " + (laplace ? "unit-variance double-exponential" : "normal") +
                         " null, beta in {0.3, 0.5, 0.7}, q = 0.05";
  } else {
    config.n_values = {100, 1000, 10000, 100000};
    if (paper) config.n_values.push_back(1000000);
    config.q_policy = QPolicy::log_schedule();
    if (name == "vary-dense") {
      config.null_models = {NullModel::normal(), NullModel::unit_variance_laplace()};
      config.beta_values = {0.4};
      config.r_values = {0.9};
      config.description = "FDP and FNP vs n, (beta, r) = (0.4, 0.9), normal and "
                           "double-exponential nulls, q = 1/log n";
    } else if (name == "vary-sparse-normal") {
      config.null_models = {NullModel::normal()};
      config.beta_values = {0.7};
      config.r_values = {1.5};
      config.description = "FDP and FNP vs n, (beta, r) = (0.7, 1.5), normal null, q = 1/log n";
    } else if (name == "vary-sparse-laplace") {
      config.null_models = {NullModel::unit_variance_laplace()};
      config.beta_values = {0.7};
      config.r_values = {1.2};
      config.description =
          "FDP and FNP vs n, (beta, r) = (0.7, 1.2), double-exponential null, q = 1/log n";
    } else {
      std::string known;
      for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
      throw ValidationError("unknown figure '" + name + "'; known presets: " + known);
    }
  }
  config.description += paper ? " (paper scale)" : " (desk scale)";
  return config;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"Monte Carlo simulator for multiple testing under a common null", "mtsim"};
  app.require_subcommand(1);

  GridOptions run_opts;
  run_opts.jobs = default_jobs();
  auto* run = app.add_subcommand("run", "Simulate a single cell");
  add_grid(run, run_opts, false);
  add_common(run, run_opts);
  run->add_flag("--dump-dataset", run_opts.dump_dataset,
                "Also write replicate 0's dataset as dataset.csv");

  GridOptions sweep_opts;
  sweep_opts.jobs = default_jobs();
  auto* sweep = app.add_subcommand("sweep", "Simulate a grid of cells");
  add_grid(sweep, sweep_opts, true);
  add_common(sweep, sweep_opts);
  sweep->add_option("--config", sweep_opts.config_path, "Sweep config JSON (manifest schema)");

  std::string figure;
  std::string scale_name = "desk";
  GridOptions repro_opts;
  repro_opts.jobs = default_jobs();
  std::optional<std::size_t> repro_reps;
  auto* repro = app.add_subcommand("reproduce", "Run a named figure preset");
  repro->add_option("--figure", figure, "Preset name")->required();
  repro->add_option("--scale", scale_name, "desk or paper");
  repro->add_option("--reps", repro_reps, "Override the preset's replicate count");
  add_common(repro, repro_opts);

  std::size_t points = 999;
  std::string bounds_out;
  auto* bounds = app.add_subcommand("boundaries", "Write the boundary curves as CSV");
  bounds->add_option("--points", points, "Grid points in (0,1)");
  bounds->add_option("--out", bounds_out, "Output directory (stdout if omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run || *sweep) {
      GridOptions& o = *run ? run_opts : sweep_opts;
      SweepConfig config;
      if (*sweep && !o.config_path.empty()) {
        std::ifstream f(o.config_path);
        if (!f) throw ValidationError("cannot read config " + o.config_path);
        nlohmann::json doc;
        try {
          f >> doc;
        } catch (const nlohmann::json::exception& e) {
          throw ValidationError(std::string("invalid config JSON: ") + e.what());
        }
        config = config_from_json(doc);
        if (sweep->count("--seed")) config.base_seed = o.seed;
        if (sweep->count("--reps")) config.replicates = o.reps;
        config.parallelism = o.jobs;
      } else {
        config = config_from_flags(o);
      }
      config.validate();
      const SweepResult result = run_sweep(config);
      write_outputs(result, config, o.out);
      if (*run && o.dump_dataset) {
        const auto cell = config.cells().front();
        RandomStream rng(derive_stream_key(config.base_seed, cell.id(), 0));
        write_text(std::filesystem::path(o.out) / "dataset.csv",
                   dataset_to_csv(generate(cell, rng)));
      }
      out << "wrote " << result.rows.size() << " rows and " << result.aggregates.size()
          << " aggregates to " << o.out << '\n';
    } else if (*repro) {
      Scale scale;
      if (scale_name == "desk") {
        scale = Scale::Desk;
      } else if (scale_name == "paper") {
        scale = Scale::Paper;
      } else {
        throw ValidationError("scale must be desk or paper");
      }
      SweepConfig config = preset(figure, scale);
      config.base_seed = repro_opts.seed;
      config.parallelism = repro_opts.jobs;
      if (repro_reps) config.replicates = *repro_reps;
      config.validate();
      const SweepResult result = run_sweep(config);
      write_outputs(result, config, repro_opts.out, {.boundary_columns = true});
      write_text(std::filesystem::path(repro_opts.out) / "boundaries.csv", boundaries_csv(999));
      out << "wrote preset " << figure << " to " << repro_opts.out << '\n';
    } else if (*bounds) {
      const std::string csv = boundaries_csv(points);
      if (bounds_out.empty()) {
        out << csv;
      } else {
        std::filesystem::create_directories(bounds_out);
        write_text(std::filesystem::path(bounds_out) / "boundaries.csv", csv);
      }
    }
  } catch (const ValidationError& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mtsim::cli
