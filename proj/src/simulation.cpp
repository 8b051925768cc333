#include "mtsim/simulation.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mtsim/errors.hpp"
#include "mtsim/random.hpp"
#include "mtsim/theory.hpp"

namespace mtsim {

namespace fs = std::filesystem;

double resolve_q(const QPolicy& policy, std::size_t n) {
  double q = policy.q;
  if (policy.kind == QPolicy::Kind::LogSchedule) {
    if (n < 3) throw ValidationError("log q-schedule requires n >= 3");
    q = 1.0 / std::log(static_cast<double>(n));
  }
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("q must be in (0,1)");
  return q;
}

void SweepConfig::validate() const {
  if (null_models.empty()) throw ValidationError("at least one model is required");
  if (n_values.empty()) throw ValidationError("at least one n is required");
  if (beta_values.empty()) throw ValidationError("at least one beta is required");
  if (r_values.empty()) throw ValidationError("at least one r is required");
  if (procedures.empty()) throw ValidationError("at least one procedure is required");
  if (replicates < 1) throw ValidationError("reps must be at least 1");
  if (parallelism < 1) throw ValidationError("jobs must be at least 1");
  for (auto n : n_values) {
    if (n < 2) throw ValidationError("n must be at least 2");
    resolve_q(q_policy, n);
  }
  for (double b : beta_values) {
    if (!(b > 0.0 && b < 1.0)) throw ValidationError("beta must be in (0,1)");
  }
  for (double r : r_values) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("r must be positive");
  }
}

std::vector<ExperimentCell> SweepConfig::cells() const {
  std::vector<ExperimentCell> out;
  for (const auto& model : null_models) {
    for (auto n : n_values) {
      for (double beta : beta_values) {
        for (double r : r_values) out.push_back(derive_cell(model, n, beta, r));
      }
    }
  }
  return out;
}

std::vector<ResultRow> run_replicate(const ExperimentCell& cell,
                                     std::span<const Procedure> procedures, double q,
                                     std::size_t replicate, std::uint64_t base_seed) {
  const std::string id = cell.id();
  const std::uint64_t seed = derive_stream_key(base_seed, id, replicate);
  RandomStream rng(seed);
  const Dataset data = generate(cell, rng);

  std::vector<ResultRow> rows;
  rows.reserve(procedures.size());
  for (auto procedure : procedures) {
    Decision decision;
    try {
      decision = apply(procedure, data, cell.null_model, q);
    } catch (const ValidationError& e) {
      throw ValidationError("cell " + id + ", procedure " + to_string(procedure) + ": " +
                            e.what());
    }
    ResultRow row;
    row.cell = cell;
    row.q = q;
    row.procedure = procedure;
    row.replicate = replicate;
    row.seed = seed;
    row.threshold = decision.threshold;
    row.metrics = evaluate(decision, data);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_cell(const ExperimentCell& cell, std::span<const Procedure> procedures,
                                double q, std::size_t replicates, std::uint64_t base_seed) {
  std::vector<ResultRow> rows;
  rows.reserve(replicates * procedures.size());
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    auto part = run_replicate(cell, procedures, q, rep, base_seed);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  return rows;
}

std::vector<AggregateRow> aggregate_rows(std::span<const ResultRow> rows) {
  struct Group {
    const ResultRow* first;
    std::vector<MetricsRecord> records;
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& row : rows) {
    const std::string key =
        row.cell.id() + ";q=" + format_real(row.q) + ";proc=" + to_string(row.procedure);
    const auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) groups.push_back({&row, {}});
    groups[it->second].records.push_back(row.metrics);
  }
  std::vector<AggregateRow> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    out.push_back({g.first->cell, g.first->q, g.first->procedure, aggregate(g.records)});
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const auto cells = config.cells();
  std::vector<double> levels;
  for (const auto& cell : cells) levels.push_back(resolve_q(config.q_policy, cell.n));

  const std::size_t reps = config.replicates;
  const std::size_t work_items = cells.size() * reps;
  std::vector<std::vector<ResultRow>> slots(work_items);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t item = next.fetch_add(1);
      if (item >= work_items) return;
      const std::size_t c = item / reps;
      try {
        slots[item] =
            run_replicate(cells[c], config.procedures, levels[c], item % reps, config.base_seed);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(work_items);
        return;
      }
    }
  };

  const std::size_t threads = std::min(config.parallelism, std::max<std::size_t>(1, work_items));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.rows.reserve(work_items * config.procedures.size());
  for (auto& slot : slots) {
    result.rows.insert(result.rows.end(), std::make_move_iterator(slot.begin()),
                       std::make_move_iterator(slot.end()));
  }
  result.aggregates = aggregate_rows(result.rows);
  return result;
}

// --- serialization ---------------------------------------------------------

namespace {

std::string cell_prefix(const ExperimentCell& cell, double q) {
  return cell.null_model.name() + ',' + format_real(cell.null_model.gamma()) + ',' +
         std::to_string(cell.n) + ',' + format_real(cell.beta) + ',' + format_real(cell.r) +
         ',' + format_real(q);
}

nlohmann::ordered_json real_json(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

nlohmann::ordered_json model_json(const NullModel& model) {
  return {{"family", model.name()}, {"gamma", model.gamma()}, {"scale", model.scale()}};
}

NullModel model_from_json(const nlohmann::json& doc) {
  const std::string family = doc.at("family").get<std::string>();
  const double scale = doc.value("scale", 1.0);
  if (family == "normal") return NullModel::normal(scale);
  if (family == "laplace") return NullModel::double_exponential(scale);
  if (family == "gg") return NullModel::generalized_gaussian(doc.at("gamma").get<double>(), scale);
  throw ValidationError("unknown model family '" + family + "'");
}

}  // namespace

std::string results_csv(std::span<const ResultRow> rows) {
  std::string out = "model,gamma,n,beta,r,q,procedure,replicate,seed,fdp,fnp,num_rejections,threshold\n";
  for (const auto& row : rows) {
    out += cell_prefix(row.cell, row.q);
    out += ',' + to_string(row.procedure) + ',' + std::to_string(row.replicate) + ',' +
           std::to_string(row.seed) + ',' + format_real(row.metrics.fdp) + ',' +
           format_real(row.metrics.fnp) + ',' + std::to_string(row.metrics.num_rejections) + ',' +
           format_real(row.threshold) + '\n';
  }
  return out;
}

std::string aggregate_csv(std::span<const AggregateRow> rows, bool boundary_columns) {
  std::string out =
      "model,gamma,n,beta,r,q,procedure,replicates,fdr,fnr,risk,se_fdp,se_fnp,"
      "zero_rejection_fraction";
  out += boundary_columns ? ",boundary_r,detection_rho\n" : "\n";
  for (const auto& row : rows) {
    const auto& s = row.summary;
    out += cell_prefix(row.cell, row.q);
    out += ',' + to_string(row.procedure) + ',' + std::to_string(s.replicates) + ',' +
           format_real(s.fdr) + ',' + format_real(s.fnr) + ',' + format_real(s.risk) + ',' +
           format_real(s.se_fdp) + ',' + format_real(s.se_fnp) + ',' +
           format_real(s.zero_rejection_fraction);
    if (boundary_columns) {
      out += ',' + format_real(theory::multiple_testing_boundary(row.cell.beta)) + ',';
      if (row.cell.beta > 0.5) out += format_real(theory::detection_boundary(row.cell.beta));
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json results_json(std::span<const ResultRow> rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    out.push_back({{"model", row.cell.null_model.name()},
                   {"gamma", row.cell.null_model.gamma()},
                   {"n", row.cell.n},
                   {"beta", row.cell.beta},
                   {"r", row.cell.r},
                   {"q", row.q},
                   {"procedure", to_string(row.procedure)},
                   {"replicate", row.replicate},
                   {"seed", row.seed},
                   {"fdp", row.metrics.fdp},
                   {"fnp", row.metrics.fnp},
                   {"num_rejections", row.metrics.num_rejections},
                   {"threshold", real_json(row.threshold)}});
  }
  return out;
}

nlohmann::ordered_json aggregate_json(std::span<const AggregateRow> rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    const auto& s = row.summary;
    out.push_back({{"model", row.cell.null_model.name()},
                   {"gamma", row.cell.null_model.gamma()},
                   {"n", row.cell.n},
                   {"beta", row.cell.beta},
                   {"r", row.cell.r},
                   {"q", row.q},
                   {"procedure", to_string(row.procedure)},
                   {"replicates", s.replicates},
                   {"fdr", s.fdr},
                   {"fnr", s.fnr},
                   {"risk", s.risk},
                   {"se_fdp", s.se_fdp},
                   {"se_fnp", s.se_fnp},
                   {"zero_rejection_fraction", s.zero_rejection_fraction}});
  }
  return out;
}

nlohmann::ordered_json config_to_json(const SweepConfig& config) {
  nlohmann::ordered_json doc;
  doc["library"] = "mtsim";
  doc["version"] = kLibraryVersion;
  if (!config.figure.empty()) doc["figure"] = config.figure;
  if (!config.description.empty()) doc["description"] = config.description;
  doc["base_seed"] = config.base_seed;
  doc["models"] = nlohmann::ordered_json::array();
  for (const auto& m : config.null_models) doc["models"].push_back(model_json(m));
  doc["n_values"] = config.n_values;
  doc["beta_values"] = config.beta_values;
  doc["r_values"] = config.r_values;
  if (config.q_policy.kind == QPolicy::Kind::Fixed) {
    doc["q_policy"] = {{"kind", "fixed"}, {"q", config.q_policy.q}};
  } else {
    doc["q_policy"] = {{"kind", "log"}};
  }
  doc["procedures"] = nlohmann::ordered_json::array();
  for (auto p : config.procedures) doc["procedures"].push_back(to_string(p));
  doc["replicates"] = config.replicates;
  return doc;
}

SweepConfig config_from_json(const nlohmann::json& doc) {
  try {
    SweepConfig config;
    config.null_models.clear();
    for (const auto& m : doc.at("models")) config.null_models.push_back(model_from_json(m));
    config.n_values = doc.at("n_values").get<std::vector<std::size_t>>();
    config.beta_values = doc.at("beta_values").get<std::vector<double>>();
    config.r_values = doc.at("r_values").get<std::vector<double>>();
    const auto& policy = doc.at("q_policy");
    const std::string kind = policy.at("kind").get<std::string>();
    if (kind == "fixed") {
      config.q_policy = QPolicy::fixed(policy.at("q").get<double>());
    } else if (kind == "log") {
      config.q_policy = QPolicy::log_schedule();
    } else {
      throw ValidationError("unknown q_policy kind '" + kind + "'");
    }
    for (const auto& p : doc.at("procedures")) {
      config.procedures.push_back(parse_procedure(p.get<std::string>()));
    }
    config.replicates = doc.at("replicates").get<std::size_t>();
    config.base_seed = doc.value("base_seed", std::uint64_t{0});
    config.figure = doc.value("figure", std::string{});
    config.description = doc.value("description", std::string{});
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid sweep config: ") + e.what());
  }
}

void write_outputs(const SweepResult& result, const SweepConfig& config, const fs::path& dir,
                   const OutputOptions& options) {
  const std::vector<std::pair<std::string, std::string>> files = {
      {"results.csv", results_csv(result.rows)},
      {"aggregate.csv", aggregate_csv(result.aggregates, options.boundary_columns)},
      {"results.json", results_json(result.rows).dump(2) + "\n"},
      {"aggregate.json", aggregate_json(result.aggregates).dump(2) + "\n"},
      {"manifest.json", config_to_json(config).dump(2) + "\n"},
  };

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }

  std::vector<fs::path> staged;
  std::vector<fs::path> committed;
  auto cleanup = [&] {
    std::error_code ignored;
    for (const auto& p : staged) fs::remove(p, ignored);
    for (const auto& p : committed) fs::remove(p, ignored);
  };
  try {
    for (const auto& [name, content] : files) {
      const fs::path tmp = dir / (name + ".partial");
      staged.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << content;
      out.close();
      if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
      const fs::path target = dir / files[i].first;
      fs::rename(staged[i], target);
      committed.push_back(target);
    }
  } catch (const fs::filesystem_error& e) {
    cleanup();
    throw std::runtime_error(e.what());
  } catch (...) {
    cleanup();
    throw;
  }
}

std::string boundaries_csv(std::size_t points) {
  if (points < 1) throw ValidationError("points must be at least 1");
  std::string out = "beta,multiple_testing_boundary,detection_boundary\n";
  for (std::size_t k = 1; k <= points; ++k) {
    const double beta = static_cast<double>(k) / static_cast<double>(points + 1);
    out += format_real(beta) + ',' + format_real(theory::multiple_testing_boundary(beta)) + ',';
    if (beta > 0.5) out += format_real(theory::detection_boundary(beta));
    out += '\n';
  }
  return out;
}

}  // namespace mtsim
