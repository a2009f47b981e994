#include "ipdrl/harness.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <set>
#include <sstream>
#include <tuple>

#include "ipdrl/csv.hpp"
#include "ipdrl/kernels/step_kernel.hpp"
#include "ipdrl/mbrn.hpp"
#include "ipdrl/parallel.hpp"

namespace ipdrl {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Phase:
      return "phase";
    case ExperimentKind::Mbrn:
      return "mbrn";
    case ExperimentKind::Learnability:
      return "learnability";
    case ExperimentKind::Online:
      return "online";
    case ExperimentKind::Batch:
      return "batch";
    case ExperimentKind::Robustness:
      return "robustness";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (ExperimentKind k : {ExperimentKind::Phase, ExperimentKind::Mbrn, ExperimentKind::Learnability,
                           ExperimentKind::Online, ExperimentKind::Batch, ExperimentKind::Robustness}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("subcommand", "unknown experiment kind '" + std::string(name) + "'");
}

TrajectoryRecord make_record(std::int64_t t, std::span<const StrategyPair> pairs,
                             std::optional<double> coop_rate) {
  const EquilibriumCounts c = equilibrium_counts(pairs);
  const EquilibriumFractions f = equilibrium_fractions(pairs);
  const auto n = static_cast<std::int64_t>(pairs.size());
  return {t,
          f.wsls,
          f.gt,
          f.alld,
          f.other,
          wilson_interval(c.wsls, n),
          wilson_interval(c.gt, n),
          wilson_interval(c.alld, n),
          coop_rate};
}

std::vector<TrajectoryRecord> batch_trajectory(const BatchExperiment& e, unsigned workers) {
  if (e.samples < 1) throw ValidationError("experiment.samples must be >= 1");
  if (e.steps < e.batch_size) throw ValidationError("experiment.steps must be >= learner.batch_size");
  const LearnerParams lp{LearningRate(e.alpha), ExplorationRate(e.epsilon), DiscountFactor(e.delta)};
  std::vector<std::vector<StrategyPair>> runs(static_cast<std::size_t>(e.samples));
  parallel_for(runs.size(), workers, [&](std::size_t k) {
    Rng rng = seed_stream(e.seed, {tag(StreamTag::Batch), e.cell, k});
    const JointQ init = random_joint_q(rng, e.init);
    BatchLearner a1(init.q1, lp, e.batch_size);
    BatchLearner a2(init.q2, lp, e.batch_size);
    runs[k] = run_batch_learning(a1, a2, e.params, e.steps, rng).greedy_pairs;
  });
  const std::size_t batches = runs.front().size();
  std::vector<TrajectoryRecord> out;
  out.reserve(batches);
  std::vector<StrategyPair> cross(runs.size());
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t k = 0; k < runs.size(); ++k) cross[k] = runs[k][b];
    out.push_back(make_record(static_cast<std::int64_t>(b + 1) * e.batch_size, cross));
  }
  return out;
}

std::vector<TrajectoryRecord> online_trajectory(const OnlineExperiment& e, unsigned workers) {
  if (e.samples < 1) throw ValidationError("experiment.samples must be >= 1");
  const LearnerParams lp{LearningRate(e.alpha), ExplorationRate(e.epsilon), DiscountFactor(e.delta)};
  std::vector<std::vector<OnlineSnapshot>> runs(static_cast<std::size_t>(e.samples));
  parallel_for(runs.size(), workers, [&](std::size_t k) {
    Rng rng = seed_stream(e.seed, {tag(StreamTag::Online), 0, k});
    const JointQ init = random_joint_q(rng, e.init);
    OnlineLearner a1(init.q1, lp);
    OnlineLearner a2(init.q2, lp);
    runs[k] = run_online_learning(a1, a2, e.params, {e.steps, e.stride, e.window, std::nullopt}, rng);
  });
  const std::size_t snaps = runs.front().size();
  std::vector<TrajectoryRecord> out;
  out.reserve(snaps);
  std::vector<StrategyPair> cross(runs.size());
  for (std::size_t j = 0; j < snaps; ++j) {
    double coop = 0.0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      cross[k] = runs[k][j].greedy_pair;
      coop += runs[k][j].coop_rate;
    }
    out.push_back(make_record(runs.front()[j].t, cross, coop / static_cast<double>(runs.size())));
  }
  return out;
}

namespace {

InitRange init_range(const ExperimentConfig& c) { return {c.init_low, c.effective_init_high()}; }

}  // namespace

std::vector<RobustnessCell> robustness_sweep(const ExperimentConfig& config, unsigned workers) {
  struct Combo {
    std::int64_t k;
    double alpha;
    double epsilon;
  };
  std::vector<Combo> combos;
  std::set<std::tuple<std::int64_t, double, double>> seen;
  auto add = [&](std::int64_t k, double a, double e) {
    if (seen.insert({k, a, e}).second) combos.push_back({k, a, e});
  };
  for (std::int64_t k : config.batch_sizes) {
    for (double a : config.robust_alphas) add(k, a, config.epsilon);
    for (double e : config.robust_epsilons) add(k, config.alpha, e);
  }
  const GameParams params(config.temptation, config.sucker);
  std::vector<RobustnessCell> cells(combos.size());
  // Cells run one after another; samples inside a cell use the workers.
  for (std::size_t c = 0; c < combos.size(); ++c) {
    const Combo& cb = combos[c];
    const BatchExperiment e{params, cb.alpha, cb.epsilon, config.delta, cb.k, config.steps,
                            config.samples, config.seed, c, init_range(config)};
    const auto traj = batch_trajectory(e, workers);
    std::vector<std::pair<std::int64_t, double>> series;
    series.reserve(traj.size());
    for (const auto& r : traj) series.emplace_back(r.t, r.frac_wsls);
    cells[c] = {config.temptation, config.sucker, config.delta, cb.k, cb.alpha, cb.epsilon,
                config.samples, traj.back().frac_wsls, time_to_threshold(series, config.threshold)};
  }
  return cells;
}

std::filesystem::path prepare_output_dir(const std::filesystem::path& base, ExperimentKind kind,
                                         bool force) {
  namespace fs = std::filesystem;
  if (force) {
    fs::create_directories(base);
    return base;
  }
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream stamp;
  stamp << to_string(kind) << '-' << std::put_time(&tm, "%Y%m%d-%H%M%S");
  fs::path dir = base / stamp.str();
  for (int n = 1; fs::exists(dir); ++n) dir = base / (stamp.str() + "-" + std::to_string(n));
  fs::create_directories(dir);
  return dir;
}

namespace {

json grid_json(const std::vector<double>& g) { return json(g); }

json config_json(const ExperimentConfig& c) {
  std::string mode = c.phase_mode == PhaseModeSelection::Analytic  ? "analytic"
                     : c.phase_mode == PhaseModeSelection::Network ? "network"
                                                                   : "both";
  return json{
      {"game", {{"T", c.temptation}, {"S", c.sucker}}},
      {"learner",
       {{"alpha", c.alpha}, {"epsilon", c.epsilon}, {"delta", c.delta}, {"batch_size", c.batch_size}}},
      {"experiment",
       {{"samples", c.samples},
        {"steps", c.steps},
        {"stride", c.stride},
        {"window", c.window},
        {"seed", c.seed},
        {"init_low", c.init_low},
        {"init_high", c.effective_init_high()},
        {"conv_window", c.conv_window},
        {"conv_tolerance", c.conv_tolerance},
        {"max_steps", c.max_steps},
        {"threshold", c.threshold}}},
      {"sweep",
       {{"epsilons", grid_json(c.epsilons)},
        {"deltas", grid_json(c.deltas)},
        {"alphas", grid_json(c.alphas)},
        {"batch_sizes", c.batch_sizes},
        {"robust_alphas", grid_json(c.robust_alphas)},
        {"robust_epsilons", grid_json(c.robust_epsilons)},
        {"phase_mode", mode},
        {"basin_points", c.basin_points}}}};
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

json record_json(const TrajectoryRecord& r) {
  json j{{"t", r.t},
         {"frac_wsls", r.frac_wsls},
         {"wsls_ci", interval_json(r.wsls)},
         {"frac_gt", r.frac_gt},
         {"gt_ci", interval_json(r.gt)},
         {"frac_alld", r.frac_alld},
         {"alld_ci", interval_json(r.alld)},
         {"frac_other", r.frac_other}};
  if (r.coop_rate) j["coop_rate"] = *r.coop_rate;
  return j;
}

void write_trajectory(const std::filesystem::path& path, const std::vector<TrajectoryRecord>& recs) {
  CsvWriter csv(path, {"t", "frac_wsls", "wsls_lo", "wsls_hi", "frac_gt", "gt_lo", "gt_hi",
                       "frac_alld", "alld_lo", "alld_hi", "frac_other", "coop_rate"});
  for (const auto& r : recs) {
    csv.row({field(r.t), field(r.frac_wsls), field(r.wsls.lo), field(r.wsls.hi), field(r.frac_gt),
             field(r.gt.lo), field(r.gt.hi), field(r.frac_alld), field(r.alld.lo), field(r.alld.hi),
             field(r.frac_other), r.coop_rate ? field(*r.coop_rate) : std::string()});
  }
}

void write_phase_rows(CsvWriter& csv, const StabilityRegion& region) {
  for (const PhaseCell& cell : region.cells) {
    csv.row({field(region.params.temptation()), field(region.params.sucker()), field(cell.epsilon),
             field(cell.delta), field(cell.alld), field(cell.gt), field(cell.wsls),
             field(to_string(region.mode))});
  }
}

std::vector<double> require_grid(const std::vector<double>& g, const char* key) {
  if (g.empty()) throw ConfigError(key, "grid required for this experiment");
  return g;
}

json run_phase(const ExperimentConfig& c, const std::filesystem::path& dir, unsigned workers) {
  const GameParams params(c.temptation, c.sucker);
  const auto eps = require_grid(c.epsilons, "sweep.epsilons");
  const auto deltas = require_grid(c.deltas, "sweep.deltas");
  std::vector<StabilityRegion> regions;
  if (c.phase_mode != PhaseModeSelection::Network) {
    regions.push_back(phase_diagram(params, eps, deltas, PhaseMode::Analytic, workers));
  }
  if (c.phase_mode != PhaseModeSelection::Analytic) {
    regions.push_back(phase_diagram(params, eps, deltas, PhaseMode::Network, workers));
  }
  CsvWriter csv(dir / "phase.csv", {"T", "S", "epsilon", "delta", "alld", "gt", "wsls", "mode"});
  json summary = json::object();
  for (const auto& r : regions) {
    write_phase_rows(csv, r);
    int gt = 0;
    int wsls = 0;
    int alld = 0;
    int tft = 0;
    for (const auto& cell : r.cells) {
      gt += cell.gt;
      wsls += cell.wsls;
      alld += cell.alld;
      tft += cell.tft;
    }
    summary[std::string(to_string(r.mode))] = {
        {"cells", r.cells.size()}, {"alld", alld}, {"gt", gt}, {"wsls", wsls}, {"tft", tft}};
  }
  if (regions.size() == 2) {
    std::size_t agree = 0;
    for (std::size_t k = 0; k < regions[0].cells.size(); ++k) {
      const auto& a = regions[0].cells[k];
      const auto& b = regions[1].cells[k];
      agree += (a.alld == b.alld && a.gt == b.gt && a.wsls == b.wsls);
    }
    summary["agreement"] = static_cast<double>(agree) / static_cast<double>(regions[0].cells.size());
  }
  return summary;
}

json run_mbrn(const ExperimentConfig& c, const std::filesystem::path& dir, unsigned workers,
              std::vector<std::string>& files) {
  const GameParams params(c.temptation, c.sucker);
  const BestResponseNetwork net =
      build_network(params, ExplorationRate(c.epsilon), DiscountFactor(c.delta));
  {
    std::ofstream dot(dir / "network.dot", std::ios::binary);
    dot << net.to_dot();
    if (!dot) throw std::runtime_error("cannot write network.dot");
    files.push_back("network.dot");
  }
  const EquilibriumSet eq = find_equilibria(net);
  const auto reach = attractors(net);
  CsvWriter csv(dir / "equilibria.csv",
                {"index", "s1", "s2", "label", "basin_count", "basin_fraction"});
  files.push_back("equilibria.csv");
  json list = json::array();
  for (const StrategyPair& p : eq.pairs) {
    const int count = static_cast<int>(std::count(reach.begin(), reach.end(), p.index()));
    const BasinFraction basin{count};
    csv.row({field(p.index()), field(p.s1.to_string()), field(p.s2.to_string()), field(describe(p)),
             field(count), field(basin.value())});
    list.push_back({{"index", p.index()}, {"label", describe(p)}, {"basin_count", count}});
  }
  json summary{{"equilibria", list},
               {"alld", eq.alld},
               {"gt", eq.gt},
               {"wsls", eq.wsls},
               {"cycle_nodes", std::count(reach.begin(), reach.end(), -1)}};
  if (c.basin_points > 0) {
    const BasinSweepResult sweep = max_wsls_basin(BasinSweepSpec::standard(c.basin_points), workers);
    CsvWriter bcsv(dir / "basin_sweep.csv", {"T", "S", "epsilon", "delta", "wsls_basin_count",
                                              "wsls_basin_fraction"});
    files.push_back("basin_sweep.csv");
    for (const auto& p : sweep.attaining) {
      bcsv.row({field(p.temptation), field(p.sucker), field(p.epsilon), field(p.delta),
                field(p.wsls_basin.count), field(p.wsls_basin.value())});
    }
    summary["basin_sweep"] = {{"points_per_axis", c.basin_points},
                              {"cells", sweep.cells},
                              {"wsls_cells", sweep.wsls_cells},
                              {"max_wsls_basin_count", sweep.max_basin.count},
                              {"max_wsls_basin_fraction", sweep.max_basin.value()},
                              {"attaining_cells", sweep.attaining.size()}};
  }
  return summary;
}

json run_learnability(const ExperimentConfig& c, const std::filesystem::path& dir,
                      unsigned workers) {
  LearnabilitySpec spec{GameParams(c.temptation, c.sucker),
                        c.delta,
                        require_grid(c.alphas, "sweep.alphas"),
                        require_grid(c.epsilons, "sweep.epsilons"),
                        c.samples,
                        c.seed,
                        init_range(c),
                        {c.conv_window, c.conv_tolerance, c.max_steps}};
  const auto cells = learnability_sweep(spec, workers);
  CsvWriter csv(dir / "learnability.csv",
                {"T", "S", "delta", "alpha", "epsilon", "n", "frac_wsls", "frac_gt", "frac_alld",
                 "frac_other", "frac_nonconv", "seed"});
  double best_wsls = 0.0;
  std::int64_t nonconv = 0;
  for (const auto& cell : cells) {
    csv.row({field(c.temptation), field(c.sucker), field(c.delta), field(cell.alpha),
             field(cell.epsilon), field(cell.n), field(cell.fraction(Outcome::WSLS)),
             field(cell.fraction(Outcome::GT)), field(cell.fraction(Outcome::AllD)),
             field(cell.fraction(Outcome::Other)), field(cell.fraction(Outcome::NonConvergent)),
             field(static_cast<std::int64_t>(c.seed))});
    best_wsls = std::max(best_wsls, cell.fraction(Outcome::WSLS));
    nonconv += cell.counts[static_cast<int>(Outcome::NonConvergent)];
  }
  return {{"cells", cells.size()}, {"max_frac_wsls", best_wsls}, {"nonconvergent_samples", nonconv}};
}

}  // namespace

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = config_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config, ExperimentKind kind,
                                const std::filesystem::path& out_dir) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();
  const unsigned workers = config.workers == 0 ? default_workers() : config.workers;
  ExperimentResult result{out_dir, {}};
  json stats;

  switch (kind) {
    case ExperimentKind::Phase:
      stats = run_phase(config, out_dir, workers);
      result.files.push_back("phase.csv");
      break;
    case ExperimentKind::Mbrn:
      stats = run_mbrn(config, out_dir, workers, result.files);
      break;
    case ExperimentKind::Learnability:
      stats = run_learnability(config, out_dir, workers);
      result.files.push_back("learnability.csv");
      break;
    case ExperimentKind::Online: {
      const OnlineExperiment e{GameParams(config.temptation, config.sucker),
                               config.alpha,
                               config.epsilon,
                               config.delta,
                               config.steps,
                               config.stride,
                               config.window,
                               config.samples,
                               config.seed,
                               init_range(config)};
      const auto recs = online_trajectory(e, workers);
      write_trajectory(out_dir / "trajectory.csv", recs);
      result.files.push_back("trajectory.csv");
      stats = {{"final", record_json(recs.back())}};
      break;
    }
    case ExperimentKind::Batch: {
      if (config.steps < config.batch_size) {
        throw ConfigError("experiment.steps", "must be >= learner.batch_size");
      }
      const BatchExperiment e{GameParams(config.temptation, config.sucker),
                              config.alpha,
                              config.epsilon,
                              config.delta,
                              config.batch_size,
                              config.steps,
                              config.samples,
                              config.seed,
                              0,
                              init_range(config)};
      const auto recs = batch_trajectory(e, workers);
      write_trajectory(out_dir / "trajectory.csv", recs);
      result.files.push_back("trajectory.csv");
      stats = {{"final", record_json(recs.back())}};
      break;
    }
    case ExperimentKind::Robustness: {
      if (config.batch_sizes.empty()) throw ConfigError("sweep.batch_sizes", "grid required");
      if (config.robust_alphas.empty() && config.robust_epsilons.empty()) {
        throw ConfigError("sweep.robust_alphas", "robust_alphas or robust_epsilons required");
      }
      for (auto k : config.batch_sizes) {
        if (config.steps < k) throw ConfigError("experiment.steps", "must be >= every batch size");
      }
      const auto cells = robustness_sweep(config, workers);
      CsvWriter csv(out_dir / "robustness.csv", {"T", "S", "delta", "K", "alpha", "epsilon", "n",
                                                  "final_wsls_frac", "time_to_04"});
      int reached = 0;
      for (const auto& cell : cells) {
        csv.row({field(cell.temptation), field(cell.sucker), field(cell.delta),
                 field(cell.batch_size), field(cell.alpha), field(cell.epsilon), field(cell.n),
                 field(cell.final_wsls_frac), field(cell.time_to_threshold)});
        reached += cell.time_to_threshold.has_value();
      }
      result.files.push_back("robustness.csv");
      stats = {{"cells", cells.size()}, {"cells_reaching_threshold", reached}};
      break;
    }
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result.files.push_back("summary.json");
  const json summary{{"kind", to_string(kind)},
                     {"config", config_json(config)},
                     {"config_hash", config_hash(config)},
                     {"seed", config.seed},
                     {"stats", stats},
                     {"files", result.files},
                     {"wall_time_seconds", wall},
                     {"workers", workers},
                     {"isa", to_string(kernels::active_isa())}};
  std::ofstream out(out_dir / "summary.json", std::ios::binary);
  out << summary.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write summary.json");
  return result;
}

}  // namespace ipdrl
