#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bgt/data_io.hpp"
#include "bgt/dominance.hpp"
#include "bgt/estimation.hpp"
#include "bgt/models.hpp"
#include "bgt/nash.hpp"
#include "bgt/posterior.hpp"
#include "bgt/qre.hpp"

namespace fs = std::filesystem;
using namespace bgt;

namespace {

std::string fmt(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

// key=value provenance lines embedded at the top of every report.
struct Provenance {
  std::vector<std::pair<std::string, std::string>> kv;

  void add(const std::string& k, const std::string& v) { kv.push_back({k, v}); }
  void add(const std::string& k, long long v) { add(k, std::to_string(v)); }

  std::string header() const {
    std::string h;
    for (const auto& [k, v] : kv) h += "# " + k + "=" + v + "\n";
    return h;
  }
};

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

struct DataConfig {
  std::vector<std::string> manifests;
  std::string filter;
  int subsample = 0;  // 0 = keep everything
  std::uint64_t seed = 0;

  std::vector<Dataset> load_sources() const {
    std::vector<Dataset> out;
    for (const std::string& m : manifests) out.push_back(load_dataset(m));
    return out;
  }

  Dataset assemble() const {
    std::vector<Dataset> sources = load_sources();
    if (!filter.empty()) return filter_by_feature(sources, filter_from_name(filter));
    if (subsample > 0) return subsample_combine(sources, subsample, seed);
    return combine_datasets(sources);
  }

  void describe(Provenance& p) const {
    p.add("manifests", join(manifests, ";"));
    p.add("filter", filter);
    p.add("subsample", subsample);
  }
};

const char* structure_name(EquilibriumStructure s) {
  switch (s) {
    case EquilibriumStructure::SinglePure: return "single-pure";
    case EquilibriumStructure::SingleMixed: return "single-mixed";
    case EquilibriumStructure::Multiple: return "multiple";
  }
  return "?";
}

int run_classify(const DataConfig& dc, const fs::path& out_dir) {
  Dataset pool = dc.assemble();
  Provenance prov;
  prov.add("command", "classify");
  dc.describe(prov);

  std::ostringstream rows;
  rows << prov.header()
       << "game_id,actions_row,actions_col,strict_solvable,strict_rounds,"
          "weak_solvable,weak_rounds,equilibria,structure,degenerate\n";
  for (const Game& g : pool.games) {
    DominanceClassification c = classify_dominance(g);
    EquilibriumSet eqs;
    try {
      eqs = enumerate_nash(g);
    } catch (const std::exception& e) {
      throw std::runtime_error("game '" + g.id + "': " + e.what());
    }
    rows << g.id << ',' << g.num_actions(0) << ',' << g.num_actions(1) << ','
         << (c.solvable_strict ? 1 : 0) << ','
         << (c.rounds_strict ? std::to_string(*c.rounds_strict) : "") << ','
         << (c.solvable_weak ? 1 : 0) << ','
         << (c.rounds_weak ? std::to_string(*c.rounds_weak) : "") << ','
         << eqs.equilibria.size() << ',' << structure_name(eqs.structure) << ','
         << (eqs.degenerate ? 1 : 0) << '\n';
  }

  std::ostringstream counts;
  counts << prov.header() << "feature,games,observations\n";
  for (const auto& [name, f] : filter_names()) {
    long long games = 0, obs = 0;
    for (const Game& g : pool.games)
      if (game_has_feature(g, f)) {
        ++games;
        for (const Observation& o : pool.observations)
          if (o.game_id == g.id) obs += o.count;
      }
    counts << name << ',' << games << ',' << obs << '\n';
  }
  counts << "all," << pool.games.size() << ',' << pool.total_count() << '\n';

  fs::create_directories(out_dir);
  write_atomic(out_dir / "classify.csv", rows.str());
  write_atomic(out_dir / "feature_counts.csv", counts.str());
  return 0;
}

struct CvConfig {
  DataConfig data;
  std::vector<std::string> models;
  CvPlan plan;
  FitOptions fit;
  bool serial = false;
};

int run_cv(const CvConfig& cfg, const fs::path& out_dir) {
  Dataset data = cfg.data.assemble();
  ExecPolicy policy = cfg.serial ? ExecPolicy::Serial : ExecPolicy::Parallel;

  Provenance prov;
  prov.add("command", "cv");
  prov.add("models", join(cfg.models, ","));
  cfg.data.describe(prov);
  prov.add("dataset", data.source);
  prov.add("rounds", cfg.plan.rounds);
  prov.add("folds", cfg.plan.folds);
  prov.add("fold_unit", cfg.plan.unit == FoldUnit::Observation ? "obs" : "game");
  prov.add("seed", (long long)cfg.plan.seed);
  prov.add("restarts", cfg.fit.restarts);
  prov.add("max_evals", cfg.fit.max_evals);

  std::ostringstream rows, ratios;
  rows << prov.header() << "model,dataset,round,mean_ll\n";
  ratios << prov.header()
         << "model,dataset,status,mean_ll,ci_half_width,log10_ratio,"
            "log10_ci_half_width,log10_worst,log10_best\n";

  const double l10 = std::log(10.0);
  auto score_rows = [&](const std::string& name, const CvScore& sc) {
    for (int r = 0; r < sc.rounds; ++r)
      rows << name << ',' << data.source << ',' << r << ','
           << fmt(sc.round_means[(std::size_t)r]) << '\n';
  };

  int failures = 0;
  for (const std::string& name : cfg.models) {
    try {
      if (name == "nee") {
        NeeBounds nb = nee_bounds(data, cfg.plan, cfg.fit, std::nullopt, policy);
        score_rows("nee", nb.average);
        score_rows("nee:best", nb.best);
        score_rows("nee:worst", nb.worst);
        ratios << "nee," << data.source << ",ok," << fmt(nb.average.mean) << ','
               << fmt(nb.average.ci_half_width) << ','
               << fmt(nb.average.log10_ratio_vs_uniform) << ','
               << fmt(nb.average.ci_half_width * nb.average.folds / l10) << ','
               << fmt(nb.worst.log10_ratio_vs_uniform) << ','
               << fmt(nb.best.log10_ratio_vs_uniform) << '\n';
      } else {
        Model m = Model::from_name(name);
        CvScore sc = cross_validate(m, data, cfg.plan, cfg.fit, policy);
        score_rows(name, sc);
        ratios << name << ',' << data.source << ",ok," << fmt(sc.mean) << ','
               << fmt(sc.ci_half_width) << ',' << fmt(sc.log10_ratio_vs_uniform) << ','
               << fmt(sc.ci_half_width * sc.folds / l10) << ",,\n";
      }
    } catch (const std::exception& e) {
      ++failures;
      ratios << name << ',' << data.source << ",error:" << sanitize(e.what())
             << ",,,,,,\n";
      std::cerr << "model " << name << " failed: " << e.what() << "\n";
    }
  }

  fs::create_directories(out_dir);
  write_atomic(out_dir / "cv_scores.csv", rows.str());
  write_atomic(out_dir / "ratios.csv", ratios.str());
  return failures == 0 ? 0 : 3;
}

struct PosteriorConfig {
  DataConfig data;
  std::string model;
  std::string method = "grid";
  int samples = 1000;
  double grid_lo = 0.0, grid_hi = 10.0, grid_step = 0.01;
  std::vector<double> masses = {0.95, 0.99};
  std::uint64_t seed = 0;
  bool serial = false;
};

int run_posterior(const PosteriorConfig& cfg, const fs::path& out_dir) {
  Dataset data = cfg.data.assemble();
  ExecPolicy policy = cfg.serial ? ExecPolicy::Serial : ExecPolicy::Parallel;
  Model model = Model::from_name(cfg.model);

  PosteriorSampleSet ps;
  if (cfg.method == "grid") {
    auto grid = grid_posterior_1d(model, data, cfg.grid_lo, cfg.grid_hi,
                                  cfg.grid_step, policy);
    ps = sample_set_from_grid(grid, model.params()[0].name);
  } else {
    ps = ais_posterior(model, data, cfg.samples, AnnealingSchedule::default_schedule(),
                       cfg.seed, {}, {}, policy);
  }

  Provenance prov;
  prov.add("command", "posterior");
  prov.add("model", cfg.model);
  cfg.data.describe(prov);
  prov.add("dataset", data.source);
  prov.add("method", cfg.method);
  if (cfg.method == "grid") {
    prov.add("grid_lo", fmt(cfg.grid_lo));
    prov.add("grid_hi", fmt(cfg.grid_hi));
    prov.add("grid_step", fmt(cfg.grid_step));
  } else {
    prov.add("samples", cfg.samples);
    prov.add("seed", (long long)cfg.seed);
  }
  prov.add("ess", fmt(ps.ess));
  prov.add("acceptance_rate", fmt(ps.acceptance_rate));

  std::ostringstream samples;
  samples << prov.header() << "sample,parameter,value,weight\n";
  std::vector<double> w = ps.normalized_weights();
  for (std::size_t i = 0; i < ps.samples.size(); ++i)
    for (std::size_t k = 0; k < ps.param_names.size(); ++k)
      samples << i << ',' << ps.param_names[k] << ','
              << fmt(ps.samples[i].theta[k]) << ',' << fmt(w[i]) << '\n';

  fs::create_directories(out_dir);
  write_atomic(out_dir / "samples.csv", samples.str());

  std::ostringstream intervals;
  intervals << prov.header() << "parameter,mass,lo,hi\n";
  for (const std::string& p : ps.param_names) {
    std::ostringstream cdf;
    cdf << prov.header() << "value,cum\n";
    for (const CdfPoint& pt : marginal_cdf(ps, p))
      cdf << fmt(pt.value) << ',' << fmt(pt.cum) << '\n';
    write_atomic(out_dir / ("cdf_" + p + ".csv"), cdf.str());
    for (double m : cfg.masses) {
      auto [lo, hi] = credible_interval(ps, p, m);
      intervals << p << ',' << fmt(m) << ',' << fmt(lo) << ',' << fmt(hi) << '\n';
    }
  }
  write_atomic(out_dir / "intervals.csv", intervals.str());
  return 0;
}

int run_qre_path(const std::string& game_path, double lambda_max, int steps,
                 const fs::path& out_dir) {
  Game g = normalize_payoffs(load_game(game_path));
  std::vector<QrePathPoint> path = qre_path(g, lambda_max, steps);

  Provenance prov;
  prov.add("command", "qre-path");
  prov.add("game", game_path);
  prov.add("lambda_max", fmt(lambda_max));
  prov.add("steps", steps);

  std::ostringstream rows;
  rows << prov.header() << "lambda,residual,player,action,prob\n";
  for (const QrePathPoint& pt : path)
    for (int p = 0; p < 2; ++p)
      for (int a = 0; a < g.num_actions(p); ++a)
        rows << fmt(pt.lambda) << ',' << fmt(pt.residual) << ',' << p << ',' << a
             << ',' << fmt(pt.profile.strategies[(std::size_t)p][(std::size_t)a])
             << '\n';

  fs::create_directories(out_dir);
  write_atomic(out_dir / "qre_path.csv", rows.str());
  return 0;
}

int run_synth(const DataConfig& dc, const std::string& model_name,
              const std::vector<double>& theta, int n_obs, std::uint64_t seed,
              const fs::path& out_dir) {
  Dataset pool = dc.assemble();
  Model model = Model::from_name(model_name);
  Dataset synth = generate_synthetic(model, theta, pool.games, n_obs, seed);
  fs::create_directories(out_dir);
  save_dataset(synth, out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"behavioral model estimation toolkit for one-shot games"};
  app.require_subcommand(1);

  DataConfig dc;
  std::string out_dir;
  auto add_data_flags = [&](CLI::App* cmd, bool need_out = true) {
    cmd->add_option("--manifest", dc.manifests, "dataset manifest (repeatable)")
        ->required();
    cmd->add_option("--filter", dc.filter, "keep games with this feature");
    cmd->add_option("--subsample", dc.subsample,
                    "observations drawn per source (0 = all)");
    if (need_out)
      cmd->add_option("--out", out_dir, "output directory")->required();
  };

  CLI::App* classify = app.add_subcommand(
      "classify", "dominance and equilibrium structure of the pooled games");
  add_data_flags(classify);
  std::uint64_t classify_seed = 0;
  classify->add_option("--seed", classify_seed, "subsample seed");

  CvConfig cv;
  CLI::App* cv_cmd = app.add_subcommand("cv", "cross-validated model comparison");
  add_data_flags(cv_cmd);
  cv_cmd->add_option("--models", cv.models, "model names, comma separated")
      ->required()
      ->delimiter(',');
  cv_cmd->add_option("--rounds", cv.plan.rounds, "CV rounds");
  cv_cmd->add_option("--folds", cv.plan.folds, "folds per round");
  std::string fold_unit = "obs";
  cv_cmd->add_option("--fold-unit", fold_unit, "obs or game")
      ->check(CLI::IsMember({"obs", "game"}));
  cv_cmd->add_option("--seed", cv.plan.seed, "run seed")->required();
  cv_cmd->add_option("--restarts", cv.fit.restarts, "optimizer restarts");
  cv_cmd->add_option("--max-evals", cv.fit.max_evals, "objective evaluation budget");
  cv_cmd->add_flag("--serial", cv.serial, "disable parallel execution");

  PosteriorConfig post;
  CLI::App* post_cmd = app.add_subcommand("posterior", "parameter posterior report");
  add_data_flags(post_cmd);
  post_cmd->add_option("--model", post.model, "model name")->required();
  post_cmd->add_option("--method", post.method, "grid or ais")
      ->check(CLI::IsMember({"grid", "ais"}));
  post_cmd->add_option("--samples", post.samples, "AIS sample count");
  post_cmd->add_option("--grid-lo", post.grid_lo, "grid lower bound");
  post_cmd->add_option("--grid-hi", post.grid_hi, "grid upper bound");
  post_cmd->add_option("--grid-step", post.grid_step, "grid step");
  post_cmd->add_option("--mass", post.masses, "credible interval mass (repeatable)");
  CLI::Option* post_seed = post_cmd->add_option("--seed", post.seed, "run seed");
  post_cmd->add_flag("--serial", post.serial, "disable parallel execution");

  std::string qp_game;
  double qp_lambda_max = 10.0;
  int qp_steps = 100;
  CLI::App* qp_cmd =
      app.add_subcommand("qre-path", "logit equilibrium path of one game");
  qp_cmd->add_option("--game", qp_game, "game JSON file")->required();
  qp_cmd->add_option("--lambda-max", qp_lambda_max, "path endpoint");
  qp_cmd->add_option("--steps", qp_steps, "path points after lambda 0");
  qp_cmd->add_option("--out", out_dir, "output directory")->required();

  std::string synth_model;
  std::vector<double> synth_theta;
  int synth_n = 0;
  std::uint64_t synth_seed = 0;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "sample a synthetic dataset from a model");
  add_data_flags(synth_cmd);
  synth_cmd->add_option("--model", synth_model, "model name")->required();
  synth_cmd->add_option("--theta", synth_theta, "parameter values, comma separated")
      ->delimiter(',');
  synth_cmd->add_option("--n-obs", synth_n, "observations to draw")->required();
  synth_cmd->add_option("--seed", synth_seed, "run seed")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify) {
      dc.seed = classify_seed;
      if (dc.subsample > 0 && !classify->count("--seed"))
        throw std::runtime_error("--subsample needs --seed");
      return run_classify(dc, out_dir);
    }
    if (*cv_cmd) {
      cv.plan.unit = fold_unit == "obs" ? FoldUnit::Observation : FoldUnit::Game;
      cv.fit.seed = cv.plan.seed;
      dc.seed = cv.plan.seed;
      cv.data = dc;
      return run_cv(cv, out_dir);
    }
    if (*post_cmd) {
      if ((post.method == "ais" || dc.subsample > 0) && !*post_seed)
        throw std::runtime_error("--seed is required for ais or --subsample");
      dc.seed = post.seed;
      post.data = dc;
      return run_posterior(post, out_dir);
    }
    if (*qp_cmd) return run_qre_path(qp_game, qp_lambda_max, qp_steps, out_dir);
    if (*synth_cmd) {
      dc.seed = synth_seed;
      if (dc.subsample > 0 && !synth_cmd->count("--seed"))
        throw std::runtime_error("--subsample needs --seed");
      return run_synth(dc, synth_model, synth_theta, synth_n, synth_seed, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
