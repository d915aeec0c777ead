#include "bgt/data_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bgt/dominance.hpp"
#include "bgt/nash.hpp"
#include "bgt/rng.hpp"

namespace bgt {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSubsampleTag = 0x5ab5, kSynthTag = 0x541;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

// Sources combined into one dataset must not share game ids: observations
// reference games by id, so a collision would be ambiguous.
Dataset union_of(const std::vector<Dataset>& sources) {
  if (sources.empty()) throw std::invalid_argument("no datasets given");
  Dataset out;
  std::set<std::string> ids;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (s) out.source += "+";
    out.source += sources[s].source;
    for (const Game& g : sources[s].games) {
      if (!ids.insert(g.id).second)
        throw std::invalid_argument("duplicate game id across datasets: " + g.id);
      out.games.push_back(g);
    }
  }
  return out;
}

int draw_action(const ActionDistribution& p, std::mt19937_64& rng) {
  double u = uniform01(rng), cum = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    cum += p[a];
    if (u < cum) return (int)a;
  }
  return (int)p.size() - 1;
}

}  // namespace

Game load_game(const std::filesystem::path& path) {
  json j = parse_file(path);
  Game g;
  try {
    g.id = j.at("id").get<std::string>();
    g.unit_factor = j.at("unit_factor").get<double>();
    for (int p = 0; p < 2; ++p)
      g.actions[(std::size_t)p] = j.at("actions").at((std::size_t)p).get<std::vector<std::string>>();
    for (int p = 0; p < 2; ++p) {
      const json& m = j.at("payoffs").at((std::size_t)p);
      for (const json& row : m)
        for (const json& cell : row) g.payoffs[(std::size_t)p].push_back(cell.get<double>());
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  try {
    g.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return g;
}

void save_game(const Game& g, const std::filesystem::path& path) {
  json j;
  j["id"] = g.id;
  j["unit_factor"] = g.unit_factor;
  // json::array keeps two-element string vectors from collapsing into an object
  j["actions"] = json::array({g.actions[0], g.actions[1]});
  json mats = json::array();
  for (int p = 0; p < 2; ++p) {
    json m = json::array();
    for (int i = 0; i < g.num_actions(0); ++i) {
      json row = json::array();
      for (int k = 0; k < g.num_actions(1); ++k) row.push_back(g.payoff(p, i, k));
      m.push_back(row);
    }
    mats.push_back(m);
  }
  j["payoffs"] = mats;
  write_text(path, j.dump(2) + "\n");
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  json j = parse_file(path);
  DatasetManifest m;
  try {
    m.source = j.at("source").get<std::string>();
    m.unit_factor = j.at("unit_factor").get<double>();
    m.games = j.at("games").get<std::vector<std::string>>();
    m.observations = j.at("observations").get<std::string>();
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  if (!(m.unit_factor > 0.0))
    throw std::runtime_error(path.string() + ": unit_factor must be positive");
  return m;
}

std::vector<Observation> load_observations_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) !=
          std::vector<std::string>{"game_id", "player_role", "action_index", "count"})
    throw std::runtime_error(path.string() +
                             ": expected header game_id,player_role,action_index,count");
  std::vector<Observation> obs;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 4)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 4 fields, got " + std::to_string(f.size()));
    Observation o;
    o.game_id = f[0];
    try {
      o.player_role = std::stoi(f[1]);
      o.action = std::stoi(f[2]);
      o.count = std::stoi(f[3]);
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": non-numeric field");
    }
    obs.push_back(std::move(o));
  }
  return obs;
}

void save_observations_csv(std::span<const Observation> obs,
                           const std::filesystem::path& path) {
  std::ostringstream out;
  out << "game_id,player_role,action_index,count\n";
  for (const Observation& o : obs)
    out << o.game_id << ',' << o.player_role << ',' << o.action << ',' << o.count << '\n';
  write_text(path, out.str());
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  DatasetManifest m = load_manifest(manifest_path);
  std::filesystem::path dir = manifest_path.parent_path();
  Dataset d;
  d.source = m.source;
  for (const std::string& rel : m.games) {
    Game g = load_game(dir / rel);
    g.unit_factor = m.unit_factor * 100.0;  // dollars per point -> cents per point
    d.games.push_back(normalize_payoffs(g));
  }
  d.observations = load_observations_csv(dir / m.observations);
  d.aggregate();
  d.validate();
  return d;
}

std::filesystem::path save_dataset(const Dataset& data,
                                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "games");
  json manifest;
  manifest["source"] = data.source;
  // games are stored normalized (cents); 0.01 dollars/point loads as identity
  manifest["unit_factor"] = 0.01;
  json paths = json::array();
  for (const Game& g : data.games) {
    std::string rel = "games/" + g.id + ".json";
    save_game(g, dir / rel);
    paths.push_back(rel);
  }
  manifest["games"] = paths;
  manifest["observations"] = "observations.csv";
  save_observations_csv(data.observations, dir / "observations.csv");
  std::filesystem::path mpath = dir / "manifest.json";
  write_text(mpath, manifest.dump(2) + "\n");
  return mpath;
}

Dataset combine_datasets(const std::vector<Dataset>& sources) {
  Dataset out = union_of(sources);
  for (const Dataset& s : sources)
    for (const Observation& o : s.observations) out.observations.push_back(o);
  out.aggregate();
  out.validate();
  return out;
}

Dataset subsample_combine(const std::vector<Dataset>& sources, int n_per,
                          std::uint64_t seed) {
  if (n_per < 0) throw std::invalid_argument("n_per must be non-negative");
  Dataset out = union_of(sources);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    std::vector<Observation> units;
    for (const Observation& o : sources[s].observations)
      for (int k = 0; k < o.count; ++k)
        units.push_back({o.game_id, o.player_role, o.action, 1});
    if ((int)units.size() < n_per)
      throw std::runtime_error("dataset " + sources[s].source + " has " +
                               std::to_string(units.size()) +
                               " observations, fewer than " + std::to_string(n_per));
    std::mt19937_64 rng = substream(seed, {kSubsampleTag, (std::uint64_t)s});
    for (int i = 0; i < n_per; ++i) {
      std::uniform_int_distribution<std::size_t> pick((std::size_t)i, units.size() - 1);
      std::swap(units[(std::size_t)i], units[pick(rng)]);
      out.observations.push_back(units[(std::size_t)i]);
    }
  }
  out.aggregate();
  out.validate();
  return out;
}

const std::vector<std::pair<std::string, FeatureFilter>>& filter_names() {
  static const std::vector<std::pair<std::string, FeatureFilter>> table = {
      {"D1", FeatureFilter::D1},         {"D2", FeatureFilter::D2},
      {"D2s", FeatureFilter::D2s},       {"DS", FeatureFilter::DS},
      {"DSs", FeatureFilter::DSs},       {"ND", FeatureFilter::ND},
      {"PSNE1", FeatureFilter::Psne1},   {"MSNE1", FeatureFilter::Msne1},
      {"MultiEqm", FeatureFilter::MultiEqm}};
  return table;
}

FeatureFilter filter_from_name(const std::string& name) {
  for (const auto& [n, f] : filter_names())
    if (n == name) return f;
  std::string valid;
  for (const auto& [n, f] : filter_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown filter '" + name + "' (valid: " + valid + ")");
}

bool game_has_feature(const Game& g, FeatureFilter filter) {
  switch (filter) {
    case FeatureFilter::D1:
    case FeatureFilter::D2:
    case FeatureFilter::D2s:
    case FeatureFilter::DS:
    case FeatureFilter::DSs:
    case FeatureFilter::ND: {
      DominanceClassification c = classify_dominance(g);
      switch (filter) {
        case FeatureFilter::D1: return c.solvable_weak && *c.rounds_weak <= 1;
        case FeatureFilter::D2: return c.solvable_weak && *c.rounds_weak <= 2;
        case FeatureFilter::D2s: return c.solvable_strict && *c.rounds_strict <= 2;
        case FeatureFilter::DS: return c.solvable_weak;
        case FeatureFilter::DSs: return c.solvable_strict;
        default: return !c.solvable_weak;
      }
    }
    case FeatureFilter::Psne1:
    case FeatureFilter::Msne1:
    case FeatureFilter::MultiEqm: {
      EquilibriumSet eqs = enumerate_nash(g);
      if (filter == FeatureFilter::Psne1)
        return eqs.structure == EquilibriumStructure::SinglePure;
      if (filter == FeatureFilter::Msne1)
        return eqs.structure == EquilibriumStructure::SingleMixed;
      return eqs.structure == EquilibriumStructure::Multiple;
    }
  }
  throw std::logic_error("unhandled filter");
}

Dataset filter_by_feature(const std::vector<Dataset>& sources, FeatureFilter filter) {
  Dataset pool = combine_datasets(sources);
  Dataset out;
  out.source = pool.source;
  std::set<std::string> kept;
  for (const Game& g : pool.games) {
    bool keep;
    try {
      keep = game_has_feature(g, filter);
    } catch (const std::exception& e) {
      throw std::runtime_error("cannot classify game '" + g.id + "': " + e.what());
    }
    if (keep) {
      out.games.push_back(g);
      kept.insert(g.id);
    }
  }
  for (const Observation& o : pool.observations)
    if (kept.count(o.game_id)) out.observations.push_back(o);
  out.aggregate();
  out.validate();
  return out;
}

Dataset generate_synthetic(const Model& model, std::span<const double> theta,
                           const std::vector<Game>& games, int n_obs,
                           std::uint64_t seed) {
  if (games.empty()) throw std::invalid_argument("generate_synthetic: no games");
  if (n_obs < 0) throw std::invalid_argument("generate_synthetic: negative n_obs");
  model.validate_theta(theta);

  Dataset d;
  d.source = "synthetic-" + model.name();
  d.games = games;

  Model bound = model;
  std::vector<const Game*> gp;
  for (const Game& g : d.games) gp.push_back(&g);
  bound.bind(gp);

  std::vector<std::array<ActionDistribution, 2>> pred(games.size());
  for (std::size_t gi = 0; gi < games.size(); ++gi)
    for (int p = 0; p < 2; ++p)
      pred[gi][(std::size_t)p] = bound.predict(d.games[gi], p, theta);

  std::mt19937_64 rng = substream(seed, {kSynthTag});
  int emitted = 0;
  for (std::size_t play = 0; emitted < n_obs; ++play) {
    std::size_t gi = play % games.size();
    d.observations.push_back({d.games[gi].id, 1, draw_action(pred[gi][0], rng), 1});
    if (++emitted == n_obs) break;
    d.observations.push_back({d.games[gi].id, 2, draw_action(pred[gi][1], rng), 1});
    ++emitted;
  }
  d.aggregate();
  d.validate();
  return d;
}

}  // namespace bgt
