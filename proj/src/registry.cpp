#include <algorithm>
#include <stdexcept>

#include "bgt/models.hpp"

namespace bgt {
namespace {

// Belief-precision parameters for general-precision-belief variants, one per
// nesting path. `chain` lists believers from outermost real level inward;
// names read inner-to-outer: lambda1(2,3) = level 1 as simulated by 2 inside 3.
void walk_belief_params(PopulationBeliefs beliefs, int believer,
                        std::vector<int>& chain, std::vector<ParamDef>& out) {
  chain.push_back(believer);
  int lo = beliefs == PopulationBeliefs::Lk ? believer - 1 : 1;
  for (int j = believer - 1; j >= std::max(lo, 1); --j) {
    std::string name = "lambda" + std::to_string(j) + "(";
    for (std::size_t i = chain.size(); i-- > 0;) {
      name += std::to_string(chain[i]);
      if (i > 0) name += ",";
    }
    name += ")";
    out.push_back({name, ParamKind::Precision});
    if (j >= 2) walk_belief_params(beliefs, j, chain, out);
  }
  chain.pop_back();
}

std::vector<ParamDef> variant_schema(const ModelSpec& s) {
  std::vector<ParamDef> out;
  if (s.level_dist == LevelDistKind::Tabular) {
    for (int k = 1; k <= s.max_level; ++k)
      out.push_back({"alpha" + std::to_string(k), ParamKind::Proportion});
  } else {
    out.push_back({"tau", ParamKind::PoissonMean});
    if (s.level_dist == LevelDistKind::SpikePoisson)
      out.push_back({"eps", ParamKind::Rate});
  }
  if (s.precisions == Precisions::Homogeneous) {
    out.push_back({"lambda", ParamKind::Precision});
  } else {
    for (int k = 1; k <= s.max_level; ++k)
      out.push_back({"lambda" + std::to_string(k), ParamKind::Precision});
  }
  if (s.precision_beliefs == PrecisionBeliefs::General) {
    std::vector<int> chain;
    for (int k = 2; k <= s.max_level; ++k)
      walk_belief_params(s.beliefs, k, chain, out);
  }
  return out;
}

ModelSpec variant(std::string name, PopulationBeliefs b, PrecisionBeliefs pb,
                  Precisions pr, LevelDistKind ld, int max_level) {
  ModelSpec s;
  s.family = ld == LevelDistKind::SpikePoisson ? Family::SpikePoissonQch
                                               : Family::VariantGrid;
  s.level_dist = ld;
  s.max_level = max_level;
  s.beliefs = b;
  s.precisions = pr;
  s.precision_beliefs = pb;
  s.name = std::move(name);
  return s;
}

std::vector<ModelSpec> build_registry() {
  using PB = PopulationBeliefs;
  using PR = Precisions;
  using PC = PrecisionBeliefs;
  using LD = LevelDistKind;
  std::vector<ModelSpec> r;

  ModelSpec plain;
  plain.name = "uniform";
  plain.family = Family::Uniform;
  r.push_back(plain);
  plain.name = "QRE";
  plain.family = Family::Qre;
  r.push_back(plain);
  plain.name = "Lk";
  plain.family = Family::Lk;
  plain.max_level = 2;
  r.push_back(plain);
  plain.name = "PCH";
  plain.family = Family::PoissonCh;
  plain.level_dist = LD::Poisson;
  r.push_back(plain);
  plain.name = "QLk";
  plain.family = Family::QLk;
  plain.level_dist = LD::Tabular;
  plain.max_level = 2;
  r.push_back(plain);
  plain.name = "NEE";
  plain.family = Family::Nee;
  plain.max_level = 1;
  r.push_back(plain);

  // Variant grid: level-1 axes coincide, so QLk1 is the single level-1 entry.
  r.push_back(variant("QLk1", PB::Lk, PC::Accurate, PR::Inhomogeneous, LD::Tabular, 1));
  for (int level = 2; level <= 3; ++level) {
    for (PB b : {PB::Lk, PB::Ch}) {
      std::string base = b == PB::Lk ? "QLk" : "QCH";
      std::string lvl = std::to_string(level);
      r.push_back(variant("gi-" + base + lvl, b, PC::General, PR::Inhomogeneous, LD::Tabular, level));
      r.push_back(variant("ai-" + base + lvl, b, PC::Accurate, PR::Inhomogeneous, LD::Tabular, level));
      r.push_back(variant("gh-" + base + lvl, b, PC::General, PR::Homogeneous, LD::Tabular, level));
      r.push_back(variant("ah-" + base + lvl, b, PC::Accurate, PR::Homogeneous, LD::Tabular, level));
    }
  }
  for (PB b : {PB::Lk, PB::Ch}) {
    std::string base = b == PB::Lk ? "QLk" : "QCH";
    r.push_back(variant("ai-" + base + "4", b, PC::Accurate, PR::Inhomogeneous, LD::Tabular, 4));
    for (int level = 4; level <= 7; ++level)
      r.push_back(variant("ah-" + base + std::to_string(level), b, PC::Accurate,
                          PR::Homogeneous, LD::Tabular, level));
    r.push_back(variant("ah-" + base + "p", b, PC::Accurate, PR::Homogeneous, LD::Poisson, 0));
  }
  r.push_back(variant("ah-QCH-sp", PB::Ch, PC::Accurate, PR::Homogeneous, LD::SpikePoisson, 0));
  return r;
}

}  // namespace

void ModelSpec::validate() const {
  if (family == Family::VariantGrid || family == Family::SpikePoissonQch) {
    if (level_dist == LevelDistKind::Tabular && max_level < 1)
      throw std::invalid_argument("variant model needs max_level >= 1");
    if (precision_beliefs == PrecisionBeliefs::General &&
        level_dist != LevelDistKind::Tabular)
      throw std::invalid_argument(
          "general precision beliefs require a tabular level distribution");
  }
}

std::vector<ParamDef> param_schema(const ModelSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case Family::Uniform:
      return {};
    case Family::Qre:
      return {{"lambda", ParamKind::Precision}};
    case Family::Lk:
      return {{"alpha1", ParamKind::Proportion},
              {"alpha2", ParamKind::Proportion},
              {"eps1", ParamKind::Rate},
              {"eps2", ParamKind::Rate}};
    case Family::PoissonCh:
      return {{"tau", ParamKind::PoissonMean}};
    case Family::QLk:
      return {{"alpha1", ParamKind::Proportion},
              {"alpha2", ParamKind::Proportion},
              {"lambda1", ParamKind::Precision},
              {"lambda2", ParamKind::Precision},
              {"lambda1(2)", ParamKind::Precision}};
    case Family::Nee:
      return {{"eps", ParamKind::Rate}};
    case Family::VariantGrid:
    case Family::SpikePoissonQch:
      return variant_schema(spec);
  }
  throw std::logic_error("unknown family");
}

const std::vector<ModelSpec>& model_registry() {
  static const std::vector<ModelSpec> reg = build_registry();
  return reg;
}

ModelSpec spec_from_name(const std::string& name) {
  for (const ModelSpec& s : model_registry())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown model name: " + name);
}

}  // namespace bgt
