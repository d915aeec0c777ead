#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "bgt/game.hpp"
#include "bgt/nash.hpp"

namespace bgt {

enum class Family { Uniform, Qre, Lk, PoissonCh, QLk, VariantGrid, SpikePoissonQch, Nee };
enum class PopulationBeliefs { Lk, Ch };    // respond to level k-1 only, or to the
                                            // truncated mixture of levels 0..k-1
enum class Precisions { Homogeneous, Inhomogeneous };
enum class PrecisionBeliefs { Accurate, General };
enum class LevelDistKind { Tabular, Poisson, SpikePoisson };

struct ModelSpec {
  Family family = Family::Uniform;
  LevelDistKind level_dist = LevelDistKind::Tabular;
  int max_level = 1;  // tabular only
  PopulationBeliefs beliefs = PopulationBeliefs::Lk;
  Precisions precisions = Precisions::Homogeneous;
  PrecisionBeliefs precision_beliefs = PrecisionBeliefs::Accurate;
  std::string name;

  void validate() const;  // throws std::invalid_argument
};

enum class ParamKind { Proportion, Precision, PoissonMean, Rate };

struct ParamDef {
  std::string name;
  ParamKind kind;
};

// Ordered parameter schema for a model: proportions (or tau/eps for Poisson
// level distributions), then own precisions, then belief precisions for
// general-precision-belief variants (named by nesting path, e.g. lambda1(2,3)
// is the precision ascribed to level 1 inside level 3's simulation of level 2).
std::vector<ParamDef> param_schema(const ModelSpec& spec);

// The model registry: the full quantal variant grid (QLk1, {a,g}{h,i}-QLk/QCH
// at levels 2..7 where defined, the Poisson-level variants, ah-QCH-sp) plus
// QRE, Lk, PCH, QLk, NEE and the zero-parameter uniform baseline.
const std::vector<ModelSpec>& model_registry();
ModelSpec spec_from_name(const std::string& name);

// --- individual predictors ---

// Level-k with best responses computed against the uniform mix over the
// opponent's surviving best-response set; level-k errs with rate eps_k spread
// over non-best actions. A level whose best-response set is all actions plays
// uniformly.
ActionDistribution predict_lk(const Game& g, int player, double alpha1,
                              double alpha2, double eps1, double eps2);

// Poisson cognitive hierarchy: level m best responds (uniformly over ties) to
// the opponent mixture of levels 0..m-1 reweighted by Poisson(tau), truncated
// at the smallest level keeping mass 1 - 1e-6 (cap 20) and renormalized.
ActionDistribution predict_poisson_ch(const Game& g, int player, double tau);

// Two-level quantal hierarchy: level 1 responds to uniform at lambda1;
// level 2 responds at lambda2 to a level-1 opponent imagined at lambda12.
ActionDistribution predict_qlk(const Game& g, int player, double alpha1,
                               double alpha2, double lambda1, double lambda2,
                               double lambda12);

// Quantal CH with level masses f(0) = eps + (1-eps)Poisson(0;tau),
// f(m) = (1-eps)Poisson(m;tau); every level shares one precision lambda.
ActionDistribution predict_spike_poisson_qch(const Game& g, int player,
                                             double tau, double eps,
                                             double lambda);

// (1-eps) * equilibrium + eps * uniform; eq_index selects one equilibrium,
// nullopt averages the expression over all of them.
ActionDistribution predict_nee(const Game& g, int player, double eps,
                               std::optional<int> eq_index,
                               const EquilibriumSet& eqs);

// Generic predictor for any VariantGrid/SpikePoisson spec.
ActionDistribution predict_variant(const Game& g, int player,
                                   const ModelSpec& spec,
                                   std::span<const double> theta);

// Poisson masses for levels 0..L (truncated, renormalized); spike_eps adds
// the level-0 spike.
std::vector<double> truncated_level_masses(double tau, double spike_eps);

// A model bound to its parameter schema. bind() precomputes the equilibrium
// sets NEE needs; predict is pure and safe to call concurrently.
class Model {
 public:
  explicit Model(ModelSpec spec);
  static Model from_name(const std::string& name) { return Model(spec_from_name(name)); }

  const ModelSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  const std::vector<ParamDef>& params() const { return params_; }
  int num_params() const { return (int)params_.size(); }

  void validate_theta(std::span<const double> theta) const;
  void bind(const std::vector<const Game*>& games);

  ActionDistribution predict(const Game& g, int player,
                             std::span<const double> theta) const;

 private:
  ModelSpec spec_;
  std::vector<ParamDef> params_;
  std::map<std::string, EquilibriumSet> eq_cache_;
};

}  // namespace bgt
