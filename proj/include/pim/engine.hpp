#pragma once

#include "pim/contour.hpp"
#include "pim/eta.hpp"
#include "pim/models.hpp"
#include "pim/priors.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace pim {

enum class EngineKind { mc, importance, pivot, exact };
enum class ChoquetRule { automatic, midpoint, exact };

struct IMConfig {
  ParamDomain grid;
  std::size_t mc_size = 10000;
  std::size_t alpha_levels = 100;
  std::uint64_t seed = 0;
  EngineKind engine = EngineKind::mc;
  ChoquetRule rule = ChoquetRule::automatic;
  // grid point to model parameter, identity when empty
  ParamMap embed;

  void validate() const;
  Param param(Index i) const;
  std::vector<Param> params() const;
};

const char* engine_name(EngineKind e);

Contour im_vacuous(const Model& m, const Data& y, const IMConfig& cfg);
Contour im_vacuous_naive(const Model& m, const Data& y, const IMConfig& cfg);
Contour im_partial(const Model& m, const PossibilisticPrior& p, const Data& y, const IMConfig& cfg);
Contour im_complete(const Model& m, const PrecisePrior& p, const Data& y, const IMConfig& cfg);
Contour im_importance(const Model& m, const Data& y, const IMConfig& cfg);

// exact Choquet sum when the prior is read as a step function on the grid
double choquet_step(std::span<const double> q, std::span<const double> prob);

// Choquet integral of a grid function against a possibilistic prior, step or midpoint rule
class ChoquetIntegrator {
 public:
  ChoquetIntegrator() = default;
  ChoquetIntegrator(const PossibilisticPrior& p, const std::vector<Param>& thetas, std::vector<double> q, ChoquetRule rule,
                    std::size_t levels);
  double operator()(const std::vector<double>& prob) const;
  bool exact() const { return exact_; }

 private:
  std::vector<double> q_;
  bool exact_ = false;
  std::vector<std::size_t> by_q_;
  std::vector<std::vector<std::size_t>> cuts_;
};

// prior contour on the grid, zero off the model's parameter space
std::vector<double> prior_on_grid(const Model& m, const PossibilisticPrior& p, const std::vector<Param>& thetas);

// Partial-prior IM with every per-grid calibration drawn up front, so point queries are cheap.
class PartialIM {
 public:
  PartialIM(const Model& m, const PossibilisticPrior& p, IMConfig cfg);

  double plausibility(const Data& y, const Param& theta) const;
  double plausibility_at(const Data& y, const Param& theta, double log_sup) const;
  Contour contour(const Data& y) const;
  const BaselineOrder& order() const { return order_; }

 private:
  const Model& m_;
  const PossibilisticPrior& p_;
  IMConfig cfg_;
  std::vector<Param> thetas_;
  BaselineOrder order_;
  std::vector<EtaDistribution> dist_;
  std::vector<double> q_;
  ChoquetIntegrator choquet_;
};

struct PosteriorSample {
  std::vector<Param> draws;
  Arr weights;
  double ess = 0.0;
  bool conjugate = false;
};

// conjugate draws where available, else self-normalized importance sampling from the prior
PosteriorSample posterior_sample(const Model& m, const PrecisePrior& p, const Data& y, std::size_t draws, Rng& rng);

// posterior probability-to-possibility transform at one point
double complete_plausibility(const Model& m, const PrecisePrior& p, const Data& y, const Param& theta,
                             std::size_t draws, Rng& rng);

}  // namespace pim
