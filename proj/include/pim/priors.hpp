#pragma once

#include "pim/contour.hpp"
#include "pim/core.hpp"
#include "pim/rng.hpp"

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pim {

enum class PriorKind { vacuous, precise, possibilistic };

using Intervals = std::vector<std::pair<double, double>>;

class Prior {
 public:
  virtual ~Prior() = default;
  virtual PriorKind kind() const = 0;
  virtual std::string name() const = 0;
  // the prior factor in the plausibility order
  virtual double weight(const Param& theta) const = 0;
  virtual double log_weight(const Param& theta) const;
};

class PrecisePrior : public Prior {
 public:
  PriorKind kind() const override { return PriorKind::precise; }
  virtual double log_density(const Param& theta) const = 0;
  virtual Param sample(Rng& rng) const = 0;
  double weight(const Param& theta) const override;
  double log_weight(const Param& theta) const override { return log_density(theta); }
};

class PossibilisticPrior : public Prior {
 public:
  PriorKind kind() const override { return PriorKind::possibilistic; }
  virtual double contour(const Param& theta) const = 0;
  double weight(const Param& theta) const override { return contour(theta); }
  // strict superlevel set {contour > alpha}
  virtual bool in_cut(double alpha, const Param& theta) const { return contour(theta) > alpha; }
  // 1-D cut restricted to an interval axis; grid-exact unless overridden
  virtual Intervals alpha_cut(double alpha, const IntervalAxis& axis) const;
  // contour is piecewise constant on the evaluation grid, so the Choquet sum is exact
  virtual bool stepwise() const { return false; }
};

class VacuousPrior : public PossibilisticPrior {
 public:
  PriorKind kind() const override { return PriorKind::vacuous; }
  std::string name() const override { return "vacuous"; }
  double contour(const Param&) const override { return 1.0; }
  bool stepwise() const override { return true; }
};

class MarkovPrior : public PossibilisticPrior {
 public:
  explicit MarkovPrior(double k);
  double k() const { return k_; }
  std::string name() const override { return "markov"; }
  double contour(const Param& theta) const override;
  bool in_cut(double alpha, const Param& theta) const override;
  Intervals alpha_cut(double alpha, const IntervalAxis& axis) const override;

 private:
  double k_;
};

class PointMassPrior : public PossibilisticPrior {
 public:
  explicit PointMassPrior(Param at) : at_(std::move(at)) {}
  std::string name() const override { return "point-mass"; }
  double contour(const Param& theta) const override;
  bool stepwise() const override { return true; }

 private:
  Param at_;
};

// contour on finitely many atoms, zero elsewhere
class DiscretePrior : public PossibilisticPrior {
 public:
  DiscretePrior(std::vector<Param> atoms, std::vector<double> values);
  static DiscretePrior from_masses(std::vector<Param> atoms, std::span<const double> masses);
  std::string name() const override { return "discrete"; }
  double contour(const Param& theta) const override;
  bool stepwise() const override { return true; }
  const std::vector<Param>& atoms() const { return atoms_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<Param> atoms_;
  std::vector<double> values_;
};

// contour carried on a grid, interpolated in between
class GridPrior : public PossibilisticPrior {
 public:
  explicit GridPrior(Contour c) : c_(std::move(c)) {}
  std::string name() const override { return "grid"; }
  double contour(const Param& theta) const override { return c_.at(theta); }
  bool stepwise() const override { return true; }
  const Contour& grid_contour() const { return c_; }

 private:
  Contour c_;
};

class BetaPrior : public PrecisePrior {
 public:
  BetaPrior(double a, double b);
  double a() const { return a_; }
  double b() const { return b_; }
  std::string name() const override { return "beta"; }
  double log_density(const Param& theta) const override;
  Param sample(Rng& rng) const override;

 private:
  double a_, b_, lbeta_;
};

class NormalPrior : public PrecisePrior {
 public:
  NormalPrior(double mean, double sd);
  double mean() const { return mean_; }
  double sd() const { return sd_; }
  std::string name() const override { return "normal"; }
  double log_density(const Param& theta) const override;
  Param sample(Rng& rng) const override;

 private:
  double mean_, sd_;
};

double prior_weight(const Prior& p, const Param& theta);

// exact transform for a discrete distribution: tail sums of the ordered masses
std::vector<double> prob2poss(std::span<const double> masses);

// Monte Carlo transform of a 1-D density onto a grid, standard errors kept per point
GridPrior prob2poss(const PrecisePrior& p, const ParamDomain& grid, std::size_t mc, Rng& rng);

}  // namespace pim
