#pragma once

#include "pim/contour.hpp"
#include "pim/models.hpp"
#include "pim/optimize.hpp"
#include "pim/priors.hpp"

#include <utility>
#include <vector>

namespace pim {

// Distribution of log eta(Y, theta) for one fixed theta: equal-weight draws or exact masses.
class EtaDistribution {
 public:
  EtaDistribution() = default;
  static EtaDistribution sampled(std::vector<double> log_eta);
  static EtaDistribution weighted(std::vector<std::pair<double, double>> log_eta_mass, bool exact = true);

  // P{log eta <= log_t}, ties within tie_tol count
  double cdf(double log_t) const;
  double std_err(double log_t) const;
  std::size_t draws() const { return n_; }
  bool exact() const { return exact_; }
  double effective_size() const { return ess_; }

 private:
  std::vector<double> x_;
  std::vector<double> cum_;
  std::size_t n_ = 0;
  double ess_ = 0.0;
  bool exact_ = false;
};

class EtaOrder {
 public:
  virtual ~EtaOrder() = default;
  virtual double log_eta(const Data& y, const Param& theta) const = 0;
};

class RelativeLikelihoodOrder : public EtaOrder {
 public:
  explicit RelativeLikelihoodOrder(const Model& m) : m_(m) {}
  double log_eta(const Data& y, const Param& theta) const override { return m_.log_rel_lik(theta, y); }

 private:
  const Model& m_;
};

// p_theta(y) w(theta) / sup_t p_t(y) w(t), the sup taken over a search grid with local polishing
class BaselineOrder : public EtaOrder {
 public:
  BaselineOrder(const Model& m, const Prior& p, std::vector<Param> search);
  double log_eta(const Data& y, const Param& theta) const override;
  Optimum mode(const Data& y) const;
  double log_eta_at(const Data& y, const Param& theta, double log_sup) const;

 private:
  double joint(const Data& y, const Param& theta) const;
  const Model& m_;
  const Prior& p_;
  std::vector<Param> search_;
  bool interval_1d_ = false;
};

EtaDistribution calibrate_mc(const Model& m, const EtaOrder& eta, const Param& theta, std::size_t draws, Rng& rng);
EtaDistribution calibrate_exact(const Model& m, const EtaOrder& eta, const Param& theta);

}  // namespace pim
