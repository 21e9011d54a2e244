#pragma once

#include "pim/contour.hpp"
#include "pim/engine.hpp"
#include "pim/models.hpp"
#include "pim/priors.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pim {

// (Y, Z) given a shared theta. Z is scalar; categorical Z is coded 0..K-1.
class JointPredModel {
 public:
  virtual ~JointPredModel() = default;
  virtual std::string name() const = 0;
  virtual const Model& y_model() const = 0;
  virtual double logdens_z(const Param& theta, double z) const = 0;
  virtual double sample_z(const Param& theta, Rng& rng) const = 0;
  virtual double mode_z(const Param& theta) const = 0;
  virtual bool independent() const { return true; }
  // finite sample space of Z, empty when continuous
  virtual std::vector<double> z_support() const { return {}; }

  double joint_loglik(const Param& theta, const Data& y, double z) const {
    return y_model().loglik(theta, y) + logdens_z(theta, z);
  }

  // vacuous orders: profile over theta, and joint in (z, theta)
  virtual double profile_log_eta(const Data& y, double z) const;
  virtual double joint_log_eta(const Data& y, double z, const Param& theta) const;
  // argmax over (theta, x) of p_theta(y, x)
  virtual std::pair<Param, double> joint_mode(const Data& y) const;

  virtual std::optional<double> opt3_closed(const Data&, double) const { return std::nullopt; }
  virtual std::optional<double> opt2_closed(const Data&, double) const { return std::nullopt; }
  virtual std::optional<double> repr_closed(const Param&, double) const { return std::nullopt; }
};

class NormalPred : public JointPredModel {
 public:
  NormalPred(double sigma, int n) : y_(sigma, n) {}
  std::string name() const override { return "normal"; }
  const Model& y_model() const override { return y_; }
  const NormalKnownVar& normal() const { return y_; }
  double logdens_z(const Param& theta, double z) const override;
  double sample_z(const Param& theta, Rng& rng) const override;
  double mode_z(const Param& theta) const override { return theta(0); }
  double profile_log_eta(const Data& y, double z) const override;
  double joint_log_eta(const Data& y, double z, const Param& theta) const override;
  std::pair<Param, double> joint_mode(const Data& y) const override { return {y, y(0)}; }
  std::optional<double> opt3_closed(const Data& y, double z) const override;
  std::optional<double> opt2_closed(const Data& y, double z) const override;
  std::optional<double> repr_closed(const Param& theta, double z) const override;
  // (z - y)^2 / (sigma^2 (1 + 1/n))
  double scaled_gap(const Data& y, double z) const;

 private:
  NormalKnownVar y_;
};

class MultinomialPred : public JointPredModel {
 public:
  MultinomialPred(int k, int n) : y_(k, n) {}
  std::string name() const override { return "multinomial"; }
  const Model& y_model() const override { return y_; }
  double logdens_z(const Param& theta, double z) const override;
  double sample_z(const Param& theta, Rng& rng) const override;
  double mode_z(const Param& theta) const override;
  std::vector<double> z_support() const override;
  double profile_log_eta(const Data& y, double z) const override;
  double joint_log_eta(const Data& y, double z, const Param& theta) const override;
  std::pair<Param, double> joint_mode(const Data& y) const override;
  // log sup_theta theta_z^{y_z+1} prod_{k != z} theta_k^{y_k}
  double add_one_loglik(const Data& y, int z) const;

 private:
  Multinomial y_;
};

// Z = max of k future draws from the same gamma model
class GammaMaxPred : public JointPredModel {
 public:
  GammaMaxPred(int k, int n) : y_(n), k_(k) {
    if (k < 1) throw InvalidArgument("gamma max prediction needs k >= 1");
  }
  std::string name() const override { return "gamma-max"; }
  const Model& y_model() const override { return y_; }
  int k() const { return k_; }
  double logdens_z(const Param& theta, double z) const override;
  double sample_z(const Param& theta, Rng& rng) const override;
  double mode_z(const Param& theta) const override;

 private:
  GammaIID y_;
  int k_;
};

double combine_fisher(double u, double v);

// f_theta(z) = P_{Z|theta}{ p_theta(Z) <= p_theta(z) } on the z grid
Contour poss_repr(const JointPredModel& jm, const Param& theta, const ParamDomain& z_grid, std::size_t mc_size,
                  std::uint64_t seed);

// theta_cfg carries the theta grid, engine, Monte Carlo size and seed
Contour predict_opt3(const JointPredModel& jm, const Data& y, const ParamDomain& z_grid, const IMConfig& theta_cfg);
Contour predict_opt3(const JointPredModel& jm, const PossibilisticPrior& p, const Data& y, const ParamDomain& z_grid,
                     const IMConfig& theta_cfg);
// posterior predictive transform
Contour predict_opt3(const JointPredModel& jm, const PrecisePrior& p, const Data& y, const ParamDomain& z_grid,
                     const IMConfig& theta_cfg);

Contour predict_opt2(const JointPredModel& jm, const Data& y, const ParamDomain& z_grid, const IMConfig& theta_cfg);
Contour predict_opt2(const JointPredModel& jm, const PrecisePrior& p, const Data& y, const ParamDomain& z_grid,
                     const IMConfig& theta_cfg);

// f: one row per theta grid point, one column per z grid point
Contour predict_opt1(const Eigen::MatrixXd& f, const Arr& pi, const ParamDomain& z_grid, ContourMeta meta = {});
Contour predict_opt1(const JointPredModel& jm, const Contour& pi, const ParamDomain& z_grid, const IMConfig& theta_cfg);
Contour predict_opt1(const JointPredModel& jm, const Data& y, const ParamDomain& z_grid, const IMConfig& theta_cfg);

// theta grid over the first K-1 simplex coordinates, steps+1 points per axis
IMConfig simplex_config(int k, int steps);
ParamDomain category_domain(int k);
Contour predict_multinomial(const Data& y, const IMConfig& theta_cfg);

}  // namespace pim
