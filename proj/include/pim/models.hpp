#pragma once

#include "pim/core.hpp"
#include "pim/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pim {

struct ParamBox {
  Vec lower;
  Vec upper;
};

class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  virtual Index param_dim() const = 0;
  virtual ParamBox box() const = 0;
  virtual bool valid(const Param& theta) const;

  virtual double logdens(const Param& theta, const Data& y) const = 0;
  // log-likelihood up to a theta-free term
  virtual double loglik(const Param& theta, const Data& y) const { return logdens(theta, y); }
  virtual Data sample(const Param& theta, Rng& rng) const = 0;

  // numeric default: Brent in 1-D, Nelder-Mead otherwise
  virtual Param mle(const Data& y) const;
  virtual double log_sup(const Data& y) const { return loglik(mle(y), y); }
  virtual double log_rel_lik(const Param& theta, const Data& y) const;

  // distribution of eta(Y, theta) under theta is theta-free
  virtual bool pivot() const { return false; }
  virtual std::optional<double> closed_contour(const Data&, const Param&) const { return std::nullopt; }
  // finite sample space, empty when not enumerable
  virtual std::vector<Data> support() const { return {}; }

 protected:
  virtual Param mle_start(const Data& y) const;
};

double relative_likelihood(const Model& m, const Data& y, const Param& theta);

// model whose density is conditional on a fixed ancillary statistic
class ConditionalModel : public Model {
 public:
  virtual double ancillary() const = 0;
};

class Binomial : public Model {
 public:
  explicit Binomial(int n);
  int n() const { return n_; }
  std::string name() const override { return "binomial"; }
  Index param_dim() const override { return 1; }
  ParamBox box() const override;
  double logdens(const Param& theta, const Data& y) const override;
  double loglik(const Param& theta, const Data& y) const override;
  Data sample(const Param& theta, Rng& rng) const override;
  Param mle(const Data& y) const override;
  double log_sup(const Data& y) const override;
  std::vector<Data> support() const override;

 private:
  int n_;
};

// Y is the sample mean, N(theta, sigma^2 / n)
class NormalKnownVar : public Model {
 public:
  NormalKnownVar(double sigma, int n);
  double sigma() const { return sigma_; }
  int n() const { return n_; }
  double se() const;
  std::string name() const override { return "normal-known"; }
  Index param_dim() const override { return 1; }
  ParamBox box() const override;
  double logdens(const Param& theta, const Data& y) const override;
  Data sample(const Param& theta, Rng& rng) const override;
  Param mle(const Data& y) const override { return y; }
  double log_rel_lik(const Param& theta, const Data& y) const override;
  bool pivot() const override { return true; }
  std::optional<double> closed_contour(const Data& y, const Param& theta) const override;

 private:
  double sigma_;
  int n_;
};

// theta = (mean, variance), y = raw sample
class NormalUnknownVar : public Model {
 public:
  explicit NormalUnknownVar(int n);
  int n() const { return n_; }
  std::string name() const override { return "normal-unknown"; }
  Index param_dim() const override { return 2; }
  ParamBox box() const override;
  double logdens(const Param& theta, const Data& y) const override;
  Data sample(const Param& theta, Rng& rng) const override;
  Param mle(const Data& y) const override;

 private:
  int n_;
};

// theta = (shape, scale), y = raw sample
class GammaIID : public Model {
 public:
  explicit GammaIID(int n);
  int n() const { return n_; }
  std::string name() const override { return "gamma"; }
  Index param_dim() const override { return 2; }
  ParamBox box() const override;
  double logdens(const Param& theta, const Data& y) const override;
  Data sample(const Param& theta, Rng& rng) const override;
  Param mle(const Data& y) const override;

 private:
  int n_;
};

// solves log k - digamma(k) = c for k > 0, c > 0
double shape_from_log_gap(double c);

class Multinomial : public Model {
 public:
  Multinomial(int k, int n);
  int categories() const { return k_; }
  int n() const { return n_; }
  std::string name() const override { return "multinomial"; }
  Index param_dim() const override { return k_; }
  ParamBox box() const override;
  bool valid(const Param& theta) const override;
  double logdens(const Param& theta, const Data& y) const override;
  double loglik(const Param& theta, const Data& y) const override;
  Data sample(const Param& theta, Rng& rng) const override;
  Param mle(const Data& y) const override;
  double log_sup(const Data& y) const override;
  std::vector<Data> support() const override;

 private:
  int k_;
  int n_;
};

Data multinomial_draw(int n, const Param& probs, Rng& rng);

// Fisher noncentral hypergeometric for V given U = u, theta the log odds ratio
class OddsRatioConditional : public ConditionalModel {
 public:
  OddsRatioConditional(int n1, int n2, int u);
  double ancillary() const override { return u_; }
  int lowest() const { return lo_; }
  int highest() const { return hi_; }
  std::string name() const override { return "odds-ratio"; }
  Index param_dim() const override { return 1; }
  ParamBox box() const override;
  double logdens(const Param& theta, const Data& y) const override;
  Data sample(const Param& theta, Rng& rng) const override;
  // throws UnboundedLikelihood at the support boundary
  Param mle(const Data& y) const override;
  // the supremum is still finite at the boundary (mass tends to 1)
  double log_sup(const Data& y) const override;
  std::vector<Data> support() const override;
  Vec log_pmf(double theta) const;

 private:
  int n1_, n2_, u_, lo_, hi_;
  Vec log_coef_;
};

// Y2 given Y1 = y1 is N(theta * y1, sigma^2)
class AR1Conditional : public ConditionalModel {
 public:
  AR1Conditional(double sigma, double y1);
  double ancillary() const override { return y1_; }
  std::string name() const override { return "ar1"; }
  Index param_dim() const override { return 1; }
  ParamBox box() const override;
  double logdens(const Param& theta, const Data& y) const override;
  Data sample(const Param& theta, Rng& rng) const override;
  Param mle(const Data& y) const override;
  double log_rel_lik(const Param& theta, const Data& y) const override;
  bool pivot() const override { return true; }
  std::optional<double> closed_contour(const Data& y, const Param& theta) const override;

 private:
  double sigma_, y1_;
};

// p(s | u) proportional to s^-1 exp{-u (theta/s + s/theta)}
class GigConditional : public ConditionalModel {
 public:
  GigConditional(int n, double u);
  double ancillary() const override { return u_; }
  int n() const { return n_; }
  double log_norm() const { return log_norm_; }
  std::string name() const override { return "gig"; }
  Index param_dim() const override { return 1; }
  ParamBox box() const override;
  double logdens(const Param& theta, const Data& y) const override;
  Data sample(const Param& theta, Rng& rng) const override;
  Param mle(const Data& y) const override { return y; }
  double log_rel_lik(const Param& theta, const Data& y) const override;
  bool pivot() const override { return true; }

 private:
  int n_;
  double u_;
  double log_norm_;
};

}  // namespace pim
