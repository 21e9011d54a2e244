#pragma once

#include "pim/contour.hpp"
#include "pim/engine.hpp"
#include "pim/models.hpp"

#include <functional>
#include <string>
#include <vector>

namespace pim {

// y_(ceil(n r)) of the sorted sample
// interpolated, so usually not a data point
double sample_quantile(const Data& y, double r);
// normalized empirical likelihood ratio for the r-quantile, peak 1 at the sample quantile
double el_quantile_eta(const Data& y, double r, double theta);
// Owen empirical likelihood ratio for the mean; 0 outside the convex hull
double el_mean_eta(const Data& y, double theta);

using SampleOrder = std::function<double(const Data&, double)>;
using Estimator = std::function<double(const Data&)>;

// (1/B) sum_b 1{ eta(y^b, est(y)) <= eta(y, theta) } on the 1-D grid of cfg
Contour im_bootstrap(const SampleOrder& eta, const Data& y, const Estimator& est, std::size_t resamples,
                     const IMConfig& cfg);

// the same bootstrap read at a single theta
double bootstrap_plausibility(const SampleOrder& eta, const Data& y, const Estimator& est, std::size_t resamples,
                              double theta, std::uint64_t seed);

// split likelihood ratio ingredients for a scalar interest
class SplitFamily {
 public:
  virtual ~SplitFamily() = default;
  virtual std::string name() const = 0;
  // sup over the fiber of the iid log-likelihood of chunk
  virtual double profile_loglik(const Data& chunk, double theta) const = 0;
  // log-likelihood of chunk at the MLE fitted on fit
  virtual double loglik_at_fit(const Data& chunk, const Data& fit) const = 0;
  virtual double interest_hat(const Data& chunk) const = 0;
};

class NormalMeanSplit : public SplitFamily {
 public:
  explicit NormalMeanSplit(double sigma);
  std::string name() const override { return "normal-mean"; }
  double profile_loglik(const Data& chunk, double theta) const override;
  double loglik_at_fit(const Data& chunk, const Data& fit) const override;
  double interest_hat(const Data& chunk) const override { return chunk.mean(); }

 private:
  double sigma_;
};

class GammaMeanSplit : public SplitFamily {
 public:
  std::string name() const override { return "gamma-mean"; }
  double profile_loglik(const Data& chunk, double theta) const override;
  double loglik_at_fit(const Data& chunk, const Data& fit) const override;
  double interest_hat(const Data& chunk) const override { return chunk.mean(); }
};

// log of the split ratio: first ceil(n frac) points form chunk 1
double split_log_eta(const SplitFamily& f, const Data& y, double split_frac, double theta);
Contour im_split_lr(const SplitFamily& f, const Data& y, double split_frac, const IMConfig& cfg);

// Psi(phi) = (1/2 + phi/4, (1 - phi)/4, (1 - phi)/4, phi/4)
Param linkage_psi(double phi);
// relative-likelihood IM for the 4-cell multinomial read along the linkage curve;
// the domain labels each phi plus a final "mle" cell carrying the unconstrained peak
Contour im_linkage(const Data& y, const std::vector<double>& phis, const IMConfig& base);

}  // namespace pim
