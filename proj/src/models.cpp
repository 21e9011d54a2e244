#include "pim/models.hpp"

#include "pim/optimize.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pim {

namespace {

constexpr double ninf = -std::numeric_limits<double>::infinity();

double xlogy(double a, double b) {
  if (a == 0.0) return 0.0;
  return b > 0.0 ? a * std::log(b) : ninf;
}

double chisq1_sf(double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(1.0), x));
}

void require_size(const Data& y, Index n, const char* what) {
  if (y.size() != n) throw InvalidArgument(std::string(what) + ": data has " + std::to_string(y.size()) +
                                           " entries, expected " + std::to_string(n));
}

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

// ---- base

bool Model::valid(const Param& theta) const {
  if (theta.size() != param_dim() || !theta.allFinite()) return false;
  auto b = box();
  return (theta.array() >= b.lower.array()).all() && (theta.array() <= b.upper.array()).all();
}

Param Model::mle_start(const Data&) const {
  auto b = box();
  Vec lo = b.lower.cwiseMax(-1e3), hi = b.upper.cwiseMin(1e3);
  return 0.5 * (lo + hi);
}

Param Model::mle(const Data& y) const {
  auto b = box();
  auto ll = [&](const Vec& t) { return valid(t) ? loglik(t, y) : ninf; };
  Optimum o;
  if (param_dim() == 1) {
    o = scan_maximize_1d([&](double t) { return ll(Vec::Constant(1, t)); }, b.lower(0), b.upper(0), 201);
  } else {
    Param s = mle_start(y);
    Vec step = 0.1 * s.cwiseAbs() + Vec::Constant(s.size(), 0.1);
    o = nelder_mead_max(ll, s, step);
    o = nelder_mead_max(ll, o.x, 0.05 * step);
  }
  if (!std::isfinite(o.value)) throw UnboundedLikelihood(name() + ": likelihood search found no finite maximum");
  for (Index k = 0; k < o.x.size(); ++k) {
    double w = 1e-8 * std::max(1.0, b.upper(k) - b.lower(k));
    if (o.x(k) - b.lower(k) < w || b.upper(k) - o.x(k) < w)
      throw UnboundedLikelihood(name() + ": likelihood search ran to the edge of the parameter box");
  }
  return o.x;
}

double Model::log_rel_lik(const Param& theta, const Data& y) const {
  if (!valid(theta)) return ninf;
  double l = loglik(theta, y);
  if (!(l > ninf)) return ninf;
  return std::min(l - log_sup(y), 0.0);
}

double relative_likelihood(const Model& m, const Data& y, const Param& theta) {
  return std::exp(m.log_rel_lik(theta, y));
}

// ---- binomial

Binomial::Binomial(int n) : n_(n) {
  if (n < 1) throw InvalidArgument("binomial: n must be positive");
}

ParamBox Binomial::box() const { return {Vec::Zero(1), Vec::Ones(1)}; }

double Binomial::loglik(const Param& theta, const Data& y) const {
  require_size(y, 1, "binomial");
  return xlogy(y(0), theta(0)) + xlogy(n_ - y(0), 1.0 - theta(0));
}

double Binomial::logdens(const Param& theta, const Data& y) const {
  double l = loglik(theta, y);
  return l > ninf ? l + log_choose(n_, static_cast<int>(y(0))) : l;
}

Data Binomial::sample(const Param& theta, Rng& rng) const {
  return scalar_data(binomial_draw(n_, theta(0), rng));
}

Param Binomial::mle(const Data& y) const {
  require_size(y, 1, "binomial");
  return scalar_param(y(0) / n_);
}

double Binomial::log_sup(const Data& y) const { return loglik(mle(y), y); }

std::vector<Data> Binomial::support() const {
  std::vector<Data> s;
  for (int k = 0; k <= n_; ++k) s.push_back(scalar_data(k));
  return s;
}

// ---- normal, known variance

NormalKnownVar::NormalKnownVar(double sigma, int n) : sigma_(sigma), n_(n) {
  if (!(sigma > 0.0) || n < 1) throw InvalidArgument("normal-known: need sigma > 0 and n >= 1");
}

double NormalKnownVar::se() const { return sigma_ / std::sqrt(static_cast<double>(n_)); }

ParamBox NormalKnownVar::box() const { return {Vec::Constant(1, -1e8), Vec::Constant(1, 1e8)}; }

double NormalKnownVar::logdens(const Param& theta, const Data& y) const {
  require_size(y, 1, "normal-known");
  double s = se();
  double z = (y(0) - theta(0)) / s;
  return -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
}

Data NormalKnownVar::sample(const Param& theta, Rng& rng) const {
  return scalar_data(theta(0) + se() * std_normal(rng));
}

double NormalKnownVar::log_rel_lik(const Param& theta, const Data& y) const {
  double z = (y(0) - theta(0)) / se();
  return -0.5 * z * z;
}

std::optional<double> NormalKnownVar::closed_contour(const Data& y, const Param& theta) const {
  double z = (y(0) - theta(0)) / se();
  return chisq1_sf(z * z);
}

// ---- normal, unknown variance

NormalUnknownVar::NormalUnknownVar(int n) : n_(n) {
  if (n < 2) throw InvalidArgument("normal-unknown: need n >= 2");
}

ParamBox NormalUnknownVar::box() const {
  Vec lo(2), hi(2);
  lo << -1e8, 1e-300;
  hi << 1e8, 1e300;
  return {lo, hi};
}

double NormalUnknownVar::logdens(const Param& theta, const Data& y) const {
  require_size(y, n_, "normal-unknown");
  double v = theta(1);
  if (!(v > 0.0)) return ninf;
  double ss = (y.array() - theta(0)).square().sum();
  return -0.5 * n_ * std::log(2.0 * std::numbers::pi * v) - 0.5 * ss / v;
}

Data NormalUnknownVar::sample(const Param& theta, Rng& rng) const {
  Data y(n_);
  double s = std::sqrt(theta(1));
  for (Index i = 0; i < n_; ++i) y(i) = theta(0) + s * std_normal(rng);
  return y;
}

Param NormalUnknownVar::mle(const Data& y) const {
  require_size(y, n_, "normal-unknown");
  Param p(2);
  p(0) = y.mean();
  p(1) = (y.array() - p(0)).square().mean();
  if (!(p(1) > 0.0)) throw UnboundedLikelihood("normal-unknown: sample has zero spread");
  return p;
}

// ---- gamma

double shape_from_log_gap(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw UnboundedLikelihood("gamma: degenerate sample, shape estimate diverges");
  auto h = [c](double t) {
    double k = std::exp(t);
    return std::log(k) - boost::math::digamma(k) - c;
  };
  double minka = (3.0 - c + std::sqrt((c - 3.0) * (c - 3.0) + 24.0 * c)) / (12.0 * c);
  double best = std::numeric_limits<double>::quiet_NaN();
  double best_res = std::numeric_limits<double>::infinity();
  for (double start : {minka, 0.5 * minka, 2.0 * minka}) {
    double t = std::log(start);
    for (int it = 0; it < 100; ++it) {
      double k = std::exp(t);
      double d = 1.0 - k * boost::math::trigamma(k);
      double step = h(t) / d;
      if (!std::isfinite(step)) break;
      t -= step;
      if (std::abs(step) < 1e-14) break;
    }
    double r = std::abs(h(t));
    if (std::isfinite(r) && r < best_res) {
      best_res = r;
      best = t;
    }
  }
  if (!(best_res < 1e-9)) best = bracket_root(h, -40.0, 40.0);
  return std::exp(best);
}

GammaIID::GammaIID(int n) : n_(n) {
  if (n < 2) throw InvalidArgument("gamma: need n >= 2");
}

ParamBox GammaIID::box() const { return {Vec::Constant(2, 1e-300), Vec::Constant(2, 1e300)}; }

double GammaIID::logdens(const Param& theta, const Data& y) const {
  require_size(y, n_, "gamma");
  double k = theta(0), s = theta(1);
  if (!(k > 0.0 && s > 0.0)) return ninf;
  if ((y.array() <= 0.0).any()) return ninf;
  double slog = y.array().log().sum();
  return (k - 1.0) * slog - y.sum() / s - n_ * (std::lgamma(k) + k * std::log(s));
}

Data GammaIID::sample(const Param& theta, Rng& rng) const {
  Data y(n_);
  for (Index i = 0; i < n_; ++i) y(i) = gamma_draw(theta(0), theta(1), rng);
  return y;
}

Param GammaIID::mle(const Data& y) const {
  require_size(y, n_, "gamma");
  if ((y.array() <= 0.0).any()) throw InvalidArgument("gamma: data must be positive");
  double mean = y.mean();
  double c = std::log(mean) - y.array().log().mean();
  double k = shape_from_log_gap(c);
  Param p(2);
  p << k, mean / k;
  return p;
}

// ---- multinomial

Multinomial::Multinomial(int k, int n) : k_(k), n_(n) {
  if (k < 2 || n < 1) throw InvalidArgument("multinomial: need K >= 2 and n >= 1");
}

ParamBox Multinomial::box() const { return {Vec::Zero(k_), Vec::Ones(k_)}; }

bool Multinomial::valid(const Param& theta) const {
  if (theta.size() != k_ || !theta.allFinite()) return false;
  return (theta.array() >= -1e-12).all() && std::abs(theta.sum() - 1.0) < 1e-9;
}

double Multinomial::loglik(const Param& theta, const Data& y) const {
  require_size(y, k_, "multinomial");
  double l = 0.0;
  for (Index j = 0; j < k_; ++j) l += xlogy(y(j), std::max(theta(j), 0.0));
  return l;
}

double Multinomial::logdens(const Param& theta, const Data& y) const {
  double l = loglik(theta, y);
  if (!(l > ninf)) return l;
  double c = std::lgamma(n_ + 1.0);
  for (Index j = 0; j < k_; ++j) c -= std::lgamma(y(j) + 1.0);
  return l + c;
}

Data multinomial_draw(int n, const Param& probs, Rng& rng) {
  Data y = Data::Zero(probs.size());
  int left = n;
  double mass = 1.0;
  for (Index j = 0; j + 1 < probs.size() && left > 0; ++j) {
    double p = mass > 0.0 ? std::clamp(probs(j) / mass, 0.0, 1.0) : 0.0;
    int c = binomial_draw(left, p, rng);
    y(j) = c;
    left -= c;
    mass -= probs(j);
  }
  y(probs.size() - 1) += left;
  return y;
}

Data Multinomial::sample(const Param& theta, Rng& rng) const { return multinomial_draw(n_, theta, rng); }

Param Multinomial::mle(const Data& y) const {
  require_size(y, k_, "multinomial");
  return y / static_cast<double>(n_);
}

double Multinomial::log_sup(const Data& y) const {
  double l = 0.0;
  for (Index j = 0; j < k_; ++j) l += xlogy(y(j), y(j) / n_);
  return l;
}

std::vector<Data> Multinomial::support() const {
  // number of compositions of n into K parts
  double count = std::exp(std::lgamma(n_ + k_ + 0.0) - std::lgamma(k_ + 0.0) - std::lgamma(n_ + 1.0));
  if (count > 2e6) return {};
  std::vector<Data> out;
  Data cur = Data::Zero(k_);
  auto rec = [&](auto&& self, Index j, int left) -> void {
    if (j + 1 == k_) {
      cur(j) = left;
      out.push_back(cur);
      return;
    }
    for (int c = left; c >= 0; --c) {
      cur(j) = c;
      self(self, j + 1, left - c);
    }
  };
  rec(rec, 0, n_);
  return out;
}

// ---- odds ratio, conditional on the total

OddsRatioConditional::OddsRatioConditional(int n1, int n2, int u) : n1_(n1), n2_(n2), u_(u) {
  if (n1 < 1 || n2 < 1 || u < 0 || u > n1 + n2) throw InvalidArgument("odds-ratio: need n1, n2 >= 1 and 0 <= u <= n1 + n2");
  lo_ = std::max(u - n1, 0);
  hi_ = std::min(n2, u);
  log_coef_.resize(hi_ - lo_ + 1);
  for (int v = lo_; v <= hi_; ++v) log_coef_(v - lo_) = log_choose(n2, v) + log_choose(n1, u - v);
}

ParamBox OddsRatioConditional::box() const { return {Vec::Constant(1, -50.0), Vec::Constant(1, 50.0)}; }

Vec OddsRatioConditional::log_pmf(double theta) const {
  Vec a(log_coef_.size());
  for (Index i = 0; i < a.size(); ++i) a(i) = log_coef_(i) + theta * static_cast<double>(lo_ + i);
  double m = a.maxCoeff();
  double lse = m + std::log((a.array() - m).exp().sum());
  return a.array() - lse;
}

double OddsRatioConditional::logdens(const Param& theta, const Data& y) const {
  require_size(y, 1, "odds-ratio");
  double v = y(0);
  if (v < lo_ || v > hi_ || v != std::floor(v)) return ninf;
  return log_pmf(theta(0))(static_cast<Index>(v) - lo_);
}

Data OddsRatioConditional::sample(const Param& theta, Rng& rng) const {
  Vec p = log_pmf(theta(0)).array().exp();
  double u = uniform01(rng);
  double acc = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    if (u < acc) return scalar_data(lo_ + static_cast<double>(i));
  }
  return scalar_data(hi_);
}

Param OddsRatioConditional::mle(const Data& y) const {
  require_size(y, 1, "odds-ratio");
  double v = y(0);
  if (v <= lo_ || v >= hi_)
    throw UnboundedLikelihood("odds-ratio: observed count at the support edge, log odds ratio estimate is infinite");
  auto mean_gap = [&](double t) {
    Vec p = log_pmf(t).array().exp();
    double m = 0.0;
    for (Index i = 0; i < p.size(); ++i) m += p(i) * (lo_ + static_cast<double>(i));
    return m - v;
  };
  return scalar_param(bracket_root(mean_gap, -50.0, 50.0));
}

double OddsRatioConditional::log_sup(const Data& y) const {
  double v = y(0);
  if (v <= lo_ || v >= hi_) return 0.0;
  return loglik(mle(y), y);
}

std::vector<Data> OddsRatioConditional::support() const {
  std::vector<Data> s;
  for (int v = lo_; v <= hi_; ++v) s.push_back(scalar_data(v));
  return s;
}

// ---- AR(1), conditional on the first observation

AR1Conditional::AR1Conditional(double sigma, double y1) : sigma_(sigma), y1_(y1) {
  if (!(sigma > 0.0)) throw InvalidArgument("ar1: sigma must be positive");
  if (y1 == 0.0) throw InvalidArgument("ar1: conditioning value y1 must be nonzero");
}

ParamBox AR1Conditional::box() const { return {Vec::Constant(1, -1e8), Vec::Constant(1, 1e8)}; }

double AR1Conditional::logdens(const Param& theta, const Data& y) const {
  require_size(y, 1, "ar1");
  double z = (y(0) - theta(0) * y1_) / sigma_;
  return -0.5 * z * z - std::log(sigma_) - 0.5 * std::log(2.0 * std::numbers::pi);
}

Data AR1Conditional::sample(const Param& theta, Rng& rng) const {
  return scalar_data(theta(0) * y1_ + sigma_ * std_normal(rng));
}

Param AR1Conditional::mle(const Data& y) const { return scalar_param(y(0) / y1_); }

double AR1Conditional::log_rel_lik(const Param& theta, const Data& y) const {
  double z = (y(0) - theta(0) * y1_) / sigma_;
  return -0.5 * z * z;
}

std::optional<double> AR1Conditional::closed_contour(const Data& y, const Param& theta) const {
  double z = (y(0) - theta(0) * y1_) / sigma_;
  return chisq1_sf(z * z);
}

// ---- generalized inverse Gaussian, conditional on the ancillary

GigConditional::GigConditional(int n, double u) : n_(n), u_(u) {
  if (!(u > 0.0)) throw InvalidArgument("gig: ancillary u must be positive");
  // substitute w = log(s / theta); the integrand is even in w
  boost::math::quadrature::exp_sinh<double> integrator;
  double half = integrator.integrate([u](double w) { return std::exp(-2.0 * u * (std::cosh(w) - 1.0)); }, 1e-14);
  log_norm_ = -2.0 * u + std::log(2.0 * half);
}

ParamBox GigConditional::box() const { return {Vec::Constant(1, 1e-300), Vec::Constant(1, 1e300)}; }

double GigConditional::logdens(const Param& theta, const Data& y) const {
  require_size(y, 1, "gig");
  double s = y(0), t = theta(0);
  if (!(s > 0.0 && t > 0.0)) return ninf;
  return -std::log(s) - u_ * (t / s + s / t) - log_norm_;
}

Data GigConditional::sample(const Param& theta, Rng& rng) const {
  const double sd = 1.0 / std::sqrt(2.0 * u_);
  for (;;) {
    double w = sd * std_normal(rng);
    double gap = std::cosh(w) - 1.0 - 0.5 * w * w;
    if (uniform01(rng) < std::exp(-2.0 * u_ * gap)) return scalar_data(theta(0) * std::exp(w));
  }
}

double GigConditional::log_rel_lik(const Param& theta, const Data& y) const {
  double s = y(0), t = theta(0);
  if (!(s > 0.0 && t > 0.0)) return ninf;
  return std::min(-u_ * (t / s + s / t - 2.0), 0.0);
}

}  // namespace pim
