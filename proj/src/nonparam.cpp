#include "pim/nonparam.hpp"

#include "pim/contour_io.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pim {

namespace {

constexpr double ninf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t salt_boot = 0x5b;

// u log(a / u) with the 0 log 0 convention
double xlog_ratio(double u, double a) { return u > 0.0 ? u * std::log(a / u) : 0.0; }

std::vector<double> sorted_values(const Data& y) {
  std::vector<double> v(y.data(), y.data() + y.size());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

double sample_quantile(const Data& y, double r) {
  if (y.size() < 1) throw InvalidArgument("quantile needs at least one observation");
  if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
  auto v = sorted_values(y);
  // linear interpolation between order statistics at (n - 1) r
  const double h = static_cast<double>(v.size() - 1) * r;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

double el_quantile_eta(const Data& y, double r, double theta) {
  const double hat = sample_quantile(y, r);
  const double n = static_cast<double>(y.size());
  double u = 0.0;
  if (theta < hat) {
    u = static_cast<double>((y.array() <= theta).count());
  } else if (theta > hat) {
    u = static_cast<double>((y.array() < theta).count());
  } else {
    u = n * r;
  }
  double l = xlog_ratio(u, n * r) + xlog_ratio(n - u, n * (1.0 - r));
  return std::clamp(std::exp(l), 0.0, 1.0);
}

double el_mean_eta(const Data& y, double theta) {
  if (y.size() < 2) throw InvalidArgument("empirical likelihood for the mean needs n >= 2");
  const double lo = y.minCoeff(), hi = y.maxCoeff();
  if (lo == hi) return theta == lo ? 1.0 : 0.0;
  if (!(theta > lo && theta < hi)) return 0.0;
  const double n = static_cast<double>(y.size());
  Arr d = y.array() - theta;
  // keeps every weight in (0, 1]
  double lam_lo = (1.0 / n - 1.0) / d.maxCoeff();
  double lam_hi = (1.0 / n - 1.0) / d.minCoeff();
  auto score = [&](double lam) {
    Arr den = 1.0 + lam * d;
    double g = (d / den).sum();
    double dg = -(d.square() / den.square()).sum();
    return std::make_pair(g, dg);
  };
  std::uintmax_t iters = 50;
  double lam = boost::math::tools::newton_raphson_iterate(score, 0.0, lam_lo, lam_hi, 40, iters);
  double l = -(1.0 + lam * d).log().sum();
  return std::clamp(std::exp(l), 0.0, 1.0);
}

namespace {

std::vector<double> bootstrap_draws(const SampleOrder& eta, const Data& y, double hat, std::size_t resamples,
                                    std::uint64_t seed) {
  if (resamples < 200) throw InvalidArgument("bootstrap needs at least 200 resamples");
  if (y.size() < 1) throw InvalidArgument("bootstrap needs data");
  const Index n = y.size();
  std::vector<double> e(resamples);
  parallel_for(resamples, [&](std::size_t b) {
    Rng rng = substream(seed, b, salt_boot);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    Data yb(n);
    for (Index i = 0; i < n; ++i) yb(i) = y(pick(rng));
    e[b] = eta(yb, hat);
  });
  std::sort(e.begin(), e.end());
  return e;
}

double share_at_most(const std::vector<double>& e, double t) {
  auto it = std::upper_bound(e.begin(), e.end(), t + tie_tol);
  return static_cast<double>(it - e.begin()) / static_cast<double>(e.size());
}

}  // namespace

double bootstrap_plausibility(const SampleOrder& eta, const Data& y, const Estimator& est, std::size_t resamples,
                              double theta, std::uint64_t seed) {
  auto e = bootstrap_draws(eta, y, est(y), resamples, seed);
  return share_at_most(e, eta(y, theta));
}

Contour im_bootstrap(const SampleOrder& eta, const Data& y, const Estimator& est, std::size_t resamples,
                     const IMConfig& cfg) {
  if (cfg.grid.dims() != 1) throw InvalidArgument("bootstrap contour needs a 1-D grid");
  const double hat = est(y);
  auto e = bootstrap_draws(eta, y, hat, resamples, cfg.seed);
  const Index g = cfg.grid.size();
  Arr v(g);
  parallel_for(static_cast<std::size_t>(g), [&](std::size_t i) {
    v(static_cast<Index>(i)) = share_at_most(e, eta(y, cfg.grid.point(static_cast<Index>(i))(0)));
  });
  ContourMeta meta;
  meta.seed = cfg.seed;
  meta.mc_size = resamples;
  meta.engine = "bootstrap";
  meta.std_err = (v * (1.0 - v) / static_cast<double>(resamples)).sqrt();
  Param at = scalar_param(hat);
  if (cfg.grid.locate(at)) {
    meta.peak_at = at;
    meta.peak_value = share_at_most(e, eta(y, hat));
  }
  return Contour(cfg.grid, std::move(v), std::move(meta));
}

// ---- split likelihood ratio

NormalMeanSplit::NormalMeanSplit(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
}

double NormalMeanSplit::profile_loglik(const Data& chunk, double theta) const {
  return -(chunk.array() - theta).square().sum() / (2.0 * sigma_ * sigma_);
}

double NormalMeanSplit::loglik_at_fit(const Data& chunk, const Data& fit) const {
  return profile_loglik(chunk, fit.mean());
}

double GammaMeanSplit::profile_loglik(const Data& chunk, double theta) const {
  if (!(theta > 0.0)) return ninf;
  GammaIID m(static_cast<int>(chunk.size()));
  double c = std::log(theta) - chunk.array().log().mean() + chunk.mean() / theta - 1.0;
  double k = shape_from_log_gap(c);
  Param psi(2);
  psi << k, theta / k;
  return m.loglik(psi, chunk);
}

double GammaMeanSplit::loglik_at_fit(const Data& chunk, const Data& fit) const {
  GammaIID mf(static_cast<int>(fit.size()));
  GammaIID mc(static_cast<int>(chunk.size()));
  return mc.loglik(mf.mle(fit), chunk);
}

double split_log_eta(const SplitFamily& f, const Data& y, double split_frac, double theta) {
  if (!(split_frac > 0.0 && split_frac < 1.0)) throw InvalidArgument("split fraction must lie in (0, 1)");
  const Index n = y.size();
  auto n1 = static_cast<Index>(std::ceil(static_cast<double>(n) * split_frac - 1e-12));
  if (n1 < 1 || n1 >= n) throw InvalidArgument("split leaves an empty chunk");
  Data y1 = y.head(n1), y2 = y.tail(n - n1);
  return f.profile_loglik(y1, theta) - f.loglik_at_fit(y1, y2);
}

Contour im_split_lr(const SplitFamily& f, const Data& y, double split_frac, const IMConfig& cfg) {
  if (cfg.grid.dims() != 1) throw InvalidArgument("split contour needs a 1-D grid");
  const Index g = cfg.grid.size();
  Arr v(g);
  for (Index i = 0; i < g; ++i) v(i) = std::min(1.0, std::exp(split_log_eta(f, y, split_frac, cfg.grid.point(i)(0))));
  ContourMeta meta;
  meta.engine = "split";
  const Index n = y.size();
  auto n1 = static_cast<Index>(std::ceil(static_cast<double>(n) * split_frac - 1e-12));
  Param at = scalar_param(f.interest_hat(y.head(n1)));
  if (cfg.grid.locate(at)) {
    meta.peak_at = at;
    meta.peak_value = std::min(1.0, std::exp(split_log_eta(f, y, split_frac, at(0))));
  }
  return Contour(cfg.grid, std::move(v), std::move(meta));
}

// ---- linkage

Param linkage_psi(double phi) {
  Param p(4);
  p << 0.5 + phi / 4.0, (1.0 - phi) / 4.0, (1.0 - phi) / 4.0, phi / 4.0;
  return p;
}

Contour im_linkage(const Data& y, const std::vector<double>& phis, const IMConfig& base) {
  if (y.size() != 4) throw InvalidArgument("linkage model needs four cell counts");
  if (phis.empty()) throw InvalidArgument("linkage curve needs phi values");
  const double n = y.sum();
  std::vector<std::string> labels;
  for (double phi : phis) labels.push_back(format_number(phi));
  labels.push_back("mle");
  IMConfig cfg = base;
  cfg.grid = ParamDomain::labels("phi", labels);
  const auto last = static_cast<double>(phis.size());
  cfg.embed = [phis, last, y, n](const Param& x) {
    if (x(0) >= last) return Param(y / n);
    return linkage_psi(phis[static_cast<std::size_t>(x(0))]);
  };
  Multinomial m(4, static_cast<int>(std::lround(n)));
  return im_vacuous(m, y, cfg);
}

}  // namespace pim
