#include "pim/marginal.hpp"

#include "pim/optimize.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pim {

namespace {

constexpr double ninf = -std::numeric_limits<double>::infinity();

double centered_ss(const Data& y) { return (y.array() - y.mean()).square().sum(); }

double var_log_eta(double w, double n) { return 0.5 * n * std::log(w / n) - 0.5 * (w - n); }

}  // namespace

// ---- normal mean

double NormalMeanFiber::t_statistic(const Data& y, double theta) {
  const double n = static_cast<double>(y.size());
  double s2 = centered_ss(y) / (n - 1.0);
  return std::sqrt(n) * (y.mean() - theta) / std::sqrt(s2);
}

double NormalMeanFiber::profile_log_eta(const Data& y, double theta) const {
  const double n = static_cast<double>(y.size());
  double t = t_statistic(y, theta);
  return -0.5 * n * std::log1p(t * t / (n - 1.0));
}

std::vector<Param> NormalMeanFiber::points(double theta) const {
  Param p(2);
  p << theta, 1.0;
  return {p};
}

std::optional<double> NormalMeanFiber::closed_contour(const Data& y, double theta) const {
  double t = std::abs(t_statistic(y, theta));
  boost::math::students_t_distribution<double> dist(static_cast<double>(y.size()) - 1.0);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

// ---- normal variance

double NormalVarianceFiber::profile_log_eta(const Data& y, double theta) const {
  if (!(theta > 0.0)) return ninf;
  return std::min(var_log_eta(centered_ss(y) / theta, static_cast<double>(y.size())), 0.0);
}

std::vector<Param> NormalVarianceFiber::points(double theta) const {
  Param p(2);
  p << 0.0, theta;
  return {p};
}

std::optional<double> NormalVarianceFiber::closed_contour(const Data& y, double theta) const {
  if (!(theta > 0.0)) return 0.0;
  const double n = static_cast<double>(y.size());
  const double w = centered_ss(y) / theta;
  const double target = var_log_eta(w, n);
  if (!(target < -1e-14)) return 1.0;
  auto gap = [&](double x) { return var_log_eta(x, n) - target; };
  double lo = w, hi = w;
  if (w < n) {
    double b = 2.0 * n;
    while (gap(b) > 0.0) b *= 2.0;
    hi = bracket_root(gap, n, b);
  } else {
    double a = n / 2.0;
    while (gap(a) > 0.0) a /= 2.0;
    lo = bracket_root(gap, a, n);
  }
  boost::math::chi_squared_distribution<double> dist(n - 1.0);
  double p = boost::math::cdf(dist, lo) + boost::math::cdf(boost::math::complement(dist, hi));
  return std::clamp(p, 0.0, 1.0);
}

// ---- gamma mean

GammaMeanFiber::GammaMeanFiber(const GammaIID& m, std::vector<double> shapes) : m_(m), shapes_(std::move(shapes)) {
  if (shapes_.empty()) throw EmptyFiber("gamma mean fiber needs at least one shape value");
  for (double k : shapes_)
    if (!(k > 0.0)) throw InvalidArgument("gamma mean fiber: shapes must be positive");
}

double GammaMeanFiber::profile_log_eta(const Data& y, double theta) const {
  if (!(theta > 0.0)) return ninf;
  double c = std::log(theta) - y.array().log().mean() + y.mean() / theta - 1.0;
  double k = shape_from_log_gap(c);
  Param psi(2);
  psi << k, theta / k;
  return std::min(m_.loglik(psi, y) - m_.log_sup(y), 0.0);
}

std::vector<Param> GammaMeanFiber::points(double theta) const {
  std::vector<Param> out;
  for (double k : shapes_) {
    Param p(2);
    p << k, theta / k;
    out.push_back(p);
  }
  return out;
}

// ---- generic grid fiber

GridFiber::GridFiber(const Model& m, std::function<double(const Param&)> g, ParamDomain joint, double halfwidth)
    : m_(m), g_(std::move(g)), joint_(std::move(joint)), half_(halfwidth) {}

std::vector<Param> GridFiber::points(double theta) const {
  std::vector<Param> out;
  for (Index i = 0; i < joint_.size(); ++i) {
    Param p = joint_.point(i);
    if (std::abs(g_(p) - theta) <= half_) out.push_back(p);
  }
  return out;
}

double GridFiber::profile_log_eta(const Data& y, double theta) const {
  auto pts = points(theta);
  if (pts.empty()) throw EmptyFiber("no grid point maps to the interest value");
  double best = ninf;
  double ls = m_.log_sup(y);
  for (const auto& p : pts)
    if (m_.valid(p)) best = std::max(best, m_.loglik(p, y) - ls);
  return std::min(best, 0.0);
}

double profile_relative_likelihood(const Fiber& f, const Data& y, double theta) {
  return std::exp(f.profile_log_eta(y, theta));
}

MarginalResult im_marginal_curves(const Fiber& f, const Data& y, const IMConfig& cfg) {
  cfg.validate();
  if (cfg.grid.dims() != 1) throw InvalidArgument("marginal IM needs a 1-D interest grid");
  const Index n = cfg.grid.size();
  const Model& m = f.model();
  Arr v = Arr::Zero(n);
  ContourMeta meta;
  meta.seed = cfg.seed;
  meta.engine = std::string("marginal/") + engine_name(cfg.engine);

  std::size_t width = 1;
  for (Index i = 0; i < n; ++i) width = std::max(width, f.points(cfg.grid.point(i)(0)).size());
  Eigen::MatrixXd curves = Eigen::MatrixXd::Constant(static_cast<Index>(width), n, std::numeric_limits<double>::quiet_NaN());

  if (cfg.engine == EngineKind::pivot && f.pivot() && f.closed_contour(y, cfg.grid.point(0)(0))) {
    for (Index i = 0; i < n; ++i) v(i) = *f.closed_contour(y, cfg.grid.point(i)(0));
    curves.row(0) = v.matrix().transpose();
    meta.engine = "marginal/closed";
  } else {
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
      const auto i = static_cast<Index>(k);
      const double theta = cfg.grid.point(i)(0);
      auto pts = f.points(theta);
      if (pts.empty()) throw EmptyFiber("interest value has an empty fiber");
      if (f.pivot()) pts.resize(1);
      const double t = f.profile_log_eta(y, theta);
      double best = 0.0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (!m.valid(pts[j])) continue;
        Rng rng = substream(cfg.seed, k * width + j);
        std::size_t hit = 0;
        for (std::size_t r = 0; r < cfg.mc_size; ++r)
          if (f.profile_log_eta(m.sample(pts[j], rng), theta) <= t + tie_tol) ++hit;
        double pr = static_cast<double>(hit) / static_cast<double>(cfg.mc_size);
        curves(static_cast<Index>(j), i) = pr;
        best = std::max(best, pr);
      }
      v(i) = best;
    });
    meta.mc_size = cfg.mc_size;
    meta.std_err = (v * (1.0 - v) / static_cast<double>(cfg.mc_size)).sqrt();
  }
  try {
    Param at = scalar_param(f.interest(m.mle(y)));
    if (cfg.grid.locate(at)) {
      meta.peak_at = at;
      meta.peak_value = 1.0;
    }
  } catch (const UnboundedLikelihood&) {
  }
  return {Contour(cfg.grid, std::move(v), std::move(meta)), std::move(curves)};
}

Contour im_marginal(const Fiber& f, const Data& y, const IMConfig& cfg) { return im_marginal_curves(f, y, cfg).contour; }

Contour im_conditional(const ConditionalModel& cm, const Data& y, const IMConfig& cfg) {
  Contour c = im_vacuous(cm, y, cfg);
  return c;
}

Contour im_conditional(const ConditionalModel& cm, const PossibilisticPrior& p, const Data& y, const IMConfig& cfg) {
  return im_partial(cm, p, y, cfg);
}

}  // namespace pim
