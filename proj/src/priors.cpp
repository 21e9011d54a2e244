#include "pim/priors.hpp"

#include "pim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace pim {

namespace {
constexpr double ninf = -std::numeric_limits<double>::infinity();
}

double Prior::log_weight(const Param& theta) const {
  double w = weight(theta);
  return w > 0.0 ? std::log(w) : ninf;
}

double PrecisePrior::weight(const Param& theta) const { return std::exp(log_density(theta)); }

Intervals PossibilisticPrior::alpha_cut(double alpha, const IntervalAxis& axis) const {
  Intervals out;
  Index i = 0;
  while (i < axis.points) {
    if (!in_cut(alpha, scalar_param(axis.at(i)))) {
      ++i;
      continue;
    }
    Index j = i;
    while (j + 1 < axis.points && in_cut(alpha, scalar_param(axis.at(j + 1)))) ++j;
    out.emplace_back(axis.at(i), axis.at(j));
    i = j + 1;
  }
  return out;
}

MarkovPrior::MarkovPrior(double k) : k_(k) {
  if (!(k > 0.0)) throw InvalidArgument("markov prior: K must be positive");
}

double MarkovPrior::contour(const Param& theta) const {
  double a = std::abs(theta(0));
  return a <= k_ ? 1.0 : k_ / a;
}

bool MarkovPrior::in_cut(double alpha, const Param& theta) const {
  if (alpha >= 1.0) return false;
  if (alpha <= 0.0) return true;
  return std::abs(theta(0)) < k_ / alpha;
}

Intervals MarkovPrior::alpha_cut(double alpha, const IntervalAxis& axis) const {
  if (alpha >= 1.0) return {};
  double r = alpha <= 0.0 ? std::numeric_limits<double>::infinity() : k_ / alpha;
  double lo = std::max(axis.lower, -r), hi = std::min(axis.upper, r);
  if (!(lo < hi)) return {};
  return {{lo, hi}};
}

double PointMassPrior::contour(const Param& theta) const {
  if (theta.size() != at_.size()) return 0.0;
  return (theta - at_).cwiseAbs().maxCoeff() <= 1e-12 ? 1.0 : 0.0;
}

DiscretePrior::DiscretePrior(std::vector<Param> atoms, std::vector<double> values)
    : atoms_(std::move(atoms)), values_(std::move(values)) {
  if (atoms_.empty() || atoms_.size() != values_.size()) throw InvalidArgument("discrete prior: atoms and values differ in length");
  double top = *std::max_element(values_.begin(), values_.end());
  if (top < 1.0 - analytic_sup_tol) throw NotNormalized("discrete prior contour does not reach 1");
  for (double v : values_)
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("discrete prior contour outside [0,1]");
}

DiscretePrior DiscretePrior::from_masses(std::vector<Param> atoms, std::span<const double> masses) {
  return DiscretePrior(std::move(atoms), prob2poss(masses));
}

double DiscretePrior::contour(const Param& theta) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].size() == theta.size() && (atoms_[i] - theta).cwiseAbs().maxCoeff() <= 1e-12) return values_[i];
  return 0.0;
}

BetaPrior::BetaPrior(double a, double b) : a_(a), b_(b) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("beta prior: shapes must be positive");
  lbeta_ = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double BetaPrior::log_density(const Param& theta) const {
  double t = theta(0);
  if (t < 0.0 || t > 1.0) return ninf;
  double l = -lbeta_;
  if (a_ != 1.0) l += t > 0.0 ? (a_ - 1.0) * std::log(t) : (a_ > 1.0 ? ninf : std::numeric_limits<double>::infinity());
  if (b_ != 1.0) l += t < 1.0 ? (b_ - 1.0) * std::log1p(-t) : (b_ > 1.0 ? ninf : std::numeric_limits<double>::infinity());
  return l;
}

Param BetaPrior::sample(Rng& rng) const { return scalar_param(beta_draw(a_, b_, rng)); }

NormalPrior::NormalPrior(double mean, double sd) : mean_(mean), sd_(sd) {
  if (!(sd > 0.0)) throw InvalidArgument("normal prior: sd must be positive");
}

double NormalPrior::log_density(const Param& theta) const {
  double z = (theta(0) - mean_) / sd_;
  return -0.5 * z * z - std::log(sd_) - 0.5 * std::log(2.0 * std::numbers::pi);
}

Param NormalPrior::sample(Rng& rng) const { return scalar_param(mean_ + sd_ * std_normal(rng)); }

double prior_weight(const Prior& p, const Param& theta) { return p.weight(theta); }

std::vector<double> prob2poss(std::span<const double> masses) {
  const std::size_t n = masses.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (masses[j] <= masses[i]) s += masses[j];
    out[i] = std::min(s, 1.0);
  }
  return out;
}

GridPrior prob2poss(const PrecisePrior& p, const ParamDomain& grid, std::size_t mc, Rng& rng) {
  if (grid.dims() != 1 || !grid.is_interval(0)) throw NotSupported("prob2poss: continuous transform needs a 1-D interval grid");
  if (mc < 100) throw InvalidArgument("prob2poss: need at least 100 draws");
  std::vector<double> d(mc);
  for (auto& x : d) x = p.log_density(p.sample(rng));
  std::sort(d.begin(), d.end());
  const auto m = static_cast<double>(mc);
  Arr v(grid.size()), se(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    double t = p.log_density(grid.point(i));
    double f = t > ninf ? static_cast<double>(std::upper_bound(d.begin(), d.end(), t + tie_tol) - d.begin()) / m : 0.0;
    v(i) = f;
    se(i) = std::sqrt(f * (1.0 - f) / m);
  }
  const auto& ax = grid.interval_axis(0);
  auto mode = scan_maximize_1d([&](double t) { return p.log_density(scalar_param(t)); }, ax.lower, ax.upper,
                               static_cast<int>(ax.points));
  ContourMeta meta;
  meta.mc_size = mc;
  meta.engine = "prob2poss";
  meta.std_err = se;
  meta.peak_at = mode.x;
  meta.peak_value = 1.0;
  return GridPrior(Contour(grid, std::move(v), std::move(meta)));
}

}  // namespace pim
