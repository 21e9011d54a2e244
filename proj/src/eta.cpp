#include "pim/eta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pim {

namespace {
constexpr double ninf = -std::numeric_limits<double>::infinity();
}

EtaDistribution EtaDistribution::sampled(std::vector<double> log_eta) {
  EtaDistribution d;
  std::sort(log_eta.begin(), log_eta.end());
  d.n_ = log_eta.size();
  d.ess_ = static_cast<double>(d.n_);
  d.cum_.resize(d.n_);
  for (std::size_t k = 0; k < d.n_; ++k) d.cum_[k] = static_cast<double>(k + 1) / static_cast<double>(d.n_);
  d.x_ = std::move(log_eta);
  return d;
}

EtaDistribution EtaDistribution::weighted(std::vector<std::pair<double, double>> log_eta_mass, bool exact) {
  EtaDistribution d;
  std::sort(log_eta_mass.begin(), log_eta_mass.end());
  double total = 0.0, sq = 0.0;
  for (const auto& [x, w] : log_eta_mass) {
    total += w;
    sq += w * w;
  }
  if (!(total > 0.0)) throw InvalidArgument("eta distribution has no mass");
  double acc = 0.0;
  for (const auto& [x, w] : log_eta_mass) {
    acc += w;
    d.x_.push_back(x);
    d.cum_.push_back(acc / total);
  }
  d.cum_.back() = 1.0;
  d.n_ = log_eta_mass.size();
  d.ess_ = total * total / sq;
  d.exact_ = exact;
  return d;
}

double EtaDistribution::cdf(double log_t) const {
  if (x_.empty()) return 0.0;
  auto it = std::upper_bound(x_.begin(), x_.end(), log_t + tie_tol);
  if (it == x_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - x_.begin()) - 1];
}

double EtaDistribution::std_err(double log_t) const {
  if (exact_) return 0.0;
  double p = cdf(log_t);
  return std::sqrt(p * (1.0 - p) / std::max(ess_, 1.0));
}

BaselineOrder::BaselineOrder(const Model& m, const Prior& p, std::vector<Param> search)
    : m_(m), p_(p), search_(std::move(search)) {
  if (search_.empty()) throw InvalidArgument("plausibility order needs a non-empty search grid");
  interval_1d_ = search_.size() >= 3 && search_.front().size() == 1;
  for (std::size_t i = 1; interval_1d_ && i < search_.size(); ++i)
    if (search_[i].size() != 1 || !(search_[i](0) > search_[i - 1](0))) interval_1d_ = false;
}

double BaselineOrder::joint(const Data& y, const Param& theta) const {
  if (!m_.valid(theta)) return ninf;
  double w = p_.log_weight(theta);
  if (!(w > ninf)) return ninf;
  return m_.loglik(theta, y) + w;
}

Optimum BaselineOrder::mode(const Data& y) const {
  if (p_.kind() == PriorKind::vacuous) return {m_.mle(y), m_.log_sup(y)};
  std::size_t best = 0;
  double best_v = ninf;
  for (std::size_t i = 0; i < search_.size(); ++i) {
    double v = joint(y, search_[i]);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  Optimum o{search_[best], best_v};
  try {
    Param t = m_.mle(y);
    double v = joint(y, t);
    if (v > o.value) o = {t, v};
  } catch (const UnboundedLikelihood&) {
  }
  if (interval_1d_ && best_v > ninf) {
    double lo = search_[best > 0 ? best - 1 : 0](0);
    double hi = search_[std::min(best + 1, search_.size() - 1)](0);
    auto r = maximize_1d([&](double t) { return joint(y, scalar_param(t)); }, lo, hi, 1e-12);
    if (r.value > o.value) o = r;
  }
  if (!(o.value > ninf)) throw UnboundedLikelihood("plausibility order: no search point has positive weight");
  return o;
}

double BaselineOrder::log_eta_at(const Data& y, const Param& theta, double log_sup) const {
  if (p_.kind() == PriorKind::vacuous) return m_.log_rel_lik(theta, y);
  double v = joint(y, theta);
  if (!(v > ninf)) return ninf;
  return std::min(v - log_sup, 0.0);
}

double BaselineOrder::log_eta(const Data& y, const Param& theta) const {
  if (p_.kind() == PriorKind::vacuous) return m_.log_rel_lik(theta, y);
  return log_eta_at(y, theta, mode(y).value);
}

EtaDistribution calibrate_mc(const Model& m, const EtaOrder& eta, const Param& theta, std::size_t draws, Rng& rng) {
  std::vector<double> x(draws);
  for (auto& v : x) v = eta.log_eta(m.sample(theta, rng), theta);
  return EtaDistribution::sampled(std::move(x));
}

EtaDistribution calibrate_exact(const Model& m, const EtaOrder& eta, const Param& theta) {
  auto sup = m.support();
  if (sup.empty()) throw NotSupported(m.name() + ": exact engine needs an enumerable sample space");
  std::vector<std::pair<double, double>> xs;
  xs.reserve(sup.size());
  for (const auto& y : sup) {
    double w = std::exp(m.logdens(theta, y));
    if (w > 0.0) xs.emplace_back(eta.log_eta(y, theta), w);
  }
  return EtaDistribution::weighted(std::move(xs));
}

}  // namespace pim
