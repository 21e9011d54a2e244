#include "pim/predict.hpp"

#include "pim/optimize.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pim {

namespace {

constexpr double ninf = -std::numeric_limits<double>::infinity();

constexpr std::uint64_t salt_repr = 0x3f;
constexpr std::uint64_t salt_pred_post = 0x4a;

double chisq_survival(double x, double df) {
  if (!(x > 0.0)) return 1.0;
  boost::math::chi_squared_distribution<double> d(df);
  return boost::math::cdf(boost::math::complement(d, x));
}

std::vector<double> z_values(const ParamDomain& z_grid) {
  if (z_grid.dims() != 1) throw InvalidArgument("prediction needs a 1-D grid for Z");
  std::vector<double> zs(static_cast<std::size_t>(z_grid.size()));
  for (Index j = 0; j < z_grid.size(); ++j) zs[static_cast<std::size_t>(j)] = z_grid.point(j)(0);
  return zs;
}

bool sorted_1d(const std::vector<Param>& thetas) {
  if (thetas.size() < 3 || thetas.front().size() != 1) return false;
  for (std::size_t i = 1; i < thetas.size(); ++i)
    if (thetas[i].size() != 1 || !(thetas[i](0) > thetas[i - 1](0))) return false;
  return true;
}

// grid max of f, polished by Brent on 1-D grids
Optimum profile(const std::function<double(const Param&)>& f, const std::vector<Param>& thetas, bool polish) {
  std::size_t best = 0;
  double bv = ninf;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    double v = f(thetas[i]);
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  Optimum o{thetas[best], bv};
  if (polish && bv > ninf) {
    double lo = thetas[best > 0 ? best - 1 : 0](0);
    double hi = thetas[std::min(best + 1, thetas.size() - 1)](0);
    auto r = maximize_1d([&](double t) { return f(scalar_param(t)); }, lo, hi, 1e-12);
    if (r.value > o.value) o = r;
  }
  return o;
}

void put_peak(ContourMeta& meta, const ParamDomain& z_grid, double z, double value) {
  Param at = scalar_param(z);
  if (!z_grid.locate(at)) return;
  meta.peak_at = at;
  meta.peak_value = value;
}

// calibration of a (Y, Z) statistic at one theta
EtaDistribution calibrate_joint(const JointPredModel& jm, const Param& theta, const IMConfig& cfg, std::uint64_t index,
                                const std::function<double(const Data&, double)>& stat) {
  if (cfg.engine == EngineKind::exact) {
    auto ys = jm.y_model().support();
    auto zs = jm.z_support();
    if (ys.empty() || zs.empty()) throw NotSupported(jm.name() + ": exact prediction needs finite sample spaces");
    std::vector<std::pair<double, double>> xs;
    for (const auto& y : ys) {
      double wy = std::exp(jm.y_model().logdens(theta, y));
      if (!(wy > 0.0)) continue;
      for (double z : zs) {
        double w = wy * std::exp(jm.logdens_z(theta, z));
        if (w > 0.0) xs.emplace_back(stat(y, z), w);
      }
    }
    return EtaDistribution::weighted(std::move(xs));
  }
  Rng rng = substream(cfg.seed, index);
  std::vector<double> x(cfg.mc_size);
  for (auto& v : x) {
    Data y = jm.y_model().sample(theta, rng);
    double z = jm.sample_z(theta, rng);
    v = stat(y, z);
  }
  return EtaDistribution::sampled(std::move(x));
}

// max over theta of cdf_i(t_i(z)), with the standard error of the winning term
struct SupResult {
  Arr v;
  Arr se;
};

SupResult sup_over_theta(const std::vector<EtaDistribution>& dist, const std::vector<bool>& live, std::size_t nz,
                         const std::function<double(std::size_t, std::size_t)>& t) {
  SupResult r{Arr::Zero(static_cast<Index>(nz)), Arr::Zero(static_cast<Index>(nz))};
  parallel_for(nz, [&](std::size_t j) {
    double best = 0.0, se = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (!live[i]) continue;
      double tt = t(i, j);
      double p = dist[i].cdf(tt);
      if (p > best) {
        best = p;
        se = dist[i].std_err(tt);
      }
    }
    r.v(static_cast<Index>(j)) = best;
    r.se(static_cast<Index>(j)) = se;
  });
  return r;
}

Arr repr_values(const JointPredModel& jm, const Param& theta, const std::vector<double>& zs, std::size_t mc, Rng& rng) {
  Arr f = Arr::Zero(static_cast<Index>(zs.size()));
  if (jm.repr_closed(theta, zs.front())) {
    for (std::size_t j = 0; j < zs.size(); ++j) f(static_cast<Index>(j)) = *jm.repr_closed(theta, zs[j]);
    return f;
  }
  auto support = jm.z_support();
  if (!support.empty()) {
    for (std::size_t j = 0; j < zs.size(); ++j) {
      double lz = jm.logdens_z(theta, zs[j]);
      double acc = 0.0;
      for (double s : support) {
        double ls = jm.logdens_z(theta, s);
        if (ls <= lz + tie_tol) acc += std::exp(ls);
      }
      f(static_cast<Index>(j)) = std::min(acc, 1.0);
    }
    return f;
  }
  std::vector<double> x(mc);
  for (auto& v : x) v = jm.logdens_z(theta, jm.sample_z(theta, rng));
  auto d = EtaDistribution::sampled(std::move(x));
  for (std::size_t j = 0; j < zs.size(); ++j) f(static_cast<Index>(j)) = d.cdf(jm.logdens_z(theta, zs[j]));
  return f;
}

double logsumexp(const std::vector<double>& x) {
  double m = *std::max_element(x.begin(), x.end());
  if (!(m > ninf)) return ninf;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

// ---- joint model defaults

double JointPredModel::profile_log_eta(const Data&, double) const {
  throw NotSupported(name() + ": option 3 needs a closed-form profile over theta");
}

double JointPredModel::joint_log_eta(const Data&, double, const Param&) const {
  throw NotSupported(name() + ": option 2 needs a closed-form joint maximum");
}

std::pair<Param, double> JointPredModel::joint_mode(const Data&) const {
  throw NotSupported(name() + ": joint mode unavailable");
}

// ---- normal

double NormalPred::logdens_z(const Param& theta, double z) const {
  const double s = y_.sigma();
  double d = (z - theta(0)) / s;
  return -0.5 * d * d - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double NormalPred::sample_z(const Param& theta, Rng& rng) const { return theta(0) + y_.sigma() * std_normal(rng); }

double NormalPred::scaled_gap(const Data& y, double z) const {
  const double s = y_.sigma();
  double d = z - y(0);
  return d * d / (s * s * (1.0 + 1.0 / y_.n()));
}

double NormalPred::profile_log_eta(const Data& y, double z) const { return -0.5 * scaled_gap(y, z); }

double NormalPred::joint_log_eta(const Data& y, double z, const Param& theta) const {
  const double s2 = y_.sigma() * y_.sigma();
  double a = y(0) - theta(0), b = z - theta(0);
  return -(y_.n() * a * a + b * b) / (2.0 * s2);
}

std::optional<double> NormalPred::opt3_closed(const Data& y, double z) const {
  return chisq_survival(scaled_gap(y, z), 1.0);
}

std::optional<double> NormalPred::opt2_closed(const Data& y, double z) const {
  return chisq_survival(scaled_gap(y, z), 2.0);
}

std::optional<double> NormalPred::repr_closed(const Param& theta, double z) const {
  double d = (z - theta(0)) / y_.sigma();
  return chisq_survival(d * d, 1.0);
}

// ---- multinomial

double MultinomialPred::logdens_z(const Param& theta, double z) const {
  auto k = static_cast<Index>(std::lround(z));
  if (k < 0 || k >= theta.size()) return ninf;
  return theta(k) > 0.0 ? std::log(theta(k)) : ninf;
}

double MultinomialPred::sample_z(const Param& theta, Rng& rng) const {
  double u = uniform01(rng), acc = 0.0;
  for (Index k = 0; k + 1 < theta.size(); ++k) {
    acc += theta(k);
    if (u < acc) return static_cast<double>(k);
  }
  return static_cast<double>(theta.size() - 1);
}

double MultinomialPred::mode_z(const Param& theta) const {
  Index k = 0;
  theta.maxCoeff(&k);
  return static_cast<double>(k);
}

std::vector<double> MultinomialPred::z_support() const {
  std::vector<double> out;
  for (int k = 0; k < y_.categories(); ++k) out.push_back(k);
  return out;
}

double MultinomialPred::add_one_loglik(const Data& y, int z) const {
  const double total = y.sum() + 1.0;
  double l = 0.0;
  for (Index k = 0; k < y.size(); ++k) {
    double c = y(k) + (k == z ? 1.0 : 0.0);
    if (c > 0.0) l += c * std::log(c / total);
  }
  return l;
}

double MultinomialPred::profile_log_eta(const Data& y, double z) const {
  double best = ninf;
  for (int k = 0; k < y_.categories(); ++k) best = std::max(best, add_one_loglik(y, k));
  return std::min(add_one_loglik(y, static_cast<int>(std::lround(z))) - best, 0.0);
}

double MultinomialPred::joint_log_eta(const Data& y, double z, const Param& theta) const {
  double best = ninf;
  for (int k = 0; k < y_.categories(); ++k) best = std::max(best, add_one_loglik(y, k));
  double l = y_.loglik(theta, y) + logdens_z(theta, z);
  if (!(l > ninf)) return ninf;
  return std::min(l - best, 0.0);
}

std::pair<Param, double> MultinomialPred::joint_mode(const Data& y) const {
  int best = 0;
  for (int k = 1; k < y_.categories(); ++k)
    if (add_one_loglik(y, k) > add_one_loglik(y, best)) best = k;
  Param t = y;
  t(best) += 1.0;
  t /= t.sum();
  return {t, static_cast<double>(best)};
}

// ---- gamma max of k

double GammaMaxPred::logdens_z(const Param& theta, double z) const {
  const double a = theta(0), s = theta(1);
  if (!(z > 0.0) || !(a > 0.0) || !(s > 0.0)) return ninf;
  double lp = (a - 1.0) * std::log(z) - z / s - std::lgamma(a) - a * std::log(s);
  if (k_ == 1) return lp;
  double q = boost::math::gamma_q(a, z / s);
  if (!(q > 0.0)) return ninf;
  return std::log(static_cast<double>(k_)) + lp + (k_ - 1) * std::log(q);
}

double GammaMaxPred::sample_z(const Param& theta, Rng& rng) const {
  double m = 0.0;
  for (int j = 0; j < k_; ++j) m = std::max(m, gamma_draw(theta(0), theta(1), rng));
  return m;
}

double GammaMaxPred::mode_z(const Param& theta) const {
  const double a = theta(0), s = theta(1);
  double hi = s * (a + 12.0 * std::sqrt(a) + 4.0 * std::log(k_ + 1.0) + 10.0);
  return scan_maximize_1d([&](double z) { return logdens_z(theta, z); }, 1e-9 * hi, hi, 400).x(0);
}

// ---- combination rule and representations

double combine_fisher(double u, double v) {
  if (!(u > 0.0) || !(v > 0.0)) return 0.0;
  double w = u * v;
  if (w >= 1.0) return 1.0;
  return std::clamp(w * (1.0 - std::log(w)), 0.0, 1.0);
}

Contour poss_repr(const JointPredModel& jm, const Param& theta, const ParamDomain& z_grid, std::size_t mc_size,
                  std::uint64_t seed) {
  auto zs = z_values(z_grid);
  Rng rng = substream(seed, 0, salt_repr);
  Arr f = repr_values(jm, theta, zs, mc_size, rng);
  ContourMeta meta;
  meta.seed = seed;
  bool sampled = !jm.repr_closed(theta, zs.front()) && jm.z_support().empty();
  meta.engine = sampled ? "repr/mc" : (jm.z_support().empty() ? "repr/closed" : "repr/exact");
  if (sampled) {
    meta.mc_size = mc_size;
    meta.std_err = (f * (1.0 - f) / static_cast<double>(mc_size)).sqrt();
  }
  put_peak(meta, z_grid, jm.mode_z(theta), 1.0);
  return Contour(z_grid, std::move(f), std::move(meta));
}

// ---- option 3

Contour predict_opt3(const JointPredModel& jm, const Data& y, const ParamDomain& z_grid, const IMConfig& cfg) {
  cfg.validate();
  auto zs = z_values(z_grid);
  ContourMeta meta;
  meta.seed = cfg.seed;
  Arr v;
  if (cfg.engine == EngineKind::pivot && jm.opt3_closed(y, zs.front())) {
    v.resize(static_cast<Index>(zs.size()));
    for (std::size_t j = 0; j < zs.size(); ++j) v(static_cast<Index>(j)) = *jm.opt3_closed(y, zs[j]);
    meta.engine = "opt3/closed";
  } else {
    auto thetas = cfg.params();
    std::vector<double> t(zs.size());
    for (std::size_t j = 0; j < zs.size(); ++j) t[j] = jm.profile_log_eta(y, zs[j]);
    std::vector<EtaDistribution> dist(thetas.size());
    std::vector<bool> live(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) live[i] = jm.y_model().valid(thetas[i]);
    parallel_for(thetas.size(), [&](std::size_t i) {
      if (!live[i]) return;
      dist[i] = calibrate_joint(jm, thetas[i], cfg, i, [&](const Data& yy, double z) { return jm.profile_log_eta(yy, z); });
    });
    auto r = sup_over_theta(dist, live, zs.size(), [&](std::size_t, std::size_t j) { return t[j]; });
    v = std::move(r.v);
    meta.engine = std::string("opt3/") + engine_name(cfg.engine);
    if (cfg.engine != EngineKind::exact) {
      meta.mc_size = cfg.mc_size;
      meta.std_err = std::move(r.se);
    }
  }
  try {
    put_peak(meta, z_grid, jm.joint_mode(y).second, 1.0);
  } catch (const NotSupported&) {
  }
  return Contour(z_grid, std::move(v), std::move(meta));
}

Contour predict_opt3(const JointPredModel& jm, const PossibilisticPrior& p, const Data& y, const ParamDomain& z_grid,
                     const IMConfig& cfg) {
  if (p.kind() == PriorKind::vacuous) return predict_opt3(jm, y, z_grid, cfg);
  cfg.validate();
  auto zs = z_values(z_grid);
  auto thetas = cfg.params();
  const bool polish = sorted_1d(thetas) && !cfg.embed;
  auto q = prior_on_grid(jm.y_model(), p, thetas);
  ChoquetIntegrator choquet(p, thetas, q, cfg.rule, cfg.alpha_levels);

  auto weight = [&](const Param& th) {
    if (!jm.y_model().valid(th)) return ninf;
    return p.log_weight(th);
  };
  auto denom = [&](const Data& yy) {
    return profile(
        [&](const Param& th) {
          double w = weight(th);
          if (!(w > ninf)) return ninf;
          return jm.y_model().loglik(th, yy) + jm.logdens_z(th, jm.mode_z(th)) + w;
        },
        thetas, polish);
  };
  auto eta_q = [&](const Data& yy, double z, double den) {
    auto num = profile(
        [&](const Param& th) {
          double w = weight(th);
          if (!(w > ninf)) return ninf;
          return jm.joint_loglik(th, yy, z) + w;
        },
        thetas, polish);
    if (!(num.value > ninf)) return ninf;
    return std::min(num.value - den, 0.0);
  };

  std::vector<EtaDistribution> dist(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t i) {
    if (!(q[i] > 0.0)) return;
    dist[i] = calibrate_joint(jm, thetas[i], cfg, i, [&](const Data& yy, double z) { return eta_q(yy, z, denom(yy).value); });
  });

  auto top = denom(y);
  Arr v(static_cast<Index>(zs.size()));
  parallel_for(zs.size(), [&](std::size_t j) {
    double t = eta_q(y, zs[j], top.value);
    std::vector<double> prob(thetas.size(), 0.0);
    for (std::size_t i = 0; i < thetas.size(); ++i)
      if (q[i] > 0.0) prob[i] = dist[i].cdf(t);
    v(static_cast<Index>(j)) = choquet(prob);
  });
  ContourMeta meta;
  meta.seed = cfg.seed;
  meta.engine = std::string("opt3-partial/") + engine_name(cfg.engine);
  if (cfg.engine != EngineKind::exact) {
    meta.mc_size = cfg.mc_size;
    meta.std_err = (v * (1.0 - v) / static_cast<double>(cfg.mc_size)).sqrt();
  }
  std::vector<double> ones(thetas.size(), 1.0);
  put_peak(meta, z_grid, jm.mode_z(top.x), choquet(ones));
  return Contour(z_grid, std::move(v), std::move(meta));
}

Contour predict_opt3(const JointPredModel& jm, const PrecisePrior& p, const Data& y, const ParamDomain& z_grid,
                     const IMConfig& cfg) {
  cfg.validate();
  auto zs = z_values(z_grid);
  ContourMeta meta;
  meta.seed = cfg.seed;
  Arr v(static_cast<Index>(zs.size()));

  const auto* np = dynamic_cast<const NormalPred*>(&jm);
  const auto* nprior = dynamic_cast<const NormalPrior*>(&p);
  if (np && nprior) {
    const double s2 = np->normal().sigma() * np->normal().sigma();
    const double n = np->normal().n();
    const double t2 = nprior->sd() * nprior->sd();
    double prec = 1.0 / t2 + n / s2;
    double m = (nprior->mean() / t2 + n * y(0) / s2) / prec;
    double var = s2 + 1.0 / prec;
    for (std::size_t j = 0; j < zs.size(); ++j) v(static_cast<Index>(j)) = chisq_survival((zs[j] - m) * (zs[j] - m) / var, 1.0);
    meta.engine = "opt3-complete/closed";
    put_peak(meta, z_grid, m, 1.0);
    return Contour(z_grid, std::move(v), std::move(meta));
  }

  Rng rng = substream(cfg.seed, 0, salt_pred_post);
  auto ps = posterior_sample(jm.y_model(), p, y, cfg.mc_size, rng);
  const std::size_t n = ps.draws.size();
  const std::size_t mix = std::min<std::size_t>(400, n);
  std::vector<double> lw(mix);
  double wsum = ps.weights.head(static_cast<Index>(mix)).sum();
  for (std::size_t l = 0; l < mix; ++l) lw[l] = std::log(ps.weights(static_cast<Index>(l)) / wsum);
  auto log_pred = [&](double z) {
    std::vector<double> terms(mix);
    for (std::size_t l = 0; l < mix; ++l) terms[l] = lw[l] + jm.logdens_z(ps.draws[l], z);
    return logsumexp(terms);
  };
  std::vector<double> zdraw(n);
  for (std::size_t k = 0; k < n; ++k) zdraw[k] = jm.sample_z(ps.draws[k], rng);
  std::vector<std::pair<double, double>> xs(n);
  parallel_for(n, [&](std::size_t k) { xs[k] = {log_pred(zdraw[k]), ps.weights(static_cast<Index>(k))}; });
  auto dist = EtaDistribution::weighted(std::move(xs), false);

  std::vector<double> lz(zs.size());
  parallel_for(zs.size(), [&](std::size_t j) { lz[j] = log_pred(zs[j]); });
  Arr se(static_cast<Index>(zs.size()));
  for (std::size_t j = 0; j < zs.size(); ++j) {
    v(static_cast<Index>(j)) = dist.cdf(lz[j]);
    se(static_cast<Index>(j)) = dist.std_err(lz[j]);
  }
  meta.engine = "opt3-complete/mc";
  meta.mc_size = cfg.mc_size;
  meta.std_err = std::move(se);
  if (z_grid.is_interval(0) && zs.size() >= 3) {
    auto best = static_cast<std::size_t>(std::max_element(lz.begin(), lz.end()) - lz.begin());
    double lo = zs[best > 0 ? best - 1 : 0], hi = zs[std::min(best + 1, zs.size() - 1)];
    auto o = maximize_1d(log_pred, lo, hi, 1e-10);
    if (o.value < lz[best]) o = {scalar_param(zs[best]), lz[best]};
    put_peak(meta, z_grid, o.x(0), dist.cdf(o.value));
  }
  return Contour(z_grid, std::move(v), std::move(meta));
}

// ---- option 2

Contour predict_opt2(const JointPredModel& jm, const Data& y, const ParamDomain& z_grid, const IMConfig& cfg) {
  cfg.validate();
  auto zs = z_values(z_grid);
  ContourMeta meta;
  meta.seed = cfg.seed;
  Arr v;
  if (cfg.engine == EngineKind::pivot && jm.opt2_closed(y, zs.front())) {
    v.resize(static_cast<Index>(zs.size()));
    for (std::size_t j = 0; j < zs.size(); ++j) v(static_cast<Index>(j)) = *jm.opt2_closed(y, zs[j]);
    meta.engine = "opt2/closed";
  } else {
    auto thetas = cfg.params();
    std::vector<EtaDistribution> dist(thetas.size());
    std::vector<bool> live(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) live[i] = jm.y_model().valid(thetas[i]);
    parallel_for(thetas.size(), [&](std::size_t i) {
      if (!live[i]) return;
      const Param& th = thetas[i];
      dist[i] = calibrate_joint(jm, th, cfg, i, [&](const Data& yy, double z) { return jm.joint_log_eta(yy, z, th); });
    });
    auto r = sup_over_theta(dist, live, zs.size(),
                            [&](std::size_t i, std::size_t j) { return jm.joint_log_eta(y, zs[j], thetas[i]); });
    v = std::move(r.v);
    meta.engine = std::string("opt2/") + engine_name(cfg.engine);
    if (cfg.engine != EngineKind::exact) {
      meta.mc_size = cfg.mc_size;
      meta.std_err = std::move(r.se);
    }
  }
  try {
    put_peak(meta, z_grid, jm.joint_mode(y).second, 1.0);
  } catch (const NotSupported&) {
  }
  return Contour(z_grid, std::move(v), std::move(meta));
}

Contour predict_opt2(const JointPredModel& jm, const PrecisePrior& p, const Data& y, const ParamDomain& z_grid,
                     const IMConfig& cfg) {
  cfg.validate();
  auto zs = z_values(z_grid);
  auto thetas = cfg.params();
  const Model& m = jm.y_model();
  auto h = [&](const Param& th, double z) {
    if (!m.valid(th)) return ninf;
    double w = p.log_density(th);
    if (!(w > ninf)) return ninf;
    return jm.logdens_z(th, z) + m.loglik(th, y) + w;
  };
  Rng rng = substream(cfg.seed, 0, salt_pred_post);
  auto ps = posterior_sample(m, p, y, cfg.mc_size, rng);
  std::vector<std::pair<double, double>> xs(ps.draws.size());
  for (std::size_t k = 0; k < ps.draws.size(); ++k) {
    double z = jm.sample_z(ps.draws[k], rng);
    xs[k] = {h(ps.draws[k], z), ps.weights(static_cast<Index>(k))};
  }
  auto dist = EtaDistribution::weighted(std::move(xs), false);

  Arr v(static_cast<Index>(zs.size())), se(static_cast<Index>(zs.size()));
  parallel_for(zs.size(), [&](std::size_t j) {
    double best = ninf;
    for (const auto& th : thetas) best = std::max(best, h(th, zs[j]));
    v(static_cast<Index>(j)) = dist.cdf(best);
    se(static_cast<Index>(j)) = dist.std_err(best);
  });
  ContourMeta meta;
  meta.seed = cfg.seed;
  meta.engine = "opt2-complete/mc";
  meta.mc_size = cfg.mc_size;
  meta.std_err = std::move(se);
  auto top = profile([&](const Param& th) { return h(th, jm.mode_z(th)); }, thetas, sorted_1d(thetas) && !cfg.embed);
  if (top.value > ninf) put_peak(meta, z_grid, jm.mode_z(top.x), dist.cdf(top.value));
  return Contour(z_grid, std::move(v), std::move(meta));
}

// ---- option 1

Contour predict_opt1(const Eigen::MatrixXd& f, const Arr& pi, const ParamDomain& z_grid, ContourMeta meta) {
  if (f.rows() != pi.size() || f.cols() != z_grid.size())
    throw InvalidArgument("option 1 table does not match the theta and z grids");
  Arr v = Arr::Zero(z_grid.size());
  for (Index j = 0; j < f.cols(); ++j)
    for (Index i = 0; i < f.rows(); ++i) v(j) = std::max(v(j), combine_fisher(f(i, j), pi(i)));
  if (meta.engine == "analytic") meta.engine = "opt1";
  return Contour(z_grid, std::move(v), std::move(meta));
}

Contour predict_opt1(const JointPredModel& jm, const Contour& pi, const ParamDomain& z_grid, const IMConfig& cfg) {
  if (!jm.independent()) throw IndependenceRequired("option 1 combination needs Y and Z independent given theta");
  if (pi.domain() != cfg.grid) throw InvalidArgument("option 1: theta contour is not on the configured grid");
  auto zs = z_values(z_grid);
  auto thetas = cfg.params();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Index>(thetas.size()), static_cast<Index>(zs.size()));
  parallel_for(thetas.size(), [&](std::size_t i) {
    if (!(pi(static_cast<Index>(i)) > 0.0) || !jm.y_model().valid(thetas[i])) return;
    Rng rng = substream(cfg.seed, i, salt_repr);
    f.row(static_cast<Index>(i)) = repr_values(jm, thetas[i], zs, cfg.mc_size, rng).matrix().transpose();
  });
  ContourMeta meta;
  meta.seed = cfg.seed;
  meta.engine = std::string("opt1/") + engine_name(cfg.engine);
  if (pi.meta().mc_size > 0 || (!jm.repr_closed(thetas.front(), zs.front()) && jm.z_support().empty()))
    meta.mc_size = cfg.mc_size;
  Param hat;
  if (pi.meta().peak_at) {
    hat = *pi.meta().peak_at;
  } else {
    hat = thetas[static_cast<std::size_t>(pi.argmax().front())];
  }
  put_peak(meta, z_grid, jm.mode_z(hat), combine_fisher(1.0, pi.sup()));
  return predict_opt1(f, pi.values(), z_grid, std::move(meta));
}

Contour predict_opt1(const JointPredModel& jm, const Data& y, const ParamDomain& z_grid, const IMConfig& cfg) {
  return predict_opt1(jm, im_vacuous(jm.y_model(), y, cfg), z_grid, cfg);
}

// ---- multinomial

IMConfig simplex_config(int k, int steps) {
  if (k < 2) throw InvalidArgument("multinomial prediction needs K >= 2");
  if (steps < 2) throw InvalidArgument("simplex grid needs at least 2 steps");
  std::vector<std::string> names;
  std::string spec;
  for (int j = 0; j + 1 < k; ++j) {
    names.push_back("p" + std::to_string(j + 1));
    spec += (j ? "," : "") + std::string("0:1:") + std::to_string(steps + 1);
  }
  IMConfig cfg;
  cfg.grid = ParamDomain::parse(spec, names);
  cfg.embed = [k](const Param& x) {
    Param t(k);
    t.head(k - 1) = x;
    t(k - 1) = 1.0 - x.sum();
    if (std::abs(t(k - 1)) < 1e-12) t(k - 1) = 0.0;
    return t;
  };
  return cfg;
}

ParamDomain category_domain(int k) {
  std::vector<std::string> labels;
  for (int j = 0; j < k; ++j) labels.push_back(std::to_string(j + 1));
  return ParamDomain::labels("z", labels);
}

Contour predict_multinomial(const Data& y, const IMConfig& cfg) {
  const auto k = static_cast<int>(y.size());
  if (k < 2) throw InvalidArgument("multinomial prediction needs K >= 2");
  if ((y.array() < 0.0).any()) throw InvalidArgument("counts must be non-negative");
  const int n = static_cast<int>(std::lround(y.sum()));
  if (n < 1) throw InvalidArgument("multinomial prediction needs n >= 1");
  MultinomialPred jm(k, n);
  return predict_opt3(jm, y, category_domain(k), cfg);
}

}  // namespace pim
