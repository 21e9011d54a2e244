#include "pim/engine.hpp"

#include "pim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace pim {

namespace {

constexpr double ninf = -std::numeric_limits<double>::infinity();

// salts keep the streams of different engines apart under one seed
constexpr std::uint64_t salt_importance = 0x1d;
constexpr std::uint64_t salt_posterior = 0x2e;

Arr binomial_se(const Arr& v, double n) { return (v * (1.0 - v) / n).sqrt(); }

void set_peak(ContourMeta& meta, const IMConfig& cfg, const Param& at, double value) {
  if (cfg.embed) return;
  if (!cfg.grid.locate(at)) return;
  meta.peak_at = at;
  meta.peak_value = value;
}

}  // namespace

void IMConfig::validate() const {
  if (grid.size() == 0) throw InvalidArgument("empty parameter grid");
  if (engine == EngineKind::mc || engine == EngineKind::importance) {
    if (mc_size < 100) throw InvalidArgument("Monte Carlo size must be at least 100");
  }
  if (alpha_levels < 10) throw InvalidArgument("need at least 10 Choquet levels");
}

Param IMConfig::param(Index i) const { return embed ? embed(grid.point(i)) : grid.point(i); }

std::vector<Param> IMConfig::params() const {
  std::vector<Param> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  for (Index i = 0; i < grid.size(); ++i) out.push_back(param(i));
  return out;
}

const char* engine_name(EngineKind e) {
  switch (e) {
    case EngineKind::mc: return "mc";
    case EngineKind::importance: return "importance";
    case EngineKind::pivot: return "pivot";
    case EngineKind::exact: return "exact";
  }
  return "?";
}

Contour im_vacuous(const Model& m, const Data& y, const IMConfig& cfg) {
  if (cfg.engine == EngineKind::importance) return im_importance(m, y, cfg);
  cfg.validate();
  const Index n = cfg.grid.size();
  RelativeLikelihoodOrder eta(m);
  Arr v(n), se = Arr::Zero(n);
  ContourMeta meta;
  meta.seed = cfg.seed;
  meta.engine = std::string("vacuous/") + engine_name(cfg.engine);

  if (cfg.engine == EngineKind::pivot) {
    if (m.closed_contour(y, cfg.param(0))) {
      for (Index i = 0; i < n; ++i) v(i) = *m.closed_contour(y, cfg.param(i));
      meta.engine = "vacuous/closed";
    } else if (m.pivot()) {
      Rng rng = substream(cfg.seed, 0);
      auto d = calibrate_mc(m, eta, cfg.param(0), cfg.mc_size, rng);
      for (Index i = 0; i < n; ++i) v(i) = d.cdf(eta.log_eta(y, cfg.param(i)));
      meta.mc_size = cfg.mc_size;
      se = binomial_se(v, static_cast<double>(cfg.mc_size));
      meta.std_err = se;
    } else {
      throw NotSupported(m.name() + ": no pivot available, use the mc engine");
    }
  } else {
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
      const auto i = static_cast<Index>(k);
      Param th = cfg.param(i);
      if (!m.valid(th)) {
        v(i) = 0.0;
        return;
      }
      double t = eta.log_eta(y, th);
      if (cfg.engine == EngineKind::exact) {
        v(i) = calibrate_exact(m, eta, th).cdf(t);
      } else {
        Rng rng = substream(cfg.seed, k);
        v(i) = calibrate_mc(m, eta, th, cfg.mc_size, rng).cdf(t);
      }
    });
    if (cfg.engine == EngineKind::mc) {
      meta.mc_size = cfg.mc_size;
      meta.std_err = binomial_se(v, static_cast<double>(cfg.mc_size));
    }
  }
  try {
    Param hat = m.mle(y);
    if (m.valid(hat)) set_peak(meta, cfg, hat, 1.0);
  } catch (const UnboundedLikelihood&) {
  }
  return Contour(cfg.grid, std::move(v), std::move(meta));
}

double choquet_step(std::span<const double> q, std::span<const double> prob) {
  std::vector<std::size_t> ord(q.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return q[a] > q[b]; });
  double acc = 0.0, run = 0.0;
  for (std::size_t k = 0; k < ord.size(); ++k) {
    run = std::max(run, prob[ord[k]]);
    double top = k == 0 ? 1.0 : q[ord[k]];
    double next = k + 1 < ord.size() ? q[ord[k + 1]] : 0.0;
    acc += (top - next) * run;
  }
  return acc;
}

ChoquetIntegrator::ChoquetIntegrator(const PossibilisticPrior& p, const std::vector<Param>& thetas, std::vector<double> q,
                                     ChoquetRule rule, std::size_t levels)
    : q_(std::move(q)) {
  const std::size_t n = thetas.size();
  exact_ = rule == ChoquetRule::exact || (rule == ChoquetRule::automatic && p.stepwise());
  if (exact_) {
    by_q_.resize(n);
    std::iota(by_q_.begin(), by_q_.end(), 0);
    std::stable_sort(by_q_.begin(), by_q_.end(), [&](std::size_t a, std::size_t b) { return q_[a] > q_[b]; });
    double top = q_[by_q_.front()];
    if (top < 0.99) {
      std::ostringstream os;
      os << "prior contour peaks at " << top << " on the grid, its upper cuts hold no grid point";
      throw EmptyCut(os.str());
    }
    return;
  }
  cuts_.resize(levels);
  for (std::size_t l = 0; l < levels; ++l) {
    double alpha = (static_cast<double>(l) + 0.5) / static_cast<double>(levels);
    for (std::size_t r = 0; r < n; ++r)
      if (q_[r] > 0.0 && p.in_cut(alpha, thetas[r])) cuts_[l].push_back(r);
    if (cuts_[l].empty()) {
      std::ostringstream os;
      os << "alpha cut at level " << alpha << " contains no grid point";
      throw EmptyCut(os.str());
    }
  }
}

double ChoquetIntegrator::operator()(const std::vector<double>& prob) const {
  if (exact_) {
    double acc = 0.0, run = 0.0;
    for (std::size_t k = 0; k < by_q_.size(); ++k) {
      run = std::max(run, prob[by_q_[k]]);
      double top = k == 0 ? 1.0 : q_[by_q_[k]];
      double next = k + 1 < by_q_.size() ? q_[by_q_[k + 1]] : 0.0;
      acc += (top - next) * run;
    }
    return std::clamp(acc, 0.0, 1.0);
  }
  double acc = 0.0;
  for (const auto& cut : cuts_) {
    double best = 0.0;
    for (auto r : cut) best = std::max(best, prob[r]);
    acc += best;
  }
  return std::clamp(acc / static_cast<double>(cuts_.size()), 0.0, 1.0);
}

std::vector<double> prior_on_grid(const Model& m, const PossibilisticPrior& p, const std::vector<Param>& thetas) {
  std::vector<double> q(thetas.size());
  for (std::size_t r = 0; r < thetas.size(); ++r) q[r] = m.valid(thetas[r]) ? p.contour(thetas[r]) : 0.0;
  return q;
}

PartialIM::PartialIM(const Model& m, const PossibilisticPrior& p, IMConfig cfg)
    : m_(m), p_(p), cfg_(std::move(cfg)), thetas_(cfg_.params()), order_(m, p, thetas_) {
  cfg_.validate();
  const std::size_t n = thetas_.size();
  q_ = prior_on_grid(m_, p_, thetas_);
  choquet_ = ChoquetIntegrator(p_, thetas_, q_, cfg_.rule, cfg_.alpha_levels);

  dist_.resize(n);
  parallel_for(n, [&](std::size_t r) {
    if (!(q_[r] > 0.0)) return;
    if (cfg_.engine == EngineKind::exact) {
      dist_[r] = calibrate_exact(m_, order_, thetas_[r]);
    } else {
      Rng rng = substream(cfg_.seed, r);
      dist_[r] = calibrate_mc(m_, order_, thetas_[r], cfg_.mc_size, rng);
    }
  });
}

double PartialIM::plausibility_at(const Data& y, const Param& theta, double log_sup) const {
  double t = order_.log_eta_at(y, theta, log_sup);
  std::vector<double> prob(thetas_.size(), 0.0);
  for (std::size_t r = 0; r < thetas_.size(); ++r)
    if (q_[r] > 0.0) prob[r] = dist_[r].cdf(t);
  return choquet_(prob);
}

double PartialIM::plausibility(const Data& y, const Param& theta) const {
  return plausibility_at(y, theta, order_.mode(y).value);
}

Contour PartialIM::contour(const Data& y) const {
  auto mode = order_.mode(y);
  const Index n = cfg_.grid.size();
  Arr v(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    v(static_cast<Index>(k)) = plausibility_at(y, thetas_[k], mode.value);
  });
  ContourMeta meta;
  meta.seed = cfg_.seed;
  meta.engine = p_.kind() == PriorKind::vacuous ? "naive" : "partial";
  meta.engine += std::string("/") + engine_name(cfg_.engine);
  if (cfg_.engine != EngineKind::exact) {
    meta.mc_size = cfg_.mc_size;
    meta.std_err = binomial_se(v, static_cast<double>(cfg_.mc_size));
  }
  set_peak(meta, cfg_, mode.x, plausibility_at(y, mode.x, mode.value));
  return Contour(cfg_.grid, std::move(v), std::move(meta));
}

Contour im_partial(const Model& m, const PossibilisticPrior& p, const Data& y, const IMConfig& cfg) {
  return PartialIM(m, p, cfg).contour(y);
}

Contour im_vacuous_naive(const Model& m, const Data& y, const IMConfig& cfg) {
  static const VacuousPrior vacuous;
  return PartialIM(m, vacuous, cfg).contour(y);
}

PosteriorSample posterior_sample(const Model& m, const PrecisePrior& p, const Data& y, std::size_t draws, Rng& rng) {
  PosteriorSample ps;
  ps.draws.reserve(draws);
  const auto* bin = dynamic_cast<const Binomial*>(&m);
  const auto* beta = dynamic_cast<const BetaPrior*>(&p);
  const auto* nk = dynamic_cast<const NormalKnownVar*>(&m);
  const auto* nrm = dynamic_cast<const NormalPrior*>(&p);
  if (bin && beta) {
    double a = beta->a() + y(0), b = beta->b() + bin->n() - y(0);
    for (std::size_t k = 0; k < draws; ++k) ps.draws.push_back(scalar_param(beta_draw(a, b, rng)));
    ps.conjugate = true;
  } else if (nk && nrm) {
    double pl = 1.0 / (nk->se() * nk->se()), pp = 1.0 / (nrm->sd() * nrm->sd());
    double mean = (pl * y(0) + pp * nrm->mean()) / (pl + pp), sd = 1.0 / std::sqrt(pl + pp);
    for (std::size_t k = 0; k < draws; ++k) ps.draws.push_back(scalar_param(mean + sd * std_normal(rng)));
    ps.conjugate = true;
  }
  if (ps.conjugate) {
    ps.weights = Arr::Ones(static_cast<Index>(draws));
    ps.ess = static_cast<double>(draws);
    return ps;
  }
  Arr lw(static_cast<Index>(draws));
  for (std::size_t k = 0; k < draws; ++k) {
    Param t = p.sample(rng);
    lw(static_cast<Index>(k)) = m.valid(t) ? m.loglik(t, y) : ninf;
    ps.draws.push_back(std::move(t));
  }
  double top = lw.maxCoeff();
  if (!(top > ninf)) throw DegeneratePosterior("no prior draw has positive likelihood");
  ps.weights = (lw - top).exp();
  ps.ess = ps.weights.sum() * ps.weights.sum() / ps.weights.square().sum();
  if (ps.ess < 50.0) {
    std::ostringstream os;
    os << "importance weights from the prior have effective sample size " << ps.ess << " (below 50)";
    throw DegeneratePosterior(os.str());
  }
  return ps;
}

namespace {

EtaDistribution posterior_order(const Model& m, const PrecisePrior& p, const Data& y, const PosteriorSample& ps) {
  std::vector<std::pair<double, double>> xs;
  xs.reserve(ps.draws.size());
  for (std::size_t k = 0; k < ps.draws.size(); ++k) {
    const auto& t = ps.draws[k];
    double lp = m.valid(t) ? m.loglik(t, y) + p.log_density(t) : ninf;
    xs.emplace_back(lp, ps.weights(static_cast<Index>(k)));
  }
  return EtaDistribution::weighted(std::move(xs), false);
}

double log_post(const Model& m, const PrecisePrior& p, const Data& y, const Param& t) {
  return m.valid(t) ? m.loglik(t, y) + p.log_density(t) : ninf;
}

}  // namespace

double complete_plausibility(const Model& m, const PrecisePrior& p, const Data& y, const Param& theta,
                             std::size_t draws, Rng& rng) {
  auto ps = posterior_sample(m, p, y, draws, rng);
  return posterior_order(m, p, y, ps).cdf(log_post(m, p, y, theta));
}

Contour im_complete(const Model& m, const PrecisePrior& p, const Data& y, const IMConfig& cfg) {
  cfg.validate();
  Rng rng = substream(cfg.seed, 0, salt_posterior);
  auto ps = posterior_sample(m, p, y, cfg.mc_size, rng);
  auto d = posterior_order(m, p, y, ps);
  const Index n = cfg.grid.size();
  Arr v(n);
  for (Index i = 0; i < n; ++i) v(i) = d.cdf(log_post(m, p, y, cfg.param(i)));
  ContourMeta meta;
  meta.seed = cfg.seed;
  meta.engine = ps.conjugate ? "complete/conjugate" : "complete/importance";
  meta.mc_size = cfg.mc_size;
  meta.std_err = binomial_se(v, ps.ess);
  if (!cfg.embed && cfg.grid.dims() == 1 && cfg.grid.is_interval(0)) {
    const auto& ax = cfg.grid.interval_axis(0);
    auto mode = scan_maximize_1d([&](double t) { return log_post(m, p, y, scalar_param(t)); }, ax.lower, ax.upper,
                                 static_cast<int>(ax.points));
    set_peak(meta, cfg, mode.x, d.cdf(mode.value));
  }
  return Contour(cfg.grid, std::move(v), std::move(meta));
}

Contour im_importance(const Model& m, const Data& y, const IMConfig& cfg) {
  cfg.validate();
  const Param hat = m.mle(y);
  const std::size_t draws = cfg.mc_size;
  std::vector<Data> ys(draws);
  std::vector<double> lsup(draws), l0(draws);
  parallel_for(draws, [&](std::size_t k) {
    Rng rng = substream(cfg.seed, k, salt_importance);
    ys[k] = m.sample(hat, rng);
    lsup[k] = m.log_sup(ys[k]);
    l0[k] = m.logdens(hat, ys[k]);
  });

  const Index n = cfg.grid.size();
  Arr v(n), ess(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    const auto i = static_cast<Index>(k);
    Param th = cfg.param(i);
    if (!m.valid(th)) {
      v(i) = 0.0;
      ess(i) = 0.0;
      return;
    }
    const double t = m.log_rel_lik(th, y);
    std::vector<double> lw(draws), le(draws);
    double top = ninf;
    for (std::size_t j = 0; j < draws; ++j) {
      double ld = m.logdens(th, ys[j]);
      lw[j] = ld - l0[j];
      le[j] = std::min(m.loglik(th, ys[j]) - lsup[j], 0.0);
      top = std::max(top, lw[j]);
    }
    double sw = 0.0, sw2 = 0.0, hit = 0.0;
    for (std::size_t j = 0; j < draws; ++j) {
      double w = top > ninf ? std::exp(lw[j] - top) : 0.0;
      sw += w;
      sw2 += w * w;
      if (le[j] <= t + tie_tol) hit += w;
    }
    v(i) = sw > 0.0 ? hit / sw : 0.0;
    ess(i) = sw2 > 0.0 ? sw * sw / sw2 : 0.0;
  });

  ContourMeta meta;
  meta.seed = cfg.seed;
  meta.engine = "vacuous/importance";
  meta.mc_size = draws;
  meta.ess = ess;
  meta.std_err = (v * (1.0 - v) / ess.max(1.0)).sqrt();
  const auto low = (ess < 50.0).count();
  if (low > 0) meta.warnings.push_back(std::to_string(low) + " grid points with effective sample size below 50");
  set_peak(meta, cfg, hat, 1.0);
  return Contour(cfg.grid, std::move(v), std::move(meta));
}

}  // namespace pim
