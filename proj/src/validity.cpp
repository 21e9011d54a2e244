#include "pim/validity.hpp"

#include "pim/contour_io.hpp"
#include "pim/eta.hpp"
#include "pim/nonparam.hpp"
#include "pim/priors.hpp"

#include <boost/math/distributions/gamma.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <sstream>

namespace pim {

namespace {

constexpr double count_tol = 1e-12;

std::uint64_t data_key(const Data& y) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (Index i = 0; i < y.size(); ++i) {
    double v = y(i);
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    h = splitmix64(h ^ bits);
  }
  return h;
}

std::vector<double> run_trials(const Generator& g, std::size_t n_sim, std::uint64_t seed, std::uint64_t salt) {
  std::vector<double> out(n_sim);
  parallel_for(n_sim, [&](std::size_t s) {
    Rng rng = substream(seed, s, salt);
    out[s] = g.trial(rng);
  });
  return out;
}

double share_le(const std::vector<double>& v, double alpha) {
  std::size_t c = 0;
  for (double x : v)
    if (x <= alpha + count_tol) ++c;
  return static_cast<double>(c) / static_cast<double>(v.size());
}

Data iid_normal(double mean, double sd, Index n, Rng& rng) {
  Data y(n);
  for (Index i = 0; i < n; ++i) y(i) = mean + sd * std_normal(rng);
  return y;
}

}  // namespace

Generator at_param(const Model& m, const Param& theta, PointBuilder b, std::string label) {
  if (label.empty()) {
    label = m.name() + " at";
    for (Index i = 0; i < theta.size(); ++i) label += " " + format_number(theta(i));
  }
  return {std::move(label), [&m, theta, b = std::move(b)](Rng& rng) { return b(m.sample(theta, rng), theta); }};
}

Generator from_sampler(const Model& m, std::function<Param(Rng&)> theta, PointBuilder b, std::string label) {
  return {std::move(label), [&m, theta = std::move(theta), b = std::move(b)](Rng& rng) {
            Param t = theta(rng);
            return b(m.sample(t, rng), t);
          }};
}

std::vector<double> default_alpha_grid() {
  std::vector<double> a;
  for (int k = 1; k <= 50; ++k) a.push_back(k / 100.0);
  return a;
}

double dkw_band(std::size_t n_sim, double delta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n_sim)));
}

ValidityReport check_strong_validity(const std::vector<Generator>& gens, std::size_t n_sim, std::uint64_t seed,
                                     std::vector<double> alpha_grid, std::string name) {
  if (gens.empty()) throw InvalidArgument("validity check needs at least one generator");
  if (n_sim < 1) throw InvalidArgument("validity check needs simulations");
  ValidityReport r;
  r.name = std::move(name);
  r.alpha_grid = std::move(alpha_grid);
  r.exceedance.assign(r.alpha_grid.size(), 0.0);
  r.n_sim = n_sim;
  r.dkw_band = dkw_band(n_sim);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    r.generators.push_back(gens[g].label);
    auto v = run_trials(gens[g], n_sim, seed, g + 1);
    for (std::size_t a = 0; a < r.alpha_grid.size(); ++a)
      r.exceedance[a] = std::max(r.exceedance[a], share_le(v, r.alpha_grid[a]));
  }
  r.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < r.alpha_grid.size(); ++a)
    r.max_violation = std::max(r.max_violation, r.exceedance[a] - r.alpha_grid[a] - r.dkw_band);
  r.pass = r.max_violation <= 0.0;
  return r;
}

nlohmann::json ValidityReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["generators"] = generators;
  j["alpha_grid"] = alpha_grid;
  j["exceedance"] = exceedance;
  j["n_sim"] = n_sim;
  j["dkw_band"] = dkw_band;
  j["max_violation"] = max_violation;
  j["verdict"] = pass ? "pass" : "fail";
  return j;
}

std::string ValidityReport::table() const {
  std::ostringstream os;
  os << name << "  (n_sim " << n_sim << ", band " << format_number(dkw_band) << ")\n";
  os << "  generators:";
  for (const auto& g : generators) os << " [" << g << "]";
  os << "\n  alpha   exceedance   slack\n";
  char line[96];
  for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
    std::snprintf(line, sizeof line, "  %5.2f   %10.4f   %+8.4f\n", alpha_grid[a], exceedance[a],
                  alpha_grid[a] + dkw_band - exceedance[a]);
    os << line;
  }
  os << "  max violation " << format_number(max_violation) << "  verdict " << (pass ? "pass" : "fail") << "\n";
  return os.str();
}

CoverageReport check_coverage(const std::vector<Generator>& gens, double alpha, std::size_t n_sim, std::uint64_t seed) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("coverage level must lie in [0, 1)");
  CoverageReport r;
  r.alpha = alpha;
  r.n_sim = n_sim;
  r.dkw_band = dkw_band(n_sim);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    auto v = run_trials(gens[g], n_sim, seed, g + 1);
    std::size_t out = 0;
    // outside the strict superlevel set
    for (double x : v)
      if (!(x > alpha)) ++out;
    r.noncoverage = std::max(r.noncoverage, static_cast<double>(out) / static_cast<double>(n_sim));
  }
  r.pass = r.noncoverage <= alpha + r.dkw_band;
  return r;
}

HalfCoherenceReport check_half_coherence(const std::vector<Arr>& contours, const Arr& prior, double tol,
                                         std::uint64_t seed) {
  if (contours.empty()) throw InvalidArgument("half-coherence needs at least one data value");
  const auto g = static_cast<std::size_t>(prior.size());
  for (const auto& c : contours)
    if (static_cast<std::size_t>(c.size()) != g) throw InvalidArgument("contour and prior grids differ");
  if (g == 0 || g > 62) throw InvalidArgument("half-coherence grid must hold 1 to 62 points");
  HalfCoherenceReport r;
  r.exhaustive = g <= 20;
  auto check = [&](std::uint64_t mask) {
    double pq_in = 0.0, pq_out = 0.0, up = 0.0, low_inf = 1.0;
    for (std::size_t i = 0; i < g; ++i) {
      if (mask >> i & 1u) pq_in = std::max(pq_in, prior(static_cast<Index>(i)));
      else pq_out = std::max(pq_out, prior(static_cast<Index>(i)));
    }
    for (const auto& c : contours) {
      double in = 0.0, out = 0.0;
      for (std::size_t i = 0; i < g; ++i) {
        if (mask >> i & 1u) in = std::max(in, c(static_cast<Index>(i)));
        else out = std::max(out, c(static_cast<Index>(i)));
      }
      up = std::max(up, in);
      low_inf = std::min(low_inf, 1.0 - out);
    }
    double gap_up = pq_in - up;
    double gap_low = low_inf - (1.0 - pq_out);
    r.worst_gap = std::max({r.worst_gap, gap_up, gap_low});
    if (gap_up > tol) ++r.upper_failures;
    if (gap_low > tol) ++r.lower_failures;
    ++r.subsets;
  };
  if (r.exhaustive) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g); ++mask) check(mask);
  } else {
    Rng rng = substream(seed, 0, 0x7c);
    const std::uint64_t full = g == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g) - 1;
    for (int k = 0; k < 10000; ++k) check(rng() & full);
  }
  r.pass = r.upper_failures == 0 && r.lower_failures == 0;
  return r;
}

HalfCoherenceReport check_half_coherence(const Model& m, const PossibilisticPrior& p, const IMConfig& cfg, double tol) {
  auto ys = m.support();
  if (ys.empty()) throw NotSupported(m.name() + ": half-coherence needs a finite sample space");
  IMConfig c = cfg;
  c.engine = EngineKind::exact;
  PartialIM im(m, p, c);
  std::vector<Arr> contours;
  for (const auto& y : ys) contours.push_back(im.contour(y).values());
  auto thetas = c.params();
  Arr q(static_cast<Index>(thetas.size()));
  for (std::size_t i = 0; i < thetas.size(); ++i) q(static_cast<Index>(i)) = m.valid(thetas[i]) ? p.contour(thetas[i]) : 0.0;
  return check_half_coherence(contours, q, tol, c.seed);
}

std::vector<ValidityReport> validity_suite(std::size_t n_sim, std::uint64_t seed) {
  std::vector<ValidityReport> out;

  {
    Binomial m(16);
    RelativeLikelihoodOrder order(m);
    PointBuilder b = [&](const Data& y, const Param& t) {
      return calibrate_exact(m, order, t).cdf(m.log_rel_lik(t, y));
    };
    std::vector<Generator> gens;
    for (int k = 1; k <= 9; ++k) gens.push_back(at_param(m, scalar_param(k / 10.0), b));
    out.push_back(check_strong_validity(gens, n_sim, seed, default_alpha_grid(), "binomial(16) vacuous"));
  }
  {
    NormalKnownVar m(1.0, 10);
    PointBuilder b = [&](const Data& y, const Param& t) { return *m.closed_contour(y, t); };
    std::vector<Generator> gens;
    for (double t : {-1.0, 0.0, 2.0}) gens.push_back(at_param(m, scalar_param(t), b));
    out.push_back(check_strong_validity(gens, n_sim, seed, default_alpha_grid(), "normal pivot"));
  }
  {
    Binomial m(16);
    BetaPrior prior(2.0, 2.0);
    PointBuilder b = [&](const Data& y, const Param& t) {
      Rng rng = substream(seed, data_key(y), 0x8d);
      return complete_plausibility(m, prior, y, t, 4000, rng);
    };
    std::vector<Generator> gens{from_sampler(m, [&](Rng& rng) { return prior.sample(rng); }, b, "theta ~ beta(2, 2)")};
    out.push_back(check_strong_validity(gens, n_sim, seed, default_alpha_grid(), "beta-binomial complete"));
  }
  {
    NormalKnownVar m(2.0, 15);
    MarkovPrior prior(1.0);
    IMConfig cfg;
    cfg.grid = ParamDomain::interval("theta", -20.0, 20.0, 401);
    cfg.mc_size = 1000;
    cfg.seed = seed;
    PartialIM im(m, prior, cfg);
    PointBuilder b = [&](const Data& y, const Param& t) { return im.plausibility(y, t); };
    std::vector<Generator> gens;
    for (double t : {0.0, 0.5, -0.5, 1.0, -1.0}) gens.push_back(at_param(m, scalar_param(t), b));
    for (double sign : {1.0, -1.0}) {
      gens.push_back(from_sampler(
          m, [sign, k = prior.k()](Rng& rng) { return scalar_param(sign * k / (1.0 - uniform01(rng))); }, b,
          sign > 0 ? "theta = K/U" : "theta = -K/U"));
    }
    out.push_back(check_strong_validity(gens, n_sim, seed, default_alpha_grid(), "normal + markov(K=1) partial"));
  }
  {
    NormalMeanSplit fam(1.0);
    std::vector<Generator> gens;
    for (double t : {0.0, 1.0}) {
      gens.push_back({"normal mean " + format_number(t) + ", n 20", [&fam, t](Rng& rng) {
                        Data y = iid_normal(t, 1.0, 20, rng);
                        return std::min(1.0, std::exp(split_log_eta(fam, y, 0.5, t)));
                      }});
    }
    out.push_back(check_strong_validity(gens, n_sim, seed, default_alpha_grid(), "split-LR normal"));
  }
  {
    const double r = 0.7;
    boost::math::gamma_distribution<double> g(3.0, 1.0);
    const double truth = boost::math::quantile(g, r);
    SampleOrder eta = [r](const Data& y, double t) { return el_quantile_eta(y, r, t); };
    Estimator est = [r](const Data& y) { return sample_quantile(y, r); };
    std::vector<Generator> gens{{"gamma(3, 1), n 25, r 0.7", [&](Rng& rng) {
                                   Data y(25);
                                   for (Index i = 0; i < 25; ++i) y(i) = gamma_draw(3.0, 1.0, rng);
                                   return bootstrap_plausibility(eta, y, est, 500, truth, rng());
                                 }}};
    out.push_back(check_strong_validity(gens, n_sim, seed, default_alpha_grid(), "bootstrap quantile"));
  }
  return out;
}

}  // namespace pim
