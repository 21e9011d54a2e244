#include <doctest.h>

#include "pim/engine.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>

using namespace pim;

namespace {

double chisq_sf(double x, double df) { return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x)); }

IMConfig make_cfg(const std::string& grid, EngineKind e, std::size_t mc = 4000, std::uint64_t seed = 11) {
  IMConfig c;
  c.grid = ParamDomain::parse(grid, {"theta"});
  c.engine = e;
  c.mc_size = mc;
  c.seed = seed;
  return c;
}

double grid_argmax(const Contour& c) { return c.domain().point(c.argmax().front())(0); }

}  // namespace

TEST_CASE("normal vacuous IM: Monte Carlo agrees with the chi-square(1) closed form") {
  NormalKnownVar m(2.0, 15);
  Data y = scalar_data(0.8);
  auto cfg = make_cfg("-2:3:101", EngineKind::mc, 4000);
  auto c = im_vacuous(m, y, cfg);
  const auto& se = *c.meta().std_err;
  for (Index i = 0; i < c.size(); ++i) {
    double t = c.domain().point(i)(0);
    double exact = chisq_sf(15.0 * (0.8 - t) * (0.8 - t) / 4.0, 1);
    CHECK(std::abs(c(i) - exact) <= 3.0 * std::max(se(i), 0.5 / 4000.0) + 1.0 / 4000.0);
  }
  CHECK(c.sup() == 1.0);
  REQUIRE(c.meta().peak_at);
  CHECK((*c.meta().peak_at)(0) == doctest::Approx(0.8));
}

TEST_CASE("pivot path reproduces the closed form exactly") {
  NormalKnownVar m(1.0, 10);
  auto c = im_vacuous(m, scalar_data(0.0), make_cfg("-1:1:21", EngineKind::pivot));
  for (Index i = 0; i < c.size(); ++i) {
    double t = c.domain().point(i)(0);
    CHECK(c(i) == doctest::Approx(chisq_sf(10.0 * t * t, 1)).epsilon(1e-12));
  }
  CHECK(c.meta().mc_size == 0);
}

TEST_CASE("plain Monte Carlo values lie on the lattice k / M") {
  Binomial m(16);
  const std::size_t M = 1000;
  auto c = im_vacuous(m, scalar_data(5), make_cfg("0:1:41", EngineKind::mc, M));
  for (Index i = 0; i < c.size(); ++i) {
    double k = c(i) * M;
    CHECK(std::abs(k - std::round(k)) < 1e-9);
  }
}

TEST_CASE("vacuous contour attains 1 at the MLE") {
  Binomial m(25);
  auto c = im_vacuous(m, scalar_data(7), make_cfg("0:1:201", EngineKind::mc, 5000, 42));
  auto i = *c.domain().locate(scalar_param(0.28));
  CHECK(c(i) == 1.0);
  auto e = im_vacuous(m, scalar_data(7), make_cfg("0:1:201", EngineKind::exact));
  CHECK(e(i) == 1.0);
}

TEST_CASE("exact and Monte Carlo engines agree on the binomial") {
  Binomial m(16);
  auto e = im_vacuous(m, scalar_data(3), make_cfg("0:1:51", EngineKind::exact));
  auto c = im_vacuous(m, scalar_data(3), make_cfg("0:1:51", EngineKind::mc, 20000));
  for (Index i = 0; i < e.size(); ++i) CHECK(std::abs(e(i) - c(i)) <= 4.0 * std::sqrt(0.25 / 20000.0));
}

TEST_CASE("contours tighten as n grows with the same MLE") {
  auto c16 = im_vacuous(Binomial(16), scalar_data(8), make_cfg("0:1:101", EngineKind::mc, 5000, 1));
  auto c32 = im_vacuous(Binomial(32), scalar_data(16), make_cfg("0:1:101", EngineKind::mc, 5000, 2));
  const double se = 3.0 * std::sqrt(2.0 * 0.25 / 5000.0);
  for (Index i = 0; i < c16.size(); ++i) {
    double t = c16.domain().point(i)(0);
    if (std::abs(t - 0.5) >= 0.15) CHECK(c32(i) <= c16(i) + se);
  }
}

TEST_CASE("naive construction dominates the reduced one") {
  Binomial m(16);
  auto cfg = make_cfg("0:1:81", EngineKind::exact);
  auto red = im_vacuous(m, scalar_data(8), cfg);
  auto naive = im_vacuous_naive(m, scalar_data(8), cfg);
  bool strict = false;
  for (Index i = 0; i < red.size(); ++i) {
    CHECK(naive(i) >= red(i) - 1e-12);
    strict = strict || naive(i) > red(i) + 1e-9;
  }
  CHECK(strict);
}

TEST_CASE("naive equals reduced for an exact pivot") {
  NormalKnownVar m(1.0, 4);
  auto cfg = make_cfg("-2:2:41", EngineKind::mc, 3000);
  auto red = im_vacuous(m, scalar_data(0.3), cfg);
  auto naive = im_vacuous_naive(m, scalar_data(0.3), cfg);
  for (Index i = 0; i < red.size(); ++i) CHECK(std::abs(naive(i) - red(i)) <= 4.0 * std::sqrt(0.25 / 3000.0) * 1.5);
}

TEST_CASE("vacuous prior through the partial engine equals the naive engine") {
  Binomial m(10);
  VacuousPrior v;
  auto cfg = make_cfg("0:1:21", EngineKind::exact);
  auto a = im_partial(m, v, scalar_data(4), cfg);
  auto b = im_vacuous_naive(m, scalar_data(4), cfg);
  for (Index i = 0; i < a.size(); ++i) CHECK(a(i) == doctest::Approx(b(i)).epsilon(1e-12));
}

TEST_CASE("point-mass prior reduces to one calibration at its atom") {
  Binomial m(12);
  const double t0 = 0.4;
  PointMassPrior pm(scalar_param(t0));
  auto cfg = make_cfg("0:1:21", EngineKind::exact);
  Data y = scalar_data(7);
  auto c = im_partial(m, pm, y, cfg);
  std::vector<Param> search;
  for (Index i = 0; i < cfg.grid.size(); ++i) search.push_back(cfg.grid.point(i));
  BaselineOrder eta(m, pm, search);
  for (Index i = 0; i < c.size(); ++i) {
    Param th = cfg.grid.point(i);
    double t = eta.log_eta(y, th);
    double oracle = 0.0;
    for (const auto& yy : m.support())
      if (eta.log_eta(yy, scalar_param(t0)) <= t + tie_tol) oracle += std::exp(m.logdens(scalar_param(t0), yy));
    CHECK(c(i) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(c(i) == (std::abs(th(0) - t0) < 1e-9 ? 1.0 : 0.0));
  }
}

TEST_CASE("Markov prior pulls the peak toward zero, less than the matched normal prior") {
  NormalKnownVar m(2.0, 15);
  Data y = scalar_data(1.5);
  MarkovPrior mk(1.0);
  auto cfg = make_cfg("-2:4:241", EngineKind::mc, 1000, 5);
  auto partial = im_partial(m, mk, y, cfg);
  REQUIRE(partial.meta().peak_at);
  const double partial_peak = (*partial.meta().peak_at)(0);
  const double tau = std::sqrt(std::numbers::pi / 2.0);
  NormalPrior np(0.0, tau);
  auto complete = im_complete(m, np, y, make_cfg("-2:4:241", EngineKind::mc, 20000, 6));
  REQUIRE(complete.meta().peak_at);
  const double complete_peak = (*complete.meta().peak_at)(0);
  CHECK(partial_peak < 1.5);
  CHECK(complete_peak < partial_peak);
  // closed form of the precise posterior mean
  const double pl = 15.0 / 4.0, pp = 1.0 / (tau * tau);
  CHECK(complete_peak == doctest::Approx(pl * 1.5 / (pl + pp)).epsilon(1e-6));
  CHECK(partial.sup() >= 1.0 - partial.sup_tol());
}

TEST_CASE("complete prior IM matches the Beta(10,10) tail integral") {
  Binomial m(16);
  BetaPrior b(2, 2);
  auto cfg = make_cfg("0:1:101", EngineKind::mc, 20000, 9);
  auto c = im_complete(m, b, scalar_data(8), cfg);
  boost::math::beta_distribution<> post(10, 10);
  const auto& se = *c.meta().std_err;
  for (Index i = 0; i < c.size(); ++i) {
    double t = c.domain().point(i)(0);
    double exact = 2.0 * boost::math::cdf(post, std::min(t, 1.0 - t));
    CHECK(std::abs(c(i) - exact) <= 3.0 * std::max(se(i), 0.5 / 20000.0) + 1e-4);
  }
}

TEST_CASE("complete prior peak sits between prior center and MLE") {
  Binomial m(16);
  BetaPrior b(2, 2);
  auto c = im_complete(m, b, scalar_data(12), make_cfg("0:1:201", EngineKind::mc, 10000, 3));
  REQUIRE(c.meta().peak_at);
  double peak = (*c.meta().peak_at)(0);
  CHECK(peak > 0.5);
  CHECK(peak < 0.75);
  CHECK(peak == doctest::Approx(13.0 / 18.0).epsilon(1e-6));
  CHECK(c.sup() == doctest::Approx(1.0));
}

TEST_CASE("importance sampling on the gamma model") {
  GammaIID m(25);
  Param truth(2);
  truth << 7.0, 3.0;
  Rng rng = substream(2024, 0, 0);
  Data y = m.sample(truth, rng);
  IMConfig cfg;
  cfg.grid = ParamDomain::parse("2:16:29,1:8:29", {"shape", "scale"});
  cfg.engine = EngineKind::importance;
  cfg.mc_size = 2000;
  cfg.seed = 17;
  auto c = im_vacuous(m, y, cfg);
  REQUIRE(c.meta().peak_at);
  CHECK(c.sup() == 1.0);
  auto r = region(c, 0.1);
  // nearest grid cell to the truth
  auto cell = cfg.grid.locate(truth);
  REQUIRE(cell);
  CHECK(r.members(*cell));

  SUBCASE("agreement with fresh per-point Monte Carlo") {
    RelativeLikelihoodOrder eta(m);
    Rng pick = substream(99, 0, 0);
    const auto& se = *c.meta().std_err;
    int checked = 0;
    while (checked < 5) {
      auto i = static_cast<Index>(uniform01(pick) * static_cast<double>(c.size()));
      if (c(i) < 0.05) continue;
      Param th = cfg.grid.point(i);
      Rng r2 = substream(100, static_cast<std::uint64_t>(i), 0);
      auto d = calibrate_mc(m, eta, th, 4000, r2);
      double mc = d.cdf(eta.log_eta(y, th));
      double comb = std::sqrt(se(i) * se(i) + mc * (1.0 - mc) / 4000.0);
      CHECK(std::abs(mc - c(i)) <= 3.0 * comb + 1e-3);
      ++checked;
    }
  }
}

TEST_CASE("Choquet step rule against a hand sum") {
  std::vector<double> q = {1.0, 0.6, 0.2};
  std::vector<double> prob = {0.1, 0.5, 0.9};
  // levels (0.6,1] -> 0.1, (0.2,0.6] -> 0.5, (0,0.2] -> 0.9
  CHECK(choquet_step(q, prob) == doctest::Approx(0.4 * 0.1 + 0.4 * 0.5 + 0.2 * 0.9));
}

TEST_CASE("empty cuts are reported") {
  Binomial m(8);
  PointMassPrior pm(scalar_param(0.33));
  auto cfg = make_cfg("0:1:11", EngineKind::exact);
  CHECK_THROWS_AS(im_partial(m, pm, scalar_data(3), cfg), EmptyCut);
}

TEST_CASE("engine validates its settings") {
  Binomial m(8);
  auto cfg = make_cfg("0:1:11", EngineKind::mc, 50);
  CHECK_THROWS_AS(im_vacuous(m, scalar_data(3), cfg), InvalidArgument);
  cfg.mc_size = 1000;
  cfg.alpha_levels = 5;
  CHECK_THROWS_AS(im_vacuous(m, scalar_data(3), cfg), InvalidArgument);
  CHECK_THROWS_AS(im_vacuous(Binomial(8), scalar_data(3), make_cfg("0:1:11", EngineKind::pivot)), NotSupported);
}

TEST_CASE("odds ratio trial 1: the conditional MLE sits on the plateau of the contour") {
  OddsRatioConditional m(43, 39, 3);
  Data v = scalar_data(2);
  auto c = im_vacuous(m, v, make_cfg("-4:6:1001", EngineKind::exact));
  double hat = m.mle(v)(0);
  auto top = c.argmax();
  double lo = c.domain().point(top.front())(0), hi = c.domain().point(top.back())(0);
  CHECK(c.grid_sup() == 1.0);
  CHECK(hat >= lo - 0.01);
  CHECK(hat <= hi + 0.01);
}
