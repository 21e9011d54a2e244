#include <doctest.h>

#include "pim/contour.hpp"
#include "pim/engine.hpp"
#include "pim/nonparam.hpp"
#include "pim/predict.hpp"
#include "pim/validity.hpp"

using namespace pim;

namespace {

Contour random_contour(std::size_t k, Rng& rng) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < k; ++i) labels.push_back("a" + std::to_string(i));
  Arr v(static_cast<Index>(k));
  for (Index i = 0; i < v.size(); ++i) v(i) = uniform01(rng) < 0.15 ? 0.0 : uniform01(rng);
  v(static_cast<Index>(uniform01(rng) * double(k))) = 1.0;
  return Contour(ParamDomain::labels("x", labels), v);
}

Mask to_mask(std::uint32_t bits, std::size_t k) {
  Mask m(static_cast<Index>(k));
  for (std::size_t i = 0; i < k; ++i) m(static_cast<Index>(i)) = (bits >> i) & 1u;
  return m;
}

}  // namespace

TEST_CASE("upper probability is monotone, conjugate to the lower, and dichotomous") {
  Rng rng = substream(1001, 0, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t k = 2 + rep % 9;
    auto c = random_contour(k, rng);
    const std::uint32_t full = (1u << k) - 1;
    for (std::uint32_t a = 1; a < full; ++a) {
      Mask ma = to_mask(a, k), mc = to_mask(full & ~a, k);
      double up = upper_prob(c, ma);
      CHECK(lower_prob(c, ma) == doctest::Approx(1.0 - upper_prob(c, mc)));
      CHECK(std::min(lower_prob(c, ma), lower_prob(c, mc)) <= 1e-12);
      // every superset, by adding one atom
      for (std::size_t i = 0; i < k; ++i) {
        std::uint32_t b = a | (1u << i);
        CHECK(up <= upper_prob(c, to_mask(b, k)));
      }
    }
  }
}

TEST_CASE("regions are nested in alpha") {
  Rng rng = substream(1002, 0, 0);
  NormalKnownVar m(1.0, 6);
  IMConfig cfg;
  cfg.grid = ParamDomain::interval("theta", -3, 3, 301);
  cfg.engine = EngineKind::mc;
  cfg.mc_size = 500;
  cfg.seed = 5;
  auto c = im_vacuous(m, scalar_data(0.2), cfg);
  for (int rep = 0; rep < 3; ++rep) {
    auto rc = rep == 0 ? c : random_contour(12, rng);
    PlausibilityRegion prev = region(rc, 0.0);
    for (double a = 0.02; a < 1.0; a += 0.02) {
      auto r = region(rc, a);
      CHECK(((r.members && !prev.members) == false).all());
      prev = r;
    }
  }
}

TEST_CASE("extension by the identity returns the contour, and extension keeps the sup") {
  Rng rng = substream(1003, 0, 0);
  for (int rep = 0; rep < 10; ++rep) {
    auto c = random_contour(3 + rep, rng);
    auto same = extend(c, [](const Param& p) { return p; }, c.domain());
    CHECK((same.contour.values() == c.values()).all());
    auto target = ParamDomain::labels("parity", {"even", "odd"});
    auto e = extend(c, [](const Param& p) { return scalar_param(std::fmod(p(0), 2.0)); }, target);
    CHECK(e.contour.grid_sup() == c.grid_sup());
  }
}

TEST_CASE("plain Monte Carlo contours are normalized and on the 1/M lattice for every model") {
  const std::size_t M = 400;
  auto check = [&](const Model& m, const Data& y, const std::string& grid, const std::vector<std::string>& names) {
    IMConfig cfg;
    cfg.grid = ParamDomain::parse(grid, names);
    cfg.engine = EngineKind::mc;
    cfg.mc_size = M;
    cfg.seed = 77;
    auto c = im_vacuous(m, y, cfg);
    CHECK(c.sup() == 1.0);
    for (Index i = 0; i < c.size(); ++i) CHECK(std::abs(c(i) * M - std::round(c(i) * M)) < 1e-9);
  };
  check(Binomial(20), scalar_data(3), "0:1:21", {"theta"});
  check(NormalKnownVar(1.0, 4), scalar_data(-0.4), "-2:2:21", {"theta"});
  check(AR1Conditional(0.5, 0.8), scalar_data(0.3), "-2:2:21", {"theta"});
  check(GigConditional(10, 5.0), scalar_data(1.3), "0.2:3:15", {"theta"});
  check(OddsRatioConditional(20, 25, 9), scalar_data(6), "-3:3:13", {"theta"});
}

TEST_CASE("empirical likelihood for the mean is unimodal at the sample mean on random samples") {
  Rng rng = substream(1004, 0, 0);
  for (int rep = 0; rep < 20; ++rep) {
    Data y(8 + rep);
    for (Index i = 0; i < y.size(); ++i) y(i) = std::exp(std_normal(rng));
    const double lo = y.minCoeff(), hi = y.maxCoeff(), mu = y.mean();
    CHECK(el_mean_eta(y, mu) == doctest::Approx(1.0).epsilon(1e-10));
    double prev = el_mean_eta(y, lo + 1e-9);
    CHECK(prev < 1e-3);
    for (int s = 1; s <= 50; ++s) {
      double t = lo + (mu - lo) * s / 50.0;
      double v = el_mean_eta(y, t);
      CHECK(v >= prev - 1e-10);
      prev = v;
    }
    for (int s = 1; s <= 50; ++s) {
      double t = mu + (hi - mu) * s / 50.0;
      double v = el_mean_eta(y, t);
      CHECK(v <= prev + 1e-10);
      prev = v;
    }
  }
}

TEST_CASE("prediction options 2 and 3 are strongly valid on the normal model") {
  NormalPred jm(1.0, 5);
  const Param theta = scalar_param(0.4);
  auto gen = [&](bool opt3) {
    return Generator{opt3 ? "opt3" : "opt2", [&jm, theta, opt3](Rng& rng) {
                       Data y = jm.y_model().sample(theta, rng);
                       double z = jm.sample_z(theta, rng);
                       return opt3 ? *jm.opt3_closed(y, z) : *jm.opt2_closed(y, z);
                     }};
  };
  auto r3 = check_strong_validity({gen(true)}, 4000, 31);
  auto r2 = check_strong_validity({gen(false)}, 4000, 32);
  CHECK(r3.pass);
  CHECK(r2.pass);
}

TEST_CASE("prediction option 1 is strongly valid on the normal model") {
  NormalPred jm(1.0, 5);
  const Param theta = scalar_param(-0.2);
  IMConfig cfg;
  cfg.grid = ParamDomain::interval("theta", -4, 4, 161);
  cfg.engine = EngineKind::pivot;
  Generator g{"opt1", [&](Rng& rng) {
                Data y = jm.y_model().sample(theta, rng);
                double z = jm.sample_z(theta, rng);
                // one z only, so the sup is taken directly rather than through a contour
                Eigen::MatrixXd f(cfg.grid.size(), 1);
                Arr pi(cfg.grid.size());
                for (Index i = 0; i < cfg.grid.size(); ++i) {
                  Param t = cfg.grid.point(i);
                  f(i, 0) = *jm.repr_closed(t, z);
                  pi(i) = *jm.normal().closed_contour(y, t);
                }
                double v = 0.0;
                for (Index i = 0; i < f.rows(); ++i) v = std::max(v, combine_fisher(f(i, 0), pi(i)));
                return v;
              }};
  auto r = check_strong_validity({g}, 2000, 33);
  CHECK(r.pass);
}

TEST_CASE("parallel evaluation does not change results") {
  Binomial m(30);
  IMConfig cfg;
  cfg.grid = ParamDomain::interval("theta", 0, 1, 101);
  cfg.engine = EngineKind::mc;
  cfg.mc_size = 1000;
  cfg.seed = 2;
  set_threads(1);
  auto a = im_vacuous(m, scalar_data(11), cfg);
  auto pa = im_partial(m, MarkovPrior(0.2), scalar_data(11), cfg);
  set_threads(6);
  auto b = im_vacuous(m, scalar_data(11), cfg);
  auto pb = im_partial(m, MarkovPrior(0.2), scalar_data(11), cfg);
  set_threads(0);
  CHECK((a.values() == b.values()).all());
  CHECK((pa.values() == pb.values()).all());
}
