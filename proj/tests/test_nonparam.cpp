#include <doctest.h>

#include "pim/nonparam.hpp"

#include <boost/math/distributions/gamma.hpp>

using namespace pim;

namespace {

Data vec(std::initializer_list<double> v) {
  Data d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return d;
}

Data cavendish() {
  return vec({5.50, 5.61, 5.88, 5.07, 5.26, 5.55, 5.36, 5.29, 5.58, 5.65, 5.57, 5.53, 5.62, 5.29, 5.44,
              5.34, 5.79, 5.10, 5.27, 5.39, 5.42, 5.47, 5.63, 5.34, 5.46, 5.30, 5.75, 5.68, 5.85});
}

IMConfig grid_cfg(const std::string& g, std::uint64_t seed = 1) {
  IMConfig c;
  c.grid = ParamDomain::parse(g, {"theta"});
  c.engine = EngineKind::mc;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("empirical likelihood for the quantile, hand cases") {
  Data y = vec({1.0, 2.0});
  CHECK(el_quantile_eta(y, 0.5, 0.5) == doctest::Approx(0.25));
  CHECK(el_quantile_eta(y, 0.5, 1.5) == doctest::Approx(1.0));
  CHECK(el_quantile_eta(y, 0.5, sample_quantile(y, 0.5)) == doctest::Approx(1.0));
  CHECK(sample_quantile(vec({3, 1, 2, 5}), 0.5) == 2.5);
  CHECK(sample_quantile(vec({3, 1, 2, 5}), 0.7) == doctest::Approx(3.2).epsilon(1e-15));
  CHECK(sample_quantile(vec({4.0}), 0.3) == 4.0);
  // between the 2nd and 3rd order statistics, u = 2 on both sides of the estimate
  Data z = vec({1.0, 2.0, 4.0, 8.0});
  CHECK(el_quantile_eta(z, 0.5, 2.9) == doctest::Approx(el_quantile_eta(z, 0.5, 3.1)).epsilon(1e-15));
  CHECK(el_quantile_eta(z, 0.5, 3.0) == 1.0);
}

TEST_CASE("quantile eta is a step function jumping only at data points") {
  Data y = vec({0.3, 1.1, 1.9, 2.2, 4.0, 5.5, 6.1});
  const double r = 0.4;
  // the single point at the estimate is the only exception
  const double hat = sample_quantile(y, r);
  double prev = el_quantile_eta(y, r, -1.0);
  for (double t = -1.0; t <= 7.0; t += 0.01) {
    double v = el_quantile_eta(y, r, t);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-12);
    if (std::abs(v - prev) > 1e-12) {
      bool near = false;
      for (Index i = 0; i < y.size(); ++i) near = near || (y(i) > t - 0.01 - 1e-9 && y(i) <= t + 1e-9);
      near = near || std::abs(t - hat) < 0.011;
      CHECK(near);
    }
    prev = v;
  }
}

TEST_CASE("empirical likelihood for the mean") {
  CHECK(el_mean_eta(vec({0.0, 1.0}), 0.25) == doctest::Approx(0.75).epsilon(1e-10));
  Data y = vec({1.2, 0.4, 2.8, 1.7, 0.9});
  CHECK(el_mean_eta(y, y.mean()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(el_mean_eta(y, 0.4) == 0.0);
  CHECK(el_mean_eta(y, 3.0) == 0.0);
  // unimodal, peak at the mean
  double prev = 0.0;
  for (double t = 0.41; t < y.mean(); t += 0.01) {
    double v = el_mean_eta(y, t);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  prev = 1.0;
  for (double t = y.mean(); t < 2.8; t += 0.01) {
    double v = el_mean_eta(y, t);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("Cavendish: EL peaks at the sample mean 5.48") {
  Data y = cavendish();
  CHECK(y.mean() == doctest::Approx(5.48).epsilon(1e-3));
  double best = 0.0, at = 0.0;
  for (double t = 5.0; t <= 5.9; t += 0.01) {
    double v = el_mean_eta(y, t);
    if (v > best) best = v, at = t;
  }
  CHECK(at == doctest::Approx(5.48).epsilon(1e-9));
}

TEST_CASE("bootstrap contour lives on the B lattice and is 1 at the estimate") {
  Data y = cavendish();
  const std::size_t B = 500;
  auto c = im_bootstrap(el_mean_eta, y, [](const Data& d) { return d.mean(); }, B, grid_cfg("5.2:5.8:61", 4));
  for (Index i = 0; i < c.size(); ++i) {
    double k = c(i) * B;
    CHECK(std::abs(k - std::round(k)) < 1e-9);
  }
  CHECK(bootstrap_plausibility(el_mean_eta, y, [](const Data& d) { return d.mean(); }, B, y.mean(), 4) == 1.0);
  auto top = c.argmax();
  CHECK(c.domain().point(top.front())(0) == doctest::Approx(5.48).epsilon(0.003));
  CHECK_THROWS_AS(im_bootstrap(el_mean_eta, y, [](const Data& d) { return d.mean(); }, 100, grid_cfg("5:6:3")),
                  InvalidArgument);
}

TEST_CASE("bootstrap quantile IM covers the true 0.7 quantile of Gamma(3,1)") {
  boost::math::gamma_distribution<> g(3.0, 1.0);
  const double r = 0.7;
  const double truth = boost::math::quantile(g, r);
  CHECK(truth == doctest::Approx(3.6).epsilon(0.01));
  GammaIID m(25);
  Param psi(2);
  psi << 3.0, 1.0;
  Rng rng = substream(314, 0, 0);
  Data y = m.sample(psi, rng);
  auto eta = [r](const Data& d, double t) { return el_quantile_eta(d, r, t); };
  auto est = [r](const Data& d) { return sample_quantile(d, r); };
  auto c = im_bootstrap(eta, y, est, 2000, grid_cfg("0:10:1001", 6));
  auto reg = region(c, 0.05);
  auto cell = *c.domain().locate(scalar_param(truth));
  CHECK(reg.members(cell));
}

TEST_CASE("split likelihood ratio contour is min(1, eta_split)") {
  NormalMeanSplit f(1.0);
  Rng rng = substream(55, 0, 0);
  Data y(20);
  for (Index i = 0; i < 20; ++i) y(i) = 0.3 + std_normal(rng);
  auto c = im_split_lr(f, y, 0.5, grid_cfg("-2:2:81"));
  for (Index i = 0; i < c.size(); ++i) {
    double t = c.domain().point(i)(0);
    double e = std::exp(split_log_eta(f, y, 0.5, t));
    CHECK(c(i) <= 1.0);
    CHECK(c(i) == doctest::Approx(std::min(1.0, e)).epsilon(1e-12));
  }
  // closed form with chunk means a (first 10) and b (last 10)
  const double a = y.head(10).mean(), b = y.tail(10).mean();
  for (double t : {-0.5, 0.1, 0.7}) {
    double expect = 10.0 * ((a - b) * (a - b) - (a - t) * (a - t)) / 2.0;
    CHECK(split_log_eta(f, y, 0.5, t) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("split regions are wider than the exact normal regions") {
  NormalMeanSplit f(1.0);
  const int n = 20;
  const double exact_width = 2.0 * 1.959964 / std::sqrt(double(n));
  int wider = 0;
  for (int rep = 0; rep < 100; ++rep) {
    Rng rng = substream(900, static_cast<std::uint64_t>(rep), 0);
    Data y(n);
    for (Index i = 0; i < n; ++i) y(i) = std_normal(rng);
    auto c = im_split_lr(f, y, 0.5, grid_cfg("-4:4:801"));
    auto r = region(c, 0.05);
    double width = 0.0;
    for (const auto& iv : r.intervals) width += iv.second - iv.first;
    if (width >= exact_width) ++wider;
  }
  CHECK(wider >= 95);
}

TEST_CASE("gamma mean split family peaks near the first chunk's mean") {
  GammaMeanSplit f;
  GammaIID m(30);
  Param psi(2);
  psi << 4.0, 2.0;
  Rng rng = substream(66, 0, 0);
  Data y = m.sample(psi, rng);
  auto c = im_split_lr(f, y, 0.5, grid_cfg("2:14:241"));
  double a = y.head(15).mean();
  double best = -1e300, at = 0.0;
  for (Index i = 0; i < c.size(); ++i) {
    double t = c.domain().point(i)(0);
    double v = split_log_eta(f, y, 0.5, t);
    if (v > best) best = v, at = t;
  }
  CHECK(std::abs(at - a) <= 0.05 + 1e-9);
  CHECK(c.grid_sup() <= 1.0);
}
