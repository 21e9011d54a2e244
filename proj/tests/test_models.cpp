#include <doctest.h>

#include "pim/models.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/hypergeometric.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/rational.hpp>

#include <map>

using namespace pim;

namespace {

double chisq_sf(double x, double df) { return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x)); }

// Pearson statistic over given bins; returns the upper-tail p-value
double pearson_p(const std::vector<double>& observed, const std::vector<double>& expected_prob, std::size_t n) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double e = expected_prob[i] * static_cast<double>(n);
    stat += (observed[i] - e) * (observed[i] - e) / e;
  }
  return chisq_sf(stat, static_cast<double>(observed.size() - 1));
}

// 1-D continuous model: bins cut at the given edges, probabilities by quadrature of exp(logdens)
double continuous_gof(const Model& m, const Param& theta, const std::vector<double>& edges, std::uint64_t seed) {
  const std::size_t n = 10000;
  Rng rng = substream(seed, 0, 0);
  std::vector<double> obs(edges.size() + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double x = m.sample(theta, rng)(0);
    auto k = std::upper_bound(edges.begin(), edges.end(), x) - edges.begin();
    obs[static_cast<std::size_t>(k)] += 1.0;
  }
  auto dens = [&](double x) { return std::exp(m.logdens(theta, scalar_data(x))); };
  std::vector<double> prob;
  double inner = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    double p = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(dens, edges[k], edges[k + 1]);
    prob.push_back(p);
    inner += p;
  }
  // the two tails share what is left, split by their own quadrature ratio
  double left = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      dens, edges.front() - 50.0 * (edges.back() - edges.front()), edges.front());
  if (m.box().lower(0) >= 0.0) {
    left = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(dens, 0.0, edges.front());
  }
  double right = 1.0 - inner - left;
  prob.insert(prob.begin(), left);
  prob.push_back(right);
  return pearson_p(obs, prob, n);
}

double discrete_gof(const Model& m, const Param& theta, std::uint64_t seed) {
  const std::size_t n = 10000;
  auto sup = m.support();
  std::map<double, double> count;
  Rng rng = substream(seed, 0, 0);
  for (std::size_t i = 0; i < n; ++i) count[m.sample(theta, rng)(0)] += 1.0;
  // pool cells with small expectation into their neighbour
  std::vector<double> obs, prob;
  double po = 0.0, pp = 0.0;
  for (const auto& y : sup) {
    po += count[y(0)];
    pp += std::exp(m.logdens(theta, y));
    if (pp * n >= 10.0) {
      obs.push_back(po);
      prob.push_back(pp);
      po = pp = 0.0;
    }
  }
  if (pp > 0.0) {
    obs.back() += po;
    prob.back() += pp;
  }
  return pearson_p(obs, prob, n);
}

}  // namespace

TEST_CASE("binomial relative likelihood against the closed-form ratio") {
  Binomial m(25);
  Data y = scalar_data(7);
  CHECK(relative_likelihood(m, y, scalar_param(0.28)) == doctest::Approx(1.0).epsilon(1e-12));
  double expect = std::pow(0.5 / 0.28, 7) * std::pow(0.5 / 0.72, 18);
  CHECK(relative_likelihood(m, y, scalar_param(0.5)) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(relative_likelihood(m, scalar_data(0), scalar_param(0.0)) == 1.0);
  CHECK(relative_likelihood(m, scalar_data(25), scalar_param(1.0)) == 1.0);
  CHECK(relative_likelihood(m, scalar_data(25), scalar_param(0.0)) == 0.0);
}

TEST_CASE("binomial mass sums to one") {
  Binomial m(16);
  for (double t : {0.0, 0.13, 0.5, 0.92, 1.0}) {
    double s = 0.0;
    for (const auto& y : m.support()) s += std::exp(m.logdens(scalar_param(t), y));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ar1 conditional peaks at y2 / y1") {
  AR1Conditional m(0.1, 0.1);
  Data y = scalar_data(0.2);
  CHECK(m.mle(y)(0) == doctest::Approx(2.0));
  CHECK(relative_likelihood(m, y, scalar_param(2.0)) == doctest::Approx(1.0));
  CHECK(*m.closed_contour(y, scalar_param(1.0)) == doctest::Approx(chisq_sf(1.0, 1)).epsilon(1e-12));
  CHECK(*m.closed_contour(y, scalar_param(1.0)) == doctest::Approx(0.3173105).epsilon(1e-6));
}

TEST_CASE("normal unknown variance MLE uses the 1/n variance") {
  NormalUnknownVar m(4);
  Data y(4);
  y << 1, 2, 4, 7;
  auto p = m.mle(y);
  CHECK(p(0) == doctest::Approx(3.5));
  CHECK(p(1) == doctest::Approx((6.25 + 2.25 + 0.25 + 12.25) / 4.0));
  Data flat = Data::Constant(4, 2.0);
  CHECK_THROWS_AS(m.mle(flat), UnboundedLikelihood);
}

TEST_CASE("gamma MLE solves the digamma equation and maximizes the likelihood") {
  GammaIID m(25);
  Rng rng = substream(3, 0, 0);
  Param truth(2);
  truth << 7.0, 3.0;
  Data y = m.sample(truth, rng);
  auto p = m.mle(y);
  double c = std::log(y.mean()) - y.array().log().mean();
  CHECK(std::log(p(0)) - boost::math::digamma(p(0)) == doctest::Approx(c).epsilon(1e-10));
  CHECK(p(0) * p(1) == doctest::Approx(y.mean()).epsilon(1e-12));
  const double best = m.loglik(p, y);
  Rng r2 = substream(4, 0, 0);
  for (int i = 0; i < 500; ++i) {
    Param q(2);
    q << p(0) * std::exp(0.5 * std_normal(r2)), p(1) * std::exp(0.5 * std_normal(r2));
    CHECK(m.loglik(q, y) <= best + 1e-8);
  }
}

TEST_CASE("shape_from_log_gap inverts log k - digamma k") {
  for (double k : {0.05, 0.4, 1.0, 3.3, 25.0, 900.0}) {
    double c = std::log(k) - boost::math::digamma(k);
    CHECK(shape_from_log_gap(c) == doctest::Approx(k).epsilon(1e-9));
  }
  CHECK_THROWS_AS(shape_from_log_gap(0.0), UnboundedLikelihood);
}

TEST_CASE("multinomial MLE on the closed simplex") {
  Multinomial m(4, 39);
  Data y(4);
  y << 25, 3, 4, 7;
  auto p = m.mle(y);
  CHECK(p(0) == doctest::Approx(25.0 / 39.0));
  Data z(3);
  z << 5, 0, 2;
  Multinomial m3(3, 7);
  CHECK(m3.mle(z)(1) == 0.0);
  CHECK(relative_likelihood(m3, z, m3.mle(z)) == doctest::Approx(1.0));
  Param off(3);
  off << 0.5, 0.1, 0.4;
  CHECK(relative_likelihood(m3, z, off) < 1.0);
  CHECK_FALSE(m3.valid(Param::Constant(3, 0.5)));
}

TEST_CASE("multinomial mass sums to one over the enumerated support") {
  Multinomial m(3, 5);
  Param p(3);
  p << 0.2, 0.5, 0.3;
  double s = 0.0;
  for (const auto& y : m.support()) s += std::exp(m.logdens(p, y));
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.support().size() == 21);
}

TEST_CASE("odds ratio at zero is the central hypergeometric, exact") {
  const int n1 = 7, n2 = 5, u = 6;
  OddsRatioConditional m(n1, n2, u);
  auto choose = [](int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  boost::rational<long long> total = 0;
  for (int v = m.lowest(); v <= m.highest(); ++v) total += choose(n2, v) * choose(n1, u - v);
  CHECK(bool(total == boost::rational<long long>(choose(n1 + n2, u))));
  boost::math::hypergeometric_distribution<double> h(static_cast<unsigned>(n2), static_cast<unsigned>(u),
                                                      static_cast<unsigned>(n1 + n2));
  for (int v = m.lowest(); v <= m.highest(); ++v) {
    boost::rational<long long> exact(choose(n2, v) * choose(n1, u - v), 1);
    exact /= total;
    double got = std::exp(m.logdens(scalar_param(0.0), scalar_data(v)));
    CHECK(got == doctest::Approx(boost::rational_cast<double>(exact)).epsilon(1e-12));
    CHECK(got == doctest::Approx(boost::math::pdf(h, static_cast<unsigned>(v))).epsilon(1e-12));
  }
}

TEST_CASE("odds ratio MLE diverges at the support boundary") {
  OddsRatioConditional m(43, 39, 3);
  CHECK_THROWS_AS(m.mle(scalar_data(3)), UnboundedLikelihood);
  CHECK(std::isfinite(m.log_sup(scalar_data(3))));
  auto p = m.mle(scalar_data(2));
  CHECK(std::abs(p(0)) < 10.0);
  double best = m.loglik(p, scalar_data(2));
  for (double t = -5; t <= 5; t += 0.01) CHECK(m.loglik(scalar_param(t), scalar_data(2)) <= best + 1e-8);
}

TEST_CASE("gig density integrates to one and is symmetric under inversion") {
  GigConditional m(20, 10.0);
  for (double t : {0.5, 1.0, 2.5}) {
    auto f = [&](double s) { return std::exp(m.logdens(scalar_param(t), scalar_data(s))); };
    double z = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 40.0 * t, 12, 1e-12);
    CHECK(z == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (double t : {0.4, 1.0, 1.7})
    for (double s = 0.2; s < 4.0; s += 0.3) {
      double lhs = m.logdens(scalar_param(t), scalar_data(s));
      double rhs = m.logdens(scalar_param(1.0 / t), scalar_data(1.0 / s)) - 2.0 * std::log(s);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  CHECK(relative_likelihood(m, scalar_data(1.0), scalar_param(1.0)) == doctest::Approx(1.0));
}

TEST_CASE("sample and logdens agree: chi-square goodness of fit at level 0.001") {
  SUBCASE("binomial") { CHECK(discrete_gof(Binomial(16), scalar_param(0.3), 11) > 0.001); }
  SUBCASE("odds ratio") { CHECK(discrete_gof(OddsRatioConditional(12, 9, 8), scalar_param(0.7), 12) > 0.001); }
  SUBCASE("normal known variance") {
    NormalKnownVar m(2.0, 15);
    std::vector<double> edges;
    for (double x = -0.6; x <= 1.6; x += 0.1) edges.push_back(x);
    CHECK(continuous_gof(m, scalar_param(0.5), edges, 13) > 0.001);
  }
  SUBCASE("ar1") {
    AR1Conditional m(0.1, 0.5);
    std::vector<double> edges;
    for (double x = 0.05; x <= 0.5; x += 0.025) edges.push_back(x);
    CHECK(continuous_gof(m, scalar_param(0.55), edges, 14) > 0.001);
  }
  SUBCASE("gig") {
    GigConditional m(20, 10.0);
    std::vector<double> edges;
    for (double x = 0.5; x <= 2.5; x += 0.1) edges.push_back(x);
    CHECK(continuous_gof(m, scalar_param(1.2), edges, 15) > 0.001);
  }
  SUBCASE("multinomial, exact cells") {
    Multinomial m(3, 4);
    Param p(3);
    p << 0.2, 0.5, 0.3;
    auto sup = m.support();
    std::vector<double> obs(sup.size(), 0.0), prob;
    for (const auto& y : sup) prob.push_back(std::exp(m.logdens(p, y)));
    Rng rng = substream(16, 0, 0);
    for (int i = 0; i < 10000; ++i) {
      Data y = m.sample(p, rng);
      for (std::size_t k = 0; k < sup.size(); ++k)
        if ((sup[k] - y).cwiseAbs().maxCoeff() == 0.0) obs[k] += 1.0;
    }
    CHECK(pearson_p(obs, prob, 10000) > 0.001);
  }
}

TEST_CASE("mle maximality on randomized grids") {
  Rng rng = substream(21, 0, 0);
  auto check = [&](const Model& m, const Data& y, auto jitter) {
    Param hat = m.mle(y);
    double best = m.loglik(hat, y);
    for (int i = 0; i < 300; ++i) {
      Param t = jitter(hat);
      if (!m.valid(t)) continue;
      CHECK(m.loglik(t, y) <= best + 1e-8);
    }
  };
  auto scalar_jit = [&](double sd, double lo, double hi) {
    return [&rng, sd, lo, hi](const Param& h) {
      return scalar_param(std::clamp(h(0) + sd * std_normal(rng), lo, hi));
    };
  };
  check(Binomial(25), scalar_data(7), scalar_jit(0.2, 0.0, 1.0));
  check(NormalKnownVar(2.0, 15), scalar_data(1.5), scalar_jit(1.0, -10, 10));
  check(AR1Conditional(0.1, 0.3), scalar_data(0.2), scalar_jit(1.0, -10, 10));
  check(GigConditional(20, 10.0), scalar_data(1.3), scalar_jit(0.5, 0.01, 10));
  NormalUnknownVar nu(5);
  Data y5(5);
  y5 << 0.3, -1.2, 2.2, 0.9, 0.1;
  check(nu, y5, [&](const Param& h) {
    Param t = h;
    t(0) += std_normal(rng);
    t(1) *= std::exp(0.5 * std_normal(rng));
    return t;
  });
  Multinomial mm(3, 10);
  Data c(3);
  c << 5, 3, 2;
  check(mm, c, [&](const Param&) {
    Param t(3);
    t << gamma_draw(1, 1, rng), gamma_draw(1, 1, rng), gamma_draw(1, 1, rng);
    return Param(t / t.sum());
  });
}
