#include <doctest.h>

#include "pim/contour.hpp"
#include "pim/contour_io.hpp"
#include "pim/engine.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <sstream>

using namespace pim;

namespace {

Contour three_point() {
  Arr v(3);
  v << 1.0, 0.5, 0.2;
  return Contour(ParamDomain::labels("x", {"1", "2", "3"}), v);
}

Mask mask(std::initializer_list<bool> b) {
  Mask m(static_cast<Index>(b.size()));
  Index i = 0;
  for (bool x : b) m(i++) = x;
  return m;
}

Contour normal_closed(double y, double sigma, int n, const ParamDomain& d) {
  NormalKnownVar m(sigma, n);
  IMConfig cfg;
  cfg.grid = d;
  cfg.engine = EngineKind::pivot;
  return im_vacuous(m, scalar_data(y), cfg);
}

}  // namespace

TEST_CASE("contour rejects values outside [0,1] and unnormalized grids") {
  auto d = ParamDomain::labels("x", {"a", "b"});
  Arr bad(2);
  bad << 1.0, 1.2;
  CHECK_THROWS_AS(Contour(d, bad), InvalidArgument);
  Arr low(2);
  low << 0.7, 0.3;
  CHECK_THROWS_AS(consonify(d, low), NotNormalized);
  CHECK_THROWS_AS(Contour(d, Arr::Ones(3)), InvalidArgument);
}

TEST_CASE("consonify keeps a valid contour unchanged") {
  auto c = three_point();
  auto k = consonify(c.domain(), c.values());
  CHECK((k.values() == c.values()).all());
}

TEST_CASE("consonify of the pointwise min of two contours with a common argmax") {
  auto d = ParamDomain::interval("theta", -3, 3, 121);
  auto a = normal_closed(0.4, 1.0, 4, d);
  auto b = normal_closed(0.4, 2.0, 9, d);
  Arr g = a.values().min(b.values());
  auto c = consonify(d, g);
  CHECK(c.grid_sup() == doctest::Approx(1.0));
}

TEST_CASE("upper and lower probability on the three-point contour") {
  auto c = three_point();
  CHECK(upper_prob(c, mask({false, true, true})) == doctest::Approx(0.5));
  CHECK(lower_prob(c, mask({true, false, false})) == doctest::Approx(0.5));
  CHECK(upper_prob(c, mask({true, true, true})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(upper_prob(c, mask({false, false, false})), EmptyAssertion);
}

TEST_CASE("lower probability of the domain minus a zero point is one") {
  Arr v(3);
  v << 1.0, 0.4, 0.0;
  Contour c(ParamDomain::labels("x", {"1", "2", "3"}), v);
  CHECK(lower_prob(c, mask({true, true, false})) == doctest::Approx(1.0));
}

TEST_CASE("upper probability over a predicate includes the off-grid peak") {
  auto d = ParamDomain::interval("theta", 0, 1, 11);
  Arr v(11);
  for (Index i = 0; i < 11; ++i) v(i) = 1.0 - std::abs(d.point(i)(0) - 0.35) * 2;
  v = v.max(0.0);
  ContourMeta meta;
  meta.peak_at = scalar_param(0.35);
  meta.peak_value = 1.0;
  Contour c(d, v, meta);
  CHECK(c.sup() == 1.0);
  CHECK(upper_prob(c, Predicate([](const Param& p) { return p(0) > 0.31 && p(0) < 0.39; })) == 1.0);
}

TEST_CASE("region is the strict superlevel set") {
  auto c = three_point();
  auto r = region(c, 0.5);
  CHECK(r.count() == 1);
  CHECK(r.members(0));
  auto r0 = region(c, 0.0);
  CHECK(r0.count() == 3);
  CHECK_THROWS_AS(region(c, 1.0), InvalidArgument);
}

TEST_CASE("region of the closed-form normal IM is y +- 1.959964 sigma / sqrt(n)") {
  const double y = 0.7, sigma = 2.0;
  const int n = 15;
  auto d = ParamDomain::interval("theta", -2, 3.5, 1101);
  auto c = normal_closed(y, sigma, n, d);
  auto r = region(c, 0.05);
  REQUIRE(r.intervals.size() == 1);
  const double half = 1.959964 * sigma / std::sqrt(double(n));
  const double step = d.interval_axis(0).step();
  CHECK(std::abs(r.intervals[0].first - (y - half)) <= step);
  CHECK(std::abs(r.intervals[0].second - (y + half)) <= step);
  CHECK_FALSE(r.touches_boundary);
}

TEST_CASE("extend merges atoms by the sup") {
  auto c = three_point();
  auto target = ParamDomain::labels("y", {"a", "b"});
  auto e = extend(c, [](const Param& x) { return scalar_param(x(0) < 1.5 ? 0.0 : 1.0); }, target);
  CHECK(e.contour(0) == doctest::Approx(1.0));
  CHECK(e.contour(1) == doctest::Approx(0.2));
  CHECK(e.uncovered.empty());
}

TEST_CASE("extend with a permutation only reorders values") {
  auto c = three_point();
  auto e = extend(c, [](const Param& x) { return scalar_param(2.0 - x(0)); }, c.domain());
  CHECK(e.contour(0) == doctest::Approx(0.2));
  CHECK(e.contour(1) == doctest::Approx(0.5));
  CHECK(e.contour(2) == doctest::Approx(1.0));
}

TEST_CASE("multilinear evaluation between grid points") {
  auto d = ParamDomain::interval("theta", 0, 1, 3);
  Arr v(3);
  v << 0.0, 1.0, 0.5;
  Contour c(d, v);
  CHECK(c.at(scalar_param(0.25)) == doctest::Approx(0.5));
  CHECK(c.at(scalar_param(0.75)) == doctest::Approx(0.75));
  CHECK(c.at(scalar_param(2.0)) == 0.0);
}

TEST_CASE("CSV round trip keeps values and std_err") {
  auto d = ParamDomain::interval("theta", 0, 1, 5);
  Arr v(5);
  v << 0.1, 0.4, 1.0, 0.3, 0.0;
  ContourMeta meta;
  meta.std_err = Arr::Constant(5, 0.01);
  meta.mc_size = 1000;
  Contour c(d, v, meta);
  std::stringstream ss;
  write_csv(ss, c);
  CHECK(ss.str().rfind("theta,plausibility,std_err\r\n", 0) == 0);
  auto back = read_csv(ss);
  CHECK(back.size() == 5);
  CHECK((back.values() - v).abs().maxCoeff() < 1e-12);
  REQUIRE(back.meta().std_err);
  CHECK((*back.meta().std_err - 0.01).abs().maxCoeff() < 1e-12);
}

TEST_CASE("CSV quotes labels that need it") {
  Arr v(2);
  v << 1.0, 0.25;
  Contour c(ParamDomain::labels("cat", {"a,b", "plain"}), v);
  std::stringstream ss;
  write_csv(ss, c);
  CHECK(ss.str().find("\"a,b\"") != std::string::npos);
}
