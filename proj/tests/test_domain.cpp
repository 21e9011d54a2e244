#include <doctest.h>

#include "pim/domain.hpp"

using namespace pim;

TEST_CASE("interval axes need lower < upper and two points") {
  CHECK_THROWS_AS(ParamDomain::interval("t", 1, 1, 5), InvalidArgument);
  CHECK_THROWS_AS(ParamDomain::interval("t", 0, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(ParamDomain::labels("t", {}), InvalidArgument);
  CHECK_THROWS_AS(ParamDomain(std::vector<Axis>{}), InvalidArgument);
}

TEST_CASE("grid spec parsing") {
  auto d = ParamDomain::parse("0:1:201", {"theta"});
  CHECK(d.size() == 201);
  CHECK(d.point(200)(0) == 1.0);
  CHECK(d.point(56)(0) == doctest::Approx(0.28));
  auto two = ParamDomain::parse("1:10:10, 0.5:3:6", {"shape", "scale"});
  CHECK(two.dims() == 2);
  CHECK(two.size() == 60);
  CHECK(two.name(1) == "scale");
  CHECK_THROWS_AS(ParamDomain::parse("0:1", {"t"}), InvalidArgument);
  CHECK_THROWS_AS(ParamDomain::parse("0:x:4", {"t"}), InvalidArgument);
  CHECK_THROWS_AS(ParamDomain::parse("0:1:2.5", {"t"}), InvalidArgument);
}

TEST_CASE("last axis varies fastest") {
  auto d = ParamDomain::parse("0:1:3,0:1:2", {"a", "b"});
  auto idx = d.unravel(3);
  CHECK(idx[0] == 1);
  CHECK(idx[1] == 1);
  CHECK(d.ravel({2, 0}) == 4);
  for (Index i = 0; i < d.size(); ++i) CHECK(d.ravel(d.unravel(i)) == i);
}

TEST_CASE("locate snaps to the nearest cell and rejects far points") {
  auto d = ParamDomain::interval("t", 0, 1, 11);
  CHECK(*d.locate(scalar_param(0.33)) == 3);
  CHECK(*d.locate(scalar_param(1.04)) == 10);
  CHECK_FALSE(d.locate(scalar_param(1.2)));
  auto l = ParamDomain::labels("c", {"x", "y"});
  CHECK(*l.locate(scalar_param(1.0)) == 1);
  CHECK_FALSE(l.locate(scalar_param(0.5)));
}

TEST_CASE("boundary flags") {
  auto d = ParamDomain::parse("0:1:3,0:1:3", {"a", "b"});
  CHECK(d.on_boundary(0));
  CHECK_FALSE(d.on_boundary(4));
  CHECK(d.on_boundary(5));
}
