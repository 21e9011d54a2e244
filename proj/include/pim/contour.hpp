#pragma once

#include "pim/core.hpp"
#include "pim/domain.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pim {

struct ContourMeta {
  std::uint64_t seed = 0;
  std::size_t mc_size = 0;  // 0 for analytic or exact contours
  std::string engine = "analytic";
  std::optional<Arr> std_err;
  std::optional<Arr> ess;
  // off-grid evaluation at the mode of the plausibility order
  std::optional<Param> peak_at;
  double peak_value = 0.0;
  std::vector<std::string> warnings;
};

// Grid-evaluated possibility contour. Immutable once built.
class Contour {
 public:
  Contour(ParamDomain domain, Arr values, ContourMeta meta = {});

  const ParamDomain& domain() const { return domain_; }
  const Arr& values() const { return values_; }
  const ContourMeta& meta() const { return meta_; }
  Index size() const { return values_.size(); }
  double operator()(Index i) const { return values_(i); }

  double grid_sup() const { return values_.maxCoeff(); }
  double sup() const;
  double sup_tol() const;
  // every grid point attaining the grid max
  std::vector<Index> argmax() const;
  // multilinear on interval axes, exact on label axes, 0 off the domain
  double at(const Param& theta) const;

 private:
  ParamDomain domain_;
  Arr values_;
  ContourMeta meta_;
};

double sup_tolerance(const Arr& values, const ContourMeta& meta);

Contour consonify(ParamDomain domain, Arr g, ContourMeta meta = {});

using Predicate = std::function<bool(const Param&)>;

Mask select(const ParamDomain& domain, const Predicate& pred);

double upper_prob(const Contour& c, const Mask& a);
double upper_prob(const Contour& c, const Predicate& a);
double lower_prob(const Contour& c, const Mask& a);
double lower_prob(const Contour& c, const Predicate& a);

struct PlausibilityRegion {
  double alpha = 0.0;
  Mask members;
  bool touches_boundary = false;
  // runs of consecutive members, only for 1-D interval domains
  std::vector<std::pair<double, double>> intervals;

  Index count() const { return members.count(); }
  bool empty() const { return count() == 0; }
};

PlausibilityRegion region(const Contour& c, double alpha);

struct Extension {
  Contour contour;
  std::vector<Index> uncovered;
};

using ParamMap = std::function<Param(const Param&)>;

Extension extend(const Contour& c, const ParamMap& phi, const ParamDomain& target);

}  // namespace pim
