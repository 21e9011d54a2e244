#include "pim/contour.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pim {

double sup_tolerance(const Arr& values, const ContourMeta& meta) {
  if (meta.mc_size == 0 || values.size() == 0) return analytic_sup_tol;
  const double top = values.maxCoeff();
  double se = 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    if (values(i) != top) continue;
    double s = meta.std_err ? (*meta.std_err)(i)
                            : std::sqrt(top * (1.0 - top) / static_cast<double>(meta.mc_size));
    se = std::max(se, s);
  }
  return std::max(3.0 * se, analytic_sup_tol);
}

Contour::Contour(ParamDomain domain, Arr values, ContourMeta meta)
    : domain_(std::move(domain)), values_(std::move(values)), meta_(std::move(meta)) {
  if (values_.size() != domain_.size()) throw InvalidArgument("contour values do not match the domain size");
  for (Index i = 0; i < values_.size(); ++i) {
    double v = values_(i);
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) {
      std::ostringstream os;
      os << "contour value " << v << " at index " << i << " outside [0,1]";
      throw InvalidArgument(os.str());
    }
    values_(i) = std::clamp(v, 0.0, 1.0);
  }
  if (meta_.std_err && meta_.std_err->size() != values_.size())
    throw InvalidArgument("std_err does not match the domain size");
  meta_.peak_value = std::clamp(meta_.peak_value, 0.0, 1.0);
  if (sup() < 1.0 - sup_tol()) {
    std::ostringstream os;
    os << "contour sup " << sup() << " below 1 - " << sup_tol();
    throw NotNormalized(os.str());
  }
}

double Contour::sup() const {
  double s = grid_sup();
  if (meta_.peak_at) s = std::max(s, meta_.peak_value);
  return s;
}

double Contour::sup_tol() const {
  if (meta_.peak_at && meta_.peak_value >= grid_sup()) return analytic_sup_tol;
  return sup_tolerance(values_, meta_);
}

std::vector<Index> Contour::argmax() const {
  const double top = grid_sup();
  std::vector<Index> out;
  for (Index i = 0; i < values_.size(); ++i)
    if (values_(i) == top) out.push_back(i);
  return out;
}

double Contour::at(const Param& theta) const {
  if (theta.size() != domain_.dims()) throw InvalidArgument("query point has wrong dimension");
  const Index d = domain_.dims();
  std::vector<Index> lo(static_cast<std::size_t>(d));
  std::vector<double> frac(static_cast<std::size_t>(d), 0.0);
  for (Index k = 0; k < d; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (domain_.is_interval(k)) {
      const auto& ax = domain_.interval_axis(k);
      double x = theta(k);
      if (x < ax.lower || x > ax.upper) return 0.0;
      double pos = (x - ax.lower) / ax.step();
      auto i = static_cast<Index>(std::floor(pos));
      if (i >= ax.points - 1) i = ax.points - 2;
      lo[uk] = i;
      frac[uk] = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
    } else {
      double r = std::round(theta(k));
      if (std::abs(r - theta(k)) > 1e-9 || r < 0 || r >= static_cast<double>(domain_.extent(k))) return 0.0;
      lo[uk] = static_cast<Index>(r);
    }
  }
  double acc = 0.0;
  std::vector<Index> idx(static_cast<std::size_t>(d));
  for (unsigned corner = 0; corner < (1u << d); ++corner) {
    double w = 1.0;
    for (Index k = 0; k < d; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      bool up = (corner >> k) & 1u;
      if (!domain_.is_interval(k)) {
        if (up) w = 0.0;
        idx[uk] = lo[uk];
        continue;
      }
      idx[uk] = lo[uk] + (up ? 1 : 0);
      w *= up ? frac[uk] : 1.0 - frac[uk];
    }
    if (w != 0.0) acc += w * values_(domain_.ravel(idx));
  }
  return std::clamp(acc, 0.0, 1.0);
}

Contour consonify(ParamDomain domain, Arr g, ContourMeta meta) {
  return Contour(std::move(domain), std::move(g), std::move(meta));
}

Mask select(const ParamDomain& domain, const Predicate& pred) {
  Mask m(domain.size());
  for (Index i = 0; i < domain.size(); ++i) m(i) = pred(domain.point(i));
  return m;
}

double upper_prob(const Contour& c, const Mask& a) {
  if (a.size() != c.size()) throw InvalidArgument("mask does not match the contour grid");
  if (!a.any()) throw EmptyAssertion("assertion selects no grid point");
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i)
    if (a(i)) s = std::max(s, c(i));
  return s;
}

double upper_prob(const Contour& c, const Predicate& a) {
  Mask m = select(c.domain(), a);
  bool peak_in = c.meta().peak_at && a(*c.meta().peak_at);
  if (!m.any() && !peak_in) throw EmptyAssertion("assertion selects no grid point");
  double s = m.any() ? upper_prob(c, m) : 0.0;
  if (peak_in) s = std::max(s, c.meta().peak_value);
  return s;
}

double lower_prob(const Contour& c, const Mask& a) {
  if (!a.any() || a.all()) throw EmptyAssertion("assertion or its complement selects no grid point");
  Mask comp = !a;
  return 1.0 - upper_prob(c, comp);
}

double lower_prob(const Contour& c, const Predicate& a) {
  Mask m = select(c.domain(), a);
  if (!m.any() || m.all()) throw EmptyAssertion("assertion or its complement selects no grid point");
  return 1.0 - upper_prob(c, Predicate([&a](const Param& p) { return !a(p); }));
}

PlausibilityRegion region(const Contour& c, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("region level must lie in [0,1)");
  PlausibilityRegion r;
  r.alpha = alpha;
  r.members = c.values() > alpha;
  const auto& dom = c.domain();
  for (Index i = 0; i < dom.size(); ++i)
    if (r.members(i) && dom.on_boundary(i)) r.touches_boundary = true;
  if (dom.dims() == 1 && dom.is_interval(0)) {
    const auto& ax = dom.interval_axis(0);
    Index i = 0;
    while (i < ax.points) {
      if (!r.members(i)) {
        ++i;
        continue;
      }
      Index j = i;
      while (j + 1 < ax.points && r.members(j + 1)) ++j;
      r.intervals.emplace_back(ax.at(i), ax.at(j));
      i = j + 1;
    }
  }
  return r;
}

Extension extend(const Contour& c, const ParamMap& phi, const ParamDomain& target) {
  Arr out = Arr::Zero(target.size());
  std::vector<bool> hit(static_cast<std::size_t>(target.size()), false);
  std::optional<Arr> se;
  if (c.meta().std_err) se = Arr::Zero(target.size());
  for (Index i = 0; i < c.size(); ++i) {
    auto cell = target.locate(phi(c.domain().point(i)));
    if (!cell) continue;
    auto k = static_cast<std::size_t>(*cell);
    if (!hit[k] || c(i) > out(*cell)) {
      out(*cell) = c(i);
      if (se) (*se)(*cell) = (*c.meta().std_err)(i);
    }
    hit[k] = true;
  }
  Extension ext{Contour(target, Arr::Ones(target.size())), {}};
  for (Index k = 0; k < target.size(); ++k)
    if (!hit[static_cast<std::size_t>(k)]) ext.uncovered.push_back(k);

  ContourMeta meta = c.meta();
  meta.std_err = se;
  meta.ess.reset();
  meta.peak_at.reset();
  if (c.meta().peak_at) {
    Param p = phi(*c.meta().peak_at);
    if (target.locate(p)) {
      meta.peak_at = p;
      meta.peak_value = c.meta().peak_value;
    }
  }
  if (!ext.uncovered.empty())
    meta.warnings.push_back(std::to_string(ext.uncovered.size()) + " target cells received no source point");
  ext.contour = Contour(target, std::move(out), std::move(meta));
  return ext;
}

}  // namespace pim
