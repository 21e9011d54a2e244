#include "pim/domain.hpp"

#include <cmath>

namespace pim {

std::optional<Index> IntervalAxis::nearest(double x) const {
  const double h = step();
  if (!(x >= lower - 0.5 * h && x <= upper + 0.5 * h)) return std::nullopt;
  auto i = static_cast<Index>(std::floor((x - lower) / h + 0.5));
  if (i < 0) i = 0;
  if (i >= points) i = points - 1;
  return i;
}

ParamDomain::ParamDomain(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw InvalidArgument("domain needs at least one axis");
  size_ = 1;
  for (const auto& a : axes_) {
    if (const auto* iv = std::get_if<IntervalAxis>(&a)) {
      if (!(iv->lower < iv->upper)) throw InvalidArgument("axis '" + iv->name + "': lower must be below upper");
      if (iv->points < 2) throw InvalidArgument("axis '" + iv->name + "': need at least 2 points");
      size_ *= iv->points;
    } else {
      const auto& lb = std::get<LabelAxis>(a);
      if (lb.labels.empty()) throw InvalidArgument("axis '" + lb.name + "': empty label set");
      size_ *= static_cast<Index>(lb.labels.size());
    }
  }
}

ParamDomain ParamDomain::interval(std::string name, double lower, double upper, Index points) {
  return ParamDomain({IntervalAxis{std::move(name), lower, upper, points}});
}

ParamDomain ParamDomain::labels(std::string name, std::vector<std::string> labels) {
  return ParamDomain({LabelAxis{std::move(name), std::move(labels)}});
}

namespace {

double parse_number(std::string_view s) {
  std::string buf(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("bad number '" + buf + "' in grid");
  }
  if (used != buf.size()) throw InvalidArgument("bad number '" + buf + "' in grid");
  return v;
}

}  // namespace

ParamDomain ParamDomain::parse(std::string_view spec, const std::vector<std::string>& names) {
  std::vector<Axis> axes;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    auto part = spec.substr(start, end - start);
    auto c1 = part.find(':');
    auto c2 = c1 == std::string_view::npos ? c1 : part.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw InvalidArgument("grid axis '" + std::string(part) + "' is not lo:hi:n");
    double lo = parse_number(part.substr(0, c1));
    double hi = parse_number(part.substr(c1 + 1, c2 - c1 - 1));
    double n = parse_number(part.substr(c2 + 1));
    if (n != std::floor(n)) throw InvalidArgument("grid point count must be an integer");
    std::size_t k = axes.size();
    std::string nm = k < names.size() ? names[k] : "theta" + std::to_string(k + 1);
    axes.emplace_back(IntervalAxis{nm, lo, hi, static_cast<Index>(n)});
    start = end + 1;
  }
  return ParamDomain(std::move(axes));
}

Index ParamDomain::extent(Index d) const {
  const auto& a = axes_.at(static_cast<std::size_t>(d));
  if (const auto* iv = std::get_if<IntervalAxis>(&a)) return iv->points;
  return static_cast<Index>(std::get<LabelAxis>(a).labels.size());
}

const std::string& ParamDomain::name(Index d) const {
  const auto& a = axes_.at(static_cast<std::size_t>(d));
  if (const auto* iv = std::get_if<IntervalAxis>(&a)) return iv->name;
  return std::get<LabelAxis>(a).name;
}

bool ParamDomain::is_interval(Index d) const {
  return std::holds_alternative<IntervalAxis>(axes_.at(static_cast<std::size_t>(d)));
}

const IntervalAxis& ParamDomain::interval_axis(Index d) const {
  return std::get<IntervalAxis>(axes_.at(static_cast<std::size_t>(d)));
}

const LabelAxis& ParamDomain::label_axis(Index d) const {
  return std::get<LabelAxis>(axes_.at(static_cast<std::size_t>(d)));
}

std::vector<Index> ParamDomain::unravel(Index flat) const {
  std::vector<Index> idx(axes_.size());
  for (Index d = dims() - 1; d >= 0; --d) {
    Index e = extent(d);
    idx[static_cast<std::size_t>(d)] = flat % e;
    flat /= e;
  }
  return idx;
}

Index ParamDomain::ravel(const std::vector<Index>& idx) const {
  Index flat = 0;
  for (Index d = 0; d < dims(); ++d) flat = flat * extent(d) + idx[static_cast<std::size_t>(d)];
  return flat;
}

Param ParamDomain::point(Index flat) const {
  auto idx = unravel(flat);
  Param p(dims());
  for (Index d = 0; d < dims(); ++d) {
    auto i = idx[static_cast<std::size_t>(d)];
    p(d) = is_interval(d) ? interval_axis(d).at(i) : static_cast<double>(i);
  }
  return p;
}

std::optional<Index> ParamDomain::locate(const Param& x) const {
  if (x.size() != dims()) return std::nullopt;
  std::vector<Index> idx(axes_.size());
  for (Index d = 0; d < dims(); ++d) {
    if (is_interval(d)) {
      auto i = interval_axis(d).nearest(x(d));
      if (!i) return std::nullopt;
      idx[static_cast<std::size_t>(d)] = *i;
    } else {
      double r = std::round(x(d));
      if (std::abs(r - x(d)) > 1e-9 || r < 0 || r >= static_cast<double>(extent(d))) return std::nullopt;
      idx[static_cast<std::size_t>(d)] = static_cast<Index>(r);
    }
  }
  return ravel(idx);
}

bool ParamDomain::on_boundary(Index flat) const {
  auto idx = unravel(flat);
  for (Index d = 0; d < dims(); ++d) {
    if (!is_interval(d)) continue;
    auto i = idx[static_cast<std::size_t>(d)];
    if (i == 0 || i + 1 == extent(d)) return true;
  }
  return false;
}

}  // namespace pim
