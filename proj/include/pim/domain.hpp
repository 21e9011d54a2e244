#pragma once

#include "pim/core.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pim {

struct IntervalAxis {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  Index points = 2;

  double step() const { return (upper - lower) / static_cast<double>(points - 1); }
  double at(Index i) const { return i + 1 == points ? upper : lower + static_cast<double>(i) * step(); }
  // nearest grid index, nullopt when x falls outside the half-cell padded range
  std::optional<Index> nearest(double x) const;
  bool operator==(const IntervalAxis&) const = default;
};

struct LabelAxis {
  std::string name;
  std::vector<std::string> labels;
  bool operator==(const LabelAxis&) const = default;
};

using Axis = std::variant<IntervalAxis, LabelAxis>;

// Cartesian product of axes, flattened with the last axis varying fastest.
class ParamDomain {
 public:
  ParamDomain() = default;
  explicit ParamDomain(std::vector<Axis> axes);

  static ParamDomain interval(std::string name, double lower, double upper, Index points);
  static ParamDomain labels(std::string name, std::vector<std::string> labels);
  // "lo:hi:n" per axis, axes separated by ','
  static ParamDomain parse(std::string_view spec, const std::vector<std::string>& names);

  Index dims() const { return static_cast<Index>(axes_.size()); }
  Index size() const { return size_; }
  Index extent(Index d) const;
  const std::vector<Axis>& axes() const { return axes_; }
  const std::string& name(Index d) const;
  bool is_interval(Index d) const;
  const IntervalAxis& interval_axis(Index d) const;
  const LabelAxis& label_axis(Index d) const;

  std::vector<Index> unravel(Index flat) const;
  Index ravel(const std::vector<Index>& idx) const;

  // label axes contribute their label position
  Param point(Index flat) const;
  std::optional<Index> locate(const Param& x) const;
  bool on_boundary(Index flat) const;

  bool operator==(const ParamDomain& other) const { return axes_ == other.axes_; }

 private:
  std::vector<Axis> axes_;
  Index size_ = 0;
};

}  // namespace pim
