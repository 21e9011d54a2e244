#pragma once

#include "pim/contour.hpp"
#include "pim/engine.hpp"
#include "pim/models.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pim {

// Nuisance parametrization of {psi : g(psi) = theta} for one model.
class Fiber {
 public:
  virtual ~Fiber() = default;
  virtual std::string name() const = 0;
  virtual const Model& model() const = 0;
  virtual double interest(const Param& psi) const = 0;
  virtual double profile_log_eta(const Data& y, double theta) const = 0;
  virtual std::vector<Param> points(double theta) const = 0;
  virtual bool pivot() const { return false; }
  virtual std::optional<double> closed_contour(const Data&, double) const { return std::nullopt; }
};

class NormalMeanFiber : public Fiber {
 public:
  explicit NormalMeanFiber(const NormalUnknownVar& m) : m_(m) {}
  std::string name() const override { return "mean"; }
  const Model& model() const override { return m_; }
  double interest(const Param& psi) const override { return psi(0); }
  double profile_log_eta(const Data& y, double theta) const override;
  std::vector<Param> points(double theta) const override;
  bool pivot() const override { return true; }
  std::optional<double> closed_contour(const Data& y, double theta) const override;
  static double t_statistic(const Data& y, double theta);

 private:
  const NormalUnknownVar& m_;
};

class NormalVarianceFiber : public Fiber {
 public:
  explicit NormalVarianceFiber(const NormalUnknownVar& m) : m_(m) {}
  std::string name() const override { return "variance"; }
  const Model& model() const override { return m_; }
  double interest(const Param& psi) const override { return psi(1); }
  double profile_log_eta(const Data& y, double theta) const override;
  std::vector<Param> points(double theta) const override;
  bool pivot() const override { return true; }
  std::optional<double> closed_contour(const Data& y, double theta) const override;

 private:
  const NormalUnknownVar& m_;
};

// mean = shape * scale, fiber indexed by shape
class GammaMeanFiber : public Fiber {
 public:
  GammaMeanFiber(const GammaIID& m, std::vector<double> shapes);
  std::string name() const override { return "mean"; }
  const Model& model() const override { return m_; }
  double interest(const Param& psi) const override { return psi(0) * psi(1); }
  double profile_log_eta(const Data& y, double theta) const override;
  std::vector<Param> points(double theta) const override;
  const std::vector<double>& shapes() const { return shapes_; }

 private:
  const GammaIID& m_;
  std::vector<double> shapes_;
};

// generic fiber read off a joint grid: points whose interest lands within halfwidth of theta
class GridFiber : public Fiber {
 public:
  GridFiber(const Model& m, std::function<double(const Param&)> g, ParamDomain joint, double halfwidth);
  std::string name() const override { return "grid"; }
  const Model& model() const override { return m_; }
  double interest(const Param& psi) const override { return g_(psi); }
  double profile_log_eta(const Data& y, double theta) const override;
  std::vector<Param> points(double theta) const override;

 private:
  const Model& m_;
  std::function<double(const Param&)> g_;
  ParamDomain joint_;
  double half_;
};

double profile_relative_likelihood(const Fiber& f, const Data& y, double theta);

struct MarginalResult {
  Contour contour;
  // one row per fiber point, one column per interest grid value
  Eigen::MatrixXd curves;
};

MarginalResult im_marginal_curves(const Fiber& f, const Data& y, const IMConfig& cfg);
Contour im_marginal(const Fiber& f, const Data& y, const IMConfig& cfg);

Contour im_conditional(const ConditionalModel& cm, const Data& y, const IMConfig& cfg);
Contour im_conditional(const ConditionalModel& cm, const PossibilisticPrior& p, const Data& y, const IMConfig& cfg);

}  // namespace pim
