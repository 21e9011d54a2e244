#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pim {

using Index = Eigen::Index;

template <class Scalar>
using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using ArrT = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using Vec = VecT<double>;
using Arr = ArrT<double>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

// parameter points and observed data are both plain dense vectors
using Param = Vec;
using Data = Vec;

// absolute slack for ties in log eta
inline constexpr double tie_tol = 1e-10;
inline constexpr double analytic_sup_tol = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyAssertion : public Error {
 public:
  using Error::Error;
};

class NotNormalized : public Error {
 public:
  using Error::Error;
};

class UncoveredTarget : public Error {
 public:
  using Error::Error;
};

class UnboundedLikelihood : public Error {
 public:
  using Error::Error;
};

class EmptyFiber : public Error {
 public:
  using Error::Error;
};

class EmptyCut : public Error {
 public:
  using Error::Error;
};

class DegeneratePosterior : public Error {
 public:
  using Error::Error;
};

class IndependenceRequired : public Error {
 public:
  using Error::Error;
};

class NotSupported : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

inline Param scalar_param(double x) { return Param::Constant(1, x); }
inline Data scalar_data(double x) { return Data::Constant(1, x); }

}  // namespace pim
