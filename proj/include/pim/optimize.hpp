#pragma once

#include "pim/core.hpp"

#include <functional>

namespace pim {

struct Optimum {
  Vec x;
  double value = 0.0;
};

// Brent on [a, b]
Optimum maximize_1d(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

// scan n points on [a, b] then polish around the best one
Optimum scan_maximize_1d(const std::function<double(double)>& f, double a, double b, int n, double tol = 1e-10);

Optimum nelder_mead_max(const std::function<double(const Vec&)>& f, const Vec& start, const Vec& step,
                        double tol_x = 1e-10, double tol_f = 1e-12, int max_iter = 4000);

// root of a monotone f on [a, b], f(a) and f(b) of opposite sign
double bracket_root(const std::function<double(double)>& f, double a, double b, double tol = 1e-13);

}  // namespace pim
