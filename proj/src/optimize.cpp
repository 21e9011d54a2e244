#include "pim/optimize.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace pim {

Optimum maximize_1d(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a > b) std::swap(a, b);
  auto neg = [&](double x) {
    double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : -v;
  };
  int bits = std::clamp(static_cast<int>(-std::log2(std::max(tol, 1e-15))), 10, 52);
  std::uintmax_t iters = 500;
  auto [x, fx] = boost::math::tools::brent_find_minima(neg, a, b, bits, iters);
  Optimum o{Vec::Constant(1, x), -fx};
  for (double e : {a, b}) {
    double v = f(e);
    if (v > o.value) o = {Vec::Constant(1, e), v};
  }
  return o;
}

Optimum scan_maximize_1d(const std::function<double(double)>& f, double a, double b, int n, double tol) {
  n = std::max(n, 3);
  double h = (b - a) / (n - 1);
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double v = f(a + i * h);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  double lo = a + std::max(best - 1, 0) * h;
  double hi = a + std::min(best + 1, n - 1) * h;
  Optimum o = maximize_1d(f, lo, hi, tol);
  if (best_v > o.value) o = {Vec::Constant(1, a + best * h), best_v};
  return o;
}

Optimum nelder_mead_max(const std::function<double(const Vec&)>& f, const Vec& start, const Vec& step,
                        double tol_x, double tol_f, int max_iter) {
  const Index d = start.size();
  std::vector<Vec> s(static_cast<std::size_t>(d + 1), start);
  std::vector<double> v(static_cast<std::size_t>(d + 1));
  auto val = [&](const Vec& x) {
    double r = f(x);
    return std::isnan(r) ? -std::numeric_limits<double>::infinity() : r;
  };
  for (Index k = 0; k < d; ++k) s[static_cast<std::size_t>(k + 1)](k) += step(k);
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = val(s[i]);
  std::vector<std::size_t> ord(s.size());

  for (int it = 0; it < max_iter; ++it) {
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    const std::size_t best = ord.front(), worst = ord.back(), second = ord[ord.size() - 2];
    double spread = 0.0;
    for (const auto& x : s) spread = std::max(spread, (x - s[best]).cwiseAbs().maxCoeff());
    if (spread < tol_x && std::abs(v[best] - v[worst]) < tol_f) break;

    Vec c = Vec::Zero(d);
    for (auto i : ord)
      if (i != worst) c += s[i];
    c /= static_cast<double>(d);

    Vec xr = c + (c - s[worst]);
    double fr = val(xr);
    if (fr > v[best]) {
      Vec xe = c + 2.0 * (c - s[worst]);
      double fe = val(xe);
      if (fe > fr) {
        s[worst] = xe;
        v[worst] = fe;
      } else {
        s[worst] = xr;
        v[worst] = fr;
      }
    } else if (fr > v[second]) {
      s[worst] = xr;
      v[worst] = fr;
    } else {
      Vec xc = fr > v[worst] ? Vec(c + 0.5 * (xr - c)) : Vec(c + 0.5 * (s[worst] - c));
      double fc = val(xc);
      if (fc > std::max(fr, v[worst])) {
        s[worst] = xc;
        v[worst] = fc;
      } else {
        for (auto i : ord) {
          if (i == best) continue;
          s[i] = s[best] + 0.5 * (s[i] - s[best]);
          v[i] = val(s[i]);
        }
      }
    }
  }
  auto bi = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  return {s[bi], v[bi]};
}

double bracket_root(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw InvalidArgument("root is not bracketed");
  std::uintmax_t iters = 200;
  auto stop = [tol](double l, double r) { return std::abs(r - l) <= tol * std::max(1.0, std::abs(l)); };
  auto [l, r] = boost::math::tools::toms748_solve(f, a, b, fa, fb, stop, iters);
  return 0.5 * (l + r);
}

}  // namespace pim
