#pragma once

#include "pim/core.hpp"
#include "pim/engine.hpp"
#include "pim/models.hpp"
#include "pim/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pim {

// plausibility the construction assigns to the true value after seeing y
using PointBuilder = std::function<double(const Data& y, const Param& theta)>;

// one simulated draw of pi_Y(truth)
struct Generator {
  std::string label;
  std::function<double(Rng&)> trial;
};

Generator at_param(const Model& m, const Param& theta, PointBuilder b, std::string label = "");
Generator from_sampler(const Model& m, std::function<Param(Rng&)> theta, PointBuilder b, std::string label);

std::vector<double> default_alpha_grid();
double dkw_band(std::size_t n_sim, double delta = 0.01);

struct ValidityReport {
  std::string name;
  std::vector<std::string> generators;
  std::vector<double> alpha_grid;
  std::vector<double> exceedance;
  std::size_t n_sim = 0;
  double dkw_band = 0.0;
  double max_violation = 0.0;
  bool pass = false;

  nlohmann::json to_json() const;
  std::string table() const;
};

ValidityReport check_strong_validity(const std::vector<Generator>& gens, std::size_t n_sim, std::uint64_t seed,
                                     std::vector<double> alpha_grid = default_alpha_grid(), std::string name = "");

struct CoverageReport {
  double alpha = 0.0;
  double noncoverage = 0.0;
  double dkw_band = 0.0;
  std::size_t n_sim = 0;
  bool pass = false;
};

// share of draws whose truth falls outside region(alpha), max over generators
CoverageReport check_coverage(const std::vector<Generator>& gens, double alpha, std::size_t n_sim, std::uint64_t seed);

// ---- outer dominance on a finite space

enum class MeasureKind { additive, maxitive };

template <class T>
struct DominanceReport {
  std::vector<T> contour;
  std::size_t subsets = 0;
  std::size_t failures = 0;
  bool pass = true;
};

// additive: omega_i = sum of h_j over h_j <= h_i; maxitive input is already consonant
template <class T>
std::vector<T> outer_contour(const std::vector<T>& h, MeasureKind kind) {
  if (kind == MeasureKind::maxitive) return h;
  std::vector<T> w(h.size(), T(0));
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j)
      if (!(h[i] < h[j])) w[i] += h[j];
  return w;
}

template <class T>
DominanceReport<T> check_outer_dominance(const std::vector<T>& h, const std::vector<T>& omega, MeasureKind kind,
                                         T tol = T(0)) {
  if (h.size() != omega.size()) throw InvalidArgument("measure and contour sizes differ");
  if (h.empty() || h.size() > 12) throw InvalidArgument("outer dominance check takes 1 to 12 atoms");
  DominanceReport<T> r;
  r.contour = omega;
  const std::size_t n = h.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    T p(0), sup(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      if (kind == MeasureKind::additive) {
        p += h[i];
      } else if (p < h[i]) {
        p = h[i];
      }
      if (sup < omega[i]) sup = omega[i];
    }
    ++r.subsets;
    if (sup + tol < p) ++r.failures;
  }
  r.pass = r.failures == 0;
  return r;
}

template <class T>
DominanceReport<T> check_outer_dominance(const std::vector<T>& h, MeasureKind kind, T tol = T(0)) {
  return check_outer_dominance(h, outer_contour(h, kind), kind, tol);
}

// ---- half-coherence on a finite data space and finite grid

struct HalfCoherenceReport {
  std::size_t subsets = 0;
  std::size_t upper_failures = 0;
  std::size_t lower_failures = 0;
  bool exhaustive = true;
  double worst_gap = 0.0;
  bool pass = false;
};

// contours: one row of grid plausibilities per data value; prior: contour on the same grid
HalfCoherenceReport check_half_coherence(const std::vector<Arr>& contours, const Arr& prior, double tol = 1e-12,
                                         std::uint64_t seed = 0);
// builds every data value's contour with the exact partial-prior engine
HalfCoherenceReport check_half_coherence(const Model& m, const PossibilisticPrior& p, const IMConfig& cfg,
                                         double tol = 1e-12);

// the shipped builders on their catalog instances
std::vector<ValidityReport> validity_suite(std::size_t n_sim, std::uint64_t seed);

}  // namespace pim
