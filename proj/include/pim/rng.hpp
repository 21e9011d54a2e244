#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace pim {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// independent stream keyed by (seed, index, salt); evaluation order never matters
Rng substream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0);

// worker count used by parallel_for; 0 restores the hardware default
void set_threads(unsigned n);
unsigned threads();

// fn(i) for i in [0, n); callers write results by index
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

double uniform01(Rng& rng);
double std_normal(Rng& rng);
double gamma_draw(double shape, double scale, Rng& rng);
double beta_draw(double a, double b, Rng& rng);
int binomial_draw(int n, double p, Rng& rng);

}  // namespace pim
