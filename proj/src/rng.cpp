#include "pim/rng.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pim {

namespace {
std::atomic<unsigned> g_threads{0};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng substream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  std::uint64_t a = splitmix64(seed);
  std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  std::uint64_t c = splitmix64(b ^ splitmix64(salt + 0x85157af5ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return Rng(seq);
}

void set_threads(unsigned n) { g_threads = n; }

unsigned threads() {
  unsigned n = g_threads.load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

namespace {
thread_local bool nested = false;

struct NestedScope {
  bool prev;
  NestedScope() : prev(nested) { nested = true; }
  ~NestedScope() { nested = prev; }
};
}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  // inner loops run on the calling worker
  const std::size_t workers = nested ? 1 : std::min<std::size_t>(threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr err;
  std::size_t err_index = n;
  auto work = [&] {
    NestedScope scope;
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        // keep the lowest failing index so the reported error is thread-count independent
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double std_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

double gamma_draw(double shape, double scale, Rng& rng) {
  return std::gamma_distribution<double>(shape, scale)(rng);
}

double beta_draw(double a, double b, Rng& rng) {
  double x = gamma_draw(a, 1.0, rng);
  double y = gamma_draw(b, 1.0, rng);
  return x / (x + y);
}

int binomial_draw(int n, double p, Rng& rng) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<int>(n, p)(rng);
}

}  // namespace pim
