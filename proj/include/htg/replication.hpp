// Seedable replication harness. run_replications() executes independent
// replications, each on its own random stream, and returns the results in
// replication order, so the output is identical no matter how many threads
// ran the loop. run_replications_serial() is the reference implementation
// kept for testing and benchmarking against the OpenMP path.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "htg/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace htg {

struct EstimateSummary {
  double mean = 0.0;
  double ci95 = 0.0;  // normal-approximation 95% half-width
  std::size_t count = 0;
};

template <class F>
auto run_replications_serial(std::size_t count, std::uint64_t seed, F&& body)
    -> std::vector<decltype(body(std::size_t{0}, std::declval<Rng&>()))> {
  using T = decltype(body(std::size_t{0}, std::declval<Rng&>()));
  std::vector<T> out(count);
  for (std::size_t rep = 0; rep < count; ++rep) {
    Rng rng = make_stream(seed, rep);
    out[rep] = body(rep, rng);
  }
  return out;
}

// jobs <= 0 means use the OpenMP default thread count.
template <class F>
auto run_replications(std::size_t count, std::uint64_t seed, F&& body, int jobs = 0)
    -> std::vector<decltype(body(std::size_t{0}, std::declval<Rng&>()))> {
  using T = decltype(body(std::size_t{0}, std::declval<Rng&>()));
  std::vector<T> out(count);
#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long rep = 0; rep < static_cast<long long>(count); ++rep) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(rep));
    out[static_cast<std::size_t>(rep)] = body(static_cast<std::size_t>(rep), rng);
  }
#else
  (void)jobs;
  for (std::size_t rep = 0; rep < count; ++rep) {
    Rng rng = make_stream(seed, rep);
    out[rep] = body(rep, rng);
  }
#endif
  return out;
}

inline EstimateSummary summarize(const std::vector<double>& values) {
  if (values.size() < 2)
    throw std::invalid_argument("summarize: need at least 2 replications");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  EstimateSummary s;
  s.mean = mean;
  s.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
  s.count = values.size();
  return s;
}

inline double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty");
  std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  std::nth_element(values.begin(), values.begin() + mid - 1, values.end());
  return 0.5 * (hi + values[mid - 1]);
}

}  // namespace htg
