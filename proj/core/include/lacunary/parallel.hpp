#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace lacunary {

/// Worker count used by the library. Defaults to hardware concurrency,
/// overridden by LACUNARY_THREADS or set_thread_cap().
unsigned thread_cap();
void set_thread_cap(unsigned n);

/// Runs body(i) for i in [0, count) on up to thread_cap() workers. Each
/// index is processed exactly once; callers write results into slot i so
/// the outcome does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Pairwise (tree) reduction in a fixed order.
template <typename T>
T tree_reduce(std::vector<T> v) {
  if (v.empty()) return T{};
  while (v.size() > 1) {
    std::size_t half = (v.size() + 1) / 2;
    for (std::size_t i = 0; i + half < v.size(); ++i) v[i] += v[i + half];
    v.resize(half);
  }
  return v.front();
}

}  // namespace lacunary
