#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace ldsnoma {

/// Number of worker threads parallel_for may use. Defaults to the value of
/// the LDSNOMA_THREADS environment variable if set, otherwise to
/// std::thread::hardware_concurrency().
std::size_t thread_count();

/// Overrides the worker thread count for subsequent parallel_for calls
/// (0 restores the default).
void set_thread_count(std::size_t n);

/// Runs fn(i) for i in [begin, end) over the configured worker threads.
/// Each index is visited exactly once; fn must only write to state owned by
/// its own index, which makes results independent of the thread count.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

/// Sums xs by recursive halving (split at floor(n/2) down to single
/// elements). The result depends only on the values and their order, never
/// on chunking, so pooling two runs of N trials reproduces one run of 2N
/// exactly. This is the only reduction used for Monte-Carlo and power sums.
double pairwise_sum(std::span<const double> xs);

}  // namespace ldsnoma
