#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "ldsnoma/parallel.hpp"
#include "ldsnoma/random.hpp"

using ldsnoma::pairwise_sum;
using ldsnoma::parallel_for;
using ldsnoma::set_thread_count;

namespace {

struct ThreadCountGuard {
  ~ThreadCountGuard() { set_thread_count(0); }
};

}  // namespace

TEST_CASE("parallel_for visits every index exactly once") {
  ThreadCountGuard guard;
  for (const std::size_t threads : {std::size_t{1}, std::size_t{4}}) {
    set_thread_count(threads);
    std::vector<std::atomic<int>> visits(257);
    parallel_for(3, 257, [&](std::size_t i) { ++visits[i]; });
    CHECK(visits[0] == 0);
    CHECK(visits[2] == 0);
    for (std::size_t i = 3; i < 257; ++i) CHECK(visits[i] == 1);
  }
}

TEST_CASE("parallel_for result matches sequential execution") {
  ThreadCountGuard guard;
  const auto fill = [](std::vector<double>& out) {
    parallel_for(0, out.size(), [&](std::size_t i) {
      ldsnoma::RandomStream rng(11, i);
      out[i] = rng.uniform() + rng.gaussian();
    });
  };
  std::vector<double> sequential(500);
  set_thread_count(1);
  fill(sequential);
  std::vector<double> parallel(500);
  set_thread_count(4);
  fill(parallel);
  CHECK(sequential == parallel);
}

TEST_CASE("parallel_for handles empty ranges and propagates exceptions") {
  ThreadCountGuard guard;
  parallel_for(5, 5, [](std::size_t) { throw std::runtime_error("unreachable"); });

  set_thread_count(4);
  try {
    parallel_for(0, 100, [](std::size_t i) {
      if (i >= 40) throw std::runtime_error("fail at " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    // The lowest failing index must surface, as a sequential run would.
    CHECK(std::string(e.what()) == "fail at 40");
  }
}

TEST_CASE("nested parallel_for stays correct") {
  ThreadCountGuard guard;
  set_thread_count(4);
  std::vector<std::vector<int>> out(20, std::vector<int>(30, 0));
  parallel_for(0, 20, [&](std::size_t i) {
    parallel_for(0, 30, [&](std::size_t j) { out[i][j] = static_cast<int>(i * 30 + j); });
  });
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 30; ++j) CHECK(out[i][j] == static_cast<int>(i * 30 + j));
}

TEST_CASE("pairwise_sum base cases") {
  CHECK(pairwise_sum({}) == 0.0);
  const double one[] = {3.5};
  CHECK(pairwise_sum(one) == 3.5);
  const double two[] = {1.0, 2.0};
  CHECK(pairwise_sum(two) == 3.0);
}

TEST_CASE("pairwise_sum of 50 equal power splits is exactly the budget") {
  std::vector<double> xs(50, 1.0 / 50.0);
  CHECK(pairwise_sum(xs) == 1.0);
}

TEST_CASE("pairwise_sum pools halves exactly") {
  ldsnoma::RandomStream rng(99);
  for (const std::size_t n : {2ul, 10ul, 64ul, 1000ul}) {
    std::vector<double> xs(2 * n);
    for (double& x : xs) x = rng.gaussian() * rng.uniform(0.1, 10.0);
    const std::span<const double> all(xs);
    CHECK(pairwise_sum(all) ==
          pairwise_sum(all.first(n)) + pairwise_sum(all.subspan(n)));
  }
}

TEST_CASE("thread_count override round-trips") {
  ThreadCountGuard guard;
  set_thread_count(3);
  CHECK(ldsnoma::thread_count() == 3);
  set_thread_count(0);
  CHECK(ldsnoma::thread_count() >= 1);
}
