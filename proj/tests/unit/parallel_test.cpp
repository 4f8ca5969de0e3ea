#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "copula_exo/parallel.hpp"

namespace copula_exo {
namespace {

TEST(ParallelFor, RunsEveryIterationOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  parallel_for(0, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, LowestFailingIndexWins) {
  std::atomic<int> ran{0};
  try {
    parallel_for(200, [&](std::size_t i) {
      ++ran;
      if (i == 150 || i == 37 || i == 90) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "37");
  }
  EXPECT_GT(ran.load(), 37);
}

TEST(ParallelFor, ThreadCountFromEnvironment) {
  const char* old = std::getenv("COPULA_EXO_THREADS");
  const std::string saved = old ? old : "";
  setenv("COPULA_EXO_THREADS", "3", 1);
  EXPECT_EQ(configured_threads(), 3u);
  setenv("COPULA_EXO_THREADS", "0", 1);
  EXPECT_GE(configured_threads(), 1u);
  setenv("COPULA_EXO_THREADS", "1", 1);
  std::vector<std::size_t> order;
  parallel_for(5, [&](std::size_t i) { order.push_back(i); });
  EXPECT_EQ(order, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  if (old) {
    setenv("COPULA_EXO_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("COPULA_EXO_THREADS");
  }
}

}  // namespace
}  // namespace copula_exo
