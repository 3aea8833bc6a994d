#include "maxlab/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace maxlab {

namespace {

std::uint64_t initial_budget() {
  if (const char* env = std::getenv("MAXLAB_BUDGET")) {
    try {
      return std::stoull(env);
    } catch (...) {
    }
  }
  return 20'000'000ULL;
}

unsigned initial_threads() {
  if (const char* env = std::getenv("MAXLAB_THREADS")) {
    try {
      return std::max(1u, static_cast<unsigned>(std::stoul(env)));
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<std::uint64_t> g_budget{initial_budget()};
std::atomic<unsigned> g_threads{initial_threads()};

}  // namespace

std::uint64_t budget() { return g_budget.load(); }
void set_budget(std::uint64_t b) { g_budget.store(b); }

void require_budget(std::uint64_t work, const std::string& what) {
  if (work > budget()) {
    throw BudgetExceeded(what + ": " + std::to_string(work) + " exceeds budget " +
                         std::to_string(budget()));
  }
}

unsigned thread_count() { return g_threads.load(); }
void set_thread_count(unsigned n) { g_threads.store(std::max(1u, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace maxlab
