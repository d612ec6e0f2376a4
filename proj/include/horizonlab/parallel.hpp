#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace horizonlab {

// Worker count: HORIZONLAB_THREADS if set, else the hardware count.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HORIZONLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  return n;
}

// out[i] = f(in[i]); results land in input order whatever the scheduling.
// The first exception thrown by any task is rethrown.
template <class In, class F>
auto parallel_map(const std::vector<In>& in, F&& f, unsigned threads = worker_count()) {
  using Out = decltype(f(in.front()));
  std::vector<Out> out(in.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(in.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(in.size());
  auto work = [&] {
    for (std::size_t i; (i = next++) < in.size();) {
      try {
        out[i] = f(in[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace horizonlab
