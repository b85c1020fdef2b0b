#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "hgcf/log.hpp"
#include "hgcf/parallel.hpp"
#include "hgcf/random.hpp"

namespace hgcf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

LogSink& current_sink() {
  static LogSink sink = [](LogLevel level, const std::string& message) {
    std::cerr << (level == LogLevel::Warning ? "warning: " : "") << message << '\n';
  };
  return sink;
}

int initial_threads() {
  if (const char* env = std::getenv("HGCF_NUM_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

int& thread_setting() {
  static int n = initial_threads();
  return n;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view component) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : component) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ splitmix64(h));
}

LogSink set_log_sink(LogSink sink) {
  std::lock_guard lock(log_mutex());
  std::swap(current_sink(), sink);
  return sink;
}

void log_info(const std::string& message) {
  std::lock_guard lock(log_mutex());
  if (current_sink()) current_sink()(LogLevel::Info, message);
}

void log_warning(const std::string& message) {
  std::lock_guard lock(log_mutex());
  if (current_sink()) current_sink()(LogLevel::Warning, message);
}

int num_threads() { return thread_setting(); }

void set_num_threads(int n) { thread_setting() = std::max(1, n); }

void parallel_for_rows(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(num_threads(), std::max<std::size_t>(n, 1)));
  if (workers <= 1 || n < 256) {
    body(0, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin < end) pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(0, std::min(n, chunk));
}

}  // namespace hgcf
