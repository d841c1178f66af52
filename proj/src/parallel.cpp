#include "qdyn/parallel.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace qdyn {

namespace {
std::atomic<std::size_t> g_workers{1};

double log_add(double x, double y) {
  if (x == -std::numeric_limits<double>::infinity()) return y;
  if (y == -std::numeric_limits<double>::infinity()) return x;
  const double hi = std::max(x, y);
  const double lo = std::min(x, y);
  return hi + std::log1p(std::exp(lo - hi));
}

double tree_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return tree_sum(v.first(half)) + tree_sum(v.subspan(half));
}

double tree_lse(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  if (v.size() == 1) return v[0];
  const std::size_t half = v.size() / 2;
  return log_add(tree_lse(v.first(half)), tree_lse(v.subspan(half)));
}
}  // namespace

std::size_t worker_count() { return g_workers.load(); }

void set_worker_count(std::size_t n) { g_workers.store(std::max<std::size_t>(1, n)); }

double pairwise_sum(std::span<const double> values) { return tree_sum(values); }

double pairwise_log_sum_exp(std::span<const double> log_values) { return tree_lse(log_values); }

}  // namespace qdyn
