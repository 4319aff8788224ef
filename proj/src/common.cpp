#include "crn/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

namespace crn {

int thread_count() {
  if (const char* env = std::getenv("CRN_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double log_sum_exp(std::span<const double> log_values) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : log_values)
    if (v > mx) mx = v;
  if (!std::isfinite(mx)) return mx;  // all -inf (or an inf/nan poisoned input)
  std::vector<double> expv(log_values.size());
  for (size_t i = 0; i < log_values.size(); ++i) {
    double v = log_values[i];
    expv[i] = std::isfinite(v) ? std::exp(v - mx) : 0.0;
  }
  return mx + std::log(pairwise_sum(expv));
}

std::string format_state(std::span<const std::int64_t> x) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < x.size(); ++i) {
    if (i) os << ',';
    os << x[i];
  }
  os << ')';
  return os.str();
}

}  // namespace crn
