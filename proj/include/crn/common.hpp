#ifndef CRN_COMMON_HPP
#define CRN_COMMON_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crn {

/// A population state: molecule counts per species.
using State = std::vector<std::int64_t>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, models that break a documented contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Parse failure with a source position (1-based line and column).
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& message, int line, int column)
      : ValidationError(message), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Solver breakdowns, non-convergence, singular systems.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A state outside the support of a measure.
class SupportError : public Error {
 public:
  using Error::Error;
};

/// Worker count: CRN_THREADS if set, else hardware concurrency.
int thread_count();

/// log(sum(exp(v))) with a fixed pairwise reduction order so results do not
/// depend on chunking or thread count. -inf entries are allowed.
double log_sum_exp(std::span<const double> log_values);

/// Pairwise (tree-ordered) sum, deterministic for a given input order.
double pairwise_sum(std::span<const double> values);

std::string format_state(std::span<const std::int64_t> x);

}  // namespace crn

#endif
