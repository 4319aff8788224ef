#include "crn/theta.hpp"

#include <cmath>

namespace crn {

struct ThetaFunction::Impl {
  Kind kind;
  std::int64_t alpha;
  Expression expr;                          // Expression kind
  std::vector<double> table;                // Table kind
  std::function<double(std::int64_t)> fn;   // Factored kind
  std::string source;                       // table path or a description
  std::string raw_expr;                     // Factored: the generating expression
  std::int64_t factor_step = 0;             // Factored metadata
  double factor_c = 1.0;

  double raw_eval(std::int64_t z) const {
    switch (kind) {
      case Kind::FallingFactorial: {
        double p = 1.0;
        for (std::int64_t j = 0; j < alpha; ++j) p *= static_cast<double>(z - j);
        return p;
      }
      case Kind::Expression:
        return expr.eval(static_cast<double>(z));
      case Kind::Table:
        if (static_cast<size_t>(z) >= table.size())
          throw ThetaDomainError("theta table '" + source + "' has no entry for z=" +
                                 std::to_string(z) + " (domain is 0.." +
                                 std::to_string(table.size() - 1) + ")");
        return table[static_cast<size_t>(z)];
      case Kind::Factored:
        return fn(z);
    }
    throw Error("corrupt theta kind");
  }
};

namespace {

std::shared_ptr<const ThetaFunction::Impl> check_zero_half(
    std::shared_ptr<ThetaFunction::Impl> impl) {
  if (impl->alpha < 1) throw ValidationError("theta step alpha must be >= 1");
  for (std::int64_t z = 0; z < impl->alpha; ++z) {
    double v;
    try {
      v = impl->raw_eval(z);
    } catch (const ThetaDomainError&) {
      throw ValidationError("theta table shorter than its step alpha");
    }
    if (!(std::fabs(v) <= 1e-12))
      throw ValidationError("theta(" + std::to_string(z) + ") = " + std::to_string(v) +
                            " but theta must vanish below its step alpha=" +
                            std::to_string(impl->alpha));
  }
  return impl;
}

}  // namespace

ThetaFunction ThetaFunction::falling_factorial(std::int64_t alpha) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::FallingFactorial;
  impl->alpha = alpha;
  impl->source = "falling-factorial";
  return ThetaFunction(check_zero_half(std::move(impl)));
}

ThetaFunction ThetaFunction::from_expression(std::int64_t alpha, const std::string& text) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Expression;
  impl->alpha = alpha;
  impl->expr = Expression::parse(text);
  impl->source = text;
  return ThetaFunction(check_zero_half(std::move(impl)));
}

ThetaFunction ThetaFunction::from_table(std::int64_t alpha, std::vector<double> values,
                                        std::string source) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Table;
  impl->alpha = alpha;
  impl->table = std::move(values);
  impl->source = source.empty() ? "table" : std::move(source);
  return ThetaFunction(check_zero_half(std::move(impl)));
}

ThetaFunction ThetaFunction::from_callable(std::int64_t alpha,
                                           std::function<double(std::int64_t)> fn,
                                           std::string description) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Factored;
  impl->alpha = alpha;
  impl->fn = std::move(fn);
  impl->source = std::move(description);
  return ThetaFunction(check_zero_half(std::move(impl)));
}

ThetaFunction with_factor_metadata(ThetaFunction t, std::string raw_expr, std::int64_t step,
                                   double c) {
  auto impl = std::make_shared<ThetaFunction::Impl>(*t.impl_);
  impl->raw_expr = std::move(raw_expr);
  impl->factor_step = step;
  impl->factor_c = c;
  return ThetaFunction(std::move(impl));
}

std::int64_t ThetaFunction::alpha() const { return impl_->alpha; }
ThetaFunction::Kind ThetaFunction::kind() const { return impl_->kind; }

double ThetaFunction::operator()(std::int64_t z) const {
  if (z < impl_->alpha) return 0.0;
  return impl_->raw_eval(z);
}

bool ThetaFunction::finite_domain() const { return impl_->kind == Kind::Table; }

std::int64_t ThetaFunction::domain_end() const {
  return impl_->kind == Kind::Table ? static_cast<std::int64_t>(impl_->table.size()) : -1;
}

const std::string& ThetaFunction::expression_text() const {
  static const std::string empty;
  if (impl_->kind == Kind::Expression) return impl_->expr.text();
  if (impl_->kind == Kind::Factored) return impl_->raw_expr;
  return empty;
}

const std::vector<double>& ThetaFunction::table() const { return impl_->table; }
const std::string& ThetaFunction::description() const { return impl_->source; }
std::int64_t ThetaFunction::factor_step() const { return impl_->factor_step; }
double ThetaFunction::factor_constant() const { return impl_->factor_c; }

bool ThetaFunction::same_definition(const ThetaFunction& other) const {
  if (impl_ == other.impl_) return true;
  if (kind() != other.kind() || alpha() != other.alpha()) return false;
  switch (kind()) {
    case Kind::FallingFactorial: return true;
    case Kind::Expression: return impl_->expr.text() == other.impl_->expr.text();
    case Kind::Table: return impl_->table == other.impl_->table;
    case Kind::Factored:
      return impl_->raw_expr == other.impl_->raw_expr &&
             impl_->factor_step == other.impl_->factor_step &&
             impl_->factor_c == other.impl_->factor_c;
  }
  return false;
}

}  // namespace crn
