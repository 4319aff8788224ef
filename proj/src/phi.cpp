#include "crn/phi.hpp"

#include <cmath>
#include <mutex>
#include <string>
#include <vector>

namespace crn {

struct PhiFunction::Impl {
  ThetaFunction theta;
  std::int64_t step;
  double c1;          // value of phi(1) when step >= 2
  bool strict;        // reject nonpositive/non-finite values (free-constant mode)

  mutable std::mutex mu;
  mutable std::vector<double> vals;

  explicit Impl(ThetaFunction t, std::int64_t s, double c, bool strict_mode)
      : theta(std::move(t)), step(s), c1(c), strict(strict_mode) {}

  void extend(std::int64_t z_max) const {
    std::lock_guard<std::mutex> lock(mu);
    if (vals.empty()) vals.push_back(0.0);  // phi(0) = 0
    while (static_cast<std::int64_t>(vals.size()) <= z_max) {
      std::int64_t z = static_cast<std::int64_t>(vals.size());
      double v;
      if (z < step) {
        v = (z == 1) ? c1 : 1.0;
      } else {
        // denominator rebuilt from memoized values each time, not carried as a
        // running product, so rounding does not accumulate across z
        double denom = 1.0;
        for (std::int64_t l = 1; l < step; ++l) denom *= vals[static_cast<size_t>(z - l)];
        double num = theta(z);
        if (denom == 0.0)
          throw NumericalError("phi recursion divided by zero at z=" + std::to_string(z) +
                               "; theta violates its positivity contract");
        v = num / denom;
        if (strict && (!(v > 0.0) || !std::isfinite(v)))
          throw NumericalError("phi(" + std::to_string(z) + ") = " + std::to_string(v) +
                               " is not a positive finite value");
      }
      vals.push_back(v);
    }
  }

  double value(std::int64_t z) const {
    if (z < 0) return 0.0;
    {
      std::lock_guard<std::mutex> lock(mu);
      if (static_cast<size_t>(z) < vals.size()) return vals[static_cast<size_t>(z)];
    }
    extend(z);
    std::lock_guard<std::mutex> lock(mu);
    return vals[static_cast<size_t>(z)];
  }
};

double PhiFunction::operator()(std::int64_t z) const { return impl_->value(z); }
void PhiFunction::materialize(std::int64_t z_max) const { impl_->extend(z_max); }
std::int64_t PhiFunction::step() const { return impl_->step; }
double PhiFunction::free_constant() const { return impl_->c1; }
const ThetaFunction& PhiFunction::theta() const { return impl_->theta; }

PhiFunction build_phi(const ThetaFunction& theta) {
  return PhiFunction(std::make_shared<PhiFunction::Impl>(theta, theta.alpha(), 1.0, false));
}

PhiFunction factor_theta_over_step(const ThetaFunction& theta, std::int64_t m, double c) {
  if (m < 2) throw ValidationError("factor step m must be >= 2");
  if (!(c > 0.0) || !std::isfinite(c))
    throw ValidationError("free constant C must be positive and finite");
  return PhiFunction(std::make_shared<PhiFunction::Impl>(theta, m, c, true));
}

ThetaFunction theta_from_factorization(const PhiFunction& phi) {
  std::string desc = "factor(step=" + std::to_string(phi.step()) + ")";
  ThetaFunction t = ThetaFunction::from_callable(
      1, [phi](std::int64_t z) { return phi(z); }, desc);
  return with_factor_metadata(std::move(t), phi.theta().expression_text(), phi.step(),
                              phi.free_constant());
}

}  // namespace crn
