#include "crn/equilibrium.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crn/rng.hpp"

namespace crn {

namespace {

constexpr double kDenFloor = 1e-300;

std::vector<double> reaction_fluxes(const ReactionNetwork& net, std::span<const double> kappas,
                                    std::span<const double> x) {
  std::vector<double> flux(static_cast<size_t>(net.num_reactions()));
  for (int k = 0; k < net.num_reactions(); ++k) {
    double r = kappas[static_cast<size_t>(k)];
    const State& src = net.source_counts(k);
    for (int i = 0; i < net.num_species(); ++i)
      for (std::int64_t j = 0; j < src[static_cast<size_t>(i)]; ++j)
        r *= x[static_cast<size_t>(i)];
    flux[static_cast<size_t>(k)] = r;
  }
  return flux;
}

}  // namespace

std::vector<double> mass_action_rhs(const ReactionNetwork& net, std::span<const double> kappas,
                                    std::span<const double> x) {
  std::vector<double> flux = reaction_fluxes(net, kappas, x);
  std::vector<double> rhs(static_cast<size_t>(net.num_species()), 0.0);
  for (int k = 0; k < net.num_reactions(); ++k) {
    const State& xi = net.net_change(k);
    for (int i = 0; i < net.num_species(); ++i)
      rhs[static_cast<size_t>(i)] +=
          flux[static_cast<size_t>(k)] * static_cast<double>(xi[static_cast<size_t>(i)]);
  }
  return rhs;
}

std::vector<double> mass_action_rhs(const ReactionNetwork& net, std::span<const double> x) {
  return mass_action_rhs(net, net.kappas(), x);
}

std::vector<double> complex_balance_residual(const ReactionNetwork& net,
                                             std::span<const double> kappas,
                                             std::span<const double> c) {
  std::vector<double> flux = reaction_fluxes(net, kappas, c);
  size_t nc = net.complexes().size();
  std::vector<double> outflow(nc, 0.0), inflow(nc, 0.0);
  for (int k = 0; k < net.num_reactions(); ++k) {
    auto [src, prod] = net.reaction_complexes(k);
    outflow[static_cast<size_t>(src)] += flux[static_cast<size_t>(k)];
    inflow[static_cast<size_t>(prod)] += flux[static_cast<size_t>(k)];
  }
  std::vector<double> res(nc);
  for (size_t e = 0; e < nc; ++e)
    res[e] = std::fabs(inflow[e] - outflow[e]) / std::max({inflow[e], outflow[e], kDenFloor});
  return res;
}

std::vector<double> complex_balance_residual(const ReactionNetwork& net,
                                             std::span<const double> c) {
  return complex_balance_residual(net, net.kappas(), c);
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct BalanceSystem {
  const ReactionNetwork& net;
  std::vector<double> kappas;
  const std::vector<ClassConstraint>& constraints;
  size_t nc;  // complexes
  size_t m;   // constraints
  int d;

  // residual vector F(u): per-complex net flux, then constraint violations,
  // in concentrations c = exp(u)
  VectorXd residual(const VectorXd& u) const {
    VectorXd c = u.array().exp();
    std::vector<double> flux =
        reaction_fluxes(net, kappas, std::span<const double>(c.data(), static_cast<size_t>(d)));
    VectorXd f = VectorXd::Zero(static_cast<Eigen::Index>(nc + m));
    for (int k = 0; k < net.num_reactions(); ++k) {
      auto [src, prod] = net.reaction_complexes(k);
      f[src] -= flux[static_cast<size_t>(k)];
      f[prod] += flux[static_cast<size_t>(k)];
    }
    for (size_t j = 0; j < m; ++j) {
      double v = -constraints[j].value;
      for (int i = 0; i < d; ++i) v += constraints[j].weights[static_cast<size_t>(i)] * c[i];
      f[static_cast<Eigen::Index>(nc + j)] = v;
    }
    return f;
  }

  MatrixXd jacobian(const VectorXd& u) const {
    VectorXd c = u.array().exp();
    std::vector<double> flux =
        reaction_fluxes(net, kappas, std::span<const double>(c.data(), static_cast<size_t>(d)));
    MatrixXd jac = MatrixXd::Zero(static_cast<Eigen::Index>(nc + m), d);
    for (int k = 0; k < net.num_reactions(); ++k) {
      auto [src, prod] = net.reaction_complexes(k);
      const State& nu = net.source_counts(k);
      for (int i = 0; i < d; ++i) {
        double dk = flux[static_cast<size_t>(k)] * static_cast<double>(nu[static_cast<size_t>(i)]);
        if (dk == 0.0) continue;
        jac(src, i) -= dk;
        jac(prod, i) += dk;
      }
    }
    for (size_t j = 0; j < m; ++j)
      for (int i = 0; i < d; ++i)
        jac(static_cast<Eigen::Index>(nc + j), i) =
            constraints[j].weights[static_cast<size_t>(i)] * c[i];
    return jac;
  }

  // row scales: balance rows by total flux through the complex, constraint
  // rows by the anchor magnitude
  VectorXd row_scales(const VectorXd& u) const {
    VectorXd c = u.array().exp();
    std::vector<double> flux =
        reaction_fluxes(net, kappas, std::span<const double>(c.data(), static_cast<size_t>(d)));
    std::vector<double> total(nc, 0.0);
    for (int k = 0; k < net.num_reactions(); ++k) {
      auto [src, prod] = net.reaction_complexes(k);
      total[static_cast<size_t>(src)] += flux[static_cast<size_t>(k)];
      total[static_cast<size_t>(prod)] += flux[static_cast<size_t>(k)];
    }
    VectorXd s(static_cast<Eigen::Index>(nc + m));
    for (size_t e = 0; e < nc; ++e) s[static_cast<Eigen::Index>(e)] = 1.0 / std::max(total[e], kDenFloor);
    for (size_t j = 0; j < m; ++j)
      s[static_cast<Eigen::Index>(nc + j)] = 1.0 / std::max(std::fabs(constraints[j].value), 1.0);
    return s;
  }

  // true convergence test: relative balance residuals and relative constraint
  // violation both under tol
  double worst_relative(const VectorXd& u) const {
    VectorXd c = u.array().exp();
    std::span<const double> cs(c.data(), static_cast<size_t>(d));
    std::vector<double> res = complex_balance_residual(net, kappas, cs);
    double worst = *std::max_element(res.begin(), res.end());
    for (size_t j = 0; j < m; ++j) {
      double v = -constraints[j].value;
      double scale = std::fabs(constraints[j].value);
      for (int i = 0; i < d; ++i) {
        v += constraints[j].weights[static_cast<size_t>(i)] * c[i];
        scale = std::max(scale, std::fabs(constraints[j].weights[static_cast<size_t>(i)] * c[i]));
      }
      worst = std::max(worst, std::fabs(v) / std::max(scale, 1e-30));
    }
    return worst;
  }
};

}  // namespace

Equilibrium solve_complex_balanced(const ReactionNetwork& net,
                                   const std::vector<ClassConstraint>& constraints,
                                   const EquilibriumOptions& options) {
  const int d = net.num_species();
  for (const ClassConstraint& cc : constraints) {
    if (static_cast<int>(cc.weights.size()) != d)
      throw ValidationError("constraint weight vector has wrong dimension");
    bool nonneg = true, some_pos = false;
    for (double w : cc.weights) {
      if (w < 0) nonneg = false;
      if (w > 0) some_pos = true;
    }
    if (nonneg && some_pos && cc.value <= 0.0)
      throw ValidationError(
          "infeasible class constraint: nonnegative weights with a nonpositive value "
          "admit no positive concentration");
    if (!some_pos && std::none_of(cc.weights.begin(), cc.weights.end(),
                                  [](double w) { return w != 0.0; }))
      throw ValidationError("class constraint with all-zero weights");
  }

  BalanceSystem sys{net, net.kappas(), constraints, net.complexes().size(), constraints.size(), d};

  // initial iterate: all-ones scaled to roughly satisfy the anchors
  double t = 1.0;
  if (!constraints.empty()) {
    double num = 0.0, den = 0.0;
    for (const ClassConstraint& cc : constraints) {
      double w1 = 0.0;
      for (double w : cc.weights) w1 += w;
      num += cc.value * w1;
      den += w1 * w1;
    }
    if (den > 0 && num > 0) t = num / den;
  }
  VectorXd u0 = VectorXd::Constant(d, std::log(t));

  RngStream rng(options.seed);
  VectorXd u = u0;
  VectorXd best_u = u0;
  double best_res = std::numeric_limits<double>::infinity();
  int total_iters = 0;

  for (int attempt = 0; attempt <= options.restarts; ++attempt) {
    if (attempt > 0) {
      u = u0;
      for (int i = 0; i < d; ++i) u[i] += 2.0 * (rng.uniform() - 0.5) * (1.0 + attempt);
    }
    for (int iter = 0; iter < options.max_iterations; ++iter, ++total_iters) {
      double rel = sys.worst_relative(u);
      if (rel < best_res) {
        best_res = rel;
        best_u = u;
      }
      if (rel <= options.tolerance) {
        Equilibrium eq;
        eq.concentrations.assign(d, 0.0);
        VectorXd c = u.array().exp();
        for (int i = 0; i < d; ++i) eq.concentrations[static_cast<size_t>(i)] = c[i];
        std::vector<double> res = complex_balance_residual(net, eq.concentrations);
        eq.residual = *std::max_element(res.begin(), res.end());
        eq.class_anchor = constraints;
        eq.iterations = total_iters;
        StructureReport rep = analyze_structure(net);
        if (!(rep.deficiency == 0 && rep.weakly_reversible))
          eq.warning =
              "network is not weakly reversible with deficiency zero; a complex-balanced "
              "equilibrium was still found for these rate constants";
        return eq;
      }

      VectorXd scale = sys.row_scales(u);
      VectorXd f = sys.residual(u);
      MatrixXd jac = sys.jacobian(u);
      VectorXd sf = scale.asDiagonal() * f;
      MatrixXd sj = scale.asDiagonal() * jac;
      VectorXd step = sj.colPivHouseholderQr().solve(-sf);
      if (!step.allFinite()) break;

      // Armijo backtracking on the frozen-scale squared residual
      double phi0 = sf.squaredNorm();
      double slope = -2.0 * phi0;  // Gauss-Newton direction: descent up to curvature
      double tstep = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        VectorXd cand = u + tstep * step;
        if (cand.array().abs().maxCoeff() < 700.0) {  // keep exp() finite
          VectorXd fc = scale.asDiagonal() * sys.residual(cand);
          double phic = fc.squaredNorm();
          if (phic <= phi0 + 1e-4 * tstep * slope || phic < phi0 * (1.0 - 1e-4 * tstep)) {
            u = cand;
            moved = true;
            break;
          }
        }
        tstep *= 0.5;
      }
      if (!moved) {
        // descent fallback on the same objective
        VectorXd grad = 2.0 * sj.transpose() * sf;
        double gnorm = grad.norm();
        if (gnorm <= 0) break;
        VectorXd dir = -grad / gnorm;
        double step_len = 1.0;
        bool ok = false;
        for (int ls = 0; ls < 60; ++ls) {
          VectorXd cand = u + step_len * dir;
          if (cand.array().abs().maxCoeff() < 700.0) {
            VectorXd fc = scale.asDiagonal() * sys.residual(cand);
            if (fc.squaredNorm() < phi0) {
              u = cand;
              ok = true;
              break;
            }
          }
          step_len *= 0.5;
        }
        if (!ok) break;  // stalled; try a restart
      }
    }
  }

  std::ostringstream os;
  os << "complex-balance solver did not reach tolerance " << options.tolerance << " after "
     << total_iters << " iterations across " << (options.restarts + 1)
     << " starts; best residual " << best_res << " at c=(";
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << std::exp(best_u[i]);
  os << ")";
  throw NumericalError(os.str());
}

}  // namespace crn
