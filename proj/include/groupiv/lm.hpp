#pragma once

// Levenberg-Marquardt least squares with box constraints by projection.
//
// Minimizes |r(p)|^2. Each iteration solves (J^T J + lambda diag(J^T J)) dp = -J^T r,
// projects p + dp onto the bounds, and accepts the step only if the cost drops.
// lambda starts at 1e-3 and is multiplied by 10 on rejection, divided by 10 on
// acceptance. Standard errors come from s^2 (J^T J)^-1 at the solution, with
// s^2 = cost / (n - p).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "groupiv/error.hpp"

namespace groupiv {

enum class FitStatus { converged, max_iterations, singular, not_attempted };

inline const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max_iterations";
    case FitStatus::singular: return "singular";
    case FitStatus::not_attempted: return "not_attempted";
  }
  return "?";
}

struct FitResult {
  std::vector<double> parameters;
  std::vector<double> standard_errors;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  FitStatus status = FitStatus::not_attempted;
  std::string diagnostic;
  // |r| after every accepted step, starting with the initial point.
  std::vector<double> residual_history;
};

struct NllsOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;
  double reduction_tolerance = 1e-12;
  double initial_damping = 1e-3;
  double damping_factor = 10.0;
  // Empty means unbounded. Otherwise one entry per parameter (use +-infinity to leave one free).
  std::vector<double> lower_bounds;
  std::vector<double> upper_bounds;
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFunction = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Forward-difference Jacobian of `residual` at `p`.
inline Eigen::MatrixXd numeric_jacobian(const ResidualFunction& residual, const Eigen::VectorXd& p,
                                        const Eigen::VectorXd& r0) {
  Eigen::MatrixXd jac(r0.size(), p.size());
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    Eigen::VectorXd q = p;
    const double h = eps * std::max(1.0, std::abs(p[j]));
    q[j] += h;
    jac.col(j) = (residual(q) - r0) / (q[j] - p[j]);
  }
  return jac;
}

namespace detail {

inline Eigen::VectorXd project(Eigen::VectorXd p, const NllsOptions& opts) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!opts.lower_bounds.empty()) p[i] = std::max(p[i], opts.lower_bounds[static_cast<std::size_t>(i)]);
    if (!opts.upper_bounds.empty()) p[i] = std::min(p[i], opts.upper_bounds[static_cast<std::size_t>(i)]);
  }
  return p;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace detail

inline FitResult nlls_solve(const ResidualFunction& residual, JacobianFunction jacobian,
                            const std::vector<double>& initial, const NllsOptions& opts = {}) {
  const auto n_params = static_cast<Eigen::Index>(initial.size());
  detail::require(n_params > 0, "nlls_solve: no parameters");
  detail::require(opts.lower_bounds.empty() || opts.lower_bounds.size() == initial.size(),
                  "nlls_solve: lower bounds size mismatch");
  detail::require(opts.upper_bounds.empty() || opts.upper_bounds.size() == initial.size(),
                  "nlls_solve: upper bounds size mismatch");
  if (!jacobian) {
    jacobian = [&residual](const Eigen::VectorXd& p) { return numeric_jacobian(residual, p, residual(p)); };
  }

  Eigen::VectorXd p = detail::project(Eigen::Map<const Eigen::VectorXd>(initial.data(), n_params), opts);
  Eigen::VectorXd r = residual(p);
  detail::require(r.size() > 0, "nlls_solve: no data");
  detail::require(r.allFinite(), "nlls_solve: residual is not finite at the initial point");

  FitResult result;
  double cost = r.squaredNorm();
  result.residual_history.push_back(std::sqrt(cost));
  double lambda = opts.initial_damping;
  bool done = false;
  bool singular = false;
  int iteration = 0;

  while (!done && !singular && iteration < opts.max_iterations) {
    ++iteration;
    if (cost == 0.0) {
      done = true;
      break;
    }
    const Eigen::MatrixXd jac = jacobian(p);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd gradient = jac.transpose() * r;
    if (!gradient.allFinite()) {
      result.diagnostic = "non-finite Jacobian";
      break;
    }
    if (gradient.lpNorm<Eigen::Infinity>() == 0.0) {
      done = true;
      break;
    }
    Eigen::VectorXd scale = normal.diagonal();
    const double floor = std::max(scale.maxCoeff(), 1.0) * 1e-15;
    for (Eigen::Index i = 0; i < scale.size(); ++i) scale[i] = std::max(scale[i], floor);

    for (;;) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal() += lambda * scale;
      const Eigen::LDLT<Eigen::MatrixXd> solver(damped);
      Eigen::VectorXd step;
      if (solver.info() == Eigen::Success) step = solver.solve(-gradient);
      if (solver.info() != Eigen::Success || !step.allFinite()) {
        lambda *= opts.damping_factor;
        if (lambda > 1e30) {
          singular = true;
          break;
        }
        continue;
      }
      const Eigen::VectorXd candidate = detail::project(p + step, opts);
      const double step_norm = (candidate - p).norm();
      if (step_norm <= opts.step_tolerance * (p.norm() + opts.step_tolerance)) {
        done = true;
        break;
      }
      const Eigen::VectorXd r_new = residual(candidate);
      const double cost_new = r_new.allFinite() ? r_new.squaredNorm() : std::numeric_limits<double>::infinity();
      if (cost_new < cost) {
        const double reduction = (cost - cost_new) / cost;
        p = candidate;
        r = r_new;
        cost = cost_new;
        result.residual_history.push_back(std::sqrt(cost));
        lambda = std::max(lambda / opts.damping_factor, 1e-300);
        if (reduction < opts.reduction_tolerance ||
            step_norm <= opts.step_tolerance * (p.norm() + opts.step_tolerance)) {
          done = true;
        }
        break;
      }
      lambda *= opts.damping_factor;
      if (lambda > 1e30) {
        // no descent possible at machine precision
        done = true;
        break;
      }
    }
  }

  result.parameters = detail::to_std(p);
  result.residual_norm = std::sqrt(cost);
  result.iterations = iteration;
  result.standard_errors.assign(initial.size(), 0.0);
  if (singular) {
    result.status = FitStatus::singular;
    result.diagnostic = "damped normal equations could not be solved";
    return result;
  }
  if (!done) {
    result.status = FitStatus::max_iterations;
    if (result.diagnostic.empty()) result.diagnostic = "no convergence after " + std::to_string(iteration) + " iterations";
    return result;
  }

  // Singularity is judged on the correlation form of J^T J so parameter scales do not matter.
  const Eigen::MatrixXd jac = jacobian(p);
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  const Eigen::VectorXd diag = normal.diagonal();
  if (!(diag.minCoeff() > 0.0) || !diag.allFinite()) {
    result.status = FitStatus::singular;
    result.diagnostic = "singular normal equations at the solution (a parameter has no effect)";
    return result;
  }
  const Eigen::VectorXd inv_sqrt = diag.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd correlation = inv_sqrt.asDiagonal() * normal * inv_sqrt.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(correlation);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 1e-13)) {
    result.status = FitStatus::singular;
    result.diagnostic = "singular normal equations at the solution (parameters not identifiable)";
    return result;
  }
  const auto dof = r.size() - n_params;
  const double variance = dof > 0 ? cost / static_cast<double>(dof) : 0.0;
  const Eigen::MatrixXd covariance =
      inv_sqrt.asDiagonal() *
      (eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose()) *
      inv_sqrt.asDiagonal();
  for (Eigen::Index i = 0; i < n_params; ++i) {
    result.standard_errors[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, variance * covariance(i, i)));
  }
  result.converged = true;
  result.status = FitStatus::converged;
  return result;
}

/// Variant with a forward-difference Jacobian.
inline FitResult nlls_solve(const ResidualFunction& residual, const std::vector<double>& initial,
                            const NllsOptions& opts = {}) {
  return nlls_solve(residual, JacobianFunction{}, initial, opts);
}

}  // namespace groupiv
