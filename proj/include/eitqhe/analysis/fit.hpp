#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "eitqhe/error.hpp"

namespace eitqhe::analysis {

/// eps(x) = a (1 - exp(-b x)) + c
inline double exponential_model(double a, double b, double c, double x) {
  return a * -std::expm1(-b * x) + c;
}

struct FitResult {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double rss = 0.0;
  double r2 = 0.0;
  double gradient_norm = 0.0;  // max_k |J_k . r| / (|J_k| |y|)
  int iterations = 0;
  bool converged = false;
  bool ill_conditioned = false;
};

struct FitOptions {
  int max_iterations = 500;
  double step_tolerance = 1e-10;
  double gradient_tolerance = 1e-8;
};

namespace detail {

struct Residuals {
  Eigen::VectorXd r;
  double rss = 0.0;
};

inline Residuals residuals(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::Vector3d& p) {
  Residuals out;
  out.r.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.r(i) = y(i) - exponential_model(p(0), p(1), p(2), x(i));
  out.rss = out.r.squaredNorm();
  return out;
}

inline Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, const Eigen::Vector3d& p) {
  Eigen::MatrixXd j(x.size(), 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double e = std::exp(-p(1) * x(i));
    j(i, 0) = -std::expm1(-p(1) * x(i));
    j(i, 1) = p(0) * x(i) * e;
    j(i, 2) = 1.0;
  }
  return j;
}

inline double scaled_gradient(const Eigen::MatrixXd& j, const Eigen::VectorXd& r, double ynorm) {
  if (ynorm == 0.0) return 0.0;
  double g = 0.0;
  for (Eigen::Index k = 0; k < 3; ++k) {
    const double cn = j.col(k).norm();
    if (cn > 0.0) g = std::max(g, std::abs(j.col(k).dot(r)) / (cn * ynorm));
  }
  return g;
}

}  // namespace detail

/// Least-squares fit of the saturating exponential by Levenberg-Marquardt
/// with Marquardt diagonal scaling.
inline FitResult fit_exponential(const std::vector<double>& xs, const std::vector<double>& ys,
                                 const FitOptions& opt = {}) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorKind::ShapeMismatch, fmt::format("{} x values, {} y values", xs.size(), ys.size()));
  }
  if (std::set<double>(xs.begin(), xs.end()).size() < 4 || xs.size() < 4) {
    throw Error(ErrorKind::InvalidConfig, "need at least 4 samples with distinct x");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw Error(ErrorKind::NonFiniteInput, fmt::format("sample {}", i));
    }
  }
  const auto n = static_cast<Eigen::Index>(xs.size());
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xs.data(), n);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
  const double mean = y.mean();
  const double tss = (y.array() - mean).square().sum();

  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                          : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);

  FitResult out;
  if (y.maxCoeff() == y.minCoeff()) {
    out.ill_conditioned = true;
    out.b = median != 0.0 ? 1.0 / std::abs(median) : 1.0;
    out.c = mean;
    out.rss = detail::residuals(x, y, {out.a, out.b, out.c}).rss;
    out.r2 = 0.0;
    return out;
  }

  Eigen::Vector3d p(y.maxCoeff() - y.minCoeff(), median != 0.0 ? 1.0 / std::abs(median) : 1.0, y.minCoeff());
  auto cur = detail::residuals(x, y, p);
  double lambda = 1e-3;
  int it = 0;
  bool converged = false;
  Eigen::MatrixXd j = detail::jacobian(x, p);
  while (it < opt.max_iterations && !converged) {
    ++it;
    if (cur.rss == 0.0) {
      converged = true;
      break;
    }
    const Eigen::Matrix3d jtj = j.transpose() * j;
    const Eigen::Vector3d g = j.transpose() * cur.r;
    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix3d m = jtj;
      for (int k = 0; k < 3; ++k) m(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      const Eigen::Vector3d step = m.ldlt().solve(g);
      const Eigen::Vector3d trial = p + step;
      const auto next = detail::residuals(x, y, trial);
      if (step.allFinite() && std::isfinite(next.rss) && next.rss <= cur.rss) {
        double rel = 0.0;
        for (int k = 0; k < 3; ++k) rel = std::max(rel, std::abs(step(k)) / std::max(std::abs(trial(k)), 1e-300));
        p = trial;
        cur = next;
        j = detail::jacobian(x, p);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (rel < opt.step_tolerance) converged = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) break;
      }
    }
    if (!accepted) {
      // No downhill step exists at any damping: a stationary point.
      converged = detail::scaled_gradient(j, cur.r, y.norm()) < opt.gradient_tolerance;
      break;
    }
  }

  out.a = p(0);
  out.b = p(1);
  out.c = p(2);
  out.rss = cur.rss;
  out.r2 = 1.0 - cur.rss / tss;
  out.iterations = it;
  out.gradient_norm = detail::scaled_gradient(j, cur.r, y.norm());
  out.converged = converged && out.gradient_norm < opt.gradient_tolerance;
  return out;
}

inline void write_fit(std::ostream& os, const FitResult& f) {
  os << fmt::format("a={}\nb={}\nc={}\nrss={}\nr2={}\niterations={}\nconverged={}\nill_conditioned={}\n", f.a, f.b,
                    f.c, f.rss, f.r2, f.iterations, f.converged, f.ill_conditioned);
}

}  // namespace eitqhe::analysis
