#pragma once

// Binary logistic regression fitted by iteratively reweighted least squares.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gaselect/design.hpp"

namespace gaselect {

struct FitOptions {
  /// Added to the diagonal of the normal equations.
  double ridge = 1e-8;
  int max_iterations = 50;
  int max_halvings = 10;
  double coefficient_tolerance = 1e-8;
  double loglik_tolerance = 1e-10;
  bool compute_std_errors = true;
};

/// Coefficient 0 is the intercept; coefficient k >= 1 belongs to design
/// column k-1.
struct FittedModel {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;
  double log_likelihood = 0.0;
  std::size_t n_obs = 0;
  bool converged = false;
  int n_iterations = 0;
};

inline constexpr double kLinearPredictorBound = 30.0;

inline double logistic(double eta) {
  eta = std::clamp(eta, -kLinearPredictorBound, kLinearPredictorBound);
  return 1.0 / (1.0 + std::exp(-eta));
}

namespace detail {

inline Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd xa(x.rows(), x.cols() + 1);
  xa.col(0).setOnes();
  xa.rightCols(x.cols()) = x;
  return xa;
}

inline Eigen::VectorXd probabilities(const Eigen::MatrixXd& xa, const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = xa * beta;
  return eta.unaryExpr([](double e) { return logistic(e); });
}

inline double bernoulli_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& p) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    ll += y[i] > 0.5 ? std::log(p[i]) : std::log1p(-p[i]);
  return ll;
}

/// X'WX + ridge*I with W = diag(p(1-p)).
inline Eigen::MatrixXd information(const Eigen::MatrixXd& xa, const Eigen::VectorXd& p, double ridge) {
  Eigen::VectorXd sw = (p.array() * (1.0 - p.array())).sqrt();
  Eigen::MatrixXd xw = xa.array().colwise() * sw.array();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(xa.cols(), xa.cols());
  h.selfadjointView<Eigen::Lower>().rankUpdate(xw.transpose());
  h.diagonal().array() += ridge;
  return h.selfadjointView<Eigen::Lower>();
}

inline void check_inputs(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw std::invalid_argument("fit: row count mismatch");
  if (y.size() < x.cols() + 1)
    throw std::invalid_argument("fit: need at least one more observation than coefficients");
  if (!x.allFinite()) throw std::invalid_argument("fit: non-finite values in design matrix");
  bool has0 = false, has1 = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) has0 = true;
    else if (y[i] == 1.0) has1 = true;
    else throw std::invalid_argument("fit: outcome values must be 0 or 1");
  }
  if (!has0 || !has1) throw std::invalid_argument("fit: outcome has a single class");
}

}  // namespace detail

/// Log-likelihood of coefficients `beta` (intercept first) on x without an
/// intercept column.
inline double log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  return detail::bernoulli_loglik(y, detail::probabilities(detail::with_intercept(x), beta));
}

/// Gradient of log_likelihood with respect to beta: X'(y - p).
inline Eigen::VectorXd score(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  Eigen::MatrixXd xa = detail::with_intercept(x);
  return xa.transpose() * (y - detail::probabilities(xa, beta));
}

namespace detail {

/// Ascent loop shared by the fitters. `direction(p, g)` returns the Newton
/// direction given the current probabilities and score. Halves the step
/// while the likelihood would drop.
template <class Direction>
FittedModel ascend(const Eigen::MatrixXd& xa, const Eigen::VectorXd& y, Eigen::VectorXd beta, const FitOptions& opt,
                   Direction&& direction) {
  Eigen::VectorXd p = probabilities(xa, beta);
  double ll = bernoulli_loglik(y, p);

  FittedModel m;
  m.n_obs = static_cast<std::size_t>(y.size());
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    m.n_iterations = iter;
    const Eigen::VectorXd g = xa.transpose() * (y - p);
    const Eigen::VectorXd delta = direction(p, g);
    if (!delta.allFinite()) break;

    // Near the optimum the likelihood is flat below rounding error; a step
    // that "decreases" it by less than that is still accepted.
    const double floor_ll = ll - 1e-12 * std::abs(ll);
    double step = 1.0;
    Eigen::VectorXd cand = beta + delta;
    Eigen::VectorXd cand_p = probabilities(xa, cand);
    double cand_ll = bernoulli_loglik(y, cand_p);
    for (int h_i = 0; h_i < opt.max_halvings && !(cand_ll >= floor_ll); ++h_i) {
      step *= 0.5;
      cand = beta + step * delta;
      cand_p = probabilities(xa, cand);
      cand_ll = bernoulli_loglik(y, cand_p);
    }
    if (!(cand_ll >= floor_ll)) {
      // No ascent direction left at working precision.
      m.converged = delta.cwiseAbs().maxCoeff() < std::sqrt(opt.coefficient_tolerance);
      break;
    }
    const double change = step * delta.cwiseAbs().maxCoeff();
    const double rel = std::abs(cand_ll - ll) / std::max(std::abs(ll), std::numeric_limits<double>::min());
    beta = std::move(cand);
    p = std::move(cand_p);
    ll = cand_ll;
    if (change < opt.coefficient_tolerance || rel < opt.loglik_tolerance) {
      m.converged = true;
      break;
    }
  }

  m.coefficients = std::move(beta);
  m.log_likelihood = ll;
  if (opt.compute_std_errors) {
    Eigen::MatrixXd h = information(xa, p, opt.ridge);
    Eigen::MatrixXd cov = h.ldlt().solve(Eigen::MatrixXd::Identity(h.rows(), h.cols()));
    m.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  } else {
    m.std_errors = Eigen::VectorXd::Constant(m.coefficients.size(), std::numeric_limits<double>::quiet_NaN());
  }
  return m;
}

inline Eigen::VectorXd start_vector(Eigen::Index size, const Eigen::VectorXd* start) {
  if (start && start->size() == size && start->allFinite()) return *start;
  return Eigen::VectorXd::Zero(size);
}

/// IRLS on a design that already carries the intercept column.
inline FittedModel fit_augmented(const Eigen::MatrixXd& xa, const Eigen::VectorXd& y, const FitOptions& opt,
                                 const Eigen::VectorXd* start = nullptr) {
  return ascend(xa, y, start_vector(xa.cols(), start), opt, [&](const Eigen::VectorXd& p, const Eigen::VectorXd& g) {
    return Eigen::VectorXd(information(xa, p, opt.ridge).ldlt().solve(g));
  });
}

/// Newton iterations with the information matrix held at `info` (already
/// ridged). Near `start` this converges to the same maximum as IRLS while
/// skipping the per-iteration X'WX; cross-validation uses it for fold refits
/// started from the full-data estimate.
inline FittedModel fit_fixed_information(const Eigen::MatrixXd& xa, const Eigen::VectorXd& y,
                                         const Eigen::MatrixXd& info, const Eigen::VectorXd& start,
                                         const FitOptions& opt) {
  const Eigen::LDLT<Eigen::MatrixXd> solver(info);
  return ascend(xa, y, start_vector(xa.cols(), &start), opt,
                [&](const Eigen::VectorXd&, const Eigen::VectorXd& g) { return Eigen::VectorXd(solver.solve(g)); });
}

}  // namespace detail

/// Newton-Raphson (IRLS) with step halving whenever a full step would lower
/// the log-likelihood. Separation is not an error: the fit stops at the
/// iteration cap and reports converged = false.
inline FittedModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const FitOptions& opt = {},
                       const Eigen::VectorXd* start = nullptr) {
  detail::check_inputs(x, y);
  return detail::fit_augmented(detail::with_intercept(x), y, opt, start);
}

inline FittedModel fit(const DesignMatrix& d, const FitOptions& opt = {}) { return fit(d.x, d.y, opt); }

inline Eigen::VectorXd predict(const FittedModel& m, const Eigen::MatrixXd& x) {
  if (x.cols() + 1 != m.coefficients.size())
    throw std::invalid_argument("predict: design has " + std::to_string(x.cols()) + " columns, model expects " +
                                std::to_string(m.coefficients.size() - 1));
  Eigen::VectorXd eta = (x * m.coefficients.tail(x.cols())).array() + m.coefficients[0];
  return eta.unaryExpr([](double e) { return logistic(e); });
}

inline Eigen::VectorXd predict(const FittedModel& m, const DesignMatrix& d) { return predict(m, d.x); }

/// Two-sided normal p-value of coefficient / std_error for every coefficient.
inline std::vector<double> wald_p_values(const FittedModel& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.coefficients.size()));
  for (Eigen::Index k = 0; k < m.coefficients.size(); ++k) {
    const double se = m.std_errors[k];
    if (!std::isfinite(se)) throw std::invalid_argument("wald_p_values: non-finite standard error");
    if (se == 0.0) throw std::invalid_argument("wald_p_values: zero standard error");
    const double z = m.coefficients[k] / se;
    out.push_back(std::erfc(std::abs(z) / std::sqrt(2.0)));
  }
  return out;
}

inline double aic(const FittedModel& m) {
  return 2.0 * static_cast<double>(m.coefficients.size()) - 2.0 * m.log_likelihood;
}

}  // namespace gaselect
