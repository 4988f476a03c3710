#ifndef SYMDYN_STATS_HPP
#define SYMDYN_STATS_HPP

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstddef>
#include <vector>

#include "symdyn/errors.hpp"

namespace symdyn {

inline double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Sample variance with the n-1 convention.
inline double variance(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

inline double stddev(const std::vector<double>& xs) {
    return std::sqrt(variance(xs));
}

inline double pearson(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
    const double mx = mean(xs), my = mean(ys);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const double denom = std::sqrt(sxx * syy);
    if (denom == 0.0) return 0.0;
    return sxy / denom;
}

/// Lag-h sample autocorrelation.
inline double autocorrelation(const std::vector<double>& xs, int lag) {
    const double m = mean(xs);
    double num = 0.0, den = 0.0;
    const std::size_t n = xs.size();
    for (std::size_t t = 0; t < n; ++t) den += (xs[t] - m) * (xs[t] - m);
    for (std::size_t t = static_cast<std::size_t>(lag); t < n; ++t)
        num += (xs[t] - m) * (xs[t - lag] - m);
    return den == 0.0 ? 0.0 : num / den;
}

/**
 * Digamma values at integer arguments 1..n_max, via the recurrence
 * psi(n+1) = psi(n) + 1/n starting from psi(1) = -gamma. Index i holds
 * psi(i); index 0 is unused.
 */
inline std::vector<double> digamma_table(std::size_t n_max) {
    constexpr double kEulerGamma = 0.5772156649015328606;
    std::vector<double> psi(n_max + 1, 0.0);
    if (n_max >= 1) psi[1] = -kEulerGamma;
    for (std::size_t n = 1; n < n_max; ++n)
        psi[n + 1] = psi[n] + 1.0 / static_cast<double>(n);
    return psi;
}

/// Two-sided p-value of a t statistic.
inline double t_test_pvalue(double t, double dof) {
    if (!std::isfinite(t)) return 0.0;
    boost::math::students_t dist(dof);
    return 2.0 * boost::math::cdf(dist, -std::abs(t));
}

/**
 * Residuals of y regressed on [1 | Z] by least squares. Z may have zero
 * columns, in which case this just centers y. Throws NumericalError when the
 * design matrix is rank deficient.
 */
inline Eigen::VectorXd ols_residuals(const Eigen::VectorXd& y,
                                     const Eigen::MatrixXd& Z) {
    const Eigen::Index n = y.size();
    Eigen::MatrixXd design(n, Z.cols() + 1);
    design.col(0).setOnes();
    if (Z.cols() > 0) design.rightCols(Z.cols()) = Z;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols())
        throw NumericalError("rank-deficient conditioning matrix");
    Eigen::VectorXd beta = qr.solve(y);
    return y - design * beta;
}

}  // namespace symdyn

#endif  // SYMDYN_STATS_HPP
