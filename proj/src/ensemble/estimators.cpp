#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmcool/ensemble.hpp"
#include "mmcool/numeric.hpp"

namespace mmcool::ensemble {

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 2) {
    throw std::invalid_argument("fit_line needs two or more matched points");
  }
  CompensatedSum st;
  CompensatedSum sy;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st.add(t[i]);
    sy.add(y[i]);
  }
  const double n = static_cast<double>(t.size());
  const double tm = st.value() / n;
  const double ym = sy.value() / n;
  CompensatedSum sxx;
  CompensatedSum sxy;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt = t[i] - tm;
    sxx.add(dt * dt);
    sxy.add(dt * (y[i] - ym));
  }
  if (!(sxx.value() > 0.0)) throw std::invalid_argument("fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy.value() / sxx.value();
  f.intercept = ym - f.slope * tm;
  return f;
}

QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& sigma) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n || sigma.size() != n) {
    throw std::invalid_argument("fit_quadratic needs three or more matched points");
  }
  // Centre and scale the abscissa for conditioning, then map back.
  double lo = *std::min_element(x.begin(), x.end());
  double hi = *std::max_element(x.begin(), x.end());
  const double mid = 0.5 * (lo + hi);
  const double half = hi > lo ? 0.5 * (hi - lo) : 1.0;

  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sigma[i] > 0.0)) throw std::invalid_argument("fit_quadratic: sigma must be positive");
    const double u = (x[i] - mid) / half;
    const double w = 1.0 / sigma[i];
    a(i, 0) = w;
    a(i, 1) = w * u;
    a(i, 2) = w * u * u;
    b(i) = w * y[i];
  }
  const Eigen::Matrix3d normal = a.transpose() * a;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
  if (!lu.isInvertible()) throw std::invalid_argument("fit_quadratic: degenerate abscissae");
  const Eigen::Vector3d beta = lu.solve(a.transpose() * b);
  const Eigen::Matrix3d cov_u = lu.inverse();

  // y = b0 + b1 u + b2 u^2 with u = (x - mid) / half.
  Eigen::Matrix3d t;
  t << 1.0, -mid / half, mid * mid / (half * half),  //
      0.0, 1.0 / half, -2.0 * mid / (half * half),    //
      0.0, 0.0, 1.0 / (half * half);
  const Eigen::Vector3d c = t * beta;
  const Eigen::Matrix3d cov = t * cov_u * t.transpose();

  QuadraticFit fit;
  for (int i = 0; i < 3; ++i) {
    fit.coef[i] = c(i);
    for (int j = 0; j < 3; ++j) fit.cov[i][j] = cov(i, j);
  }
  const Eigen::VectorXd r = a * beta - b;
  fit.chi2 = r.squaredNorm();
  return fit;
}

std::vector<double> quadratic_roots(const QuadraticFit& fit) {
  const double c0 = fit.coef[0];
  const double c1 = fit.coef[1];
  const double c2 = fit.coef[2];
  std::vector<double> roots;
  if (c2 == 0.0) {
    if (c1 != 0.0) roots.push_back(-c0 / c1);
    return roots;
  }
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return roots;
  // Cancellation-free form.
  const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
  if (q != 0.0) {
    roots.push_back(q / c2);
    roots.push_back(c0 / q);
  } else {
    roots.push_back(0.0);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

Mean mean_and_se(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty set");
  CompensatedSum s;
  for (double x : v) s.add(x);
  const double n = static_cast<double>(v.size());
  Mean m;
  m.mean = s.value() / n;
  if (v.size() > 1) {
    CompensatedSum ss;
    for (double x : v) ss.add((x - m.mean) * (x - m.mean));
    m.se = std::sqrt(ss.value() / (n - 1.0) / n);
  }
  return m;
}

}  // namespace mmcool::ensemble
