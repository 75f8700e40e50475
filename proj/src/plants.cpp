#include "imreg/plants.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace imreg {

std::vector<double> PlantModel::eval_f(double t, std::span<const double> x,
                                       double e) const {
  std::vector<double> dx(static_cast<std::size_t>(n), 0.0);
  if (n > 0) f(t, x, e, dx);
  return dx;
}

PlantModel example_plant() {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double kSqrt3 = std::numbers::sqrt3;
  PlantModel p;
  p.n = 2;
  p.period = 1.0;
  p.f = [](double t, std::span<const double> x, double e, std::span<double> dx) {
    const double s = std::sin(kTwoPi * t);
    dx[0] = -x[0] / 5.0 + kSqrt3 * x[1] + std::sin(x[1]) / 10.0 + s;
    dx[1] = -kSqrt3 * x[0] - x[1] + x[1] * x[1] / 10.0 + x[1] * e +
            std::cos(2.0 * kTwoPi * t) * (1.0 + s);
  };
  p.q = [](double t, std::span<const double> x, double e) {
    const double c = std::cos(kTwoPi * t);
    // c + c^2 + c^3 + c^4
    const double harmonics = c * (1.0 + c * (1.0 + c * (1.0 + c)));
    return 1.0 + x[0] + std::atan(e * x[1]) + harmonics;
  };
  return p;
}

PlantModel linear_test_plant(std::function<double(double)> q_signal, double period) {
  PlantModel p;
  p.n = 0;
  p.period = period;
  p.f = [](double, std::span<const double>, double, std::span<double>) {};
  p.q = [sig = std::move(q_signal)](double t, std::span<const double>, double) {
    return sig(t);
  };
  return p;
}

NormalFormReduction NormalFormReduction::make(int r, std::vector<double> a) {
  if (r < 2) throw std::invalid_argument("relative degree must be at least 2");
  if (a.size() != static_cast<std::size_t>(r - 1)) {
    throw std::invalid_argument("expected r - 1 coefficients a_1..a_{r-1}");
  }
  NormalFormReduction red;
  red.r = r;
  red.a = std::move(a);
  const int k = r - 1;
  red.A = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i + 1 < k; ++i) red.A(i, i + 1) = 1.0;
  // xi_{r-1}' = xi_r = e - sum a_i xi_i
  for (int j = 0; j < k; ++j) red.A(k - 1, j) = -red.a[j];
  red.B = Eigen::VectorXd::Zero(k);
  red.B(k - 1) = 1.0;
  red.C = Eigen::RowVectorXd::Zero(k);
  red.C(0) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> es(red.A, false);
  if (es.info() != Eigen::Success) {
    throw std::invalid_argument("eigenvalue computation failed for the chain matrix");
  }
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (!(es.eigenvalues()(i).real() < 0.0)) {
      throw std::invalid_argument("chain coefficients are not Hurwitz");
    }
  }
  return red;
}

double NormalFormReduction::to_error(std::span<const double> xi) const {
  double e = xi[static_cast<std::size_t>(r - 1)];
  for (int i = 0; i < r - 1; ++i) e += a[i] * xi[i];
  return e;
}

double NormalFormReduction::from_error(std::span<const double> y, double e) const {
  double xr = e;
  for (int i = 0; i < r - 1; ++i) xr -= a[i] * y[i];
  return xr;
}

PlantModel reduce_relative_degree(const ChainModel& chain, int r, std::vector<double> a) {
  if (chain.chi_dim < 0) throw std::invalid_argument("negative chi dimension");
  if (chain.chi_dim > 0 && !chain.f0) {
    throw std::invalid_argument("chain with chi states needs f0");
  }
  if (!chain.q0) throw std::invalid_argument("chain needs q0");
  auto red = NormalFormReduction::make(r, std::move(a));

  const int nc = chain.chi_dim;
  const int k = r - 1;
  PlantModel p;
  p.n = nc + k;
  p.period = chain.period;
  p.f = [red, f0 = chain.f0, nc, k](double t, std::span<const double> x, double e,
                                    std::span<double> dx) {
    const auto y = x.subspan(static_cast<std::size_t>(nc));
    if (nc > 0) {
      f0(t, x.first(static_cast<std::size_t>(nc)), y[0],
         dx.first(static_cast<std::size_t>(nc)));
    }
    for (int i = 0; i + 1 < k; ++i) dx[nc + i] = y[i + 1];
    dx[nc + k - 1] = red.from_error(y, e);
  };
  p.q = [red, q0 = chain.q0, nc, k](double t, std::span<const double> x, double e) {
    const auto chi = x.first(static_cast<std::size_t>(nc));
    const auto y = x.subspan(static_cast<std::size_t>(nc));
    const double xr = red.from_error(y, e);
    std::vector<double> xi(y.begin(), y.end());
    xi.push_back(xr);
    double out = q0(t, chi, xi);
    for (int i = 0; i + 1 < k; ++i) out += red.a[i] * y[i + 1];
    out += red.a[k - 1] * xr;
    return out;
  };
  return p;
}

}  // namespace imreg
