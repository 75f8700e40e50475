#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "imreg/freqdomain.hpp"
#include "imreg/verify.hpp"

using namespace imreg;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// |e/q| from the full state-space model (e, z) by a dense complex solve.
double state_space_gain(const RegulatorConfig& c, double w) {
  const auto b = build_bank(c);
  const int d = b.dim();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d + 1, d + 1);
  const auto nz = b.n_z_dense();
  const auto m = b.m_dense();
  const Eigen::RowVectorXd mtn = m.transpose() * nz;
  A(0, 0) = -c.sigma - c.mu * b.weighted_norm();
  A.block(0, 1, 1, d) = c.mu * mtn;
  A.block(1, 0, d, 1) = b.gamma_dense();
  A.block(1, 1, d, d) = b.phi_dense();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d + 1);
  rhs(0) = 1.0;
  const Eigen::MatrixXcd M = std::complex<double>(0, w) * Eigen::MatrixXcd::Identity(d + 1, d + 1) -
                             A.cast<std::complex<double>>();
  return std::abs(M.partialPivLu().solve(rhs)(0));
}

}  // namespace

TEST_SUITE("freqdomain") {

TEST_CASE("scalar closed form") {
  const double n0 = 2.0;
  for (double mu : {0.5, 1.0, 3.0}) {
    const auto c = RegulatorConfig::canonical(0, 2.0, mu, kTwoPi);
    const auto b = build_bank(c);
    for (double w : {0.0, 0.1, 1.0, 7.0, 100.0}) {
      const double want = n0 / (w * w + mu * mu * n0 * n0);
      CHECK(transfer_gain_resolvent(b, mu, w) == doctest::Approx(want).epsilon(1e-12));
      CHECK(transfer_gain(c, w) == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(transfer_gain(c, 0.0) == doctest::Approx(1.0 / (mu * mu * n0)).epsilon(1e-14));
  }
}

TEST_CASE("integrator-only gain is bounded by 3/2 n_z0") {
  const auto c = RegulatorConfig::canonical(0, 2.0, 1.0, kTwoPi);
  for (double w : log_grid(1e-3, 1e6, 200)) CHECK(transfer_gain(c, w) <= 3.0);
  CHECK(transfer_gain(c, 1e8) < 1e-15);
}

TEST_CASE("exact resonance values") {
  for (double mu : {0.5, 1.0, 2.0}) {
    const auto c = RegulatorConfig::canonical(12, 2.0, mu, kTwoPi, 0.5);
    const auto w = c.frequencies();
    for (int l = 1; l <= 12; ++l) {
      const double want = 2.0 / (mu * mu * c.coefficients[l]);
      CHECK(std::abs(transfer_gain(c, w[l - 1]) - want) / want < 1e-10);
      // Just off resonance the formula stays continuous.
      CHECK(transfer_gain(c, w[l - 1] * (1 + 1e-9)) == doctest::Approx(want).epsilon(1e-5));
    }
  }
}

TEST_CASE("rational and product forms agree away from poles") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> uw(0.0, 30.0);
  int checked = 0;
  for (int n_o : {1, 3, 8, 15}) {
    const auto c = RegulatorConfig::canonical(n_o, 2.0, 1.3, 1.0, 0.5);
    const auto wts = c.coefficients.values();
    const auto fr = c.frequencies();
    while (checked < 2500 * (n_o == 15 ? 4 : (n_o == 8 ? 3 : (n_o == 3 ? 2 : 1)))) {
      const double w = uw(rng);
      bool near = w < 1e-3;
      for (double f : fr) near = near || std::abs(w - f) < 1e-3;
      if (near) continue;
      const double a = transfer_gain_rational(wts, fr, c.mu, w);
      const double b = transfer_gain_product(wts, fr, c.mu, w);
      CHECK(std::abs(a - b) <= 1e-9 * std::abs(a));
      ++checked;
    }
  }
  CHECK(checked == 10000);
}

TEST_CASE("formula matches the resolvent oracle") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> un(0, 20);
  std::uniform_real_distribution<double> umu(0.5, 2.0), ux(0.0, 30.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int n_o = un(rng);
    const auto c = RegulatorConfig::canonical(n_o, 2.0, umu(rng), kTwoPi);
    const double w = ux(rng) * c.omega_hat;
    const double a = transfer_gain(c, w);
    const double b = transfer_gain_resolvent(build_bank(c), c.mu, w);
    worst = std::max(worst, std::abs(a - b) / b);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("bound constants") {
  const auto c = CoefficientSequence::canonical(3, 0.5);
  const auto b = bound_constants(c, 1.0);
  CHECK(b.kappa0 == 7.0);
  const double s = 2.0 + 2.0 / (3.0 * std::pow(2.0, -1.5)) + 10.0 / 3.0;
  CHECK(b.s == doctest::Approx(s).epsilon(1e-14));
  CHECK(b.s == doctest::Approx(7.219).epsilon(1e-3));
  CHECK(b.a == doctest::Approx((2 + std::sqrt(2.0)) * s).epsilon(1e-14));
  CHECK(b.a == doctest::Approx(24.65).epsilon(1e-3));
  CHECK(b.varpi == doctest::Approx(1.0 / (48.0 * (b.a + 2.0))));
  CHECK(b.kappa1 == doctest::Approx(4.0 * 2.0 / (b.varpi * b.varpi) + 512.0));
  CHECK(bound_constants(c, 2.0).kappa1 < b.kappa1);
  // n_o = 1 still has n_z2 through the canonical tail.
  CHECK(bound_constants(CoefficientSequence::canonical(1, 0.5), 1.0).s == doctest::Approx(s));
  CHECK_THROWS_AS(bound_constants(CoefficientSequence::explicit_values({2, 1}), 1.0),
                  std::invalid_argument);
}

TEST_CASE("quadratic bound holds on a dense grid") {
  for (int n_o : {1, 2, 5, 16, 32}) {
    for (double mu : {1.0, 2.0, 4.0}) {
      for (double eps : {0.25, 0.5, 1.0}) {
        const auto c = CoefficientSequence::canonical(n_o, eps);
        std::vector<double> x(2000);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (n_o + 5.0) * i / (x.size() - 1.0);
        const auto curve = transfer_curve(c, n_o, mu, x);
        CHECK(curve.bound_violations().empty());
      }
    }
  }
}

TEST_CASE("normalized gain equals the physical gain at unit base frequency") {
  const auto c = RegulatorConfig::canonical(4, 2.0, 1.5, 1.0);
  for (double x : {0.0, 0.3, 1.0, 2.5, 4.0, 9.0}) {
    CHECK(transfer_gain_normalized(c.coefficients, 4, 1.5, x) ==
          doctest::Approx(transfer_gain(c, x)).epsilon(1e-12));
  }
}

TEST_CASE("Bode magnitudes") {
  CHECK(closed_loop_gain_high_gain(2.0, 0.0) == 0.5);
  CHECK(to_db(0.5) == doctest::Approx(-6.0206).epsilon(1e-4));
  CHECK(to_db(0.0) == kDbFloor);

  const auto c = RegulatorConfig::canonical(10, 2.0, 1.0, kTwoPi);
  CHECK(closed_loop_gain_internal_model(c, 0.0) == 0.0);
  for (double w : c.frequencies()) CHECK(closed_loop_gain_internal_model(c, w) == 0.0);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 200.0);
  for (int k = 0; k < 300; ++k) {
    const double w = u(rng);
    CHECK(closed_loop_gain_internal_model(c, w) ==
          doctest::Approx(state_space_gain(c, w)).epsilon(1e-9));
    CHECK(closed_loop_gain_high_gain(2.0, w) ==
          doctest::Approx(1.0 / std::abs(std::complex<double>(2.0, w))).epsilon(1e-14));
  }

  const auto grid = log_grid(0.1, 1000.0, 2000);
  CHECK(grid.size() == 2000);
  CHECK(grid.front() == 0.1);
  CHECK(grid.back() == 1000.0);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  const auto hg = bode_high_gain(2.0, grid);
  const auto im = bode_internal_model(c, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] > 100.0 * kTwoPi) CHECK(std::abs(im.magnitude[i] / hg.magnitude[i] - 1.0) < 0.01);
    CHECK(im.magnitude_db[i] >= kDbFloor);
  }
}

TEST_CASE("Bode CSV") {
  BodeCurve b{{0.1, 1.0}, {0.5, 0.0}, {to_db(0.5), to_db(0.0)}};
  std::ostringstream os;
  write_bode_csv(os, b);
  CHECK(os.str().rfind("omega_rad_s,magnitude,magnitude_db\n0.10000000000000001,0.5,", 0) == 0);
  CHECK(os.str().find("\n1,0,-160\n") != std::string::npos);
}

}  // TEST_SUITE
