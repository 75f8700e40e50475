#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "imreg/analysis.hpp"
#include "imreg/scenario.hpp"

using namespace imreg;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Trajectory synth(const std::function<double(double)>& e, double t_end, double h = 1e-3) {
  Trajectory tr;
  tr.sample_dt = h;
  const auto n = static_cast<std::size_t>(std::llround(t_end / h));
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * h;
    tr.times.push_back(t);
    tr.e.push_back(e(t));
    tr.u.push_back(0.0);
    tr.v.push_back(0.0);
  }
  return tr;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("steady window placement") {
  const auto tr = synth([](double) { return 0.0; }, 150.0);
  const auto w = steady_window(tr, 1.0, 20);
  CHECK(w.t_start() == doctest::Approx(130.0));
  CHECK(w.t_end() == doctest::Approx(150.0));
  CHECK(w.e().size() == 20001);
  const auto w1 = steady_window(tr, 1.0, 1);
  CHECK(w1.t_start() == doctest::Approx(149.0));
  CHECK(w1.t_end() == doctest::Approx(150.0));
}

TEST_CASE("short trajectories are rejected") {
  const auto tr = synth([](double) { return 0.0; }, 30.0);
  CHECK_THROWS_AS(steady_window(tr, 1.0, 20), TrajectoryTooShort);
  const auto tiny = synth([](double) { return 0.0; }, 5.0);
  try {
    steady_window(tiny, 1.0, 20);
    FAIL("expected failure");
  } catch (const TrajectoryTooShort& e) {
    CHECK(std::string(e.what()).find("trajectory too short") != std::string::npos);
  }
  CHECK_NOTHROW(steady_window(tr, 1.0, 15));
}

TEST_CASE("norms of simple signals") {
  const auto c = synth([](double) { return -0.7; }, 40.0);
  const auto nc = norms(steady_window(c, 1.0, 20));
  CHECK(nc.sup == doctest::Approx(0.7));
  CHECK(nc.mean_square == doctest::Approx(0.49).epsilon(1e-12));
  CHECK(nc.rms == doctest::Approx(0.7).epsilon(1e-12));

  const auto s = synth([](double t) { return std::sin(kTwoPi * t); }, 40.0);
  const auto ns = norms(steady_window(s, 1.0, 20));
  CHECK(std::abs(ns.sup - 1.0) <= 1e-4);
  CHECK(std::abs(ns.mean_square - 0.5) <= 1e-6);
}

TEST_CASE("Fourier coefficients") {
  const auto c = synth([](double t) { return std::cos(kTwoPi * t); }, 40.0);
  const double f[] = {kTwoPi};
  const auto sc = fourier_at(steady_window(c, 1.0, 20), f);
  CHECK(std::abs(sc.cos_coeffs[0] - 1.0) <= 1e-4);
  CHECK(std::abs(sc.sin_coeffs[0]) <= 1e-4);

  const auto z = synth([](double) { return 0.0; }, 40.0);
  const auto g = harmonic_grid(1.0, 10);
  const auto sz = fourier_at(steady_window(z, 1.0, 20), g);
  for (double m : sz.magnitudes) CHECK(m == 0.0);

  // Mixed signal: DC, sine at 3 harmonics, cosine at 5.
  const auto mix = synth(
      [](double t) { return 0.25 + 0.5 * std::sin(3 * kTwoPi * t) - 2.0 * std::cos(5 * kTwoPi * t); },
      40.0);
  const auto sm = fourier_at(steady_window(mix, 1.0, 20), g);
  CHECK(sm.frequencies.size() == 11);
  CHECK(sm.magnitudes[0] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(sm.sin_coeffs[3] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sm.cos_coeffs[5] == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(sm.magnitudes[4] < 1e-9);
  CHECK(sm.max_magnitude() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("binned spectrum locates a tone") {
  const auto s = synth([](double t) { return 0.3 * std::sin(2 * kTwoPi * t); }, 40.0);
  const auto sp = dft_spectrum(steady_window(s, 1.0, 20), 101);
  CHECK(sp.frequencies.size() == 101);
  CHECK(sp.frequencies[1] == doctest::Approx(kTwoPi / 20.0));
  std::size_t peak = 0;
  for (std::size_t k = 0; k < sp.magnitudes.size(); ++k) {
    if (sp.magnitudes[k] > sp.magnitudes[peak]) peak = k;
  }
  CHECK(peak == 40);
  CHECK(sp.magnitudes[peak] == doctest::Approx(0.3).epsilon(1e-3));
}

TEST_CASE("sigma scaling check") {
  const auto t1 = sigma_scaling_check({{2, 1.2555}, {10, 0.400}, {40, 0.1181}});
  CHECK(t1.psi_hat == doctest::Approx(4.724));
  CHECK(t1.monotone_decay);
  const auto exact = sigma_scaling_check({{1, 3.0}, {3, 1.0}, {6, 0.5}});
  CHECK(exact.psi_hat == doctest::Approx(3.0));
  const auto flat = sigma_scaling_check({{1, 0.5}, {2, 0.5}, {4, 0.5}});
  CHECK_FALSE(flat.monotone_decay);
  CHECK_THROWS_AS(sigma_scaling_check({{1, 1.0}, {2, 0.5}}), std::invalid_argument);
}

TEST_CASE("random noisy window") {
  const auto tr = synth([](double t) { return t; }, 150.0);
  const auto a = random_period_window(tr, 1.0, 30.0, 5);
  const auto b = random_period_window(tr, 1.0, 30.0, 5);
  CHECK(a.first == b.first);
  CHECK(a.t_start() >= 120.0 - 1e-9);
  CHECK(a.t_end() <= 150.0 + 1e-9);
  CHECK(a.t_end() - a.t_start() == doctest::Approx(1.0));
}

TEST_CASE("closed-loop steady state on the example plant") {
  Scenario s = example_scenario(2);
  const auto tr = run(make_plant(s), make_controller(s), s.sim, s.noise);
  const auto w = steady_window(tr, 1.0, 20);
  CHECK(periodicity_residual(w) < 1e-4);
  const auto sp = fourier_at(w, harmonic_grid(1.0, 10));
  for (int k : {0, 1, 2}) CHECK(sp.magnitudes[k] < 1e-4 * sp.max_magnitude());

  const auto hg = high_gain_scenario(10.0);
  const auto th = run(make_plant(hg), make_controller(hg), hg.sim, hg.noise);
  const auto nh = norms(steady_window(th, 1.0, 20));
  CHECK(nh.sup == doctest::Approx(0.400).epsilon(0.10));
  CHECK(nh.rms == doctest::Approx(0.2166).epsilon(0.10));
}

TEST_CASE("norms and spectrum CSV") {
  NormsRecord r;
  r.scenario = "a";
  r.sigma = 2;
  r.norms = {1.5, 0.25, 0.5};
  std::ostringstream os;
  write_norms_csv(os, std::span(&r, 1));
  CHECK(os.str() == "scenario,sigma,mu,n_o,omega_hat,sup,inf_l2,noisy\na,2,0,-1,0,1.5,0.5,0\n");
  HarmonicSpectrum sp{{0.0, 1.0}, {0.1, 0.2}, {0.0, 0.3}, {0.1, 0.5}};
  std::ostringstream o2;
  write_spectrum_csv(o2, sp);
  CHECK(o2.str() == "freq_rad_s,cos,sin,magnitude\n0,0.10000000000000001,0,0.10000000000000001\n"
                    "1,0.20000000000000001,0.29999999999999999,0.5\n");
}

}  // TEST_SUITE
