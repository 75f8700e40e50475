#include "imreg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "imreg/csv.hpp"

namespace imreg {

namespace {

std::size_t samples_per_period(const Trajectory& traj, double period) {
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  if (traj.size() < 2 || !(traj.sample_dt > 0.0)) {
    throw TrajectoryTooShort("trajectory too short: fewer than two samples");
  }
  const double ratio = period / traj.sample_dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * rounded) {
    throw std::invalid_argument("period is not a whole number of record intervals");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

SteadyWindow steady_window(const Trajectory& traj, double period, int n_periods,
                           double settle_fraction) {
  if (n_periods < 1) throw std::invalid_argument("n_periods must be >= 1");
  const std::size_t spp = samples_per_period(traj, period);
  const std::size_t span = spp * static_cast<std::size_t>(n_periods);
  const std::size_t last = traj.size() - 1;
  if (span > last) {
    throw TrajectoryTooShort("trajectory too short: need " +
                             std::to_string(n_periods) + " periods, have " +
                             csv::fmt(traj.times.back() - traj.times.front()) + " s");
  }
  const std::size_t first = last - span;
  const double settle = traj.times.front() +
                        settle_fraction * (traj.times.back() - traj.times.front());
  if (traj.times[first] < settle - 1e-9 * traj.sample_dt) {
    throw TrajectoryTooShort("trajectory too short: steady window starts at " +
                             csv::fmt(traj.times[first]) + " s, before settling time " +
                             csv::fmt(settle) + " s");
  }
  return SteadyWindow{&traj, period, n_periods, first, spp};
}

SteadyWindow random_period_window(const Trajectory& traj, double period,
                                  double tail_span, std::uint64_t seed) {
  const std::size_t spp = samples_per_period(traj, period);
  const std::size_t last = traj.size() - 1;
  const auto tail = static_cast<std::size_t>(std::llround(tail_span / traj.sample_dt));
  if (tail < spp || tail > last) {
    throw TrajectoryTooShort("trajectory too short for a random period in the last " +
                             csv::fmt(tail_span) + " s");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(last - tail, last - spp);
  return SteadyWindow{&traj, period, 1, pick(rng), spp};
}

Norms norms(const SteadyWindow& w) {
  const auto e = w.e();
  Norms out;
  for (double v : e) out.sup = std::max(out.sup, std::abs(v));
  const double h = w.traj->sample_dt;
  double acc = 0.0;
  for (int p = 0; p < w.n_periods; ++p) {
    const std::size_t a = static_cast<std::size_t>(p) * w.samples_per_period;
    const std::size_t b = a + w.samples_per_period;
    double s = 0.5 * (e[a] * e[a] + e[b] * e[b]);
    for (std::size_t i = a + 1; i < b; ++i) s += e[i] * e[i];
    acc += s * h / w.period;
  }
  out.mean_square = acc / w.n_periods;
  out.rms = std::sqrt(out.mean_square);
  return out;
}

double periodicity_residual(const SteadyWindow& w) {
  const auto e = w.e();
  double r = 0.0;
  for (std::size_t i = w.samples_per_period; i < e.size(); ++i) {
    r = std::max(r, std::abs(e[i] - e[i - w.samples_per_period]));
  }
  return r;
}

double HarmonicSpectrum::max_magnitude() const {
  double m = 0.0;
  for (double v : magnitudes) m = std::max(m, v);
  return m;
}

HarmonicSpectrum fourier_at(const SteadyWindow& w, std::span<const double> freqs) {
  const auto e = w.e();
  const auto t = w.t();
  const double h = w.traj->sample_dt;
  const double width = h * static_cast<double>(e.size() - 1);
  HarmonicSpectrum s;
  for (double omega : freqs) {
    if (!std::isfinite(omega)) throw std::invalid_argument("non-finite frequency");
    double c = 0.0, sn = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double wgt = (i == 0 || i + 1 == e.size()) ? 0.5 : 1.0;
      c += wgt * e[i] * std::cos(omega * t[i]);
      sn += wgt * e[i] * std::sin(omega * t[i]);
    }
    const double scale = (omega == 0.0 ? 1.0 : 2.0) * h / width;
    c *= scale;
    sn *= scale;
    s.frequencies.push_back(omega);
    s.cos_coeffs.push_back(c);
    s.sin_coeffs.push_back(sn);
    s.magnitudes.push_back(std::hypot(c, sn));
  }
  return s;
}

std::vector<double> harmonic_grid(double period, int max_harmonic) {
  std::vector<double> f;
  for (int k = 0; k <= max_harmonic; ++k) {
    f.push_back(2.0 * std::numbers::pi * k / period);
  }
  return f;
}

HarmonicSpectrum dft_spectrum(const SteadyWindow& w, std::size_t bins) {
  const auto e = w.e();
  const std::size_t n = e.size() - 1;  // last sample repeats the first period
  const double h = w.traj->sample_dt;
  const double base = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
  HarmonicSpectrum s;
  bins = std::min(bins, n / 2 + 1);
  for (std::size_t k = 0; k < bins; ++k) {
    const std::complex<double> step =
        std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    std::complex<double> rot(1.0, 0.0), acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      acc += e[i] * rot;
      rot *= step;
      if ((i & 1023u) == 1023u) rot /= std::abs(rot);
    }
    const double scale = (k == 0 ? 1.0 : 2.0) / static_cast<double>(n);
    s.frequencies.push_back(base * static_cast<double>(k));
    s.cos_coeffs.push_back(scale * acc.real());
    s.sin_coeffs.push_back(-scale * acc.imag());
    s.magnitudes.push_back(scale * std::abs(acc));
  }
  return s;
}

SigmaScaling sigma_scaling_check(std::vector<SigmaPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const SigmaPoint& a, const SigmaPoint& b) { return a.sigma < b.sigma; });
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i == 0 || points[i].sigma != points[i - 1].sigma) ++distinct;
  }
  if (distinct < 3) {
    throw std::invalid_argument("sigma scaling needs at least 3 distinct sigma values");
  }
  SigmaScaling out;
  out.monotone_decay = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.psi_hat = std::max(out.psi_hat, points[i].sigma * points[i].sup);
    if (i > 0 && points[i].sigma > points[i - 1].sigma &&
        !(points[i].sup < points[i - 1].sup)) {
      out.monotone_decay = false;
    }
  }
  return out;
}

void write_spectrum_csv(std::ostream& os, const HarmonicSpectrum& s) {
  os << "freq_rad_s,cos,sin,magnitude\n";
  for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
    csv::write_row(os, {s.frequencies[i], s.cos_coeffs[i], s.sin_coeffs[i],
                        s.magnitudes[i]});
  }
}

void write_norms_csv(std::ostream& os, std::span<const NormsRecord> rows) {
  os << "scenario,sigma,mu,n_o,omega_hat,sup,inf_l2,noisy\n";
  for (const auto& r : rows) {
    os << r.scenario << ',' << csv::fmt(r.sigma) << ',' << csv::fmt(r.mu) << ','
       << r.n_o << ',' << csv::fmt(r.omega_hat) << ',' << csv::fmt(r.norms.sup) << ','
       << csv::fmt(r.norms.rms) << ',' << (r.noisy ? 1 : 0) << '\n';
  }
}

}  // namespace imreg
