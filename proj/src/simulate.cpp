#include "imreg/simulate.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "imreg/csv.hpp"

namespace imreg {

Controller Controller::high_gain(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  Controller c;
  c.kind_ = Kind::HighGain;
  c.sigma_ = sigma;
  return c;
}

Controller Controller::internal_model(const RegulatorConfig& config) {
  Controller c;
  c.kind_ = Kind::InternalModel;
  c.sigma_ = config.sigma;
  c.config_ = config;
  c.bank_ = build_bank(config);
  return c;
}

double Controller::output(std::span<const double> z, double e, double v) const {
  if (kind_ == Kind::HighGain) return -sigma_ * (e + v);
  // The stabilizing term sees the clean e; the forwarding term sees e + v.
  return -sigma_ * e +
         config_.mu * (bank_.weighted_output(z) - bank_.weighted_norm() * (e + v));
}

void Controller::rhs(std::span<const double> z, double e, double v,
                     std::span<double> dz) const {
  if (kind_ == Kind::InternalModel) bank_.rhs(z, e + v, dz);
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= dt)) throw std::invalid_argument("t_end must be at least dt");
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
}

Biquad Biquad::tustin(double n2, double n1, double n0, double d2, double d1,
                      double d0, double dt) {
  const double k = 2.0 / dt;
  const double k2 = k * k;
  const double nb0 = n2 * k2 + n1 * k + n0;
  const double nb1 = -2.0 * n2 * k2 + 2.0 * n0;
  const double nb2 = n2 * k2 - n1 * k + n0;
  const double da0 = d2 * k2 + d1 * k + d0;
  const double da1 = -2.0 * d2 * k2 + 2.0 * d0;
  const double da2 = d2 * k2 - d1 * k + d0;
  return Biquad(nb0 / da0, nb1 / da0, nb2 / da0, da1 / da0, da2 / da0);
}

double Biquad::process(double x) {
  const double y = b0_ * x + s1_;
  s1_ = b1_ * x - a1_ * y + s2_;
  s2_ = b2_ * x - a2_ * y;
  return y;
}

Biquad measurement_noise_filter(double dt) {
  return Biquad::tustin(1.0, 0.0, 0.0, 1.0, 3.0, 2.0, dt);
}

NoiseSource::NoiseSource(double power, double dt, std::uint64_t seed)
    : stddev_(power > 0.0 ? std::sqrt(power / dt) : 0.0),
      rng_(seed),
      filter_(measurement_noise_filter(dt)) {
  if (power < 0.0) throw std::invalid_argument("noise power must be non-negative");
}

double NoiseSource::next() {
  if (stddev_ == 0.0) return 0.0;
  return filter_.process(stddev_ * normal_(rng_));
}

std::vector<double> make_noise(double power, double dt, std::size_t steps,
                               std::uint64_t seed) {
  NoiseSource src(power, dt, seed);
  std::vector<double> v(steps);
  for (auto& s : v) s = src.next();
  return v;
}

namespace {

/// Closed-loop RK4 kernel on the packed vector y = (x, e, z).
class LoopIntegrator {
 public:
  LoopIntegrator(const PlantModel& plant, const Controller& controller)
      : plant_(plant),
        ctrl_(controller),
        n_(plant.n),
        nz_(controller.state_dim()),
        size_(static_cast<std::size_t>(n_ + 1 + nz_)),
        k1_(size_), k2_(size_), k3_(size_), k4_(size_), tmp_(size_) {}

  std::size_t size() const { return size_; }

  std::span<const double> x(std::span<const double> y) const {
    return y.first(static_cast<std::size_t>(n_));
  }
  std::span<const double> z(std::span<const double> y) const {
    return y.subspan(static_cast<std::size_t>(n_ + 1));
  }

  double control(std::span<const double> y, double v) const {
    return ctrl_.output(z(y), y[n_], v);
  }

  void derivative(double t, std::span<const double> y, double v,
                  std::span<double> dy) const {
    const double e = y[n_];
    const auto xs = x(y);
    if (n_ > 0) plant_.f(t, xs, e, dy.first(static_cast<std::size_t>(n_)));
    dy[n_] = plant_.q(t, xs, e) + ctrl_.output(z(y), e, v);
    if (nz_ > 0) ctrl_.rhs(z(y), e, v, dy.subspan(static_cast<std::size_t>(n_ + 1)));
  }

  void step(double t, double dt, double v, std::span<double> y) {
    const double h2 = 0.5 * dt;
    derivative(t, y, v, k1_);
    for (std::size_t i = 0; i < size_; ++i) tmp_[i] = y[i] + h2 * k1_[i];
    derivative(t + h2, tmp_, v, k2_);
    for (std::size_t i = 0; i < size_; ++i) tmp_[i] = y[i] + h2 * k2_[i];
    derivative(t + h2, tmp_, v, k3_);
    for (std::size_t i = 0; i < size_; ++i) tmp_[i] = y[i] + dt * k3_[i];
    derivative(t + dt, tmp_, v, k4_);
    const double h6 = dt / 6.0;
    for (std::size_t i = 0; i < size_; ++i) {
      y[i] += h6 * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
    }
    for (std::size_t i = 0; i < size_; ++i) {
      if (!(std::abs(y[i]) <= kOverflowThreshold)) {
        std::ostringstream msg;
        msg << "state component " << i << " overflowed (" << y[i] << ") at t = "
            << csv::fmt(t + dt);
        throw SimulationOverflow(t + dt, msg.str());
      }
    }
  }

 private:
  const PlantModel& plant_;
  const Controller& ctrl_;
  int n_;
  int nz_;
  std::size_t size_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

std::vector<double> pack(const PlantModel& plant, const Controller& ctrl,
                         std::span<const double> x, double e,
                         std::span<const double> z) {
  if (static_cast<int>(x.size()) != plant.n) {
    throw std::invalid_argument("initial plant state has dimension " +
                                std::to_string(x.size()) + ", plant expects " +
                                std::to_string(plant.n));
  }
  if (!z.empty() && static_cast<int>(z.size()) != ctrl.state_dim()) {
    throw std::invalid_argument("initial controller state has dimension " +
                                std::to_string(z.size()) + ", expected " +
                                std::to_string(ctrl.state_dim()));
  }
  std::vector<double> y(x.begin(), x.end());
  y.push_back(e);
  if (z.empty()) {
    y.resize(y.size() + static_cast<std::size_t>(ctrl.state_dim()), 0.0);
  } else {
    y.insert(y.end(), z.begin(), z.end());
  }
  for (double s : y) {
    if (!std::isfinite(s)) throw std::invalid_argument("non-finite initial state");
  }
  return y;
}

}  // namespace

LoopState step_rk4(const PlantModel& plant, const Controller& controller,
                   const LoopState& state, double dt, double v) {
  LoopIntegrator integ(plant, controller);
  auto y = pack(plant, controller, state.x, state.e, state.z);
  integ.step(state.t, dt, v, y);
  LoopState out;
  out.t = state.t + dt;
  out.x.assign(y.begin(), y.begin() + plant.n);
  out.e = y[static_cast<std::size_t>(plant.n)];
  out.z.assign(y.begin() + plant.n + 1, y.end());
  return out;
}

Trajectory run(const PlantModel& plant, const Controller& controller,
               const SimConfig& sim, const NoiseModel& noise) {
  sim.validate();
  LoopIntegrator integ(plant, controller);
  auto y = pack(plant, controller, sim.x0, sim.e0, sim.z0);

  const auto steps = static_cast<std::size_t>(std::llround(sim.t_end / sim.dt));
  const auto stride = static_cast<std::size_t>(sim.record_stride);
  const std::size_t samples = steps / stride + 1;

  Trajectory tr;
  tr.n = plant.n;
  tr.nz = controller.state_dim();
  tr.sample_dt = sim.dt * static_cast<double>(stride);
  tr.times.reserve(samples);
  tr.e.reserve(samples);
  tr.u.reserve(samples);
  tr.v.reserve(samples);
  tr.x.reserve(samples * static_cast<std::size_t>(tr.n));
  tr.z.reserve(samples * static_cast<std::size_t>(tr.nz));

  NoiseSource src(noise.enabled ? noise.power : 0.0, sim.dt, sim.seed);

  auto record = [&](double t, double v) {
    tr.times.push_back(t);
    tr.e.push_back(y[static_cast<std::size_t>(plant.n)]);
    tr.u.push_back(integ.control(y, v));
    tr.v.push_back(v);
    tr.x.insert(tr.x.end(), y.begin(), y.begin() + plant.n);
    tr.z.insert(tr.z.end(), y.begin() + plant.n + 1, y.end());
  };

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * sim.dt;
    const double v = src.next();
    if (k % stride == 0) record(t, v);
    integ.step(t, sim.dt, v, y);
  }
  if (steps % stride == 0) record(static_cast<double>(steps) * sim.dt, src.next());
  return tr;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,e,u,v";
  for (int i = 0; i < traj.n; ++i) os << ",x" << (i + 1);
  for (int i = 0; i < traj.nz; ++i) os << ",z" << (i + 1);
  os << '\n';
  std::vector<double> row;
  for (std::size_t s = 0; s < traj.size(); ++s) {
    row.assign({traj.times[s], traj.e[s], traj.u[s], traj.v[s]});
    for (int i = 0; i < traj.n; ++i) row.push_back(traj.x_at(s, i));
    for (int i = 0; i < traj.nz; ++i) row.push_back(traj.z_at(s, i));
    csv::write_row(os, row);
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty trajectory file");
  const auto header = csv::split(line);
  if (header.size() < 4 || header[0] != "t" || header[1] != "e" || header[2] != "u" ||
      header[3] != "v") {
    throw std::invalid_argument("trajectory header must start with t,e,u,v");
  }
  Trajectory tr;
  for (std::size_t i = 4; i < header.size(); ++i) {
    if (!header[i].empty() && header[i][0] == 'x') {
      ++tr.n;
    } else if (!header[i].empty() && header[i][0] == 'z') {
      ++tr.nz;
    } else {
      throw std::invalid_argument("unexpected trajectory column '" + header[i] + "'");
    }
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = csv::split(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("row " + std::to_string(lineno) + " has " +
                                  std::to_string(cells.size()) + " cells");
    }
    tr.times.push_back(csv::parse_double(cells[0]));
    tr.e.push_back(csv::parse_double(cells[1]));
    tr.u.push_back(csv::parse_double(cells[2]));
    tr.v.push_back(csv::parse_double(cells[3]));
    for (int i = 0; i < tr.n; ++i) tr.x.push_back(csv::parse_double(cells[4 + i]));
    for (int i = 0; i < tr.nz; ++i) {
      tr.z.push_back(csv::parse_double(cells[4 + tr.n + i]));
    }
  }
  if (tr.times.size() >= 2) {
    tr.sample_dt = (tr.times.back() - tr.times.front()) /
                   static_cast<double>(tr.times.size() - 1);
  }
  return tr;
}

}  // namespace imreg
