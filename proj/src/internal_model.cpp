#include "imreg/internal_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace imreg {

namespace {

constexpr double kWeightedSlack = 1e-12;

bool le_with_slack(double a, double b) {
  return a <= b + kWeightedSlack * std::max(std::abs(a), std::abs(b));
}

void require_dim(const OscillatorBank& bank, std::span<const double> z) {
  if (static_cast<int>(z.size()) != bank.dim()) {
    throw std::invalid_argument("controller state has dimension " +
                                std::to_string(z.size()) + ", bank expects " +
                                std::to_string(bank.dim()));
  }
}

}  // namespace

double canonical_weight(std::size_t l, double epsilon) {
  return 1.0 / std::pow(static_cast<double>(l), 1.0 + epsilon);
}

const char* to_string(SequenceCondition c) {
  switch (c) {
    case SequenceCondition::Positive:
      return "positive";
    case SequenceCondition::StrictDecrease:
      return "strict_decrease";
    case SequenceCondition::WeightedDecrease:
      return "weighted_decrease";
    case SequenceCondition::SquareIncrease:
      return "square_increase";
  }
  return "unknown";
}

std::vector<SequenceViolation> sequence_violations(std::span<const double> values) {
  std::vector<SequenceViolation> out;
  const std::size_t n = values.size();
  for (std::size_t l = 0; l < n; ++l) {
    if (!(values[l] > 0.0)) out.push_back({SequenceCondition::Positive, l, l});
  }
  for (std::size_t l = 0; l + 1 < n; ++l) {
    if (!(values[l + 1] < values[l])) {
      out.push_back({SequenceCondition::StrictDecrease, l + 1, l});
    }
  }
  // l n_zl non-increasing for l >= 1.
  for (std::size_t m = 1; m + 1 < n; ++m) {
    const double lhs = static_cast<double>(m + 1) * values[m + 1];
    const double rhs = static_cast<double>(m) * values[m];
    if (!le_with_slack(lhs, rhs)) {
      out.push_back({SequenceCondition::WeightedDecrease, m + 1, m});
    }
  }
  // l^2 n_zl non-decreasing for l >= 0.
  for (std::size_t l = 0; l + 1 < n; ++l) {
    const double a = static_cast<double>(l);
    const double b = static_cast<double>(l + 1);
    if (!le_with_slack(a * a * values[l], b * b * values[l + 1])) {
      out.push_back({SequenceCondition::SquareIncrease, l, l + 1});
    }
  }
  return out;
}

CoefficientSequence CoefficientSequence::canonical(int n_o, double epsilon,
                                                   double n_z0) {
  if (n_o < 0) throw std::invalid_argument("n_o must be non-negative");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1]");
  }
  if (!(n_z0 > 0.0)) throw std::invalid_argument("n_z0 must be positive");
  std::vector<double> v(static_cast<std::size_t>(n_o) + 1);
  v[0] = n_z0;
  for (std::size_t l = 1; l < v.size(); ++l) v[l] = canonical_weight(l, epsilon);
  return CoefficientSequence(TailRule::CanonicalEpsilon, epsilon, std::move(v));
}

CoefficientSequence CoefficientSequence::explicit_values(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("coefficient list is empty");
  return CoefficientSequence(TailRule::Explicit, 0.0, std::move(values));
}

double CoefficientSequence::at(std::size_t l) const {
  if (l < values_.size()) return values_[l];
  if (rule_ == TailRule::CanonicalEpsilon) return canonical_weight(l, epsilon_);
  throw std::out_of_range("explicit coefficient list has no entry " +
                          std::to_string(l));
}

double CoefficientSequence::partial_sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

RegulatorConfig RegulatorConfig::canonical(int n_o, double sigma, double mu,
                                           double omega_hat, double epsilon) {
  RegulatorConfig c;
  c.n_o = n_o;
  c.sigma = sigma;
  c.mu = mu;
  c.omega_hat = omega_hat;
  c.coefficients = CoefficientSequence::canonical(n_o, epsilon);
  return c;
}

std::vector<double> RegulatorConfig::frequencies() const {
  if (frequency_override) return *frequency_override;
  std::vector<double> w(static_cast<std::size_t>(std::max(n_o, 0)));
  for (std::size_t l = 0; l < w.size(); ++l) {
    w[l] = static_cast<double>(l + 1) * omega_hat;
  }
  return w;
}

void RegulatorConfig::validate() const {
  if (n_o < 0) throw std::invalid_argument("n_o must be non-negative");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sigma must be positive");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("mu must be positive");
  }
  if (!(omega_hat > 0.0) || !std::isfinite(omega_hat)) {
    throw std::invalid_argument("omega_hat must be positive");
  }
  if (coefficients.size() != static_cast<std::size_t>(n_o) + 1) {
    throw std::invalid_argument("coefficient list has " +
                                std::to_string(coefficients.size()) +
                                " entries, expected n_o + 1 = " +
                                std::to_string(n_o + 1));
  }
  const auto violations = sequence_violations(coefficients.values());
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw std::invalid_argument(std::string("coefficient sequence violates ") +
                                to_string(v.condition) + " at (" +
                                std::to_string(v.l) + ", " +
                                std::to_string(v.m) + ")");
  }
  if (frequency_override) {
    if (frequency_override->size() != static_cast<std::size_t>(n_o)) {
      throw std::invalid_argument("frequency override must list n_o entries");
    }
    for (double w : *frequency_override) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("oscillator frequencies must be positive");
      }
    }
  }
}

OscillatorBank build_bank(const RegulatorConfig& config) {
  config.validate();
  return build_bank_unchecked(config);
}

OscillatorBank build_bank_unchecked(const RegulatorConfig& config) {
  if (config.n_o < 0 ||
      config.coefficients.size() != static_cast<std::size_t>(config.n_o) + 1) {
    throw std::invalid_argument("coefficient list must have n_o + 1 entries");
  }
  if (config.frequencies().size() != static_cast<std::size_t>(config.n_o)) {
    throw std::invalid_argument("frequency override must list n_o entries");
  }
  OscillatorBank bank;
  bank.n_o_ = config.n_o;
  bank.sigma_ = config.sigma;
  bank.omegas_ = config.frequencies();
  const int dim = bank.dim();
  bank.n_z_.assign(dim, 0.0);
  bank.m_.assign(dim, 0.0);
  bank.gamma_.assign(dim, 0.0);

  bank.n_z_[0] = config.coefficients[0];
  bank.m_[0] = 1.0;
  for (int l = 1; l <= config.n_o; ++l) {
    bank.n_z_[2 * l - 1] = config.coefficients[l];
    bank.n_z_[2 * l] = config.coefficients[l];
    bank.m_[2 * l - 1] = 1.0;
  }
  // Gamma = -(Phi + sigma I) M. Phi M has -omega_l in the second slot of each
  // block (M's block is (1, 0)).
  bank.gamma_[0] = -config.sigma * bank.m_[0];
  for (int l = 1; l <= config.n_o; ++l) {
    const double w = bank.omegas_[l - 1];
    const double m1 = bank.m_[2 * l - 1];
    const double m2 = bank.m_[2 * l];
    bank.gamma_[2 * l - 1] = -(w * m2 + config.sigma * m1);
    bank.gamma_[2 * l] = -(-w * m1 + config.sigma * m2);
  }
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += bank.m_[i] * bank.n_z_[i] * bank.m_[i];
  bank.m_weighted_norm_ = s;
  return bank;
}

void OscillatorBank::rhs(std::span<const double> z, double e,
                         std::span<double> out) const {
  out[0] = gamma_[0] * e;
  for (int l = 1; l <= n_o_; ++l) {
    const double w = omegas_[l - 1];
    const int i = 2 * l - 1;
    out[i] = w * z[i + 1] + gamma_[i] * e;
    out[i + 1] = -w * z[i] + gamma_[i + 1] * e;
  }
}

double OscillatorBank::weighted_output(std::span<const double> z) const {
  // M is nonzero only at slot 0 and the first slot of each block.
  double s = n_z_[0] * z[0];
  for (int l = 1; l <= n_o_; ++l) s += n_z_[2 * l - 1] * z[2 * l - 1];
  return s;
}

Eigen::MatrixXd OscillatorBank::phi_dense() const {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(dim(), dim());
  for (int l = 1; l <= n_o_; ++l) {
    const int i = 2 * l - 1;
    phi(i, i + 1) = omegas_[l - 1];
    phi(i + 1, i) = -omegas_[l - 1];
  }
  return phi;
}

Eigen::MatrixXd OscillatorBank::n_z_dense() const {
  return Eigen::Map<const Eigen::VectorXd>(n_z_.data(), dim()).asDiagonal();
}

Eigen::VectorXd OscillatorBank::m_dense() const {
  return Eigen::Map<const Eigen::VectorXd>(m_.data(), dim());
}

Eigen::VectorXd OscillatorBank::gamma_dense() const {
  return Eigen::Map<const Eigen::VectorXd>(gamma_.data(), dim());
}

std::vector<double> controller_rhs(const OscillatorBank& bank,
                                   std::span<const double> z, double e) {
  require_dim(bank, z);
  std::vector<double> out(z.size());
  bank.rhs(z, e, out);
  return out;
}

double control_output(const OscillatorBank& bank, const RegulatorConfig& config,
                      std::span<const double> z, double e) {
  require_dim(bank, z);
  return -config.sigma * e +
         config.mu * (bank.weighted_output(z) - bank.weighted_norm() * e);
}

std::vector<double> zeta_coordinates(const OscillatorBank& bank,
                                     std::span<const double> z, double e) {
  require_dim(bank, z);
  std::vector<double> zeta(z.begin(), z.end());
  const auto m = bank.m_vec();
  for (std::size_t i = 0; i < zeta.size(); ++i) zeta[i] -= m[i] * e;
  return zeta;
}

}  // namespace imreg
