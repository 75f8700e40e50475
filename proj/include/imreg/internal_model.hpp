#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace imreg {

enum class TailRule { CanonicalEpsilon, Explicit };

/// Oscillator weights n_z0, n_z1, ..., n_z(n_o).
///
/// Canonical sequences use n_z0 = 2 and n_zl = 1 / l^(1+eps). Explicit lists
/// are checked for strict decrease and the two weighted monotonicity
/// conditions by RegulatorConfig::validate. Summability of the infinite tail
/// cannot be checked from a finite prefix and is left to the caller.
class CoefficientSequence {
 public:
  static CoefficientSequence canonical(int n_o, double epsilon = 0.5,
                                       double n_z0 = 2.0);
  static CoefficientSequence explicit_values(std::vector<double> values);

  TailRule rule() const { return rule_; }
  double epsilon() const { return epsilon_; }
  std::size_t size() const { return values_.size(); }
  int n_o() const { return static_cast<int>(values_.size()) - 1; }
  std::span<const double> values() const { return values_; }

  double operator[](std::size_t l) const { return values_[l]; }

  /// Weight at index l. Canonical sequences extend past the stored prefix;
  /// explicit ones throw std::out_of_range.
  double at(std::size_t l) const;

  /// n_z0 + n_z1 + ... + n_z(n_o).
  double partial_sum() const;

  bool operator==(const CoefficientSequence&) const = default;

 private:
  CoefficientSequence(TailRule rule, double epsilon, std::vector<double> values)
      : rule_(rule), epsilon_(epsilon), values_(std::move(values)) {}

  TailRule rule_ = TailRule::Explicit;
  double epsilon_ = 0.0;
  std::vector<double> values_;
};

/// n_zl = 1 / l^(1+eps) for l >= 1.
double canonical_weight(std::size_t l, double epsilon);

enum class SequenceCondition {
  Positive,         // n_zl > 0
  StrictDecrease,   // n_z(l+1) < n_zl
  WeightedDecrease, // l n_zl <= m n_zm for 0 < m <= l
  SquareIncrease,   // l^2 n_zl <= m^2 n_zm for 0 <= l <= m
};

const char* to_string(SequenceCondition c);

struct SequenceViolation {
  SequenceCondition condition;
  std::size_t l;
  std::size_t m;
};

/// Checks the finite prefix. The two weighted conditions are transitive, so
/// only neighbouring pairs are compared; the weighted comparisons carry a
/// 1e-12 relative slack so that sequences sitting on the boundary (l^2 n_zl
/// constant) are not rejected for rounding.
std::vector<SequenceViolation> sequence_violations(std::span<const double> values);

struct RegulatorConfig {
  int n_o = 0;
  double sigma = 2.0;
  double mu = 1.0;
  double omega_hat = 6.283185307179586;
  CoefficientSequence coefficients = CoefficientSequence::canonical(0);
  /// Replaces omega_l = l * omega_hat when set (one entry per oscillator).
  std::optional<std::vector<double>> frequency_override;

  static RegulatorConfig canonical(int n_o, double sigma, double mu,
                                   double omega_hat, double epsilon = 0.5);

  /// omega_1..omega_{n_o}.
  std::vector<double> frequencies() const;

  /// Throws std::invalid_argument on non-positive gains, a coefficient list of
  /// the wrong length, or a coefficient list violating the sequence
  /// conditions.
  void validate() const;

  bool operator==(const RegulatorConfig&) const = default;
};

/// Constant matrices of the internal-model unit.
///
/// Slot 0 is the integrator, oscillator l occupies slots 2l-1 and 2l. Phi is
/// kept in block form (one frequency per oscillator); dense copies are only
/// materialized on request.
class OscillatorBank {
 public:
  int n_o() const { return n_o_; }
  int dim() const { return 2 * n_o_ + 1; }
  double sigma() const { return sigma_; }

  std::span<const double> omegas() const { return omegas_; }
  std::span<const double> n_z() const { return n_z_; }
  std::span<const double> m_vec() const { return m_; }
  std::span<const double> gamma() const { return gamma_; }

  /// M^T N_z M.
  double weighted_norm() const { return m_weighted_norm_; }

  /// out = Phi z + Gamma e. No allocation, O(n_o).
  void rhs(std::span<const double> z, double e, std::span<double> out) const;

  /// M^T N_z z.
  double weighted_output(std::span<const double> z) const;

  Eigen::MatrixXd phi_dense() const;
  Eigen::MatrixXd n_z_dense() const;
  Eigen::VectorXd m_dense() const;
  Eigen::VectorXd gamma_dense() const;

 private:
  friend OscillatorBank build_bank_unchecked(const RegulatorConfig& config);

  int n_o_ = 0;
  double sigma_ = 0.0;
  std::vector<double> omegas_;
  std::vector<double> n_z_;
  std::vector<double> m_;
  std::vector<double> gamma_;
  double m_weighted_norm_ = 0.0;
};

OscillatorBank build_bank(const RegulatorConfig& config);

/// Builds the matrices without validating gains or the sequence conditions.
/// Only the coefficient count and frequency count must match n_o. Meant for
/// diagnostics on configurations that build_bank would reject.
OscillatorBank build_bank_unchecked(const RegulatorConfig& config);

/// Phi z + Gamma e.
std::vector<double> controller_rhs(const OscillatorBank& bank,
                                   std::span<const double> z, double e);

/// u = -sigma e + mu M^T N_z (z - M e).
double control_output(const OscillatorBank& bank, const RegulatorConfig& config,
                      std::span<const double> z, double e);

/// zeta = z - M e.
std::vector<double> zeta_coordinates(const OscillatorBank& bank,
                                     std::span<const double> z, double e);

}  // namespace imreg
