#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imreg/internal_model.hpp"

namespace imreg {

/// Rank of the observability matrix of (Phi, M^T N_z).
///
/// The stacked rows C, C Phi, ..., C Phi^(2 n_o) span the Krylov space of
/// (Phi^T, N_z M). That space is built with an orthonormal (Arnoldi) basis and
/// the rank is the number of directions whose new component exceeds
/// 1e-8 * max(|Phi|, 1) relative to the current vector; powering Phi directly
/// overflows and loses all rank information beyond a handful of oscillators.
int observability_rank(const OscillatorBank& bank);

bool check_observability(const OscillatorBank& bank);

/// Raw stacked observability matrix with Phi scaled by 1 / max(omega, 1).
/// Only useful for small banks.
Eigen::MatrixXd observability_matrix(const OscillatorBank& bank);

/// Numerical rank via singular values above 1e-8 * sigma_max.
int svd_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-8);

struct HurwitzResult {
  bool hurwitz = false;           // every real part < -1e-12
  double worst_real_part = 0.0;
  bool marginal = false;          // |worst real part| <= 1e-9 * scale
};

/// Eigenvalues of Phi - mu M M^T N_z.
HurwitzResult check_hurwitz(const OscillatorBank& bank, double mu);

Eigen::MatrixXd zeta_state_matrix(const OscillatorBank& bank, double mu);

std::vector<SequenceViolation> check_sequence(std::span<const double> coeffs);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CertificationReport {
  std::vector<Check> checks;
  double worst_eig_real = 0.0;
  std::vector<SequenceViolation> sequence_violations;

  bool passed() const;
};

/// Runs every structural check on a configuration. Unlike build_bank this does
/// not throw on bad gains or sequences: they show up as failed checks.
CertificationReport certify(const RegulatorConfig& config);

void write_report_text(std::ostream& os, const CertificationReport& report);
/// check,pass,detail
void write_report_csv(std::ostream& os, const CertificationReport& report);

}  // namespace imreg
