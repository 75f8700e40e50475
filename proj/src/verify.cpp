#include "imreg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "imreg/csv.hpp"

namespace imreg {

namespace {

constexpr double kRankTol = 1e-8;
constexpr double kHurwitzMargin = -1e-12;
constexpr double kIdentityTol = 1e-12;

double phi_scale(const OscillatorBank& bank) {
  double s = 1.0;
  for (double w : bank.omegas()) s = std::max(s, std::abs(w));
  return s;
}

}  // namespace

int observability_rank(const OscillatorBank& bank) {
  const int d = bank.dim();
  const Eigen::MatrixXd phi_t = bank.phi_dense().transpose();
  Eigen::VectorXd c = bank.n_z_dense() * bank.m_dense();
  const double tol = kRankTol * phi_scale(bank);

  Eigen::MatrixXd basis(d, d);
  const double c_norm = c.norm();
  if (!(c_norm > 0.0)) return 0;
  basis.col(0) = c / c_norm;
  int rank = 1;
  while (rank < d) {
    Eigen::VectorXd w = phi_t * basis.col(rank - 1);
    // Two passes of Gram-Schmidt keep the basis orthonormal to working
    // precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < rank; ++j) w -= basis.col(j).dot(w) * basis.col(j);
    }
    const double h = w.norm();
    if (!(h > tol)) break;
    basis.col(rank) = w / h;
    ++rank;
  }
  return rank;
}

bool check_observability(const OscillatorBank& bank) {
  return observability_rank(bank) == bank.dim();
}

Eigen::MatrixXd observability_matrix(const OscillatorBank& bank) {
  const int d = bank.dim();
  const Eigen::MatrixXd phi = bank.phi_dense() / phi_scale(bank);
  Eigen::MatrixXd obs(d, d);
  Eigen::RowVectorXd row = bank.m_dense().transpose() * bank.n_z_dense();
  for (int k = 0; k < d; ++k) {
    obs.row(k) = row;
    row = row * phi;
  }
  return obs;
}

int svd_rank(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0.0)) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++r;
  }
  return r;
}

Eigen::MatrixXd zeta_state_matrix(const OscillatorBank& bank, double mu) {
  const Eigen::VectorXd m = bank.m_dense();
  return bank.phi_dense() - mu * m * (m.transpose() * bank.n_z_dense());
}

HurwitzResult check_hurwitz(const OscillatorBank& bank, double mu) {
  const Eigen::MatrixXd a = zeta_state_matrix(bank, mu);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue computation did not converge");
  }
  HurwitzResult r;
  r.worst_real_part = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    r.worst_real_part = std::max(r.worst_real_part, es.eigenvalues()(i).real());
  }
  r.hurwitz = r.worst_real_part < kHurwitzMargin;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  r.marginal = std::abs(r.worst_real_part) <= 1e-9 * scale;
  return r;
}

std::vector<SequenceViolation> check_sequence(std::span<const double> coeffs) {
  return sequence_violations(coeffs);
}

bool CertificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

CertificationReport certify(const RegulatorConfig& config) {
  CertificationReport rep;
  auto add = [&rep](std::string name, bool pass, std::string detail) {
    rep.checks.push_back({std::move(name), pass, std::move(detail)});
  };

  {
    std::ostringstream d;
    d << "sigma=" << csv::fmt(config.sigma) << " mu=" << csv::fmt(config.mu)
      << " omega_hat=" << csv::fmt(config.omega_hat);
    const bool ok = config.sigma > 0.0 && config.mu > 0.0 && config.omega_hat > 0.0 &&
                    config.n_o >= 0;
    add("gains_positive", ok, d.str());
  }

  const bool length_ok =
      config.n_o >= 0 &&
      config.coefficients.size() == static_cast<std::size_t>(config.n_o) + 1 &&
      config.frequencies().size() == static_cast<std::size_t>(config.n_o);
  add("dimensions", length_ok,
      std::to_string(config.coefficients.size()) + " coefficients for n_o=" +
          std::to_string(config.n_o));

  rep.sequence_violations = check_sequence(config.coefficients.values());
  {
    std::ostringstream d;
    if (rep.sequence_violations.empty()) {
      d << "no violations over " << config.coefficients.size() << " entries";
    } else {
      for (std::size_t i = 0; i < rep.sequence_violations.size(); ++i) {
        const auto& v = rep.sequence_violations[i];
        if (i) d << "; ";
        d << to_string(v.condition) << " (" << v.l << "," << v.m << ")";
      }
    }
    add("sequence_conditions", rep.sequence_violations.empty(), d.str());
  }

  if (!length_ok) {
    add("structure", false, "skipped: dimensions do not match");
    return rep;
  }

  const OscillatorBank bank = build_bank_unchecked(config);
  const Eigen::MatrixXd phi = bank.phi_dense();
  const Eigen::MatrixXd nz = bank.n_z_dense();
  const Eigen::VectorXd m = bank.m_dense();
  const double scale = std::max(1.0, phi_scale(bank) + std::abs(config.sigma));

  {
    const Eigen::VectorXd g = bank.gamma_dense() +
                              (phi + config.sigma * Eigen::MatrixXd::Identity(
                                                        bank.dim(), bank.dim())) * m;
    const double err = g.cwiseAbs().maxCoeff();
    add("gamma_identity", err <= kIdentityTol * scale, "max residual " + csv::fmt(err));
  }
  {
    const double err = (nz * phi + phi.transpose() * nz).cwiseAbs().maxCoeff();
    add("skew_identity", err <= kIdentityTol, "max residual " + csv::fmt(err));
  }
  {
    const double mnm = m.dot(nz * m);
    const double tr = zeta_state_matrix(bank, config.mu).trace();
    const double err = std::abs(tr + config.mu * mnm);
    add("trace_identity", err <= kIdentityTol * std::max(1.0, std::abs(tr)),
        "trace=" + csv::fmt(tr) + " -mu*MtNzM=" + csv::fmt(-config.mu * mnm));
  }
  {
    const int r = observability_rank(bank);
    add("observability", r == bank.dim(),
        "rank " + std::to_string(r) + " of " + std::to_string(bank.dim()));
  }
  {
    const auto h = check_hurwitz(bank, config.mu);
    rep.worst_eig_real = h.worst_real_part;
    std::string detail = "worst real part " + csv::fmt(h.worst_real_part);
    if (h.marginal) detail += " (marginal)";
    add("hurwitz", h.hurwitz, detail);
  }
  return rep;
}

void write_report_text(std::ostream& os, const CertificationReport& report) {
  for (const auto& c : report.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  os << (report.passed() ? "certified" : "not certified") << '\n';
}

void write_report_csv(std::ostream& os, const CertificationReport& report) {
  os << "check,pass,detail\n";
  for (const auto& c : report.checks) {
    std::string detail = c.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    os << c.name << ',' << (c.pass ? 1 : 0) << ',' << detail << '\n';
  }
}

}  // namespace imreg
