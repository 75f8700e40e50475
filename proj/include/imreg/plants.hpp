#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace imreg {

/// x' = f(t, x, e), e' = q(t, x, e) + u, with f and q periodic in t.
///
/// f writes into `dx` (same length as x). Both maps must be free of shared
/// mutable state so that one model can be evaluated from several threads.
struct PlantModel {
  using DriftX = std::function<void(double t, std::span<const double> x, double e,
                                    std::span<double> dx)>;
  using DriftE = std::function<double(double t, std::span<const double> x, double e)>;

  int n = 0;
  double period = 1.0;
  DriftX f;
  DriftE q;

  std::vector<double> eval_f(double t, std::span<const double> x, double e) const;
};

/// The two-state example with x2^2 instability away from the origin and a
/// forcing made of harmonics of 2 pi t (period 1).
PlantModel example_plant();

/// e' = u + q(t). No internal state.
PlantModel linear_test_plant(std::function<double(double)> q_signal,
                             double period = 1.0);

/// Relative-degree-r chain
///   chi' = f0(t, chi, xi_1),  xi_i' = xi_{i+1},  xi_r' = q0(t, chi, xi) + u
/// rewritten with e = xi_r + sum_i a_i xi_i and x = (chi, xi_1..xi_{r-1}).
struct NormalFormReduction {
  int r = 2;
  std::vector<double> a;  // a_1..a_{r-1}
  Eigen::MatrixXd A;      // (r-1) x (r-1)
  Eigen::VectorXd B;      // r-1
  Eigen::RowVectorXd C;   // 1 x (r-1)

  /// Throws std::invalid_argument unless r >= 2, a has r-1 entries and A is
  /// Hurwitz.
  static NormalFormReduction make(int r, std::vector<double> a);

  /// e = xi_r + sum a_i xi_i.
  double to_error(std::span<const double> xi) const;
  /// xi_r = e - sum a_i xi_i, given xi_1..xi_{r-1}.
  double from_error(std::span<const double> y, double e) const;
};

struct ChainModel {
  using DriftChi = std::function<void(double t, std::span<const double> chi, double xi1,
                                      std::span<double> dchi)>;
  using DriftXi = std::function<double(double t, std::span<const double> chi,
                                       std::span<const double> xi)>;
  int chi_dim = 0;
  double period = 1.0;
  DriftChi f0;  // may be empty when chi_dim == 0
  DriftXi q0;
};

PlantModel reduce_relative_degree(const ChainModel& chain, int r, std::vector<double> a);

}  // namespace imreg
