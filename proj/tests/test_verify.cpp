#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "imreg/verify.hpp"

using namespace imreg;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_SUITE("verify") {

TEST_CASE("observability") {
  const auto b0 = build_bank(RegulatorConfig::canonical(0, 2.0, 1.0, kTwoPi));
  CHECK(observability_rank(b0) == 1);
  CHECK(check_observability(b0));
  CHECK(check_observability(build_bank(RegulatorConfig::canonical(3, 2.0, 1.0, kTwoPi))));

  auto dup = RegulatorConfig::canonical(3, 2.0, 1.0, kTwoPi);
  dup.frequency_override = std::vector<double>{kTwoPi, kTwoPi, 3 * kTwoPi};
  const auto bd = build_bank(dup);
  CHECK_FALSE(check_observability(bd));
  CHECK(observability_rank(bd) == 5);
}

TEST_CASE("Krylov rank agrees with SVD of the stacked matrix on small banks") {
  for (int n_o = 0; n_o <= 6; ++n_o) {
    for (double w : {1.0, kTwoPi}) {
      const auto b = build_bank(RegulatorConfig::canonical(n_o, 2.0, 1.0, w));
      CHECK(svd_rank(observability_matrix(b)) == observability_rank(b));
    }
  }
  auto dup = RegulatorConfig::canonical(2, 2.0, 1.0, 1.0);
  dup.frequency_override = std::vector<double>{1.5, 1.5};
  const auto b = build_bank(dup);
  CHECK(svd_rank(observability_matrix(b)) == 3);
  CHECK(observability_rank(b) == 3);
}

TEST_CASE("Hurwitz") {
  const auto h0 = check_hurwitz(build_bank(RegulatorConfig::canonical(0, 2.0, 1.0, kTwoPi)), 1.0);
  CHECK(h0.hurwitz);
  CHECK(h0.worst_real_part == doctest::Approx(-2.0));
  CHECK(check_hurwitz(build_bank(RegulatorConfig::canonical(10, 2.0, 1.0, kTwoPi, 0.5)), 1.0).hurwitz);
  const auto hz = check_hurwitz(build_bank(RegulatorConfig::canonical(4, 2.0, 1.0, kTwoPi)), 0.0);
  CHECK_FALSE(hz.hurwitz);
  CHECK(hz.marginal);
}

TEST_CASE("sequence checks") {
  CHECK(check_sequence(CoefficientSequence::canonical(100, 0.5).values()).empty());
  CHECK(check_sequence(CoefficientSequence::canonical(100, 1.0).values()).empty());
  const std::vector<double> inc{1.0, 2.0};
  const auto v = check_sequence(inc);
  REQUIRE_FALSE(v.empty());
  CHECK(v.front().condition == SequenceCondition::StrictDecrease);
}

TEST_CASE("certification across random valid configs") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> un(0, 24);
  std::uniform_real_distribution<double> u(0.3, 4.0), ue(0.1, 1.0);
  for (int k = 0; k < 200; ++k) {
    const auto c = RegulatorConfig::canonical(un(rng), u(rng), u(rng), u(rng), ue(rng));
    const auto rep = certify(c);
    CHECK(rep.passed());
    CHECK(rep.worst_eig_real < 0.0);
  }
}

TEST_CASE("certification reports failures without throwing") {
  auto c = RegulatorConfig::canonical(3, 2.0, 0.0, kTwoPi);
  CertificationReport r;
  CHECK_NOTHROW(r = certify(c));
  CHECK_FALSE(r.passed());

  c = RegulatorConfig::canonical(2, 2.0, 1.0, kTwoPi);
  c.coefficients = CoefficientSequence::explicit_values({2.0, 0.5, 0.8});
  r = certify(c);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(r.sequence_violations.empty());

  c.coefficients = CoefficientSequence::explicit_values({2.0});
  r = certify(c);
  CHECK_FALSE(r.passed());

  std::ostringstream txt, csvs;
  write_report_text(txt, r);
  write_report_csv(csvs, r);
  CHECK(txt.str().find("not certified") != std::string::npos);
  CHECK(csvs.str().rfind("check,pass,detail\n", 0) == 0);
}

TEST_CASE("worst eigenvalue approaches the axis as oscillators are added") {
  double prev = -1e9;
  for (int n_o : {0, 4, 16, 64}) {
    const auto r = certify(RegulatorConfig::canonical(n_o, 2.0, 1.0, kTwoPi));
    CHECK(r.passed());
    CHECK(r.worst_eig_real > prev * 1.05);
    prev = r.worst_eig_real;
  }
}

}  // TEST_SUITE
