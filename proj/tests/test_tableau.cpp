#include <cmath>
#include <random>

#include "doctest.h"
#include "relaxlab/tableau.hpp"

using namespace relax;

namespace {

Tableau two_stage_euler() {
  return new_tableau(RealMatrix{{0, 0}, {1, 0}}, RealMatrix{{0, 0}, {0, 1}},
                     {1.0, 0.0}, {0.0, 1.0});
}

}  // namespace

TEST_CASE("new_tableau derives abscissae") {
  Tableau t = two_stage_euler();
  CHECK(t.cexp[0] == 0.0);
  CHECK(t.cexp[1] == 1.0);
  CHECK(t.cimp[0] == 0.0);
  CHECK(t.cimp[1] == 1.0);
}

TEST_CASE("new_tableau rejects structure violations") {
  // negative implicit diagonal
  CHECK_THROWS_AS(new_tableau(RealMatrix{{0, 0}, {1, 0}},
                              RealMatrix{{0, 0}, {0, -0.5}}, {1, 0}, {0, 1}),
                  Error);
  // explicit entry on the diagonal/upper triangle
  CHECK_THROWS_AS(new_tableau(RealMatrix{{0, 1}, {1, 0}},
                              RealMatrix{{0, 0}, {0, 1}}, {1, 0}, {0, 1}),
                  Error);
  try {
    new_tableau(RealMatrix{{0, 1}, {1, 0}}, RealMatrix{{0, 0}, {0, 1}}, {1, 0}, {0, 1});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StructureViolation);
  }
  // shape mismatch
  CHECK_THROWS_AS(new_tableau(RealMatrix{{0, 0}, {1, 0}},
                              RealMatrix{{0, 0}, {0, 1}}, {1, 0, 0}, {0, 1}),
                  Error);
}

TEST_CASE("classify the two-stage scheme") {
  Classification cl = classify(two_stage_euler());
  CHECK(cl.isCK);
  CHECK(cl.isARS);
  CHECK(cl.isISA);
  CHECK(cl.isGSA);
  CHECK(cl.cMatched);
}

TEST_CASE("classify ars222") {
  Classification cl = classify(registry("ars222"));
  CHECK(cl.isCK);
  CHECK(cl.isARS);
  CHECK(cl.isISA);
  CHECK(cl.isGSA);
}

TEST_CASE("nonzero first implicit row breaks CK") {
  Tableau t = new_tableau(RealMatrix{{0, 0}, {1, 0}}, RealMatrix{{0.5, 0}, {0, 0.5}},
                          {1.0, 0.0}, {0.0, 1.0});
  CHECK(!classify(t).isCK);
}

TEST_CASE("order residuals of ars222") {
  Tableau t = registry("ars222");
  ConditionReport second = order_residuals(t, 2);
  CHECK(second.allPass());
  CHECK(second.maxResidual() < 1e-14);

  ConditionReport third = order_residuals(t, 3);
  const double g = 1.0 - std::sqrt(2.0) / 2.0;
  double expected = std::abs((1.0 - g) * g * g + g - 1.0 / 3.0);
  CHECK(third.find("sum_b_c_c = 1/3").residual == doctest::Approx(expected).epsilon(1e-10));
  CHECK(expected > 0.02);
  CHECK(expected < 0.021);
}

TEST_CASE("single stage scheme is first order") {
  Tableau t = new_tableau(RealMatrix(1, 1), RealMatrix(1, 1), {1.0}, {1.0});
  ConditionReport rep = order_residuals(t, 1);
  CHECK(rep.allPass());
  CHECK(rep.maxResidual() == 0.0);
}

TEST_CASE("stage conditions") {
  // ars222's third implicit row equals b, so the i=3 stage condition reduces
  // to the second-order quadrature identity and vanishes
  ConditionReport rep = stage_conditions(registry("ars222"));
  CHECK(rep.find("stage_imp_3").residual < 1e-12);
  CHECK(rep.find("stage_exp_3").residual < 1e-12);
  // b~_2 = 1 - delta = 1/(2 gamma) = 1 + sqrt(2)/2
  CHECK(rep.find("vanish_bt2").residual ==
        doctest::Approx(1.0 + std::sqrt(2.0) / 2.0).epsilon(1e-12));

  // a vanishing-coefficient violation is reported verbatim
  Tableau t = new_tableau(
      RealMatrix{{0, 0, 0}, {0.5, 0, 0}, {0.2, 0.3, 0}},
      RealMatrix{{0, 0, 0}, {0, 0.5, 0}, {0, 0.2, 0.3}}, {0.4, 0.3, 0.3}, {0, 0.5, 0.5});
  CHECK(stage_conditions(t).find("vanish_bt2").residual == doctest::Approx(0.3));

  CHECK_THROWS_AS(stage_conditions(two_stage_euler()), Error);
  try {
    stage_conditions(two_stage_euler());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewStages);
  }
}

TEST_CASE("mstar arithmetic") {
  RealMatrix m1 = mstar(RealMatrix::identity(2));
  CHECK(m1(0, 0) == 1.0);
  CHECK(m1(0, 1) == 0.0);
  CHECK(m1(1, 0) == -1.0);
  CHECK(m1(1, 1) == 0.0);

  RealMatrix m2 = mstar(RealMatrix{{1, 0}, {0, 2}});
  CHECK(m2(0, 0) == 1.0);
  CHECK(m2(1, 0) == -2.0);
  CHECK(m2(1, 1) == 1.0);

  RealMatrix m3 = mstar(RealMatrix(3, 3));
  CHECK(m3(0, 0) == 1.0);
  CHECK(m3(2, 2) == -1.0);
  CHECK(m3.maxAbs() == 1.0);

  CHECK_THROWS_AS(mstar(RealMatrix(1, 1)), Error);
}

TEST_CASE("mstar is affine in M") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    int s = 2 + trial % 4;
    RealMatrix m1(s, s), m2(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        m1(i, j) = dist(rng);
        m2(i, j) = dist(rng);
      }
    double alpha = dist(rng), beta = dist(rng);
    RealMatrix corner(s, s);
    corner(0, 0) = 1.0;
    corner(s - 1, s - 1) = -1.0;
    RealMatrix lhs = mstar(alpha * m1 + beta * m2);
    RealMatrix rhs = alpha * mstar(m1) + beta * mstar(m2) - (alpha + beta - 1.0) * corner;
    CHECK((lhs - rhs).maxAbs() <= 1e-12 * std::max(1.0, rhs.maxAbs()));
  }
}

TEST_CASE("check_M on the hand-built certificate") {
  Tableau t = two_stage_euler();
  MCheckReport good = check_M(t, {RealMatrix{{1, 0}, {0, 2}}, kPsdTol});
  CHECK(good.m1Pass);
  CHECK(good.m2Pass);

  MCheckReport id = check_M(t, {RealMatrix::identity(2), kPsdTol});
  CHECK(!id.m2Pass);  // Mstar + Mstar^T has eigenvalue 1 - sqrt(2) < 0

  MCheckReport zero = check_M(t, {RealMatrix(2, 2), kPsdTol});
  CHECK(!zero.m1Pass);
  CHECK(!zero.m2Pass);
}

TEST_CASE("check_M is invariant under positive scaling of M") {
  Tableau t = two_stage_euler();
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> dist(0.1, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    double alpha = dist(rng);
    MCheckReport a = check_M(t, {RealMatrix{{1, 0}, {0, 2}}, kPsdTol});
    MCheckReport b = check_M(t, {alpha * RealMatrix{{1, 0}, {0, 2}}, kPsdTol});
    CHECK(a.m1Pass == b.m1Pass);
    CHECK(a.m2Pass == b.m2Pass);
  }
}

TEST_CASE("assumption_H examples") {
  NullSpaceResult r = assumption_H(two_stage_euler());
  CHECK(r.pass);
  CHECK(r.vector[0] == doctest::Approx(1.0));
  CHECK(std::abs(r.vector[1]) <= 1e-14);

  NullSpaceResult r222 = assumption_H(registry("ars222"));
  CHECK(r222.pass);
  CHECK(r222.vector[0] == doctest::Approx(1.0));
  CHECK(std::abs(r222.vector[1]) <= 1e-14);
  CHECK(std::abs(r222.vector[2]) <= 1e-14);

  Tableau zero_imp = new_tableau(RealMatrix{{0, 0}, {1, 0}}, RealMatrix(2, 2),
                                 {1.0, 0.0}, {0.5, 0.5});
  CHECK_THROWS_AS(assumption_H(zero_imp), Error);
  try {
    assumption_H(zero_imp);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NullityMismatch);
  }
}

TEST_CASE("assumption_H vector annihilates the implicit matrix") {
  for (const auto& name : registry_names()) {
    Tableau t = registry(name);
    NullSpaceResult r = assumption_H(t);
    double norm = 0.0;
    for (double v : r.vector) norm += v * v;
    norm = std::sqrt(norm);
    std::vector<double> hv = t.Himp * r.vector;
    for (double v : hv)
      CHECK(std::abs(v) <= 1e-12 * std::max(1.0, t.Himp.maxAbs() * norm));
    CHECK(r.pass);  // every registered scheme satisfies the null-vector assumption
  }
}

TEST_CASE("registry members self-validate") {
  for (const auto& name : registry_names()) {
    Tableau t = registry(name);
    Classification cl = classify(t);
    CHECK(cl.isCK);
    CHECK(cl.isISA);
    CHECK(cl.cMatched);
    if (name.rfind("ars", 0) == 0) CHECK(cl.isARS);
    ConditionReport rep = order_residuals(t, t.claimedOrder);
    CHECK(rep.allPass());
  }
  CHECK(registry("bhr553s").claimedOrder == 3);
  CHECK(!classify(registry("bhr553s")).isARS);
  CHECK(!classify(registry("bhr553s")).isGSA);
}

TEST_CASE("registry order residuals have no gray zone") {
  for (const auto& name : registry_names()) {
    Tableau t = registry(name);
    for (const auto& e : order_residuals(t, 3).entries) {
      bool clean = e.residual < 1e-12 || e.residual > 1e-3;
      CHECK(clean);
    }
    if (t.s >= 3) {
      for (const auto& e : stage_conditions(t).entries) {
        bool clean = e.residual < 1e-12 || e.residual > 1e-3;
        CHECK(clean);
      }
    }
  }
}

TEST_CASE("unknown scheme") {
  CHECK_THROWS_AS(registry("nosuch"), Error);
  try {
    registry("nosuch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownScheme);
  }
}

TEST_CASE("ars443 passes third order but violates the stage/vanishing set") {
  Tableau t = registry("ars443");
  CHECK(order_residuals(t, 3).allPass());
  ConditionReport stages = stage_conditions(t);
  bool some_failure = false;
  for (const auto& e : stages.entries) some_failure = some_failure || !e.pass;
  CHECK(some_failure);
}

TEST_CASE("bhr553s satisfies the stage-order and vanishing conditions") {
  Tableau t = registry("bhr553s");
  CHECK(order_residuals(t, 3).allPass());
  CHECK(stage_conditions(t).allPass());
}

TEST_CASE("tableau file round trip") {
  Tableau t = registry("ars222");
  std::string path = "tableau_roundtrip.txt";
  {
    FILE* f = fopen(path.c_str(), "w");
    REQUIRE(f);
    fprintf(f, "%d\n", t.s);
    for (int i = 0; i < t.s; ++i) {
      for (int j = 0; j < t.s; ++j) fprintf(f, "%.17g ", t.Hexp(i, j));
      fprintf(f, "\n");
    }
    for (int i = 0; i < t.s; ++i) {
      for (int j = 0; j < t.s; ++j) fprintf(f, "%.17g ", t.Himp(i, j));
      fprintf(f, "\n");
    }
    for (int j = 0; j < t.s; ++j) fprintf(f, "%.17g ", t.bexp[j]);
    fprintf(f, "\n");
    for (int j = 0; j < t.s; ++j) fprintf(f, "%.17g ", t.bimp[j]);
    fprintf(f, "\n");
    fclose(f);
  }
  Tableau back = load_tableau_file(path);
  CHECK((back.Hexp - t.Hexp).maxAbs() == 0.0);
  CHECK((back.Himp - t.Himp).maxAbs() == 0.0);
  CHECK(order_residuals(back, 2).allPass());
  std::remove(path.c_str());
}
