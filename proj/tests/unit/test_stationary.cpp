#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include <mfgnet/error.hpp>
#include <mfgnet/mfg.hpp>
#include <mfgnet/stationary.hpp>

#include "support.hpp"

using namespace mfgnet;
using doctest::Approx;

namespace {

ReducedCoefficients coeffs(double a11, double a12, double a21, double a22, double c1,
                           double c2) {
  ReducedCoefficients k;
  k.a11 = a11;
  k.a12 = a12;
  k.a21 = a21;
  k.a22 = a22;
  k.c1 = c1;
  k.c2 = c2;
  return k;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::io;
}

}  // namespace

TEST_CASE("reduced right-hand side") {
  const ReducedCoefficients sym = coeffs(2, 1, 1, 2, 1.5, 1.5);
  const auto at0 = reduced_rhs({0, 0}, sym);
  CHECK(at0[0] == 1.5);
  CHECK(at0[1] == 1.5);
  const auto eq = reduced_rhs({-1, -1}, sym);
  CHECK(eq[0] == Approx(0.0));
  CHECK(eq[1] == Approx(0.0));
  const auto off = reduced_rhs({-1, 0}, coeffs(2, 1, 1, 2, 0, 0));
  CHECK(off[0] == Approx(-1.0));
  CHECK(off[1] == Approx(-0.5));
}

TEST_CASE("coefficients from the cost weights") {
  const CostWeights w = testsupport::crowd_averse();
  const ReducedCoefficients k = ReducedCoefficients::from(w, make_simplex(0.25, 0.25, 0.5));
  CHECK(k.a11 == Approx(3.0));
  CHECK(k.a12 == Approx(1.0));
  CHECK(k.a21 == Approx(1.0));
  CHECK(k.a22 == Approx(3.0));
  CHECK(k.c1 == Approx(0.25));
  CHECK(k.c2 == Approx(0.25));
  CHECK_NOTHROW(k.validate());
  CHECK_THROWS_AS(coeffs(1, 1, 1, 2, 0, 0).validate(), Error);
  CHECK_THROWS_AS(coeffs(2, -1, 1, 2, 0, 0).validate(), Error);
}

TEST_CASE("stationary y against a brute-force grid") {
  const CostWeights w = testsupport::crowd_averse();
  for (const auto& x : {make_simplex(0.25, 0.25, 0.5), make_simplex(0.1, 0.3, 0.6),
                        make_simplex(0.2, 0.2, 0.6)}) {
    const ReducedCoefficients k = ReducedCoefficients::from(w, x);
    const ReducedValue y = stationary_y(k);
    const testsupport::GridHit hit = testsupport::grid_search_reduced(k, -2.0, 1e-3);
    CHECK(std::abs(y.y1 - hit.y1) < 2e-3);
    CHECK(std::abs(y.y2 - hit.y2) < 2e-3);
    const auto r = reduced_rhs(y, k);
    CHECK(std::abs(r[0]) < 1e-12);
    CHECK(std::abs(r[1]) < 1e-12);
    CHECK(stationary_y1_from_y2(w, x, y.y2) == Approx(y.y1).epsilon(1e-10));
  }
}

TEST_CASE("stationary y failure modes") {
  CHECK(code_of([] { stationary_y(coeffs(2, 1, 1, 2, 1, -5)); }) ==
        ErrorCode::no_real_equilibrium);
  // validation rules out a singular system before it is solved
  CHECK(code_of([] { stationary_y(coeffs(1, 1, 1, 1, 1, 1)); }) == ErrorCode::invalid_argument);
}

TEST_CASE("equilibrium classification") {
  const ReducedCoefficients k = coeffs(2, 1, 1, 2, 1.5, 1.5);
  const auto roots = reduced_equilibria(k);
  CHECK(roots[0] == ReducedValue{-1, -1});
  const Classification c = classify_equilibrium(roots[0], k);
  CHECK(c.stability == Stability::stable_node);
  CHECK(c.trace == Approx(-4.0));
  CHECK(c.determinant == Approx(3.0));
  CHECK(classify_equilibrium({1, 1}, k).stability == Stability::unstable_node);
  CHECK(classify_equilibrium({-1, 1}, k).stability == Stability::saddle);
  CHECK(classify_equilibrium({1, -1}, k).stability == Stability::saddle);
  CHECK(code_of([&] { classify_equilibrium({-0.5, -1}, k); }) ==
        ErrorCode::not_an_equilibrium);
  CHECK(to_string(Stability::stable_node) == "stable node");
}

TEST_CASE("stationary distribution for fixed rates") {
  const SimplexState u = stationary_distribution(RateMatrix(1, 1, 1, 1));
  CHECK(u.x1() == Approx(1.0 / 3));
  CHECK(u.x3() == Approx(1.0 / 3));

  // balance on each chain arc: x1 b13 = x3 b31, x2 b23 = x3 b32
  for (const auto& b : {RateMatrix(2, 1, 0.5, 3), RateMatrix(0.1, 0.7, 1.3, 0.2)}) {
    const double p1 = b.b31() / b.b13(), p2 = b.b32() / b.b23();
    const double x3 = 1.0 / (1.0 + p1 + p2);
    const SimplexState x = stationary_distribution(b);
    CHECK(x.x1() == Approx(p1 * x3).epsilon(1e-10));
    CHECK(x.x2() == Approx(p2 * x3).epsilon(1e-10));
    const Vec3 d = kolmogorov_rhs(x, b);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(d[i]) < 1e-12);
  }
}

TEST_CASE("sharp seminorm") {
  CHECK(seminorm_sharp(ValueVector{{1, -1, 0}}, ValueVector{}) == Approx(std::sqrt(2.0)));
  CHECK(seminorm_sharp(ValueVector{{2, 2, 5}}, ValueVector{}) == Approx(std::sqrt(6.0)));
  CHECK(seminorm_sharp(ValueVector{{3, 4, 5}}, ValueVector{{1, 2, 3}}) == Approx(0.0));
}

TEST_CASE("crowd-averse stationary solution") {
  const StationarySolution s = solve_stationary(testsupport::crowd_averse());
  CHECK(s.x_hat.x1() == Approx(0.25).epsilon(1e-10));
  CHECK(s.x_hat.x2() == Approx(0.25).epsilon(1e-10));
  CHECK(s.y_star.y1 == Approx(-std::sqrt(0.125)).epsilon(1e-10));
  CHECK(s.y_star.y2 == Approx(-std::sqrt(0.125)).epsilon(1e-10));
  CHECK(s.kappa == Approx(0.375).epsilon(1e-10));
  CHECK(s.classification.stability == Stability::stable_node);
  const SimplexState back = stationary_distribution(testsupport::crowd_averse(), s.y_star);
  CHECK(back.x1() == Approx(s.x_hat.x1()).epsilon(1e-10));
}

TEST_CASE("convergence study edge cases") {
  const CostWeights w = testsupport::crowd_averse();
  const StationarySolution s = solve_stationary(w);
  const std::vector<double> zero{0.0};
  const auto at_zero = convergence_study(make_simplex(0.3, 0.3, 0.4), w, zero, s);
  REQUIRE(at_zero.size() == 1);
  CHECK(at_zero[0].dx_sup == Approx(0.1));
  CHECK(at_zero[0].iterations == 0);

  const std::vector<double> hs{0.0, 1.0, 3.0};
  const auto from_bar = convergence_study(s.x_hat, w, hs, s);
  for (const auto& r : from_bar) CHECK(r.dx_sup < 1e-8);

  const auto records = convergence_study(make_simplex(0.3, 0.3, 0.4), w, hs, s);
  CHECK(records[2].dx_sup < records[1].dx_sup);
  CHECK(records[2].dv_sharp < records[1].dv_sharp);

  std::ostringstream out;
  write_convergence_csv(records, out);
  const std::string text = out.str();
  CHECK(text.rfind("T,dx_sup,dv_sharp\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
