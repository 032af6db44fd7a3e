#include <cmath>

#include "doctest.h"
#include "trihalo/harness.hpp"
#include "trihalo/taylor.hpp"

using namespace trihalo;

TEST_SUITE("harness") {

TEST_CASE("sample_field maps centres through the frame") {
  const RegionShape region{{2, 1, 1}, 3, {1.5, 0.5, 0.5}};
  const SampleFrame frame{0.1, {1.0, 0.0, 0.0}, 0.5};
  auto f = [](const std::array<double, 3>& x) { return x[0] + 10 * x[1]; };
  const HaloBuffer buf = sample_field(region, f, 2, frame);
  CHECK(buf.at(0, 0) == doctest::Approx(1.0 + 0.15 + 0.5));
  CHECK(buf.at(1, 0) == doctest::Approx(1.0 + 0.45 + 0.5));
  CHECK(buf.at(1, 1) == doctest::Approx(1.0 + 0.45 + 0.5 + 0.5));
  CHECK(default_test_field({0.0, 0.0, 0.0}) == 0.0);
  CHECK(default_test_field({1.0, 2.0, 4.0}) == doctest::Approx(std::sin(3.0)));
}

TEST_CASE("random polynomials") {
  const Polynomial p = Polynomial::random(3, 5);
  CHECK(p.exponents.size() == 20);
  CHECK(p(std::array<double, 3>{0, 0, 0}) == doctest::Approx(p.coefficients[0]));
  CHECK(Polynomial::random(3, 5).coefficients == p.coefficients);
}

TEST_CASE("geometric ladder") {
  const auto h = geometric_ladder(0.1, 0.001, 3);
  REQUIRE(h.size() == 3);
  CHECK(h[0] == doctest::Approx(0.1));
  CHECK(h[1] == doctest::Approx(0.01));
  CHECK(h[2] == doctest::Approx(0.001));
  CHECK_THROWS_AS(geometric_ladder(0.1, 0.2, 4), ConfigError);
  CHECK_THROWS_AS(geometric_ladder(0.1, 0.01, 1), ConfigError);
}

TEST_CASE("order fit") {
  std::vector<ConvergenceRow> rows;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) rows.push_back({h, 2 * h * h * h, h * h, false});
  CHECK(fit_order(rows, true).order == doctest::Approx(3.0));
  CHECK(fit_order(rows, false).order == doctest::Approx(2.0));
  CHECK(fit_order(rows, true).reliable);
  rows[2].plateau = rows[3].plateau = true;
  const OrderFit few = fit_order(rows, true);
  CHECK(few.points == 2);
  CHECK_FALSE(few.reliable);
}

TEST_CASE("affine field converges to round-off") {
  ConvergenceOptions options;
  options.field = [](const std::array<double, 3>& x) { return 1 + x[0] - 2 * x[1] + 0.5 * x[2]; };
  const FaceConfig cfg{Axis::x, Side::negative, 0, 4, 3, 1};
  for (Scheme s : kAllSchemes) {
    for (Role role : {Role::interpolate, Role::restrict}) {
      const ConvergenceReport r = run_convergence(s, role, cfg, {0.1, 0.05, 0.02}, options);
      for (const ConvergenceRow& row : r.rows) CHECK(row.err_max < 1e-12);
    }
  }
}

TEST_CASE("convergence is deterministic and flags plateau points") {
  const FaceConfig cfg{Axis::x, Side::negative, 0, 4, 3, 1};
  const auto ladder = geometric_ladder(0.2, 0.02, 4);
  const ConvergenceReport a = run_convergence(Scheme::order2, Role::interpolate, cfg, ladder);
  const ConvergenceReport b = run_convergence(Scheme::order2, Role::interpolate, cfg, ladder);
  REQUIRE(a.rows.size() == 4);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].err_max == b.rows[i].err_max);
    CHECK(a.rows[i].err_l2 == b.rows[i].err_l2);
    CHECK(a.rows[i].plateau == (a.rows[i].err_max < kPlateauThreshold));
    CHECK(a.rows[i].err_l2 <= a.rows[i].err_max);
  }
  CHECK_THROWS_AS(run_convergence(Scheme::order2, Role::interpolate, cfg, {0.1, 0.2, 0.05}),
                  ConfigError);
  CHECK_THROWS_AS(run_convergence(Scheme::order3, Role::interpolate,
                                  FaceConfig{Axis::x, Side::negative, 0, 3, 3, 1}, ladder),
                  StencilInfeasibleError);
}

TEST_CASE("bench reports one repetition") {
  BenchOptions options;
  options.repetitions = 1;
  options.include_construction = true;
  const BenchReport r =
      run_bench(Scheme::order2, Role::interpolate, FaceConfig{Axis::z, Side::positive, 7, 3, 2, 5}, options);
  CHECK(r.repetitions == 1);
  CHECK(r.apply_total_ns > 0);
  CHECK(r.apply_mean_ns == r.apply_total_ns);
  CHECK(r.has_construction);
  options.repetitions = 0;
  CHECK_THROWS_AS(run_bench(Scheme::order2, Role::interpolate, FaceConfig{}, options), ConfigError);
}

TEST_CASE("oracle suite passes and catches a corrupted operator") {
  OracleOptions options;
  options.p_values = {3};
  options.k_values = {1, 3};
  const OracleSummary summary = run_unit_oracle(options);
  CHECK(summary.ok());
  CHECK(summary.passed > 0);
  CHECK(summary.infeasible > 0);

  const FaceConfig cfg{Axis::y, Side::positive, 4, 3, 2, 1};
  const CsrOperator good = build_operator(OperatorKey::interpolation(Scheme::matrix_linear, 3, 2, 4));
  CHECK(check_operator_against_tensor(good, Role::interpolate, cfg, std::nullopt, 1).status ==
        CaseStatus::pass);
  // Perturb one weight, keeping the row sum.
  std::vector<Triplet> t = good.triplets();
  t[0].value += 0.1;
  t[1].value -= 0.1;
  const CsrOperator bad = CsrOperator::from_triplets(std::move(t), good.info());
  CHECK(check_operator_against_tensor(bad, Role::interpolate, cfg, std::nullopt, 1).status ==
        CaseStatus::fail);
}

TEST_CASE("property suite") {
  const PropertySummary s = run_property_suite({Scheme::matrix_linear, Scheme::order2}, {3}, {1, 3});
  CHECK(s.ok());
  CHECK(s.worst_row_sum_error < 1e-12);
  CHECK(s.worst_dense_deviation < 1e-13);
}

}
