#pragma once

// Validation harness: sampled test fields, the linear-exactness oracle
// suite, operator property checks, convergence studies and runtime
// benchmarks.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trihalo/csr.hpp"
#include "trihalo/face_transfer.hpp"
#include "trihalo/geometry.hpp"

namespace trihalo {

using ScalarField = std::function<double(const std::array<double, 3>&)>;

/// Maps face-local coordinates (units of h) to physical positions:
/// x = anchor + h * centre. Channel c samples the field shifted by
/// c * channel_phase along x.
struct SampleFrame {
  double h = 1.0;
  std::array<double, 3> anchor{0.0, 0.0, 0.0};
  double channel_phase = 0.0;

  std::array<double, 3> position(const std::array<double, 3>& centre, int channel = 0) const {
    return {anchor[0] + h * centre[0] + channel * channel_phase, anchor[1] + h * centre[1],
            anchor[2] + h * centre[2]};
  }
};

HaloBuffer sample_field(const RegionShape& region, const ScalarField& field, int u,
                        const SampleFrame& frame = {});

/// sin(x + y/2 + z/4): smooth with nonvanishing mixed derivatives.
double default_test_field(const std::array<double, 3>& x);

/// Sum of coefficient * x^a y^b z^c over all monomials of total degree <= degree.
struct Polynomial {
  int degree = 1;
  std::vector<std::array<int, 3>> exponents;
  std::vector<double> coefficients;

  static Polynomial random(int degree, std::uint64_t seed);
  double operator()(const std::array<double, 3>& x) const;
};

// ---------------------------------------------------------------------------
// Convergence

inline constexpr double kPlateauThreshold = 1e-7;

struct ConvergenceRow {
  double h = 0.0;
  double err_max = 0.0;
  double err_l2 = 0.0;
  bool plateau = false;
};

struct OrderFit {
  double order = 0.0;
  int points = 0;
  // False when fewer than three non-plateau points remain.
  bool reliable = false;
};

struct ConvergenceReport {
  Scheme scheme = Scheme::matrix_linear;
  Role role = Role::interpolate;
  int p = 0;
  int k = 0;
  std::vector<ConvergenceRow> rows;
  OrderFit fit_max;
  OrderFit fit_l2;
  double max_condition = 1.0;
  int ill_conditioned_fits = 0;
};

struct ConvergenceOptions {
  ScalarField field = default_test_field;
  std::array<double, 3> anchor{0.3, 0.2, 0.1};
  double plateau_threshold = kPlateauThreshold;
  // Evaluate every segment (interpolation) or both halves (restriction)
  // instead of only the configured one.
  bool all_parts = true;
};

/// h_max, ..., h_min with `count` log-equispaced entries.
std::vector<double> geometric_ladder(double h_max, double h_min, int count);

/// Least-squares slope of log(err) against log(h) over non-plateau rows.
OrderFit fit_order(const std::vector<ConvergenceRow>& rows, bool use_max_norm);

ConvergenceReport run_convergence(Scheme scheme, Role role, const FaceConfig& base,
                                  const std::vector<double>& h_list,
                                  const ConvergenceOptions& options = {},
                                  OperatorCache& cache = OperatorCache::global());

// ---------------------------------------------------------------------------
// Benchmarks

struct BenchOptions {
  int repetitions = 100;
  bool include_construction = false;
  int construction_repetitions = 0;  // 0: same as repetitions
  std::optional<Half> half = Half::inner;
};

struct BenchReport {
  Scheme scheme = Scheme::matrix_linear;
  Role role = Role::interpolate;
  int p = 0;
  int k = 0;
  int u = 0;
  int repetitions = 0;
  double apply_total_ns = 0.0;
  double apply_mean_ns = 0.0;
  bool has_construction = false;
  int construction_repetitions = 0;
  double construct_total_ns = 0.0;
  double construct_mean_ns = 0.0;
};

BenchReport run_bench(Scheme scheme, Role role, const FaceConfig& cfg,
                      const BenchOptions& options = {});

/// Mean time of the copy-based pipeline divided by the mean time of applying
/// an operator stored directly in the world ordering. Reported, not gated.
double rotation_overhead_ratio(Scheme scheme, const FaceConfig& cfg, int repetitions);

// ---------------------------------------------------------------------------
// Oracle and property suites

enum class CaseStatus { pass, fail, infeasible };
std::string to_string(CaseStatus status);

struct OracleCase {
  Scheme scheme = Scheme::matrix_linear;
  Role role = Role::interpolate;
  FaceConfig cfg;
  std::optional<Half> half;
  CaseStatus status = CaseStatus::pass;
  // Max |scheme - tensor_linear| on the affine field.
  double max_deviation = 0.0;
  // Max |scheme - exact| on the affine field.
  double max_error = 0.0;
  std::string note;

  std::string describe() const;
};

struct OracleOptions {
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  std::vector<int> p_values{1, 3, 4, 6};
  std::vector<int> k_values{1, 3};
  std::vector<Role> roles{Role::interpolate, Role::restrict};
  double tolerance = 1e-11;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct OracleSummary {
  std::vector<OracleCase> cases;
  int passed = 0;
  int failed = 0;
  int infeasible = 0;
  bool ok() const { return failed == 0; }
};

/// Compares each scheme to the tensor-product result on random affine data
/// for every face configuration.
OracleSummary run_unit_oracle(const OracleOptions& options = {});

/// Checks one reference operator against the tensor product on a random
/// affine field for the world configuration `cfg`.
OracleCase check_operator_against_tensor(const CsrOperator& reference_op, Role role,
                                         const FaceConfig& cfg, std::optional<Half> half,
                                         std::uint64_t seed, double tolerance = 1e-11);

struct PropertyCase {
  OperatorKey key;
  CaseStatus status = CaseStatus::pass;
  double max_row_sum_error = 0.0;
  double max_dense_deviation = 0.0;
  bool deterministic = true;
  std::string note;
};

struct PropertySummary {
  std::vector<PropertyCase> cases;
  int failed = 0;
  int infeasible = 0;
  double worst_row_sum_error = 0.0;
  double worst_dense_deviation = 0.0;
  bool ok() const { return failed == 0; }
};

/// Row sums, CSR versus dense application and rebuild determinism for every
/// operator of the listed schemes (tensor_linear is checked via its collapsed
/// form).
PropertySummary run_property_suite(const std::vector<Scheme>& schemes,
                                   const std::vector<int>& p_values,
                                   const std::vector<int>& k_values, std::uint64_t seed = 7);

struct ReproductionCase {
  Scheme scheme = Scheme::order2;
  Role role = Role::interpolate;
  FaceConfig cfg;
  std::optional<Half> half;
  CaseStatus status = CaseStatus::pass;
  double max_error = 0.0;
  std::string note;
};

struct ReproductionSummary {
  std::vector<ReproductionCase> cases;
  int failed = 0;
  int infeasible = 0;
  double worst_error = 0.0;
  bool ok() const { return failed == 0; }
};

/// Applies each order-w scheme to random polynomials of total degree w on
/// every face configuration.
ReproductionSummary run_polynomial_reproduction(const std::vector<Scheme>& schemes,
                                                const std::vector<int>& p_values,
                                                const std::vector<int>& k_values,
                                                double tolerance = 1e-9,
                                                std::uint64_t seed = 11);

}  // namespace trihalo
