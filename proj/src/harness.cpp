#include "trihalo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "trihalo/linear_ops.hpp"
#include "trihalo/taylor.hpp"

namespace trihalo {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point start, Clock::time_point stop) {
  return std::chrono::duration<double, std::nano>(stop - start).count();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct ErrorNorms {
  double max = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double e) {
    max = std::max(max, std::abs(e));
    sum_sq += e * e;
    ++count;
  }
  double rms() const { return count ? std::sqrt(sum_sq / count) : 0.0; }
};

void accumulate_errors(const HaloBuffer& result, const ScalarField& field,
                       const SampleFrame& frame, ErrorNorms& norms) {
  const RegionShape& shape = result.shape();
  for (std::size_t cell = 0; cell < shape.cell_count(); ++cell) {
    const auto centre = shape.centre(shape.delinearize(cell));
    for (int c = 0; c < result.unknowns(); ++c) {
      norms.add(result.at(cell, c) - field(frame.position(centre, c)));
    }
  }
}

double max_difference(const HaloBuffer& a, const HaloBuffer& b) {
  double worst = 0.0;
  auto va = a.values();
  auto vb = b.values();
  if (va.size() != vb.size()) return INFINITY;
  for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
  return worst;
}

// One target part of a face: an interpolation segment or a restriction half.
struct Part {
  FaceConfig cfg;
  std::optional<Half> half;
};

std::vector<Part> parts_of(Role role, const FaceConfig& base, bool all_parts,
                           std::optional<Half> half = std::nullopt) {
  std::vector<Part> parts;
  if (role == Role::interpolate) {
    for (int s = 0; s < kSegmentCount; ++s) {
      if (!all_parts && s != base.segment) continue;
      FaceConfig cfg = base;
      cfg.segment = s;
      parts.push_back({cfg, std::nullopt});
    }
  } else if (all_parts) {
    for (Half h : {Half::inner, Half::outer}) {
      if (restriction_layers(base.k, h).count > 0) parts.push_back({base, h});
    }
  } else {
    parts.push_back({base, half});
  }
  return parts;
}

RegionShape source_shape(Role role, const FaceConfig& cfg) {
  return role == Role::interpolate ? interp_source_shape(cfg) : restrict_source_shape(cfg);
}

SampleFrame random_frame(std::mt19937_64& rng, double h, int u) {
  std::uniform_real_distribution<double> anchor(-0.5, 0.5);
  SampleFrame frame;
  frame.h = h;
  frame.anchor = {anchor(rng), anchor(rng), anchor(rng)};
  frame.channel_phase = u > 1 ? 0.37 : 0.0;
  return frame;
}

ScalarField random_affine(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coefficient(-1.0, 1.0);
  const double a = coefficient(rng), b = coefficient(rng), c = coefficient(rng),
               d = coefficient(rng);
  return [=](const std::array<double, 3>& x) { return a + b * x[0] + c * x[1] + d * x[2]; };
}

HaloBuffer run_reference_operator(const CsrOperator& op, const FaceConfig& cfg,
                                  const HaloBuffer& world_source) {
  const ReferenceFrame frame = ReferenceFrame::for_face(cfg);
  HaloBuffer ref_source(op.info().source, world_source.unknowns());
  HaloBuffer ref_target(op.info().target, world_source.unknowns());
  to_reference_into(frame, world_source, ref_source);
  apply_into(op, ref_source.values(), ref_target.values(), world_source.unknowns());
  HaloBuffer world_target(frame.to_world(op.info().target), world_source.unknowns());
  from_reference_into(frame, ref_target, world_target);
  return world_target;
}

HaloBuffer run_tensor(Role role, const FaceConfig& cfg, std::optional<Half> half,
                      const HaloBuffer& source) {
  return role == Role::interpolate ? apply_tensor_interpolate(cfg, source)
                                   : apply_tensor_restrict(cfg, source, half);
}

template <typename Case, typename Fn>
void run_parallel(std::vector<Case>& cases, int threads, Fn&& fn) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(cases.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < cases.size(); ++i) fn(i, cases[i]);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < cases.size(); i += workers) fn(i, cases[i]);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

HaloBuffer sample_field(const RegionShape& region, const ScalarField& field, int u,
                        const SampleFrame& frame) {
  HaloBuffer buffer(region, u);
  for (std::size_t cell = 0; cell < region.cell_count(); ++cell) {
    const auto centre = region.centre(region.delinearize(cell));
    for (int c = 0; c < u; ++c) buffer.at(cell, c) = field(frame.position(centre, c));
  }
  return buffer;
}

double default_test_field(const std::array<double, 3>& x) {
  return std::sin(x[0] + 0.5 * x[1] + 0.25 * x[2]);
}

Polynomial Polynomial::random(int degree, std::uint64_t seed) {
  Polynomial poly;
  poly.degree = degree;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coefficient(-1.0, 1.0);
  const TaylorBasis basis = TaylorBasis::of_order(degree);
  poly.exponents = basis.exponents();
  for (std::size_t j = 0; j < basis.size(); ++j) poly.coefficients.push_back(coefficient(rng));
  return poly;
}

double Polynomial::operator()(const std::array<double, 3>& x) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    double term = coefficients[j];
    for (int axis = 0; axis < 3; ++axis) {
      for (int e = 0; e < exponents[j][axis]; ++e) term *= x[axis];
    }
    sum += term;
  }
  return sum;
}

std::vector<double> geometric_ladder(double h_max, double h_min, int count) {
  if (count < 2 || !(h_max > h_min) || !(h_min > 0.0)) {
    throw ConfigError("a geometric h ladder needs count >= 2 and h_max > h_min > 0");
  }
  std::vector<double> ladder(count);
  const double ratio = std::pow(h_min / h_max, 1.0 / (count - 1));
  for (int i = 0; i < count; ++i) ladder[i] = h_max * std::pow(ratio, i);
  ladder.back() = h_min;
  return ladder;
}

OrderFit fit_order(const std::vector<ConvergenceRow>& rows, bool use_max_norm) {
  std::vector<double> xs, ys;
  for (const ConvergenceRow& row : rows) {
    const double e = use_max_norm ? row.err_max : row.err_l2;
    if (row.plateau || !(e > 0.0)) continue;
    xs.push_back(std::log(row.h));
    ys.push_back(std::log(e));
  }
  OrderFit fit;
  fit.points = static_cast<int>(xs.size());
  fit.reliable = fit.points >= 3;
  if (fit.points < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  fit.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

ConvergenceReport run_convergence(Scheme scheme, Role role, const FaceConfig& base,
                                  const std::vector<double>& h_list,
                                  const ConvergenceOptions& options, OperatorCache& cache) {
  base.validate();
  if (h_list.size() < 3) throw ConfigError("a convergence study needs at least three h values");
  for (std::size_t i = 1; i < h_list.size(); ++i) {
    if (!(h_list[i] < h_list[i - 1])) throw ConfigError("h values must be strictly decreasing");
  }
  FaceConfig cfg = base;
  cfg.u = 1;
  ConvergenceReport report;
  report.scheme = scheme;
  report.role = role;
  report.p = cfg.p;
  report.k = cfg.k;

  std::vector<FaceTransfer> transfers;
  for (const Part& part : parts_of(role, cfg, options.all_parts)) {
    transfers.push_back(role == Role::interpolate
                            ? FaceTransfer::interpolation(scheme, part.cfg, cache)
                            : FaceTransfer::restriction(scheme, part.cfg, part.half, cache));
    if (const auto& op = transfers.back().reference_operator()) {
      report.max_condition = std::max(report.max_condition, op->info().max_condition);
      report.ill_conditioned_fits += op->info().ill_conditioned_fits;
    }
  }

  for (double h : h_list) {
    SampleFrame frame;
    frame.h = h;
    frame.anchor = options.anchor;
    const HaloBuffer source = sample_field(source_shape(role, cfg), options.field, 1, frame);
    ErrorNorms norms;
    for (FaceTransfer& transfer : transfers) {
      HaloBuffer target(transfer.target_shape(), 1);
      transfer.run(source, target);
      accumulate_errors(target, options.field, frame, norms);
    }
    ConvergenceRow row{h, norms.max, norms.rms(), norms.max < options.plateau_threshold};
    report.rows.push_back(row);
  }
  report.fit_max = fit_order(report.rows, true);
  report.fit_l2 = fit_order(report.rows, false);
  return report;
}

BenchReport run_bench(Scheme scheme, Role role, const FaceConfig& cfg,
                      const BenchOptions& options) {
  cfg.validate();
  if (options.repetitions < 1) throw ConfigError("benchmarks need at least one repetition");
  BenchReport report;
  report.scheme = scheme;
  report.role = role;
  report.p = cfg.p;
  report.k = cfg.k;
  report.u = cfg.u;
  report.repetitions = options.repetitions;

  const std::optional<Half> half = role == Role::restrict ? options.half : std::nullopt;
  const OperatorKey key = role == Role::interpolate
                              ? OperatorKey::interpolation(scheme, cfg.p, cfg.k, cfg.segment)
                              : OperatorKey::restriction(scheme, cfg.p, cfg.k, half);

  if (options.include_construction) {
    const int reps = options.construction_repetitions > 0 ? options.construction_repetitions
                                                          : options.repetitions;
    double total = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto start = Clock::now();
      if (scheme == Scheme::tensor_linear) {
        auto kernel = role == Role::interpolate
                          ? TensorKernel::interpolation(cfg.p, cfg.k, cfg.segment)
                          : TensorKernel::restriction(cfg.p, cfg.k, half);
        const auto stop = Clock::now();
        total += elapsed_ns(start, stop);
        (void)kernel;
      } else {
        const CsrOperator op = build_operator(key);
        const auto stop = Clock::now();
        total += elapsed_ns(start, stop);
        if (op.n_cols() == 0) throw std::logic_error("empty operator");
      }
    }
    report.has_construction = true;
    report.construction_repetitions = reps;
    report.construct_total_ns = total;
    report.construct_mean_ns = total / reps;
  }

  OperatorCache cache;
  FaceTransfer transfer = role == Role::interpolate
                              ? FaceTransfer::interpolation(scheme, cfg, cache)
                              : FaceTransfer::restriction(scheme, cfg, half, cache);
  SampleFrame frame;
  frame.h = 0.05;
  frame.channel_phase = 0.01;
  const HaloBuffer source = sample_field(transfer.source_shape(), default_test_field, cfg.u, frame);
  HaloBuffer target(transfer.target_shape(), cfg.u, 1.0);
  // Fault in the scratch buffers before the clock starts.
  transfer.run(source, target);

  const auto start = Clock::now();
  for (int r = 0; r < options.repetitions; ++r) transfer.run(source, target);
  const auto stop = Clock::now();
  report.apply_total_ns = elapsed_ns(start, stop);
  report.apply_mean_ns = report.apply_total_ns / options.repetitions;
  return report;
}

double rotation_overhead_ratio(Scheme scheme, const FaceConfig& cfg, int repetitions) {
  cfg.validate();
  if (scheme == Scheme::tensor_linear) throw ConfigError("rotation overhead needs a CSR scheme");
  OperatorCache cache;
  FaceTransfer transfer = FaceTransfer::interpolation(scheme, cfg, cache);
  const CsrOperator direct = permute_to_world(*transfer.reference_operator(), cfg);
  const HaloBuffer source = sample_field(transfer.source_shape(), default_test_field, cfg.u, {});
  HaloBuffer target(transfer.target_shape(), cfg.u);

  auto best_mean = [&](auto&& body) {
    double best = INFINITY;
    for (int trial = 0; trial < 5; ++trial) {
      body();
      const auto start = Clock::now();
      for (int r = 0; r < repetitions; ++r) body();
      best = std::min(best, elapsed_ns(start, Clock::now()) / repetitions);
    }
    return best;
  };
  const double copied = best_mean([&] { transfer.run(source, target); });
  const double stored = best_mean([&] { apply_into(direct, source.values(), target.values(), cfg.u); });
  return copied / stored;
}

std::string to_string(CaseStatus status) {
  switch (status) {
    case CaseStatus::pass: return "pass";
    case CaseStatus::fail: return "fail";
    case CaseStatus::infeasible: return "infeasible";
  }
  return "?";
}

std::string OracleCase::describe() const {
  std::ostringstream out;
  out << to_string(scheme) << ' ' << to_string(role) << ' ' << cfg.describe();
  if (half) out << " half=" << to_string(*half);
  return out.str();
}

OracleCase check_operator_against_tensor(const CsrOperator& reference_op, Role role,
                                         const FaceConfig& cfg, std::optional<Half> half,
                                         std::uint64_t seed, double tolerance) {
  OracleCase result;
  result.scheme = reference_op.key().scheme;
  result.role = role;
  result.cfg = cfg;
  result.half = half;

  std::mt19937_64 rng(seed);
  const ScalarField field = random_affine(rng);
  const SampleFrame frame = random_frame(rng, 0.1, cfg.u);
  const HaloBuffer source = sample_field(source_shape(role, cfg), field, cfg.u, frame);
  if (reference_op.n_cols() != source.cell_count()) {
    throw ShapeError("operator " + reference_op.key().fingerprint() +
                     " does not fit face " + cfg.describe());
  }
  const HaloBuffer mine = run_reference_operator(reference_op, cfg, source);
  const HaloBuffer tensor = run_tensor(role, cfg, half, source);
  result.max_deviation = max_difference(mine, tensor);
  ErrorNorms norms;
  accumulate_errors(mine, field, frame, norms);
  result.max_error = norms.max;
  result.status = result.max_deviation < tolerance ? CaseStatus::pass : CaseStatus::fail;
  return result;
}

OracleSummary run_unit_oracle(const OracleOptions& options) {
  OracleSummary summary;
  for (Scheme scheme : options.schemes) {
    for (int p : options.p_values) {
      for (int k : options.k_values) {
        if (k > p) continue;
        for (Role role : options.roles) {
          for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
            for (Side side : {Side::negative, Side::positive}) {
              const FaceConfig base{axis, side, 0, p, k, 3};
              for (const Part& part : parts_of(role, base, true)) {
                OracleCase c;
                c.scheme = scheme;
                c.role = role;
                c.cfg = part.cfg;
                c.half = part.half;
                summary.cases.push_back(c);
              }
            }
          }
        }
      }
    }
  }

  run_parallel(summary.cases, options.threads, [&](std::size_t index, OracleCase& c) {
    const std::uint64_t seed = mix_seed(options.seed, index);
    try {
      if (c.scheme == Scheme::tensor_linear) {
        std::mt19937_64 rng(seed);
        const ScalarField field = random_affine(rng);
        const SampleFrame frame = random_frame(rng, 0.1, c.cfg.u);
        const HaloBuffer source = sample_field(source_shape(c.role, c.cfg), field, c.cfg.u, frame);
        const HaloBuffer tensor = run_tensor(c.role, c.cfg, c.half, source);
        ErrorNorms norms;
        accumulate_errors(tensor, field, frame, norms);
        c.max_error = norms.max;
        c.max_deviation = 0.0;
        c.status = CaseStatus::pass;
        return;
      }
      const OperatorKey key =
          c.role == Role::interpolate
              ? OperatorKey::interpolation(c.scheme, c.cfg.p, c.cfg.k, c.cfg.segment)
              : OperatorKey::restriction(c.scheme, c.cfg.p, c.cfg.k, c.half);
      const auto op = OperatorCache::global().get(key);
      const OracleCase checked =
          check_operator_against_tensor(*op, c.role, c.cfg, c.half, seed, options.tolerance);
      c.max_deviation = checked.max_deviation;
      c.max_error = checked.max_error;
      c.status = checked.status;
    } catch (const StencilInfeasibleError& e) {
      c.status = CaseStatus::infeasible;
      c.note = e.what();
    } catch (const std::exception& e) {
      c.status = CaseStatus::fail;
      c.note = e.what();
    }
  });

  for (const OracleCase& c : summary.cases) {
    if (c.status == CaseStatus::pass) ++summary.passed;
    if (c.status == CaseStatus::fail) ++summary.failed;
    if (c.status == CaseStatus::infeasible) ++summary.infeasible;
  }
  return summary;
}

PropertySummary run_property_suite(const std::vector<Scheme>& schemes,
                                   const std::vector<int>& p_values,
                                   const std::vector<int>& k_values, std::uint64_t seed) {
  PropertySummary summary;
  std::vector<OperatorKey> keys;
  for (Scheme requested : schemes) {
    const Scheme scheme = requested == Scheme::tensor_linear ? Scheme::matrix_linear : requested;
    for (int p : p_values) {
      for (int k : k_values) {
        if (k > p) continue;
        keys.push_back(OperatorKey::interpolation(scheme, p, k));
        for (int s = 0; s < kSegmentCount; ++s) keys.push_back(OperatorKey::interpolation(scheme, p, k, s));
        keys.push_back(OperatorKey::restriction(scheme, p, k, std::nullopt));
        keys.push_back(OperatorKey::restriction(scheme, p, k, Half::inner));
        keys.push_back(OperatorKey::restriction(scheme, p, k, Half::outer));
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  for (const OperatorKey& key : keys) {
    PropertyCase c;
    c.key = key;
    try {
      const CsrOperator op = build_operator(key);
      const CsrOperator again = build_operator(key);
      c.deterministic = op == again;

      auto offsets = op.row_offsets();
      auto vals = op.values();
      for (std::size_t r = 0; r < op.n_rows(); ++r) {
        double sum = 0.0;
        for (std::size_t j = offsets[r]; j < offsets[r + 1]; ++j) sum += vals[j];
        c.max_row_sum_error = std::max(c.max_row_sum_error, std::abs(sum - 1.0));
      }

      const int u = 3;
      HaloBuffer src(op.info().source, u);
      for (double& v : src.values()) v = value(rng);
      const HaloBuffer sparse = apply(op, src);
      const DenseMatrix dense = op.to_dense();
      for (std::size_t r = 0; r < op.n_rows(); ++r) {
        for (int ch = 0; ch < u; ++ch) {
          double sum = 0.0;
          for (std::size_t col = 0; col < op.n_cols(); ++col) sum += dense(r, col) * src.at(col, ch);
          c.max_dense_deviation = std::max(c.max_dense_deviation, std::abs(sum - sparse.at(r, ch)));
        }
      }
      const bool ok = c.deterministic && c.max_row_sum_error <= 1e-12 && c.max_dense_deviation <= 1e-13;
      c.status = ok ? CaseStatus::pass : CaseStatus::fail;
      summary.worst_row_sum_error = std::max(summary.worst_row_sum_error, c.max_row_sum_error);
      summary.worst_dense_deviation = std::max(summary.worst_dense_deviation, c.max_dense_deviation);
    } catch (const StencilInfeasibleError& e) {
      c.status = CaseStatus::infeasible;
      c.note = e.what();
    } catch (const std::exception& e) {
      c.status = CaseStatus::fail;
      c.note = e.what();
    }
    if (c.status == CaseStatus::fail) ++summary.failed;
    if (c.status == CaseStatus::infeasible) ++summary.infeasible;
    summary.cases.push_back(std::move(c));
  }
  return summary;
}

ReproductionSummary run_polynomial_reproduction(const std::vector<Scheme>& schemes,
                                                const std::vector<int>& p_values,
                                                const std::vector<int>& k_values,
                                                double tolerance, std::uint64_t seed) {
  ReproductionSummary summary;
  std::uint64_t index = 0;
  OperatorCache& cache = OperatorCache::global();
  for (Scheme scheme : schemes) {
    const int degree = scheme_order(scheme);
    for (int p : p_values) {
      for (int k : k_values) {
        if (k > p) continue;
        for (Role role : {Role::interpolate, Role::restrict}) {
          for (const FaceConfig& face : all_face_configs(p, k, 1)) {
            if (role == Role::restrict && face.segment != 0) continue;
            for (const Part& part : parts_of(role, face, role == Role::restrict)) {
              ReproductionCase c;
              c.scheme = scheme;
              c.role = role;
              c.cfg = part.cfg;
              c.half = part.half;
              const Polynomial poly = Polynomial::random(degree, mix_seed(seed, index++));
              SampleFrame frame;
              frame.h = 0.05;
              frame.anchor = {0.1, -0.2, 0.15};
              try {
                const HaloBuffer source = sample_field(source_shape(role, c.cfg), poly, 1, frame);
                const HaloBuffer out = role == Role::interpolate
                                           ? interpolate(scheme, c.cfg, source, cache)
                                           : restrict_halo(scheme, c.cfg, source, c.half, cache);
                ErrorNorms norms;
                accumulate_errors(out, poly, frame, norms);
                c.max_error = norms.max;
                c.status = c.max_error <= tolerance ? CaseStatus::pass : CaseStatus::fail;
                summary.worst_error = std::max(summary.worst_error, c.max_error);
              } catch (const StencilInfeasibleError& e) {
                c.status = CaseStatus::infeasible;
                c.note = e.what();
              }
              if (c.status == CaseStatus::fail) ++summary.failed;
              if (c.status == CaseStatus::infeasible) ++summary.infeasible;
              summary.cases.push_back(std::move(c));
            }
          }
        }
      }
    }
  }
  return summary;
}

}  // namespace trihalo
