// trihalo: build, verify, study and benchmark 3:1 halo transfer operators.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trihalo/csr.hpp"
#include "trihalo/face_transfer.hpp"
#include "trihalo/harness.hpp"
#include "trihalo/report_io.hpp"
#include "trihalo/taylor.hpp"

using namespace trihalo;

namespace {

int thread_count() {
  if (const char* env = std::getenv("TRIHALO_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

std::vector<Scheme> parse_schemes(const std::vector<std::string>& names) {
  std::vector<Scheme> schemes;
  for (const std::string& name : names) schemes.push_back(parse_scheme(name));
  return schemes;
}

void validate_sizes(const std::vector<int>& ps, const std::vector<int>& ks, int u) {
  for (int p : ps) {
    for (int k : ks) {
      if (k <= p) FaceConfig{Axis::x, Side::negative, 0, p, k, u}.validate();
    }
  }
  if (ps.empty() || ks.empty()) throw ConfigError("at least one p and one k are required");
  bool any = false;
  for (int p : ps) {
    for (int k : ks) any = any || k <= p;
  }
  if (!any) throw ConfigError("halo depth k must not exceed patch size p");
  if (u < 1) throw ConfigError("unknowns per cell u must be >= 1");
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct VerifyArgs {
  std::vector<std::string> schemes{"tensor_linear", "matrix_linear", "order2", "order3"};
  std::vector<int> p{1, 3, 4, 6};
  std::vector<int> k{1, 3};
  std::uint64_t seed = 1;
  bool verbose = false;
};

int run_verify(const VerifyArgs& args) {
  validate_sizes(args.p, args.k, 1);
  OracleOptions options;
  options.schemes = parse_schemes(args.schemes);
  options.p_values = args.p;
  options.k_values = args.k;
  options.seed = args.seed;
  options.threads = thread_count();
  const OracleSummary oracle = run_unit_oracle(options);

  std::printf("%-14s %-12s %6s %6s %10s %14s %14s\n", "scheme", "role", "pass", "fail",
              "infeasible", "max_dev", "max_err");
  for (Scheme scheme : options.schemes) {
    for (Role role : {Role::interpolate, Role::restrict}) {
      int pass = 0, fail = 0, infeasible = 0;
      double dev = 0.0, err = 0.0;
      for (const OracleCase& c : oracle.cases) {
        if (c.scheme != scheme || c.role != role) continue;
        if (c.status == CaseStatus::pass) ++pass;
        if (c.status == CaseStatus::fail) ++fail;
        if (c.status == CaseStatus::infeasible) ++infeasible;
        if (c.status != CaseStatus::infeasible) {
          dev = std::max(dev, c.max_deviation);
          err = std::max(err, c.max_error);
        }
      }
      std::printf("%-14s %-12s %6d %6d %10d %14.3e %14.3e\n", to_string(scheme).c_str(),
                  to_string(role).c_str(), pass, fail, infeasible, dev, err);
    }
  }
  for (const OracleCase& c : oracle.cases) {
    if (c.status == CaseStatus::fail || (args.verbose && c.status == CaseStatus::infeasible)) {
      std::printf("  %s: %s (deviation %.3e) %s\n", to_string(c.status).c_str(),
                  c.describe().c_str(), c.max_deviation, c.note.c_str());
    }
  }

  const PropertySummary props = run_property_suite(options.schemes, args.p, args.k);
  std::printf("properties: %zu operators, %d failed, %d infeasible, worst row-sum error %.3e, "
              "worst CSR/dense deviation %.3e\n",
              props.cases.size(), props.failed, props.infeasible, props.worst_row_sum_error,
              props.worst_dense_deviation);
  for (const PropertyCase& c : props.cases) {
    if (c.status == CaseStatus::fail) {
      std::printf("  fail: %s row-sum %.3e dense %.3e deterministic %d %s\n",
                  c.key.fingerprint().c_str(), c.max_row_sum_error, c.max_dense_deviation,
                  c.deterministic, c.note.c_str());
    }
  }

  std::vector<Scheme> high;
  for (Scheme s : options.schemes) {
    if (s == Scheme::order2 || s == Scheme::order3) high.push_back(s);
  }
  bool reproduction_ok = true;
  if (!high.empty()) {
    const ReproductionSummary repro = run_polynomial_reproduction(high, args.p, args.k);
    std::printf("polynomial reproduction: %zu cases, %d failed, %d infeasible, worst error %.3e\n",
                repro.cases.size(), repro.failed, repro.infeasible, repro.worst_error);
    reproduction_ok = repro.ok();
  }

  const bool ok = oracle.ok() && props.ok() && reproduction_ok;
  std::printf("verify: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

struct ConvergeArgs {
  std::vector<std::string> schemes{"order2"};
  std::string role = "interpolate";
  int p = 4;
  int k = 3;
  std::vector<double> h_geom;
  std::vector<double> h_list;
  std::string output;
  std::string format = "csv";
};

int run_converge(const ConvergeArgs& args) {
  const FaceConfig cfg{Axis::x, Side::negative, 0, args.p, args.k, 1};
  cfg.validate();
  std::vector<double> ladder = args.h_list;
  if (!args.h_geom.empty()) {
    if (args.h_geom.size() != 3) throw CLI::ValidationError("--h-geom", "expects HMAX HMIN COUNT");
    ladder = geometric_ladder(args.h_geom[0], args.h_geom[1], static_cast<int>(args.h_geom[2]));
  }
  if (ladder.empty()) ladder = geometric_ladder(0.1, 0.01, 6);
  const ReportFormat format = parse_format(args.format);
  const Role role = parse_role(args.role);

  std::vector<ConvergenceReport> reports;
  for (Scheme scheme : parse_schemes(args.schemes)) {
    reports.push_back(run_convergence(scheme, role, cfg, ladder));
    const ConvergenceReport& r = reports.back();
    std::fprintf(stderr,
                 "%s %s p=%d k=%d: order(max) %.3f over %d points%s, order(l2) %.3f, "
                 "max condition %.3e\n",
                 to_string(scheme).c_str(), to_string(role).c_str(), r.p, r.k, r.fit_max.order,
                 r.fit_max.points, r.fit_max.reliable ? "" : " (unreliable)", r.fit_l2.order,
                 r.max_condition);
    if (r.ill_conditioned_fits > 0) {
      std::fprintf(stderr, "warning: %d derivative fits exceed condition %.0e\n",
                   r.ill_conditioned_fits, kConditionWarningThreshold);
    }
  }
  Output out(args.output);
  write_convergence(out.stream(), reports, format);
  return 0;
}

struct BenchArgs {
  std::vector<std::string> schemes{"tensor_linear", "matrix_linear", "order2", "order3"};
  std::string role = "interpolate";
  std::vector<int> p{3, 6, 9};
  std::vector<int> k{3};
  int u = kDefaultUnknowns;
  int reps = 100;
  bool construction = false;
  std::string output;
  std::string format = "csv";
};

int run_bench_command(const BenchArgs& args) {
  validate_sizes(args.p, args.k, args.u);
  const ReportFormat format = parse_format(args.format);
  const Role role = parse_role(args.role);
  std::vector<BenchReport> reports;
  for (Scheme scheme : parse_schemes(args.schemes)) {
    for (int p : args.p) {
      for (int k : args.k) {
        if (k > p) continue;
        BenchOptions options;
        options.repetitions = args.reps;
        options.include_construction = args.construction;
        try {
          reports.push_back(
              run_bench(scheme, role, FaceConfig{Axis::y, Side::positive, 4, p, k, args.u}, options));
        } catch (const StencilInfeasibleError& e) {
          std::fprintf(stderr, "skipping %s p=%d k=%d: %s\n", to_string(scheme).c_str(), p, k,
                       e.what());
        }
      }
    }
  }
  Output out(args.output);
  write_bench(out.stream(), reports, format);
  return 0;
}

struct DumpArgs {
  std::string scheme = "matrix_linear";
  std::string role = "interpolate";
  int p = 4;
  int k = 3;
  std::optional<int> segment;
  std::string half;
  std::string output;
};

int run_dump(const DumpArgs& args) {
  const Role role = parse_role(args.role);
  FaceConfig{Axis::x, Side::negative, args.segment.value_or(0), args.p, args.k, 1}.validate();
  OperatorKey key;
  if (role == Role::interpolate) {
    key = OperatorKey::interpolation(parse_scheme(args.scheme), args.p, args.k,
                                     args.segment.value_or(OperatorKey::kWholeFace));
  } else {
    std::optional<Half> half;
    if (!args.half.empty()) half = parse_half(args.half);
    key = OperatorKey::restriction(parse_scheme(args.scheme), args.p, args.k, half);
  }
  const CsrOperator op = build_operator(key);
  Output out(args.output);
  write_dump(out.stream(), op);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpolation and restriction operators for 3:1 AMR halo exchange"};
  app.require_subcommand(1);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "run the oracle and property suites");
  verify_cmd->add_option("--schemes", verify.schemes)->delimiter(',');
  verify_cmd->add_option("--p", verify.p, "patch sizes")->delimiter(',');
  verify_cmd->add_option("--k", verify.k, "halo depths")->delimiter(',');
  verify_cmd->add_option("--seed", verify.seed);
  verify_cmd->add_flag("--verbose", verify.verbose, "list infeasible configurations");

  ConvergeArgs converge;
  auto* converge_cmd = app.add_subcommand("converge", "sin-field convergence study");
  converge_cmd->add_option("--scheme,--schemes", converge.schemes)->delimiter(',');
  converge_cmd->add_option("--role", converge.role)->check(CLI::IsMember({"interpolate", "restrict"}));
  converge_cmd->add_option("--p", converge.p);
  converge_cmd->add_option("--k", converge.k);
  auto* geom = converge_cmd->add_option("--h-geom", converge.h_geom, "HMAX HMIN COUNT")->expected(3);
  converge_cmd->add_option("--h-list", converge.h_list, "explicit h values")->delimiter(',')->excludes(geom);
  converge_cmd->add_option("--output,-o", converge.output);
  converge_cmd->add_option("--format", converge.format)->check(CLI::IsMember({"csv", "json"}));

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "fixed-repetition runtime benchmark");
  bench_cmd->add_option("--schemes,--scheme", bench.schemes)->delimiter(',');
  bench_cmd->add_option("--role", bench.role)->check(CLI::IsMember({"interpolate", "restrict"}));
  bench_cmd->add_option("--p", bench.p)->delimiter(',');
  bench_cmd->add_option("--k", bench.k)->delimiter(',');
  bench_cmd->add_option("--u", bench.u);
  bench_cmd->add_option("--reps", bench.reps)->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--construction", bench.construction, "also time operator construction");
  bench_cmd->add_option("--output,-o", bench.output);
  bench_cmd->add_option("--format", bench.format)->check(CLI::IsMember({"csv", "json"}));

  DumpArgs dump;
  auto* dump_cmd = app.add_subcommand("dump", "write an operator in triplet format");
  dump_cmd->add_option("--scheme", dump.scheme);
  dump_cmd->add_option("--role", dump.role)->check(CLI::IsMember({"interpolate", "restrict"}));
  dump_cmd->add_option("--p", dump.p);
  dump_cmd->add_option("--k", dump.k);
  auto* segment = dump_cmd->add_option("--segment", dump.segment);
  dump_cmd->add_option("--half", dump.half)->check(CLI::IsMember({"inner", "outer"}))->excludes(segment);
  dump_cmd->add_option("--output,-o", dump.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify_cmd) return run_verify(verify);
    if (*converge_cmd) return run_converge(converge);
    if (*bench_cmd) return run_bench_command(bench);
    if (*dump_cmd) return run_dump(dump);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
