#include "trihalo/report_io.hpp"

#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace trihalo {

namespace {

std::string number(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

}  // namespace

ReportFormat parse_format(const std::string& text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  throw ConfigError("unknown output format '" + text + "' (expected csv or json)");
}

void write_convergence(std::ostream& out, const std::vector<ConvergenceReport>& reports,
                       ReportFormat format) {
  if (format == ReportFormat::csv) {
    out << "scheme,role,p,k,h,err_max,err_l2,plateau\n";
    for (const ConvergenceReport& r : reports) {
      for (const ConvergenceRow& row : r.rows) {
        out << to_string(r.scheme) << ',' << to_string(r.role) << ',' << r.p << ',' << r.k
            << ',' << number(row.h) << ',' << number(row.err_max) << ',' << number(row.err_l2)
            << ',' << (row.plateau ? "true" : "false") << '\n';
      }
    }
    return;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const ConvergenceReport& r : reports) {
    for (const ConvergenceRow& row : r.rows) {
      rows.push_back({{"scheme", to_string(r.scheme)},
                      {"role", to_string(r.role)},
                      {"p", r.p},
                      {"k", r.k},
                      {"h", row.h},
                      {"err_max", row.err_max},
                      {"err_l2", row.err_l2},
                      {"plateau", row.plateau}});
    }
  }
  out << rows.dump(2) << '\n';
}

void write_bench(std::ostream& out, const std::vector<BenchReport>& reports,
                 ReportFormat format) {
  struct Row {
    const BenchReport* report;
    const char* phase;
    int reps;
    double mean;
    double total;
  };
  std::vector<Row> rows;
  for (const BenchReport& r : reports) {
    rows.push_back({&r, "apply", r.repetitions, r.apply_mean_ns, r.apply_total_ns});
    if (r.has_construction) {
      rows.push_back({&r, "construct", r.construction_repetitions, r.construct_mean_ns,
                      r.construct_total_ns});
    }
  }
  if (format == ReportFormat::csv) {
    out << "scheme,role,p,k,u,reps,mean_ns,total_ns,phase\n";
    for (const Row& row : rows) {
      const BenchReport& r = *row.report;
      out << to_string(r.scheme) << ',' << to_string(r.role) << ',' << r.p << ',' << r.k << ','
          << r.u << ',' << row.reps << ',' << number(row.mean) << ',' << number(row.total)
          << ',' << row.phase << '\n';
    }
    return;
  }
  nlohmann::json array = nlohmann::json::array();
  for (const Row& row : rows) {
    const BenchReport& r = *row.report;
    array.push_back({{"scheme", to_string(r.scheme)},
                     {"role", to_string(r.role)},
                     {"p", r.p},
                     {"k", r.k},
                     {"u", r.u},
                     {"reps", row.reps},
                     {"mean_ns", row.mean},
                     {"total_ns", row.total},
                     {"phase", row.phase}});
  }
  out << array.dump(2) << '\n';
}

}  // namespace trihalo
