#pragma once

// CSV and JSON serialization of harness reports.
//
// Convergence rows: scheme,role,p,k,h,err_max,err_l2,plateau
// Bench rows:       scheme,role,p,k,u,reps,mean_ns,total_ns,phase
// The JSON forms are arrays of objects with the same field names.

#include <iosfwd>
#include <vector>

#include "trihalo/harness.hpp"

namespace trihalo {

enum class ReportFormat { csv, json };
ReportFormat parse_format(const std::string& text);

void write_convergence(std::ostream& out, const std::vector<ConvergenceReport>& reports,
                       ReportFormat format);
void write_bench(std::ostream& out, const std::vector<BenchReport>& reports,
                 ReportFormat format);

}  // namespace trihalo
