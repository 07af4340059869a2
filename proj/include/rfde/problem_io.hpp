#pragma once

#include <string>

#include "rfde/diagnostics.hpp"

namespace rfde {

/// A schema violation: where and why.
struct SchemaViolation {
    std::string path;
    std::string reason;
};

class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(std::vector<SchemaViolation> violations_)
        : std::runtime_error(format(violations_)), violations(std::move(violations_)) {}
    std::vector<SchemaViolation> violations;

private:
    static std::string format(const std::vector<SchemaViolation>& v);
};

/// Parsed problem file: kernel, history, horizon, solver settings and the
/// requested checks.
struct ProblemSpec {
    int n = 1;
    double r = 1.0;
    Kernel kernel;
    History history;
    double horizon = 1.0;
    SolverConfig solver;
    std::vector<std::string> checks;  // subset of {routes, regularity, forcing}

    ProblemSpec() : kernel(1.0, BVFunction::constant(-1.0, 0.0, Matrix::Zero(1, 1))) {}
};

/// Parse and validate a problem file (JSON syntax). Throws SchemaError with
/// the full violation list, or std::runtime_error on I/O failure.
ProblemSpec parse_problem(const std::string& path);
ProblemSpec parse_problem_text(const std::string& text);

/// One line of a verification report.
struct ReportLine {
    std::string check;
    std::string anchor;
    double lhs = 0.0;
    double rhs = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Serialize report lines (with a header object) to a deterministic JSON
/// string.
std::string report_to_json(const std::vector<ReportLine>& lines, std::uint64_t seed,
                           double tol_scale);

/// CSV with header t,<names> and 17 significant digits per value.
void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<double>& grid, const std::vector<Vector>& rows);

/// Format with 17 significant digits (deterministic across runs).
std::string format_double(double v);

}  // namespace rfde
