#include "rfde/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rfde {

using nlohmann::json;

std::string SchemaError::format(const std::vector<SchemaViolation>& v) {
    std::ostringstream os;
    os << "problem file invalid:";
    for (const auto& s : v) os << "\n  " << s.path << ": " << s.reason;
    return os.str();
}

namespace {

class Collector {
public:
    void add(const std::string& path, const std::string& reason) { violations_.push_back({path, reason}); }
    void raise_if_any() const {
        if (!violations_.empty()) throw SchemaError(violations_);
    }
    bool empty() const { return violations_.empty(); }

private:
    std::vector<SchemaViolation> violations_;
};

Matrix parse_matrix(const json& j, int n, const std::string& path, Collector& errs) {
    if (!j.is_array() || j.empty()) {
        errs.add(path, "expected a matrix (array of rows)");
        return Matrix::Zero(n, n);
    }
    Matrix m = Matrix::Zero(n, n);
    if (static_cast<int>(j.size()) != n) {
        errs.add(path, "expected " + std::to_string(n) + " rows");
        return m;
    }
    for (int i = 0; i < n; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n) {
            errs.add(path + "[" + std::to_string(i) + "]", "expected " + std::to_string(n) + " entries");
            return m;
        }
        for (int c = 0; c < n; ++c) {
            const auto& e = row[static_cast<std::size_t>(c)];
            if (!e.is_number()) {
                errs.add(path, "matrix entries must be numbers");
                return m;
            }
            m(i, c) = e.get<double>();
        }
    }
    return m;
}

Vector parse_vector(const json& j, int n, const std::string& path, Collector& errs) {
    Vector v = Vector::Zero(n);
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        errs.add(path, "expected a vector of length " + std::to_string(n));
        return v;
    }
    for (int i = 0; i < n; ++i) {
        const auto& e = j[static_cast<std::size_t>(i)];
        if (!e.is_number()) {
            errs.add(path, "vector entries must be numbers");
            return v;
        }
        v(i) = e.get<double>();
    }
    return v;
}

std::pair<double, double> parse_interval(const json& j, const std::string& path, Collector& errs) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        errs.add(path, "expected [lo, hi]");
        return {0.0, 1.0};
    }
    const double lo = j[0].get<double>(), hi = j[1].get<double>();
    if (!(hi > lo)) errs.add(path, "interval must have positive length");
    return {lo, hi};
}

// Matrix polynomial: array of matrix coefficients, ascending degree.
MatPoly parse_matpoly(const json& j, int n, const std::string& path, Collector& errs) {
    if (!j.is_array() || j.empty()) {
        errs.add(path, "expected a list of matrix coefficients");
        return MatPoly::zero(n, n);
    }
    std::vector<Matrix> coef;
    for (std::size_t k = 0; k < j.size(); ++k)
        coef.push_back(parse_matrix(j[k], n, path + "[" + std::to_string(k) + "]", errs));
    return errs.empty() ? MatPoly(std::move(coef)) : MatPoly::zero(n, n);
}

MatPoly parse_vecpoly(const json& j, int n, const std::string& path, Collector& errs) {
    if (!j.is_array() || j.empty()) {
        errs.add(path, "expected a list of vector coefficients");
        return MatPoly::zero(n, 1);
    }
    std::vector<Matrix> coef;
    for (std::size_t k = 0; k < j.size(); ++k)
        coef.push_back(parse_vector(j[k], n, path + "[" + std::to_string(k) + "]", errs));
    return errs.empty() ? MatPoly(std::move(coef)) : MatPoly::zero(n, 1);
}

}  // namespace

ProblemSpec parse_problem_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::vector<SchemaViolation>{{"(document)", std::string("not valid JSON: ") + e.what()}});
    }
    Collector errs;

    auto require_number = [&](const char* key, double fallback) -> double {
        if (!j.contains(key) || !j[key].is_number()) {
            errs.add(key, "required number");
            return fallback;
        }
        return j[key].get<double>();
    };

    const int n = static_cast<int>(require_number("n", 1));
    const double r = require_number("r", 1.0);
    const double horizon = require_number("horizon", 1.0);
    if (n < 1) errs.add("n", "must be at least 1");
    if (!(r > 0.0)) errs.add("r", "must be positive");
    if (!(horizon > 0.0)) errs.add("horizon", "must be positive");
    errs.raise_if_any();

    // Kernel.
    std::vector<BVFunction::Atom> atoms;
    std::optional<PiecewisePoly> density;
    if (!j.contains("kernel") || !j["kernel"].is_object()) {
        errs.add("kernel", "required object");
    } else {
        const auto& jk = j["kernel"];
        if (jk.contains("atoms")) {
            if (!jk["atoms"].is_array()) errs.add("kernel.atoms", "expected an array");
            else
                for (std::size_t i = 0; i < jk["atoms"].size(); ++i) {
                    const auto& ja = jk["atoms"][i];
                    const std::string path = "kernel.atoms[" + std::to_string(i) + "]";
                    if (!ja.is_object() || !ja.contains("theta") || !ja["theta"].is_number()) {
                        errs.add(path + ".theta", "required number");
                        continue;
                    }
                    const double theta = ja["theta"].get<double>();
                    if (theta < -r - 1e-12 || theta > 1e-12)
                        errs.add(path + ".theta", "must lie in [-r, 0]");
                    if (!ja.contains("matrix")) {
                        errs.add(path + ".matrix", "required");
                        continue;
                    }
                    atoms.push_back({theta, parse_matrix(ja["matrix"], n, path + ".matrix", errs)});
                }
        }
        if (jk.contains("density")) {
            if (!jk["density"].is_array()) errs.add("kernel.density", "expected an array of pieces");
            else if (!jk["density"].empty()) {
                std::vector<PiecewisePoly::Piece> pieces;
                for (std::size_t i = 0; i < jk["density"].size(); ++i) {
                    const auto& jp = jk["density"][i];
                    const std::string path = "kernel.density[" + std::to_string(i) + "]";
                    if (!jp.is_object() || !jp.contains("interval") || !jp.contains("coeffs")) {
                        errs.add(path, "piece needs interval and coeffs");
                        continue;
                    }
                    const auto [lo, hi] = parse_interval(jp["interval"], path + ".interval", errs);
                    pieces.push_back({lo, hi, parse_matpoly(jp["coeffs"], n, path + ".coeffs", errs)});
                }
                errs.raise_if_any();
                try {
                    density = PiecewisePoly(-r, 0.0, std::move(pieces));
                } catch (const std::exception& e) {
                    errs.add("kernel.density", e.what());
                }
            }
        }
    }

    // History.
    PiecewisePoly hist_pieces = PiecewisePoly::zero(-r, 0.0, n, 1);
    Vector value_at_zero = Vector::Zero(n);
    double p = 1.0;
    if (!j.contains("history") || !j["history"].is_object()) {
        errs.add("history", "required object");
    } else {
        const auto& jh = j["history"];
        if (!jh.contains("valueAtZero")) {
            errs.add("history.valueAtZero", "required (histories must be defined at 0)");
        } else {
            value_at_zero = parse_vector(jh["valueAtZero"], n, "history.valueAtZero", errs);
        }
        if (jh.contains("p")) {
            if (jh["p"].is_number()) p = jh["p"].get<double>();
            else if (jh["p"].is_string() && (jh["p"] == "inf" || jh["p"] == "infinity"))
                p = std::numeric_limits<double>::infinity();
            else
                errs.add("history.p", "number or \"inf\"");
            if (!(p >= 1.0)) errs.add("history.p", "must be in [1, inf]");
        }
        if (jh.contains("pieces") && jh["pieces"].is_array() && !jh["pieces"].empty()) {
            std::vector<PiecewisePoly::Piece> pieces;
            for (std::size_t i = 0; i < jh["pieces"].size(); ++i) {
                const auto& jp = jh["pieces"][i];
                const std::string path = "history.pieces[" + std::to_string(i) + "]";
                if (!jp.is_object() || !jp.contains("interval") || !jp.contains("coeffs")) {
                    errs.add(path, "piece needs interval and coeffs");
                    continue;
                }
                const auto [lo, hi] = parse_interval(jp["interval"], path + ".interval", errs);
                pieces.push_back({lo, hi, parse_vecpoly(jp["coeffs"], n, path + ".coeffs", errs)});
            }
            errs.raise_if_any();
            std::vector<PiecewisePoly::PointValue> pvs;
            if (jh.contains("pointValues") && jh["pointValues"].is_array())
                for (std::size_t i = 0; i < jh["pointValues"].size(); ++i) {
                    const auto& jv = jh["pointValues"][i];
                    const std::string path = "history.pointValues[" + std::to_string(i) + "]";
                    if (!jv.is_object() || !jv.contains("t") || !jv["t"].is_number() ||
                        !jv.contains("value")) {
                        errs.add(path, "needs t and value");
                        continue;
                    }
                    pvs.push_back({jv["t"].get<double>(),
                                   parse_vector(jv["value"], n, path + ".value", errs)});
                }
            try {
                hist_pieces = PiecewisePoly(-r, 0.0, std::move(pieces), std::move(pvs));
            } catch (const std::exception& e) {
                errs.add("history.pieces", e.what());
            }
        }
    }

    // Solver config.
    SolverConfig cfg;
    if (j.contains("solver")) {
        const auto& js = j["solver"];
        if (!js.is_object()) {
            errs.add("solver", "expected an object");
        } else {
            if (js.contains("h")) cfg.h = js["h"].get<double>();
            if (js.contains("quadOrder")) cfg.quad_order = js["quadOrder"].get<int>();
            if (js.contains("picardTol")) cfg.picard_tol = js["picardTol"].get<double>();
            if (js.contains("picardMax")) cfg.picard_max = js["picardMax"].get<int>();
            if (js.contains("alignBreakpoints")) cfg.align_breakpoints = js["alignBreakpoints"].get<bool>();
            try {
                cfg.validate();
            } catch (const std::exception& e) {
                errs.add("solver", e.what());
            }
        }
    }

    std::vector<std::string> checks;
    if (j.contains("checks")) {
        if (!j["checks"].is_array()) errs.add("checks", "expected an array of strings");
        else
            for (const auto& c : j["checks"]) {
                if (!c.is_string()) {
                    errs.add("checks", "expected an array of strings");
                    break;
                }
                const std::string s = c.get<std::string>();
                if (s != "routes" && s != "regularity" && s != "forcing")
                    errs.add("checks", "unknown check \"" + s + "\"");
                else
                    checks.push_back(s);
            }
    }
    if (checks.empty()) checks = {"routes", "regularity", "forcing"};

    errs.raise_if_any();

    ProblemSpec spec;
    spec.n = n;
    spec.r = r;
    spec.horizon = horizon;
    spec.solver = cfg;
    spec.checks = std::move(checks);
    try {
        spec.kernel = Kernel(r, BVFunction(-r, 0.0, Matrix::Zero(n, n), std::move(atoms),
                                           std::move(density)));
    } catch (const std::exception& e) {
        throw SchemaError(std::vector<SchemaViolation>{{"kernel", e.what()}});
    }
    spec.history.r = r;
    spec.history.pieces = std::move(hist_pieces);
    spec.history.value_at_zero = std::move(value_at_zero);
    spec.history.p = p;
    try {
        spec.history.validate();
    } catch (const std::exception& e) {
        throw SchemaError(std::vector<SchemaViolation>{{"history", e.what()}});
    }
    return spec;
}

ProblemSpec parse_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str());
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string report_to_json(const std::vector<ReportLine>& lines, std::uint64_t seed,
                           double tol_scale) {
    json out;
    out["seed"] = seed;
    out["tolScale"] = tol_scale;
    bool all = true;
    json arr = json::array();
    for (const auto& l : lines) {
        json e;
        e["check"] = l.check;
        e["anchor"] = l.anchor;
        e["lhs"] = format_double(l.lhs);
        e["rhs"] = format_double(l.rhs);
        e["tol"] = format_double(l.tol);
        e["pass"] = l.pass;
        arr.push_back(e);
        all = all && l.pass;
    }
    out["checks"] = arr;
    out["pass"] = all;
    return out.dump(2) + "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& names,
               const std::vector<double>& grid, const std::vector<Vector>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << "t";
    for (const auto& nm : names) out << "," << nm;
    out << "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << format_double(grid[i]);
        for (int c = 0; c < rows[i].size(); ++c) out << "," << format_double(rows[i](c));
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rfde
