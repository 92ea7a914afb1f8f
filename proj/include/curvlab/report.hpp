#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace curvlab::verify {

enum class Verdict { Pass, EqualityCase, Fail };
const char* to_string(Verdict v);

using ParamValue = std::variant<double, std::string>;
using Params = std::map<std::string, ParamValue>;

struct Tolerances {
    double abs = 1e-8;
    double equality_rel = 1e-6;
    double identity_rel = 1e-5;  // divergence identity residual
    double monotone = 1e-8;      // relative drop allowed in monotone quantities
};

/// One inequality lhs <= rhs evaluated numerically.
struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;      // rhs - lhs
    double rel_slack = 0.0;  // slack / max(|lhs|, |rhs|)
    double tolerance = 0.0;
    Verdict verdict = Verdict::Fail;
    std::vector<int> grid;
    Params params;
    double refinement_estimate = 0.0;
};

/// Fills slack, rel_slack, tolerance and verdict from lhs, rhs and the refinement estimate.
void finalize(InequalityReport& r, const Tolerances& tol);

double param_number(const InequalityReport& r, const std::string& key);

nlohmann::json to_json(const InequalityReport& r);

struct ErrorRecord {
    std::string check;
    std::string kind;
    std::string message;
    std::map<std::string, double> details;
};

nlohmann::json to_json(const ErrorRecord& e);

/// {"records": [...], "errors": [...]}
nlohmann::json run_json(const std::vector<InequalityReport>& records, const std::vector<ErrorRecord>& errors);

} // namespace curvlab::verify
