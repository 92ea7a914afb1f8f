#include "curvlab/report.hpp"

#include <algorithm>
#include <cmath>

#include "curvlab/error.hpp"

namespace curvlab::verify {

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::EqualityCase: return "equality_case";
    case Verdict::Fail: return "fail";
    }
    return "fail";
}

void finalize(InequalityReport& r, const Tolerances& tol) {
    r.slack = r.rhs - r.lhs;
    const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.rel_slack = scale > 0.0 ? r.slack / scale : 0.0;
    r.tolerance = tol.abs + r.refinement_estimate;
    if (std::abs(r.slack) <= tol.equality_rel * scale) {
        r.verdict = Verdict::EqualityCase;
    } else if (r.slack >= -r.tolerance) {
        r.verdict = Verdict::Pass;
    } else {
        r.verdict = Verdict::Fail;
    }
}

double param_number(const InequalityReport& r, const std::string& key) {
    const auto it = r.params.find(key);
    if (it == r.params.end() || !std::holds_alternative<double>(it->second)) {
        throw Error(ErrorKind::Precondition, "report " + r.name + " has no numeric parameter " + key);
    }
    return std::get<double>(it->second);
}

nlohmann::json to_json(const InequalityReport& r) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : r.params) {
        if (std::holds_alternative<double>(v)) {
            params[k] = std::get<double>(v);
        } else {
            params[k] = std::get<std::string>(v);
        }
    }
    return {{"name", r.name},
            {"lhs", r.lhs},
            {"rhs", r.rhs},
            {"slack", r.slack},
            {"rel_slack", r.rel_slack},
            {"tolerance", r.tolerance},
            {"verdict", to_string(r.verdict)},
            {"grid", r.grid},
            {"params", params},
            {"refinement_estimate", r.refinement_estimate}};
}

nlohmann::json to_json(const ErrorRecord& e) {
    return {{"check", e.check}, {"kind", e.kind}, {"message", e.message}, {"details", e.details}};
}

nlohmann::json run_json(const std::vector<InequalityReport>& records, const std::vector<ErrorRecord>& errors) {
    nlohmann::json out = {{"records", nlohmann::json::array()}, {"errors", nlohmann::json::array()}};
    for (const auto& r : records) out["records"].push_back(to_json(r));
    for (const auto& e : errors) out["errors"].push_back(to_json(e));
    return out;
}

} // namespace curvlab::verify
