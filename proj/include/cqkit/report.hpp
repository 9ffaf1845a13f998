#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cqkit/config.hpp"
#include "cqkit/model.hpp"
#include "cqkit/support.hpp"
#include "cqkit/theorem.hpp"
#include "cqkit/verdict.hpp"

namespace cqkit {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

struct CheckOptions {
    /// Also run the finite-radius A5 and the original-form A7 variants.
    bool variant_cross_checks = true;
};

struct PointReport {
    Vec point;
    std::size_t active_count = 0;
    NodeStatus nodes;
    /// node name -> evidence
    nlohmann::json evidence;
    nlohmann::json cross_checks;
    std::vector<Violation> violations;
};

struct CheckReport {
    std::string fingerprint;
    Vec direction;
    SupportSolution support;
    std::vector<PointReport> points;
    nlohmann::json timings;

    bool audit_clean() const;
    std::size_t violation_count() const;
    /// Index of the support point closest to target.
    std::size_t closest_point(const Vec& target) const;
};

/// Support, constraint qualifications, assumptions and theorem audit at
/// every support point. Throws EmptyIdentifiedSet like solve_support.
CheckReport run_check(const MomentModel& model, const Vec& direction, const Config& cfg,
                      const CheckOptions& opts = {});

/// Schema-1 JSON; everything except "timings" is deterministic.
nlohmann::json report_json(const CheckReport& report, const Config& cfg);

/// "node: expected X, got Y" for every expected node that differs.
std::vector<std::string> golden_mismatches(const NodeStatus& got, const NodeStatus& expected);

/// Human-readable summary.
std::string report_text(const CheckReport& report);

}  // namespace cqkit
