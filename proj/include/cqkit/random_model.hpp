#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cqkit/config.hpp"
#include "cqkit/model.hpp"

namespace cqkit {

struct RandomModelOptions {
    /// Coefficient denominators; numerators are drawn from [-den, den].
    int denominator = 4;
    /// 1 gives linear constraints only.
    int max_degree = 2;
    int max_inequalities = 3;
    double equality_probability = 0.15;
    /// Support points closer than this to the box boundary are rejected.
    double box_margin = 0.05;
    int max_attempts = 50;
};

struct RandomInstance {
    MomentModel model;
    Vec direction;
    /// Point the model was built to be feasible at.
    Vec anchor;
    std::uint64_t seed = 0;
    int attempts = 0;
};

/// d = 2, degree <= 2, rational coefficients, feasible at a random anchor by
/// construction. Instances whose support points touch the box are redrawn.
RandomInstance random_instance(std::uint64_t seed, const Config& cfg, const RandomModelOptions& opts = {});

/// Seed of the i-th model in a sweep.
std::uint64_t sweep_seed(std::uint64_t seed, std::size_t index);

struct RandomAuditEntry {
    std::uint64_t seed = 0;
    std::string fingerprint;
    std::string model_text;
    Vec direction;
    std::size_t points = 0;
    std::size_t verdicts = 0;
    std::size_t inconclusive = 0;
    std::vector<std::string> violations;
    /// Full report JSON (timings removed).
    nlohmann::json report;
};

struct RandomAuditSummary {
    std::vector<RandomAuditEntry> entries;
    std::size_t violations = 0;
    std::size_t verdicts = 0;
    std::size_t inconclusive = 0;

    double inconclusive_rate() const { return verdicts ? double(inconclusive) / double(verdicts) : 0.0; }
};

/// Builds and fully checks count models; entries are in sweep order
/// whatever the thread count.
RandomAuditSummary audit_random(std::size_t count, std::uint64_t seed, const Config& cfg,
                                const RandomModelOptions& opts = {}, int threads = 1);

}  // namespace cqkit
