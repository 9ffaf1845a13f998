#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "cqkit/config.hpp"
#include "cqkit/model.hpp"
#include "cqkit/support.hpp"
#include "cqkit/verdict.hpp"

namespace cqkit {

struct AssumptionVerdict {
    Node id = Node::A2;
    Status status = Status::Inconclusive;
    nlohmann::json evidence;
};

/// Shell estimates of a minorant constant: min ratio per shell 2^-k.
struct MinorantTrace {
    std::vector<int> shells;
    std::vector<double> c_hat;       // +inf when a shell had no admissible sample
    std::vector<Vec> argmin;         // sample attaining c_hat (empty Vec if none)
    int samples = 0;
    int projection_failures = 0;
};

/// Least-squares slope of log c_hat against k over the finite shells;
/// NaN with fewer than two finite positive values.
double trend_slope(const MinorantTrace& trace);

AssumptionVerdict check_degeneracy(const MomentModel& model, const Vec& p, const Vec& theta, const Config& cfg);
AssumptionVerdict check_minorant_global(const MomentModel& model, const Vec& theta, const Config& cfg);
AssumptionVerdict check_minorant_support(const MomentModel& model, const SupportSolution& solution, const Vec& theta,
                                         const Config& cfg);
AssumptionVerdict check_cone_pointy(const MomentModel& model, const Vec& p, const Vec& theta, const Config& cfg);
AssumptionVerdict check_descent(const MomentModel& model, const Vec& theta, const Config& cfg);
AssumptionVerdict check_ascent(const MomentModel& model, const Vec& p, const Vec& theta, const Config& cfg);

/// Finite-radius form of A5: max p't over secant directions from feasible
/// points in B(theta, eta) for a decreasing radius schedule.
AssumptionVerdict check_cone_pointy_finite(const MomentModel& model, const Vec& p, const Vec& theta,
                                           const Config& cfg);
/// A7 with the half-space p't >= delta (delta = cfg.ascent_original_delta).
AssumptionVerdict check_ascent_original(const MomentModel& model, const Vec& p, const Vec& theta, const Config& cfg);

/// min over unit t with p't >= delta of max{D_j t (active ineq), |D_j t| (eq)}.
struct AscentValue {
    double value = 0.0;
    Vec argmin;
};
AscentValue ascent_value(const MomentModel& model, const Vec& p, const Vec& theta, double delta, const Config& cfg);

}  // namespace cqkit
