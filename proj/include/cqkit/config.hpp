#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

namespace cqkit {

/// Every numeric knob used by the checkers. Defaults are the documented
/// ones; reports print the full snapshot.
struct Config {
    std::uint64_t seed = 0x5EED;
    int parallel = 1;

    // model / projection
    double tol_active = 1e-7;
    double eq_feas_tol = 1e-12;
    int penalty_kmin = 2;
    int penalty_kmax = 8;
    int multistart = 16;
    int newton_max_iter = 60;
    int restore_max_iter = 80;

    // support
    double cluster_radius = 1e-4;
    double value_tol = 1e-8;
    double hyperplane_feas_tol = 1e-13;
    int prescan_per_axis = 21;
    int support_sample = 200;
    double boundary_warn = 1e-6;

    // cones
    int tangent_kmin = 3;
    int tangent_kmax = 14;
    double member_threshold = 0.05;
    double nonmember_threshold = 0.2;
    int persistence = 4;
    int angle_grid = 720;
    int sphere_samples = 2000;
    double cone_tol = 1e-9;
    int tangent_multistart = 4;
    int angle_stride = 10;
    int empirical_points = 32;
    double empirical_eta_min = 1e-6;

    // constraint qualifications
    double licq_tol = 1e-8;
    double mfcq_tol = 1e-7;
    double zero_tol = 1e-12;
    int acq_interior = 33;

    // assumptions
    double margin = 1e-3;
    double c_floor = 1e-3;
    int shell_kmin = 3;
    int shell_kmax = 10;
    int shell_points_global = 400;
    int shell_points_support = 200;
    double trend_slope = -0.3;
    int trend_min_shells = 5;
    double projection_failure_max = 0.05;
    int ascent_scan = 3600;
    double ascent_original_delta = -1e-6;
    double finite_eta = 1e-2;

    /// Applies CQKIT_SEED from the environment when set.
    static Config from_environment();
};

void to_json(nlohmann::json& j, const Config& c);

}  // namespace cqkit
