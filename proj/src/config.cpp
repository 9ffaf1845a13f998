#include "cqkit/config.hpp"

#include <cstdlib>
#include <string>

namespace cqkit {

Config Config::from_environment() {
    Config c;
    if (const char* env = std::getenv("CQKIT_SEED"); env != nullptr && *env != '\0') {
        c.seed = std::stoull(env, nullptr, 0);
    }
    return c;
}

void to_json(nlohmann::json& j, const Config& c) {
    j = nlohmann::json{
        {"seed", c.seed},
        {"parallel", c.parallel},
        {"tol_active", c.tol_active},
        {"eq_feas_tol", c.eq_feas_tol},
        {"penalty_exponents", {c.penalty_kmin, c.penalty_kmax}},
        {"multistart", c.multistart},
        {"newton_max_iter", c.newton_max_iter},
        {"restore_max_iter", c.restore_max_iter},
        {"cluster_radius", c.cluster_radius},
        {"value_tol", c.value_tol},
        {"hyperplane_feas_tol", c.hyperplane_feas_tol},
        {"prescan_per_axis", c.prescan_per_axis},
        {"support_sample", c.support_sample},
        {"boundary_warn", c.boundary_warn},
        {"tangent_scales", {c.tangent_kmin, c.tangent_kmax}},
        {"member_threshold", c.member_threshold},
        {"nonmember_threshold", c.nonmember_threshold},
        {"persistence", c.persistence},
        {"angle_grid", c.angle_grid},
        {"sphere_samples", c.sphere_samples},
        {"cone_tol", c.cone_tol},
        {"tangent_multistart", c.tangent_multistart},
        {"angle_stride", c.angle_stride},
        {"empirical_points", c.empirical_points},
        {"empirical_eta_min", c.empirical_eta_min},
        {"licq_tol", c.licq_tol},
        {"mfcq_tol", c.mfcq_tol},
        {"zero_tol", c.zero_tol},
        {"acq_interior", c.acq_interior},
        {"margin", c.margin},
        {"c_floor", c.c_floor},
        {"shell_scales", {c.shell_kmin, c.shell_kmax}},
        {"shell_points_global", c.shell_points_global},
        {"shell_points_support", c.shell_points_support},
        {"trend_slope", c.trend_slope},
        {"trend_min_shells", c.trend_min_shells},
        {"projection_failure_max", c.projection_failure_max},
        {"ascent_scan", c.ascent_scan},
        {"ascent_original_delta", c.ascent_original_delta},
        {"finite_eta", c.finite_eta},
    };
}

}  // namespace cqkit
