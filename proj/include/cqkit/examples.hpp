#pragma once

#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cqkit/model.hpp"
#include "cqkit/verdict.hpp"

namespace cqkit {

// ---- interval regression ------------------------------------------------

/// One support point z^r of the regressors with its population moments.
struct IntervalCell {
    Vec z;
    double pi = 0.0;
    double mean_w0 = 0.0;
    double mean_w1 = 0.0;
    double var_w0 = 0.0;
    double var_w1 = 0.0;
};

struct IntervalRegressionSpec {
    std::vector<IntervalCell> cells;
    /// Declared or observed range of W0, W1 (for the compactness check).
    std::optional<std::pair<double, double>> w_range;
};

/// Polytope regularity conditions; compactness and the radius bound are advisory.
struct IntervalConditions {
    bool w_compact = false;
    double c0 = 0.0;
    double b0 = 0.0;
    double sup_w2 = 0.0;
    bool radius_ok = false;
    bool k_at_least_d = false;
    bool subsets_independent = false;
    bool nondegenerate = false;
    std::vector<std::string> messages;

    bool validated() const { return k_at_least_d && subsets_independent && nondegenerate; }
};

struct IntervalModel {
    MomentModel model;
    /// Rows j = 1..k are lower bounds, k+1..2k upper bounds: D_j theta <= b_j.
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> rhs;
    Mat D;
    Vec b;
    std::vector<Vec> vertices;
    IntervalConditions conditions;
};

/// sd(W 1{Z=z}) / pi for a cell with conditional mean m and variance v.
double interval_sigma(double pi, double mean, double var);

/// Throws ValidationError for a degenerate interval, a non-distribution pi,
/// or a support point whose first coordinate is not 1.
IntervalModel build_interval_regression(const IntervalRegressionSpec& spec);

struct IntervalRow {
    double w0 = 0.0;
    double w1 = 0.0;
    Vec z;
};

/// Cell frequencies, conditional means and (n-1) variances per distinct z.
IntervalRegressionSpec ingest_interval_data(const std::vector<IntervalRow>& rows);

/// Reads `w0,w1,z1,...,zd` CSV; errors name the offending data row.
std::vector<IntervalRow> read_interval_csv(std::istream& in);

/// Every vertex of {D theta <= b}, exactly.
std::vector<std::vector<Rational>> enumerate_vertices(const std::vector<std::vector<Rational>>& rows,
                                                      const std::vector<Rational>& rhs);

/// max p'theta over the polytope by the exact simplex.
double interval_lp_value(const IntervalModel& im, const Vec& p);

enum class FaceKind { Facet, LFace, Vertex };

const char* to_string(FaceKind k);

struct FaceClassification {
    FaceKind kind = FaceKind::Vertex;
    double value = 0.0;
    std::optional<std::size_t> facet_cell;
    std::vector<Vec> optimal_vertices;
    /// Rows tight at the optimal vertex (Vertex case).
    std::size_t active_rows = 0;
    NodeStatus predicted;
};

/// Throws ValidationError unless k >= d, every d-subset of z is independent and no cell is degenerate.
FaceClassification classify_support_face(const IntervalModel& im, const Vec& p);

/// k = 3, d = 2 hexagon: z = (1,-1), (1,0), (1,1), pi = 1/3, E(W0|z) = 0,
/// E(W1|z) = 1, unit conditional variances.
IntervalRegressionSpec hexagon_spec();

// ---- entry game -----------------------------------------------------------

struct EntryGameSpec {
    Rational pi11;
    Rational pi10;
    Rational pi01;
    /// Adds 0 <= theta_i <= 1 as explicit inequalities.
    bool explicit_bounds = false;
};

/// Box [-m, 1+m]^2 with m = 1/4, halved until m^2 < pi11 so the spurious
/// branch of the equality beyond (1,1) stays outside; the two inequalities,
/// then the equality. Throws ValidationError for an invalid spec.
MomentModel build_entry_game(const EntryGameSpec& spec);

/// Closed-form support point for p along (0,1) or (1,0); nullopt otherwise.
std::optional<Vec> entry_game_support_point(const EntryGameSpec& spec, const Vec& p);

/// Unit tangent ray of the identified curve at the p = (0,1) support point.
Vec entry_game_tangent_ray(const EntryGameSpec& spec);

}  // namespace cqkit
