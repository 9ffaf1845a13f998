#pragma once

#include <utility>
#include <vector>

#include "cqkit/config.hpp"
#include "cqkit/model.hpp"

namespace cqkit {

enum class Membership { Member, NonMember, Inconclusive };

const char* to_string(Membership m);

/// Active gradient rows shorter than this are treated as exactly zero.
inline constexpr double kVanishingGradient = 1e-7;

/// Linearized cone at a feasible point: rows D_j of the active constraints.
struct ConeDescription {
    Vec base_point;
    Mat rows;
    std::vector<bool> equality;
    std::vector<std::size_t> indices;
    /// d = 2 only: unit rays on the boundary of L (both rays of a line).
    std::vector<Vec> generator_rays;
    /// d = 2 only: true when L is the whole plane.
    bool full_space = false;
};

ConeDescription linearized_cone(const MomentModel& model, const Vec& theta, double tol_active);

/// t in L up to tol * |D_j| per row.
bool in_linearized_cone(const ConeDescription& cone, const Vec& t, double tol);

struct MembershipResult {
    Membership verdict = Membership::Inconclusive;
    /// (k, r_k) for the scales that were evaluated.
    std::vector<std::pair<int, double>> trace;
};

/// Shrinking-step test r_k = d(theta + 2^-k t, Theta_I) / 2^-k.
MembershipResult tangent_membership(const MomentModel& model, const Vec& theta, const Vec& t, const Config& cfg);

struct TangentSample {
    std::vector<Vec> tested;
    std::vector<Membership> verdicts;
    std::vector<Vec> members;
    /// Secant directions (x - theta)/|x - theta| from feasible x near theta.
    std::vector<Vec> empirical;
    int inconclusive = 0;
};

TangentSample tangent_cone_sample(const MomentModel& model, const Vec& theta, const Config& cfg);

/// Secant directions from feasible points found by projecting random points
/// of B(theta, eta).
std::vector<Vec> empirical_directions(const MomentModel& model, const Vec& theta, double eta, const Config& cfg);

/// Test directions of L: the 720-angle grid (d = 2) or a sphere sample,
/// filtered by L, plus the generator rays.
std::vector<Vec> linearized_directions(const ConeDescription& cone, const Config& cfg);

/// d = 2: maximal angular arcs (start, length) of L, counter-clockwise.
/// A single ray has length 0; the whole plane is one arc of length 2*pi.
std::vector<std::pair<double, double>> linearized_arcs(const ConeDescription& cone, const Config& cfg);

/// max p't over the list; -infinity for an empty list.
double cone_max_inner(const std::vector<Vec>& directions, const Vec& p);

}  // namespace cqkit
