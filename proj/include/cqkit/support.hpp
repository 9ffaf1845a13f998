#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqkit/config.hpp"
#include "cqkit/model.hpp"

namespace cqkit {

enum class Multiplicity { Singleton, NonSingleton, Unresolved };

const char* to_string(Multiplicity m);

struct SupportPoint {
    Vec point;
    ActiveSet active;
    /// Gradient rows of the active constraints, in active.all() order.
    Mat gradients;
};

struct Hyperplane {
    Vec p;
    double offset = 0.0;
};

/// Segment [a, b] of the support set (a == b for an isolated point).
struct SupportPiece {
    Vec a;
    Vec b;
};

struct SupportSolution {
    Vec direction;
    double value = 0.0;
    std::vector<SupportPoint> points;
    Multiplicity multiplicity = Multiplicity::Unresolved;
    /// d = 2: exact pieces of S; otherwise a feasible sample of S on H.
    std::vector<SupportPiece> pieces;
    std::vector<Vec> sample;
    std::vector<std::string> warnings;

    Hyperplane hyperplane() const { return {direction, value}; }
};

/// Maximizes p'theta over the identified set. Throws EmptyIdentifiedSet
/// when no feasible point is located.
SupportSolution solve_support(const MomentModel& model, const Vec& p, const Config& cfg);

/// Distance to S(p); nullopt when the support set is unresolved.
std::optional<double> distance_to_support_set(const SupportSolution& solution, const Vec& theta);

/// Orthonormal basis of the orthogonal complement of p (columns).
Mat hyperplane_basis(const Vec& p);

}  // namespace cqkit
