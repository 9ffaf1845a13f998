#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cqkit/config.hpp"
#include "cqkit/model.hpp"
#include "cqkit/verdict.hpp"

namespace cqkit {

enum class CqKind { LICQ, MFCQ, ACQ };

const char* to_string(CqKind k);

struct CqVerdict {
    CqKind kind = CqKind::LICQ;
    Status status = Status::Inconclusive;
    nlohmann::json evidence;
};

/// Optimum of max s s.t. D_j t + s <= 0 (active inequalities),
/// D_j t = 0 (equalities), t in [-1,1]^d, s >= 0; solved in exact rationals.
struct MfcqProgram {
    bool stage1 = true;
    std::vector<double> equality_singular_values;
    /// False when there are no active inequalities (s unbounded).
    bool bounded = true;
    double s_star = 0.0;
    Vec witness;
};

MfcqProgram mfcq_program(const MomentModel& model, const Vec& theta, const Config& cfg);

/// max(0, max over 3600 points t of the box boundary of min_j -D_j t), d = 2,
/// inequality rows only.
double mfcq_bruteforce(const Mat& rows, int angles = 3600);

CqVerdict check_licq(const MomentModel& model, const Vec& theta, const Config& cfg);
CqVerdict check_mfcq(const MomentModel& model, const Vec& theta, const Config& cfg);
CqVerdict check_acq(const MomentModel& model, const Vec& theta, const Config& cfg);

/// Singular values of the stacked rows, descending.
std::vector<double> singular_values(const Mat& rows);

}  // namespace cqkit
