#pragma once

#include <string>

#include "cqkit/model.hpp"

namespace cqkit {

struct ModelSource {
    std::string text;
    std::string origin;
};

/// Parses the line-oriented model language:
///
///   params theta[2] in box(-1,1)
///   ineq: theta2^3 - theta1
///   eq: 2/3 - theta1 - theta2 + theta1*theta2
///   direction: (0,1)
///
/// ';' also ends a statement and '#' starts a comment.
MomentModel parse_model(const ModelSource& source);
MomentModel parse_model(const std::string& text);

/// Canonical text; parse_model(serialize_model(m)) == m.
std::string serialize_model(const MomentModel& model);

/// FNV-1a 64-bit hash of the canonical text, as 16 hex digits.
std::string model_fingerprint(const MomentModel& model);

}  // namespace cqkit
