#pragma once

// JSON forms of functions, reports and trees. Numbers are rounded to 12
// significant digits on the way out, so a printed document parses back to
// the same values and prints identically.

#include <string>

#include <json.hpp>

#include "hardynorm/bellman.hpp"
#include "hardynorm/constants.hpp"
#include "hardynorm/hardy.hpp"
#include "hardynorm/martingale.hpp"

namespace hardynorm::io {

using Json = nlohmann::ordered_json;

/// x rounded to 12 significant digits. Non-finite values pass through.
double round12(double x);

/// %.12g in the C locale.
std::string format_number(double x);

/// round12(x) as JSON; infinities become "inf" / "-inf", NaN becomes null.
Json number(double x);

/// {pieces: [{coeff_re, coeff_im, exponent, lo, hi | "inf"}]}
Json to_json(const PiecewisePowerFn& f);
PiecewisePowerFn piecewise_from_json(const Json& j);

/// {grid: [...], values_re: [...], values_im: [...]}
Json to_json(const SampledFn& f);
SampledFn sampled_from_json(const Json& j);

/// {passed, max_violation, witness_x, witness_y, points_checked}
Json to_json(const ViolationReport& r);
ViolationReport report_from_json(const Json& j);

/// {value, prob, children: [...]}
Json to_json(const MartingaleNode& node);
MartingaleNode node_from_json(const Json& j);
/// The tree depth is recovered from the longest path.
SimpleMartingale tree_from_json(const Json& j);

/// {C_pow_p, C, branch, argmax?, alpha_p?, boundary_value, converged}
Json to_json(const ConstantResult& r);

/// Throws DomainError when the document is neither a piecewise nor a
/// sampled function.
bool is_piecewise(const Json& j);

}  // namespace hardynorm::io
