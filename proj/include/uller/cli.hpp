#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "uller/syntax.hpp"

namespace uller::cli {

/// Runs the command line `args` (without the program name). Returns 0 on
/// success, 1 on a domain error (bad file, parse, schema or evaluation
/// error), 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Stable JSON encoding of a desugared formula, as printed by `parse`.
nlohmann::json to_json(const Formula& f);
nlohmann::json to_json(const Term& t);

/// Truth values print with 12 digits after the point, other numbers with 12
/// significant digits.
std::string format_truth(double x);
std::string format_number(double x);

}  // namespace uller::cli
