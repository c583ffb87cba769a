#pragma once

#include "uller/interpretation.hpp"
#include "uller/semantics.hpp"
#include "uller/syntax.hpp"

namespace uller {

/// Boolean semantics: forall/and = min, not = 1 - x, statements bind the mode
/// of their distribution (lowest codomain index on ties). Quantifiers stop at
/// the first deciding element.
bool eval_classical(const Formula& f, const Interpretation& interp, const Env& env = {},
                    const EvalOptions& options = {});

}  // namespace uller
