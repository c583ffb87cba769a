#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "uller/interpretation.hpp"
#include "uller/sem_fuzzy.hpp"
#include "uller/semantics.hpp"
#include "uller/syntax.hpp"

namespace uller {

enum class SemanticsKind { Classical, Prob, Viterbi, Fuzzy, Sample };

std::string_view to_string(SemanticsKind k);
/// Throws InvalidConfig for an unknown name.
SemanticsKind semantics_from_string(std::string_view name);

struct SemanticsConfig {
  SemanticsKind kind = SemanticsKind::Prob;
  TNorm family = TNorm::Product;
  std::optional<TNorm> statement_family;
  std::size_t samples = 10000;  // Sample only
  std::uint64_t seed = 0;       // Sample only
  std::size_t threads = 1;
  EvalOptions eval;

  FuzzyOptions fuzzy() const { return {family, statement_family, eval}; }
};

/// Truth value of `f` under the chosen semantics (classical as 0/1, sampling
/// as the Monte Carlo mean).
double evaluate(const Formula& f, const Interpretation& interp, const SemanticsConfig& config);

}  // namespace uller
