#include "uller/evaluate.hpp"

#include <string>

#include "uller/sem_classical.hpp"
#include "uller/sem_prob.hpp"
#include "uller/sem_sample.hpp"

namespace uller {

std::string_view to_string(SemanticsKind k) {
  switch (k) {
    case SemanticsKind::Classical: return "classical";
    case SemanticsKind::Prob: return "prob";
    case SemanticsKind::Viterbi: return "viterbi";
    case SemanticsKind::Fuzzy: return "fuzzy";
    case SemanticsKind::Sample: return "sample";
  }
  return "?";
}

SemanticsKind semantics_from_string(std::string_view name) {
  if (name == "classical") return SemanticsKind::Classical;
  if (name == "prob") return SemanticsKind::Prob;
  if (name == "viterbi") return SemanticsKind::Viterbi;
  if (name == "fuzzy") return SemanticsKind::Fuzzy;
  if (name == "sample") return SemanticsKind::Sample;
  throw Error(ErrorKind::InvalidConfig,
              "unknown semantics '" + std::string(name) +
                  "' (classical, prob, viterbi, fuzzy, sample)");
}

double evaluate(const Formula& f, const Interpretation& interp, const SemanticsConfig& config) {
  switch (config.kind) {
    case SemanticsKind::Classical:
      return eval_classical(f, interp, {}, config.eval) ? 1.0 : 0.0;
    case SemanticsKind::Prob:
      return eval_prob(f, interp, {}, config.eval);
    case SemanticsKind::Viterbi:
      return eval_viterbi(f, interp, {}, config.eval);
    case SemanticsKind::Fuzzy:
      return eval_fuzzy(f, interp, {}, config.fuzzy());
    case SemanticsKind::Sample:
      return estimate_prob(f, interp, config.samples, config.seed,
                           SampleOptions{config.threads, config.eval})
          .mean;
  }
  return 0.0;
}

}  // namespace uller
