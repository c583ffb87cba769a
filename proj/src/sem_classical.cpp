#include "uller/sem_classical.hpp"

#include "classical_walker.hpp"

namespace uller {

namespace {

struct ModeChooser {
  Value choose(const Statement&, const FormulaNode&, const Query& q) { return q.dist.mode(); }
};

}  // namespace

bool eval_classical(const Formula& f, const Interpretation& interp, const Env& env,
                    const EvalOptions& options) {
  ModeChooser chooser;
  return detail::BoolWalker<ModeChooser>(interp, chooser, options).eval(f, env);
}

}  // namespace uller
