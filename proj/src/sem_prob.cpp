#include "uller/sem_prob.hpp"

#include <algorithm>
#include <cmath>

namespace uller {

Dual DualCarrier::lift(const Query& q, std::size_t k) {
  const auto& outcomes = q.dist.outcomes();
  const double pk = outcomes[k].prob;
  if (!q.theta_offset) return Dual(pk);
  std::vector<Tangent::Entry> entries;
  entries.reserve(outcomes.size());
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    double d = pk * ((j == k ? 1.0 : 0.0) - outcomes[j].prob);
    entries.emplace_back(static_cast<std::uint32_t>(*q.theta_offset + j), d);
  }
  return Dual(pk, Tangent(std::move(entries)));
}

namespace {

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double eval_prob(const Formula& f, const Interpretation& interp, const Env& env,
                 const EvalOptions& options) {
  return clamp_unit(eval_semiring<ProbabilityCarrier>(f, interp, env, options));
}

double eval_viterbi(const Formula& f, const Interpretation& interp, const Env& env,
                    const EvalOptions& options) {
  return clamp_unit(eval_semiring<ViterbiCarrier>(f, interp, env, options));
}

ProbWithGradient eval_prob_dual(const Formula& f, const Interpretation& interp, const Env& env,
                                const EvalOptions& options) {
  Dual d = eval_semiring<DualCarrier>(f, interp, env, options);
  return {clamp_unit(d.value), d.grad.to_dense(interp.theta().size())};
}

std::vector<double> grad_prob(const Formula& f, const Interpretation& interp,
                              LossTransform transform, const EvalOptions& options) {
  Dual d = eval_semiring<DualCarrier>(f, interp, Env{}, options);
  std::vector<double> g(interp.theta().size(), 0.0);
  switch (transform) {
    case LossTransform::Neg:
      d.grad.accumulate(g, -1.0);
      break;
    case LossTransform::NegLog:
      apply_loss(transform, d.value, to_source(f));
      d.grad.accumulate(g, -1.0 / d.value);
      break;
  }
  return g;
}

}  // namespace uller
