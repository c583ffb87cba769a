#pragma once

#include <cstdint>
#include <vector>

#include "uller/interpretation.hpp"
#include "uller/semantics.hpp"
#include "uller/syntax.hpp"

namespace uller {

/// SplitMix64 stream. Child streams are derived by hashing the parent seed
/// with a key, so the same (seed, key path) always yields the same numbers
/// on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t seed() const { return state_; }
  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  [[nodiscard]] RngStream child(std::uint64_t key) const;

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t state_;
};

/// Inverse-CDF draw over the outcomes in codomain order; zero-mass outcomes
/// are never returned.
std::size_t sample_index(const Distribution& d, double u);

/// One rollout: classical evaluation where each statement visit draws its
/// value from p_f. Draws come from rng.child(node id).child(visit count),
/// node ids numbering statements in pre-order.
bool eval_sample(const Formula& f, const Interpretation& interp, const RngStream& rng,
                 const Env& env = {}, const EvalOptions& options = {});

struct SampleOptions {
  std::size_t threads = 1;
  EvalOptions eval;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error over n rollouts; rollout i uses
/// RngStream(seed).child(i). Results do not depend on the thread count.
/// Throws InvalidSampleCount for n = 0.
Estimate estimate_prob(const Formula& f, const Interpretation& interp, std::size_t n,
                       std::uint64_t seed, const SampleOptions& options = {});

struct GradEstimate {
  double value = 0.0;            // mean rollout truth
  std::vector<double> mean;      // estimated dL/dtheta
  std::vector<double> std_error; // per coordinate
};

/// Score-function (DiCE) estimate of the loss gradient. Each rollout
/// contributes truth * sum_i grad log p_{f_i}(a_i) over the statements it
/// sampled. Under NegLog the gradient -grad E / E uses the ratio of the two
/// sample means, with delta-method standard errors.
GradEstimate grad_score(const Formula& f, const Interpretation& interp, std::size_t n,
                        std::uint64_t seed, LossTransform transform = LossTransform::Neg,
                        const SampleOptions& options = {});

}  // namespace uller
