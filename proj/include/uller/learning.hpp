#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uller/evaluate.hpp"
#include "uller/interpretation.hpp"
#include "uller/semantics.hpp"
#include "uller/syntax.hpp"

namespace uller {

enum class Estimator { Exact, Score };

struct OptimizerConfig {
  enum class Kind { Sgd, Adam };
  Kind kind = Kind::Adam;
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  SemanticsKind semantics = SemanticsKind::Prob;  // Prob or Fuzzy
  TNorm family = TNorm::Product;
  Estimator estimator = Estimator::Exact;
  std::size_t samples = 1000;  // score estimator only
  OptimizerConfig optimizer;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  /// Defaults to NegLog for prob semantics and Neg for fuzzy.
  std::optional<LossTransform> loss_transform;
  /// One weight per formula; empty means all 1.
  std::vector<double> weights;
  /// Domain replaced by each minibatch; defaults to the only dataset domain.
  std::optional<std::string> dataset;
  std::size_t threads = 1;
  EvalOptions eval;

  LossTransform transform() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;          // mean minibatch loss over the epoch
  double satisfaction = 0.0;  // after the epoch, under the mode interpretation
  double theta_norm = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  Interpretation interp;
  TrainReport report;
};

/// Throws InvalidConfig when the config is inconsistent with the program or
/// interpretation (no dataset, bad batch size, ...).
void validate(const TrainConfig& config, const std::vector<Formula>& program,
              const Interpretation& interp);

/// Name of the domain minibatches replace.
std::string dataset_symbol(const TrainConfig& config, const Interpretation& interp);

/// Weighted sum over formulas of the loss transform of each formula's truth,
/// with the dataset domain restricted to `batch`.
double loss(const std::vector<Formula>& program, const Interpretation& interp,
            const std::vector<Value>& batch, const TrainConfig& config);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;
};
LossGradient loss_and_grad(const std::vector<Formula>& program, const Interpretation& interp,
                           const std::vector<Value>& batch, const TrainConfig& config,
                           std::uint64_t sample_seed = 0);

/// Fraction of data points x for which the conjoined program is classically
/// true under the mode interpretation, with the dataset domain set to {x}.
double satisfaction_rate(const std::vector<Formula>& program, const Interpretation& interp,
                         const std::string& dataset, const EvalOptions& options = {});

/// Runs epochs x ceil(|D| / batch) optimizer steps on minibatches from a
/// seeded shuffle. Throws NonFiniteGradient if a gradient is NaN or infinite.
TrainResult train(const std::vector<Formula>& program, const Interpretation& interp,
                  const TrainConfig& config);

class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config, std::size_t dim);
  void step(std::vector<double>& theta, const std::vector<double>& grad);

 private:
  OptimizerConfig config_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

struct SearchResult {
  Value best;
  double score = 0.0;
  std::size_t index = 0;
  std::vector<double> scores;  // one per candidate, in candidate order
};

/// Evaluates `f` with the dataset domain set to each single candidate and
/// returns the candidate of lowest truth (the one that most violates `f`),
/// or of highest truth when `maximize` is set. Ties keep the first candidate.
/// Throws EmptyCandidateSet.
SearchResult adversarial_search(const Formula& f, const Interpretation& interp,
                                const std::string& dataset, const std::vector<Value>& candidates,
                                const SemanticsConfig& semantics, bool maximize = false);

// ---------------------------------------------------------------------------
// Synthetic MNIST addition

struct SyntheticMnist {
  Interpretation interp;           // domain Image, Digit, dataset T, function f
  std::vector<int> digits;         // hidden digit of each image
};

/// `n_images` image symbols with hidden uniformly random digits and `n_items`
/// pairs labelled only by their sum. The classifier f : Image -> Digit is a
/// parameterised softmax with zero logits.
SyntheticMnist synthetic_mnist_add(std::size_t n_items, std::size_t n_images, std::uint64_t seed);

}  // namespace uller
