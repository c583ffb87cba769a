#include "uller/learning.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "uller/sem_classical.hpp"
#include "uller/sem_fuzzy.hpp"
#include "uller/sem_prob.hpp"
#include "uller/sem_sample.hpp"

namespace uller {

LossTransform TrainConfig::transform() const {
  if (loss_transform) return *loss_transform;
  return semantics == SemanticsKind::Fuzzy ? LossTransform::Neg : LossTransform::NegLog;
}

std::string dataset_symbol(const TrainConfig& config, const Interpretation& interp) {
  if (config.dataset) {
    if (!interp.domains().count(*config.dataset)) {
      throw Error(ErrorKind::InvalidConfig, "dataset domain '" + *config.dataset + "' is not declared");
    }
    return *config.dataset;
  }
  const auto& names = interp.dataset_names();
  if (names.size() != 1) {
    throw Error(ErrorKind::InvalidConfig,
                names.empty() ? "the interpretation declares no dataset; name one with --dataset"
                              : "the interpretation declares several datasets; pick one with --dataset");
  }
  return *names.begin();
}

void validate(const TrainConfig& config, const std::vector<Formula>& program,
              const Interpretation& interp) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidConfig, m); };
  if (config.semantics != SemanticsKind::Prob && config.semantics != SemanticsKind::Fuzzy) {
    fail("training supports the prob and fuzzy semantics only");
  }
  if (config.semantics == SemanticsKind::Fuzzy && config.estimator == Estimator::Score) {
    fail("the score-function estimator applies to the prob semantics only");
  }
  if (config.estimator == Estimator::Score && config.samples == 0) {
    throw Error(ErrorKind::InvalidSampleCount, "number of samples must be at least 1");
  }
  if (!(config.optimizer.lr > 0.0)) fail("learning rate must be positive");
  if (config.batch_size == 0) fail("batch size must be positive");
  if (!config.weights.empty() && config.weights.size() != program.size()) {
    fail("expected " + std::to_string(program.size()) + " formula weights, got " +
         std::to_string(config.weights.size()));
  }
  if (!interp.has_parameters()) fail("the interpretation has no parameterised function to train");
  const std::string ds = dataset_symbol(config, interp);
  const std::size_t n = interp.domain(ds).elements.size();
  if (n > 0 && config.batch_size > n) {
    fail("batch size " + std::to_string(config.batch_size) + " exceeds the " +
         std::to_string(n) + " data points of '" + ds + "'");
  }
}

namespace {

double weight(const TrainConfig& config, std::size_t i) {
  return config.weights.empty() ? 1.0 : config.weights[i];
}

}  // namespace

double loss(const std::vector<Formula>& program, const Interpretation& interp,
            const std::vector<Value>& batch, const TrainConfig& config) {
  const Interpretation restricted =
      restrict_domain(interp, dataset_symbol(config, interp), batch);
  double total = 0.0;
  for (std::size_t i = 0; i < program.size(); ++i) {
    double truth = 0.0;
    if (config.semantics == SemanticsKind::Fuzzy) {
      truth = eval_fuzzy(program[i], restricted, {}, FuzzyOptions{config.family, {}, config.eval});
    } else {
      truth = eval_prob(program[i], restricted, {}, config.eval);
    }
    total += weight(config, i) * apply_loss(config.transform(), truth, to_source(program[i]));
  }
  return total;
}

LossGradient loss_and_grad(const std::vector<Formula>& program, const Interpretation& interp,
                           const std::vector<Value>& batch, const TrainConfig& config,
                           std::uint64_t sample_seed) {
  const Interpretation restricted =
      restrict_domain(interp, dataset_symbol(config, interp), batch);
  const LossTransform transform = config.transform();
  LossGradient out;
  out.grad.assign(interp.theta().size(), 0.0);
  for (std::size_t i = 0; i < program.size(); ++i) {
    const double w = weight(config, i);
    if (config.estimator == Estimator::Score) {
      GradEstimate g = grad_score(program[i], restricted, config.samples,
                                  RngStream(sample_seed).child(i).seed(), transform,
                                  SampleOptions{config.threads, config.eval});
      out.loss += w * apply_loss(transform, g.value, to_source(program[i]));
      for (std::size_t j = 0; j < g.mean.size(); ++j) out.grad[j] += w * g.mean[j];
      continue;
    }
    double value = 0.0;
    std::vector<double> dvalue;
    if (config.semantics == SemanticsKind::Fuzzy) {
      auto r = eval_fuzzy_dual(program[i], restricted, {}, FuzzyOptions{config.family, {}, config.eval});
      value = r.value;
      dvalue = std::move(r.grad);
    } else {
      auto r = eval_prob_dual(program[i], restricted, {}, config.eval);
      value = r.value;
      dvalue = std::move(r.grad);
    }
    out.loss += w * apply_loss(transform, value, to_source(program[i]));
    const double scale = transform == LossTransform::Neg ? -1.0 : -1.0 / value;
    for (std::size_t j = 0; j < dvalue.size(); ++j) out.grad[j] += w * scale * dvalue[j];
  }
  return out;
}

double satisfaction_rate(const std::vector<Formula>& program, const Interpretation& interp,
                         const std::string& dataset, const EvalOptions& options) {
  const Interpretation mode = mode_interpretation(interp);
  const auto& points = interp.domain(dataset).elements;
  if (points.empty()) return 1.0;
  std::size_t satisfied = 0;
  for (const auto& x : points) {
    const Interpretation single = restrict_domain(mode, dataset, {x});
    bool ok = true;
    for (const auto& f : program) {
      if (!eval_classical(f, single, {}, options)) {
        ok = false;
        break;
      }
    }
    satisfied += ok ? 1 : 0;
  }
  return static_cast<double>(satisfied) / static_cast<double>(points.size());
}

Optimizer::Optimizer(OptimizerConfig config, std::size_t dim)
    : config_(config), m_(dim, 0.0), v_(dim, 0.0) {}

void Optimizer::step(std::vector<double>& theta, const std::vector<double>& grad) {
  ++t_;
  if (config_.kind == OptimizerConfig::Kind::Sgd) {
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= config_.lr * grad[j];
    return;
  }
  const double b1t = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double b2t = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t j = 0; j < theta.size(); ++j) {
    m_[j] = config_.beta1 * m_[j] + (1.0 - config_.beta1) * grad[j];
    v_[j] = config_.beta2 * v_[j] + (1.0 - config_.beta2) * grad[j] * grad[j];
    theta[j] -= config_.lr * (m_[j] / b1t) / (std::sqrt(v_[j] / b2t) + config_.eps);
  }
}

TrainResult train(const std::vector<Formula>& program, const Interpretation& interp,
                  const TrainConfig& config) {
  TrainResult result{interp, {}};
  if (config.epochs == 0) return result;
  validate(config, program, interp);
  const std::string ds = dataset_symbol(config, interp);
  const std::vector<Value> data = interp.domain(ds).elements;
  std::vector<double> theta = interp.theta();
  Optimizer opt(config.optimizer, theta.size());
  const RngStream master(config.seed);
  std::uint64_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates on indices with the epoch's own stream.
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    RngStream shuffle = master.child(epoch);
    for (std::size_t i = order.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(shuffle.uniform() * static_cast<double>(i));
      std::swap(order[i - 1], order[j]);
    }
    const std::size_t batches =
        data.empty() ? 1 : (data.size() + config.batch_size - 1) / config.batch_size;
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      std::vector<Value> batch;
      for (std::size_t k = b * config.batch_size;
           k < std::min(data.size(), (b + 1) * config.batch_size); ++k) {
        batch.push_back(data[order[k]]);
      }
      LossGradient lg = loss_and_grad(program, result.interp, batch, config,
                                      master.child(0x5eed0000ULL + step).seed());
      ++step;
      for (std::size_t j = 0; j < lg.grad.size(); ++j) {
        if (!std::isfinite(lg.grad[j])) {
          throw Error(ErrorKind::NonFiniteGradient,
                      "gradient coordinate " + std::to_string(j) + " is " +
                          (std::isnan(lg.grad[j]) ? "NaN" : "infinite") + " at epoch " +
                          std::to_string(epoch + 1) + ", batch " + std::to_string(b + 1) +
                          " (loss " + std::to_string(lg.loss) + ")");
        }
      }
      loss_sum += lg.loss;
      opt.step(theta, lg.grad);
      result.interp.set_theta(theta);
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.loss = loss_sum / static_cast<double>(batches);
    rec.satisfaction = satisfaction_rate(program, result.interp, ds, config.eval);
    double sq = 0.0;
    for (double t : theta) sq += t * t;
    rec.theta_norm = std::sqrt(sq);
    result.report.epochs.push_back(rec);
  }
  return result;
}

SearchResult adversarial_search(const Formula& f, const Interpretation& interp,
                                const std::string& dataset, const std::vector<Value>& candidates,
                                const SemanticsConfig& semantics, bool maximize) {
  if (candidates.empty()) {
    throw Error(ErrorKind::EmptyCandidateSet, "no candidates to search");
  }
  interp.domain(dataset);  // UnknownDomain
  SearchResult out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    Interpretation single = interp;
    single.set_domain(dataset, {candidates[i]});
    const double s = evaluate(f, single, semantics);
    out.scores.push_back(s);
    const bool better = maximize ? s > out.score : s < out.score;
    if (i == 0 || better) {
      out.best = candidates[i];
      out.score = s;
      out.index = i;
    }
  }
  return out;
}

SyntheticMnist synthetic_mnist_add(std::size_t n_items, std::size_t n_images, std::uint64_t seed) {
  if (n_images == 0) throw Error(ErrorKind::InvalidConfig, "need at least one image");
  SyntheticMnist out;
  RngStream rng(seed);
  auto pick = [&](std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
  };
  std::vector<Value> images;
  char name[32];
  for (std::size_t i = 0; i < n_images; ++i) {
    std::snprintf(name, sizeof name, "img%03zu", i);
    images.push_back(Value::symbol(name));
    out.digits.push_back(static_cast<int>(pick(10)));
  }
  std::vector<Value> digits;
  for (int d = 0; d < 10; ++d) digits.push_back(Value::integer(d));
  std::vector<Value> items;
  for (std::size_t k = 0; k < n_items; ++k) {
    const std::size_t a = pick(n_images);
    const std::size_t b = pick(n_images);
    RecordFields r;
    r.emplace("id", Value::integer(static_cast<std::int64_t>(k)));
    r.emplace("im1", images[a]);
    r.emplace("im2", images[b]);
    r.emplace("sum", Value::integer(out.digits[a] + out.digits[b]));
    items.push_back(Value::record(std::move(r)));
  }
  out.interp.set_domain("Image", images);
  out.interp.set_domain("Digit", digits);
  out.interp.set_domain("T", std::move(items));
  out.interp.mark_dataset("T");
  std::vector<ValueTuple> inputs;
  for (const auto& im : images) inputs.push_back({im});
  out.interp.add_parameterised("f", {"Image"}, "Digit", inputs);
  return out;
}

}  // namespace uller
