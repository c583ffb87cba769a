#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "programs.hpp"
#include "uller/learning.hpp"
#include "uller/sem_prob.hpp"

using namespace uller;
using uller::testing::error_kind;
using uller::testing::fixture_interp;
using uller::testing::fixture_program;
using uller::testing::interp_from;

namespace {

TrainConfig neg_config() {
  TrainConfig c;
  c.loss_transform = LossTransform::Neg;
  return c;
}

std::size_t argmax_digit(const Interpretation& interp, const Value& image) {
  const std::vector<Value> args{image};
  const Distribution d = query_distribution("f", args, interp);
  std::size_t best = 0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    if (d.outcomes()[k].prob > d.outcomes()[best].prob) best = k;
  }
  return static_cast<std::size_t>(d.outcomes()[best].value.as_int());
}

}  // namespace

TEST_CASE("fully satisfied deterministic program") {
  const Interpretation interp = interp_from(R"({
    "domains": {"Image": ["a", "b"], "Digit": [0,1,2,3,4,5,6,7,8,9]},
    "datasets": {"T": [{"im1": "a", "im2": "b", "sum": 7}, {"im1": "b", "im2": "b", "sum": 10}]},
    "functions": {"f": {"args": ["Image"], "codomain": "Digit", "kind": "deterministic_table",
                        "rows": {"a": 2, "b": 5}}}})");
  const Formula f = fixture_program("mnist_add.uller");
  CHECK(loss({f}, interp, interp.domain("T").elements, neg_config()) == -1.0);
  CHECK(loss({f}, interp, {}, neg_config()) == -1.0);
  TrainConfig log_config;
  CHECK(loss({f}, interp, interp.domain("T").elements, log_config) == 0.0);
}

TEST_CASE("single MNIST pair loss is minus its probability") {
  const Interpretation interp = fixture_interp("mnist_add.json");
  const Formula f = fixture_program("mnist_add.uller");
  const auto& T = interp.domain("T").elements;
  const std::vector<Value> a{Value::symbol("img0")}, b{Value::symbol("img1")};
  const Distribution p1 = query_distribution("f", a, interp);
  const Distribution p2 = query_distribution("f", b, interp);
  double q = 0.0;
  for (int d1 = 0; d1 < 10; ++d1) {
    for (int d2 = 0; d2 < 10; ++d2) {
      if (d1 + d2 == 3) q += p1.outcomes()[d1].prob * p2.outcomes()[d2].prob;
    }
  }
  CHECK(std::abs(loss({f}, interp, {T[0]}, neg_config()) + q) <= 1e-12);
  const auto lg = loss_and_grad({f}, interp, {T[0]}, neg_config());
  CHECK(std::abs(lg.loss + q) <= 1e-12);
  CHECK(lg.grad.size() == interp.theta().size());
}

TEST_CASE("formula weights scale the loss") {
  const Interpretation interp = fixture_interp("mnist_add.json");
  const Formula f = fixture_program("mnist_add.uller");
  const auto& T = interp.domain("T").elements;
  TrainConfig c = neg_config();
  const double one = loss({f}, interp, T, c);
  c.weights = {2.0, 0.5};
  CHECK(std::abs(loss({f, f}, interp, T, c) - 2.5 * one) <= 1e-12);
}

TEST_CASE("zero epochs") {
  const Interpretation interp = fixture_interp("mnist_add.json");
  TrainConfig c;
  c.epochs = 0;
  const TrainResult r = train({fixture_program("mnist_add.uller")}, interp, c);
  CHECK(r.report.epochs.empty());
  CHECK(r.interp.theta() == interp.theta());
}

TEST_CASE("a small gradient step lowers the loss") {
  const Interpretation interp = fixture_interp("sfc.json");
  const std::vector<Formula> program = parse_formulas(uller::testing::slurp(
      uller::testing::fixture("sfc_kb.uller")));
  const std::vector<Formula> smooth(program.begin(), program.end() - 1);
  for (SemanticsKind kind : {SemanticsKind::Prob, SemanticsKind::Fuzzy}) {
    TrainConfig c;
    c.semantics = kind;
    const auto& batch = interp.domain("T_Friends").elements;
    const auto lg = loss_and_grad(smooth, interp, batch, c);
    double norm2 = 0.0;
    for (double g : lg.grad) norm2 += g * g;
    REQUIRE(norm2 > 0.0);
    for (double eps : {1e-3, 1e-4, 1e-5}) {
      auto theta = interp.theta();
      for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= eps * lg.grad[j];
      Interpretation moved = interp;
      moved.set_theta(theta);
      const double after = loss(smooth, moved, batch, c);
      CHECK(after < lg.loss);
      // First-order prediction.
      CHECK(std::abs((lg.loss - after) - eps * norm2) <= 0.1 * eps * norm2);
    }
  }
}

TEST_CASE("training is reproducible") {
  const SyntheticMnist data = synthetic_mnist_add(40, 30, 3);
  const Formula f = fixture_program("mnist_add.uller");
  TrainConfig c;
  c.epochs = 5;
  c.batch_size = 7;
  c.seed = 11;
  const TrainResult a = train({f}, data.interp, c);
  const TrainResult b = train({f}, data.interp, c);
  CHECK(a.interp.theta() == b.interp.theta());
  REQUIRE(a.report.epochs.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.report.epochs[i].loss == b.report.epochs[i].loss);
    CHECK(a.report.epochs[i].satisfaction == b.report.epochs[i].satisfaction);
  }
  c.seed = 12;
  CHECK(train({f}, data.interp, c).interp.theta() != a.interp.theta());
}

TEST_CASE("score estimator training is reproducible and learns") {
  const SyntheticMnist data = synthetic_mnist_add(40, 30, 4);
  const Formula f = fixture_program("mnist_add.uller");
  // Under -log a minibatch whose rollouts all fail has no finite loss, so
  // the score estimator is trained on the raw expectation.
  TrainConfig c = neg_config();
  c.estimator = Estimator::Score;
  c.samples = 200;
  c.epochs = 8;
  c.batch_size = 1;
  c.optimizer.lr = 0.05;
  const TrainResult a = train({f}, data.interp, c);
  const TrainResult b = train({f}, data.interp, c);
  CHECK(a.interp.theta() == b.interp.theta());
  CHECK(a.report.epochs.back().loss < a.report.epochs.front().loss);
}

TEST_CASE("reported satisfaction matches an independent recount") {
  const SyntheticMnist data = synthetic_mnist_add(60, 40, 5);
  const Formula f = fixture_program("mnist_add.uller");
  TrainConfig c;
  c.epochs = 3;
  c.batch_size = 10;
  const TrainResult r = train({f}, data.interp, c);
  std::size_t ok = 0;
  const auto& items = r.interp.domain("T").elements;
  for (const Value& item : items) {
    const auto& rec = item.as_record();
    const std::size_t d1 = argmax_digit(r.interp, rec.at("im1"));
    const std::size_t d2 = argmax_digit(r.interp, rec.at("im2"));
    ok += static_cast<std::int64_t>(d1 + d2) == rec.at("sum").as_int();
  }
  CHECK(r.report.epochs.back().satisfaction ==
        static_cast<double>(ok) / static_cast<double>(items.size()));
}

TEST_CASE("friends of friends: loss goes down") {
  const Interpretation interp = fixture_interp("sfc.json");
  const Formula f = fixture_program("sfc_friends_transitive.uller");
  for (SemanticsKind kind : {SemanticsKind::Prob, SemanticsKind::Fuzzy}) {
    TrainConfig c;
    c.semantics = kind;
    c.epochs = 30;
    c.batch_size = 6;
    c.optimizer.lr = 0.05;
    const TrainResult r = train({f}, interp, c);
    CHECK(r.report.epochs.back().loss < r.report.epochs.front().loss);
  }
}

TEST_CASE("sgd and adam steps") {
  Optimizer sgd(OptimizerConfig{OptimizerConfig::Kind::Sgd, 0.1}, 2);
  std::vector<double> theta{1.0, -1.0};
  sgd.step(theta, {2.0, -4.0});
  CHECK(theta[0] == doctest::Approx(0.8));
  CHECK(theta[1] == doctest::Approx(-0.6));
  Optimizer adam(OptimizerConfig{}, 2);
  theta = {0.0, 0.0};
  adam.step(theta, {3.0, -0.001});
  // The first bias-corrected Adam step has length lr in every coordinate.
  CHECK(theta[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(theta[1] == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("invalid configurations") {
  const Interpretation interp = fixture_interp("mnist_add.json");
  const Formula f = fixture_program("mnist_add.uller");
  TrainConfig c;
  c.batch_size = 0;
  CHECK(error_kind([&] { validate(c, {f}, interp); }) == ErrorKind::InvalidConfig);
  c = TrainConfig{};
  c.batch_size = 3;  // the fixture has two data points
  CHECK(error_kind([&] { validate(c, {f}, interp); }) == ErrorKind::InvalidConfig);
  c = TrainConfig{};
  c.batch_size = 2;
  CHECK_NOTHROW(validate(c, {f}, interp));
  c.weights = {1.0, 2.0};
  CHECK(error_kind([&] { validate(c, {f}, interp); }) == ErrorKind::InvalidConfig);
  c = TrainConfig{};
  c.semantics = SemanticsKind::Viterbi;
  CHECK(error_kind([&] { validate(c, {f}, interp); }) == ErrorKind::InvalidConfig);
  c = TrainConfig{};
  CHECK(error_kind([&] { validate(c, {f}, fixture_interp("dice.json")); }) ==
        ErrorKind::InvalidConfig);
}

TEST_CASE("adversarial search") {
  const Interpretation interp = fixture_interp("adversarial.json");
  const Formula f = fixture_program("adversarial.uller");
  const auto& T = interp.domain("T").elements;
  SemanticsConfig prob;
  prob.kind = SemanticsKind::Prob;
  const SearchResult r = adversarial_search(f, interp, "T", T, prob);
  CHECK(r.best == Value::symbol("loaded_one"));
  CHECK(r.index == 2);
  CHECK(r.score == doctest::Approx(0.1));
  REQUIRE(r.scores.size() == 3);
  CHECK(r.scores[0] == doctest::Approx(1.0 / 6.0));
  CHECK(r.scores[1] == doctest::Approx(0.5));
  const SearchResult best = adversarial_search(f, interp, "T", T, prob, true);
  CHECK(best.best == Value::symbol("loaded_six"));

  const SearchResult single = adversarial_search(f, interp, "T", {T[1]}, prob);
  CHECK(single.best == T[1]);

  const SearchResult ties =
      adversarial_search(parse_program("forall s in T (1 = 1)"), interp, "T", T, prob);
  CHECK(ties.index == 0);
  CHECK(ties.score == 1.0);

  CHECK(error_kind([&] { (void)adversarial_search(f, interp, "T", {}, prob); }) ==
        ErrorKind::EmptyCandidateSet);
}

TEST_CASE("synthetic MNIST data") {
  const SyntheticMnist data = synthetic_mnist_add(50, 20, 0);
  CHECK(data.digits.size() == 20);
  CHECK(data.interp.domain("T").elements.size() == 50);
  CHECK(data.interp.theta().size() == 200);
  for (double t : data.interp.theta()) CHECK(t == 0.0);
  for (const Value& item : data.interp.domain("T").elements) {
    const auto& rec = item.as_record();
    const auto i1 = std::stoi(rec.at("im1").as_symbol().substr(3));
    const auto i2 = std::stoi(rec.at("im2").as_symbol().substr(3));
    CHECK(rec.at("sum").as_int() == data.digits[i1] + data.digits[i2]);
  }
}
