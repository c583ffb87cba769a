#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "uller/error.hpp"

namespace uller {

enum class LossTransform {
  Neg,     // L = -[[F]]
  NegLog,  // L = -log [[F]]
};

struct EvalOptions {
  /// Upper bound on formula nodes visited by one evaluation; exceeding it
  /// raises Error{BudgetExceeded} instead of running for hours.
  std::uint64_t node_budget = 200'000'000;
};

/// Counts visited nodes against EvalOptions::node_budget.
class Budget {
 public:
  explicit Budget(std::uint64_t limit) : remaining_(limit) {}

  void tick(Span span = {}) {
    if (remaining_ == 0) {
      throw Error(ErrorKind::BudgetExceeded,
                  "evaluation exceeded its node budget; enumerate fewer outcomes or raise "
                  "--budget",
                  span);
    }
    --remaining_;
  }

 private:
  std::uint64_t remaining_;
};

/// Loss value from a truth value. Throws ZeroProbability for -log 0.
double apply_loss(LossTransform t, double truth, std::string_view what = "formula");

}  // namespace uller
