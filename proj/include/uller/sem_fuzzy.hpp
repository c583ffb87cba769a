#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uller/interpretation.hpp"
#include "uller/semantics.hpp"
#include "uller/syntax.hpp"

namespace uller {

enum class TNorm { Godel, Product, Lukasiewicz };

std::string_view to_string(TNorm t);
/// Throws InvalidConfig for an unknown name.
TNorm tnorm_from_string(std::string_view name);

/// Scalar t-norm operations, mainly for tests; evaluation uses the same
/// definitions through a templated implementation.
double tnorm(TNorm family, double a, double b);
double tconorm(TNorm family, double a, double b);

struct FuzzyOptions {
  TNorm family = TNorm::Product;
  /// Family whose operations aggregate statement outcomes over non-boolean
  /// codomains; defaults to `family`.
  std::optional<TNorm> statement_family;
  EvalOptions eval;
};

/// Fuzzy truth in [0, 1]. A statement over a {0, 1} codomain binds its
/// variable to the degree p_f(1 | args), which `true(x)` returns; other
/// codomains aggregate p_f(a) (x) body over outcomes with the t-conorm.
double eval_fuzzy(const Formula& f, const Interpretation& interp, const Env& env = {},
                  const FuzzyOptions& options = {});

/// Gradient of the loss transform of eval_fuzzy with respect to theta. At
/// godel/lukasiewicz kinks the derivative of the first argument is taken.
std::vector<double> grad_fuzzy(const Formula& f, const Interpretation& interp,
                               LossTransform transform = LossTransform::Neg,
                               const FuzzyOptions& options = {});

struct FuzzyWithGradient {
  double value;
  std::vector<double> grad;  // d value / d theta
};
FuzzyWithGradient eval_fuzzy_dual(const Formula& f, const Interpretation& interp,
                                  const Env& env = {}, const FuzzyOptions& options = {});

}  // namespace uller
