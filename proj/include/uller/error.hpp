#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uller {

struct Span {
  int line = 0;
  int column = 0;

  bool valid() const { return line > 0; }
  friend bool operator==(const Span&, const Span&) = default;
};

enum class ErrorKind {
  Parse,
  DuplicateBinder,
  UnboundVariable,
  UnknownConstant,
  UnknownDomain,
  UnknownPredicate,
  UnknownFunction,
  PropertyOnNonRecord,
  MissingProperty,
  ArithTypeError,
  ArityMismatch,
  MissingTableRow,
  PredTypeError,
  TrueOnNonUnit,
  InfiniteDomain,
  InvalidDistribution,
  UnknownDomainElement,
  Schema,
  ZeroProbability,
  InvalidSampleCount,
  NonFiniteGradient,
  EmptyCandidateSet,
  BudgetExceeded,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. Carries a machine-checkable kind and,
/// where the failure is tied to source text, the offending position.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, Span span = {});

  ErrorKind kind() const { return kind_; }
  const Span& span() const { return span_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  Span span_;
  std::string detail_;
};

class ParseError : public Error {
 public:
  ParseError(std::string message, Span span, std::vector<std::string> expected = {});

  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::vector<std::string> expected_;
};

}  // namespace uller
