#include "uller/error.hpp"

namespace uller {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::DuplicateBinder: return "DuplicateBinder";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::UnknownConstant: return "UnknownConstant";
    case ErrorKind::UnknownDomain: return "UnknownDomain";
    case ErrorKind::UnknownPredicate: return "UnknownPredicate";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::PropertyOnNonRecord: return "PropertyOnNonRecord";
    case ErrorKind::MissingProperty: return "MissingProperty";
    case ErrorKind::ArithTypeError: return "ArithTypeError";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::MissingTableRow: return "MissingTableRow";
    case ErrorKind::PredTypeError: return "PredTypeError";
    case ErrorKind::TrueOnNonUnit: return "TrueOnNonUnit";
    case ErrorKind::InfiniteDomain: return "InfiniteDomain";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::UnknownDomainElement: return "UnknownDomainElement";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::ZeroProbability: return "ZeroProbability";
    case ErrorKind::InvalidSampleCount: return "InvalidSampleCount";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::EmptyCandidateSet: return "EmptyCandidateSet";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& message, Span span) {
  std::string out(to_string(kind));
  if (span.valid()) {
    out += " at " + std::to_string(span.line) + ":" + std::to_string(span.column);
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string message, Span span)
    : std::runtime_error(format_message(kind, message, span)),
      kind_(kind),
      span_(span),
      detail_(std::move(message)) {}

ParseError::ParseError(std::string message, Span span, std::vector<std::string> expected)
    : Error(ErrorKind::Parse, std::move(message), span), expected_(std::move(expected)) {}

}  // namespace uller
