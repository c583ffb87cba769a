#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "uller/interpretation.hpp"
#include "uller/parser.hpp"

namespace uller::testing {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string fixture(const std::string& name) {
  return std::string(ULLER_FIXTURES) + "/" + name;
}

inline Formula fixture_program(const std::string& name) {
  return parse_program(slurp(fixture(name)));
}

inline Interpretation fixture_interp(const std::string& name) {
  return load_interpretation(fixture(name));
}

inline Interpretation interp_from(const char* json_text) {
  return interpretation_from_json(nlohmann::json::parse(json_text));
}

template <class F>
ErrorKind error_kind(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::logic_error("expected an uller::Error");
}

}  // namespace uller::testing
