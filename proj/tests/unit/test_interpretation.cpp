#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "programs.hpp"
#include "uller/interpretation.hpp"
#include "uller/sem_classical.hpp"

using namespace uller;
using namespace uller::build;
using uller::testing::error_kind;
using uller::testing::interp_from;

namespace {

const char* kToy = R"({
  "domains": {"Die": [1, 2, 3, 4, 5, 6], "S": ["a", "b"], "ABC": ["a", "b", "c"],
              "T": [{"id": 1, "v": 2}, {"id": 2, "v": 3}]},
  "constants": {"c": 5},
  "functions": {
    "dice": {"args": [], "codomain": "Die", "kind": "table",
             "rows": {"": ["1/6", "1/6", "1/6", "1/6", "1/6", "1/6"]}},
    "h": {"args": [], "codomain": "ABC", "kind": "table", "rows": {"": [0.2, 0.7, 0.1]}},
    "f": {"args": ["S"], "codomain": "S", "kind": "parameterised",
          "rows": {"a": [0.0, 0.0], "b": [1.0, -1.0]}},
    "g": {"args": ["S"], "codomain": "ABC", "kind": "deterministic_table",
          "rows": {"a": "c", "b": "a"}}
  }
})";

}  // namespace

TEST_CASE("term evaluation") {
  const Interpretation interp = interp_from(kToy);
  const Value rec = Value::record({{"im1", Value::symbol("i")}, {"im2", Value::symbol("j")},
                                   {"sum", Value::integer(7)}});
  CHECK(eval_term(prop(var("x"), "sum"), interp, Env{}.bind("x", rec)) == Value::integer(7));
  CHECK(eval_term(constant("c"), interp, {}) == Value::integer(5));
  const Env env = Env{}.bind("n1", Value::integer(3)).bind("n2", Value::integer(4));
  CHECK(eval_term(arith(ArithOp::Add, var("n1"), var("n2")), interp, env) == Value::integer(7));
  CHECK(eval_term(arith(ArithOp::Mul, var("n1"), integer(-2)), interp, env) ==
        Value::integer(-6));
}

TEST_CASE("term errors") {
  const Interpretation interp = interp_from(kToy);
  CHECK(error_kind([&] { (void)eval_term(var("zz"), interp, {}); }) ==
        ErrorKind::UnboundVariable);
  CHECK(error_kind([&] { (void)eval_term(constant("zz"), interp, {}); }) ==
        ErrorKind::UnknownConstant);
  CHECK(error_kind([&] { (void)eval_term(prop(constant("c"), "x"), interp, {}); }) ==
        ErrorKind::PropertyOnNonRecord);
  const Env env = Env{}.bind("r", Value::record({{"a", Value::integer(1)}}));
  CHECK(error_kind([&] { (void)eval_term(prop(var("r"), "b"), interp, env); }) ==
        ErrorKind::MissingProperty);
  CHECK(error_kind([&] {
          (void)eval_term(arith(ArithOp::Add, var("r"), integer(1)), interp, env);
        }) == ErrorKind::ArithTypeError);
}

TEST_CASE("query distribution") {
  const Interpretation interp = interp_from(kToy);
  const Distribution d = query_distribution("dice", {}, interp);
  REQUIRE(d.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(d.outcomes()[k].value == Value::integer(static_cast<std::int64_t>(k) + 1));
    CHECK(d.outcomes()[k].prob == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  }
  const std::vector<Value> a{Value::symbol("a")};
  const Distribution g = query_distribution("g", a, interp);
  CHECK(g.size() == 1);
  CHECK(g.prob_of(Value::symbol("c")) == 1.0);
  const Distribution f = query_distribution("f", a, interp);
  CHECK(f.prob_of(Value::symbol("a")) == 0.5);
  CHECK(f.prob_of(Value::symbol("b")) == 0.5);
  const std::vector<Value> b{Value::symbol("b")};
  const Distribution fb = query_distribution("f", b, interp);
  CHECK(fb.prob_of(Value::symbol("a")) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
}

TEST_CASE("deterministic native rule") {
  Interpretation interp;
  interp.set_domain("N", {Value::integer(3), Value::integer(4)});
  interp.set_function(FunctionDef{
      "g", {"N"}, "N",
      FunctionDef::Deterministic{
          [](std::span<const Value> a) { return Value::integer(a[0].as_int() + 1); }, {}}});
  const std::vector<Value> three{Value::integer(3)};
  const Distribution d = query_distribution("g", three, interp);
  REQUIRE(d.size() == 1);
  CHECK(d.outcomes()[0].value == Value::integer(4));
  CHECK(d.outcomes()[0].prob == 1.0);
}

TEST_CASE("query errors") {
  const Interpretation interp = interp_from(kToy);
  const std::vector<Value> none;
  const std::vector<Value> bad{Value::symbol("zz")};
  CHECK(error_kind([&] { (void)query_distribution("nope", none, interp); }) ==
        ErrorKind::UnknownFunction);
  CHECK(error_kind([&] { (void)query_distribution("f", none, interp); }) ==
        ErrorKind::ArityMismatch);
  CHECK(error_kind([&] { (void)query_distribution("f", bad, interp); }) ==
        ErrorKind::MissingTableRow);
}

TEST_CASE("distribution invariant") {
  const auto mk = [](double a, double b) {
    return Distribution({{Value::integer(0), a, {}}, {Value::integer(1), b, {}}});
  };
  CHECK_NOTHROW(mk(0.25, 0.75));
  CHECK_NOTHROW(mk(0.5, 0.5 + 1e-12));
  CHECK(error_kind([&] { (void)mk(0.5, 0.6); }) == ErrorKind::InvalidDistribution);
  CHECK(error_kind([&] { (void)mk(-0.1, 1.1); }) == ErrorKind::InvalidDistribution);
  CHECK(error_kind([] {
          (void)Distribution({{Value::integer(0), 0.5, {}}, {Value::integer(0), 0.5, {}}});
        }) == ErrorKind::InvalidDistribution);
}

TEST_CASE("mode interpretation") {
  const Interpretation interp = interp_from(kToy);
  const Interpretation mode = mode_interpretation(interp);
  const std::vector<Value> none;
  CHECK(query_distribution("dice", none, mode).mode() == Value::integer(1));
  CHECK(query_distribution("dice", none, mode).size() == 1);
  CHECK(query_distribution("h", none, mode).mode() == Value::symbol("b"));
  const std::vector<Value> a{Value::symbol("a")}, b{Value::symbol("b")};
  CHECK(query_distribution("f", a, mode).mode() == Value::symbol("a"));
  CHECK(query_distribution("f", b, mode).mode() == Value::symbol("a"));
  CHECK(query_distribution("g", b, mode).mode() == Value::symbol("a"));
  CHECK_FALSE(mode.has_parameters());
}

TEST_CASE("mode interpretation is idempotent") {
  uller::testing::Gen g(3);
  for (int i = 0; i < 100; ++i) {
    uller::testing::ProgramOptions opt;
    opt.parameterised = i % 2 == 0;
    const auto p = uller::testing::random_program(g, opt);
    const Interpretation once = mode_interpretation(p.interp);
    const Interpretation twice = mode_interpretation(once);
    CHECK(interpretation_to_json(once) == interpretation_to_json(twice));
    CHECK(eval_classical(p.formula, once) == eval_classical(p.formula, twice));
  }
}

TEST_CASE("softmax argmax ignores a shift of the whole row") {
  uller::testing::Gen g(8);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> logits(static_cast<std::size_t>(g.range(1, 6)));
    for (auto& x : logits) x = g.uniform(-5, 5);
    auto shifted = logits;
    const double c = g.uniform(-100, 100);
    for (auto& x : shifted) x += c;
    const auto p = softmax(logits);
    const auto q = softmax(shifted);
    double total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      total += p[k];
      CHECK(p[k] == doctest::Approx(q[k]).epsilon(1e-9));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::max_element(p.begin(), p.end()) - p.begin() ==
          std::max_element(q.begin(), q.end()) - q.begin());
  }
}

TEST_CASE("softmax moves smoothly with theta") {
  Interpretation interp = interp_from(kToy);
  const std::vector<Value> b{Value::symbol("b")};
  const double p0 = query_distribution("f", b, interp).prob_of(Value::symbol("a"));
  auto theta = interp.theta();
  for (auto& t : theta) t += 1e-7;
  theta[2] += 1e-6;
  interp.set_theta(theta);
  const double p1 = query_distribution("f", b, interp).prob_of(Value::symbol("a"));
  CHECK(std::abs(p1 - p0) < 1e-6);
  CHECK(p1 != p0);
}

TEST_CASE("fixture loads") {
  const Interpretation interp = uller::testing::fixture_interp("dice.json");
  REQUIRE(interp.domains().count("Die") == 1);
  CHECK(interp.domains().at("Die").elements.size() == 6);
  CHECK(interp.functions().count("dice") == 1);
}

TEST_CASE("restrict domain") {
  const Interpretation interp = interp_from(kToy);
  const Interpretation empty = restrict_domain(interp, "T", {});
  CHECK(eval_classical(parse_program("forall t in T (1 = 2)"), empty));
  const auto& full = interp.domains().at("T").elements;
  const Interpretation one = restrict_domain(interp, "T", {full[1]});
  CHECK(one.domains().at("T").elements.size() == 1);
  CHECK(interp.domains().at("T").elements.size() == 2);  // the original is untouched
  CHECK(error_kind([&] { (void)restrict_domain(interp, "Nope", {}); }) ==
        ErrorKind::UnknownDomain);
  CHECK(error_kind([&] { (void)restrict_domain(interp, "S", {Value::symbol("q")}); }) ==
        ErrorKind::UnknownDomainElement);
}

TEST_CASE("schema errors name the path") {
  const auto schema_msg = [](const char* text) -> std::string {
    try {
      (void)interp_from(text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Schema);
      return e.what();
    }
    return "";
  };
  CHECK(schema_msg(R"({"domains": 3})").find("/domains") != std::string::npos);
  CHECK(schema_msg(R"({"domains": {"D": [1]}, "functions": {"f": {"args": ["D"],
        "codomain": "D", "kind": "magic"}}})")
            .find("/functions/f/kind") != std::string::npos);
  CHECK(schema_msg(R"({"domanis": {}})") != "");
  CHECK(error_kind([] { (void)uller::testing::fixture_interp("does_not_exist.json"); }) ==
        ErrorKind::Io);
  // Bad mass is reported with the path of the offending row.
  CHECK(schema_msg(R"({"domains": {"D": [1]}, "functions": {"f":
        {"args": [], "codomain": "D", "kind": "table", "rows": {"": [0.4]}}}})")
            .find("/functions/f") != std::string::npos);
}

TEST_CASE("json round trip") {
  const Interpretation interp = interp_from(kToy);
  const auto j = interpretation_to_json(interp);
  const Interpretation back = interpretation_from_json(j);
  CHECK(interpretation_to_json(back) == j);
  CHECK(back.theta() == interp.theta());
}

TEST_CASE("check_program reports every problem") {
  const Interpretation interp = interp_from(kToy);
  CHECK(check_program(parse_program("x := dice() (x = 6)"), interp).empty());
  const auto errors = check_program(
      parse_program("forall q in Nope (x := nothing() (P(x) and x = 1))"), interp);
  CHECK(errors.size() >= 3);
}
