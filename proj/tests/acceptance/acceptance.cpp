// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "programs.hpp"
#include "uller/exact.hpp"
#include "uller/learning.hpp"
#include "uller/parser.hpp"
#include "uller/sem_classical.hpp"
#include "uller/sem_fuzzy.hpp"
#include "uller/sem_prob.hpp"
#include "uller/sem_sample.hpp"

using namespace uller;
using namespace uller::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string fixture(const std::string& name) { return std::string(ULLER_FIXTURES) + "/" + name; }

int failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %-28s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

bool grad_close(double g, double fd) {
  return std::abs(g - fd) <= 1e-6 * std::max({1.0, std::abs(g), std::abs(fd)});
}

// Fixture programs with the interpretation each one is checked against.
struct FixtureCase {
  std::string program;
  std::string interp;
};

const std::vector<FixtureCase>& fixture_cases() {
  static const std::vector<FixtureCase> cases = {
      {"dice_shared.uller", "dice.json"},
      {"dice_indep.uller", "dice.json"},
      {"adversarial.uller", "adversarial.json"},
      {"mnist_add.uller", "mnist_add.json"},
      {"mnist_add_pipeline.uller", "mnist_add_pipeline.json"},
      {"sfc_friends_transitive.uller", "sfc.json"},
      {"sfc_friends_smoke.uller", "sfc.json"},
      {"sfc_friendless_smoke.uller", "sfc.json"},
      {"sfc_smoking_cancer.uller", "sfc.json"},
      {"sfc_smoking_cancer_dependent.uller", "sfc_dependent.json"},
      {"sfc_friends_labels.uller", "sfc.json"},
      {"sfc_kb.uller", "sfc.json"},
  };
  return cases;
}

Formula load_fixture_program(const std::string& name) {
  return build::conj_all(parse_formulas(slurp(fixture(name))));
}

// --- criteria ---------------------------------------------------------------

void dice_scoping() {
  const Interpretation interp = load_interpretation(fixture("dice.json"));
  const Formula shared = parse_program(slurp(fixture("dice_shared.uller")));
  const Formula indep = parse_program(slurp(fixture("dice_indep.uller")));

  bool ok = true;
  double worst_ms = 0.0;
  auto timed = [&](auto fn) {
    fn();  // warm-up
    double best = 1e9;
    for (int i = 0; i < 20; ++i) {
      const auto t0 = Clock::now();
      fn();
      best = std::min(best, seconds_since(t0) * 1e3);
    }
    worst_ms = std::max(worst_ms, best);
  };
  ok &= eval_exact(shared, interp) == Rational(1, 6);
  ok &= eval_exact(indep, interp) == Rational(1, 12);
  const double ps = eval_prob(shared, interp);
  const double pi = eval_prob(indep, interp);
  ok &= std::abs(ps - 1.0 / 6.0) <= 1e-12;
  ok &= std::abs(pi - 1.0 / 12.0) <= 1e-12;
  timed([&] { (void)eval_prob(shared, interp); });
  timed([&] { (void)eval_prob(indep, interp); });
  timed([&] { (void)eval_exact(shared, interp); });
  timed([&] { (void)eval_exact(indep, interp); });
  ok &= worst_ms < 1.0;
  report("dice_scoping", ok,
         fmt("shared=%s (%.15f) indep=%s (%.15f) slowest=%.4f ms",
             to_string(eval_exact(shared, interp)).c_str(), ps,
             to_string(eval_exact(indep, interp)).c_str(), pi, worst_ms));
}

void wmc_oracle() {
  Gen g(0x3c3);
  const auto t0 = Clock::now();
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    Program p = random_wmc_program(g);
    const double got = eval_prob(p.formula, p.interp);
    const double want = brute_force_wmc(p.formula, p.world);
    worst = std::max(worst, std::abs(got - want));
    if (std::abs(got - want) > 1e-9) {
      if (bad++ == 0) std::printf("  first mismatch: %s\n", to_source(p.formula).c_str());
    }
  }
  const double secs = seconds_since(t0);
  report("wmc_oracle", bad == 0 && secs < 30.0,
         fmt("200 programs, %d mismatches, max |diff|=%.3g, %.2f s", bad, worst, secs));
}

void classical_in_the_limit() {
  Gen g(0xc1a55);
  int bad = 0;
  int checks = 0;
  int true_count = 0;
  for (int i = 0; i < 200; ++i) {
    ProgramOptions opt;
    opt.parameterised = i % 2 == 1;
    Program p = random_program(g, opt);
    const Interpretation mode = mode_interpretation(p.interp);
    const bool want = eval_classical(p.formula, mode);
    true_count += want;
    const double w = want ? 1.0 : 0.0;
    std::vector<std::pair<std::string, double>> got;
    got.emplace_back("prob", eval_prob(p.formula, mode));
    for (TNorm t : {TNorm::Godel, TNorm::Product, TNorm::Lukasiewicz}) {
      FuzzyOptions fo;
      fo.family = t;
      got.emplace_back(std::string("fuzzy-") + std::string(to_string(t)),
                       eval_fuzzy(p.formula, mode, {}, fo));
    }
    for (std::uint64_t seed : {0ull, 1ull, 0xfeedull}) {
      got.emplace_back("sample", eval_sample(p.formula, mode, RngStream(seed)) ? 1.0 : 0.0);
    }
    for (const auto& [name, v] : got) {
      ++checks;
      if (v != w) {
        if (bad++ < 3) {
          std::printf("  %s gave %.17g, classical %d: %s\n", name.c_str(), v, want,
                      to_source(p.formula).c_str());
        }
      }
    }
  }
  report("classical_in_the_limit", bad == 0,
         fmt("200 programs (%d classically true), %d comparisons, %d failures", true_count,
             checks, bad));
}

void fuzzy_emulation() {
  int bad = 0;
  double worst = 0.0;
  std::string per_family;
  for (TNorm t : {TNorm::Godel, TNorm::Product, TNorm::Lukasiewicz}) {
    Gen g(0xf022 + static_cast<std::uint64_t>(t));
    int family_bad = 0;
    for (int i = 0; i < 100; ++i) {
      FuzzyCase c = random_fuzzy_case(g);
      std::map<std::string, Value> env;
      const double want = reference_fuzzy(c.nesy, c.world, t, env);
      FuzzyOptions fo;
      fo.family = t;
      for (const Formula& f : {c.local, c.hoisted}) {
        const double got = eval_fuzzy(f, c.interp, {}, fo);
        worst = std::max(worst, std::abs(got - want));
        if (std::abs(got - want) > 1e-12) {
          if (family_bad++ == 0) {
            std::printf("  %s: %.17g vs reference %.17g: %s\n", std::string(to_string(t)).c_str(),
                        got, want, to_source(f).c_str());
          }
        }
      }
    }
    bad += family_bad;
    per_family += fmt("%s=%d ", std::string(to_string(t)).c_str(), family_bad);
  }
  report("fuzzy_emulation", bad == 0,
         fmt("100 formulas x 2 encodings per family, failures: %smax |diff|=%.3g",
             per_family.c_str(), worst));
}

void gradient_exactness() {
  Gen g(0x6a4d);
  int bad = 0;
  int coords = 0;
  double worst = 0.0;
  ProgramOptions opt;
  opt.parameterised = true;
  opt.boolean_only_in_true = true;
  opt.allow_ties = false;
  opt.max_statements = 3;
  for (int i = 0; i < 50; ++i) {
    Program p = random_program(g, opt);
    while (p.interp.theta().empty()) p = random_program(g, opt);
    const auto gp = grad_prob(p.formula, p.interp, LossTransform::Neg);
    const auto fp = finite_differences(
        p.interp, [&](const Interpretation& I) { return -eval_prob(p.formula, I); });
    FuzzyOptions fo;
    fo.family = TNorm::Product;
    const auto gf = grad_fuzzy(p.formula, p.interp, LossTransform::Neg, fo);
    const auto ff = finite_differences(
        p.interp, [&](const Interpretation& I) { return -eval_fuzzy(p.formula, I, {}, fo); });
    for (std::size_t j = 0; j < gp.size(); ++j) {
      coords += 2;
      worst = std::max({worst, std::abs(gp[j] - fp[j]), std::abs(gf[j] - ff[j])});
      if (!grad_close(gp[j], fp[j]) || !grad_close(gf[j], ff[j])) {
        if (bad++ == 0) {
          std::printf("  coordinate %zu: prob %.12g vs %.12g, fuzzy %.12g vs %.12g: %s\n", j,
                      gp[j], fp[j], gf[j], ff[j], to_source(p.formula).c_str());
        }
      }
    }
  }
  report("gradient_exactness", bad == 0,
         fmt("50 fixtures, %d coordinates, %d failures, max |g-fd|=%.3g", coords, bad, worst));
}

void sampling_unbiasedness() {
  const auto t0 = Clock::now();
  int bad = 0;
  std::string detail;
  for (const auto& fc : fixture_cases()) {
    const Formula f = load_fixture_program(fc.program);
    const Interpretation interp = load_interpretation(fixture(fc.interp));
    const double exact = eval_prob(f, interp);
    const Estimate e = estimate_prob(f, interp, 100000, 7);
    // The standard error of a mean of n Bernoulli(p) draws. The estimated
    // one is zero whenever no rollout succeeds, which happens for the tiny
    // probabilities of the labelled-examples formulas.
    const double sigma = std::sqrt(exact * (1.0 - exact) / 100000.0);
    const double z = sigma > 0 ? (e.mean - exact) / sigma : 0.0;
    if (std::abs(e.mean - exact) > 3.0 * sigma + 1e-12) {
      ++bad;
      std::printf("  %s: estimate %.6g +- %.6g, exact %.6g\n", fc.program.c_str(), e.mean,
                  e.std_error, exact);
    }
    detail += fmt("%.2f ", z);
  }

  Gen g(0x5c0e);
  ProgramOptions opt;
  opt.parameterised = true;
  opt.boolean_only_in_true = true;
  opt.allow_ties = false;
  opt.max_statements = 2;
  opt.max_depth = 3;
  int coords = 0;
  int grad_bad = 0;
  double max_z = 0.0;
  for (int i = 0; i < 10; ++i) {
    Program p = random_program(g, opt);
    while (p.interp.theta().empty() || p.interp.theta().size() > 12) p = random_program(g, opt);
    const auto exact = grad_prob(p.formula, p.interp, LossTransform::Neg);
    const GradEstimate est = grad_score(p.formula, p.interp, 200000, 11 + i, LossTransform::Neg);
    for (std::size_t j = 0; j < exact.size(); ++j) {
      ++coords;
      const double diff = std::abs(est.mean[j] - exact[j]);
      if (est.std_error[j] > 0) max_z = std::max(max_z, diff / est.std_error[j]);
      if (diff > 3.0 * est.std_error[j] + 1e-12) {
        ++grad_bad;
        std::printf("  coordinate %zu: score %.6f +- %.6f, exact %.6f: %s\n", j, est.mean[j],
                    est.std_error[j], exact[j], to_source(p.formula).c_str());
      }
    }
  }
  const double secs = seconds_since(t0);
  report("sampling_unbiasedness", bad == 0 && grad_bad == 0 && secs < 120.0,
         fmt("%zu fixtures (%d outside 3 SE; z = %s), 10 gradient fixtures (%d of %d "
             "coordinates outside 3 SE, max z=%.2f), %.1f s",
             fixture_cases().size(), bad, detail.c_str(), grad_bad, coords, max_z, secs));
}

void mnist_training() {
  const auto t0 = Clock::now();
  const SyntheticMnist data = synthetic_mnist_add(200, 200, 0);
  const Formula f = parse_program(slurp(fixture("mnist_add.uller")));
  TrainConfig config;
  config.epochs = 200;
  config.batch_size = 20;
  config.seed = 0;
  const TrainResult r = train({f}, data.interp, config);
  const auto& epochs = r.report.epochs;
  std::size_t reached = 0;
  for (const auto& e : epochs) {
    if (e.satisfaction > 0.9) {
      reached = e.epoch;
      break;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = reached > 0 && epochs.back().loss < epochs.front().loss && secs < 300.0;
  report("mnist_training", ok,
         fmt("satisfaction > 0.9 at epoch %zu, final %.3f; loss %.3f -> %.3f; %.1f s", reached,
             epochs.back().satisfaction, epochs.front().loss, epochs.back().loss, secs));
}

// Random inputs for the parser: token soup and byte-level mutations of the
// corpus.
std::string fuzz_input(Gen& g, const std::vector<std::string>& corpus) {
  static const std::vector<std::string> tokens = {
      "forall", "exists", "in", "and", "or", "not", "=>", "<=>", ":=", "(", ")", ",", ".",
      "x", "y", "f", "T", "true", "false", "=", "!=", "<", "<=", ">", ">=", "+", "-", "*",
      "0", "12", "3.5", "\"s\"", ";", "#c\n", " ", "\n", "-7", "1e9", "≠", "≤", "⇔", "\\",
      "99999999999999999999", "x.im1"};
  std::string s;
  if (g.chance(0.5)) {
    const int n = g.range(0, 40);
    for (int i = 0; i < n; ++i) s += g.pick(tokens) + (g.chance(0.5) ? " " : "");
    return s;
  }
  s = g.pick(corpus);
  const int edits = g.range(1, 8);
  for (int e = 0; e < edits && !s.empty(); ++e) {
    const std::size_t at = g.below(s.size());
    switch (g.range(0, 3)) {
      case 0: s.erase(at, 1); break;
      case 1: s.insert(at, 1, static_cast<char>(g.range(1, 255))); break;
      case 2: s.insert(at, g.pick(tokens)); break;
      default: s.erase(at, g.below(s.size() - at) + 1); break;
    }
  }
  if (g.chance(0.01)) s = std::string(static_cast<std::size_t>(g.range(1, 5000)), '(') + s;
  return s;
}

void parser_corpus() {
  int bad = 0;
  std::vector<std::string> corpus;
  for (const auto& fc : fixture_cases()) {
    const std::string src = slurp(fixture(fc.program));
    corpus.push_back(src);
    try {
      const Interpretation interp = load_interpretation(fixture(fc.interp));
      for (const Formula& f : parse_formulas(src)) {
        const std::string printed = to_source(f);
        if (!equal(parse_program(printed), f)) {
          ++bad;
          std::printf("  %s: round trip changed the tree\n", fc.program.c_str());
        }
        for (const Error& e : check_program(f, interp)) {
          ++bad;
          std::printf("  %s: %s\n", fc.program.c_str(), e.what());
        }
      }
    } catch (const Error& e) {
      ++bad;
      std::printf("  %s: %s\n", fc.program.c_str(), e.what());
    }
  }
  // The empty fixture must be rejected with a parse error.
  bool empty_rejected = false;
  try {
    (void)parse_program(slurp(fixture("empty.uller")));
  } catch (const Error& e) {
    empty_rejected = e.kind() == ErrorKind::Parse;
  }
  if (!empty_rejected) ++bad;

  Gen g(0xf055);
  int accepted = 0;
  int crashes = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::string input = fuzz_input(g, corpus);
    try {
      for (const Formula& f : parse_formulas(input)) {
        ++accepted;
        if (!equal(parse_program(to_source(f)), f)) ++bad;
      }
    } catch (const Error&) {
    } catch (const std::exception& e) {
      if (crashes++ == 0) std::printf("  non-domain exception %s on: %s\n", e.what(), input.c_str());
    }
  }
  report("parser_corpus", bad == 0 && crashes == 0,
         fmt("%zu fixtures, %d problems; 100000 fuzz inputs, %d formulas accepted, %d crashes",
             fixture_cases().size() + 1, bad, accepted, crashes));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> criteria = {
      {"dice_scoping", dice_scoping},
      {"wmc_oracle", wmc_oracle},
      {"classical_in_the_limit", classical_in_the_limit},
      {"fuzzy_emulation", fuzzy_emulation},
      {"gradient_exactness", gradient_exactness},
      {"sampling_unbiasedness", sampling_unbiasedness},
      {"mnist_training", mnist_training},
      {"parser_corpus", parser_corpus},
  };
  for (const auto& [name, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
