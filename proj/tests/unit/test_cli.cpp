#include <cstdio>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "uller/cli.hpp"

using uller::testing::fixture;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = uller::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::pair<const char*, const char*> kCorpus[] = {
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

}  // namespace

TEST_CASE("dice probabilities") {
  auto r = run({"eval", "--semantics", "prob", "--program", fixture("dice_shared.uller"),
                "--interp", fixture("dice.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "0.166666666667\n");
  r = run({"eval", "--semantics", "prob", "--program", fixture("dice_indep.uller"), "--interp",
           fixture("dice.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "0.083333333333\n");
}

TEST_CASE("exact rational output") {
  const auto r = run({"eval", "--exact", "--program", fixture("dice_indep.uller"), "--interp",
                      fixture("dice.json")});
  CHECK(r.code == 0);
  CHECK(r.out.find("1/12") != std::string::npos);
  const auto j = run({"eval", "--json", "--program", fixture("dice_indep.uller"), "--interp",
                      fixture("dice.json")});
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed.at("exact") == "1/12");
  CHECK(parsed.at("semantics") == "prob");
}

TEST_CASE("every semantics runs on the dice") {
  for (const char* s : {"classical", "prob", "viterbi", "fuzzy", "sample"}) {
    INFO(s);
    const auto r = run({"eval", "--semantics", s, "--program", fixture("dice_shared.uller"),
                        "--interp", fixture("dice.json"), "--samples", "2000", "--threads", "2"});
    CHECK(r.code == 0);
    CHECK(!r.out.empty());
  }
}

TEST_CASE("empty program is a parse error") {
  const auto r = run({"parse", "--program", fixture("empty.uller")});
  CHECK(r.code == 1);
  CHECK(r.err.find("ParseError") != std::string::npos);
  CHECK(r.err.find("1:1") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"eval"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"eval", "--program", fixture("dice_shared.uller"), "--interp",
             fixture("dice.json"), "--semantics", "quantum"})
            .code == 2);
}

TEST_CASE("missing files are domain errors") {
  const auto r = run({"eval", "--program", fixture("nope.uller"), "--interp",
                      fixture("dice.json")});
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
}

TEST_CASE("every fixture parses, prints back and checks") {
  for (const auto& [prog, interp] : kCorpus) {
    INFO(prog);
    const auto json = run({"parse", "--program", fixture(prog)});
    REQUIRE(json.code == 0);
    const auto src = run({"parse", "--source", "--program", fixture(prog)});
    REQUIRE(src.code == 0);
    // Print, re-parse the printed source, and compare the JSON trees.
    const auto tmp = std::filesystem::temp_directory_path() / "uller_cli_roundtrip.uller";
    {
      std::ofstream out(tmp);
      out << src.out;
    }
    const auto again = run({"parse", "--program", tmp.string()});
    CHECK(again.out == json.out);
    std::filesystem::remove(tmp);
    const auto check = run({"check", "--program", fixture(prog), "--interp", fixture(interp)});
    CHECK(check.code == 0);
  }
}

TEST_CASE("grad, train and search") {
  auto r = run({"grad", "--program", fixture("mnist_add.uller"), "--interp",
                fixture("mnist_add.json")});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("f(\"img0\")[0]\t", 0) == 0);

  const auto dir = std::filesystem::temp_directory_path();
  const auto out = (dir / "uller_cli_trained.json").string();
  const auto report = (dir / "uller_cli_report.json").string();
  r = run({"train", "--program", fixture("mnist_add.uller"), "--interp",
           fixture("mnist_add.json"), "--epochs", "3", "--batch", "1", "--out", out, "--report",
           report});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(out));
  // One JSON object per epoch, one per line.
  std::istringstream lines(uller::testing::slurp(report));
  std::size_t epochs = 0;
  for (std::string line; std::getline(lines, line);) {
    CHECK(nlohmann::json::parse(line).at("epoch") == ++epochs);
  }
  CHECK(epochs == 3);
  // The trained interpretation loads back and evaluates.
  r = run({"eval", "--program", fixture("mnist_add.uller"), "--interp", out});
  CHECK(r.code == 0);
  std::filesystem::remove(out);
  std::filesystem::remove(report);

  r = run({"search", "--program", fixture("adversarial.uller"), "--interp",
           fixture("adversarial.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "\"loaded_one\"\t0.100000000000\n");
}

TEST_CASE("number formatting") {
  CHECK(uller::cli::format_truth(1.0 / 6.0) == "0.166666666667");
  CHECK(uller::cli::format_truth(0.0) == "0.000000000000");
  CHECK(uller::cli::format_number(-0.5) == "-0.5");
  CHECK(uller::cli::format_number(1.0 / 3.0) == "0.333333333333");
}
