#include "uller/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

#include "uller/evaluate.hpp"
#include "uller/exact.hpp"
#include "uller/interpretation.hpp"
#include "uller/learning.hpp"
#include "uller/parser.hpp"
#include "uller/sem_fuzzy.hpp"
#include "uller/sem_prob.hpp"
#include "uller/sem_sample.hpp"

namespace uller::cli {

std::string format_truth(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", x);
  return buf;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

nlohmann::json to_json(const Term& t) {
  return std::visit(
      [](const auto& n) -> nlohmann::json {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarTerm>) {
          return {{"type", "Var"}, {"name", n.name}};
        } else if constexpr (std::is_same_v<N, ConstTerm>) {
          return {{"type", "Const"}, {"name", n.name}};
        } else if constexpr (std::is_same_v<N, PropAccess>) {
          return {{"type", "PropAccess"}, {"base", to_json(n.base)}, {"prop", n.prop}};
        } else if constexpr (std::is_same_v<N, ArithTerm>) {
          const char* op = n.op == ArithOp::Add ? "+" : n.op == ArithOp::Sub ? "-" : "*";
          return {{"type", "Arith"}, {"op", op}, {"left", to_json(n.left)},
                  {"right", to_json(n.right)}};
        } else {
          return {{"type", "Literal"}, {"value", value_to_json(n.value)}};
        }
      },
      t->node);
}

nlohmann::json to_json(const Formula& f) {
  auto terms = [](const std::vector<Term>& ts) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& t : ts) a.push_back(to_json(t));
    return a;
  };
  return std::visit(
      [&](const auto& n) -> nlohmann::json {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ForAll>) {
          return {{"type", "ForAll"}, {"var", n.var}, {"domain", n.domain}, {"body", to_json(n.body)}};
        } else if constexpr (std::is_same_v<N, Exists>) {
          return {{"type", "Exists"}, {"var", n.var}, {"domain", n.domain}, {"body", to_json(n.body)}};
        } else if constexpr (std::is_same_v<N, And>) {
          return {{"type", "And"}, {"left", to_json(n.left)}, {"right", to_json(n.right)}};
        } else if constexpr (std::is_same_v<N, Or>) {
          return {{"type", "Or"}, {"left", to_json(n.left)}, {"right", to_json(n.right)}};
        } else if constexpr (std::is_same_v<N, Implies>) {
          return {{"type", "Implies"}, {"left", to_json(n.left)}, {"right", to_json(n.right)}};
        } else if constexpr (std::is_same_v<N, Not>) {
          return {{"type", "Not"}, {"operand", to_json(n.operand)}};
        } else if constexpr (std::is_same_v<N, Pred>) {
          return {{"type", "Pred"}, {"name", n.name}, {"args", terms(n.args)}};
        } else {
          return {{"type", "Statement"}, {"var", n.var}, {"func", n.func},
                  {"args", terms(n.args)}, {"body", to_json(n.body)}};
        }
      },
      f->node);
}

namespace {

struct Common {
  std::string program;
  std::string interp;
  std::string data;
  std::string semantics = "prob";
  std::string tnorm = "product";
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::uint64_t budget = EvalOptions{}.node_budget;
  bool json = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open program file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Formula> load_program(const std::string& path) {
  return parse_formulas(read_file(path));
}

Interpretation load_all(const Common& c) {
  Interpretation interp = load_interpretation(c.interp);
  if (!c.data.empty()) {
    std::ifstream in(c.data);
    if (!in) throw Error(ErrorKind::Io, "cannot open data file '" + c.data + "'");
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::Schema, c.data + ": malformed JSON");
    interp = with_datasets(interp, j);
  }
  return interp;
}

void add_io(CLI::App* cmd, Common& c, bool need_interp = true) {
  cmd->add_option("--program", c.program, "ULLER program file")->required();
  auto* i = cmd->add_option("--interp", c.interp, "interpretation JSON file");
  if (need_interp) i->required();
  cmd->add_option("--data", c.data, "JSON file with datasets");
  cmd->add_flag("--json", c.json, "machine-readable output");
}

void add_semantics(CLI::App* cmd, Common& c, std::vector<std::string> allowed) {
  cmd->add_option("--semantics", c.semantics, "semantics")
      ->check(CLI::IsMember(std::move(allowed)))
      ->capture_default_str();
  cmd->add_option("--tnorm", c.tnorm, "fuzzy t-norm family")
      ->check(CLI::IsMember({"godel", "product", "lukasiewicz"}))
      ->capture_default_str();
  cmd->add_option("--samples", c.samples, "number of rollouts")->capture_default_str();
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads for sampling")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--budget", c.budget, "maximum formula nodes visited per evaluation");
}

SemanticsConfig semantics_config(const Common& c) {
  SemanticsConfig s;
  s.kind = semantics_from_string(c.semantics);
  s.family = tnorm_from_string(c.tnorm);
  s.samples = c.samples;
  s.seed = c.seed;
  s.threads = c.threads;
  s.eval.node_budget = c.budget;
  return s;
}

LossTransform transform_from_string(const std::string& s) {
  return s == "neg" ? LossTransform::Neg : LossTransform::NegLog;
}

/// "f(img0)[3]" for each theta coordinate.
std::vector<std::string> theta_labels(const Interpretation& interp) {
  std::vector<std::string> labels(interp.theta().size());
  for (const auto& [name, def] : interp.functions()) {
    const auto* p = std::get_if<FunctionDef::Parameterised>(&def.kind);
    if (!p) continue;
    const auto& codomain = interp.domain(def.codomain).elements;
    for (const auto& [args, offset] : p->rows) {
      std::string head = name + "(";
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) head += ", ";
        head += to_string(args[i]);
      }
      head += ")";
      for (std::size_t k = 0; k < codomain.size(); ++k) {
        labels.at(offset + k) = head + "[" + to_string(codomain[k]) + "]";
      }
    }
  }
  return labels;
}

bool color_enabled() {
  const char* v = std::getenv("ULLER_COLOR");
  return v && std::string(v) == "1";
}

void report_error(std::ostream& err, const std::string& message) {
  if (color_enabled()) {
    err << "\033[1;31merror:\033[0m " << message << "\n";
  } else {
    err << "error: " << message << "\n";
  }
}

// Subcommands ---------------------------------------------------------------

int cmd_parse(const Common& c, bool source, std::ostream& out) {
  const auto formulas = load_program(c.program);
  if (source) {
    for (std::size_t i = 0; i < formulas.size(); ++i) {
      out << to_source(formulas[i]) << (i + 1 < formulas.size() ? ";\n" : "\n");
    }
    return 0;
  }
  nlohmann::json j;
  if (formulas.size() == 1) {
    j = to_json(formulas[0]);
  } else {
    j = nlohmann::json::array();
    for (const auto& f : formulas) j.push_back(to_json(f));
  }
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_eval(const Common& c, bool exact, std::ostream& out) {
  const Formula f = build::conj_all(load_program(c.program));
  const Interpretation interp = load_all(c);
  const SemanticsConfig s = semantics_config(c);
  nlohmann::json j = {{"semantics", c.semantics}};
  std::string text;
  if (s.kind == SemanticsKind::Sample) {
    const Estimate e =
        estimate_prob(f, interp, c.samples, c.seed, SampleOptions{c.threads, s.eval});
    j["value"] = e.mean;
    j["std_error"] = e.std_error;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    text = format_truth(e.mean) + " +- " + format_truth(e.std_error);
  } else {
    const double v = evaluate(f, interp, s);
    j["value"] = v;
    if (s.kind == SemanticsKind::Fuzzy) j["tnorm"] = c.tnorm;
    text = s.kind == SemanticsKind::Classical ? (v == 1.0 ? "1" : "0") : format_truth(v);
    if (s.kind == SemanticsKind::Prob && (exact || c.json) && has_exact_probabilities(interp)) {
      const std::string r = to_string(eval_exact(f, interp, {}, s.eval));
      j["exact"] = r;
      if (exact) text = r;
    }
  }
  out << (c.json ? j.dump() : text) << "\n";
  return 0;
}

int cmd_grad(const Common& c, const std::string& estimator, const std::string& loss_name,
             std::ostream& out) {
  const Formula f = build::conj_all(load_program(c.program));
  const Interpretation interp = load_all(c);
  const SemanticsConfig s = semantics_config(c);
  const LossTransform transform = loss_name.empty()
                                      ? (s.kind == SemanticsKind::Fuzzy ? LossTransform::Neg
                                                                        : LossTransform::NegLog)
                                      : transform_from_string(loss_name);
  std::vector<double> grad;
  std::vector<double> std_err;
  if (estimator == "score") {
    if (s.kind != SemanticsKind::Prob) {
      throw Error(ErrorKind::InvalidConfig, "--estimator score requires --semantics prob");
    }
    GradEstimate g = grad_score(f, interp, c.samples, c.seed, transform,
                                SampleOptions{c.threads, s.eval});
    grad = std::move(g.mean);
    std_err = std::move(g.std_error);
  } else if (s.kind == SemanticsKind::Prob) {
    grad = grad_prob(f, interp, transform, s.eval);
  } else if (s.kind == SemanticsKind::Fuzzy) {
    grad = grad_fuzzy(f, interp, transform, s.fuzzy());
  } else {
    throw Error(ErrorKind::InvalidConfig, "gradients need --semantics prob or fuzzy");
  }
  const auto labels = theta_labels(interp);
  if (c.json) {
    nlohmann::json j = {{"gradient", grad}, {"labels", labels}};
    if (!std_err.empty()) j["std_error"] = std_err;
    out << j.dump() << "\n";
    return 0;
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    out << labels[i] << "\t" << format_number(grad[i]);
    if (!std_err.empty()) out << "\t+- " << format_number(std_err[i]);
    out << "\n";
  }
  return 0;
}

struct TrainFlags {
  std::string estimator = "exact";
  std::string loss;
  std::string optimizer = "adam";
  double lr = 1e-2;
  std::size_t epochs = 10;
  std::size_t batch = 32;
  std::vector<double> weights;
  std::string dataset;
  std::string out_path;
  std::string report_path;
};

int cmd_train(const Common& c, const TrainFlags& t, std::ostream& out) {
  const auto program = load_program(c.program);
  const Interpretation interp = load_all(c);
  TrainConfig config;
  config.semantics = semantics_from_string(c.semantics);
  config.family = tnorm_from_string(c.tnorm);
  config.estimator = t.estimator == "score" ? Estimator::Score : Estimator::Exact;
  config.samples = c.samples;
  config.optimizer.kind =
      t.optimizer == "sgd" ? OptimizerConfig::Kind::Sgd : OptimizerConfig::Kind::Adam;
  config.optimizer.lr = t.lr;
  config.epochs = t.epochs;
  config.batch_size = t.batch;
  config.seed = c.seed;
  if (!t.loss.empty()) config.loss_transform = transform_from_string(t.loss);
  config.weights = t.weights;
  if (!t.dataset.empty()) config.dataset = t.dataset;
  config.threads = c.threads;
  config.eval.node_budget = c.budget;

  const TrainResult result = train(program, interp, config);

  std::ofstream report_file;
  std::ostream* report = &out;
  if (!t.report_path.empty()) {
    report_file.open(t.report_path);
    if (!report_file) throw Error(ErrorKind::Io, "cannot write report '" + t.report_path + "'");
    report = &report_file;
  }
  for (const auto& e : result.report.epochs) {
    nlohmann::json line = {{"epoch", e.epoch},
                           {"loss", e.loss},
                           {"satisfaction", e.satisfaction},
                           {"theta_norm", e.theta_norm}};
    *report << line.dump() << "\n";
  }
  if (!t.out_path.empty()) {
    std::ofstream o(t.out_path);
    if (!o) throw Error(ErrorKind::Io, "cannot write interpretation '" + t.out_path + "'");
    o << interpretation_to_json(result.interp).dump(2) << "\n";
  }
  if (!t.report_path.empty() && !result.report.epochs.empty()) {
    const auto& last = result.report.epochs.back();
    out << "epochs " << last.epoch << "  loss " << format_number(last.loss) << "  satisfaction "
        << format_number(last.satisfaction) << "\n";
  }
  return 0;
}

int cmd_search(const Common& c, const std::string& dataset_flag, const std::string& candidates,
               bool maximize, std::ostream& out) {
  const Formula f = build::conj_all(load_program(c.program));
  const Interpretation interp = load_all(c);
  TrainConfig tc;
  if (!dataset_flag.empty()) tc.dataset = dataset_flag;
  const std::string dataset = dataset_symbol(tc, interp);
  const auto& cands = interp.domain(candidates.empty() ? dataset : candidates).elements;
  const SearchResult r = adversarial_search(f, interp, dataset, cands, semantics_config(c), maximize);
  if (c.json) {
    out << nlohmann::json{{"best", value_to_json(r.best)},
                          {"index", r.index},
                          {"score", r.score},
                          {"scores", r.scores}}
               .dump()
        << "\n";
  } else {
    out << to_string(r.best) << "\t" << format_truth(r.score) << "\n";
  }
  return 0;
}

int cmd_check(const Common& c, std::ostream& out, std::ostream& err) {
  const auto program = load_program(c.program);
  const Interpretation interp = load_all(c);
  std::vector<Error> problems;
  for (const auto& f : program) {
    auto p = check_program(f, interp);
    problems.insert(problems.end(), p.begin(), p.end());
  }
  if (c.json) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : problems) {
      a.push_back({{"kind", to_string(e.kind())}, {"message", e.what()}});
    }
    out << nlohmann::json{{"ok", problems.empty()}, {"problems", a}}.dump() << "\n";
  } else if (problems.empty()) {
    out << "ok\n";
  } else {
    for (const auto& e : problems) report_error(err, e.what());
  }
  return problems.empty() ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ULLER: a unified language for learning and reasoning", "uller"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "uller 0.1.0");

  Common c;
  bool source = false;
  bool exact = false;
  TrainFlags t;
  std::string dataset;
  std::string candidates;
  bool maximize = false;

  auto* parse = app.add_subcommand("parse", "print the desugared AST of a program");
  add_io(parse, c, false);
  parse->add_flag("--source", source, "print canonical source instead of JSON");

  auto* eval = app.add_subcommand("eval", "evaluate a program under an interpretation");
  add_io(eval, c);
  add_semantics(eval, c, {"classical", "prob", "viterbi", "fuzzy", "sample"});
  eval->add_flag("--exact", exact, "print the exact rational (prob semantics, rational inputs)");

  auto* grad = app.add_subcommand("grad", "gradient of the loss with respect to theta");
  add_io(grad, c);
  add_semantics(grad, c, {"prob", "fuzzy"});
  grad->add_option("--estimator", t.estimator)
      ->check(CLI::IsMember({"exact", "score"}))
      ->capture_default_str();
  grad->add_option("--loss", t.loss, "neg or neglog (default: neglog for prob, neg for fuzzy)")
      ->check(CLI::IsMember({"neg", "neglog"}));

  auto* train_cmd = app.add_subcommand("train", "fit the parameterised functions to the program");
  add_io(train_cmd, c);
  add_semantics(train_cmd, c, {"prob", "fuzzy"});
  train_cmd->add_option("--estimator", t.estimator)
      ->check(CLI::IsMember({"exact", "score"}))
      ->capture_default_str();
  train_cmd->add_option("--loss", t.loss, "neg or neglog")->check(CLI::IsMember({"neg", "neglog"}));
  train_cmd->add_option("--optimizer", t.optimizer)
      ->check(CLI::IsMember({"sgd", "adam"}))
      ->capture_default_str();
  train_cmd->add_option("--lr", t.lr)->capture_default_str();
  train_cmd->add_option("--epochs", t.epochs)->capture_default_str();
  train_cmd->add_option("--batch", t.batch)->capture_default_str();
  train_cmd->add_option("--weights", t.weights, "one weight per formula")->delimiter(',');
  train_cmd->add_option("--dataset", t.dataset, "domain that minibatches replace");
  train_cmd->add_option("--out", t.out_path, "write the trained interpretation here");
  train_cmd->add_option("--report", t.report_path, "write the per-epoch report here");

  auto* search = app.add_subcommand("search", "find the data point that most violates a program");
  add_io(search, c);
  add_semantics(search, c, {"classical", "prob", "viterbi", "fuzzy", "sample"});
  search->add_option("--dataset", dataset, "domain each candidate replaces");
  search->add_option("--candidates", candidates, "domain to draw candidates from");
  search->add_flag("--maximize", maximize, "return the most satisfying candidate instead");

  auto* check = app.add_subcommand("check", "check a program against an interpretation");
  add_io(check, c);

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("uller");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << "uller 0.1.0\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, e.what());
    err << "run 'uller --help' for usage\n";
    return 2;
  }

  try {
    if (parse->parsed()) return cmd_parse(c, source, out);
    if (eval->parsed()) return cmd_eval(c, exact, out);
    if (grad->parsed()) return cmd_grad(c, t.estimator, t.loss, out);
    if (train_cmd->parsed()) return cmd_train(c, t, out);
    if (search->parsed()) return cmd_search(c, dataset, candidates, maximize, out);
    if (check->parsed()) return cmd_check(c, out, err);
  } catch (const Error& e) {
    report_error(err, e.what());
    return 1;
  }
  return 2;
}

}  // namespace uller::cli
