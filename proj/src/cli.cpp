// Copyright 2026 The conceptvec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "conceptvec/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <functional>
#include <optional>

#include "conceptvec/analogy.hpp"
#include "conceptvec/argtype.hpp"
#include "conceptvec/categorize.hpp"
#include "conceptvec/concept_graph.hpp"
#include "conceptvec/corpus.hpp"
#include "conceptvec/errors.hpp"
#include "conceptvec/model_store.hpp"
#include "conceptvec/trainer.hpp"

namespace conceptvec::cli {
namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string display_key(const Token& tok) { return tok.surface(); }

// Keeps the key=value report one entry per line.
std::string one_line(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
  return s;
}

struct GlobalOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  bool quiet = false;
};

struct TrainOptions {
  std::string corpus;
  std::string graph;
  std::string totals;
  std::string out;
  bool binary = false;
  bool fixed_window = false;
  bool exempt_concepts = false;
  bool noise_includes_graph = false;
  std::uint64_t max_edge_count = 0;
  TrainConfig config;
};

void run_train(TrainOptions opt, const GlobalOptions& global, RunReport& report) {
  TrainConfig& cfg = opt.config;
  cfg.seed = global.seed;
  cfg.workers = global.workers;
  cfg.dynamic_window = !opt.fixed_window;
  cfg.subsample_concepts = !opt.exempt_concepts;
  cfg.noise_includes_graph = opt.noise_includes_graph;
  cfg.max_edge_count = opt.max_edge_count;

  report.add_config("corpus", opt.corpus);
  report.add_config("graph", opt.graph.empty() ? "-" : opt.graph);
  report.add_config("totals", opt.totals.empty() ? "-" : opt.totals);
  report.add_config("out", opt.out);
  report.add_config("format", opt.binary ? "binary" : "text");
  report.add_config("dim", std::to_string(cfg.dim));
  report.add_config("window", std::to_string(cfg.window));
  report.add_config("dynamic_window", cfg.dynamic_window ? "true" : "false");
  report.add_config("negatives", std::to_string(cfg.negatives));
  report.add_config("sample", format_double(cfg.subsample_threshold));
  report.add_config("epochs", std::to_string(cfg.epochs));
  report.add_config("lr", format_double(cfg.initial_lr));
  report.add_config("min_lr", format_double(cfg.min_lr));
  report.add_config("min_count", std::to_string(cfg.min_count));
  report.add_config("power", format_double(cfg.noise_power));
  report.add_config("seed", std::to_string(cfg.seed));
  report.add_config("workers", std::to_string(cfg.workers));

  const TokenStream corpus = parse_corpus(std::filesystem::path(opt.corpus));
  std::optional<ConceptGraph> graph;
  if (!opt.graph.empty()) {
    graph = parse_graph(std::filesystem::path(opt.graph));
    if (!opt.totals.empty()) load_concept_totals(*graph, std::filesystem::path(opt.totals));
  } else if (!opt.totals.empty()) {
    throw Error("--totals requires --graph");
  }

  auto result = fit<float>(corpus, graph ? &*graph : nullptr, cfg);
  save_model(result.model, std::filesystem::path(opt.out),
             opt.binary ? VectorFormat::Binary : VectorFormat::Text);

  std::size_t concepts = 0;
  for (const auto& e : result.model.vocab.entries()) concepts += e.token.is_concept() ? 1 : 0;
  const auto& st = result.stats;
  std::uint64_t steps = 0;
  for (auto s : st.steps) steps += s;
  report.add_metric("documents", corpus.documents.size());
  report.add_metric("corpus_tokens", corpus.token_count());
  report.add_metric("vocab_size", result.model.vocab.size());
  report.add_metric("vocab_concepts", concepts);
  report.add_metric("vocab_words", result.model.vocab.size() - concepts);
  if (result.alignment) {
    report.add_metric("graph_matched_concepts", static_cast<std::size_t>(result.alignment->matched));
    report.add_metric("graph_dropped_concepts", static_cast<std::size_t>(result.alignment->dropped_concepts));
    report.add_metric("graph_dropped_edges", static_cast<std::size_t>(result.alignment->dropped_edges));
  }
  report.add_metric("text_pairs_epoch0", static_cast<std::size_t>(st.text_pairs.front()));
  report.add_metric("graph_pairs_epoch0", static_cast<std::size_t>(st.graph_pairs.front()));
  report.add_metric("steps_total", static_cast<std::size_t>(steps));
  report.add_metric("skipped_negatives", static_cast<std::size_t>(st.skipped_negatives));
  report.add_metric("mean_objective_first_epoch", st.mean_objective.front());
  report.add_metric("mean_objective_last_epoch", st.mean_objective.back());
}

struct AnalogyOptions {
  std::string model;
  std::string questions;
  std::string report_mode;
};

void run_analogy(const AnalogyOptions& opt, RunReport& report) {
  report.add_config("model", opt.model);
  report.add_config("questions", opt.questions);
  const auto model = load_model<float>(opt.model);
  const auto questions = parse_questions(std::filesystem::path(opt.questions));
  const AnalogyReport r = score(model, questions);
  report.add_metric("accuracy", r.accuracy());
  report.add_metric("total", r.total);
  report.add_metric("correct", r.correct);
  report.add_metric("abstained", r.abstained);
  if (opt.report_mode == "per-section") {
    for (const auto& s : r.sections) {
      report.add_metric("section." + s.name + ".accuracy", s.accuracy());
      report.add_metric("section." + s.name + ".total", s.total);
      report.add_metric("section." + s.name + ".correct", s.correct);
      report.add_metric("section." + s.name + ".abstained", s.abstained);
    }
  }
}

struct CategorizeOptions {
  std::string model;
  std::string dataset;
  std::string labels;
  std::size_t bootstrap = 1;
  bool no_bootstrap = false;
};

void run_categorize(const CategorizeOptions& opt, RunReport& report) {
  report.add_config("model", opt.model);
  report.add_config("dataset", opt.dataset);
  report.add_config("labels", opt.labels);
  report.add_config("method", opt.no_bootstrap ? "rocchio" : "bootstrap");
  if (!opt.no_bootstrap) report.add_config("bootstrap", std::to_string(opt.bootstrap));

  const auto model = load_model<float>(opt.model);
  const auto input = load_categorization(model, std::filesystem::path(opt.dataset),
                                         std::filesystem::path(opt.labels));
  const std::size_t rows = input.data.instances.size() + input.unresolved.size();
  if (rows == 0) throw Error("dataset is empty");

  std::size_t correct = 0;
  int rounds = 0;
  if (!input.data.instances.empty()) {
    const Assignment assign = opt.no_bootstrap ? rocchio_classify(input.data)
                                               : bootstrap_classify(input.data, opt.bootstrap);
    rounds = assign.rounds;
    for (const auto& [instance, label] : assign.pairs) {
      if (input.data.gold.at(instance) == label) ++correct;
    }
  }
  // Unresolved instances count as misclassified.
  report.add_metric("accuracy", static_cast<double>(correct) / static_cast<double>(rows));
  report.add_metric("instances", rows);
  report.add_metric("correct", correct);
  report.add_metric("unresolved", input.unresolved.size());
  report.add_metric("rounds", static_cast<std::size_t>(rounds));
}

struct ArgtypeOptions {
  std::string model;
  std::string types;
  std::string in;
  std::string out;
  double threshold = 0.5;
  bool strict = false;
};

void run_argtype(const ArgtypeOptions& opt, RunReport& report) {
  report.add_config("model", opt.model);
  report.add_config("types", opt.types);
  report.add_config("in", opt.in);
  report.add_config("out", opt.out);
  report.add_config("threshold", format_double(opt.threshold));
  report.add_config("strict_threshold", opt.strict ? "true" : "false");

  const auto model = load_model<float>(opt.model);
  auto inventory = load_type_inventory(model, std::filesystem::path(opt.types), opt.threshold);
  inventory.strict = opt.strict;
  const auto s = type_corpus(model, inventory, std::filesystem::path(opt.in),
                             std::filesystem::path(opt.out));
  report.add_metric("types", inventory.types.size());
  report.add_metric("utterances", s.utterances);
  report.add_metric("mentions", s.mentions);
  report.add_metric("typed", s.typed);
  report.add_metric("skipped_oov", s.skipped_oov);
  report.add_metric("skipped_below_threshold", s.skipped_below_threshold);
}

struct NnOptions {
  std::string model;
  std::string query;
  std::size_t topk = 10;
};

void run_nn(const NnOptions& opt, RunReport& report) {
  report.add_config("model", opt.model);
  report.add_config("query", opt.query);
  report.add_config("topk", std::to_string(opt.topk));
  const auto model = load_model<float>(opt.model);
  const auto row = lookup(model, opt.query);
  if (!row) throw Error("'" + opt.query + "' is not in the model");
  report.add_metric("resolved", display_key(model.vocab.token(*row)));
  if (!(model.input.row(*row).norm() > 0.0f)) throw Error("query vector is zero");
  const Ordinal self[] = {*row};
  const auto hits = nearest(model, model.input.row(*row), self, opt.topk);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    report.add_metric("neighbor." + std::to_string(i + 1),
                      display_key(model.vocab.token(hits[i].ordinal)) + " " +
                          format_double(static_cast<double>(hits[i].similarity)));
  }
}

struct InspectOptions {
  std::string model;
  std::string corpus;
  std::string graph;
  std::uint64_t min_count = 5;
};

void run_inspect(const InspectOptions& opt, RunReport& report) {
  if (opt.model.empty() && opt.corpus.empty()) throw CLI::ValidationError("inspect needs --model or --corpus");
  if (!opt.model.empty()) {
    report.add_config("model", opt.model);
    const auto model = load_model<float>(opt.model);
    std::size_t concepts = 0;
    for (const auto& e : model.vocab.entries()) concepts += e.token.is_concept() ? 1 : 0;
    const Eigen::VectorXf norms = model.input.rowwise().norm();
    report.add_metric("rows", static_cast<std::size_t>(model.rows()));
    report.add_metric("dim", static_cast<std::size_t>(model.dim()));
    report.add_metric("concept_rows", concepts);
    report.add_metric("word_rows", static_cast<std::size_t>(model.rows()) - concepts);
    if (norms.size() > 0) {
      report.add_metric("mean_norm", static_cast<double>(norms.mean()));
      report.add_metric("max_norm", static_cast<double>(norms.maxCoeff()));
    }
    report.add_metric("finite", model.input.allFinite() ? "true" : "false");
  }
  if (!opt.corpus.empty()) {
    report.add_config("corpus", opt.corpus);
    report.add_config("min_count", std::to_string(opt.min_count));
    const auto corpus = parse_corpus(std::filesystem::path(opt.corpus));
    const auto vocab = build_vocabulary(corpus, opt.min_count);
    std::size_t concepts = 0;
    for (const auto& e : vocab.entries()) concepts += e.token.is_concept() ? 1 : 0;
    report.add_metric("documents", corpus.documents.size());
    report.add_metric("corpus_tokens", corpus.token_count());
    report.add_metric("vocab_size", vocab.size());
    report.add_metric("vocab_concepts", concepts);
    report.add_metric("vocab_tokens", static_cast<std::size_t>(vocab.total_tokens()));
    if (!opt.graph.empty()) {
      report.add_config("graph", opt.graph);
      const auto graph = parse_graph(std::filesystem::path(opt.graph));
      const auto aligned = align(graph, vocab);
      report.add_metric("graph_concepts", graph.concepts().size());
      report.add_metric("graph_edges", graph.edge_count());
      report.add_metric("graph_matched_concepts", static_cast<std::size_t>(aligned.report.matched));
      report.add_metric("graph_dropped_concepts", static_cast<std::size_t>(aligned.report.dropped_concepts));
      report.add_metric("graph_dropped_edges", static_cast<std::size_t>(aligned.report.dropped_edges));
      report.add_metric("graph_pairs_per_epoch", static_cast<std::size_t>(2 * aligned.graph.total_weight()));
    }
  }
}

}  // namespace

void RunReport::add_metric(std::string key, double value) {
  add_metric(std::move(key), format_double(value));
}

void RunReport::write_human(std::ostream& out) const {
  out << "== " << command << " (" << status << ") ==\n";
  auto block = [&](const char* title, const auto& items) {
    if (items.empty()) return;
    std::size_t width = 0;
    for (const auto& [k, v] : items) width = std::max(width, k.size());
    out << title << ":\n";
    for (const auto& [k, v] : items) {
      out << "  " << k << std::string(width - k.size(), ' ') << "  " << v << '\n';
    }
  };
  block("config", config);
  block("metrics", metrics);
  out << "wall time: " << format_double(wall_seconds) << " s\n";
}

void RunReport::write_machine(std::ostream& out) const {
  out << "command=" << command << '\n';
  out << "status=" << status << '\n';
  for (const auto& [k, v] : config) out << "config." << k << '=' << one_line(v) << '\n';
  for (const auto& [k, v] : metrics) out << "metric." << k << '=' << one_line(v) << '\n';
  out << "wall_time=" << format_double(wall_seconds) << '\n';
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();

  CLI::App app{"Joint word and concept embeddings: train and evaluate", "conceptvec"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  GlobalOptions global;
  app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
  app.add_option("--workers", global.workers, "Training threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--quiet", global.quiet, "Suppress the human-readable report");

  RunReport report;
  std::function<void()> action;

  TrainOptions train_opt;
  TrainConfig& cfg = train_opt.config;
  auto* train = app.add_subcommand("train", "Train joint embeddings from a corpus and optional concept graph");
  train->add_option("--corpus", train_opt.corpus, "Annotated corpus")->required()->check(CLI::ExistingFile);
  train->add_option("--graph", train_opt.graph, "Concept graph TSV")->check(CLI::ExistingFile);
  train->add_option("--totals", train_opt.totals, "Concept totals TSV")->check(CLI::ExistingFile);
  train->add_option("--out", train_opt.out, "Output vectors file")->required();
  train->add_option("--dim", cfg.dim)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--window", cfg.window)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--negatives", cfg.negatives)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--sample", cfg.subsample_threshold, "Subsampling threshold (0 disables)")->capture_default_str();
  train->add_option("--epochs", cfg.epochs)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--lr", cfg.initial_lr)->capture_default_str();
  train->add_option("--min-lr", cfg.min_lr)->capture_default_str();
  train->add_option("--min-count", cfg.min_count)->capture_default_str();
  train->add_option("--power", cfg.noise_power, "Noise distribution exponent")->capture_default_str();
  train->add_option("--max-edge-count", train_opt.max_edge_count, "Per-edge pair cap (0 = none)")->capture_default_str();
  train->add_flag("--binary", train_opt.binary, "Write binary vectors");
  train->add_flag("--fixed-window", train_opt.fixed_window, "Disable dynamic window shrinking");
  train->add_flag("--no-subsample-concepts", train_opt.exempt_concepts, "Never subsample concept tokens");
  train->add_flag("--noise-includes-graph", train_opt.noise_includes_graph, "Add edge counts to noise mass");
  train->callback([&] { action = [&] { run_train(train_opt, global, report); }; });

  AnalogyOptions analogy_opt;
  auto* analogy = app.add_subcommand("analogy", "Score a:b::c:? questions");
  analogy->add_option("--model", analogy_opt.model)->required()->check(CLI::ExistingFile);
  analogy->add_option("--questions", analogy_opt.questions)->required()->check(CLI::ExistingFile);
  analogy->add_option("--report", analogy_opt.report_mode, "Use 'per-section' for section scores")
      ->check(CLI::IsMember({"overall", "per-section"}));
  analogy->callback([&] { action = [&] { run_analogy(analogy_opt, report); }; });

  CategorizeOptions cat_opt;
  auto* categorize = app.add_subcommand("categorize", "Assign instances to categories");
  categorize->add_option("--model", cat_opt.model)->required()->check(CLI::ExistingFile);
  categorize->add_option("--dataset", cat_opt.dataset)->required()->check(CLI::ExistingFile);
  categorize->add_option("--labels", cat_opt.labels)->required()->check(CLI::ExistingFile);
  auto* boot = categorize->add_option("--bootstrap", cat_opt.bootstrap, "Instances absorbed per label per round")
                   ->capture_default_str()
                   ->check(CLI::PositiveNumber);
  categorize->add_flag("--no-bootstrap", cat_opt.no_bootstrap, "Plain nearest-prototype assignment")->excludes(boot);
  categorize->callback([&] { action = [&] { run_categorize(cat_opt, report); }; });

  ArgtypeOptions arg_opt;
  auto* argtype = app.add_subcommand("argtype", "Replace typed mentions with placeholders");
  argtype->add_option("--model", arg_opt.model)->required()->check(CLI::ExistingFile);
  argtype->add_option("--types", arg_opt.types)->required()->check(CLI::ExistingFile);
  argtype->add_option("--in", arg_opt.in)->required()->check(CLI::ExistingFile);
  argtype->add_option("--out", arg_opt.out)->required();
  argtype->add_option("--threshold", arg_opt.threshold)->capture_default_str()->check(CLI::Range(-1.0, 1.0));
  argtype->add_flag("--strict-threshold", arg_opt.strict, "Require similarity > threshold");
  argtype->callback([&] { action = [&] { run_argtype(arg_opt, report); }; });

  NnOptions nn_opt;
  auto* nn = app.add_subcommand("nn", "Nearest neighbours of a mention");
  nn->add_option("--model", nn_opt.model)->required()->check(CLI::ExistingFile);
  nn->add_option("--query", nn_opt.query)->required();
  nn->add_option("--topk", nn_opt.topk)->capture_default_str()->check(CLI::PositiveNumber);
  nn->callback([&] { action = [&] { run_nn(nn_opt, report); }; });

  InspectOptions inspect_opt;
  auto* inspect = app.add_subcommand("inspect", "Summarize a model, or a corpus and graph");
  inspect->add_option("--model", inspect_opt.model)->check(CLI::ExistingFile);
  inspect->add_option("--corpus", inspect_opt.corpus)->check(CLI::ExistingFile);
  inspect->add_option("--graph", inspect_opt.graph)->check(CLI::ExistingFile);
  inspect->add_option("--min-count", inspect_opt.min_count)->capture_default_str();
  inspect->callback([&] { action = [&] { run_inspect(inspect_opt, report); }; });

  std::vector<const char*> argv{"conceptvec"};
  for (const auto& a : args) argv.push_back(a.c_str());

  auto finish = [&](int code) {
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!global.quiet) report.write_human(err);
    report.write_machine(out);
    return code;
  };

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    if (auto subs = app.get_subcommands(); !subs.empty()) {
      report.command = subs.front()->get_name();
      err << subs.front()->help();
    } else {
      err << app.help();
    }
    report.status = "usage_error";
    report.add_metric("error", e.what());
    return finish(kExitUsage);
  }

  report.command = app.get_subcommands().front()->get_name();
  try {
    action();
  } catch (const CLI::ValidationError& e) {
    report.status = "usage_error";
    report.add_metric("error", e.what());
    err << "error: " << e.what() << '\n';
    return finish(kExitUsage);
  } catch (const std::exception& e) {
    report.status = "error";
    report.add_metric("error", e.what());
    err << "error: " << e.what() << '\n';
    return finish(kExitData);
  }
  return finish(kExitOk);
}

}  // namespace conceptvec::cli
