#ifndef QACAT_CLI_HPP
#define QACAT_CLI_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qacat/config.hpp"
#include "qacat/constraints.hpp"
#include "qacat/document_relations.hpp"
#include "qacat/factset_oracle.hpp"
#include "qacat/http_transport.hpp"
#include "qacat/llm_oracle.hpp"
#include "qacat/report.hpp"

namespace qacat::cli {

using Json = nlohmann::ordered_json;

/// Everything the CLI touches outside its arguments; tests swap these.
struct Environment {
  std::function<std::shared_ptr<ChatTransport>(const EndpointConfig&)> transport_factory =
      [](const EndpointConfig& e) { return std::make_shared<HttpChatTransport>(e); };
  std::function<std::string()> clock = utc_timestamp;
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<std::size_t> parse_counts(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "'" + item + "' is not a count");
    }
  }
  return out;
}

inline std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

/// Shared state of one invocation.
class Session {
 public:
  Session(Config config, const Environment& env) : config_(std::move(config)), env_(env) {}

  const Config& config() const { return config_; }

  SemanticOracle& oracle() {
    if (oracle_) return *oracle_;
    if (config_.mode == OracleMode::fact_set) {
      oracle_ = std::make_unique<FactSetOracle>();
    } else {
      auto cache = config_.cache_path.empty() ? std::make_shared<OracleCache>()
                                              : std::make_shared<OracleCache>(config_.cache_path);
      std::shared_ptr<ChatTransport> transport;
      if (!config_.offline) transport = env_.transport_factory(config_.endpoint);
      oracle_ = std::make_unique<LlmOracle>(transport, cache,
                                            LlmOptions{config_.endpoint.model, config_.offline, env_.clock});
    }
    return *oracle_;
  }

  SourceDocument load(const std::string& path) {
    SourceDocument src = load_source_document(path);
    if (src.document.mode != config_.mode) {
      fail(ErrorCode::ModeMismatch, path + " is a " + std::string(to_string(src.document.mode)) +
                                        " document; run with --mode " + std::string(to_string(src.document.mode)));
    }
    return src;
  }

  ProcessedDocument process(const std::string& path) { return process_document(load(path), oracle(), config_.pipeline()); }

  Json envelope(const std::string& command) { return report::envelope(command, config_, grader()); }

  std::string grader() { return config_.mode == OracleMode::fact_set ? "factset-reference" : "llm:" + config_.endpoint.model; }

  void write(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(config_.out_dir);
    std::filesystem::path p = std::filesystem::path(config_.out_dir) / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::IoError, "cannot write '" + p.string() + "'");
    f << content;
    *env_.out << p.string() << '\n';
  }

  std::ostream& out() { return *env_.out; }

 private:
  Config config_;
  const Environment& env_;
  std::unique_ptr<SemanticOracle> oracle_;
};

inline Json dag_report(const ProcessedDocument& d) {
  Json j = dag_to_json(d.dag);
  j["spans_partition"] = d.dag.spans_partition();
  if (d.document.mode == OracleMode::fact_set) j["levels_complete"] = levels_complete(d.dag);
  Json levels = Json::array();
  for (const auto& lv : d.dag.levels()) levels.push_back(lv);
  j["levels"] = std::move(levels);
  return j;
}

/// Default budgets: tenths of the total node-text length, deduplicated.
inline std::vector<std::size_t> default_budgets(const ProcessedDocument& d) {
  std::size_t total = 0;
  for (const auto& n : d.dag.nodes()) total += text::word_count(n.assertion.text);
  total = std::max(total, d.document.word_count);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i <= 10; ++i) {
    std::size_t b = (total * i + 9) / 10;
    if (out.empty() || b > out.back()) out.push_back(b);
  }
  return out;
}

}  // namespace detail

/// Runs one command line (without the program name). Returns the exit status;
/// failures print a JSON error record on the error stream.
inline int run(const std::vector<std::string>& args, const Environment& env = {}) {
  CLI::App app{"qacat: documents as categories of question-answer pairs"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string mode;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string cache_path;
  bool offline = false;
  auto* o_config = app.add_option("--config", config_path, "JSON config file");
  auto* o_mode = app.add_option("--mode", mode, "oracle mode")->check(CLI::IsMember({"factset", "llm"}));
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_out = app.add_option("--out", out_dir, "output directory");
  auto* o_cache = app.add_option("--cache", cache_path, "oracle cache (JSONL)");
  auto* o_offline = app.add_flag("--offline", offline, "replay from the cache only");

  std::vector<std::string> docs;
  auto* c_ingest = app.add_subcommand("ingest", "parse and validate a document");
  c_ingest->add_option("document", docs)->required()->expected(1);
  auto* c_dag = app.add_subcommand("dag", "build the abstractive DAG");
  c_dag->add_option("document", docs)->required()->expected(1);
  auto* c_qas = app.add_subcommand("qas", "core QAs and the QA category");
  c_qas->add_option("document", docs)->required()->expected(1);
  auto* c_ortho = app.add_subcommand("ortho", "orthogonalize the QA population");
  c_ortho->add_option("document", docs)->required()->expected(1);

  std::string against;
  auto* c_measure = app.add_subcommand("measure", "information measures");
  c_measure->add_option("document", docs)->required()->expected(1);
  c_measure->add_option("--against", against, "second document for MI and IG");

  std::string keep;
  std::size_t budget = 0;
  std::string strategy = "lattice-greedy";
  bool allow_nonhierarchical = false;
  auto* c_summarize = app.add_subcommand("summarize", "summarize by selection or budget");
  c_summarize->add_option("document", docs)->required()->expected(1);
  auto* o_keep = c_summarize->add_option("--keep", keep, "comma-separated node ids to keep");
  auto* o_budget = c_summarize->add_option("--budget", budget, "word budget");
  c_summarize->add_option("--strategy", strategy, "summarizer used with --budget");
  c_summarize->add_flag("--allow-nonhierarchical", allow_nonhierarchical, "permit non-hierarchical selections");
  o_keep->excludes(o_budget);

  std::string spec_path;
  auto* c_extend = app.add_subcommand("extend", "apply an extension spec");
  c_extend->add_option("document", docs)->required()->expected(1);
  c_extend->add_option("--spec", spec_path, "extension spec (JSON)")->required();

  auto* c_compare = app.add_subcommand("compare", "distance, MI and IG between two documents");
  c_compare->add_option("documents", docs)->required()->expected(2);

  std::string strategies;
  std::string budgets;
  auto* c_rd = app.add_subcommand("rd", "rate-distortion sweep and operational curve");
  c_rd->add_option("document", docs)->required()->expected(1);
  c_rd->add_option("--strategies", strategies, "comma-separated summarizers");
  c_rd->add_option("--budgets", budgets, "comma-separated, strictly increasing word budgets");

  std::string kind = "all";
  std::size_t k = 10;
  bool negatives = false;
  auto* c_constraints = app.add_subcommand("constraints", "generate verifiable consistency tasks");
  c_constraints->add_option("document", docs)->required()->expected(1);
  c_constraints->add_option("--kind", kind, "task kind or 'all'");
  c_constraints->add_option("-k,--count", k, "tasks per kind");
  c_constraints->add_flag("--negatives", negatives, "also emit planted-negative tasks");

  std::string cache_action;
  auto* c_cache = app.add_subcommand("cache", "inspect or compact the oracle cache");
  c_cache->add_option("action", cache_action)->required()->check(CLI::IsMember({"inspect", "compact"}));

  auto error_record = [&](std::string_view code, const std::string& message, int status) {
    Json j;
    j["error"] = code;
    j["message"] = message;
    j["exit_code"] = status;
    *env.err << j.dump() << '\n';
    return status;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    *env.out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    *env.out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return error_record("ParseError", e.what(), 2);
  }

  try {
    Config config;
    if (o_config->count()) config = load_config(config_path);
    if (o_mode->count()) config.mode = parse_mode(mode);
    if (o_seed->count()) config.seed = seed;
    if (o_out->count()) config.out_dir = out_dir;
    if (o_cache->count()) config.cache_path = cache_path;
    if (o_offline->count()) config.offline = offline;
    validate(config);
    detail::Session s(config, env);
    SemanticOracle* oracle = nullptr;
    auto get_oracle = [&]() -> SemanticOracle& {
      if (!oracle) oracle = &s.oracle();
      return *oracle;
    };

    if (c_cache->parsed()) {
      if (config.cache_path.empty()) fail(ErrorCode::ConfigError, "no cache path given");
      OracleCache cache(config.cache_path);
      if (cache_action == "compact") cache.compact();
      CacheStats st = cache.stats();
      Json j;
      j["path"] = config.cache_path;
      j["records"] = st.records;
      j["unique"] = st.unique;
      j["per_task"] = st.per_task;
      j["per_model"] = st.per_model;
      s.out() << detail::pretty(j);
      return 0;
    }

    if (c_ingest->parsed()) {
      SourceDocument src = s.load(docs.at(0));
      Json j = s.envelope("ingest");
      j["document"] = report::document_json(src.document);
      if (src.annotated) {
        j["nodes"] = src.annotated->size();
        j["leaves"] = src.annotated->leaves().size();
        j["depth"] = src.annotated->levels().size();
      }
      s.write(src.document.id + ".ingest.json", detail::pretty(j));
      return 0;
    }

    ProcessedDocument d = s.process(docs.at(0));
    const std::string& id = d.document.id;

    if (c_dag->parsed()) {
      Json j = s.envelope("dag");
      j["document"] = report::document_json(d.document);
      j["dag"] = detail::dag_report(d);
      s.write(id + ".dag.json", detail::pretty(j));
      return 0;
    }

    if (c_qas->parsed()) {
      Json j = s.envelope("qas");
      j["document"] = report::document_json(d.document);
      j["category"] = report::qas_json(d);
      s.write(id + ".qas.json", detail::pretty(j));
      s.write(id + ".category.dot", d.category.dot());
      return 0;
    }

    if (c_ortho->parsed()) {
      Json j = s.envelope("ortho");
      j["document"] = report::document_json(d.document);
      j["ortho"] = report::ortho_json(d, verify_orthogonal(d.ortho, get_oracle()));
      s.write(id + ".ortho.json", detail::pretty(j));
      s.write(id + ".ortho.txt", per_node_ortho_text(d));
      if (!d.ortho.converged) {
        return error_record("NonConvergent", "orthogonalization left overlapping pairs", 4);
      }
      return 0;
    }

    if (c_measure->parsed()) {
      std::optional<ProcessedDocument> other;
      if (!against.empty()) other = s.process(against);
      MeasureReport m = measure(d, get_oracle(), other ? &*other : nullptr);
      Json j = s.envelope("measure");
      j["document"] = report::document_json(d.document);
      if (other) j["against"] = other->document.id;
      j["measures"] = to_json(m);
      j["heads"] = chain_report(d.category).heads.size();
      s.write(id + ".measure.json", detail::pretty(j));
      return 0;
    }

    if (c_summarize->parsed()) {
      Selection sel;
      if (o_budget->count()) {
        sel = select_for_budget(d, strategy, budget, config.seed);
      } else {
        for (const auto& n : detail::split_list(keep)) sel.insert(n);
      }
      // Only the greedy fill is hierarchical by construction.
      bool any_shape = allow_nonhierarchical || (o_budget->count() && strategy != "lattice-greedy");
      Summary sum = suppress(d, sel, any_shape, &get_oracle());
      Json j = s.envelope("summarize");
      j["document"] = report::document_json(d.document);
      j["summary"] = report::summary_json(d, sum);
      try {
        j["classification"] = to_string(classify_summary(d, sel));
        SummaryFactors f = factor_summary(d, sel);
        j["factors"] = {{"subdocument_step", f.subdocument_step}, {"quotient_step", f.quotient_step}};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InvalidSummary) throw;
        j["classification"] = "invalid";
        j["factors"] = nullptr;
      }
      RDPoint p = evaluate_summary(d, sum, get_oracle());
      j["rate_words"] = p.rate;
      j["distortion"] = p.distortion;
      s.write(id + ".summary.json", detail::pretty(j));
      s.write(id + ".summary.md", summary_markup(d, sel) + "\n");
      return 0;
    }

    if (c_extend->parsed()) {
      nlohmann::json spec_json;
      try {
        spec_json = nlohmann::json::parse(read_file(spec_path));
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, spec_path + ": " + e.what());
      }
      ExtensionSpec spec = parse_extension_spec(spec_json);
      Extension ext = extend(d, spec, get_oracle(), config.pipeline());
      ExtensionFactors f = factor_extension(spec);
      AbstractiveDag two_step = apply_extension(apply_extension(d.dag, f.superdocument_step), f.elaboration_step);
      Json additions = Json::array();
      for (const auto& a : spec.additions) additions.push_back({{"id", a.id}, {"kind", to_string(ext.kinds.at(a.id))}});
      Json step1 = Json::array();
      for (const auto& a : f.superdocument_step.additions) step1.push_back(a.id);
      Json step2 = Json::array();
      for (const auto& a : f.elaboration_step.additions) step2.push_back(a.id);
      Json new_atoms = Json::array();
      for (const auto& a : ext.processed.ortho.atoms) {
        if (ext.new_atoms.count(a.id)) new_atoms.push_back(report::qa_brief(a));
      }
      Json j = s.envelope("extend");
      j["document"] = report::document_json(d.document);
      j["additions"] = std::move(additions);
      j["ic_before"] = information_content(d);
      j["ic_after"] = information_content(ext.processed);
      j["new_atoms"] = std::move(new_atoms);
      j["factors"] = {{"superdocument_step", std::move(step1)}, {"elaboration_step", std::move(step2)},
                      {"recomposes", two_step == ext.dag}};
      j["dag"] = dag_to_json(ext.dag);
      s.write(id + ".extension.json", detail::pretty(j));
      s.write(id + ".extension.md", extension_markup(d.dag, ext.dag) + "\n");
      return 0;
    }

    if (c_compare->parsed()) {
      ProcessedDocument d2 = s.process(docs.at(1));
      SemanticOracle& o = get_oracle();
      MergedAtoms m = merge_atoms(d, d2, o);
      std::size_t ic1 = information_content(d);
      std::size_t ic2 = information_content(d2);
      Json j = s.envelope("compare");
      j["documents"] = {report::document_json(d.document), report::document_json(d2.document)};
      j["ic"] = {ic1, ic2};
      j["mi"] = m.shared;
      j["ig_2_given_1"] = ic2 - m.shared;
      j["ig_1_given_2"] = ic1 - m.shared;
      j["distance"] = m.total == 0 ? 0.0 : 1.0 - static_cast<double>(m.shared) / static_cast<double>(m.total);
      s.write(id + "__" + d2.document.id + ".compare.json", detail::pretty(j));
      return 0;
    }

    if (c_rd->parsed()) {
      std::vector<std::string> names = strategies.empty() ? strategy_names() : detail::split_list(strategies);
      std::vector<std::size_t> bs = budgets.empty() ? detail::default_budgets(d) : detail::parse_counts(budgets);
      std::vector<RDPoint> all;
      Json per_method = Json::object();
      for (const auto& name : names) {
        std::vector<RDPoint> pts = sweep(d, name, bs, get_oracle(), config.seed);
        Json curve = Json::array();
        for (const auto& st : operational_curve(pts)) curve.push_back({st.rate, st.distortion});
        per_method[name] = std::move(curve);
        all.insert(all.end(), pts.begin(), pts.end());
      }
      std::vector<CurveStep> curve = operational_curve(all);
      std::ostringstream points_csv;
      write_points_csv(points_csv, all);
      std::ostringstream curve_csv;
      write_curve_csv(curve_csv, curve);
      Json meta = s.envelope("rd");
      meta["document"] = report::document_json(d.document);
      meta["strategies"] = names;
      meta["budgets"] = bs;
      meta["rate_unit"] = "words";
      meta["distortion"] = "fraction of atoms not answered consistently";
      meta["per_method_curves"] = std::move(per_method);
      s.write(id + ".rd.csv", points_csv.str());
      s.write(id + ".rd.curve.csv", curve_csv.str());
      s.write(id + ".rd.meta.json", detail::pretty(meta));
      return 0;
    }

    if (c_constraints->parsed()) {
      std::vector<TaskKind> kinds;
      if (kind == "all") {
        kinds = {TaskKind::transitivity, TaskKind::lattice_closure, TaskKind::decomp_roundtrip, TaskKind::orthogonality};
      } else {
        kinds = {parse_task_kind(kind)};
      }
      std::string jsonl;
      Json skipped = Json::array();
      Json counts = Json::object();
      for (auto kd : kinds) {
        TaskOptions opt;
        opt.lattice_limit = config.lattice_limit;
        std::vector<ConstraintTask> tasks;
        try {
          tasks = gen_tasks(d, kd, k, config.seed, get_oracle(), opt);
          if (negatives) {
            opt.planted_negative = true;
            auto neg = gen_tasks(d, kd, k, config.seed, get_oracle(), opt);
            tasks.insert(tasks.end(), neg.begin(), neg.end());
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::InsufficientStructure || kind != "all") throw;
          skipped.push_back({{"kind", to_string(kd)}, {"reason", e.detail()}});
          continue;
        }
        counts[std::string(to_string(kd))] = tasks.size();
        for (const auto& t : tasks) jsonl += to_json(t).dump() + "\n";
      }
      Json meta = s.envelope("constraints");
      meta["document"] = report::document_json(d.document);
      meta["seed"] = config.seed;
      meta["per_kind"] = std::move(counts);
      meta["skipped"] = std::move(skipped);
      s.write(id + ".tasks.jsonl", jsonl);
      s.write(id + ".tasks.meta.json", detail::pretty(meta));
      return 0;
    }
    return error_record("ParseError", "no subcommand", 2);
  } catch (const Error& e) {
    return error_record(to_string(e.code()), e.detail(), exit_code_for(e.code()));
  } catch (const std::filesystem::filesystem_error& e) {
    return error_record("IoError", e.what(), 1);
  } catch (const std::exception& e) {
    return error_record("InternalError", e.what(), 1);
  }
}

}  // namespace qacat::cli

#endif  // QACAT_CLI_HPP
