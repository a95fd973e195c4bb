#include "t2s/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "t2s/error.hpp"
#include "t2s/io.hpp"
#include "t2s/normalizer.hpp"
#include "t2s/skeleton.hpp"
#include "t2s/sql_dialect.hpp"
#include "t2s/text.hpp"

namespace t2s::cli {

using nlohmann::json;

void PipelineConfig::validate() const {
  auto need = [](const std::string& path, const char* what) {
    if (path.empty()) throw FormatError(std::string(what) + " is required");
    if (!std::filesystem::exists(path)) throw FormatError(std::string(what) + " not found: " + path);
  };
  need(schema_path, "schema file");
  need(dataset_path, "dataset file");
  if (scores_path) need(*scores_path, "scores file");
  if (db_dir && !std::filesystem::is_directory(*db_dir))
    throw FormatError("database directory not found: " + *db_dir);
  if (rank.k1 < 1 || rank.k2 < 1) throw RangeError("k1 and k2 must be at least 1");
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const FormatError*>(&e)) return "format_error";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation_error";
  if (dynamic_cast<const LexError*>(&e)) return "lex_error";
  if (dynamic_cast<const UnsupportedSyntax*>(&e)) return "unsupported_syntax";
  if (dynamic_cast<const NormalizationError*>(&e)) return "normalization_error";
  if (dynamic_cast<const LinkageError*>(&e)) return "linkage_error";
  if (dynamic_cast<const ShapeError*>(&e)) return "shape_error";
  if (dynamic_cast<const RangeError*>(&e)) return "range_error";
  if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
  if (dynamic_cast<const CorpusError*>(&e)) return "corpus_error";
  if (dynamic_cast<const QueryTimeout*>(&e)) return "timeout";
  if (dynamic_cast<const DatabaseError*>(&e)) return "database_error";
  return "error";
}

void write_error(std::ostream& err, const std::exception& e, const std::string& question_id,
                 std::size_t line) {
  json rec{{"error", error_kind(e)}, {"message", e.what()}};
  if (!question_id.empty()) rec["question_id"] = question_id;
  if (line) rec["line"] = line;
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) rec["violations"] = v->violations();
  err << rec.dump() << '\n';
}

SchemaSource::SchemaSource(SchemaMap schemas, std::optional<std::string> db_dir, bool with_content)
    : schemas_(std::move(schemas)), db_dir_(std::move(db_dir)), with_content_(with_content) {}

const DatabaseSchema& SchemaSource::get(const std::string& db_id) {
  auto it = schemas_.find(db_id);
  if (it == schemas_.end()) throw LinkageError("unknown db_id '" + db_id + "'");
  if (with_content_ && db_dir_ && !populated_[db_id]) {
    populated_[db_id] = true;
    const std::string path = database_path(*db_dir_, db_id);
    if (!std::filesystem::exists(path)) throw CorpusError("missing database: " + path);
    it->second = populate_sample_values(it->second, Database::open_read_only(path));
  }
  return it->second;
}

namespace {

using RecordFn = std::function<json(const json& record, std::string& question_id)>;

// Applies `fn` to every non-blank line; failures go to `err` and the batch
// continues.
BatchStatus each_record(std::istream& in, std::ostream& out, std::ostream& err, const RecordFn& fn) {
  BatchStatus status;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++status.records;
    std::string qid;
    try {
      json record;
      try {
        record = json::parse(line);
      } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
      }
      if (record.is_object() && record.contains("question_id")) qid = string_field(record, "question_id");
      out << fn(record, qid).dump() << '\n';
    } catch (const std::exception& e) {
      ++status.failed;
      write_error(err, e, qid, line_no);
    }
  }
  return status;
}

// Reads a scores document per dataset record, in the same order.
class ScoreStream {
 public:
  explicit ScoreStream(std::istream* in) : in_(in) {}

  std::optional<SchemaScores> next(const std::string& question_id, const DatabaseSchema& schema) {
    if (!in_) return std::nullopt;
    std::string line;
    while (std::getline(*in_, line))
      if (!trim(line).empty()) {
        json doc;
        try {
          doc = json::parse(line);
        } catch (const json::parse_error& e) {
          throw FormatError(std::string("scores: invalid JSON: ") + e.what());
        }
        const std::string qid = string_field(doc, "question_id");
        if (qid != question_id)
          throw FormatError("scores out of step: expected '" + question_id + "', found '" + qid + "'");
        return ingest_scores(doc, schema);
      }
    throw FormatError("scores file ended before '" + question_id + "'");
  }

 private:
  std::istream* in_;
};

}  // namespace

BatchStatus cmd_normalize(std::istream& in, std::ostream& out, std::ostream& err) {
  return each_record(in, out, err, [](const json& r, std::string& qid) {
    return json{{"question_id", qid}, {"normalized", normalize_sql(string_field(r, "query")).text}};
  });
}

BatchStatus cmd_skeleton(std::istream& in, std::ostream& out, std::ostream& err) {
  return each_record(in, out, err, [](const json& r, std::string& qid) {
    const NormalizedSql n = normalize_sql(string_field(r, "query"));
    return json{{"question_id", qid}, {"skeleton", extract_skeleton(n).text}, {"target", build_target(n)}};
  });
}

BatchStatus cmd_label(SchemaSource& schemas, std::istream& in, std::ostream& out, std::ostream& err) {
  return each_record(in, out, err, [&](const json& r, std::string& qid) {
    const auto inst = dataset_instance_from_json(r);
    json j = to_json(derive_labels(normalize_sql(inst.query).text, schemas.get(inst.db_id)));
    j["question_id"] = qid;
    return j;
  });
}

BatchStatus cmd_score(SchemaSource& schemas, std::istream& in, std::ostream& out, std::ostream& err) {
  return each_record(in, out, err, [&](const json& r, std::string& qid) {
    const auto inst = dataset_instance_from_json(r);
    json j = to_json(lexical_scores(inst.question, schemas.get(inst.db_id)));
    j["question_id"] = qid;
    return j;
  });
}

BatchStatus cmd_rank(SchemaSource& schemas, std::istream& in, std::istream* scores,
                     const RankConfig& config, std::ostream& out, std::ostream& err) {
  ScoreStream stream(scores);
  return each_record(in, out, err, [&](const json& r, std::string& qid) {
    const auto inst = dataset_instance_from_json(r);
    const DatabaseSchema& schema = schemas.get(inst.db_id);
    auto external = stream.next(qid, schema);
    const SchemaScores s = external ? *external : lexical_scores(inst.question, schema);
    json j = to_json(rank_and_filter(s, schema, config), schema);
    j["question_id"] = qid;
    return j;
  });
}

BatchStatus cmd_prepare(SchemaSource& schemas, std::istream& in, std::istream* scores,
                        const RankConfig& config, std::ostream& out, std::ostream& err) {
  ScoreStream stream(scores);
  return each_record(in, out, err, [&](const json& r, std::string& qid) {
    const auto inst = dataset_instance_from_json(r);
    const DatabaseSchema& schema = schemas.get(inst.db_id);
    auto external = stream.next(qid, schema);
    const SchemaScores s = external ? *external : lexical_scores(inst.question, schema);
    const RankedSchema ranked = rank_and_filter(s, schema, config);
    json j{{"question_id", qid}, {"input_sequence", build_ranked_input(inst.question, ranked, schema, config)}};
    if (!inst.query.empty()) j["target"] = build_target(normalize_sql(inst.query));
    return j;
  });
}

BatchStatus cmd_select(std::istream& beams, const std::map<std::string, std::string>& routes,
                       const std::string& db_dir, std::chrono::milliseconds timeout,
                       std::ostream& out, std::ostream& err) {
  std::map<std::string, Database> connections;
  return each_record(beams, out, err, [&](const json& r, std::string& qid) {
    const Beam beam = beam_from_json(r);
    std::string db_id = beam.db_id;
    if (db_id.empty()) {
      auto it = routes.find(qid);
      if (it == routes.end()) throw CorpusError("no db_id for beam '" + qid + "'");
      db_id = it->second;
    }
    auto it = connections.find(db_id);
    if (it == connections.end()) {
      const std::string path = database_path(db_dir, db_id);
      if (!std::filesystem::exists(path)) throw CorpusError("missing database: " + path);
      it = connections.emplace(db_id, Database::open_read_only(path)).first;
    }
    const Selection s = select_executable(beam, it->second, timeout);
    return json{{"question_id", qid}, {"sql", s.sql}, {"beam_index", s.index}, {"fallback", s.fallback}};
  });
}

namespace {

struct Sink {
  std::unique_ptr<std::ofstream> file;
  std::ostream* stream;

  explicit Sink(const std::string& path, std::ostream& fallback) : stream(&fallback) {
    if (!path.empty()) {
      file = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file) throw FormatError("cannot write '" + path + "'");
      stream = file.get();
    }
  }
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return in;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"text-to-SQL preprocessing, linking and evaluation"};
  app.require_subcommand(1);

  PipelineConfig cfg;
  std::string scores_path, db_dir, pred_path, beams_path;
  std::int64_t timeout_ms = kDefaultTimeout.count();
  unsigned threads = 0;
  std::size_t k1 = 4, k2 = 5;
  unsigned seed = 7;
  std::size_t trials = 200;

  auto add_dataset = [&](CLI::App* c) { c->add_option("--dataset", cfg.dataset_path, "dataset JSONL")->required(); };
  auto add_common = [&](CLI::App* c) {
    c->add_option("-o,--out", cfg.out_path, "output file (default stdout)");
    c->add_flag("--strict", cfg.strict, "exit nonzero when any record fails");
  };
  auto add_rank = [&](CLI::App* c) {
    c->add_option("--schema", cfg.schema_path, "tables.json")->required();
    add_dataset(c);
    c->add_option("--scores", scores_path, "scores JSONL aligned with the dataset");
    c->add_option("--db-dir", db_dir, "database directory");
    c->add_option("--k1", k1, "tables kept")->capture_default_str();
    c->add_option("--k2", k2, "columns kept per table")->capture_default_str();
    c->add_flag("--fks", cfg.rank.include_foreign_keys, "append foreign keys");
    c->add_flag("--content", cfg.rank.include_content, "append matched cell values");
  };

  auto* normalize = app.add_subcommand("normalize", "canonicalize queries");
  auto* skeleton = app.add_subcommand("skeleton", "extract skeletons and decoding targets");
  for (auto* c : {normalize, skeleton}) {
    add_dataset(c);
    add_common(c);
  }
  auto* label = app.add_subcommand("label", "derive schema-item labels from gold queries");
  auto* score = app.add_subcommand("score", "lexical schema-item scores");
  for (auto* c : {label, score}) {
    c->add_option("--schema", cfg.schema_path, "tables.json")->required();
    add_dataset(c);
    c->add_option("--db-dir", db_dir, "database directory");
    c->add_flag("--content", cfg.rank.include_content, "use database cells");
    add_common(c);
  }
  auto* rank = app.add_subcommand("rank", "rank and filter schema items");
  auto* prepare = app.add_subcommand("prepare", "build input/target pairs");
  for (auto* c : {rank, prepare}) {
    add_rank(c);
    add_common(c);
  }
  auto* select = app.add_subcommand("select", "pick the first executable beam candidate");
  select->add_option("--beams", beams_path, "beams JSONL")->required();
  select->add_option("--db-dir", db_dir, "database directory")->required();
  select->add_option("--dataset", cfg.dataset_path, "dataset JSONL used to route beams to databases");
  select->add_option("--timeout-ms", timeout_ms, "per-query timeout")->capture_default_str();
  add_common(select);
  auto* eval = app.add_subcommand("eval", "exact-set-match and execution accuracy");
  add_dataset(eval);
  eval->add_option("--pred", pred_path, "predictions JSONL");
  eval->add_option("--beams", beams_path, "beams JSONL");
  eval->add_option("--db-dir", db_dir, "database directory")->required();
  eval->add_option("--timeout-ms", timeout_ms, "per-query timeout")->capture_default_str();
  eval->add_option("--threads", threads, "workers (0 = all cores)");
  eval->add_option("-o,--out", cfg.out_path, "report file (default stdout)");
  auto* kernels = app.add_subcommand("kernels", "numeric kernel utilities");
  kernels->require_subcommand(1);
  auto* selfcheck = kernels->add_subcommand("selfcheck", "run the kernel property checks");
  selfcheck->add_option("--seed", seed)->capture_default_str();
  selfcheck->add_option("--trials", trials)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << json{{"error", "usage_error"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  try {
    cfg.rank.k1 = k1;
    cfg.rank.k2 = k2;
    cfg.timeout = std::chrono::milliseconds(timeout_ms);
    if (timeout_ms <= 0) throw RangeError("--timeout-ms must be positive");
    if (!scores_path.empty()) cfg.scores_path = scores_path;
    if (!db_dir.empty()) cfg.db_dir = db_dir;

    if (selfcheck->parsed()) return kernels_selfcheck(out, seed, trials) ? 0 : 1;

    BatchStatus status;
    if (normalize->parsed() || skeleton->parsed()) {
      auto in = open_in(cfg.dataset_path);
      Sink sink(cfg.out_path, out);
      status = normalize->parsed() ? cmd_normalize(in, *sink.stream, err) : cmd_skeleton(in, *sink.stream, err);
    } else if (label->parsed() || score->parsed() || rank->parsed() || prepare->parsed()) {
      cfg.validate();
      SchemaSource schemas(load_schemas_from_file(cfg.schema_path), cfg.db_dir, cfg.rank.include_content);
      auto in = open_in(cfg.dataset_path);
      std::ifstream scores;
      if (cfg.scores_path) scores = open_in(*cfg.scores_path);
      std::istream* scores_in = cfg.scores_path ? &scores : nullptr;
      Sink sink(cfg.out_path, out);
      if (label->parsed()) status = cmd_label(schemas, in, *sink.stream, err);
      else if (score->parsed()) status = cmd_score(schemas, in, *sink.stream, err);
      else if (rank->parsed()) status = cmd_rank(schemas, in, scores_in, cfg.rank, *sink.stream, err);
      else status = cmd_prepare(schemas, in, scores_in, cfg.rank, *sink.stream, err);
    } else if (select->parsed()) {
      std::map<std::string, std::string> routes;
      if (!cfg.dataset_path.empty())
        for (const auto& inst : read_dataset(cfg.dataset_path)) routes[inst.question_id] = inst.db_id;
      auto in = open_in(beams_path);
      Sink sink(cfg.out_path, out);
      status = cmd_select(in, routes, db_dir, cfg.timeout, *sink.stream, err);
    } else if (eval->parsed()) {
      if (pred_path.empty() == beams_path.empty()) throw FormatError("eval needs exactly one of --pred, --beams");
      const auto dataset = read_dataset(cfg.dataset_path);
      EvalOptions options{cfg.timeout, threads};
      const EvalReport report = pred_path.empty()
                                    ? evaluate_corpus(dataset, read_beams(beams_path), db_dir, options)
                                    : evaluate_corpus(dataset, read_predictions(pred_path), db_dir, options);
      Sink sink(cfg.out_path, out);
      *sink.stream << to_json(report).dump(2) << '\n';
      return 0;
    }
    return cfg.strict && status.failed > 0 ? 1 : 0;
  } catch (const std::exception& e) {
    write_error(err, e);
    return 2;
  }
}

}  // namespace t2s::cli
