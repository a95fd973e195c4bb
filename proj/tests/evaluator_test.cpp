#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "t2s/error.hpp"
#include "t2s/evaluator.hpp"
#include "t2s/sql_dialect.hpp"

namespace t2s {
namespace {

constexpr const char* kLatestOrder =
    "select candidate_id from candidate_assessments order by assessment_date desc limit 1";
constexpr const char* kLatestMax =
    "select candidate_id from candidate_assessments where assessment_date = "
    "(select max(assessment_date) from candidate_assessments)";

Database open(const std::string& db_id) {
  return Database::open_read_only(database_path(testing::fixture_db_dir(), db_id));
}

// Rewrites the i-th literal of `sql` to a different literal of the same kind.
std::optional<std::string> mutate_literal(const std::string& sql, std::size_t index) {
  auto tokens = sql::tokenize(sql);
  std::size_t seen = 0;
  bool changed = false;
  std::string out;
  for (auto& t : tokens) {
    if (t.is_literal() && seen++ == index) {
      t.text = t.kind == sql::TokenKind::string_literal ? "'mutated value'" : "424242";
      changed = true;
    }
    out += (out.empty() ? "" : " ") + t.text;
  }
  if (!changed) return std::nullopt;
  return out;
}

TEST(ExactSetMatch, Basics) {
  EXPECT_TRUE(exact_set_match("select a , b from t", "select a , b from t"));
  EXPECT_TRUE(exact_set_match("select a , b from t", "select b , a from t"));
  EXPECT_TRUE(exact_set_match("SELECT T1.a FROM t AS T1", "select a from t"));
  EXPECT_TRUE(exact_set_match("select a from t where x = 1 and y = 2", "select a from t where y = 5 and x = 9"));
  EXPECT_TRUE(exact_set_match("select a from x join y on x.i = y.i", "select a from y join x on y.i = x.i"));
  EXPECT_TRUE(exact_set_match("select a from t limit 1", "select a from t limit 7"));
  EXPECT_FALSE(exact_set_match("select a from t limit 1", "select a from t"));
  EXPECT_FALSE(exact_set_match("select a from t order by a , b", "select a from t order by b , a"));
  EXPECT_FALSE(exact_set_match("select a from t order by a desc", "select a from t order by a"));
  EXPECT_FALSE(exact_set_match("select distinct a from t", "select a from t"));
  EXPECT_FALSE(exact_set_match("select max(a) from t", "select min(a) from t"));
  EXPECT_FALSE(exact_set_match("select a from t where x = 1 or y = 2", "select a from t where x = 1 and y = 2"));
  EXPECT_FALSE(exact_set_match("select a from t union select a from u", "select a from t intersect select a from u"));
}

TEST(ExactSetMatch, PredictionFailureIsFalse) {
  EXPECT_FALSE(exact_set_match("selec a from", "select a from t"));
  EXPECT_FALSE(exact_set_match("select 'open", "select a from t"));
}

TEST(ExactSetMatch, GoldFailureIsCorpusError) {
  EXPECT_THROW(exact_set_match("select a from t", "select from"), CorpusError);
}

TEST(ExactSetMatch, LatestCandidatePairDiffers) { EXPECT_FALSE(exact_set_match(kLatestOrder, kLatestMax)); }

TEST(ExactSetMatch, ReflexiveSymmetricAndValueBlindOnCorpus) {
  const auto& c = testing::corpus();
  for (const auto& inst : c) {
    EXPECT_TRUE(exact_set_match(inst.query, inst.query)) << inst.question_id;
    for (std::size_t i = 0;; ++i) {
      auto m = mutate_literal(inst.query, i);
      if (!m) break;
      EXPECT_TRUE(exact_set_match(*m, inst.query)) << *m;
    }
  }
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    EXPECT_EQ(exact_set_match(c[i].query, c[i + 1].query), exact_set_match(c[i + 1].query, c[i].query));
}

TEST(ExecutionAccuracy, LatestCandidatePairAgrees) {
  const Database db = open("student_assessment");
  EXPECT_TRUE(execution_accuracy(kLatestOrder, kLatestMax, db));
  EXPECT_TRUE(execution_accuracy(kLatestMax, kLatestMax, db));
  EXPECT_FALSE(execution_accuracy("select candidate_id from", kLatestMax, db));
  EXPECT_THROW(execution_accuracy(kLatestMax, "select nope from nowhere", db), CorpusError);
}

TEST(ExecutionAccuracy, RowOrderMattersOnlyWhenBothOrder) {
  const Database db = open("pets");
  EXPECT_TRUE(execution_accuracy("select petid from pets order by petid desc", "select petid from pets", db));
  EXPECT_FALSE(execution_accuracy("select petid from pets order by petid desc",
                                  "select petid from pets order by petid asc", db));
  EXPECT_FALSE(execution_accuracy("select petid from pets where petid > 2001", "select petid from pets", db));
  EXPECT_FALSE(execution_accuracy("select petid , pettype from pets", "select petid from pets", db));
}

TEST(ExecutionAccuracy, MultisetNotSet) {
  const Database db = open("pets");
  EXPECT_FALSE(execution_accuracy("select pettype from pets", "select distinct pettype from pets", db));
}

TEST(ExecutionAccuracy, ByteIdenticalOnCorpus) {
  for (const auto& inst : testing::corpus())
    EXPECT_TRUE(execution_accuracy(inst.query, inst.query, open(inst.db_id))) << inst.question_id;
}

TEST(Database, TimeoutIsNotExecutable) {
  const Database db = open("pets");
  const std::string forever =
      "with recursive c(x) as (select 1 union all select x + 1 from c) select count(*) from c";
  EXPECT_THROW(db.query(forever, std::chrono::milliseconds(50)), QueryTimeout);
  EXPECT_FALSE(is_executable(forever, db, std::chrono::milliseconds(50)));
}

TEST(Database, ReadOnly) {
  const Database db = open("pets");
  EXPECT_THROW(db.query("delete from pets", kDefaultTimeout), DatabaseError);
  EXPECT_EQ(db.query("select count(*) from pets", kDefaultTimeout).rows[0][0], Value(std::int64_t{3}));
}

TEST(Database, SingleStatementOnly) {
  const Database db = open("pets");
  EXPECT_THROW(db.query("select 1; select 2", kDefaultTimeout), DatabaseError);
  EXPECT_NO_THROW(db.query("select 1;", kDefaultTimeout));
}

TEST(SelectExecutable, Rules) {
  const Database db = open("pets");
  auto beam = [](std::vector<std::string> sqls) {
    std::vector<BeamCandidate> c;
    double score = 0;
    for (auto& s : sqls) c.push_back({std::move(s), score--});
    return make_beam("q", std::move(c));
  };
  auto s = select_executable(beam({"selec petid", "select petid from pets"}), db);
  EXPECT_EQ(s.index, 1u);
  EXPECT_FALSE(s.fallback);
  s = select_executable(beam({"bad one", "bad two"}), db);
  EXPECT_EQ(s.index, 0u);
  EXPECT_TRUE(s.fallback);
  EXPECT_EQ(s.sql, "bad one");
  s = select_executable(beam({"select petid from pets where petid = -1", "select 1"}), db);
  EXPECT_EQ(s.index, 0u);  // empty result still executes
}

TEST(Beam, SortedOnIngestAndNonEmpty) {
  const Beam b = make_beam("q", {{"a", 0.1}, {"b", 0.9}, {"c", 0.1}});
  EXPECT_EQ(b.candidates[0].sql, "b");
  EXPECT_EQ(b.candidates[1].sql, "a");
  EXPECT_EQ(b.candidates[2].sql, "c");
  EXPECT_THROW(make_beam("q", {}), FormatError);
}

TEST(EvaluateCorpus, IdenticalPredictions) {
  std::vector<DatasetInstance> ds(testing::corpus().begin(), testing::corpus().begin() + 3);
  Predictions preds;
  for (const auto& d : ds) preds[d.question_id] = d.query;
  const EvalReport r = evaluate_corpus(ds, preds, testing::fixture_db_dir());
  EXPECT_EQ(r.n(), 3u);
  EXPECT_DOUBLE_EQ(r.em_pct, 100.0);
  EXPECT_DOUBLE_EQ(r.ex_pct, 100.0);
}

TEST(EvaluateCorpus, LatestCandidatePair) {
  const std::vector<DatasetInstance> ds = {{"a", "student_assessment", "q", kLatestMax},
                                           {"b", "student_assessment", "q", kLatestOrder}};
  const Predictions preds = {{"a", kLatestOrder}, {"b", kLatestOrder}};
  const EvalReport r = evaluate_corpus(ds, preds, testing::fixture_db_dir());
  EXPECT_DOUBLE_EQ(r.em_pct, 50.0);
  EXPECT_DOUBLE_EQ(r.ex_pct, 100.0);
  EXPECT_FALSE(r.instances[0].em);
  EXPECT_TRUE(r.instances[1].em);
}

TEST(EvaluateCorpus, MissingPredictionsAndDatabases) {
  std::vector<DatasetInstance> ds(testing::corpus().begin(), testing::corpus().begin() + 2);
  const EvalReport r = evaluate_corpus(ds, Predictions{}, testing::fixture_db_dir());
  for (const auto& rec : r.instances) {
    EXPECT_FALSE(rec.em);
    EXPECT_FALSE(rec.ex);
    EXPECT_EQ(rec.error, "missing prediction");
  }
  ds[0].db_id = "nowhere";
  EXPECT_THROW(evaluate_corpus(ds, Predictions{}, testing::fixture_db_dir()), CorpusError);
}

TEST(EvaluateCorpus, DeterministicAcrossThreadCounts) {
  const auto& ds = testing::corpus();
  Predictions preds;
  for (std::size_t i = 0; i < ds.size(); ++i) preds[ds[i].question_id] = ds[(i * 7) % ds.size()].query;
  const EvalReport one = evaluate_corpus(ds, preds, testing::fixture_db_dir(), {kDefaultTimeout, 1});
  const EvalReport many = evaluate_corpus(ds, preds, testing::fixture_db_dir(), {kDefaultTimeout, 8});
  ASSERT_EQ(one.n(), many.n());
  for (std::size_t i = 0; i < one.n(); ++i) {
    EXPECT_EQ(one.instances[i].question_id, ds[i].question_id);
    EXPECT_EQ(one.instances[i].em, many.instances[i].em);
    EXPECT_EQ(one.instances[i].ex, many.instances[i].ex);
  }
  std::size_t em = 0, ex = 0;
  for (const auto& rec : one.instances) {
    em += rec.em;
    ex += rec.ex;
  }
  EXPECT_DOUBLE_EQ(one.em_pct, 100.0 * em / one.n());
  EXPECT_DOUBLE_EQ(one.ex_pct, 100.0 * ex / one.n());
}

TEST(EvaluateCorpus, BeamsGoThroughSelector) {
  const std::vector<DatasetInstance> ds = {{"a", "pets", "q", "select petid from pets"}};
  Beams beams;
  beams.emplace("a", make_beam("a", {{"select nothing from", 0.9}, {"select petid from pets", 0.5}}));
  const EvalReport r = evaluate_corpus(ds, beams, testing::fixture_db_dir());
  EXPECT_EQ(r.instances[0].beam_index, 1u);
  EXPECT_TRUE(r.instances[0].em);
  EXPECT_TRUE(r.instances[0].ex);
}

TEST(SampleValues, ReadFromDatabase) {
  const DatabaseSchema s = populate_sample_values(testing::fixture_schemas().at("pets"), open("pets"));
  EXPECT_EQ(s.tables[2].columns[1].sample_values, (std::vector<std::string>{"cat", "dog"}));
}

}  // namespace
}  // namespace t2s
