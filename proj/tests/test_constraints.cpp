#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace qacat;
using namespace qacat::testing;

namespace {

constexpr TaskKind kKinds[] = {TaskKind::transitivity, TaskKind::lattice_closure, TaskKind::decomp_roundtrip,
                               TaskKind::orthogonality};

// `have` settles every question of `want` with values it allows.
bool settles(const FactSet& have, const FactSet& want) {
  for (const auto& w : want) {
    auto it = std::find_if(have.begin(), have.end(), [&](const Fact& h) { return h.key == w.key; });
    if (it == have.end()) return false;
    for (const auto& v : it->values) {
      if (std::find(w.values.begin(), w.values.end(), v) == w.values.end()) return false;
    }
  }
  return true;
}

FactSet facts_at(const nlohmann::json& in, const char* key) { return qa_from_json(in[key]).core.fact_set(); }

bool closed(const Selection& s, const nlohmann::json& parents) {
  for (const auto& n : s) {
    for (const auto& p : parents[n]) {
      if (!s.count(p.get<std::string>())) return false;
    }
  }
  return true;
}

// Verdict recomputed from the task inputs with plain set logic.
bool independent_verdict(const ConstraintTask& t) {
  const auto& in = t.inputs;
  switch (t.kind) {
    case TaskKind::transitivity: {
      FactSet a = facts_at(in, "a"), b = facts_at(in, "b"), c = facts_at(in, "c");
      return settles(b, a) && settles(c, b) && settles(c, a);
    }
    case TaskKind::lattice_closure: {
      Selection s1 = in["s1"].get<Selection>(), s2 = in["s2"].get<Selection>();
      Selection u = s1, i;
      u.insert(s2.begin(), s2.end());
      for (const auto& n : s1) {
        if (s2.count(n)) i.insert(n);
      }
      return in["join"].get<Selection>() == u && in["meet"].get<Selection>() == i && closed(u, in["parents"]) &&
             closed(i, in["parents"]);
    }
    case TaskKind::decomp_roundtrip: {
      std::set<Fact> whole, got;
      for (const char* k : {"qa1", "qa2"}) {
        for (const auto& f : facts_at(in, k)) whole.insert(f);
      }
      for (const auto& p : in["pieces"]) {
        QAPair piece = qa_from_json(p);
        for (const auto& f : piece.core.fact_set()) got.insert(f);
      }
      return whole == got;
    }
    case TaskKind::orthogonality: {
      FactSet x = facts_at(in, "x"), y = facts_at(in, "y");
      for (const auto& f : x) {
        for (const auto& g : y) {
          if (f.key == g.key) return false;
        }
      }
      return true;
    }
  }
  return false;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Tasks, PositivesHoldOnEdu) {
  FactSetOracle o;
  ProcessedDocument pd = load_processed("edu.json");
  for (TaskKind kind : kKinds) {
    auto tasks = gen_tasks(pd, kind, 25, 100, o);
    ASSERT_EQ(tasks.size(), 25u);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const auto& t = tasks[i];
      EXPECT_EQ(t.kind, kind);
      EXPECT_EQ(t.seed, 100 + i);
      EXPECT_EQ(t.doc_id, pd.document.id);
      EXPECT_TRUE(t.expected);
      EXPECT_TRUE(t.verdict) << to_string(kind) << " #" << i;
      EXPECT_TRUE(independent_verdict(t)) << to_string(kind) << " #" << i;
      EXPECT_TRUE(verify_task(t, o));
    }
  }
}

TEST(Tasks, PlantedNegativesFail) {
  FactSetOracle o;
  ProcessedDocument pd = load_processed("edu.json");
  TaskOptions opts;
  opts.planted_negative = true;
  for (TaskKind kind : kKinds) {
    for (const auto& t : gen_tasks(pd, kind, 25, 7, o, opts)) {
      EXPECT_FALSE(t.expected);
      EXPECT_FALSE(t.verdict) << to_string(kind) << " seed " << t.seed;
      EXPECT_FALSE(independent_verdict(t)) << to_string(kind) << " seed " << t.seed;
    }
  }
}

TEST(Tasks, AbcHasNoComposableChain) {
  FactSetOracle o;
  ProcessedDocument pd = load_processed("abc.json");
  EXPECT_EQ(code_of([&] { gen_tasks(pd, TaskKind::transitivity, 1, 0, o); }), ErrorCode::InsufficientStructure);
  for (TaskKind kind : {TaskKind::lattice_closure, TaskKind::decomp_roundtrip, TaskKind::orthogonality}) {
    for (const auto& t : gen_tasks(pd, kind, 10, 0, o)) EXPECT_TRUE(t.verdict && independent_verdict(t));
  }
}

TEST(Tasks, SingleNodeIsInsufficient) {
  FactSetOracle o;
  ProcessedDocument pd = process(make_source("one", {{"r", "Only.", {F("k", "v")}, {}}}));
  EXPECT_EQ(code_of([&] { gen_tasks(pd, TaskKind::orthogonality, 1, 0, o); }), ErrorCode::InsufficientStructure);
  EXPECT_EQ(code_of([&] { gen_tasks(pd, TaskKind::decomp_roundtrip, 1, 0, o); }), ErrorCode::InsufficientStructure);
}

TEST(Tasks, SeededAndIndividuallyReproducible) {
  FactSetOracle o;
  ProcessedDocument pd = load_processed("edu.json");
  for (TaskKind kind : kKinds) {
    auto a = gen_tasks(pd, kind, 8, 42, o);
    auto b = gen_tasks(pd, kind, 8, 42, o);
    auto tail = gen_tasks(pd, kind, 3, 47, o);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_json(a[i]).dump(), to_json(b[i]).dump());
    for (std::size_t i = 0; i < tail.size(); ++i) EXPECT_EQ(to_json(tail[i]).dump(), to_json(a[5 + i]).dump());
  }
}

TEST(Tasks, JsonRoundTrip) {
  FactSetOracle o;
  ProcessedDocument pd = load_processed("edu.json");
  for (TaskKind kind : kKinds) {
    for (const auto& t : gen_tasks(pd, kind, 4, 3, o)) {
      std::string text = to_json(t).dump();
      ConstraintTask back = task_from_json(nlohmann::ordered_json::parse(text));
      EXPECT_EQ(to_json(back).dump(), text);
      EXPECT_EQ(verify_task(back, o), t.verdict);
    }
  }
}

TEST(Tasks, Malformed) {
  FactSetOracle o;
  ConstraintTask t;
  t.kind = TaskKind::orthogonality;
  t.inputs = nlohmann::ordered_json::object();
  EXPECT_EQ(code_of([&] { verify_task(t, o); }), ErrorCode::MalformedTask);
  t.inputs["x"] = qa_to_json(Q({F("a", "1")}));
  EXPECT_EQ(code_of([&] { verify_task(t, o); }), ErrorCode::MalformedTask);
  t.kind = TaskKind::lattice_closure;
  t.inputs = {{"parents", nlohmann::json::array()}};
  EXPECT_EQ(code_of([&] { verify_task(t, o); }), ErrorCode::MalformedTask);
  nlohmann::ordered_json j = to_json(t);
  j.erase("seed");
  EXPECT_EQ(code_of([&] { task_from_json(j); }), ErrorCode::MalformedTask);
}

TEST(Tasks, KindNames) {
  for (TaskKind kind : kKinds) EXPECT_EQ(parse_task_kind(to_string(kind)), kind);
  EXPECT_EQ(to_string(TaskKind::decomp_roundtrip), "decomp-roundtrip");
}
