#include <algorithm>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace qacat;
using namespace qacat::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidArgument;
}

// n in sel implies every node listing n as a child is in sel.
bool ancestor_closed(const Selection& sel, const AbstractiveDag& dag) {
  for (const auto& n : dag.nodes()) {
    for (const auto& c : n.children) {
      if (sel.count(c) && !sel.count(n.id)) return false;
    }
  }
  return true;
}

std::vector<Selection> powerset(const AbstractiveDag& dag) {
  std::set<NodeId> all = dag.node_ids();
  std::vector<NodeId> ids(all.begin(), all.end());
  std::vector<Selection> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << ids.size()); ++mask) {
    Selection s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (mask & (std::size_t{1} << i)) s.insert(ids[i]);
    }
    out.push_back(s);
  }
  return out;
}

// Three chains: T stands alone; P and Q each have a multi-fact detail leaf
// and a single-fact leaf.
SourceDocument three_chains() {
  return make_source("chains", {{"T", "Two projects ran this year.", {F("how-many-projects-ran", "two")}, {"P", "Q"}},
                                 {"P", "Project P shipped early and under budget with praise.",
                                  {F("p-timing", "early"), F("p-cost", "under budget"), F("p-reception", "praise")},
                                  {"P1", "P2"}},
                                 {"P1", "P shipped early and under budget.", {F("p-timing", "early"), F("p-cost", "under budget")}, {}},
                                 {"P2", "P drew praise.", {F("p-reception", "praise")}, {}},
                                 {"Q", "Project Q slipped, went over budget and drew complaints.",
                                  {F("q-timing", "late"), F("q-cost", "over budget"), F("q-reception", "complaints")},
                                  {"Q1", "Q2"}},
                                 {"Q1", "Q slipped and went over budget.", {F("q-timing", "late"), F("q-cost", "over budget")}, {}},
                                 {"Q2", "Q drew complaints.", {F("q-reception", "complaints")}, {}}});
}

std::set<Fact> fact_universe(const ProcessedDocument& pd, const std::set<QAId>& atoms) {
  std::set<Fact> out;
  for (const auto& a : pd.ortho.atoms) {
    if (atoms.count(a.id)) out.insert(a.core.fact_set().begin(), a.core.fact_set().end());
  }
  return out;
}

}  // namespace

TEST(Hierarchical, AbcPredicate) {
  ProcessedDocument pd = load_processed("abc.json");
  EXPECT_TRUE(is_hierarchical({"A", "B"}, pd.dag));
  EXPECT_FALSE(is_hierarchical({"B", "C"}, pd.dag));
  EXPECT_TRUE(is_hierarchical({}, pd.dag));
  EXPECT_EQ(code_of([&] { is_hierarchical({"Z"}, pd.dag); }), ErrorCode::UnknownNode);
}

TEST(Hierarchical, AbcHasFiveOfEight) {
  ProcessedDocument pd = load_processed("abc.json");
  auto all = powerset(pd.dag);
  EXPECT_EQ(all.size(), 8u);
  auto hier = enumerate_hierarchical(pd.dag);
  EXPECT_EQ(hier.size(), 5u);
  std::size_t brute = std::count_if(all.begin(), all.end(), [&](const Selection& s) { return ancestor_closed(s, pd.dag); });
  EXPECT_EQ(brute, 5u);
  EXPECT_EQ(hier.front(), Selection{});
  EXPECT_EQ(hier.back(), full_selection(pd.dag));
  EXPECT_EQ(hier[1], Selection{"A"});
}

TEST(Hierarchical, SingleNodeDocument) {
  SourceDocument src = make_source("one", {{"r", "Only this.", {F("k", "v")}, {}}});
  EXPECT_EQ(enumerate_hierarchical(*src.annotated).size(), 2u);
}

TEST(Hierarchical, EnumerationMatchesBruteForceOnFixtures) {
  for (auto src : {load_source_document(data_path("abc.json")), load_source_document(data_path("edu.json")), three_chains()}) {
    const AbstractiveDag& dag = *src.annotated;
    std::set<Selection> brute;
    for (const auto& s : powerset(dag)) {
      if (ancestor_closed(s, dag)) brute.insert(s);
    }
    auto hier = enumerate_hierarchical(dag);
    EXPECT_EQ(std::set<Selection>(hier.begin(), hier.end()), brute);
    EXPECT_EQ(hier.size(), brute.size());
    for (const auto& s : hier) EXPECT_TRUE(is_hierarchical(s, dag));
  }
}

TEST(Hierarchical, TooLargeIsReported) {
  std::vector<NodeSpec> rows{{"r", "Root.", {F("r", "1")}, {}}};
  for (int i = 0; i < 13; ++i) {
    std::string id = "c" + std::to_string(i);
    rows[0].children.push_back(id);
    rows.push_back({id, "Child " + std::to_string(i) + ".", {F(id, "1")}, {}});
  }
  SourceDocument src = make_source("wide", rows);
  EXPECT_EQ(code_of([&] { enumerate_hierarchical(*src.annotated); }), ErrorCode::TooLarge);
  EXPECT_EQ(enumerate_hierarchical(*src.annotated, 10000).size(), 8193u);
}

TEST(Lattice, MeetAndJoin) {
  EXPECT_EQ(join({"A", "B"}, {"A", "C"}), (Selection{"A", "B", "C"}));
  EXPECT_EQ(meet({"A", "B"}, {"A", "C"}), (Selection{"A"}));
}

TEST(Lattice, HierarchicalClosedUnderMeetAndJoin) {
  for (auto src : {load_source_document(data_path("abc.json")), three_chains()}) {
    const AbstractiveDag& dag = *src.annotated;
    auto hier = enumerate_hierarchical(dag);
    std::size_t pairs = 0;
    for (const auto& a : hier) {
      for (const auto& b : hier) {
        EXPECT_TRUE(ancestor_closed(join(a, b), dag));
        EXPECT_TRUE(ancestor_closed(meet(a, b), dag));
        ++pairs;
      }
    }
    if (dag.size() == 3) EXPECT_EQ(pairs, 25u);
  }
}

TEST(Suppress, BoundsOfTheLattice) {
  ProcessedDocument pd = load_processed("abc.json");
  Summary top = suppress(pd, full_selection(pd.dag));
  EXPECT_EQ(top.atoms, pd.ortho.atom_ids());
  Summary bottom = suppress(pd, {});
  EXPECT_TRUE(bottom.atoms.empty());
  EXPECT_EQ(bottom.text, "");
}

TEST(Suppress, AbcKeepAC) {
  ProcessedDocument pd = load_processed("abc.json");
  Summary s = suppress(pd, {"A", "C"});
  std::set<Fact> want = {F("which-report-is-out", "the annual budget report"), F("the-trend-of-revenue", "flat")};
  EXPECT_EQ(fact_universe(pd, s.atoms), want);
  EXPECT_EQ(s.atoms.size(), 2u);
  EXPECT_EQ(s.text, "The annual budget report is out. Revenue stayed flat.");
  EXPECT_EQ(summary_markup(pd, {"A", "C"}),
            "The annual budget report is out. ~~Spending rose by ten percent and hiring was frozen.~~ Revenue stayed flat.");
}

TEST(Suppress, NonHierarchicalNeedsOverride) {
  ProcessedDocument pd = load_processed("abc.json");
  EXPECT_EQ(code_of([&] { suppress(pd, {"B", "C"}); }), ErrorCode::NonHierarchical);
  Summary s = suppress(pd, {"B", "C"}, true);
  EXPECT_FALSE(s.hierarchical);
  EXPECT_EQ(s.atoms.size(), 3u);
}

TEST(Suppress, JoinAndMeetAtoms) {
  ProcessedDocument pd = process(three_chains());
  auto hier = enumerate_hierarchical(pd.dag);
  for (const auto& a : hier) {
    for (const auto& b : hier) {
      std::set<QAId> sa = suppress(pd, a).atoms, sb = suppress(pd, b).atoms;
      std::set<QAId> u = sa;
      u.insert(sb.begin(), sb.end());
      EXPECT_EQ(suppress(pd, join(a, b)).atoms, u);
      std::set<QAId> m = suppress(pd, meet(a, b)).atoms;
      EXPECT_TRUE(std::includes(sa.begin(), sa.end(), m.begin(), m.end()));
      EXPECT_TRUE(std::includes(sb.begin(), sb.end(), m.begin(), m.end()));
    }
  }
}

TEST(Classify, DroppingWholeChainIsSubdocument) {
  ProcessedDocument pd = load_processed("abc.json");
  EXPECT_EQ(classify_summary(pd, {"A", "B"}), SummaryKind::subdocument);
  EXPECT_EQ(classify_summary(pd, full_selection(pd.dag)), SummaryKind::subdocument);
}

TEST(Classify, KeepingOnlyHeadsIsQuotient) {
  ProcessedDocument pd = load_processed("edu.json");
  EXPECT_EQ(classify_summary(pd, {"R"}), SummaryKind::quotient);
  EXPECT_EQ(classify_summary(pd, {"R", "S2"}), SummaryKind::quotient);
}

TEST(Classify, DropAndTrimIsMixed) {
  ProcessedDocument pd = process(three_chains());
  EXPECT_EQ(classify_summary(pd, {"T", "P"}), SummaryKind::mixed);
  EXPECT_EQ(classify_summary(pd, {"T", "P", "P1", "P2"}), SummaryKind::subdocument);
  EXPECT_EQ(classify_summary(pd, {"T", "P", "Q"}), SummaryKind::quotient);
}

TEST(Classify, KeptDetailWithoutHeadIsInvalid) {
  ProcessedDocument pd = load_processed("edu.json");
  EXPECT_EQ(code_of([&] { classify_summary(pd, {"S1"}); }), ErrorCode::InvalidSummary);
  EXPECT_EQ(code_of([&] { factor_summary(pd, {"S1"}); }), ErrorCode::InvalidSummary);
}

TEST(Factor, PureCases) {
  ProcessedDocument abc = load_processed("abc.json");
  SummaryFactors sub = factor_summary(abc, {"A", "B"});
  EXPECT_EQ(sub.subdocument_step, (Selection{"A", "B"}));
  EXPECT_EQ(sub.quotient_step, (Selection{"A", "B"}));

  ProcessedDocument edu = load_processed("edu.json");
  SummaryFactors quo = factor_summary(edu, {"R"});
  EXPECT_EQ(quo.subdocument_step, full_selection(edu.dag));
  EXPECT_EQ(quo.quotient_step, (Selection{"R"}));
}

TEST(Factor, EveryHierarchicalSelectionRecomposes) {
  ProcessedDocument pd = process(three_chains());
  std::size_t mixed = 0;
  for (const auto& sel : enumerate_hierarchical(pd.dag)) {
    if (sel.empty()) continue;
    SummaryFactors f = factor_summary(pd, sel);
    EXPECT_EQ(classify_summary(pd, f.subdocument_step), SummaryKind::subdocument);
    EXPECT_TRUE(std::includes(f.subdocument_step.begin(), f.subdocument_step.end(), f.quotient_step.begin(),
                              f.quotient_step.end()));
    SummaryKind second = classify_summary(pd, f.quotient_step, f.subdocument_step);
    EXPECT_NE(second, SummaryKind::mixed);
    EXPECT_EQ(suppress(pd, f.quotient_step).atoms, suppress(pd, sel).atoms);
    if (classify_summary(pd, sel) == SummaryKind::mixed) ++mixed;
  }
  EXPECT_GT(mixed, 0u);
}

namespace {

SourceDocument gettysburg() {
  return make_source("gettysburg",
                     {{"G", "Our fathers founded a nation, and we meet on a battlefield of the war that tests it.",
                       {F("who-brought-forth-a-new-nation", "our fathers"), F("where-are-we-met", "a great battle-field")},
                       {"G1", "G2"}},
                      {"G1", "Four score and seven years ago our fathers brought forth on this continent, a new nation.",
                       {F("who-brought-forth-a-new-nation", "our fathers")}, {}},
                      {"G2", "We are met on a great battle-field of that war.", {F("where-are-we-met", "a great battle-field")}, {}}});
}

ExtensionSpec spec_of(const std::string& json) { return parse_extension_spec(nlohmann::json::parse(json)); }

}  // namespace

TEST(Extend, NewHeadIsSuperdocument) {
  ProcessedDocument pd = process(gettysburg());
  FactSetOracle o;
  Extension ext = extend(pd, spec_of(R"({"additions":[{"id":"W","text":"The field is at Gettysburg, Pennsylvania.",
      "facts":[{"key":"where-is-the-field","values":["Gettysburg, Pennsylvania"]}]}]})"), o);
  EXPECT_EQ(ext.kinds.at("W"), ExtensionKind::superdocument);
  EXPECT_EQ(ext.dag.node("W").parents, (std::vector<NodeId>{"G"}));
  EXPECT_EQ(ext.new_atoms.size(), 1u);
  EXPECT_NE(extension_markup(pd.dag, ext.dag).find("__The field is at Gettysburg, Pennsylvania.__"), std::string::npos);
}

TEST(Extend, DetailUnderNodeIsElaboration) {
  ProcessedDocument pd = process(gettysburg());
  FactSetOracle o;
  Extension ext = extend(pd, spec_of(R"({"additions":[{"id":"M","text":"And our mothers.",
      "facts":[{"key":"who-else-brought-forth-a-new-nation","values":["our mothers"]}],"attach_under":"G1"}]})"), o);
  EXPECT_EQ(ext.kinds.at("M"), ExtensionKind::elaboration);
  EXPECT_EQ(ext.dag.node("G1").children, (std::vector<NodeId>{"G1~base", "M"}));
  EXPECT_EQ(ext.dag.node("G1").assertion.fact_set().size(), 2u);
  EXPECT_TRUE(ext.dag.spans_partition());
  std::string markup = extension_markup(pd.dag, ext.dag);
  EXPECT_NE(markup.find("a new nation. __And our mothers.__"), std::string::npos);
}

TEST(Extend, EmptySpecIsIdentity) {
  ProcessedDocument pd = process(gettysburg());
  FactSetOracle o;
  Extension ext = extend(pd, ExtensionSpec{}, o);
  EXPECT_TRUE(ext.dag == pd.dag);
  EXPECT_TRUE(ext.new_atoms.empty());
  EXPECT_EQ(ext.processed.ortho.atom_ids(), pd.ortho.atom_ids());
}

TEST(Extend, Errors) {
  ProcessedDocument pd = process(gettysburg());
  FactSetOracle o;
  EXPECT_EQ(code_of([&] {
              extend(pd, spec_of(R"({"additions":[{"text":"Again our fathers.",
                  "facts":[{"key":"who-brought-forth-a-new-nation","values":["our fathers"]}]}]})"), o);
            }),
            ErrorCode::OverlapWithExisting);
  EXPECT_EQ(code_of([&] {
              extend(pd, spec_of(R"({"additions":[{"text":"x.","facts":[{"key":"x","values":["1"]}],"attach_under":"nope"}]})"), o);
            }),
            ErrorCode::UnknownAttachNode);
  EXPECT_EQ(code_of([&] { extend(pd, spec_of(R"({"additions":[{"text":"no facts here."}]})"), o); }), ErrorCode::ModeMismatch);
  EXPECT_EQ(code_of([] { parse_extension_spec(nlohmann::json::parse(R"({"adds":[]})")); }), ErrorCode::ParseError);
  // Marked overlaps are accepted.
  EXPECT_NO_THROW(extend(pd, spec_of(R"({"additions":[{"text":"Our fathers, again.","allow_overlap":true,
      "facts":[{"key":"who-brought-forth-a-new-nation","values":["our fathers"]}],"attach_under":"G1"}]})"), o));
}

TEST(Extend, FactorizationRecomposesAbcFixture) {
  ProcessedDocument pd = load_processed("abc.json");
  FactSetOracle o;
  ExtensionSpec spec = parse_extension_spec(nlohmann::json::parse(read_file(data_path("abc.extension.json"))));
  Extension ext = extend(pd, spec, o);
  EXPECT_EQ(ext.kinds.at("X"), ExtensionKind::superdocument);
  EXPECT_EQ(ext.kinds.at("X1"), ExtensionKind::elaboration);
  EXPECT_EQ(ext.kinds.at("B1"), ExtensionKind::elaboration);

  ExtensionFactors f = factor_extension(spec);
  ASSERT_EQ(f.superdocument_step.additions.size(), 1u);
  EXPECT_EQ(f.superdocument_step.additions[0].id, "X");
  EXPECT_EQ(f.elaboration_step.additions.size(), 2u);

  AbstractiveDag step1 = apply_extension(pd.dag, f.superdocument_step);
  AbstractiveDag step2 = apply_extension(step1, f.elaboration_step);
  EXPECT_EQ(dag_to_json(step2).dump(), dag_to_json(ext.dag).dump());

  Extension e1 = extend(pd, f.superdocument_step, o);
  Extension e2 = extend(e1.processed, f.elaboration_step, o);
  EXPECT_EQ(e2.processed.ortho.atom_ids(), ext.processed.ortho.atom_ids());

  // Summary atoms ⊆ document atoms ⊆ extension atoms.
  std::set<QAId> doc = pd.ortho.atom_ids(), extended = ext.processed.ortho.atom_ids();
  std::set<QAId> summary = suppress(pd, {"A", "C"}).atoms;
  EXPECT_TRUE(std::includes(doc.begin(), doc.end(), summary.begin(), summary.end()));
  EXPECT_TRUE(std::includes(extended.begin(), extended.end(), doc.begin(), doc.end()));
  EXPECT_EQ(extended.size(), doc.size() + 3);
}

TEST(Extend, PureFactorizations) {
  ExtensionSpec heads = spec_of(R"({"additions":[{"text":"a.","facts":[{"key":"a","values":["1"]}]}]})");
  EXPECT_EQ(factor_extension(heads).superdocument_step.additions.size(), 1u);
  EXPECT_TRUE(factor_extension(heads).elaboration_step.additions.empty());
  ExtensionSpec details = spec_of(R"({"additions":[{"text":"a.","facts":[{"key":"a","values":["1"]}],"attach_under":"B"}]})");
  EXPECT_TRUE(factor_extension(details).superdocument_step.additions.empty());
  EXPECT_EQ(factor_extension(details).elaboration_step.additions.size(), 1u);
  EXPECT_EQ(extension_spec_to_json(details)["additions"][0]["attach_under"], "B");
}
