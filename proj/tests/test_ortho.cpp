#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace qacat;
using namespace qacat::testing;

namespace {

using Atom = std::set<std::string>;

QAPair from_mask(unsigned mask) {
  std::vector<Fact> fs;
  for (unsigned b = 0; b < 16; ++b) {
    if (mask & (1u << b)) fs.push_back(F("f" + std::to_string(b), "yes"));
  }
  return Q(fs);
}

Atom keys(const QAPair& q) {
  Atom out;
  for (const auto& f : q.core.fact_set()) out.insert(f.key);
  return out;
}

std::set<Atom> atoms_of(const OrthoSet& s) {
  std::set<Atom> out;
  for (const auto& a : s.atoms) out.insert(keys(a));
  return out;
}

// Facts grouped by the set of input indices containing them.
std::set<Atom> expected_atoms(const std::vector<QAPair>& qas) {
  std::map<std::string, std::set<std::size_t>> sig;
  for (std::size_t i = 0; i < qas.size(); ++i) {
    for (const auto& k : keys(qas[i])) sig[k].insert(i);
  }
  std::map<std::set<std::size_t>, Atom> groups;
  for (const auto& [k, s] : sig) groups[s].insert(k);
  std::set<Atom> out;
  for (const auto& [s, a] : groups) out.insert(a);
  return out;
}

OrthoSet run(const std::vector<QAPair>& qas) {
  FactSetOracle o;
  return orthogonalize(qas, o);
}

}  // namespace

TEST(Ortho, OverlappingPairSplitsIntoThree) {
  std::vector<QAPair> in = {Q({F("f1", "a"), F("f2", "b")}), Q({F("f2", "b"), F("f3", "c")})};
  OrthoSet s = run(in);
  EXPECT_EQ(atoms_of(s), (std::set<Atom>{{"f1"}, {"f2"}, {"f3"}}));
  EXPECT_TRUE(s.converged);
  EXPECT_TRUE(std::is_sorted(s.atoms.begin(), s.atoms.end(), by_id));
}

TEST(Ortho, DisjointInputUnchanged) {
  std::vector<QAPair> in = {from_mask(0b001), from_mask(0b110), from_mask(0b1000)};
  OrthoSet s = run(in);
  std::vector<QAPair> sorted = in;
  std::sort(sorted.begin(), sorted.end(), by_id);
  ASSERT_EQ(s.atoms.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s.atoms[i].id, sorted[i].id);
  EXPECT_EQ(s.rounds, 0u);
}

TEST(Ortho, EmptyInputRejected) {
  FactSetOracle o;
  try {
    orthogonalize({}, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(Ortho, ProvenanceTracksOriginals) {
  QAPair x = from_mask(0b011), y = from_mask(0b110);
  OrthoSet s = run({x, y});
  for (const auto& a : s.atoms) {
    Atom k = keys(a);
    std::set<QAId> want;
    if (k.count("f0") || k.count("f1")) want.insert(x.id);
    if (k.count("f1") || k.count("f2")) want.insert(y.id);
    EXPECT_EQ(s.provenance.at(a.id), want);
  }
}

TEST(Verify, OutputOfOrthogonalizeIsClean) {
  FactSetOracle o;
  EXPECT_TRUE(verify_orthogonal(run({from_mask(0b0111), from_mask(0b1110), from_mask(0b1001)}), o).empty());
}

TEST(Verify, HandBuiltOverlapIsReported) {
  FactSetOracle o;
  OrthoSet s;
  QAPair a1 = from_mask(0b011), a2 = from_mask(0b110);
  s.atoms = {a1, a2};
  auto bad = verify_orthogonal(s, o);
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_EQ(bad[0], std::make_pair(a1.id, a2.id));
}

TEST(Verify, SingletonIsClean) {
  FactSetOracle o;
  OrthoSet s;
  s.atoms = {from_mask(0b111)};
  EXPECT_TRUE(verify_orthogonal(s, o).empty());
}

TEST(Signature, MatchesDefinition) {
  EXPECT_EQ(signature_partition(std::vector<QAPair>{from_mask(0b011), from_mask(0b110)}).atoms.size(), 3u);
  EXPECT_EQ(signature_partition(std::vector<QAPair>{from_mask(0b111)}).atoms.size(), 1u);
  EXPECT_EQ(signature_partition(std::vector<QAPair>{from_mask(1), from_mask(2), from_mask(4)}).atoms.size(), 3u);
  QAPair text_only = make_qa("q?", "a", make_assertion("no facts"));
  try {
    signature_partition(std::vector<QAPair>{text_only});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModeMismatch);
  }
}

TEST(Ortho, ExhaustiveTriplesOverFourFacts) {
  // Every multiset of up to three non-empty subsets of a 4-fact universe.
  for (unsigned a = 1; a < 16; ++a) {
    for (unsigned b = a; b < 16; ++b) {
      for (unsigned c = b; c < 16; ++c) {
        std::vector<QAPair> in = {from_mask(a), from_mask(b), from_mask(c)};
        OrthoSet s = run(in);
        std::set<Atom> want = expected_atoms(in);
        ASSERT_EQ(atoms_of(s), want) << a << " " << b << " " << c;
        EXPECT_EQ(atoms_of(signature_partition(in)), want);
        EXPECT_EQ(s.atoms.size(), want.size());
        EXPECT_TRUE(s.converged);
      }
    }
  }
}

TEST(Ortho, RandomCorporaMatchSignaturePartition) {
  std::mt19937_64 rng(99);
  FactSetOracle o;
  for (int round = 0; round < 300; ++round) {
    std::size_t n = 1 + rng() % 6;
    std::vector<QAPair> in;
    for (std::size_t i = 0; i < n; ++i) in.push_back(from_mask(1 + static_cast<unsigned>(rng() % 4095)));
    OrthoSet s = run(in);
    ASSERT_EQ(atoms_of(s), expected_atoms(in));
    EXPECT_TRUE(verify_orthogonal(s, o).empty());

    // Conservation.
    Atom all_in, all_out;
    for (const auto& q : in) {
      for (const auto& k : keys(q)) all_in.insert(k);
    }
    for (const auto& a : s.atoms) {
      for (const auto& k : keys(a)) all_out.insert(k);
    }
    EXPECT_EQ(all_in, all_out);

    // Termination bound.
    EXPECT_LE(s.rounds, all_in.size());

    // Disjoint inputs never share an atom.
    for (const auto& x : in) {
      for (const auto& y : in) {
        Atom kx = keys(x), ky = keys(y);
        bool disjoint = std::none_of(kx.begin(), kx.end(), [&](const std::string& k) { return ky.count(k) > 0; });
        if (!disjoint) continue;
        for (const auto& a : s.atoms) {
          const auto& p = s.provenance.at(a.id);
          EXPECT_FALSE(p.count(x.id) && p.count(y.id));
        }
      }
    }

    // Input order does not matter.
    std::vector<QAPair> shuffled = in;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    OrthoSet t = run(shuffled);
    ASSERT_EQ(t.atoms.size(), s.atoms.size());
    for (std::size_t i = 0; i < s.atoms.size(); ++i) EXPECT_EQ(t.atoms[i].id, s.atoms[i].id);
  }
}

TEST(Ortho, TraceFollowsInputNodes) {
  QAPair x = from_mask(0b011), y = from_mask(0b110);
  TraceRelation in;
  in.add_all(x.id, {"n1"});
  in.add_all(y.id, {"n2"});
  FactSetOracle o;
  OrthoSet s = orthogonalize(std::vector<QAPair>{x, y}, o, {}, &in);
  for (const auto& a : s.atoms) {
    Atom k = keys(a);
    std::set<NodeId> want;
    if (k.count("f0") || k.count("f1")) want.insert("n1");
    if (k.count("f1") || k.count("f2")) want.insert("n2");
    EXPECT_EQ(s.trace.nodes_of(a.id), want);
  }
}
