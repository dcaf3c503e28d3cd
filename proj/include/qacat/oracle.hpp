#ifndef QACAT_ORACLE_HPP
#define QACAT_ORACLE_HPP

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qacat/core.hpp"

namespace qacat {

struct AnswerVerdict {
  bool addressable = false;  // the question can be answered at all
  bool consistent = false;   // and the answer agrees; implies addressable

  friend bool operator==(const AnswerVerdict&, const AnswerVerdict&) = default;
};

/// Half-open byte range into a text.
struct TextSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const TextSpan&, const TextSpan&) = default;
};

struct ChunkResult {
  std::vector<TextSpan> spans;
  bool leaf = false;  // input was a single sentence and came back whole
};

/// decomp(QA1, QA2) = (QA1 - QA2, QA1 ∩ QA2, QA2 - QA1). Empty pieces are
/// omitted; a piece may be rendered as several QAs.
struct DecompTriple {
  std::vector<QAPair> left;
  std::vector<QAPair> mid;
  std::vector<QAPair> right;
};

/// The single seam for judgement calls. Implementations: FactSetOracle
/// (exact, pure) and LlmOracle (chat endpoint behind a replayable cache).
class SemanticOracle {
 public:
  virtual ~SemanticOracle() = default;

  virtual OracleMode mode() const = 0;
  /// Identifies the grader in report metadata.
  virtual std::string grader() const = 0;

  virtual AnswerVerdict answers(const Assertion& a, const QAPair& qa) = 0;
  virtual std::set<std::string> question_keys(const Assertion& a) = 0;
  virtual bool consistent(const Assertion& a, const Assertion& b) = 0;
  virtual ChunkResult chunk(std::string_view text, std::size_t fanout_limit) = 0;
  virtual Assertion summarize_chunk(std::string_view text) = 0;
  /// `attempt` distinguishes retries so a replayed cache can hold each one.
  virtual DecompTriple decompose_pair(const QAPair& qa1, const QAPair& qa2, int attempt = 0) = 0;

  // Operations the LLM route needs and the fact-set route answers exactly.
  virtual std::vector<QAPair> core_qas(const Assertion& a) = 0;
  virtual QAPair unite(const QAPair& qa1, const QAPair& qa2) = 0;
  virtual std::vector<QAPair> probe_panel(const Assertion& a, const Assertion& b) = 0;
  virtual bool pieces_conserve(const std::vector<QAPair>& originals, const std::vector<QAPair>& pieces,
                               int attempt = 0) = 0;
};

}  // namespace qacat

#endif  // QACAT_ORACLE_HPP
