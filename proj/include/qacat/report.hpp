#ifndef QACAT_REPORT_HPP
#define QACAT_REPORT_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qacat/config.hpp"
#include "qacat/constraints.hpp"
#include "qacat/lattice.hpp"
#include "qacat/measures.hpp"
#include "qacat/rd.hpp"

namespace qacat::report {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Common header of every report.
inline Json envelope(const std::string& command, const Config& config, const std::string& grader) {
  Json j;
  j["tool"] = "qacat";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config_digest"] = config_digest(config);
  j["prompt_template"] = kPromptTemplateVersion;
  j["mode"] = to_string(config.mode);
  j["grader"] = grader;
  return j;
}

inline Json document_json(const Document& d) {
  return {{"id", d.id}, {"mode", to_string(d.mode)}, {"words", d.word_count}, {"sentences", text::sentence_count(d.raw_text)}};
}

inline Json qa_brief(const QAPair& q) {
  Json j;
  j["id"] = q.id.hex;
  j["question"] = q.question;
  j["answer"] = q.answer;
  j["statement"] = q.core.display();
  if (q.core.facts) j["facts"] = facts_to_json(*q.core.facts);
  return j;
}

inline Json qas_json(const ProcessedDocument& d) {
  Json nodes = Json::array();
  for (const auto& n : d.dag.nodes()) {
    Json jn;
    jn["node"] = n.id;
    Json qs = Json::array();
    for (const auto& q : d.core.core_qas.at(n.id)) qs.push_back(qa_brief(q));
    jn["core_qas"] = std::move(qs);
    nodes.push_back(std::move(jn));
  }
  Json objects = Json::array();
  for (const auto& cls : d.category.objects()) {
    Json members = Json::array();
    for (const auto& m : cls.members) members.push_back(m.hex);
    objects.push_back({{"representative", cls.representative.hex}, {"members", std::move(members)}});
  }
  Json edges = Json::array();
  for (const auto& [a, b] : d.category.reduction()) edges.push_back({a.hex, b.hex});
  ChainReport chains = chain_report(d.category);
  Json heads = Json::array();
  for (const auto& h : chains.heads) heads.push_back(h.hex);
  Json population = Json::array();
  for (const auto& q : d.population) {
    Json jq = qa_brief(q);
    jq["nodes"] = d.population_trace.nodes_of(q.id);
    population.push_back(std::move(jq));
  }
  Json j;
  j["nodes"] = std::move(nodes);
  j["population"] = std::move(population);
  j["objects"] = std::move(objects);
  j["morphisms"] = std::move(edges);
  j["heads"] = std::move(heads);
  return j;
}

inline Json ortho_json(const ProcessedDocument& d, const std::vector<std::pair<QAId, QAId>>& violations) {
  Json atoms = Json::array();
  for (const auto& a : d.ortho.atoms) {
    Json ja = qa_brief(a);
    ja["nodes"] = d.ortho.trace.nodes_of(a.id);
    Json prov = Json::array();
    for (const auto& p : d.ortho.provenance.at(a.id)) prov.push_back(p.hex);
    ja["provenance"] = std::move(prov);
    atoms.push_back(std::move(ja));
  }
  Json per_node = Json::array();
  for (const auto& n : d.dag.nodes()) {
    Json list = Json::array();
    for (const auto& a : d.atoms_of(n.id)) list.push_back(a.core.display());
    per_node.push_back({{"node", n.id}, {"text", n.assertion.text}, {"atoms", std::move(list)}});
  }
  Json unresolved = Json::array();
  for (const auto& [a, b] : d.ortho.unresolved) unresolved.push_back({a.hex, b.hex});
  Json viol = Json::array();
  for (const auto& [a, b] : violations) viol.push_back({a.hex, b.hex});
  Json j;
  j["converged"] = d.ortho.converged;
  j["rounds"] = d.ortho.rounds;
  j["atoms"] = std::move(atoms);
  j["per_node"] = std::move(per_node);
  j["unresolved"] = std::move(unresolved);
  j["violations"] = std::move(viol);
  return j;
}

inline Json summary_json(const ProcessedDocument& d, const Summary& s) {
  Json j;
  j["selection"] = s.selection;
  j["hierarchical"] = s.hierarchical;
  Json atoms = Json::array();
  for (const auto& a : d.ortho.atoms) {
    if (s.atoms.count(a.id)) atoms.push_back(a.id.hex);
  }
  j["atoms"] = std::move(atoms);
  j["text"] = s.text;
  return j;
}

inline Json points_json(const std::vector<RDPoint>& points) {
  Json arr = Json::array();
  for (const auto& p : points) arr.push_back({{"method", p.method}, {"rate_words", p.rate}, {"distortion", p.distortion}});
  return arr;
}

}  // namespace qacat::report

#endif  // QACAT_REPORT_HPP
