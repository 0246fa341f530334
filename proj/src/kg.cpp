#include "dkinet/kg.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace dkinet {

namespace {

int intern(std::vector<std::string>& names, std::map<std::string, int>& ids,
           const std::string& name) {
  auto it = ids.find(name);
  if (it != ids.end()) return it->second;
  int id = static_cast<int>(names.size());
  names.push_back(name);
  ids.emplace(name, id);
  return id;
}

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> cols;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      cols.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cols.push_back(cur);
  return cols;
}

}  // namespace

int KnowledgeGraph::intern_concept(const std::string& name) {
  return intern(concept_names, concept_ids, name);
}

int KnowledgeGraph::intern_relation(const std::string& name) {
  return intern(relation_names, relation_ids, name);
}

int KnowledgeGraph::find_concept(const std::string& name) const {
  auto it = concept_ids.find(name);
  return it == concept_ids.end() ? -1 : it->second;
}

KnowledgeGraph load_triples(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw TensorError("cannot open triples file '" + path + "'");

  KnowledgeGraph kg;
  std::set<std::tuple<int, int, int>> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cols = split_tsv(line);
    if (cols.size() != 3) {
      throw TensorError("triples line " + std::to_string(line_no) + ": expected 3 columns, got " +
                        std::to_string(cols.size()));
    }
    int h = kg.intern_concept(cols[0]);
    int r = kg.intern_relation(cols[1]);
    int t = kg.intern_concept(cols[2]);
    if (seen.insert({h, r, t}).second) kg.triples.push_back({h, r, t});
  }
  return kg;
}

void save_triples(const KnowledgeGraph& kg, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw TensorError("cannot write triples file '" + path + "'");
  for (const auto& t : kg.triples) {
    os << kg.concept_names[t.head] << '\t' << kg.relation_names[t.rel] << '\t'
       << kg.concept_names[t.tail] << '\n';
  }
}

const char* code_type_name(CodeType t) {
  switch (t) {
    case CodeType::Diag: return "diag";
    case CodeType::Proc: return "proc";
    case CodeType::Med: return "med";
  }
  return "?";
}

GlobalCodeSpace GlobalCodeSpace::from_vocab(const CodeVocab& vocab) {
  return GlobalCodeSpace{vocab.diag_size(), vocab.proc_size(), vocab.med_size()};
}

int GlobalCodeSpace::global_id(CodeType type, int local_id) const {
  switch (type) {
    case CodeType::Diag:
      if (local_id < 0 || local_id >= num_diag) throw TensorError("diag id out of range");
      return diag_offset() + local_id;
    case CodeType::Proc:
      if (local_id < 0 || local_id >= num_proc) throw TensorError("proc id out of range");
      return proc_offset() + local_id;
    case CodeType::Med:
      // PAD is addressable as local id == num_med
      if (local_id < 0 || local_id > num_med) throw TensorError("med id out of range");
      return med_offset() + local_id;
  }
  throw TensorError("bad code type");
}

CodeConceptMap load_code_map(const std::string& path, const CodeVocab& vocab,
                             const KnowledgeGraph& kg) {
  std::ifstream is(path);
  if (!is) throw TensorError("cannot open code map file '" + path + "'");

  const auto space = GlobalCodeSpace::from_vocab(vocab);
  CodeConceptMap map;
  std::set<std::pair<int, int>> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cols = split_tsv(line);
    if (cols.size() != 3) {
      throw TensorError("code map line " + std::to_string(line_no) +
                        ": expected 3 columns, got " + std::to_string(cols.size()));
    }
    const std::string& type = cols[0];
    int local = -1;
    CodeType ct;
    if (type == "diag") {
      ct = CodeType::Diag;
      local = vocab.find_diag(cols[1]);
    } else if (type == "proc") {
      ct = CodeType::Proc;
      local = vocab.find_proc(cols[1]);
    } else if (type == "med") {
      ct = CodeType::Med;
      local = vocab.find_med(cols[1]);
    } else {
      throw TensorError("code map line " + std::to_string(line_no) + ": unknown code type '" +
                        type + "'");
    }
    if (local < 0) {
      ++map.skipped_unknown_codes;
      continue;
    }
    int concept_id = kg.find_concept(cols[2]);
    if (concept_id < 0) {
      throw TensorError("code map line " + std::to_string(line_no) + ": CUI '" + cols[2] +
                        "' not present in the knowledge graph");
    }
    auto pair = std::make_pair(space.global_id(ct, local), concept_id);
    if (seen.insert(pair).second) map.pairs.push_back(pair);
  }
  return map;
}

FilterGraphBuild build_filter_graph(const KnowledgeGraph& kg, const CodeConceptMap& map,
                                    int num_filters, int num_codes) {
  if (num_filters < 1) {
    throw TensorError("filter count must be >= 1, got " + std::to_string(num_filters));
  }
  FilterGraphBuild out;
  out.graph.num_filters = num_filters;
  out.index.by_head.assign(static_cast<std::size_t>(kg.concept_count()), {});
  out.index.by_code.assign(static_cast<std::size_t>(num_codes), {});

  for (const auto& t : kg.triples) {
    out.index.by_head[static_cast<std::size_t>(t.head)].emplace_back(t.rel, t.tail);
  }
  for (const auto& [code, concept_id] : map.pairs) {
    if (code < 0 || code >= num_codes) throw TensorError("code id out of range in concept map");
    for (int f = 0; f < num_filters; ++f) {
      out.graph.triples.emplace_back(code, f, concept_id);
      out.index.by_code[static_cast<std::size_t>(code)].emplace_back(f, concept_id);
    }
  }
  return out;
}

void DdiMatrix::set(int i, int j) {
  if (i == j) return;
  adverse[static_cast<std::size_t>(i) * num_meds + j] = 1;
  adverse[static_cast<std::size_t>(j) * num_meds + i] = 1;
}

DdiMatrix load_ddi(const std::string& path, const CodeVocab& vocab) {
  std::ifstream is(path);
  if (!is) throw TensorError("cannot open DDI file '" + path + "'");

  DdiMatrix ddi;
  ddi.num_meds = vocab.med_size();
  ddi.adverse.assign(static_cast<std::size_t>(ddi.num_meds) * ddi.num_meds, 0);

  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cols = split_tsv(line);
    if (cols.size() != 2) {
      throw TensorError("DDI line " + std::to_string(line_no) + ": expected 2 columns, got " +
                        std::to_string(cols.size()));
    }
    int a = vocab.find_med(cols[0]);
    int b = vocab.find_med(cols[1]);
    if (a < 0 || b < 0) continue;
    ddi.set(a, b);
  }
  return ddi;
}

}  // namespace dkinet
