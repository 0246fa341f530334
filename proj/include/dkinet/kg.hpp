#pragma once

#include "dkinet/ehr.hpp"

#include <string>
#include <tuple>
#include <vector>

namespace dkinet {

/// Triple store over interned concept and relation ids. Head -> tail
/// direction is the aggregation direction; inverse edges are only present
/// if the triples file lists them explicitly.
struct KnowledgeGraph {
  struct Triple {
    int head;
    int rel;
    int tail;
    bool operator==(const Triple&) const = default;
  };

  std::vector<std::string> concept_names;
  std::vector<std::string> relation_names;
  std::map<std::string, int> concept_ids;
  std::map<std::string, int> relation_ids;
  std::vector<Triple> triples;  // deduplicated, file order

  int concept_count() const { return static_cast<int>(concept_names.size()); }
  int relation_count() const { return static_cast<int>(relation_names.size()); }

  int intern_concept(const std::string& name);
  int intern_relation(const std::string& name);
  int find_concept(const std::string& name) const;
};

/// Tab-separated `head \t relation \t tail`, one triple per line.
KnowledgeGraph load_triples(const std::string& path);
void save_triples(const KnowledgeGraph& kg, const std::string& path);

enum class CodeType { Diag, Proc, Med };

const char* code_type_name(CodeType t);

/// Index arithmetic for the single code table spanning all three vocab
/// ranges plus the medication PAD row (last).
struct GlobalCodeSpace {
  int num_diag = 0;
  int num_proc = 0;
  int num_med = 0;

  static GlobalCodeSpace from_vocab(const CodeVocab& vocab);

  int total() const { return num_diag + num_proc + num_med + 1; }
  int diag_offset() const { return 0; }
  int proc_offset() const { return num_diag; }
  int med_offset() const { return num_diag + num_proc; }
  int pad_index() const { return total() - 1; }
  int global_id(CodeType type, int local_id) const;
};

/// (code, concept) pairs in file order; codes identified by global id.
struct CodeConceptMap {
  std::vector<std::pair<int, int>> pairs;
  int skipped_unknown_codes = 0;
};

/// Tab-separated `code_type \t code \t cui`. Codes missing from the vocab
/// are skipped (counted); CUIs missing from the graph are an error.
CodeConceptMap load_code_map(const std::string& path, const CodeVocab& vocab,
                             const KnowledgeGraph& kg);

/// Every (code, concept) pair expanded with every filter index.
struct FilterGraph {
  int num_filters = 0;
  std::vector<std::tuple<int, int, int>> triples;  // (code, filter, concept)
};

/// Adjacency for both aggregation passes: by_head over the concept graph,
/// by_code over the filter graph.
struct NeighborIndex {
  std::vector<std::vector<std::pair<int, int>>> by_head;  // concept -> (rel, tail)
  std::vector<std::vector<std::pair<int, int>>> by_code;  // code -> (filter, concept)
};

struct FilterGraphBuild {
  FilterGraph graph;
  NeighborIndex index;
};

FilterGraphBuild build_filter_graph(const KnowledgeGraph& kg, const CodeConceptMap& map,
                                    int num_filters, int num_codes);

/// DDI adjacency over medication ids: symmetric, zero diagonal.
struct DdiMatrix {
  int num_meds = 0;
  std::vector<char> adverse;  // num_meds * num_meds

  bool at(int i, int j) const { return adverse[static_cast<std::size_t>(i) * num_meds + j] != 0; }
  void set(int i, int j);
};

/// Tab-separated unordered `med \t med` pairs; meds missing from the vocab
/// are skipped.
DdiMatrix load_ddi(const std::string& path, const CodeVocab& vocab);

}  // namespace dkinet
