#pragma once

#include "dkinet/tensor.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dkinet {

/// Dense integer ids for the three code spaces. Medication keeps one
/// reserved PAD id just past the label range; PAD never appears in labels.
struct CodeVocab {
  std::vector<std::string> diag_names;
  std::vector<std::string> proc_names;
  std::vector<std::string> med_names;
  std::map<std::string, int> diag_ids;
  std::map<std::string, int> proc_ids;
  std::map<std::string, int> med_ids;

  int diag_size() const { return static_cast<int>(diag_names.size()); }
  int proc_size() const { return static_cast<int>(proc_names.size()); }
  int med_size() const { return static_cast<int>(med_names.size()); }
  int med_pad_id() const { return med_size(); }

  int intern_diag(const std::string& code);
  int intern_proc(const std::string& code);
  int intern_med(const std::string& code);

  int find_diag(const std::string& code) const;
  int find_proc(const std::string& code) const;
  int find_med(const std::string& code) const;
};

/// One visit: deduplicated, sorted id sets. med is both the label of this
/// visit and the history input of the next one.
struct Visit {
  std::vector<int> diag;
  std::vector<int> proc;
  std::vector<int> med;
};

struct PatientRecord {
  std::string id;
  std::vector<Visit> visits;  // temporal order, length >= 2
};

struct EhrData {
  std::vector<PatientRecord> patients;
  CodeVocab vocab;
  int dropped_single_visit = 0;
};

/// Line-delimited records: one JSON object per line,
/// {"id": ..., "visits": [{"diag": [...], "proc": [...], "med": [...]}]}.
/// Codes are interned in first-seen order; patients with fewer than two
/// visits are dropped (counted in the result).
EhrData load_ehr(const std::string& path);

struct DatasetSplit {
  std::vector<PatientRecord> train;
  std::vector<PatientRecord> val;
  std::vector<PatientRecord> test;
};

/// Seeded shuffle, then a 4:1:1 partition by patient.
DatasetSplit split_dataset(std::vector<PatientRecord> patients, std::uint64_t seed);

/// {0,1}-vector of length `size` with ones at `ids`.
Tensor multihot(const std::vector<int>& ids, Index size);

/// Medication input for visit t (1-based): meds of visit t-1, or {PAD} for
/// the first visit.
std::vector<int> history_med_input(const PatientRecord& patient, int t, const CodeVocab& vocab);

}  // namespace dkinet
