#include "dkinet/ehr.hpp"

#include "dkinet/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace dkinet {

namespace {

int intern(std::vector<std::string>& names, std::map<std::string, int>& ids,
           const std::string& code) {
  auto it = ids.find(code);
  if (it != ids.end()) return it->second;
  int id = static_cast<int>(names.size());
  names.push_back(code);
  ids.emplace(code, id);
  return id;
}

int find(const std::map<std::string, int>& ids, const std::string& code) {
  auto it = ids.find(code);
  return it == ids.end() ? -1 : it->second;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

int CodeVocab::intern_diag(const std::string& code) { return intern(diag_names, diag_ids, code); }
int CodeVocab::intern_proc(const std::string& code) { return intern(proc_names, proc_ids, code); }
int CodeVocab::intern_med(const std::string& code) { return intern(med_names, med_ids, code); }
int CodeVocab::find_diag(const std::string& code) const { return find(diag_ids, code); }
int CodeVocab::find_proc(const std::string& code) const { return find(proc_ids, code); }
int CodeVocab::find_med(const std::string& code) const { return find(med_ids, code); }

EhrData load_ehr(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw TensorError("cannot open EHR file '" + path + "'");

  EhrData data;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw TensorError("EHR line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object()) {
      throw TensorError("EHR line " + std::to_string(line_no) + ": record is not an object");
    }
    for (const auto& [key, _] : rec.items()) {
      if (key != "id" && key != "visits") {
        throw TensorError("EHR line " + std::to_string(line_no) + ": unknown field '" + key + "'");
      }
    }
    if (!rec.contains("id") || !rec["id"].is_string() || !rec.contains("visits") ||
        !rec["visits"].is_array()) {
      throw TensorError("EHR line " + std::to_string(line_no) +
                        ": need string 'id' and array 'visits'");
    }

    PatientRecord patient;
    patient.id = rec["id"].get<std::string>();
    for (const auto& jv : rec["visits"]) {
      if (!jv.is_object()) {
        throw TensorError("EHR line " + std::to_string(line_no) + ": visit is not an object");
      }
      for (const auto& [key, _] : jv.items()) {
        if (key != "diag" && key != "proc" && key != "med") {
          throw TensorError("EHR line " + std::to_string(line_no) + ": unknown visit field '" +
                            key + "'");
        }
      }
      Visit visit;
      auto read_codes = [&](const char* key, auto&& intern_fn) {
        std::vector<int> ids;
        if (!jv.contains(key)) return ids;
        if (!jv[key].is_array()) {
          throw TensorError("EHR line " + std::to_string(line_no) + ": '" + key +
                            "' is not an array");
        }
        for (const auto& c : jv[key]) {
          if (!c.is_string()) {
            throw TensorError("EHR line " + std::to_string(line_no) + ": non-string code in '" +
                              std::string(key) + "'");
          }
          ids.push_back(intern_fn(c.get<std::string>()));
        }
        return sorted_unique(std::move(ids));
      };
      visit.diag = read_codes("diag", [&](const std::string& c) { return data.vocab.intern_diag(c); });
      visit.proc = read_codes("proc", [&](const std::string& c) { return data.vocab.intern_proc(c); });
      visit.med = read_codes("med", [&](const std::string& c) { return data.vocab.intern_med(c); });
      patient.visits.push_back(std::move(visit));
    }

    if (patient.visits.size() < 2) {
      ++data.dropped_single_visit;
      continue;
    }
    data.patients.push_back(std::move(patient));
  }
  return data;
}

DatasetSplit split_dataset(std::vector<PatientRecord> patients, std::uint64_t seed) {
  const std::size_t n = patients.size();
  if (n < 6) {
    throw TensorError("split needs at least 6 patients, got " + std::to_string(n));
  }
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(patients);

  const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) / 6.0));
  const auto n_test = n_val;

  DatasetSplit split;
  split.train.assign(patients.begin(), patients.end() - static_cast<std::ptrdiff_t>(n_val + n_test));
  split.val.assign(patients.end() - static_cast<std::ptrdiff_t>(n_val + n_test),
                   patients.end() - static_cast<std::ptrdiff_t>(n_test));
  split.test.assign(patients.end() - static_cast<std::ptrdiff_t>(n_test), patients.end());
  return split;
}

Tensor multihot(const std::vector<int>& ids, Index size) {
  Tensor t = Tensor::zeros({size});
  for (int id : ids) {
    if (id < 0 || id >= size) {
      throw TensorError("multihot id " + std::to_string(id) + " out of range [0, " +
                        std::to_string(size) + ")");
    }
    t(id) = 1.0;
  }
  return t;
}

std::vector<int> history_med_input(const PatientRecord& patient, int t, const CodeVocab& vocab) {
  if (t < 1 || t > static_cast<int>(patient.visits.size())) {
    throw TensorError("visit index " + std::to_string(t) + " out of range for patient '" +
                      patient.id + "' with " + std::to_string(patient.visits.size()) + " visits");
  }
  if (t == 1) return {vocab.med_pad_id()};
  return patient.visits[static_cast<std::size_t>(t - 2)].med;
}

}  // namespace dkinet
