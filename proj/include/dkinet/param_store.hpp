#pragma once

#include "dkinet/tensor.hpp"

#include <map>
#include <string>

namespace dkinet {

/// Named trainable tensors. Iteration order is sorted by name, which keeps
/// every consumer (optimizer, serializer, seeding) deterministic.
class ParamStore {
public:
  using Map = std::map<std::string, Tensor>;

  void insert(const std::string& name, Tensor t);
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  const Tensor& at(const std::string& name) const;
  Tensor& at_mut(const std::string& name);

  std::size_t size() const { return params_.size(); }
  Map::const_iterator begin() const { return params_.begin(); }
  Map::const_iterator end() const { return params_.end(); }

  /// Binary container: magic header, count, then per entry
  /// name / rank / dims / row-major float64 payload, little-endian.
  void save(const std::string& path) const;
  static ParamStore load(const std::string& path);

private:
  Map params_;
};

}  // namespace dkinet
