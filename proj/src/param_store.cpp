#include "dkinet/param_store.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace dkinet {

namespace {

constexpr char kMagic[8] = {'D', 'K', 'P', 'S', '0', '0', '0', '1'};

template <class T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw TensorError("truncated parameter file");
  return v;
}

}  // namespace

void ParamStore::insert(const std::string& name, Tensor t) {
  if (params_.count(name)) throw TensorError("duplicate parameter '" + name + "'");
  params_.emplace(name, std::move(t));
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw TensorError("unknown parameter '" + name + "'");
  return it->second;
}

Tensor& ParamStore::at_mut(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw TensorError("unknown parameter '" + name + "'");
  return it->second;
}

void ParamStore::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw TensorError("cannot write parameter file '" + path + "'");
  os.write(kMagic, sizeof(kMagic));
  write_pod<std::uint64_t>(os, params_.size());
  for (const auto& [name, t] : params_) {
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.rank()));
    for (Index d : t.shape()) write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(d));
    os.write(reinterpret_cast<const char*>(t.array().data()),
             static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!os) throw TensorError("write failed for parameter file '" + path + "'");
}

ParamStore ParamStore::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TensorError("cannot open parameter file '" + path + "'");
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw TensorError("'" + path + "' is not a parameter file (bad magic)");
  }
  ParamStore store;
  auto count = read_pod<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto name_len = read_pod<std::uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    auto rank = read_pod<std::uint32_t>(is);
    if (rank > 2) throw TensorError("corrupt parameter file: rank " + std::to_string(rank));
    std::vector<Index> shape;
    Index total = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      auto d = static_cast<Index>(read_pod<std::uint64_t>(is));
      shape.push_back(d);
      total *= d;
    }
    ArrayX data(total);
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(total * sizeof(double)));
    if (!is) throw TensorError("truncated parameter file '" + path + "'");
    store.insert(name, Tensor(std::move(shape), std::move(data)));
  }
  return store;
}

}  // namespace dkinet
