#pragma once

#include "dkinet/autograd.hpp"
#include "dkinet/param_store.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dkinet {

/// Adam with bias correction. Moment tensors are created lazily per
/// parameter; one step counter covers the whole instance.
class Adam {
public:
  struct Config {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  Adam() = default;
  explicit Adam(Config cfg) : cfg_(cfg) {}

  /// Applies one update to every parameter in `names`. A gradient must be
  /// present for each, with matching shape.
  void step(ParamStore& params, const ag::GradMap& grads, const std::vector<std::string>& names);

  std::int64_t step_count() const { return step_; }
  const Config& config() const { return cfg_; }

private:
  Config cfg_;
  std::int64_t step_ = 0;
  std::map<std::string, Tensor> m_;
  std::map<std::string, Tensor> v_;
};

}  // namespace dkinet
