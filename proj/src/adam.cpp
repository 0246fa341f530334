#include "dkinet/adam.hpp"

#include <cmath>

namespace dkinet {

void Adam::step(ParamStore& params, const ag::GradMap& grads,
                const std::vector<std::string>& names) {
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (const std::string& name : names) {
    Tensor& p = params.at_mut(name);
    auto git = grads.find(name);
    if (git == grads.end()) throw TensorError("adam: no gradient for '" + name + "'");
    const Tensor& g = git->second;
    if (!g.same_shape(p)) {
      throw TensorError("adam: gradient shape " + g.shape_str() + " does not match parameter '" +
                        name + "' " + p.shape_str());
    }
    auto mit = m_.find(name);
    if (mit == m_.end()) {
      mit = m_.emplace(name, Tensor::zeros(p.shape())).first;
      v_.emplace(name, Tensor::zeros(p.shape()));
    }
    ArrayX& m = mit->second.array();
    ArrayX& v = v_.at(name).array();
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g.array();
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.array().square();
    p.array() -= cfg_.lr * (m / bc1) / ((v / bc2).sqrt() + cfg_.eps);
    p.ensure_finite("adam update of '" + name + "'");
  }
}

}  // namespace dkinet
