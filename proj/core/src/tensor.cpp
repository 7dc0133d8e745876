#include "oagrasp/tensor.hpp"

#include <algorithm>
#include <stdexcept>

namespace oagrasp::ad {

const char* group_name(Group g) {
  switch (g) {
    case Group::None: return "none";
    case Group::FE: return "fe";
    case Group::PGP: return "pgp";
    case Group::Scorer: return "scorer";
  }
  return "?";
}

Group group_from_name(const std::string& name) {
  if (name == "fe") return Group::FE;
  if (name == "pgp") return Group::PGP;
  if (name == "scorer") return Group::Scorer;
  if (name == "none") return Group::None;
  throw std::invalid_argument("unknown parameter group: " + name);
}

double Tensor::scalar() const {
  if (value.size() != 1) {
    throw std::logic_error("scalar() on tensor of shape " + shape_str(shape));
  }
  return value[0];
}

int shape_size(const std::vector<int>& shape) {
  int n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("non-positive tensor extent");
    n *= d;
  }
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

TensorPtr make_tensor(std::vector<int> shape) {
  auto t = std::make_shared<Tensor>();
  const int n = shape_size(shape);
  t->shape = std::move(shape);
  t->value.assign(n, 0.0);
  return t;
}

TensorPtr make_tensor(std::vector<int> shape, std::vector<double> value) {
  const int n = shape_size(shape);
  if (n != static_cast<int>(value.size())) {
    throw std::invalid_argument("make_tensor: value length does not match shape");
  }
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->value = std::move(value);
  return t;
}

TensorPtr make_scalar(double v) { return make_tensor({1}, {v}); }

TensorPtr ParamSet::create(const std::string& name, Group group,
                           std::vector<int> shape) {
  if (group == Group::None) {
    throw std::invalid_argument("parameter " + name + " requires a group");
  }
  if (find(name)) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  TensorPtr t = make_tensor(std::move(shape));
  t->group = group;
  t->name = name;
  t->grad.assign(t->value.size(), 0.0);
  params_.push_back(t);
  return t;
}

void ParamSet::zero_grad() {
  for (const TensorPtr& p : params_) {
    std::fill(p->grad.begin(), p->grad.end(), 0.0);
  }
}

TensorPtr ParamSet::find(const std::string& name) const {
  for (const TensorPtr& p : params_) {
    if (p->name == name) return p;
  }
  return nullptr;
}

int ParamSet::total_size() const {
  int n = 0;
  for (const TensorPtr& p : params_) n += p->size();
  return n;
}

}  // namespace oagrasp::ad
