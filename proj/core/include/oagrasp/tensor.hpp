#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

namespace oagrasp::ad {

// Trainable parameters belong to exactly one of these groups; losses gate
// which groups receive gradient during backward.
enum class Group : std::uint8_t { None = 0, FE = 1, PGP = 2, Scorer = 3 };

const char* group_name(Group g);
Group group_from_name(const std::string& name);

class GateSet {
 public:
  constexpr GateSet() = default;

  static constexpr GateSet all() { return GateSet(0b1110); }
  static GateSet of(std::initializer_list<Group> groups) {
    GateSet s;
    for (Group g : groups) s.add(g);
    return s;
  }

  GateSet& add(Group g) {
    mask_ |= bit(g);
    return *this;
  }
  constexpr bool contains(Group g) const { return (mask_ & bit(g)) != 0; }

 private:
  constexpr explicit GateSet(std::uint8_t mask) : mask_(mask) {}
  static constexpr std::uint8_t bit(Group g) {
    return static_cast<std::uint8_t>(1u << static_cast<std::uint8_t>(g));
  }
  std::uint8_t mask_ = 0;
};

// Dense row-major 64-bit tensor. Gradients live alongside values for
// parameters; intermediates get transient adjoints during backward.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;  // sized for parameters, empty otherwise
  Group group = Group::None;
  std::string name;
  bool from_op = false;  // true when produced by a tape op

  int size() const { return static_cast<int>(value.size()); }
  bool is_param() const { return group != Group::None; }
  double scalar() const;
};

using TensorPtr = std::shared_ptr<Tensor>;

int shape_size(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

TensorPtr make_tensor(std::vector<int> shape);
TensorPtr make_tensor(std::vector<int> shape, std::vector<double> value);
TensorPtr make_scalar(double v);

// Registry of every trainable tensor. Creation assigns the group; the
// registry is the single source for optimizer steps and checkpoints.
class ParamSet {
 public:
  TensorPtr create(const std::string& name, Group group,
                   std::vector<int> shape);
  void zero_grad();
  const std::vector<TensorPtr>& all() const { return params_; }
  TensorPtr find(const std::string& name) const;
  int total_size() const;

 private:
  std::vector<TensorPtr> params_;
};

}  // namespace oagrasp::ad
