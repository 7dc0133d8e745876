#pragma once

#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "oagrasp/tensor.hpp"

namespace oagrasp::ad {

// Reverse-mode tape over dense tensors. Every op records a node; backward
// replays them in reverse creation order. Gradients always propagate through
// the graph -- gating decides only whether a parameter's own grad buffer
// accumulates, so a frozen group still conducts the chain rule to everything
// upstream of it.
class Tape {
 public:
  // Transient adjoint storage for one backward pass.
  class Adjoints {
   public:
    explicit Adjoints(GateSet gate) : gate_(gate) {}

    // Buffer to accumulate into, or nullptr when the target is a gated-out
    // parameter or a leaf nobody differentiates.
    double* acc(const TensorPtr& t);
    const std::vector<double>* find(const Tensor* t) const;
    void seed(const TensorPtr& t, double v);

   private:
    GateSet gate_;
    std::unordered_map<const Tensor*, std::vector<double>> map_;
  };

  // --- forward ops ----------------------------------------------------
  // x: [Cin,H,W], w: [Cout,Cin,kh,kw], b: [Cout] (may be null).
  TensorPtr conv2d(const TensorPtr& x, const TensorPtr& w, const TensorPtr& b,
                   int stride, int pad);
  // x: [N], w: [M,N], b: [M] (may be null) -> [M].
  TensorPtr linear(const TensorPtr& x, const TensorPtr& w, const TensorPtr& b);
  TensorPtr leaky_relu(const TensorPtr& x, double slope);
  TensorPtr softmax(const TensorPtr& x);  // over the last axis
  TensorPtr log(const TensorPtr& x);
  TensorPtr exp(const TensorPtr& x);
  TensorPtr add(const TensorPtr& a, const TensorPtr& b);
  TensorPtr sub(const TensorPtr& a, const TensorPtr& b);
  TensorPtr mul(const TensorPtr& a, const TensorPtr& b);
  TensorPtr scale(const TensorPtr& x, double s);
  TensorPtr add_scalar(const TensorPtr& x, double s);
  // Elementwise product with a constant weight vector.
  TensorPtr mul_elems(const TensorPtr& x, std::vector<double> weights);
  TensorPtr concat(std::span<const TensorPtr> xs);  // 1-D concatenation
  // 3x3 spatial window of a [C,H,W] map centered on (ci, cj), zero-padded at
  // the borders -> [C,3,3].
  TensorPtr crop3x3(const TensorPtr& x, int ci, int cj);
  TensorPtr flatten(const TensorPtr& x);
  // y[t] = x.value[indices[t]]; duplicate indices accumulate on backward.
  TensorPtr gather(const TensorPtr& x, std::vector<int> indices,
                   std::vector<int> out_shape = {});
  // Writes a 5-vector into slot `a` of a zeroed 5k-vector.
  TensorPtr slot_embed(const TensorPtr& delta, int k, int a);
  TensorPtr clamp(const TensorPtr& x, double lo, double hi);
  // 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise.
  TensorPtr smooth_l1(const TensorPtr& x);
  TensorPtr sum(const TensorPtr& x);  // -> scalar

  // --- backward --------------------------------------------------------
  // Accumulates d(seed * loss)/d(param) into every parameter whose group is
  // in `gate`. Throws unless loss is a scalar.
  void backward(const TensorPtr& loss, GateSet gate, double seed = 1.0);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  using BackwardFn =
      std::function<void(const std::vector<double>& out_adj, Adjoints& adj)>;
  struct Node {
    TensorPtr out;
    BackwardFn back;
  };

  TensorPtr record(TensorPtr out, BackwardFn back);
  std::vector<Node> nodes_;
};

}  // namespace oagrasp::ad
