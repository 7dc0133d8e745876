#include "oagrasp/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace oagrasp::ad {

namespace {

[[noreturn]] void shape_error(const std::string& op, const TensorPtr& a,
                              const TensorPtr& b) {
  throw std::invalid_argument(op + ": incompatible shapes " +
                              shape_str(a->shape) +
                              (b ? " and " + shape_str(b->shape) : ""));
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double* Tape::Adjoints::acc(const TensorPtr& t) {
  if (t->is_param()) {
    if (!gate_.contains(t->group)) return nullptr;
    return t->grad.data();
  }
  // Leaf constants and inputs terminate the chain rule; only op outputs
  // carry transient adjoints.
  if (!t->from_op) return nullptr;
  auto& v = map_[t.get()];
  if (v.empty()) v.assign(t->value.size(), 0.0);
  return v.data();
}

const std::vector<double>* Tape::Adjoints::find(const Tensor* t) const {
  auto it = map_.find(t);
  return it == map_.end() ? nullptr : &it->second;
}

void Tape::Adjoints::seed(const TensorPtr& t, double v) {
  auto& buf = map_[t.get()];
  if (buf.empty()) buf.assign(t->value.size(), 0.0);
  buf[0] += v;
}

TensorPtr Tape::record(TensorPtr out, BackwardFn back) {
  out->from_op = true;
  nodes_.push_back(Node{out, std::move(back)});
  return nodes_.back().out;
}

TensorPtr Tape::conv2d(const TensorPtr& x, const TensorPtr& w,
                       const TensorPtr& b, int stride, int pad) {
  if (x->shape.size() != 3 || w->shape.size() != 4 ||
      x->shape[0] != w->shape[1]) {
    shape_error("conv2d", x, w);
  }
  require(stride >= 1 && pad >= 0, "conv2d: bad stride or padding");
  const int cin = x->shape[0], h = x->shape[1], ww = x->shape[2];
  const int cout = w->shape[0], kh = w->shape[2], kw = w->shape[3];
  if (b && (b->shape.size() != 1 || b->shape[0] != cout)) {
    shape_error("conv2d bias", b, w);
  }
  const int oh = (h + 2 * pad - kh) / stride + 1;
  const int ow = (ww + 2 * pad - kw) / stride + 1;
  require(oh > 0 && ow > 0, "conv2d: kernel larger than padded input");

  TensorPtr out = make_tensor({cout, oh, ow});
  const double* xv = x->value.data();
  const double* wv = w->value.data();
  double* ov = out->value.data();
  for (int co = 0; co < cout; ++co) {
    const double bias = b ? b->value[co] : 0.0;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double acc = bias;
        for (int ci = 0; ci < cin; ++ci) {
          const double* xp = xv + ci * h * ww;
          const double* wp = wv + (co * cin + ci) * kh * kw;
          for (int ky = 0; ky < kh; ++ky) {
            const int iy = oy * stride - pad + ky;
            if (iy < 0 || iy >= h) continue;
            const int x0 = ox * stride - pad;
            for (int kx = 0; kx < kw; ++kx) {
              const int ix = x0 + kx;
              if (ix < 0 || ix >= ww) continue;
              acc += xp[iy * ww + ix] * wp[ky * kw + kx];
            }
          }
        }
        ov[(co * oh + oy) * ow + ox] = acc;
      }
    }
  }

  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    double* gx = adj.acc(x);
    double* gw = adj.acc(w);
    double* gb = b ? adj.acc(b) : nullptr;
    const double* xv2 = x->value.data();
    const double* wv2 = w->value.data();
    for (int co = 0; co < cout; ++co) {
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          const double go = g[(co * oh + oy) * ow + ox];
          if (gb) gb[co] += go;
          if (!gx && !gw) continue;
          for (int ci = 0; ci < cin; ++ci) {
            const int xoff = ci * h * ww;
            const int woff = (co * cin + ci) * kh * kw;
            for (int ky = 0; ky < kh; ++ky) {
              const int iy = oy * stride - pad + ky;
              if (iy < 0 || iy >= h) continue;
              const int x0 = ox * stride - pad;
              for (int kx = 0; kx < kw; ++kx) {
                const int ix = x0 + kx;
                if (ix < 0 || ix >= ww) continue;
                const int xi = xoff + iy * ww + ix;
                const int wi = woff + ky * kw + kx;
                if (gw) gw[wi] += go * xv2[xi];
                if (gx) gx[xi] += go * wv2[wi];
              }
            }
          }
        }
      }
    }
  });
}

TensorPtr Tape::linear(const TensorPtr& x, const TensorPtr& w,
                       const TensorPtr& b) {
  if (x->shape.size() != 1 || w->shape.size() != 2 ||
      w->shape[1] != x->shape[0]) {
    shape_error("linear", x, w);
  }
  const int n = x->shape[0], m = w->shape[0];
  if (b && (b->shape.size() != 1 || b->shape[0] != m)) {
    shape_error("linear bias", b, w);
  }

  TensorPtr out = make_tensor({m});
  for (int i = 0; i < m; ++i) {
    double acc = b ? b->value[i] : 0.0;
    const double* row = w->value.data() + i * n;
    for (int j = 0; j < n; ++j) acc += row[j] * x->value[j];
    out->value[i] = acc;
  }

  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    double* gx = adj.acc(x);
    double* gw = adj.acc(w);
    double* gb = b ? adj.acc(b) : nullptr;
    for (int i = 0; i < m; ++i) {
      const double go = g[i];
      if (gb) gb[i] += go;
      const double* row = w->value.data() + i * n;
      for (int j = 0; j < n; ++j) {
        if (gw) gw[i * n + j] += go * x->value[j];
        if (gx) gx[j] += go * row[j];
      }
    }
  });
}

TensorPtr Tape::leaky_relu(const TensorPtr& x, double slope) {
  TensorPtr out = make_tensor(x->shape);
  for (int i = 0; i < x->size(); ++i) {
    const double v = x->value[i];
    out->value[i] = v >= 0.0 ? v : slope * v;
  }
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < x->size(); ++i) {
        gx[i] += g[i] * (x->value[i] >= 0.0 ? 1.0 : slope);
      }
    }
  });
}

TensorPtr Tape::softmax(const TensorPtr& x) {
  require(!x->shape.empty(), "softmax: scalar input");
  const int l = x->shape.back();
  const int rows = x->size() / l;
  TensorPtr out = make_tensor(x->shape);
  for (int r = 0; r < rows; ++r) {
    const double* xr = x->value.data() + r * l;
    double* yr = out->value.data() + r * l;
    double m = xr[0];
    for (int i = 1; i < l; ++i) m = std::max(m, xr[i]);
    double s = 0.0;
    for (int i = 0; i < l; ++i) {
      yr[i] = std::exp(xr[i] - m);
      s += yr[i];
    }
    for (int i = 0; i < l; ++i) yr[i] /= s;
  }
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int r = 0; r < rows; ++r) {
        const double* yr = out->value.data() + r * l;
        const double* gr = g.data() + r * l;
        double dotgy = 0.0;
        for (int i = 0; i < l; ++i) dotgy += gr[i] * yr[i];
        for (int i = 0; i < l; ++i) gx[r * l + i] += yr[i] * (gr[i] - dotgy);
      }
    }
  });
}

TensorPtr Tape::log(const TensorPtr& x) {
  TensorPtr out = make_tensor(x->shape);
  for (int i = 0; i < x->size(); ++i) out->value[i] = std::log(x->value[i]);
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < x->size(); ++i) gx[i] += g[i] / x->value[i];
    }
  });
}

TensorPtr Tape::exp(const TensorPtr& x) {
  TensorPtr out = make_tensor(x->shape);
  for (int i = 0; i < x->size(); ++i) out->value[i] = std::exp(x->value[i]);
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < x->size(); ++i) gx[i] += g[i] * out->value[i];
    }
  });
}

TensorPtr Tape::add(const TensorPtr& a, const TensorPtr& b) {
  if (a->size() != b->size()) shape_error("add", a, b);
  TensorPtr out = make_tensor(a->shape);
  for (int i = 0; i < a->size(); ++i) out->value[i] = a->value[i] + b->value[i];
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* ga = adj.acc(a)) {
      for (int i = 0; i < a->size(); ++i) ga[i] += g[i];
    }
    if (double* gb = adj.acc(b)) {
      for (int i = 0; i < b->size(); ++i) gb[i] += g[i];
    }
  });
}

TensorPtr Tape::sub(const TensorPtr& a, const TensorPtr& b) {
  if (a->size() != b->size()) shape_error("sub", a, b);
  TensorPtr out = make_tensor(a->shape);
  for (int i = 0; i < a->size(); ++i) out->value[i] = a->value[i] - b->value[i];
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* ga = adj.acc(a)) {
      for (int i = 0; i < a->size(); ++i) ga[i] += g[i];
    }
    if (double* gb = adj.acc(b)) {
      for (int i = 0; i < b->size(); ++i) gb[i] -= g[i];
    }
  });
}

TensorPtr Tape::mul(const TensorPtr& a, const TensorPtr& b) {
  if (a->size() != b->size()) shape_error("mul", a, b);
  TensorPtr out = make_tensor(a->shape);
  for (int i = 0; i < a->size(); ++i) out->value[i] = a->value[i] * b->value[i];
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* ga = adj.acc(a)) {
      for (int i = 0; i < a->size(); ++i) ga[i] += g[i] * b->value[i];
    }
    if (double* gb = adj.acc(b)) {
      for (int i = 0; i < b->size(); ++i) gb[i] += g[i] * a->value[i];
    }
  });
}

TensorPtr Tape::scale(const TensorPtr& x, double s) {
  TensorPtr out = make_tensor(x->shape);
  for (int i = 0; i < x->size(); ++i) out->value[i] = x->value[i] * s;
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < x->size(); ++i) gx[i] += g[i] * s;
    }
  });
}

TensorPtr Tape::add_scalar(const TensorPtr& x, double s) {
  TensorPtr out = make_tensor(x->shape);
  for (int i = 0; i < x->size(); ++i) out->value[i] = x->value[i] + s;
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < x->size(); ++i) gx[i] += g[i];
    }
  });
}

TensorPtr Tape::mul_elems(const TensorPtr& x, std::vector<double> weights) {
  if (static_cast<int>(weights.size()) != x->size()) {
    shape_error("mul_elems", x, nullptr);
  }
  TensorPtr out = make_tensor(x->shape);
  for (int i = 0; i < x->size(); ++i) out->value[i] = x->value[i] * weights[i];
  auto w = std::make_shared<std::vector<double>>(std::move(weights));
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < x->size(); ++i) gx[i] += g[i] * (*w)[i];
    }
  });
}

TensorPtr Tape::concat(std::span<const TensorPtr> xs) {
  require(!xs.empty(), "concat: no inputs");
  int total = 0;
  for (const TensorPtr& t : xs) total += t->size();
  TensorPtr out = make_tensor({total});
  int off = 0;
  for (const TensorPtr& t : xs) {
    std::copy(t->value.begin(), t->value.end(), out->value.begin() + off);
    off += t->size();
  }
  std::vector<TensorPtr> inputs(xs.begin(), xs.end());
  return record(out, [inputs](const std::vector<double>& g, Adjoints& adj) {
    int off2 = 0;
    for (const TensorPtr& t : inputs) {
      if (double* gt = adj.acc(t)) {
        for (int i = 0; i < t->size(); ++i) gt[i] += g[off2 + i];
      }
      off2 += t->size();
    }
  });
}

TensorPtr Tape::crop3x3(const TensorPtr& x, int ci, int cj) {
  require(x->shape.size() == 3, "crop3x3: input must be [C,H,W]");
  const int c = x->shape[0], h = x->shape[1], w = x->shape[2];
  require(ci >= 0 && ci < h && cj >= 0 && cj < w, "crop3x3: center out of range");
  TensorPtr out = make_tensor({c, 3, 3});
  for (int ch = 0; ch < c; ++ch) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int iy = ci + dy;
        const int ix = cj + dx;
        const double v = (iy < 0 || iy >= h || ix < 0 || ix >= w)
                             ? 0.0
                             : x->value[(ch * h + iy) * w + ix];
        out->value[(ch * 3 + dy + 1) * 3 + dx + 1] = v;
      }
    }
  }
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int ch = 0; ch < c; ++ch) {
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int iy = ci + dy;
            const int ix = cj + dx;
            if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
            gx[(ch * h + iy) * w + ix] += g[(ch * 3 + dy + 1) * 3 + dx + 1];
          }
        }
      }
    }
  });
}

TensorPtr Tape::flatten(const TensorPtr& x) {
  TensorPtr out = make_tensor({x->size()}, x->value);
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < x->size(); ++i) gx[i] += g[i];
    }
  });
}

TensorPtr Tape::gather(const TensorPtr& x, std::vector<int> indices,
                       std::vector<int> out_shape) {
  const int n = static_cast<int>(indices.size());
  if (out_shape.empty()) out_shape = {n};
  require(shape_size(out_shape) == n, "gather: out_shape mismatch");
  TensorPtr out = make_tensor(std::move(out_shape));
  for (int i = 0; i < n; ++i) {
    require(indices[i] >= 0 && indices[i] < x->size(),
            "gather: index out of range");
    out->value[i] = x->value[indices[i]];
  }
  auto idx = std::make_shared<std::vector<int>>(std::move(indices));
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < n; ++i) gx[(*idx)[i]] += g[i];
    }
  });
}

TensorPtr Tape::slot_embed(const TensorPtr& delta, int k, int a) {
  require(delta->size() == 5, "slot_embed: delta must have 5 entries");
  require(a >= 0 && a < k, "slot_embed: anchor slot out of range");
  TensorPtr out = make_tensor({5 * k});
  for (int m = 0; m < 5; ++m) out->value[5 * a + m] = delta->value[m];
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gd = adj.acc(delta)) {
      for (int m = 0; m < 5; ++m) gd[m] += g[5 * a + m];
    }
  });
}

TensorPtr Tape::clamp(const TensorPtr& x, double lo, double hi) {
  require(lo < hi, "clamp: lo must be < hi");
  TensorPtr out = make_tensor(x->shape);
  for (int i = 0; i < x->size(); ++i) {
    out->value[i] = std::min(std::max(x->value[i], lo), hi);
  }
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < x->size(); ++i) {
        const double v = x->value[i];
        if (v > lo && v < hi) gx[i] += g[i];
      }
    }
  });
}

TensorPtr Tape::smooth_l1(const TensorPtr& x) {
  TensorPtr out = make_tensor(x->shape);
  for (int i = 0; i < x->size(); ++i) {
    const double v = x->value[i];
    const double av = std::fabs(v);
    out->value[i] = av < 1.0 ? 0.5 * v * v : av - 0.5;
  }
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < x->size(); ++i) {
        const double v = x->value[i];
        const double d = std::fabs(v) < 1.0 ? v : (v > 0.0 ? 1.0 : -1.0);
        gx[i] += g[i] * d;
      }
    }
  });
}

TensorPtr Tape::sum(const TensorPtr& x) {
  double s = 0.0;
  for (double v : x->value) s += v;
  TensorPtr out = make_scalar(s);
  return record(out, [=](const std::vector<double>& g, Adjoints& adj) {
    if (double* gx = adj.acc(x)) {
      for (int i = 0; i < x->size(); ++i) gx[i] += g[0];
    }
  });
}

void Tape::backward(const TensorPtr& loss, GateSet gate, double seed) {
  if (!loss || loss->size() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar tensor");
  }
  Adjoints adj(gate);
  adj.seed(loss, seed);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    const std::vector<double>* g = adj.find(it->out.get());
    if (!g) continue;
    it->back(*g, adj);
  }
}

}  // namespace oagrasp::ad
