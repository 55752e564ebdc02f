#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fedrl/errors.hpp"
#include "fedrl/nn/param_vector.hpp"
#include "fedrl/rng.hpp"

namespace fedrl::nn {

// How the last layer's pre-activations are exposed. Logits and linear heads
// are both the raw affine output; the distinction matters to the agent that
// interprets them. Bounded heads squash through a logistic into (0,1).
enum class Head { kLogits, kLinear, kBounded };

struct MlpSpec {
  std::uint32_t input_dim = 4;
  std::vector<std::uint32_t> hidden{64, 64};
  std::uint32_t output_dim = 1;
  Head head = Head::kLinear;

  Layout layout() const {
    Layout l{input_dim};
    l.insert(l.end(), hidden.begin(), hidden.end());
    l.push_back(output_dim);
    return l;
  }

  void validate() const {
    if (input_dim == 0 || output_dim == 0) throw ContractError("MlpSpec: zero dimension");
    for (auto h : hidden)
      if (h == 0) throw ContractError("MlpSpec: zero hidden width");
  }
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases; the output
// layer is further scaled by `output_scale` so fresh policies start close to
// uniform.
inline ParamVector init_params(const MlpSpec& spec, Rng& rng, double output_scale = 1.0) {
  spec.validate();
  ParamVector p(spec.layout());
  const auto& dims = p.layout;
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t in = dims[l], out = dims[l + 1];
    double bound = 1.0 / std::sqrt(static_cast<double>(in));
    if (l + 2 == dims.size()) bound *= output_scale;
    for (std::size_t i = 0; i < (in + 1) * out; ++i) p.values[offset + i] = rng.uniform(-bound, bound);
    offset += (in + 1) * out;
  }
  return p;
}

// Row-major rows x cols block; one row per sample.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  void resize(std::size_t r, std::size_t c) {
    rows = r;
    cols = c;
    data.assign(r * c, 0.0);
  }
  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Activations of every layer; act[0] is the input batch, act[L] the output.
struct BatchTrace {
  std::vector<Matrix> act;
};

namespace detail {

inline void check_layout(const MlpSpec& spec, const ParamVector& params) {
  const auto& l = params.layout;
  bool ok = l.size() == spec.hidden.size() + 2 && l.front() == spec.input_dim &&
            l.back() == spec.output_dim;
  for (std::size_t i = 0; ok && i < spec.hidden.size(); ++i) ok = l[i + 1] == spec.hidden[i];
  if (!ok) throw ContractError("mlp: parameter layout does not match spec");
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Y = X W + b for W stored input-major. Tiles of 4 rows x 4 outputs are
// accumulated in registers; every entry still sums over inputs in order.
inline void affine(const Matrix& x, const double* w, std::size_t out, Matrix& y) {
  const std::size_t in = x.cols, n = x.rows;
  const double* b = w + in * out;
  y.rows = n;
  y.cols = out;
  y.data.resize(n * out);
  std::size_t r = 0;
  for (; r + 4 <= n; r += 4) {
    const double* x0 = x.row(r);
    const double* x1 = x0 + in;
    const double* x2 = x1 + in;
    const double* x3 = x2 + in;
    std::size_t o = 0;
    for (; o + 4 <= out; o += 4) {
      double a[4][4];
      for (int c = 0; c < 4; ++c) a[0][c] = a[1][c] = a[2][c] = a[3][c] = b[o + c];
      for (std::size_t i = 0; i < in; ++i) {
        const double* col = w + i * out + o;
        const double v0 = x0[i], v1 = x1[i], v2 = x2[i], v3 = x3[i];
        for (int c = 0; c < 4; ++c) {
          a[0][c] += col[c] * v0;
          a[1][c] += col[c] * v1;
          a[2][c] += col[c] * v2;
          a[3][c] += col[c] * v3;
        }
      }
      for (int k = 0; k < 4; ++k)
        for (int c = 0; c < 4; ++c) y(r + k, o + c) = a[k][c];
    }
    for (; o < out; ++o)
      for (std::size_t k = 0; k < 4; ++k) {
        const double* xr = x.row(r + k);
        double acc = b[o];
        for (std::size_t i = 0; i < in; ++i) acc += w[i * out + o] * xr[i];
        y(r + k, o) = acc;
      }
  }
  for (; r < n; ++r) {
    double* yr = y.row(r);
    const double* xr = x.row(r);
    std::copy(b, b + out, yr);
    for (std::size_t i = 0; i < in; ++i) {
      const double* col = w + i * out;
      const double xi = xr[i];
      for (std::size_t o = 0; o < out; ++o) yr[o] += col[o] * xi;
    }
  }
}

// dX = dY W^T, four partial sums per dot product.
inline void affine_input_grad(const Matrix& dy, const double* w, std::size_t in, Matrix& dx) {
  const std::size_t out = dy.cols, n = dy.rows;
  dx.rows = n;
  dx.cols = in;
  dx.data.resize(n * in);
  for (std::size_t r = 0; r < n; ++r) {
    const double* d = dy.row(r);
    double* g = dx.row(r);
    for (std::size_t i = 0; i < in; ++i) {
      const double* col = w + i * out;
      double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
      std::size_t o = 0;
      for (; o + 4 <= out; o += 4) {
        a0 += col[o] * d[o];
        a1 += col[o + 1] * d[o + 1];
        a2 += col[o + 2] * d[o + 2];
        a3 += col[o + 3] * d[o + 3];
      }
      for (; o < out; ++o) a0 += col[o] * d[o];
      g[i] = (a0 + a1) + (a2 + a3);
    }
  }
}

// G += X^T D with G stored like the weights; rows are summed in order.
inline void accumulate_outer(const Matrix& x, const Matrix& d, double* g) {
  const std::size_t in = x.cols, out = d.cols, n = x.rows;
  std::size_t i = 0;
  for (; i + 4 <= in; i += 4) {
    std::size_t o = 0;
    for (; o + 4 <= out; o += 4) {
      double a[4][4];
      for (int k = 0; k < 4; ++k)
        for (int c = 0; c < 4; ++c) a[k][c] = g[(i + k) * out + o + c];
      for (std::size_t r = 0; r < n; ++r) {
        const double* xr = x.row(r) + i;
        const double* dr = d.row(r) + o;
        for (int k = 0; k < 4; ++k)
          for (int c = 0; c < 4; ++c) a[k][c] += dr[c] * xr[k];
      }
      for (int k = 0; k < 4; ++k)
        for (int c = 0; c < 4; ++c) g[(i + k) * out + o + c] = a[k][c];
    }
    for (; o < out; ++o)
      for (std::size_t k = 0; k < 4; ++k) {
        double acc = g[(i + k) * out + o];
        for (std::size_t r = 0; r < n; ++r) acc += d(r, o) * x(r, i + k);
        g[(i + k) * out + o] = acc;
      }
  }
  for (; i < in; ++i) {
    double* gcol = g + i * out;
    for (std::size_t r = 0; r < n; ++r) {
      const double xi = x(r, i);
      const double* dr = d.row(r);
      for (std::size_t o = 0; o < out; ++o) gcol[o] += dr[o] * xi;
    }
  }
}

}  // namespace detail

inline std::vector<std::size_t> layer_offsets(const Layout& dims) {
  std::vector<std::size_t> off(dims.size(), 0);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) off[l + 1] = off[l] + (dims[l] + 1) * dims[l + 1];
  return off;
}

inline void forward_batch(const MlpSpec& spec, const ParamVector& params, const Matrix& input,
                          BatchTrace& trace) {
  detail::check_layout(spec, params);
  if (input.cols != spec.input_dim) throw ContractError("mlp: input dimension mismatch");
  const auto& dims = params.layout;
  const std::size_t layers = dims.size() - 1;
  trace.act.resize(layers + 1);
  trace.act[0] = input;
  const double* w = params.values.data();
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = dims[l], out = dims[l + 1];
    Matrix& y = trace.act[l + 1];
    detail::affine(trace.act[l], w, out, y);
    if (l + 1 < layers) {
      for (auto& v : y.data) v = std::tanh(v);
    } else if (spec.head == Head::kBounded) {
      for (auto& v : y.data) v = detail::logistic(v);
    }
    w += (in + 1) * out;
  }
}

inline Matrix forward_batch(const MlpSpec& spec, const ParamVector& params, const Matrix& input) {
  BatchTrace trace;
  forward_batch(spec, params, input, trace);
  return std::move(trace.act.back());
}

// Reverse pass over a batch trace. Adds sum_r d(output_r . output_grad_r)/d(params)
// into `grad` when non-null (rows accumulated in order) and writes the
// per-row input gradient into `input_grad` when non-null.
inline void backward_batch(const MlpSpec& spec, const ParamVector& params, const BatchTrace& trace,
                           const Matrix& output_grad, ParamVector* grad, Matrix* input_grad) {
  const auto& dims = params.layout;
  const std::size_t layers = dims.size() - 1;
  const std::size_t n = trace.act.at(0).rows;
  if (output_grad.cols != dims.back() || output_grad.rows != n)
    throw ContractError("mlp: output gradient shape mismatch");
  if (grad) require_same_layout(params, *grad, "mlp backward");
  const auto offset = layer_offsets(dims);

  Matrix delta = output_grad;
  if (spec.head == Head::kBounded) {
    const auto& y = trace.act[layers].data;
    for (std::size_t k = 0; k < delta.data.size(); ++k) delta.data[k] *= y[k] * (1.0 - y[k]);
  }

  Matrix upstream;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = dims[l], out = dims[l + 1];
    const double* w = params.values.data() + offset[l];
    const Matrix& x = trace.act[l];
    if (grad) {
      double* gw = grad->values.data() + offset[l];
      double* gb = gw + in * out;
      detail::accumulate_outer(x, delta, gw);
      for (std::size_t r = 0; r < n; ++r) {
        const double* d = delta.row(r);
        for (std::size_t o = 0; o < out; ++o) gb[o] += d[o];
      }
    }
    if (l == 0 && !input_grad) break;
    detail::affine_input_grad(delta, w, in, upstream);
    if (l == 0) {
      *input_grad = std::move(upstream);
      break;
    }
    // tanh' = 1 - tanh^2 at the stored activation.
    for (std::size_t k = 0; k < upstream.data.size(); ++k) upstream.data[k] *= 1.0 - x.data[k] * x.data[k];
    std::swap(delta, upstream);
  }
}

// Single-sample views over the batch kernels.
struct ForwardTrace {
  BatchTrace batch;
  std::span<const double> output() const { return batch.act.back().data; }
};

inline Matrix row_matrix(std::span<const double> v) {
  Matrix m(1, v.size());
  std::copy(v.begin(), v.end(), m.data.begin());
  return m;
}

inline void forward_trace(const MlpSpec& spec, const ParamVector& params,
                          std::span<const double> input, ForwardTrace& trace) {
  if (input.size() != spec.input_dim) throw ContractError("mlp: input dimension mismatch");
  forward_batch(spec, params, row_matrix(input), trace.batch);
}

inline std::vector<double> forward(const MlpSpec& spec, const ParamVector& params,
                                   std::span<const double> input) {
  ForwardTrace trace;
  forward_trace(spec, params, input, trace);
  return std::move(trace.batch.act.back().data);
}

inline void backward_accumulate(const MlpSpec& spec, const ParamVector& params,
                                const ForwardTrace& trace, std::span<const double> output_grad,
                                ParamVector* grad, std::span<double> input_grad = {}) {
  if (output_grad.size() != params.layout.back())
    throw ContractError("mlp: output gradient size mismatch");
  if (!input_grad.empty() && input_grad.size() != params.layout.front())
    throw ContractError("mlp: input gradient size mismatch");
  Matrix dx;
  backward_batch(spec, params, trace.batch, row_matrix(output_grad), grad,
                 input_grad.empty() ? nullptr : &dx);
  if (!input_grad.empty()) std::copy(dx.data.begin(), dx.data.end(), input_grad.begin());
}

inline void backward_accumulate(const MlpSpec& spec, const ParamVector& params,
                                const ForwardTrace& trace, std::span<const double> output_grad,
                                ParamVector& grad, std::span<double> input_grad = {}) {
  backward_accumulate(spec, params, trace, output_grad, &grad, input_grad);
}

struct Gradients {
  ParamVector params;
  std::vector<double> input;
};

inline Gradients backward(const MlpSpec& spec, const ParamVector& params,
                          std::span<const double> input, std::span<const double> output_grad) {
  ForwardTrace trace;
  forward_trace(spec, params, input, trace);
  Gradients g{ParamVector(params.layout), std::vector<double>(input.size(), 0.0)};
  backward_accumulate(spec, params, trace, output_grad, &g.params, g.input);
  return g;
}

}  // namespace fedrl::nn
