#include "driveclone/nn/dense.hpp"

#include <algorithm>
#include <cmath>

#include "driveclone/errors.hpp"
#include "driveclone/nn/kernels.hpp"

namespace driveclone::nn {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::linear: return "linear";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
  }
  return "unknown";
}

DenseParams DenseParams::zeros(std::size_t in, std::size_t out) {
  return {Tensor({in, out}), Tensor({out})};
}

DenseParams DenseParams::init(std::size_t in, std::size_t out, Rng& rng) {
  DenseParams p = zeros(in, out);
  const double s = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : p.weight.data()) w = rng.uniform(-s, s);
  return p;
}

Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b, Activation act) {
  if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1 || x.cols() != w.rows() ||
      b.dim(0) != w.cols()) {
    throw ShapeError("dense_forward: incompatible shapes x" + x.shape_string() + " W" +
                     w.shape_string() + " b" + b.shape_string());
  }
  const std::size_t n = x.rows();
  const std::size_t out = w.cols();
  Tensor y({n, out});
  for (std::size_t i = 0; i < n; ++i) std::copy(b.data().begin(), b.data().end(), y.slice(i).begin());
  kernels::gemm_acc(n, x.cols(), out, x.raw(), w.raw(), y.raw());
  switch (act) {
    case Activation::linear: break;
    case Activation::relu:
      for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::tanh:
      for (double& v : y.data()) v = std::tanh(v);
      break;
  }
  return y;
}

Tensor dense_forward(const Tensor& x, const DenseParams& p, Activation act) {
  return dense_forward(x, p.weight, p.bias, act);
}

void dense_backward(const Tensor& x, const DenseParams& p, const Tensor& y, Activation act,
                    Tensor d_y, DenseParams& grads, Tensor* d_x) {
  require_same_shape(y, d_y, "dense_backward");
  switch (act) {
    case Activation::linear: break;
    case Activation::relu:
      for (std::size_t i = 0; i < d_y.size(); ++i) {
        if (!(y[i] > 0.0)) d_y[i] = 0.0;
      }
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < d_y.size(); ++i) d_y[i] *= 1.0 - y[i] * y[i];
      break;
  }
  const std::size_t n = x.rows();
  const std::size_t in = p.in_size();
  const std::size_t out = p.out_size();
  kernels::gemm_tn_acc(n, in, out, x.raw(), d_y.raw(), grads.weight.raw());
  kernels::column_sum_acc(n, out, d_y.raw(), grads.bias.raw());
  if (d_x != nullptr) {
    Tensor wt({out, in});
    kernels::transpose(in, out, p.weight.raw(), wt.raw());
    *d_x = Tensor({n, in});
    kernels::gemm_acc(n, out, in, d_y.raw(), wt.raw(), d_x->raw());
  }
}

}  // namespace driveclone::nn
