#include "driveclone/nn/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "driveclone/errors.hpp"
#include "driveclone/nn/kernels.hpp"

namespace driveclone::nn {
namespace {

inline double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require_rows(const Tensor& t, std::size_t rows, std::size_t cols, const char* what) {
  if (t.rank() != 2 || t.rows() != rows || t.cols() != cols) {
    throw ShapeError(std::string(what) + ": expected " + shape_string({rows, cols}) + ", got " +
                     t.shape_string());
  }
}

}  // namespace

LstmCellParams LstmCellParams::zeros(std::size_t input_size, std::size_t hidden_size) {
  return {Tensor({input_size, 4 * hidden_size}), Tensor({hidden_size, 4 * hidden_size}),
          Tensor({4 * hidden_size})};
}

LstmCellParams LstmCellParams::init(std::size_t input_size, std::size_t hidden_size, Rng& rng) {
  LstmCellParams p = zeros(input_size, hidden_size);
  const double s = 1.0 / std::sqrt(static_cast<double>(input_size + hidden_size));
  for (double& w : p.input_weight.data()) w = rng.uniform(-s, s);
  for (double& w : p.recurrent_weight.data()) w = rng.uniform(-s, s);
  for (std::size_t j = hidden_size; j < 2 * hidden_size; ++j) p.bias[j] = 1.0;
  return p;
}

void LstmCellParams::validate() const {
  if (input_weight.rank() != 2 || recurrent_weight.rank() != 2 || bias.rank() != 1) {
    throw ShapeError("lstm params must be W[I x 4H], U[H x 4H], b[4H]");
  }
  const std::size_t h = recurrent_weight.rows();
  if (h == 0 || recurrent_weight.cols() != 4 * h || input_weight.cols() != 4 * h ||
      bias.dim(0) != 4 * h) {
    throw ShapeError("lstm params inconsistent: W" + input_weight.shape_string() + " U" +
                     recurrent_weight.shape_string() + " b" + bias.shape_string());
  }
}

void LstmUnroll::prepare(const LstmCellParams& p, std::size_t batch, std::size_t steps,
                         const Tensor* h0, const Tensor* c0) {
  p.validate();
  if (steps == 0) throw ShapeError("lstm unroll needs at least one step");
  batch_ = batch;
  hidden_size_ = p.hidden_size();
  input_size_ = p.input_size();
  if (h0 != nullptr) require_rows(*h0, batch, hidden_size_, "lstm h0");
  if (c0 != nullptr) require_rows(*c0, batch, hidden_size_, "lstm c0");
  h0_ = h0 != nullptr ? *h0 : Tensor({batch, hidden_size_});
  c0_ = c0 != nullptr ? *c0 : Tensor({batch, hidden_size_});
  gates_.assign(steps, Tensor());
  cell_.assign(steps, Tensor());
  tanh_cell_.assign(steps, Tensor());
  hidden_.assign(steps, Tensor());
}

void LstmUnroll::step(const LstmCellParams& p, std::size_t t, const Tensor& base) {
  const std::size_t b = batch_;
  const std::size_t h = hidden_size_;
  const std::size_t g4 = 4 * h;
  Tensor z = base;
  const Tensor& h_prev = t == 0 ? h0_ : hidden_[t - 1];
  const Tensor& c_prev = t == 0 ? c0_ : cell_[t - 1];
  kernels::gemm_acc(b, h, g4, h_prev.raw(), p.recurrent_weight.raw(), z.raw());

  Tensor c({b, h});
  Tensor tc({b, h});
  Tensor hn({b, h});
  for (std::size_t r = 0; r < b; ++r) {
    double* zr = z.raw() + r * g4;
    for (std::size_t j = 0; j < h; ++j) {
      const double i = sigmoid(zr[j]);
      const double f = sigmoid(zr[h + j]);
      const double g = std::tanh(zr[2 * h + j]);
      const double o = sigmoid(zr[3 * h + j]);
      zr[j] = i;
      zr[h + j] = f;
      zr[2 * h + j] = g;
      zr[3 * h + j] = o;
      const double cn = f * c_prev(r, j) + i * g;
      const double t_c = std::tanh(cn);
      c(r, j) = cn;
      tc(r, j) = t_c;
      hn(r, j) = o * t_c;
    }
  }
  gates_[t] = std::move(z);
  cell_[t] = std::move(c);
  tanh_cell_[t] = std::move(tc);
  hidden_[t] = std::move(hn);
}

void LstmUnroll::forward(const LstmCellParams& p, std::span<const Tensor> inputs, const Tensor* h0,
                         const Tensor* c0) {
  if (inputs.empty()) throw ShapeError("lstm forward: empty input sequence");
  const std::size_t b = inputs.front().rank() == 2 ? inputs.front().rows() : 0;
  prepare(p, b, inputs.size(), h0, c0);
  repeated_ = false;
  inputs_.assign(inputs.begin(), inputs.end());
  const std::size_t g4 = 4 * hidden_size_;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    require_rows(inputs[t], b, input_size_, "lstm input");
    Tensor base({b, g4});
    for (std::size_t r = 0; r < b; ++r) std::copy_n(p.bias.raw(), g4, base.raw() + r * g4);
    kernels::gemm_acc(b, input_size_, g4, inputs[t].raw(), p.input_weight.raw(), base.raw());
    step(p, t, base);
  }
}

void LstmUnroll::forward_repeated(const LstmCellParams& p, const Tensor& input, std::size_t steps,
                                  const Tensor* h0, const Tensor* c0) {
  const std::size_t b = input.rank() == 2 ? input.rows() : 0;
  prepare(p, b, steps, h0, c0);
  require_rows(input, b, input_size_, "lstm repeated input");
  repeated_ = true;
  inputs_.assign(1, input);
  const std::size_t g4 = 4 * hidden_size_;
  Tensor base({b, g4});
  for (std::size_t r = 0; r < b; ++r) std::copy_n(p.bias.raw(), g4, base.raw() + r * g4);
  kernels::gemm_acc(b, input_size_, g4, input.raw(), p.input_weight.raw(), base.raw());
  for (std::size_t t = 0; t < steps; ++t) step(p, t, base);
}

void LstmUnroll::backward(const LstmCellParams& p, std::span<const Tensor> d_hidden,
                          const Tensor* d_h_last, const Tensor* d_c_last, LstmCellParams& grads,
                          Gradients& out, bool want_input_grads) const {
  const std::size_t b = batch_;
  const std::size_t h = hidden_size_;
  const std::size_t g4 = 4 * h;
  const std::size_t in = input_size_;
  const std::size_t steps = hidden_.size();
  if (!d_hidden.empty() && d_hidden.size() != steps) {
    throw ShapeError("lstm backward: expected " + std::to_string(steps) + " hidden gradients");
  }

  Tensor ut({g4, h});
  kernels::transpose(h, g4, p.recurrent_weight.raw(), ut.raw());
  Tensor wt;
  if (want_input_grads) {
    wt = Tensor({g4, in});
    kernels::transpose(in, g4, p.input_weight.raw(), wt.raw());
  }

  Tensor dh = d_h_last != nullptr ? *d_h_last : Tensor({b, h});
  Tensor dc = d_c_last != nullptr ? *d_c_last : Tensor({b, h});
  Tensor dz({b, g4});
  Tensor dz_sum;
  if (repeated_) dz_sum = Tensor({b, g4});
  out.d_inputs.clear();
  if (!repeated_ && want_input_grads) out.d_inputs.assign(steps, Tensor());

  for (std::size_t t = steps; t-- > 0;) {
    if (!d_hidden.empty()) {
      require_rows(d_hidden[t], b, h, "lstm hidden gradient");
      for (std::size_t k = 0; k < dh.size(); ++k) dh[k] += d_hidden[t][k];
    }
    const Tensor& gates = gates_[t];
    const Tensor& tc = tanh_cell_[t];
    const Tensor& c_prev = t == 0 ? c0_ : cell_[t - 1];
    const Tensor& h_prev = t == 0 ? h0_ : hidden_[t - 1];
    for (std::size_t r = 0; r < b; ++r) {
      const double* a = gates.raw() + r * g4;
      double* d = dz.raw() + r * g4;
      for (std::size_t j = 0; j < h; ++j) {
        const double i = a[j];
        const double f = a[h + j];
        const double g = a[2 * h + j];
        const double o = a[3 * h + j];
        const double t_c = tc(r, j);
        const double dh_rj = dh(r, j);
        const double dct = dc(r, j) + dh_rj * o * (1.0 - t_c * t_c);
        d[j] = dct * g * i * (1.0 - i);
        d[h + j] = dct * c_prev(r, j) * f * (1.0 - f);
        d[2 * h + j] = dct * i * (1.0 - g * g);
        d[3 * h + j] = dh_rj * t_c * o * (1.0 - o);
        dc(r, j) = dct * f;
      }
    }
    kernels::column_sum_acc(b, g4, dz.raw(), grads.bias.raw());
    kernels::gemm_tn_acc(b, h, g4, h_prev.raw(), dz.raw(), grads.recurrent_weight.raw());
    if (repeated_) {
      for (std::size_t k = 0; k < dz.size(); ++k) dz_sum[k] += dz[k];
    } else {
      kernels::gemm_tn_acc(b, in, g4, inputs_[t].raw(), dz.raw(), grads.input_weight.raw());
      if (want_input_grads) {
        Tensor dx({b, in});
        kernels::gemm_acc(b, g4, in, dz.raw(), wt.raw(), dx.raw());
        out.d_inputs[t] = std::move(dx);
      }
    }
    Tensor dh_prev({b, h});
    kernels::gemm_acc(b, g4, h, dz.raw(), ut.raw(), dh_prev.raw());
    dh = std::move(dh_prev);
  }

  if (repeated_) {
    kernels::gemm_tn_acc(b, in, g4, inputs_[0].raw(), dz_sum.raw(), grads.input_weight.raw());
    if (want_input_grads) {
      out.d_repeated_input = Tensor({b, in});
      kernels::gemm_acc(b, g4, in, dz_sum.raw(), wt.raw(), out.d_repeated_input.raw());
    }
  }
  out.d_h0 = std::move(dh);
  out.d_c0 = std::move(dc);
}

LstmState lstm_cell_step(const Tensor& x, const Tensor& h, const Tensor& c,
                         const LstmCellParams& p) {
  p.validate();
  const std::size_t hs = p.hidden_size();
  if (x.size() != p.input_size() || h.size() != hs || c.size() != hs) {
    throw ShapeError("lstm_cell_step: x" + x.shape_string() + " h" + h.shape_string() + " c" +
                     c.shape_string() + " do not match I=" + std::to_string(p.input_size()) +
                     " H=" + std::to_string(hs));
  }
  Tensor xb({1, x.size()}, std::vector<double>(x.data().begin(), x.data().end()));
  Tensor hb({1, hs}, std::vector<double>(h.data().begin(), h.data().end()));
  Tensor cb({1, hs}, std::vector<double>(c.data().begin(), c.data().end()));
  LstmUnroll unroll;
  unroll.forward(p, std::span<const Tensor>(&xb, 1), &hb, &cb);
  LstmState out{unroll.final_hidden(), unroll.final_cell()};
  out.h.reshape({hs});
  out.c.reshape({hs});
  return out;
}

LstmState run_encoder(const Tensor& seq, const LstmCellParams& p) {
  if (seq.rank() != 2 || seq.rows() == 0) {
    throw ShapeError("run_encoder: sequence must be [T x I] with T >= 1, got " + seq.shape_string());
  }
  if (seq.cols() != p.input_size()) {
    throw ShapeError("run_encoder: sequence width " + std::to_string(seq.cols()) +
                     " does not match input size " + std::to_string(p.input_size()));
  }
  std::vector<Tensor> inputs;
  inputs.reserve(seq.rows());
  for (std::size_t t = 0; t < seq.rows(); ++t) {
    inputs.emplace_back(std::vector<std::size_t>{1, seq.cols()},
                        std::vector<double>(seq.slice(t).begin(), seq.slice(t).end()));
  }
  LstmUnroll unroll;
  unroll.forward(p, inputs);
  LstmState out{unroll.final_hidden(), unroll.final_cell()};
  out.h.reshape({p.hidden_size()});
  out.c.reshape({p.hidden_size()});
  return out;
}

Tensor run_decoder(const LstmState& init, const Tensor& context, std::size_t steps,
                   const LstmCellParams& p, const DenseParams& head) {
  if (steps == 0) throw ShapeError("run_decoder: steps must be >= 1");
  const std::size_t hs = p.hidden_size();
  if (init.h.size() != hs || init.c.size() != hs || context.size() != p.input_size() ||
      head.in_size() != hs) {
    throw ShapeError("run_decoder: state h" + init.h.shape_string() + " c" + init.c.shape_string() +
                     " context" + context.shape_string() + " head" + head.weight.shape_string() +
                     " do not match decoder I=" + std::to_string(p.input_size()) +
                     " H=" + std::to_string(hs));
  }
  Tensor ctx({1, context.size()}, std::vector<double>(context.data().begin(), context.data().end()));
  Tensor h0({1, hs}, std::vector<double>(init.h.data().begin(), init.h.data().end()));
  Tensor c0({1, hs}, std::vector<double>(init.c.data().begin(), init.c.data().end()));
  LstmUnroll unroll;
  unroll.forward_repeated(p, ctx, steps, &h0, &c0);
  Tensor out({steps, head.out_size()});
  for (std::size_t t = 0; t < steps; ++t) {
    const Tensor y = dense_forward(unroll.hidden(t), head, Activation::linear);
    std::copy(y.data().begin(), y.data().end(), out.slice(t).begin());
  }
  return out;
}

}  // namespace driveclone::nn
