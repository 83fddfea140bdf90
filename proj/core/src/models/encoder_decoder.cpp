#include "driveclone/models/encoder_decoder.hpp"

#include <algorithm>

#include "driveclone/errors.hpp"

namespace driveclone::models {

struct EncoderDecoder::Trace {
  std::vector<nn::LstmUnroll> encoders;
  nn::Tensor fused_input;   // [B x 2kH], fusion only
  nn::Tensor fused_output;  // [B x 2H], fusion only
  nn::Tensor h0;
  nn::Tensor c0;
  nn::LstmUnroll decoder;
  std::vector<nn::Tensor> head_out;
};

EncoderDecoder::EncoderDecoder(ArchitectureSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (!is_lstm(spec_.variant)) {
    throw ConfigError(std::string(to_string(spec_.variant)) + " is not an LSTM variant");
  }
  views_ = spec_.views();
  const std::size_t h = spec_.hidden;
  encoders_.push_back(nn::LstmCellParams::zeros(kFeatureCount, h));
  for (std::size_t i = 0; i < views_.size(); ++i) {
    encoders_.push_back(nn::LstmCellParams::zeros(spec_.embedding_dim, h));
  }
  if (has_fusion()) fusion_ = nn::DenseParams::zeros(2 * h * encoders_.size(), 2 * h);
  decoder_ = nn::LstmCellParams::zeros(h, h);
  head_ = nn::DenseParams::zeros(h, 2);
}

void EncoderDecoder::initialize(nn::Rng& rng) {
  const std::size_t h = spec_.hidden;
  for (auto& e : encoders_) e = nn::LstmCellParams::init(e.input_size(), h, rng);
  if (has_fusion()) fusion_ = nn::DenseParams::init(fusion_.in_size(), 2 * h, rng);
  decoder_ = nn::LstmCellParams::init(h, h, rng);
  head_ = nn::DenseParams::init(h, 2, rng);
}

nn::ParamList EncoderDecoder::parameters() {
  nn::ParamList out;
  for (std::size_t i = 0; i < encoders_.size(); ++i) {
    const std::string prefix =
        "encoder." + (i == 0 ? std::string("features") : std::string(to_string(views_[i - 1])));
    out.push_back({prefix + ".input_weight", &encoders_[i].input_weight});
    out.push_back({prefix + ".recurrent_weight", &encoders_[i].recurrent_weight});
    out.push_back({prefix + ".bias", &encoders_[i].bias});
  }
  if (has_fusion()) {
    out.push_back({"fusion.weight", &fusion_.weight});
    out.push_back({"fusion.bias", &fusion_.bias});
  }
  out.push_back({"decoder.input_weight", &decoder_.input_weight});
  out.push_back({"decoder.recurrent_weight", &decoder_.recurrent_weight});
  out.push_back({"decoder.bias", &decoder_.bias});
  out.push_back({"head.weight", &head_.weight});
  out.push_back({"head.bias", &head_.bias});
  return out;
}

const std::vector<nn::Tensor>& EncoderDecoder::channel_inputs(const WindowBatch& batch,
                                                              std::size_t i) const {
  if (i == 0) return batch.features;
  const auto it = batch.embeddings.find(views_[i - 1]);
  if (it == batch.embeddings.end()) {
    throw ConfigError(std::string(to_string(spec_.variant)) + " needs '" +
                      std::string(to_string(views_[i - 1])) + "' embeddings");
  }
  return it->second;
}

nn::Tensor EncoderDecoder::run(const WindowBatch& batch, Trace* trace) const {
  const std::size_t b = batch.size;
  const std::size_t h = spec_.hidden;
  const std::size_t steps = batch.target.dim(1);
  const std::size_t k = encoders_.size();

  Trace local;
  Trace& tr = trace != nullptr ? *trace : local;
  tr.encoders.assign(k, nn::LstmUnroll{});
  for (std::size_t i = 0; i < k; ++i) tr.encoders[i].forward(encoders_[i], channel_inputs(batch, i));

  if (!has_fusion()) {
    tr.h0 = tr.encoders[0].final_hidden();
    tr.c0 = tr.encoders[0].final_cell();
  } else {
    tr.fused_input = nn::Tensor({b, 2 * h * k});
    for (std::size_t r = 0; r < b; ++r) {
      double* row = tr.fused_input.raw() + r * 2 * h * k;
      for (std::size_t i = 0; i < k; ++i) {
        std::copy_n(tr.encoders[i].final_hidden().raw() + r * h, h, row + i * h);
        std::copy_n(tr.encoders[i].final_cell().raw() + r * h, h, row + (k + i) * h);
      }
    }
    tr.fused_output = nn::dense_forward(tr.fused_input, fusion_, nn::Activation::linear);
    tr.h0 = nn::Tensor({b, h});
    tr.c0 = nn::Tensor({b, h});
    for (std::size_t r = 0; r < b; ++r) {
      const double* row = tr.fused_output.raw() + r * 2 * h;
      std::copy_n(row, h, tr.h0.raw() + r * h);
      std::copy_n(row + h, h, tr.c0.raw() + r * h);
    }
  }

  tr.decoder.forward_repeated(decoder_, tr.h0, steps, &tr.h0, &tr.c0);
  nn::Tensor pred({b, steps, 2});
  tr.head_out.assign(steps, nn::Tensor{});
  for (std::size_t t = 0; t < steps; ++t) {
    tr.head_out[t] = nn::dense_forward(tr.decoder.hidden(t), head_, nn::Activation::linear);
    for (std::size_t r = 0; r < b; ++r) {
      pred[(r * steps + t) * 2] = tr.head_out[t](r, 0);
      pred[(r * steps + t) * 2 + 1] = tr.head_out[t](r, 1);
    }
  }
  return pred;
}

nn::Tensor EncoderDecoder::forward(const WindowBatch& batch) const { return run(batch, nullptr); }

double EncoderDecoder::loss_and_gradients(const WindowBatch& batch, nn::LossKind kind,
                                          std::vector<nn::Tensor>& grads) {
  Trace tr;
  const nn::Tensor pred = run(batch, &tr);
  const double value = nn::loss(pred, batch.target, kind);
  const nn::Tensor d_pred = nn::loss_gradient(pred, batch.target, kind);

  const std::size_t b = batch.size;
  const std::size_t h = spec_.hidden;
  const std::size_t steps = batch.target.dim(1);
  const std::size_t k = encoders_.size();

  std::vector<nn::LstmCellParams> g_enc;
  for (const auto& e : encoders_) g_enc.push_back(nn::LstmCellParams::zeros(e.input_size(), h));
  nn::DenseParams g_fusion;
  if (has_fusion()) g_fusion = nn::DenseParams::zeros(fusion_.in_size(), 2 * h);
  auto g_dec = nn::LstmCellParams::zeros(h, h);
  auto g_head = nn::DenseParams::zeros(h, 2);

  std::vector<nn::Tensor> d_hidden(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    nn::Tensor d_y({b, 2});
    for (std::size_t r = 0; r < b; ++r) {
      d_y(r, 0) = d_pred[(r * steps + t) * 2];
      d_y(r, 1) = d_pred[(r * steps + t) * 2 + 1];
    }
    nn::dense_backward(tr.decoder.hidden(t), head_, tr.head_out[t], nn::Activation::linear,
                       std::move(d_y), g_head, &d_hidden[t]);
  }

  nn::LstmUnroll::Gradients dec_out;
  tr.decoder.backward(decoder_, d_hidden, nullptr, nullptr, g_dec, dec_out);
  nn::Tensor d_h0 = dec_out.d_h0;
  for (std::size_t i = 0; i < d_h0.size(); ++i) d_h0[i] += dec_out.d_repeated_input[i];
  const nn::Tensor& d_c0 = dec_out.d_c0;

  nn::LstmUnroll::Gradients enc_out;
  if (!has_fusion()) {
    tr.encoders[0].backward(encoders_[0], {}, &d_h0, &d_c0, g_enc[0], enc_out, false);
  } else {
    nn::Tensor d_fused({b, 2 * h});
    for (std::size_t r = 0; r < b; ++r) {
      std::copy_n(d_h0.raw() + r * h, h, d_fused.raw() + r * 2 * h);
      std::copy_n(d_c0.raw() + r * h, h, d_fused.raw() + r * 2 * h + h);
    }
    nn::Tensor d_cat;
    nn::dense_backward(tr.fused_input, fusion_, tr.fused_output, nn::Activation::linear,
                       std::move(d_fused), g_fusion, &d_cat);
    for (std::size_t i = 0; i < k; ++i) {
      nn::Tensor dh({b, h});
      nn::Tensor dc({b, h});
      for (std::size_t r = 0; r < b; ++r) {
        const double* row = d_cat.raw() + r * 2 * h * k;
        std::copy_n(row + i * h, h, dh.raw() + r * h);
        std::copy_n(row + (k + i) * h, h, dc.raw() + r * h);
      }
      tr.encoders[i].backward(encoders_[i], {}, &dh, &dc, g_enc[i], enc_out, false);
    }
  }

  grads.clear();
  for (auto& g : g_enc) {
    grads.push_back(std::move(g.input_weight));
    grads.push_back(std::move(g.recurrent_weight));
    grads.push_back(std::move(g.bias));
  }
  if (has_fusion()) {
    grads.push_back(std::move(g_fusion.weight));
    grads.push_back(std::move(g_fusion.bias));
  }
  grads.push_back(std::move(g_dec.input_weight));
  grads.push_back(std::move(g_dec.recurrent_weight));
  grads.push_back(std::move(g_dec.bias));
  grads.push_back(std::move(g_head.weight));
  grads.push_back(std::move(g_head.bias));
  return value;
}

}  // namespace driveclone::models
