#include "namlite/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "namlite/error.hpp"

namespace namlite {

std::string_view to_string(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "identity";
}

Activation activation_from_string(std::string_view text) {
  if (text == "relu") return Activation::kRelu;
  if (text == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + std::string(text) + "'");
}

std::size_t MlpShape::weight_offset(std::size_t layer) const {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    offset += static_cast<std::size_t>(fan_in(l) + 1) * fan_out(l);
  }
  return offset;
}

std::size_t MlpShape::bias_offset(std::size_t layer) const {
  return weight_offset(layer) + static_cast<std::size_t>(fan_in(layer)) * fan_out(layer);
}

std::size_t MlpShape::parameter_count() const { return weight_offset(layer_count()); }

void mlp_forward(const MlpShape& shape, std::span<const double> params,
                 std::span<const double> inputs, int batch, MlpTrace& trace,
                 std::span<double> outputs) {
  const std::size_t n_layers = shape.layer_count();
  trace.batch = batch;
  trace.layers.resize(n_layers);
  trace.layers[0].assign(inputs.begin(), inputs.begin() + static_cast<std::size_t>(batch) * shape.input);

  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in = shape.fan_in(l);
    const int out = shape.fan_out(l);
    const double* w = params.data() + shape.weight_offset(l);
    const double* b = params.data() + shape.bias_offset(l);
    const bool last = l + 1 == n_layers;
    std::vector<double>* next = last ? nullptr : &trace.layers[l + 1];
    if (next) next->assign(static_cast<std::size_t>(batch) * out, 0.0);
    const std::vector<double>& x = trace.layers[l];
    for (int r = 0; r < batch; ++r) {
      const double* xr = x.data() + static_cast<std::size_t>(r) * in;
      double* yr = last ? outputs.data() + static_cast<std::size_t>(r) * out
                        : next->data() + static_cast<std::size_t>(r) * out;
      for (int o = 0; o < out; ++o) {
        const double* wo = w + static_cast<std::size_t>(o) * in;
        double acc = b[o];
        for (int i = 0; i < in; ++i) acc += wo[i] * xr[i];
        if (!last && shape.activation == Activation::kRelu && acc < 0.0) acc = 0.0;
        yr[o] = acc;
      }
    }
  }
}

void mlp_backward(const MlpShape& shape, std::span<const double> params, const MlpTrace& trace,
                  std::span<const double> grad_outputs, std::span<double> param_grads,
                  std::span<double> input_grads) {
  const std::size_t n_layers = shape.layer_count();
  const int batch = trace.batch;
  std::vector<double> delta(grad_outputs.begin(),
                            grad_outputs.begin() + static_cast<std::size_t>(batch) * shape.output);
  std::vector<double> prev;
  for (std::size_t l = n_layers; l-- > 0;) {
    const int in = shape.fan_in(l);
    const int out = shape.fan_out(l);
    const double* w = params.data() + shape.weight_offset(l);
    double* gw = param_grads.data() + shape.weight_offset(l);
    double* gb = param_grads.data() + shape.bias_offset(l);
    const std::vector<double>& x = trace.layers[l];
    const bool need_prev = l > 0 || !input_grads.empty();
    if (need_prev) prev.assign(static_cast<std::size_t>(batch) * in, 0.0);
    for (int r = 0; r < batch; ++r) {
      const double* xr = x.data() + static_cast<std::size_t>(r) * in;
      const double* dr = delta.data() + static_cast<std::size_t>(r) * out;
      double* pr = need_prev ? prev.data() + static_cast<std::size_t>(r) * in : nullptr;
      for (int o = 0; o < out; ++o) {
        const double d = dr[o];
        if (d == 0.0) continue;
        gb[o] += d;
        double* gwo = gw + static_cast<std::size_t>(o) * in;
        const double* wo = w + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) gwo[i] += d * xr[i];
        if (pr) {
          for (int i = 0; i < in; ++i) pr[i] += d * wo[i];
        }
      }
    }
    if (l > 0) {
      // Hidden activation derivative; relu output is positive exactly where
      // its pre-activation was.
      if (shape.activation == Activation::kRelu) {
        for (std::size_t i = 0; i < prev.size(); ++i) {
          if (x[i] <= 0.0) prev[i] = 0.0;
        }
      }
      delta.swap(prev);
    } else if (!input_grads.empty()) {
      std::copy(prev.begin(), prev.end(), input_grads.begin());
    }
  }
}

void mlp_initialize(const MlpShape& shape, std::span<double> params, Rng& rng,
                    bool zero_output_layer) {
  const std::size_t n_layers = shape.layer_count();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t begin = shape.weight_offset(l);
    const std::size_t end = shape.weight_offset(l + 1);
    if (l + 1 == n_layers && zero_output_layer) {
      std::fill(params.begin() + begin, params.begin() + end, 0.0);
      continue;
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(shape.fan_in(l)));
    for (std::size_t i = begin; i < end; ++i) params[i] = rng.uniform(-bound, bound);
  }
}

}  // namespace namlite
