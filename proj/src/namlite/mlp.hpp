#ifndef NAMLITE_MLP_HPP
#define NAMLITE_MLP_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "namlite/rng.hpp"

namespace namlite {

enum class Activation { kRelu, kIdentity };

std::string_view to_string(Activation activation);
Activation activation_from_string(std::string_view text);

// Fully connected network input -> hidden... -> output with the activation on
// hidden layers and a linear output layer. Parameters live in a flat span:
// for each layer, the weight matrix (out x in, row-major) followed by the bias.
struct MlpShape {
  int input = 0;
  std::vector<int> hidden;
  int output = 1;
  Activation activation = Activation::kRelu;

  std::size_t layer_count() const { return hidden.size() + 1; }
  int fan_in(std::size_t layer) const { return layer == 0 ? input : hidden[layer - 1]; }
  int fan_out(std::size_t layer) const { return layer == hidden.size() ? output : hidden[layer]; }
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;
  std::size_t parameter_count() const;
};

// Inputs and hidden activations of one forward pass, kept for backward.
struct MlpTrace {
  int batch = 0;
  std::vector<std::vector<double>> layers;  // layers[0] = inputs, layers[l] = hidden l
};

void mlp_forward(const MlpShape& shape, std::span<const double> params,
                 std::span<const double> inputs, int batch, MlpTrace& trace,
                 std::span<double> outputs);

// Accumulates into param_grads; input_grads (batch x input) is overwritten
// when non-empty.
void mlp_backward(const MlpShape& shape, std::span<const double> params, const MlpTrace& trace,
                  std::span<const double> grad_outputs, std::span<double> param_grads,
                  std::span<double> input_grads);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases; the output
// layer is zeroed when zero_output_layer is set.
void mlp_initialize(const MlpShape& shape, std::span<double> params, Rng& rng,
                    bool zero_output_layer);

}  // namespace namlite

#endif  // NAMLITE_MLP_HPP
