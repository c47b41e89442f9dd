#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fedring/nn.hpp"
#include "fedring/param_vector.hpp"
#include "fedring/rng.hpp"
#include "fedring/tensor.hpp"

namespace fedring {

enum class ModelKind : uint8_t { classifier = 0, generator = 1, discriminator = 2 };

// Architecture descriptor. Two specs are exchange-compatible iff equal.
// input_shape is the sample-space shape: the input for classifiers and
// discriminators, the output for generators (whose raw input is a latent
// vector of latent_dim).
struct ModelSpec {
    ModelKind kind = ModelKind::classifier;
    std::vector<int64_t> input_shape;
    int num_classes = 2;
    int latent_dim = 0;
    std::vector<int> hidden;

    bool operator==(const ModelSpec&) const = default;
    bool is_image() const { return input_shape.size() == 3; }
};

// Zoo defaults: vector models are small MLPs, image models a two-conv stack.
ModelSpec make_classifier_spec(const std::vector<int64_t>& sample_shape, int num_classes);
ModelSpec make_generator_spec(const std::vector<int64_t>& sample_shape, int num_classes,
                              int latent_dim = 16);
ModelSpec make_discriminator_spec(const std::vector<int64_t>& sample_shape,
                                  int num_classes);

const nn::Net& get_net(const ModelSpec& spec);  // cached per spec
ParamVector init_params(const ModelSpec& spec, RngStream& rng);

enum class LossKind : uint8_t { cross_entropy = 0 };

// logits, shape (batch, num_classes)
Tensor classifier_forward(const ModelSpec& spec, const ParamVector& params,
                          const Tensor& batch);

// samples in the spec's sample space; tanh-bounded for image generators
Tensor generator_forward(const ModelSpec& spec, const ParamVector& params,
                         const Tensor& z_batch, const std::vector<int>& labels);
Tensor generator_forward_one(const ModelSpec& spec, const ParamVector& params,
                             const Tensor& z, int label);

inline constexpr double kDiscriminatorClamp = 1e-7;

// P(real | x, y) in [clamp, 1-clamp], shape (batch, 1)
Tensor discriminator_forward(const ModelSpec& spec, const ParamVector& params,
                             const Tensor& x_batch, const std::vector<int>& labels);

// Mean task loss over the batch plus its gradient w.r.t. the parameters.
std::pair<double, ParamVector> forward_backward(const ModelSpec& spec,
                                                const ParamVector& params,
                                                const Tensor& batch,
                                                const std::vector<int>& targets,
                                                LossKind loss);

}  // namespace fedring
