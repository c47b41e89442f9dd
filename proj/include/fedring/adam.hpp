#pragma once

#include <cstdint>
#include <vector>

#include "fedring/param_vector.hpp"

namespace fedring {

struct AdamConfig {
    float lr = 1e-4f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

struct AdamState {
    int64_t step = 0;
    std::vector<float> m;
    std::vector<float> v;
    AdamConfig cfg;

    static AdamState init(int64_t n, AdamConfig cfg = {});
};

// Bias-corrected Adam update; element math in double, stored back as f32.
// Increments state.step by exactly 1.
void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state);

// Variant over a raw double vector (used by the latent projection, which
// optimizes a latent point rather than a ParamVector).
void adam_step_raw(std::vector<double>& params, const std::vector<double>& grad,
                   AdamState& state);

}  // namespace fedring
