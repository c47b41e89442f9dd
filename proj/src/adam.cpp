#include "fedring/adam.hpp"

#include <cmath>

namespace fedring {

AdamState AdamState::init(int64_t n, AdamConfig cfg) {
    AdamState st;
    st.m.assign(static_cast<size_t>(n), 0.0f);
    st.v.assign(static_cast<size_t>(n), 0.0f);
    st.cfg = cfg;
    return st;
}

namespace {

template <typename P, typename G>
void adam_apply(P* p, const G* g, size_t n, AdamState& state) {
    state.step += 1;
    const double b1 = state.cfg.beta1;
    const double b2 = state.cfg.beta2;
    const double lr = state.cfg.lr;
    const double eps = state.cfg.eps;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (size_t i = 0; i < n; ++i) {
        const double gi = static_cast<double>(g[i]);
        const double mi = b1 * static_cast<double>(state.m[i]) + (1.0 - b1) * gi;
        const double vi = b2 * static_cast<double>(state.v[i]) + (1.0 - b2) * gi * gi;
        state.m[i] = static_cast<float>(mi);
        state.v[i] = static_cast<float>(vi);
        const double mhat = mi / bc1;
        const double vhat = vi / bc2;
        p[i] = static_cast<P>(static_cast<double>(p[i]) - lr * mhat / (std::sqrt(vhat) + eps));
    }
}

}  // namespace

void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state) {
    require(params.size() == grad.size(), "adam_step: param/grad length mismatch");
    require(static_cast<size_t>(params.size()) == state.m.size() &&
                state.m.size() == state.v.size(),
            "adam_step: state length mismatch");
    adam_apply(params.values.data(), grad.values.data(), params.values.size(), state);
}

void adam_step_raw(std::vector<double>& params, const std::vector<double>& grad,
                   AdamState& state) {
    require(params.size() == grad.size(), "adam_step: param/grad length mismatch");
    require(params.size() == state.m.size() && state.m.size() == state.v.size(),
            "adam_step: state length mismatch");
    adam_apply(params.data(), grad.data(), params.size(), state);
}

}  // namespace fedring
