#include "fedring/tensor.hpp"

#include <cmath>

namespace fedring {

int64_t shape_numel(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
        require(d > 0, "tensor dims must be positive");
        n *= d;
    }
    return n;
}

std::string shape_str(const std::vector<int64_t>& shape) {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

Tensor::Tensor(std::vector<int64_t> s, std::vector<float> d)
    : shape(std::move(s)), data(std::move(d)) {
    require(shape_numel(shape) == static_cast<int64_t>(data.size()),
            "tensor shape " + shape_str(shape) + " does not match data length " +
                std::to_string(data.size()));
}

Tensor Tensor::zeros(std::vector<int64_t> shape) {
    int64_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<float>(static_cast<size_t>(n), 0.0f));
}

void check_finite(const Tensor& t, const char* what) {
    for (float v : t.data) {
        if (!std::isfinite(v)) {
            throw std::runtime_error(std::string("non-finite value in ") + what);
        }
    }
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::runtime_error(std::string("non-finite value in ") + what);
    }
}

}  // namespace fedring
