#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedring {

// Precondition / shape violations.
inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

int64_t shape_numel(const std::vector<int64_t>& shape);
std::string shape_str(const std::vector<int64_t>& shape);

// Dense row-major float32 tensor: the unit of storage and exchange.
// Internal network arithmetic runs in double scratch buffers; results land
// here as f32.
struct Tensor {
    std::vector<int64_t> shape;
    std::vector<float> data;

    Tensor() = default;
    Tensor(std::vector<int64_t> s, std::vector<float> d);

    static Tensor zeros(std::vector<int64_t> shape);

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    bool operator==(const Tensor& o) const { return shape == o.shape && data == o.data; }
};

// NaN/Inf is an error surfaced, never propagated silently.
void check_finite(const Tensor& t, const char* what);
void check_finite(double v, const char* what);

}  // namespace fedring
