#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fedring/tensor.hpp"

namespace fedring {

struct ParamEntry {
    std::string name;
    std::vector<int64_t> shape;
    int64_t offset = 0;

    int64_t size() const { return shape_numel(shape); }
    bool operator==(const ParamEntry&) const = default;
};

// Ordered, contiguous, non-overlapping layout over a flat float array.
struct ParamLayout {
    std::vector<ParamEntry> entries;
    int64_t total = 0;

    const ParamEntry* find(std::string_view name) const;
    bool operator==(const ParamLayout&) const = default;
};

std::shared_ptr<const ParamLayout> make_layout(std::vector<ParamEntry> entries);

// Flat parameter storage; the unit of model exchange between nodes.
struct ParamVector {
    std::shared_ptr<const ParamLayout> layout;
    std::vector<float> values;

    int64_t size() const { return static_cast<int64_t>(values.size()); }
    bool layout_equal(const ParamVector& o) const;

    float* entry_data(const ParamEntry& e) { return values.data() + e.offset; }
    const float* entry_data(const ParamEntry& e) const { return values.data() + e.offset; }
};

ParamVector zeros_like(const std::shared_ptr<const ParamLayout>& layout);
ParamVector zeros_like(const ParamVector& other);

// flatten(unflatten(p)) is the identity.
std::vector<Tensor> unflatten(const ParamVector& p);
ParamVector flatten(const std::shared_ptr<const ParamLayout>& layout,
                    const std::vector<Tensor>& tensors);

}  // namespace fedring
