#include "fedring/param_vector.hpp"

namespace fedring {

const ParamEntry* ParamLayout::find(std::string_view name) const {
    for (const auto& e : entries) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

std::shared_ptr<const ParamLayout> make_layout(std::vector<ParamEntry> entries) {
    auto layout = std::make_shared<ParamLayout>();
    int64_t offset = 0;
    for (auto& e : entries) {
        require(e.offset == offset, "layout offsets must be contiguous");
        offset += e.size();
    }
    layout->entries = std::move(entries);
    layout->total = offset;
    return layout;
}

bool ParamVector::layout_equal(const ParamVector& o) const {
    if (layout == o.layout) return true;
    if (!layout || !o.layout) return false;
    return *layout == *o.layout;
}

ParamVector zeros_like(const std::shared_ptr<const ParamLayout>& layout) {
    ParamVector p;
    p.layout = layout;
    p.values.assign(static_cast<size_t>(layout->total), 0.0f);
    return p;
}

ParamVector zeros_like(const ParamVector& other) { return zeros_like(other.layout); }

std::vector<Tensor> unflatten(const ParamVector& p) {
    require(p.layout != nullptr, "param vector has no layout");
    require(p.layout->total == p.size(), "param vector length does not match layout");
    std::vector<Tensor> out;
    out.reserve(p.layout->entries.size());
    for (const auto& e : p.layout->entries) {
        std::vector<float> d(p.values.begin() + e.offset,
                             p.values.begin() + e.offset + e.size());
        out.emplace_back(e.shape, std::move(d));
    }
    return out;
}

ParamVector flatten(const std::shared_ptr<const ParamLayout>& layout,
                    const std::vector<Tensor>& tensors) {
    require(tensors.size() == layout->entries.size(),
            "tensor count does not match layout entries");
    ParamVector p = zeros_like(layout);
    for (size_t i = 0; i < tensors.size(); ++i) {
        const auto& e = layout->entries[i];
        require(tensors[i].shape == e.shape, "tensor shape mismatch for entry " + e.name);
        std::copy(tensors[i].data.begin(), tensors[i].data.end(),
                  p.values.begin() + e.offset);
    }
    return p;
}

}  // namespace fedring
