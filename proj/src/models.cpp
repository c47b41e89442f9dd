#include "fedring/models.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace fedring {

namespace {

// Leaky slope shared by discriminator and feature-extractor stacks.
constexpr double kLeakySlope = 0.2;

nn::Net build_net(const ModelSpec& spec) {
    nn::Net net;
    const int64_t sample_size = shape_numel(spec.input_shape);
    const int C = spec.num_classes;

    switch (spec.kind) {
        case ModelKind::classifier: {
            if (spec.is_image()) {
                // conv(8, s2) relu conv(16, s2) relu dense head
                require(spec.hidden.size() == 2, "image classifier expects 2 channel widths");
                nn::Shape3 s{static_cast<int>(spec.input_shape[0]),
                             static_cast<int>(spec.input_shape[1]),
                             static_cast<int>(spec.input_shape[2])};
                net.layers.push_back(nn::make_conv3x3(s, spec.hidden[0], 2));
                net.layers.push_back(nn::make_relu(net.layers.back()->out_size));
                nn::Shape3 s1{spec.hidden[0], (s.h + 1) / 2, (s.w + 1) / 2};
                net.layers.push_back(nn::make_conv3x3(s1, spec.hidden[1], 2));
                net.layers.push_back(nn::make_relu(net.layers.back()->out_size));
                net.layers.push_back(nn::make_dense(net.layers.back()->out_size, C));
            } else {
                int64_t prev = sample_size;
                for (int h : spec.hidden) {
                    net.layers.push_back(nn::make_dense(prev, h));
                    net.layers.push_back(nn::make_relu(h));
                    prev = h;
                }
                net.layers.push_back(nn::make_dense(prev, C));
            }
            break;
        }
        case ModelKind::generator: {
            require(spec.latent_dim >= 2, "latent_dim must be >= 2");
            net.layers.push_back(nn::make_concat_onehot(spec.latent_dim, C));
            int64_t prev = spec.latent_dim + C;
            for (int h : spec.hidden) {
                net.layers.push_back(nn::make_dense(prev, h));
                net.layers.push_back(nn::make_relu(h));
                prev = h;
            }
            net.layers.push_back(nn::make_dense(prev, sample_size));
            if (spec.is_image()) {
                net.layers.push_back(nn::make_tanh(sample_size));
            }
            break;
        }
        case ModelKind::discriminator: {
            if (spec.is_image()) {
                // conv stack mirrors the classifier; one-hot joins the head
                require(spec.hidden.size() == 3,
                        "image discriminator expects 2 channel widths + head width");
                nn::Shape3 s{static_cast<int>(spec.input_shape[0]),
                             static_cast<int>(spec.input_shape[1]),
                             static_cast<int>(spec.input_shape[2])};
                net.layers.push_back(nn::make_conv3x3(s, spec.hidden[0], 2));
                net.layers.push_back(nn::make_leaky_relu(net.layers.back()->out_size, kLeakySlope));
                nn::Shape3 s1{spec.hidden[0], (s.h + 1) / 2, (s.w + 1) / 2};
                net.layers.push_back(nn::make_conv3x3(s1, spec.hidden[1], 2));
                net.layers.push_back(nn::make_leaky_relu(net.layers.back()->out_size, kLeakySlope));
                net.layers.push_back(nn::make_concat_onehot(net.layers.back()->out_size, C));
                net.layers.push_back(nn::make_dense(net.layers.back()->out_size, spec.hidden[2]));
                net.layers.push_back(nn::make_leaky_relu(spec.hidden[2], kLeakySlope));
                net.layers.push_back(nn::make_dense(spec.hidden[2], 1));
            } else {
                net.layers.push_back(nn::make_concat_onehot(sample_size, C));
                int64_t prev = sample_size + C;
                for (int h : spec.hidden) {
                    net.layers.push_back(nn::make_dense(prev, h));
                    net.layers.push_back(nn::make_leaky_relu(h, kLeakySlope));
                    prev = h;
                }
                net.layers.push_back(nn::make_dense(prev, 1));
            }
            break;
        }
    }
    net.finalize();
    return net;
}

struct SpecKey {
    ModelSpec spec;
    bool operator<(const SpecKey& o) const {
        auto tup = [](const ModelSpec& s) {
            return std::make_tuple(static_cast<int>(s.kind), s.input_shape, s.num_classes,
                                   s.latent_dim, s.hidden);
        };
        return tup(spec) < tup(o.spec);
    }
};

}  // namespace

ModelSpec make_classifier_spec(const std::vector<int64_t>& sample_shape, int num_classes) {
    ModelSpec s;
    s.kind = ModelKind::classifier;
    s.input_shape = sample_shape;
    s.num_classes = num_classes;
    s.hidden = sample_shape.size() == 3 ? std::vector<int>{8, 16} : std::vector<int>{64, 64};
    return s;
}

ModelSpec make_generator_spec(const std::vector<int64_t>& sample_shape, int num_classes,
                              int latent_dim) {
    ModelSpec s;
    s.kind = ModelKind::generator;
    s.input_shape = sample_shape;
    s.num_classes = num_classes;
    s.latent_dim = latent_dim;
    s.hidden = sample_shape.size() == 3 ? std::vector<int>{128, 256} : std::vector<int>{64, 64};
    return s;
}

ModelSpec make_discriminator_spec(const std::vector<int64_t>& sample_shape,
                                  int num_classes) {
    ModelSpec s;
    s.kind = ModelKind::discriminator;
    s.input_shape = sample_shape;
    s.num_classes = num_classes;
    s.hidden = sample_shape.size() == 3 ? std::vector<int>{8, 16, 64} : std::vector<int>{64, 64};
    return s;
}

const nn::Net& get_net(const ModelSpec& spec) {
    static std::mutex mu;
    static std::map<SpecKey, std::unique_ptr<nn::Net>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(SpecKey{spec});
    if (it == cache.end()) {
        auto net = std::make_unique<nn::Net>(build_net(spec));
        it = cache.emplace(SpecKey{spec}, std::move(net)).first;
    }
    return *it->second;
}

ParamVector init_params(const ModelSpec& spec, RngStream& rng) {
    return get_net(spec).init_params(rng);
}

Tensor classifier_forward(const ModelSpec& spec, const ParamVector& params,
                          const Tensor& batch) {
    require(spec.kind == ModelKind::classifier, "classifier_forward needs a classifier spec");
    const nn::Net& net = get_net(spec);
    nn::Mat in = nn::to_mat(batch);
    require(in.cols == shape_numel(spec.input_shape), "batch shape does not match model input");
    auto w = net.to_f64(params);
    nn::Mat out = net.forward(w, std::move(in), {}, nullptr);
    Tensor t = nn::to_tensor(out, {static_cast<int64_t>(spec.num_classes)});
    check_finite(t, "classifier logits");
    return t;
}

Tensor generator_forward(const ModelSpec& spec, const ParamVector& params,
                         const Tensor& z_batch, const std::vector<int>& labels) {
    require(spec.kind == ModelKind::generator, "generator_forward needs a generator spec");
    const nn::Net& net = get_net(spec);
    nn::Mat in = nn::to_mat(z_batch);
    require(in.cols == spec.latent_dim, "latent width does not match latent_dim");
    auto w = net.to_f64(params);
    nn::Mat out = net.forward(w, std::move(in), labels, nullptr);
    Tensor t = nn::to_tensor(out, spec.input_shape);
    check_finite(t, "generator output");
    return t;
}

Tensor generator_forward_one(const ModelSpec& spec, const ParamVector& params,
                             const Tensor& z, int label) {
    Tensor zb({1, static_cast<int64_t>(z.data.size())}, z.data);
    Tensor out = generator_forward(spec, params, zb, {label});
    return Tensor(spec.input_shape, std::move(out.data));
}

Tensor discriminator_forward(const ModelSpec& spec, const ParamVector& params,
                             const Tensor& x_batch, const std::vector<int>& labels) {
    require(spec.kind == ModelKind::discriminator,
            "discriminator_forward needs a discriminator spec");
    const nn::Net& net = get_net(spec);
    nn::Mat in = nn::to_mat(x_batch);
    require(in.cols == shape_numel(spec.input_shape), "batch shape does not match model input");
    auto w = net.to_f64(params);
    nn::Mat out = net.forward(w, std::move(in), labels, nullptr);
    for (double& v : out.v) {
        double p = 1.0 / (1.0 + std::exp(-v));
        v = std::min(std::max(p, kDiscriminatorClamp), 1.0 - kDiscriminatorClamp);
    }
    Tensor t = nn::to_tensor(out, {1});
    check_finite(t, "discriminator output");
    return t;
}

std::pair<double, ParamVector> forward_backward(const ModelSpec& spec,
                                                const ParamVector& params,
                                                const Tensor& batch,
                                                const std::vector<int>& targets,
                                                LossKind loss) {
    require(loss == LossKind::cross_entropy, "unsupported loss kind");
    require(spec.kind == ModelKind::classifier, "forward_backward expects a classifier");
    require(!batch.shape.empty() && batch.shape[0] > 0, "empty batch");
    require(batch.shape[0] == static_cast<int64_t>(targets.size()),
            "batch/target count mismatch");

    const nn::Net& net = get_net(spec);
    nn::Mat in = nn::to_mat(batch);
    require(in.cols == shape_numel(spec.input_shape), "batch shape does not match model input");
    auto w = net.to_f64(params);

    nn::Net::Tape tape;
    nn::Mat logits = net.forward(w, std::move(in), {}, &tape);
    for (double v : logits.v) check_finite(v, "activations");

    nn::Mat dlogits;
    double loss_value = softmax_cross_entropy(logits, targets, &dlogits);

    std::vector<double> dparams;
    net.backward(w, tape, std::move(dlogits), &dparams, false);
    return {loss_value, net.grad_to_param_vector(dparams)};
}

}  // namespace fedring
