#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fedring/param_vector.hpp"
#include "fedring/rng.hpp"
#include "fedring/tensor.hpp"

namespace fedring::nn {

// Batch-major double matrix: rows = batch, cols = flattened features.
// All forward/backward arithmetic happens here in f64; f32 is the storage
// and exchange precision only.
struct Mat {
    int64_t rows = 0;
    int64_t cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int64_t r, int64_t c) : rows(r), cols(c), v(static_cast<size_t>(r * c), 0.0) {}

    double* row(int64_t r) { return v.data() + r * cols; }
    const double* row(int64_t r) const { return v.data() + r * cols; }
};

Mat to_mat(const Tensor& batch);              // first dim = batch
Tensor to_tensor(const Mat& m, const std::vector<int64_t>& sample_shape);

struct Shape3 {
    int c = 0, h = 0, w = 0;
    int64_t numel() const { return int64_t{1} * c * h * w; }
};

// Fixed small op set: affine, 3x3 conv, relu/leaky-relu, tanh, one-hot
// label concatenation. Layers are stateless; parameters live in a flat
// double buffer whose layout the owning Net derives.
class Layer {
public:
    virtual ~Layer() = default;

    int64_t in_size = 0;
    int64_t out_size = 0;

    virtual std::string kind() const = 0;
    virtual int64_t param_count() const { return 0; }
    virtual std::vector<ParamEntry> param_entries(const std::string& prefix,
                                                  int64_t offset) const {
        (void)prefix;
        (void)offset;
        return {};
    }
    virtual void init_params(double* w, RngStream& rng) const { (void)w, (void)rng; }

    virtual void forward(const double* w, const Mat& in, Mat& out,
                         const std::vector<int>& labels) const = 0;
    // din may be null when input gradients are not needed; dw may be null
    // when parameter gradients are not needed.
    virtual void backward(const double* w, const Mat& in, const Mat& out,
                          const Mat& dout, Mat* din, double* dw,
                          const std::vector<int>& labels) const = 0;
};

std::unique_ptr<Layer> make_dense(int64_t in, int64_t out);
std::unique_ptr<Layer> make_conv3x3(Shape3 in, int out_channels, int stride);
std::unique_ptr<Layer> make_relu(int64_t size);
std::unique_ptr<Layer> make_leaky_relu(int64_t size, double slope);
std::unique_ptr<Layer> make_tanh(int64_t size);
std::unique_ptr<Layer> make_concat_onehot(int64_t in, int num_classes);

// A fixed sequential stack. `input_size` is the raw input width (latent_dim
// for generators, flattened sample size otherwise); label conditioning is a
// concat layer inside the stack.
class Net {
public:
    std::vector<std::unique_ptr<Layer>> layers;
    int64_t input_size = 0;
    std::shared_ptr<const ParamLayout> layout;

    void finalize();  // derives sizes + layout; call after adding layers

    int64_t output_size() const { return layers.empty() ? input_size : layers.back()->out_size; }

    struct Tape {
        std::vector<Mat> acts;  // acts[0] = input, acts[i+1] = output of layer i
        std::vector<int> labels;
    };

    // Converted f64 view of a ParamVector; prepare once per step, reuse
    // across the forward/backward calls of that step.
    std::vector<double> to_f64(const ParamVector& params) const;

    Mat forward(const std::vector<double>& w, Mat input, const std::vector<int>& labels,
                Tape* tape) const;

    // dout = dL/d(output). Accumulates parameter grads into dparams (same
    // flat layout, may be null) and returns dL/d(input) when requested.
    Mat backward(const std::vector<double>& w, const Tape& tape, Mat dout,
                 std::vector<double>* dparams, bool want_input_grad) const;

    ParamVector init_params(RngStream& rng) const;
    ParamVector grad_to_param_vector(const std::vector<double>& dparams) const;
};

// Softmax cross-entropy over logits, mean over the batch. dlogits is the
// gradient of that mean. Returns the loss.
double softmax_cross_entropy(const Mat& logits, const std::vector<int>& targets,
                             Mat* dlogits);

void softmax_rows(const Mat& logits, Mat& probs);

}  // namespace fedring::nn
