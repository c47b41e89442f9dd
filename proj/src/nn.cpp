#include "fedring/nn.hpp"

#include <algorithm>
#include <cmath>

namespace fedring::nn {

Mat to_mat(const Tensor& batch) {
    require(!batch.shape.empty(), "batch tensor must have a batch dimension");
    int64_t rows = batch.shape[0];
    require(rows > 0, "batch must be non-empty");
    int64_t cols = batch.numel() / rows;
    Mat m(rows, cols);
    for (size_t i = 0; i < batch.data.size(); ++i) {
        m.v[i] = static_cast<double>(batch.data[i]);
    }
    return m;
}

Tensor to_tensor(const Mat& m, const std::vector<int64_t>& sample_shape) {
    require(shape_numel(sample_shape) == m.cols, "sample shape does not match columns");
    std::vector<int64_t> shape;
    shape.push_back(m.rows);
    shape.insert(shape.end(), sample_shape.begin(), sample_shape.end());
    std::vector<float> data(m.v.size());
    for (size_t i = 0; i < m.v.size(); ++i) data[i] = static_cast<float>(m.v[i]);
    return Tensor(std::move(shape), std::move(data));
}

namespace {

class Dense final : public Layer {
public:
    Dense(int64_t in, int64_t out) {
        in_size = in;
        out_size = out;
    }

    std::string kind() const override { return "dense"; }

    int64_t param_count() const override { return in_size * out_size + out_size; }

    std::vector<ParamEntry> param_entries(const std::string& prefix,
                                          int64_t offset) const override {
        return {
            {prefix + ".w", {out_size, in_size}, offset},
            {prefix + ".b", {out_size}, offset + in_size * out_size},
        };
    }

    void init_params(double* w, RngStream& rng) const override {
        // fan-in-scaled uniform for both weights and biases
        double bound = 1.0 / std::sqrt(static_cast<double>(in_size));
        for (int64_t i = 0; i < param_count(); ++i) w[i] = rng.uniform(-bound, bound);
    }

    void forward(const double* w, const Mat& in, Mat& out,
                 const std::vector<int>&) const override {
        const double* b = w + in_size * out_size;
        for (int64_t r = 0; r < in.rows; ++r) {
            const double* x = in.row(r);
            double* y = out.row(r);
            for (int64_t o = 0; o < out_size; ++o) {
                const double* wrow = w + o * in_size;
                double acc = b[o];
                for (int64_t i = 0; i < in_size; ++i) acc += wrow[i] * x[i];
                y[o] = acc;
            }
        }
    }

    void backward(const double* w, const Mat& in, const Mat&, const Mat& dout, Mat* din,
                  double* dw, const std::vector<int>&) const override {
        if (dw) {
            double* db = dw + in_size * out_size;
            for (int64_t r = 0; r < in.rows; ++r) {
                const double* x = in.row(r);
                const double* dy = dout.row(r);
                for (int64_t o = 0; o < out_size; ++o) {
                    double* dwrow = dw + o * in_size;
                    const double g = dy[o];
                    for (int64_t i = 0; i < in_size; ++i) dwrow[i] += g * x[i];
                    db[o] += g;
                }
            }
        }
        if (din) {
            for (int64_t r = 0; r < in.rows; ++r) {
                const double* dy = dout.row(r);
                double* dx = din->row(r);
                for (int64_t o = 0; o < out_size; ++o) {
                    const double* wrow = w + o * in_size;
                    const double g = dy[o];
                    for (int64_t i = 0; i < in_size; ++i) dx[i] += g * wrow[i];
                }
            }
        }
    }
};

// 3x3 convolution, padding 1, square stride. Feature layout is CHW.
class Conv3x3 final : public Layer {
public:
    Conv3x3(Shape3 in, int out_channels, int stride) : in_(in), stride_(stride) {
        out_.c = out_channels;
        out_.h = (in.h + 2 - 3) / stride + 1;
        out_.w = (in.w + 2 - 3) / stride + 1;
        in_size = in_.numel();
        out_size = out_.numel();
    }

    std::string kind() const override { return "conv3x3"; }

    int64_t param_count() const override {
        return int64_t{9} * out_.c * in_.c + out_.c;
    }

    std::vector<ParamEntry> param_entries(const std::string& prefix,
                                          int64_t offset) const override {
        return {
            {prefix + ".w", {out_.c, in_.c, 3, 3}, offset},
            {prefix + ".b", {out_.c}, offset + int64_t{9} * out_.c * in_.c},
        };
    }

    void init_params(double* w, RngStream& rng) const override {
        double bound = 1.0 / std::sqrt(static_cast<double>(in_.c) * 9.0);
        for (int64_t i = 0; i < param_count(); ++i) w[i] = rng.uniform(-bound, bound);
    }

    void forward(const double* w, const Mat& in, Mat& out,
                 const std::vector<int>&) const override {
        const double* bias = w + int64_t{9} * out_.c * in_.c;
        for (int64_t r = 0; r < in.rows; ++r) {
            const double* x = in.row(r);
            double* y = out.row(r);
            for (int oc = 0; oc < out_.c; ++oc) {
                for (int oh = 0; oh < out_.h; ++oh) {
                    for (int ow = 0; ow < out_.w; ++ow) {
                        double acc = bias[oc];
                        const int ih0 = oh * stride_ - 1;
                        const int iw0 = ow * stride_ - 1;
                        for (int ic = 0; ic < in_.c; ++ic) {
                            const double* xc = x + int64_t{ic} * in_.h * in_.w;
                            const double* wk = w + ((int64_t{oc} * in_.c + ic) * 9);
                            for (int kh = 0; kh < 3; ++kh) {
                                const int ih = ih0 + kh;
                                if (ih < 0 || ih >= in_.h) continue;
                                for (int kw = 0; kw < 3; ++kw) {
                                    const int iw = iw0 + kw;
                                    if (iw < 0 || iw >= in_.w) continue;
                                    acc += wk[kh * 3 + kw] * xc[ih * in_.w + iw];
                                }
                            }
                        }
                        y[(int64_t{oc} * out_.h + oh) * out_.w + ow] = acc;
                    }
                }
            }
        }
    }

    void backward(const double* w, const Mat& in, const Mat&, const Mat& dout, Mat* din,
                  double* dw, const std::vector<int>&) const override {
        double* dbias = dw ? dw + int64_t{9} * out_.c * in_.c : nullptr;
        for (int64_t r = 0; r < in.rows; ++r) {
            const double* x = in.row(r);
            const double* dy = dout.row(r);
            double* dx = din ? din->row(r) : nullptr;
            for (int oc = 0; oc < out_.c; ++oc) {
                for (int oh = 0; oh < out_.h; ++oh) {
                    for (int ow = 0; ow < out_.w; ++ow) {
                        const double g = dy[(int64_t{oc} * out_.h + oh) * out_.w + ow];
                        if (g == 0.0) continue;
                        if (dbias) dbias[oc] += g;
                        const int ih0 = oh * stride_ - 1;
                        const int iw0 = ow * stride_ - 1;
                        for (int ic = 0; ic < in_.c; ++ic) {
                            const double* xc = x + int64_t{ic} * in_.h * in_.w;
                            const double* wk = w + ((int64_t{oc} * in_.c + ic) * 9);
                            double* dwk = dw ? dw + ((int64_t{oc} * in_.c + ic) * 9) : nullptr;
                            double* dxc = dx ? dx + int64_t{ic} * in_.h * in_.w : nullptr;
                            for (int kh = 0; kh < 3; ++kh) {
                                const int ih = ih0 + kh;
                                if (ih < 0 || ih >= in_.h) continue;
                                for (int kw = 0; kw < 3; ++kw) {
                                    const int iw = iw0 + kw;
                                    if (iw < 0 || iw >= in_.w) continue;
                                    if (dwk) dwk[kh * 3 + kw] += g * xc[ih * in_.w + iw];
                                    if (dxc) dxc[ih * in_.w + iw] += g * wk[kh * 3 + kw];
                                }
                            }
                        }
                    }
                }
            }
        }
    }

private:
    Shape3 in_;
    Shape3 out_;
    int stride_;
};

class Activation : public Layer {
public:
    explicit Activation(int64_t size) {
        in_size = size;
        out_size = size;
    }

    void forward(const double*, const Mat& in, Mat& out,
                 const std::vector<int>&) const override {
        for (size_t i = 0; i < in.v.size(); ++i) out.v[i] = f(in.v[i]);
    }

    void backward(const double*, const Mat& in, const Mat& out, const Mat& dout,
                  Mat* din, double*, const std::vector<int>&) const override {
        if (!din) return;
        for (size_t i = 0; i < in.v.size(); ++i) {
            din->v[i] += dout.v[i] * df(in.v[i], out.v[i]);
        }
    }

protected:
    virtual double f(double x) const = 0;
    virtual double df(double x, double y) const = 0;
};

class Relu final : public Activation {
public:
    using Activation::Activation;
    std::string kind() const override { return "relu"; }

protected:
    double f(double x) const override { return x > 0.0 ? x : 0.0; }
    double df(double x, double) const override { return x > 0.0 ? 1.0 : 0.0; }
};

class LeakyRelu final : public Activation {
public:
    LeakyRelu(int64_t size, double slope) : Activation(size), slope_(slope) {}
    std::string kind() const override { return "leaky_relu"; }

protected:
    double f(double x) const override { return x > 0.0 ? x : slope_ * x; }
    double df(double x, double) const override { return x > 0.0 ? 1.0 : slope_; }

private:
    double slope_;
};

class TanhLayer final : public Activation {
public:
    using Activation::Activation;
    std::string kind() const override { return "tanh"; }

protected:
    double f(double x) const override { return std::tanh(x); }
    double df(double, double y) const override { return 1.0 - y * y; }
};

class ConcatOneHot final : public Layer {
public:
    ConcatOneHot(int64_t in, int num_classes) : num_classes_(num_classes) {
        in_size = in;
        out_size = in + num_classes;
    }

    std::string kind() const override { return "concat_onehot"; }

    void forward(const double*, const Mat& in, Mat& out,
                 const std::vector<int>& labels) const override {
        require(static_cast<int64_t>(labels.size()) == in.rows,
                "label count does not match batch size");
        for (int64_t r = 0; r < in.rows; ++r) {
            require(labels[r] >= 0 && labels[r] < num_classes_, "label out of range");
            const double* x = in.row(r);
            double* y = out.row(r);
            std::copy(x, x + in_size, y);
            std::fill(y + in_size, y + out_size, 0.0);
            y[in_size + labels[r]] = 1.0;
        }
    }

    void backward(const double*, const Mat& in, const Mat&, const Mat& dout, Mat* din,
                  double*, const std::vector<int>&) const override {
        if (!din) return;
        for (int64_t r = 0; r < in.rows; ++r) {
            const double* dy = dout.row(r);
            double* dx = din->row(r);
            for (int64_t i = 0; i < in_size; ++i) dx[i] += dy[i];
        }
    }

private:
    int num_classes_;
};

}  // namespace

std::unique_ptr<Layer> make_dense(int64_t in, int64_t out) {
    return std::make_unique<Dense>(in, out);
}
std::unique_ptr<Layer> make_conv3x3(Shape3 in, int out_channels, int stride) {
    return std::make_unique<Conv3x3>(in, out_channels, stride);
}
std::unique_ptr<Layer> make_relu(int64_t size) { return std::make_unique<Relu>(size); }
std::unique_ptr<Layer> make_leaky_relu(int64_t size, double slope) {
    return std::make_unique<LeakyRelu>(size, slope);
}
std::unique_ptr<Layer> make_tanh(int64_t size) { return std::make_unique<TanhLayer>(size); }
std::unique_ptr<Layer> make_concat_onehot(int64_t in, int num_classes) {
    return std::make_unique<ConcatOneHot>(in, num_classes);
}

void Net::finalize() {
    require(!layers.empty(), "net has no layers");
    input_size = layers.front()->in_size;
    std::vector<ParamEntry> entries;
    int64_t offset = 0;
    for (size_t i = 0; i < layers.size(); ++i) {
        require(i == 0 || layers[i]->in_size == layers[i - 1]->out_size,
                "layer size mismatch in net");
        auto e = layers[i]->param_entries("l" + std::to_string(i), offset);
        for (auto& pe : e) entries.push_back(std::move(pe));
        offset += layers[i]->param_count();
    }
    layout = make_layout(std::move(entries));
}

std::vector<double> Net::to_f64(const ParamVector& params) const {
    require(params.size() == layout->total, "param vector length does not match net");
    std::vector<double> w(params.values.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(params.values[i]);
    return w;
}

Mat Net::forward(const std::vector<double>& w, Mat input, const std::vector<int>& labels,
                 Tape* tape) const {
    require(input.cols == input_size, "net input width mismatch");
    if (tape) {
        tape->acts.clear();
        tape->labels = labels;
        tape->acts.reserve(layers.size() + 1);
    }
    const double* wp = w.data();
    Mat cur = std::move(input);
    for (const auto& layer : layers) {
        Mat out(cur.rows, layer->out_size);
        layer->forward(wp, cur, out, labels);
        if (tape) tape->acts.push_back(std::move(cur));
        cur = std::move(out);
        wp += layer->param_count();
    }
    if (tape) tape->acts.push_back(Mat());  // placeholder; output returned to caller
    return cur;
}

Mat Net::backward(const std::vector<double>& w, const Tape& tape, Mat dout,
                  std::vector<double>* dparams, bool want_input_grad) const {
    require(tape.acts.size() == layers.size() + 1, "tape does not match net");
    if (dparams && dparams->empty()) dparams->assign(static_cast<size_t>(layout->total), 0.0);

    // per-layer parameter offsets
    std::vector<int64_t> offsets(layers.size());
    int64_t off = 0;
    for (size_t i = 0; i < layers.size(); ++i) {
        offsets[i] = off;
        off += layers[i]->param_count();
    }

    Mat cur = std::move(dout);
    for (size_t k = layers.size(); k-- > 0;) {
        const auto& layer = layers[k];
        const Mat& in = tape.acts[k];
        // output activation of layer k only needed by activations; recompute
        // lazily for the ones that use it (tanh), others ignore it.
        Mat outdummy;
        const Mat* outp = &outdummy;
        Mat outbuf;
        if (layer->kind() == "tanh") {
            outbuf = Mat(in.rows, layer->out_size);
            layer->forward(w.data() + offsets[k], in, outbuf, tape.labels);
            outp = &outbuf;
        }
        bool need_din = want_input_grad || k > 0;
        Mat din;
        if (need_din) din = Mat(in.rows, layer->in_size);
        double* dw = dparams ? dparams->data() + offsets[k] : nullptr;
        layer->backward(w.data() + offsets[k], in, *outp, cur, need_din ? &din : nullptr,
                        dw, tape.labels);
        cur = std::move(din);
    }
    return cur;
}

ParamVector Net::init_params(RngStream& rng) const {
    std::vector<double> w(static_cast<size_t>(layout->total));
    double* wp = w.data();
    for (const auto& layer : layers) {
        layer->init_params(wp, rng);
        wp += layer->param_count();
    }
    ParamVector p = zeros_like(layout);
    for (size_t i = 0; i < w.size(); ++i) p.values[i] = static_cast<float>(w[i]);
    return p;
}

ParamVector Net::grad_to_param_vector(const std::vector<double>& dparams) const {
    require(static_cast<int64_t>(dparams.size()) == layout->total,
            "grad length does not match layout");
    ParamVector g = zeros_like(layout);
    for (size_t i = 0; i < dparams.size(); ++i) g.values[i] = static_cast<float>(dparams[i]);
    return g;
}

void softmax_rows(const Mat& logits, Mat& probs) {
    probs = Mat(logits.rows, logits.cols);
    for (int64_t r = 0; r < logits.rows; ++r) {
        const double* z = logits.row(r);
        double* p = probs.row(r);
        double mx = z[0];
        for (int64_t c = 1; c < logits.cols; ++c) mx = std::max(mx, z[c]);
        double sum = 0.0;
        for (int64_t c = 0; c < logits.cols; ++c) {
            p[c] = std::exp(z[c] - mx);
            sum += p[c];
        }
        for (int64_t c = 0; c < logits.cols; ++c) p[c] /= sum;
    }
}

double softmax_cross_entropy(const Mat& logits, const std::vector<int>& targets,
                             Mat* dlogits) {
    require(static_cast<int64_t>(targets.size()) == logits.rows,
            "target count does not match batch size");
    require(logits.rows > 0, "empty batch");
    double loss = 0.0;
    if (dlogits) *dlogits = Mat(logits.rows, logits.cols);
    const double inv_n = 1.0 / static_cast<double>(logits.rows);
    for (int64_t r = 0; r < logits.rows; ++r) {
        const double* z = logits.row(r);
        const int t = targets[r];
        require(t >= 0 && t < logits.cols, "target label out of range");
        double mx = z[0];
        for (int64_t c = 1; c < logits.cols; ++c) mx = std::max(mx, z[c]);
        double sum = 0.0;
        for (int64_t c = 0; c < logits.cols; ++c) sum += std::exp(z[c] - mx);
        const double lse = mx + std::log(sum);
        loss += (lse - z[t]) * inv_n;
        if (dlogits) {
            double* d = dlogits->row(r);
            for (int64_t c = 0; c < logits.cols; ++c) {
                d[c] = std::exp(z[c] - lse) * inv_n;
            }
            d[t] -= inv_n;
        }
    }
    check_finite(loss, "softmax_cross_entropy");
    return loss;
}

}  // namespace fedring::nn
