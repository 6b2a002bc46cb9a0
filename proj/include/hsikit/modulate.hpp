#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hsikit/common.hpp"
#include "hsikit/freq.hpp"

namespace hsikit {

// ----------------------------------------------------------------------------
// Forward-only reference ops for prompt-driven frequency modulation and the
// dual-branch attention fusion. A deterministic multi-hot tag encoder stands
// in for a learned text encoder; adapter and projection weights load from
// file so trained weights can be dropped in later.
// ----------------------------------------------------------------------------

struct TaskDescriptor {
    std::vector<double> embedding;
};

// Row-major dense matrix; tokens are rows.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// y = W x + b
struct DenseLayer {
    Matrix weight;             // [out_dim x in_dim]
    std::vector<double> bias;  // out_dim, may be empty for zero bias

    std::vector<double> apply(const std::vector<double>& x) const;
    static DenseLayer zeros(int out_dim, int in_dim);
};

// Two affine maps with a leaky rectifier in between (hidden width 64 and
// output 512 in the reference configuration).
struct AdapterWeights {
    DenseLayer layer1;
    DenseLayer layer2;
    double activation_slope = 0.01;

    static AdapterWeights zeros(int d_text = 512, int d_hidden = 64);
};

// Per-channel modulation controllers chunked from one projection output of
// length 3 * d_feat: (lambda_low, lambda_high, mu).
struct ControllerPair {
    std::vector<double> lambda_low;
    std::vector<double> lambda_high;
    std::vector<double> mu;
};

struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;  // [c][y][x]

    FeatureMap() = default;
    FeatureMap(int c, int h, int w, float fill = 0.0f)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, fill) {}

    float& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    float at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

// Multi-hot over the vocabulary, tiled across d_text (zero-padded remainder).
// Order-invariant, duplicate-insensitive. Unknown tags raise VocabError.
TaskDescriptor encode_tags(const std::vector<std::string>& tags,
                           const std::vector<std::string>& vocab, int d_text = 512);

// layer2(leaky_rectify(layer1(x)))
TaskDescriptor adapt(const TaskDescriptor& descriptor, const AdapterWeights& weights);

// Single affine projection to 3 * d_feat, chunked contiguously.
ControllerPair make_controllers(const TaskDescriptor& descriptor, const DenseLayer& projection);

// Per channel c: split the channel spectrum at cutoff_radius, form
// (1 + lambda_low[c]) . low + (1 + lambda_high[c]) . high, inverse transform,
// add mu[c]. Controller lengths must equal the channel count.
FeatureMap modulate_features(const FeatureMap& f, const ControllerPair& ctrl,
                             double cutoff_radius = 0.25);

struct QkvProjection {
    DenseLayer q;
    DenseLayer k;
    DenseLayer v;
};

// Tokens = spatial positions (row-major), features = channels.
Matrix tokens_from_feature_map(const FeatureMap& f);

// Query exchange between branches. Returns
//   first  = softmax(Q_alpha K_beta^T / d_k) V_beta
//   second = softmax(Q_beta  K_alpha^T / d_k) V_alpha
// Row-wise softmax with max subtraction; the scale is a literal division
// by d_k.
std::pair<Matrix, Matrix> cross_attend(const Matrix& f_alpha, const Matrix& f_beta,
                                       const QkvProjection& proj_alpha,
                                       const QkvProjection& proj_beta, double d_k);

Matrix self_attend(const Matrix& f_gamma, const QkvProjection& proj, double d_k);

// Named-tensor container files ("HSW1"): header declares name and shape per
// tensor, then concatenated little-endian float32 payloads in header order.
struct NamedTensor {
    std::string name;
    std::vector<int> shape;
    std::vector<float> values;
};

void write_tensors(const std::vector<NamedTensor>& tensors, const std::filesystem::path& path);
std::vector<NamedTensor> read_tensors(const std::filesystem::path& path);

void save_adapter(const AdapterWeights& weights, const std::filesystem::path& path);
AdapterWeights load_adapter(const std::filesystem::path& path);
void save_projection(const DenseLayer& projection, const std::filesystem::path& path);
DenseLayer load_projection(const std::filesystem::path& path);

}  // namespace hsikit
