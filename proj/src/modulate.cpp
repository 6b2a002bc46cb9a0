#include "hsikit/modulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "detail_io.hpp"

namespace hsikit {

namespace fs = std::filesystem;

std::vector<double> DenseLayer::apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != weight.cols)
        throw ShapeError("dense layer input length " + std::to_string(x.size()) +
                         " does not match weight columns " + std::to_string(weight.cols));
    if (!bias.empty() && static_cast<int>(bias.size()) != weight.rows)
        throw ShapeError("dense layer bias length does not match weight rows");

    std::vector<double> y(weight.rows, 0.0);
    for (int o = 0; o < weight.rows; ++o) {
        double acc = bias.empty() ? 0.0 : bias[o];
        const double* row = weight.data.data() + static_cast<std::size_t>(o) * weight.cols;
        for (int i = 0; i < weight.cols; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
    return y;
}

DenseLayer DenseLayer::zeros(int out_dim, int in_dim) {
    DenseLayer l;
    l.weight = Matrix(out_dim, in_dim, 0.0);
    l.bias.assign(out_dim, 0.0);
    return l;
}

AdapterWeights AdapterWeights::zeros(int d_text, int d_hidden) {
    AdapterWeights w;
    w.layer1 = DenseLayer::zeros(d_hidden, d_text);
    w.layer2 = DenseLayer::zeros(d_text, d_hidden);
    return w;
}

TaskDescriptor encode_tags(const std::vector<std::string>& tags,
                           const std::vector<std::string>& vocab, int d_text) {
    if (d_text < 1) throw ParamError("d_text must be >= 1");
    std::vector<double> hot(vocab.size(), 0.0);
    for (const auto& tag : tags) {
        const auto it = std::find(vocab.begin(), vocab.end(), tag);
        if (it == vocab.end()) throw VocabError("unknown tag: '" + tag + "'");
        hot[static_cast<std::size_t>(it - vocab.begin())] = 1.0;
    }
    // Tile the multi-hot pattern across d_text, zero-pad the remainder.
    TaskDescriptor d;
    d.embedding.assign(d_text, 0.0);
    if (!vocab.empty()) {
        const int full = d_text / static_cast<int>(vocab.size()) * static_cast<int>(vocab.size());
        for (int i = 0; i < full; ++i) d.embedding[i] = hot[i % vocab.size()];
    }
    return d;
}

TaskDescriptor adapt(const TaskDescriptor& descriptor, const AdapterWeights& weights) {
    std::vector<double> h = weights.layer1.apply(descriptor.embedding);
    for (double& v : h)
        if (v < 0.0) v *= weights.activation_slope;
    TaskDescriptor out;
    out.embedding = weights.layer2.apply(h);
    return out;
}

ControllerPair make_controllers(const TaskDescriptor& descriptor, const DenseLayer& projection) {
    if (projection.weight.rows % 3 != 0)
        throw ShapeError("projection output length must be divisible by 3");
    const std::vector<double> y = projection.apply(descriptor.embedding);
    const std::size_t d = y.size() / 3;
    ControllerPair ctrl;
    ctrl.lambda_low.assign(y.begin(), y.begin() + d);
    ctrl.lambda_high.assign(y.begin() + d, y.begin() + 2 * d);
    ctrl.mu.assign(y.begin() + 2 * d, y.end());
    return ctrl;
}

FeatureMap modulate_features(const FeatureMap& f, const ControllerPair& ctrl,
                             double cutoff_radius) {
    if (static_cast<int>(ctrl.lambda_low.size()) != f.channels ||
        static_cast<int>(ctrl.lambda_high.size()) != f.channels ||
        static_cast<int>(ctrl.mu.size()) != f.channels)
        throw ShapeError("controller length does not match channel count");

    FeatureMap out = f;
    const std::size_t plane = static_cast<std::size_t>(f.height) * f.width;
    Image channel(f.height, f.width);
    for (int c = 0; c < f.channels; ++c) {
        const float* src = f.data.data() + plane * c;
        for (std::size_t i = 0; i < plane; ++i) channel.data[i] = src[i];

        const BandSpectrum spec = fft2_band(channel);
        const FreqSplit split = split_low_high(spec, cutoff_radius);
        BandSpectrum combined(f.height, f.width);
        const double gl = 1.0 + ctrl.lambda_low[c];
        const double gh = 1.0 + ctrl.lambda_high[c];
        for (std::size_t i = 0; i < combined.coeffs.size(); ++i)
            combined.coeffs[i] = gl * split.low.coeffs[i] + gh * split.high.coeffs[i];

        // The radial masks are symmetric under frequency negation, so the
        // recombined spectrum stays conjugate-symmetric and the inverse is
        // real up to round-off. Check before discarding the imaginary part.
        const auto inv = ifft2_complex(combined);
        double residue = 0.0;
        for (const auto& v : inv) residue = std::max(residue, std::abs(v.imag()));
        if (residue >= 1e-5)
            throw Error("modulated spectrum lost conjugate symmetry (imag residue " +
                        std::to_string(residue) + ")");
        float* dst = out.data.data() + plane * c;
        const double bias = ctrl.mu[c];
        for (std::size_t i = 0; i < plane; ++i)
            dst[i] = static_cast<float>(inv[i].real() + bias);
    }
    return out;
}

Matrix tokens_from_feature_map(const FeatureMap& f) {
    Matrix m(f.height * f.width, f.channels);
    for (int c = 0; c < f.channels; ++c)
        for (int y = 0; y < f.height; ++y)
            for (int x = 0; x < f.width; ++x)
                m.at(y * f.width + x, c) = f.at(c, y, x);
    return m;
}

namespace {

Matrix apply_dense_rows(const Matrix& tokens, const DenseLayer& layer) {
    Matrix out(tokens.rows, layer.weight.rows);
    std::vector<double> x(tokens.cols);
    for (int r = 0; r < tokens.rows; ++r) {
        for (int c = 0; c < tokens.cols; ++c) x[c] = tokens.at(r, c);
        const auto y = layer.apply(x);
        for (std::size_t c = 0; c < y.size(); ++c) out.at(r, static_cast<int>(c)) = y[c];
    }
    return out;
}

// softmax(Q K^T / d_k) V with max-subtracted row-wise softmax.
Matrix scaled_attention(const Matrix& q, const Matrix& k, const Matrix& v, double d_k) {
    if (q.cols != k.cols) throw ShapeError("query/key dimensions differ");
    if (k.rows != v.rows) throw ShapeError("key/value token counts differ");
    if (d_k <= 0.0) throw ParamError("d_k must be positive");

    Matrix out(q.rows, v.cols);
    std::vector<double> logits(k.rows);
    for (int i = 0; i < q.rows; ++i) {
        double max_logit = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < k.rows; ++j) {
            double dot = 0.0;
            for (int c = 0; c < q.cols; ++c) dot += q.at(i, c) * k.at(j, c);
            logits[j] = dot / d_k;
            max_logit = std::max(max_logit, logits[j]);
        }
        double denom = 0.0;
        for (int j = 0; j < k.rows; ++j) {
            logits[j] = std::exp(logits[j] - max_logit);
            denom += logits[j];
        }
        for (int c = 0; c < v.cols; ++c) {
            double acc = 0.0;
            for (int j = 0; j < k.rows; ++j) acc += logits[j] * v.at(j, c);
            out.at(i, c) = acc / denom;
        }
    }
    return out;
}

}  // namespace

std::pair<Matrix, Matrix> cross_attend(const Matrix& f_alpha, const Matrix& f_beta,
                                       const QkvProjection& proj_alpha,
                                       const QkvProjection& proj_beta, double d_k) {
    const Matrix q_a = apply_dense_rows(f_alpha, proj_alpha.q);
    const Matrix k_a = apply_dense_rows(f_alpha, proj_alpha.k);
    const Matrix v_a = apply_dense_rows(f_alpha, proj_alpha.v);
    const Matrix q_b = apply_dense_rows(f_beta, proj_beta.q);
    const Matrix k_b = apply_dense_rows(f_beta, proj_beta.k);
    const Matrix v_b = apply_dense_rows(f_beta, proj_beta.v);
    return {scaled_attention(q_a, k_b, v_b, d_k), scaled_attention(q_b, k_a, v_a, d_k)};
}

Matrix self_attend(const Matrix& f_gamma, const QkvProjection& proj, double d_k) {
    const Matrix q = apply_dense_rows(f_gamma, proj.q);
    const Matrix k = apply_dense_rows(f_gamma, proj.k);
    const Matrix v = apply_dense_rows(f_gamma, proj.v);
    return scaled_attention(q, k, v, d_k);
}

// ---------------------------------------------------------------------------
// Tensor files (HSW1)
// ---------------------------------------------------------------------------

void write_tensors(const std::vector<NamedTensor>& tensors, const fs::path& path) {
    std::string out = "HSW1\n";
    for (const auto& t : tensors) {
        std::size_t count = 1;
        out += "tensor=" + t.name + ":";
        for (std::size_t i = 0; i < t.shape.size(); ++i) {
            if (t.shape[i] < 1) throw ParamError("tensor dimensions must be >= 1");
            if (i) out += "x";
            out += std::to_string(t.shape[i]);
            count *= static_cast<std::size_t>(t.shape[i]);
        }
        out += "\n";
        if (count != t.values.size())
            throw ShapeError("tensor '" + t.name + "' value count does not match shape");
    }
    out += "\n";
    for (const auto& t : tensors)
        for (float v : t.values) detail::put_f32_le(out, v);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

std::vector<NamedTensor> read_tensors(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    std::string blob((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    auto next_line = [&]() -> std::string {
        auto nl = blob.find('\n', pos);
        if (nl == std::string::npos) throw FormatError("truncated tensor file header");
        std::string line = blob.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };

    if (next_line() != "HSW1") throw FormatError("missing HSW1 magic");

    std::vector<NamedTensor> tensors;
    while (true) {
        const std::string line = next_line();
        if (line.empty()) break;
        if (line.rfind("tensor=", 0) != 0)
            throw FormatError("malformed tensor header line: '" + line + "'");
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            throw FormatError("malformed tensor header line: '" + line + "'");
        NamedTensor t;
        t.name = line.substr(7, colon - 7);
        std::size_t count = 1;
        std::string dims = line.substr(colon + 1);
        std::size_t dpos = 0;
        while (true) {
            auto x = dims.find('x', dpos);
            const auto dim = detail::parse_int(
                std::string_view(dims).substr(dpos, x == std::string::npos ? x : x - dpos),
                "tensor shape");
            if (dim < 1) throw FormatError("tensor dimension must be >= 1");
            t.shape.push_back(static_cast<int>(dim));
            count *= static_cast<std::size_t>(dim);
            if (x == std::string::npos) break;
            dpos = x + 1;
        }
        t.values.resize(count);
        tensors.push_back(std::move(t));
    }

    std::size_t total = 0;
    for (const auto& t : tensors) total += t.values.size();
    if (blob.size() - pos != total * 4)
        throw FormatError("tensor payload size mismatch: header implies " +
                          std::to_string(total * 4) + " bytes, file has " +
                          std::to_string(blob.size() - pos));
    for (auto& t : tensors)
        for (auto& v : t.values) {
            v = detail::get_f32_le(blob.data() + pos);
            pos += 4;
        }
    return tensors;
}

namespace {

NamedTensor dense_weight_tensor(const std::string& name, const DenseLayer& l) {
    NamedTensor t;
    t.name = name;
    t.shape = {l.weight.rows, l.weight.cols};
    t.values.assign(l.weight.data.begin(), l.weight.data.end());
    return t;
}

NamedTensor vector_tensor(const std::string& name, const std::vector<double>& v) {
    NamedTensor t;
    t.name = name;
    t.shape = {static_cast<int>(v.size())};
    t.values.assign(v.begin(), v.end());
    return t;
}

DenseLayer dense_from(const NamedTensor& w, const NamedTensor& b) {
    if (w.shape.size() != 2) throw FormatError("weight tensor must be 2-D: " + w.name);
    if (b.shape.size() != 1 || b.shape[0] != w.shape[0])
        throw FormatError("bias tensor shape mismatch: " + b.name);
    DenseLayer l;
    l.weight = Matrix(w.shape[0], w.shape[1]);
    l.weight.data.assign(w.values.begin(), w.values.end());
    l.bias.assign(b.values.begin(), b.values.end());
    return l;
}

const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
    for (const auto& t : tensors)
        if (t.name == name) return t;
    throw FormatError("tensor file lacks '" + name + "'");
}

}  // namespace

void save_adapter(const AdapterWeights& weights, const fs::path& path) {
    write_tensors({dense_weight_tensor("layer1.weight", weights.layer1),
                   vector_tensor("layer1.bias", weights.layer1.bias),
                   dense_weight_tensor("layer2.weight", weights.layer2),
                   vector_tensor("layer2.bias", weights.layer2.bias),
                   vector_tensor("activation_slope", {weights.activation_slope})},
                  path);
}

AdapterWeights load_adapter(const fs::path& path) {
    const auto tensors = read_tensors(path);
    AdapterWeights w;
    w.layer1 = dense_from(find_tensor(tensors, "layer1.weight"), find_tensor(tensors, "layer1.bias"));
    w.layer2 = dense_from(find_tensor(tensors, "layer2.weight"), find_tensor(tensors, "layer2.bias"));
    w.activation_slope = find_tensor(tensors, "activation_slope").values.at(0);
    return w;
}

void save_projection(const DenseLayer& projection, const fs::path& path) {
    write_tensors({dense_weight_tensor("projection.weight", projection),
                   vector_tensor("projection.bias", projection.bias)},
                  path);
}

DenseLayer load_projection(const fs::path& path) {
    const auto tensors = read_tensors(path);
    return dense_from(find_tensor(tensors, "projection.weight"),
                      find_tensor(tensors, "projection.bias"));
}

}  // namespace hsikit
