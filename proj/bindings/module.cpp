// _hsikit: numpy-facing bindings for the hsikit core.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hsikit/affine.hpp"
#include "hsikit/cube.hpp"
#include "hsikit/degrade.hpp"
#include "hsikit/freq.hpp"
#include "hsikit/metrics.hpp"
#include "hsikit/modulate.hpp"

namespace py = pybind11;
using namespace hsikit;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

// numpy (H, W, B) float32 <-> band-sequential cube
HsiCube cube_from_array(const FloatArray& arr) {
    if (arr.ndim() != 3) throw ShapeError("cube array must have shape (height, width, bands)");
    HsiCube cube(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
                 static_cast<int>(arr.shape(2)));
    auto r = arr.unchecked<3>();
    for (int b = 0; b < cube.bands; ++b)
        for (int y = 0; y < cube.height; ++y)
            for (int x = 0; x < cube.width; ++x) cube.at(y, x, b) = r(y, x, b);
    return cube;
}

py::array_t<float> array_from_cube(const HsiCube& cube) {
    py::array_t<float> arr({cube.height, cube.width, cube.bands});
    auto w = arr.mutable_unchecked<3>();
    for (int b = 0; b < cube.bands; ++b)
        for (int y = 0; y < cube.height; ++y)
            for (int x = 0; x < cube.width; ++x) w(y, x, b) = cube.at(y, x, b);
    return arr;
}

Image image_from_array(const DoubleArray& arr) {
    if (arr.ndim() != 2) throw ShapeError("band image must be 2-D");
    Image img(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    auto r = arr.unchecked<2>();
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) img.at(y, x) = r(y, x);
    return img;
}

py::array_t<double> array_from_image(const Image& img) {
    py::array_t<double> arr({img.height, img.width});
    auto w = arr.mutable_unchecked<2>();
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) w(y, x) = img.at(y, x);
    return arr;
}

BandSpectrum spectrum_from_array(const ComplexArray& arr) {
    if (arr.ndim() != 2) throw ShapeError("spectrum must be 2-D");
    BandSpectrum s(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    auto r = arr.unchecked<2>();
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) s.at(y, x) = r(y, x);
    return s;
}

py::array_t<std::complex<double>> array_from_spectrum(const BandSpectrum& s) {
    py::array_t<std::complex<double>> arr({s.height, s.width});
    auto w = arr.mutable_unchecked<2>();
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) w(y, x) = s.at(y, x);
    return arr;
}

Matrix matrix_from_array(const DoubleArray& arr) {
    if (arr.ndim() != 2) throw ShapeError("matrix must be 2-D");
    Matrix m(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    auto r = arr.unchecked<2>();
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m.at(i, j) = r(i, j);
    return m;
}

py::array_t<double> array_from_matrix(const Matrix& m) {
    py::array_t<double> arr({m.rows, m.cols});
    auto w = arr.mutable_unchecked<2>();
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) w(i, j) = m.at(i, j);
    return arr;
}

FeatureMap features_from_array(const FloatArray& arr) {
    if (arr.ndim() != 3) throw ShapeError("feature map must have shape (channels, height, width)");
    FeatureMap f(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
                 static_cast<int>(arr.shape(2)));
    auto r = arr.unchecked<3>();
    for (int c = 0; c < f.channels; ++c)
        for (int y = 0; y < f.height; ++y)
            for (int x = 0; x < f.width; ++x) f.at(c, y, x) = r(c, y, x);
    return f;
}

py::array_t<float> array_from_features(const FeatureMap& f) {
    py::array_t<float> arr({f.channels, f.height, f.width});
    auto w = arr.mutable_unchecked<3>();
    for (int c = 0; c < f.channels; ++c)
        for (int y = 0; y < f.height; ++y)
            for (int x = 0; x < f.width; ++x) w(c, y, x) = f.at(c, y, x);
    return arr;
}

DenseLayer layer_from_arrays(const DoubleArray& weight, const DoubleArray& bias) {
    DenseLayer l;
    l.weight = matrix_from_array(weight);
    if (bias.ndim() != 1) throw ShapeError("bias must be 1-D");
    l.bias.assign(bias.data(), bias.data() + bias.shape(0));
    return l;
}

QkvProjection qkv_from_dict(const py::dict& d) {
    auto get = [&](const char* key) { return d[key].cast<DoubleArray>(); };
    QkvProjection p;
    p.q = layer_from_arrays(get("q_weight"), get("q_bias"));
    p.k = layer_from_arrays(get("k_weight"), get("k_bias"));
    p.v = layer_from_arrays(get("v_weight"), get("v_bias"));
    return p;
}

CloudSubtype cloud_subtype_from(const std::string& s) {
    if (s == "thick") return CloudSubtype::thick;
    if (s == "thin") return CloudSubtype::thin;
    throw ParamError("cloud subtype must be 'thick' or 'thin'");
}

MissingSubtype missing_subtype_from(const std::string& s) {
    if (s == "complete") return MissingSubtype::complete;
    if (s == "band_wise") return MissingSubtype::band_wise;
    if (s == "partial") return MissingSubtype::partial;
    throw ParamError("missing subtype must be 'complete', 'band_wise' or 'partial'");
}

py::dict prompt_to_dict(const PromptDescription& p) {
    py::dict d;
    d["tags"] = p.tags;
    d["n_missing_bands"] = p.n_missing_bands;
    d["short_text"] = p.short_text;
    d["long_text"] = p.long_text;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hsikit, m) {
    m.doc() = "hyperspectral composite-degradation synthesis and frequency-adaptive restoration";

    py::register_exception<IoError>(m, "IoError");
    py::register_exception<FormatError>(m, "FormatError");
    py::register_exception<ShapeError>(m, "HsiShapeError");
    py::register_exception<BoundsError>(m, "HsiBoundsError");
    py::register_exception<ParamError>(m, "ParamError");
    py::register_exception<VocabError>(m, "VocabError");

    m.def("mix64", &mix64, py::arg("seed"), py::arg("n"),
          "derive a reproducible sub-seed from a master seed and an index");

    // ----- cube -----
    m.def(
        "synth_scene",
        [](int height, int width, int bands, std::uint64_t seed, int n_materials) {
            SceneSpec spec;
            spec.height = height;
            spec.width = width;
            spec.bands = bands;
            spec.seed = seed;
            spec.n_materials = n_materials;
            return array_from_cube(synth_scene(spec));
        },
        py::arg("height"), py::arg("width"), py::arg("bands"), py::arg("seed"),
        py::arg("n_materials") = 4, "deterministic procedural reflectance scene in [0, 1]");

    m.def(
        "write_cube",
        [](const std::filesystem::path& path, const FloatArray& data,
           const std::optional<std::vector<double>>& wavelengths_nm) {
            HsiCube cube = cube_from_array(data);
            if (wavelengths_nm) cube.wavelengths_nm = *wavelengths_nm;
            write_cube(cube, path);
        },
        py::arg("path"), py::arg("data"), py::arg("wavelengths_nm") = py::none());

    m.def(
        "read_cube",
        [](const std::filesystem::path& path) {
            const HsiCube cube = read_cube(path);
            py::object wl = py::none();
            if (!cube.wavelengths_nm.empty()) wl = py::cast(cube.wavelengths_nm);
            return py::make_tuple(array_from_cube(cube), wl);
        },
        py::arg("path"), "returns (data, wavelengths_nm | None)");

    m.def(
        "exclude_bands",
        [](const FloatArray& data, const std::vector<std::pair<int, int>>& ranges) {
            return array_from_cube(exclude_bands(cube_from_array(data), BandExclusionList{ranges}));
        },
        py::arg("data"), py::arg("ranges"), "drop inclusive 1-based band ranges");

    m.def("aviris_band_exclusion",
          [] { return BandExclusionList::aviris_default().ranges; });

    m.def(
        "export_band_pgm",
        [](const FloatArray& data, int band, const std::filesystem::path& path) {
            export_band_pgm(cube_from_array(data), band, path);
        },
        py::arg("data"), py::arg("band"), py::arg("path"));

    // ----- degrade -----
    py::class_<DegradationRecipe>(m, "Recipe")
        .def_readonly("seed", &DegradationRecipe::seed)
        .def_readonly("gate_prob", &DegradationRecipe::gate_prob)
        .def_property_readonly("fired",
                               [](const DegradationRecipe& r) {
                                   std::vector<std::string> names;
                                   for (Family f : r.fired) names.push_back(family_name(f));
                                   return names;
                               })
        .def_property_readonly("cloud_subtype",
                               [](const DegradationRecipe& r) -> py::object {
                                   if (!r.cloud_subtype) return py::none();
                                   return py::str(subtype_name(*r.cloud_subtype));
                               })
        .def_property_readonly("blur_subtype",
                               [](const DegradationRecipe& r) -> py::object {
                                   if (!r.blur_subtype) return py::none();
                                   return py::str(subtype_name(*r.blur_subtype));
                               })
        .def_property_readonly("noise_snr",
                               [](const DegradationRecipe& r) -> py::object {
                                   if (!r.noise_snr) return py::none();
                                   return py::float_(*r.noise_snr);
                               })
        .def_property_readonly("missing_subtype",
                               [](const DegradationRecipe& r) -> py::object {
                                   if (!r.missing_subtype) return py::none();
                                   return py::str(subtype_name(*r.missing_subtype));
                               })
        .def_readonly("missing_bands", &DegradationRecipe::missing_bands)
        .def("to_text", &recipe_to_string)
        .def("__repr__", [](const DegradationRecipe& r) {
            return "<Recipe seed=" + std::to_string(r.seed) + " fired=" +
                   std::to_string(r.fired.size()) + " families>";
        });

    m.def("sample_recipe", &sample_recipe, py::arg("seed"), py::arg("gate_prob"),
          py::arg("bands") = 172, py::arg("missing_k_max") = 0);
    m.def("read_recipe", &read_recipe, py::arg("path"));
    m.def("write_recipe", &write_recipe, py::arg("recipe"), py::arg("path"));

    m.def(
        "degrade_pipeline",
        [](const FloatArray& data, const DegradationRecipe& recipe) {
            auto [cube, prompt] = degrade_pipeline(cube_from_array(data), recipe);
            return py::make_tuple(array_from_cube(cube), prompt_to_dict(prompt));
        },
        py::arg("data"), py::arg("recipe"), "returns (degraded, prompt dict)");

    m.def(
        "apply_cloud",
        [](const FloatArray& data, const std::string& subtype, std::uint64_t seed) {
            const CloudSubtype s = cloud_subtype_from(subtype);
            return array_from_cube(
                apply_cloud(cube_from_array(data), s, CloudParams::defaults_for(s), seed));
        },
        py::arg("data"), py::arg("subtype"), py::arg("seed"));

    m.def(
        "cloud_mask",
        [](int height, int width, const std::string& subtype, std::uint64_t seed) {
            const auto mask =
                cloud_mask(height, width, CloudParams::defaults_for(cloud_subtype_from(subtype)),
                           seed);
            py::array_t<double> arr({height, width});
            auto w = arr.mutable_unchecked<2>();
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x)
                    w(y, x) = mask[static_cast<std::size_t>(y) * width + x];
            return arr;
        },
        py::arg("height"), py::arg("width"), py::arg("subtype"), py::arg("seed"));

    m.def("apply_spatial_blur",
          [](const FloatArray& data) { return array_from_cube(apply_spatial_blur(cube_from_array(data))); });
    m.def("apply_spectral_blur",
          [](const FloatArray& data) { return array_from_cube(apply_spectral_blur(cube_from_array(data))); });
    m.def(
        "apply_noise",
        [](const FloatArray& data, double snr_linear, std::uint64_t seed) {
            return array_from_cube(apply_noise(cube_from_array(data), snr_linear, seed));
        },
        py::arg("data"), py::arg("snr_linear"), py::arg("seed"));
    m.def(
        "apply_band_missing",
        [](const FloatArray& data, const std::string& subtype, int k, std::uint64_t seed) {
            auto [cube, bands] =
                apply_band_missing(cube_from_array(data), missing_subtype_from(subtype), k, seed);
            return py::make_tuple(array_from_cube(cube), bands);
        },
        py::arg("data"), py::arg("subtype"), py::arg("k"), py::arg("seed"));

    m.def("canonical_tokens", [] { return canonical_tokens(); });
    m.def(
        "render_prompt",
        [](const std::vector<std::string>& tags, int n_missing_bands, const std::string& format) {
            return render_prompt(tags, n_missing_bands,
                                 format == "long" ? PromptFormat::long_form
                                                  : PromptFormat::short_form);
        },
        py::arg("tags"), py::arg("n_missing_bands") = 0, py::arg("format") = "short");

    // ----- freq / affine -----
    m.def("fft2_band",
          [](const DoubleArray& band) { return array_from_spectrum(fft2_band(image_from_array(band))); },
          py::arg("band"), "unitary DC-centered 2-D spectrum");
    m.def("ifft2_band",
          [](const ComplexArray& spec) { return array_from_image(ifft2_band(spectrum_from_array(spec))); },
          py::arg("spectrum"));
    m.def(
        "split_low_high",
        [](const ComplexArray& spec, double cutoff_radius) {
            const FreqSplit split = split_low_high(spectrum_from_array(spec), cutoff_radius);
            return py::make_tuple(array_from_spectrum(split.low), array_from_spectrum(split.high));
        },
        py::arg("spectrum"), py::arg("cutoff_radius") = 0.25);
    m.def(
        "residual_spectrum",
        [](const FloatArray& clean, const FloatArray& degraded, int band) {
            return array_from_image(
                residual_spectrum(cube_from_array(clean), cube_from_array(degraded), band));
        },
        py::arg("clean"), py::arg("degraded"), py::arg("band"));

    py::class_<AffineFreqModel>(m, "AffineFreqModel")
        .def_readonly("n_bins", &AffineFreqModel::n_bins)
        .def_property_readonly("lambda_",
                               [](const AffineFreqModel& m_) { return m_.lambda; })
        .def_property_readonly("mu", [](const AffineFreqModel& m_) { return m_.mu; })
        .def_readonly("bin_edges", &AffineFreqModel::bin_edges)
        .def("__repr__", [](const AffineFreqModel& m_) {
            return "<AffineFreqModel bins=" + std::to_string(m_.n_bins) + ">";
        });

    m.def(
        "fit_affine_model",
        [](const FloatArray& clean, const FloatArray& degraded, int n_bins) {
            return fit_affine_model(cube_from_array(clean), cube_from_array(degraded), n_bins);
        },
        py::arg("clean"), py::arg("degraded"), py::arg("n_bins") = 16);
    m.def(
        "invert_affine_model",
        [](const FloatArray& degraded, const AffineFreqModel& model, double epsilon) {
            return array_from_cube(invert_affine_model(cube_from_array(degraded), model, epsilon));
        },
        py::arg("degraded"), py::arg("model"), py::arg("epsilon") = 1e-3);
    m.def("non_invertible_bins", &non_invertible_bins, py::arg("model"), py::arg("epsilon") = 1e-3);
    m.def(
        "radial_bias_profile",
        [](const FloatArray& clean, const FloatArray& degraded, const AffineFreqModel& model) {
            return radial_bias_profile(cube_from_array(clean), cube_from_array(degraded), model);
        },
        py::arg("clean"), py::arg("degraded"), py::arg("model"));
    m.def("write_model_csv", &write_model_csv, py::arg("model"), py::arg("path"));
    m.def("read_model_csv", &read_model_csv, py::arg("path"));

    // ----- metrics / losses -----
    m.def(
        "psnr",
        [](const FloatArray& ref, const FloatArray& test, double data_range) {
            return psnr(cube_from_array(ref), cube_from_array(test), data_range);
        },
        py::arg("ref"), py::arg("test"), py::arg("data_range") = 1.0);
    m.def("sam_degrees", [](const FloatArray& ref, const FloatArray& test) {
        return sam_degrees(cube_from_array(ref), cube_from_array(test));
    });
    m.def("rmse", [](const FloatArray& ref, const FloatArray& test) {
        return rmse(cube_from_array(ref), cube_from_array(test));
    });
    m.def(
        "ergas",
        [](const FloatArray& ref, const FloatArray& test, double scale_ratio) {
            return ergas(cube_from_array(ref), cube_from_array(test), scale_ratio);
        },
        py::arg("ref"), py::arg("test"), py::arg("scale_ratio") = 1.0);
    m.def(
        "evaluate",
        [](const FloatArray& ref, const FloatArray& test, double data_range) {
            const MetricsReport r = evaluate(cube_from_array(ref), cube_from_array(test), data_range);
            py::dict d;
            d["psnr_db"] = r.psnr_db;
            d["sam_deg"] = r.sam_deg;
            d["rmse"] = r.rmse;
            d["ergas"] = r.ergas;
            return d;
        },
        py::arg("ref"), py::arg("test"), py::arg("data_range") = 1.0);
    m.def(
        "total_loss",
        [](const FloatArray& ref, const FloatArray& test, int swt_levels) {
            const LossReport r = total_loss(cube_from_array(ref), cube_from_array(test), {},
                                            swt_levels);
            py::dict d;
            d["l1"] = r.l1;
            d["sam_loss_rad"] = r.sam_loss_rad;
            d["swt"] = r.swt;
            d["bmse"] = r.bmse;
            d["total"] = r.total;
            d["weights"] = py::make_tuple(r.weights.l1, r.weights.sam, r.weights.swt,
                                          r.weights.bmse);
            return d;
        },
        py::arg("ref"), py::arg("test"), py::arg("swt_levels") = 2);
    m.def(
        "swt2_haar",
        [](const DoubleArray& img, int levels) {
            const int h = static_cast<int>(img.shape(0));
            const int w = static_cast<int>(img.shape(1));
            std::vector<double> data(img.data(), img.data() + img.size());
            const auto subbands = swt2_haar(data, h, w, levels);
            py::list out;
            for (const auto& sb : subbands) {
                py::array_t<double> arr({h, w});
                std::copy(sb.begin(), sb.end(), arr.mutable_data());
                out.append(arr);
            }
            return out;
        },
        py::arg("image"), py::arg("levels") = 1);

    // ----- modulation / attention -----
    m.def(
        "encode_tags",
        [](const std::vector<std::string>& tags, int d_text) {
            return encode_tags(tags, canonical_tokens(), d_text).embedding;
        },
        py::arg("tags"), py::arg("d_text") = 512);
    m.def(
        "adapt",
        [](const std::vector<double>& embedding, const DoubleArray& w1, const DoubleArray& b1,
           const DoubleArray& w2, const DoubleArray& b2, double slope) {
            AdapterWeights w;
            w.layer1 = layer_from_arrays(w1, b1);
            w.layer2 = layer_from_arrays(w2, b2);
            w.activation_slope = slope;
            TaskDescriptor d;
            d.embedding = embedding;
            return adapt(d, w).embedding;
        },
        py::arg("embedding"), py::arg("w1"), py::arg("b1"), py::arg("w2"), py::arg("b2"),
        py::arg("slope") = 0.01);
    m.def(
        "make_controllers",
        [](const std::vector<double>& embedding, const DoubleArray& weight, const DoubleArray& bias) {
            TaskDescriptor d;
            d.embedding = embedding;
            const ControllerPair ctrl = make_controllers(d, layer_from_arrays(weight, bias));
            return py::make_tuple(ctrl.lambda_low, ctrl.lambda_high, ctrl.mu);
        },
        py::arg("embedding"), py::arg("weight"), py::arg("bias"));
    m.def(
        "modulate_features",
        [](const FloatArray& features, const std::vector<double>& lambda_low,
           const std::vector<double>& lambda_high, const std::vector<double>& mu,
           double cutoff_radius) {
            ControllerPair ctrl{lambda_low, lambda_high, mu};
            return array_from_features(
                modulate_features(features_from_array(features), ctrl, cutoff_radius));
        },
        py::arg("features"), py::arg("lambda_low"), py::arg("lambda_high"), py::arg("mu"),
        py::arg("cutoff_radius") = 0.25);
    m.def(
        "cross_attend",
        [](const DoubleArray& alpha, const DoubleArray& beta, const py::dict& proj_alpha,
           const py::dict& proj_beta, double d_k) {
            auto [to_beta, to_alpha] =
                cross_attend(matrix_from_array(alpha), matrix_from_array(beta),
                             qkv_from_dict(proj_alpha), qkv_from_dict(proj_beta), d_k);
            return py::make_tuple(array_from_matrix(to_beta), array_from_matrix(to_alpha));
        },
        py::arg("alpha"), py::arg("beta"), py::arg("proj_alpha"), py::arg("proj_beta"),
        py::arg("d_k"));
    m.def(
        "self_attend",
        [](const DoubleArray& gamma, const py::dict& proj, double d_k) {
            return array_from_matrix(
                self_attend(matrix_from_array(gamma), qkv_from_dict(proj), d_k));
        },
        py::arg("gamma"), py::arg("proj"), py::arg("d_k"));
}
