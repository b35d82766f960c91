#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ispu/binary.hpp"
#include "ispu/cost.hpp"
#include "ispu/dense.hpp"
#include "ispu/error.hpp"
#include "ispu/factory.hpp"
#include "ispu/features.hpp"
#include "ispu/model_io.hpp"
#include "ispu/pipeline.hpp"
#include "ispu/synth.hpp"

namespace py = pybind11;
using namespace ispu;

namespace {

py::tuple prediction_tuple(const Prediction& p) {
  return py::make_tuple(std::vector<double>(p.probabilities.begin(), p.probabilities.end()),
                        static_cast<int>(p.label));
}

BitVector bits_from_words(std::vector<std::uint32_t> words) {
  const std::size_t n = words.size() * kWordBits;
  return BitVector(n, std::move(words));
}

py::dict report_dict(const CostReport& r) {
  py::dict d;
  d["architecture"] = r.architecture.name();
  d["in_catalog"] = r.in_catalog;
  d["macs_extrapolated"] = r.macs_extrapolated;
  d["canonical_macs"] = r.canonical_macs;
  d["paper_macs"] = r.paper_macs;
  d["cycles_per_mac"] = r.cycles_per_mac;
  d["m4_cycles_per_mac"] = r.m4_cycles_per_mac;
  d["nn_cycles"] = r.latency ? py::cast(r.latency->nn_cycles) : py::none();
  d["nn_ms"] = r.latency ? py::cast(r.latency->nn_ms) : py::none();
  d["total_ms"] = r.latency ? py::cast(r.latency->total_ms) : py::none();
  d["energy_uj"] = r.energy_uj;
  d["clock_mhz"] = r.clock_mhz;
  d["power_mw"] = r.power_mw;
  d["footprint_bytes"] = r.footprint_bytes;
  d["ram_budget_bytes"] = r.ram_budget_bytes;
  d["deployable"] = r.deployable;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming IMU features, float/binary MLP inference and a sensor cost model";

  static py::exception<Error> ispu_error(m, "IspuError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(ispu_error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.attr("WINDOW_LENGTH") = kWindowLength;
  m.attr("FEATURE_VECTOR_SIZE") = kFeatureVectorSize;
  m.attr("NUM_CLASSES") = kNumClasses;

  py::enum_<ClassLabel>(m, "ClassLabel")
      .value("IDLE", ClassLabel::kIdle)
      .value("STAND_UP", ClassLabel::kStandUp)
      .value("SIT_DOWN", ClassLabel::kSitDown)
      .value("ROTATE", ClassLabel::kRotate)
      .value("MOVE", ClassLabel::kMove);

  // -- features
  py::class_<Acquisition>(m, "Acquisition")
      .def(py::init([](std::int64_t index, std::int16_t x, std::int16_t y, std::int16_t z) {
             return Acquisition{index, x, y, z};
           }),
           py::arg("index"), py::arg("x"), py::arg("y"), py::arg("z"))
      .def_readwrite("index", &Acquisition::index)
      .def_readwrite("x", &Acquisition::x)
      .def_readwrite("y", &Acquisition::y)
      .def_readwrite("z", &Acquisition::z);

  m.def("window_mean", [](std::vector<std::int16_t> w) { return window_mean(w); });
  m.def("window_median", [](std::vector<std::int16_t> w) { return window_median(w); });
  m.def("window_variance", [](std::vector<std::int16_t> w) { return window_variance(w); });
  m.def("window_minmax", [](std::vector<std::int16_t> w) { return window_minmax(w); });

  py::class_<FeatureExtractor>(m, "FeatureExtractor")
      .def(py::init<>())
      .def(
          "push",
          [](FeatureExtractor& self, std::int64_t index, std::int16_t x, std::int16_t y,
             std::int16_t z) -> py::object {
            auto ready = self.push(Acquisition{index, x, y, z});
            if (!ready) return py::none();
            py::dict d;
            d["window_index"] = ready->window_index;
            d["acquisition_index"] = ready->acquisition_index;
            d["features"] = std::vector<double>(ready->features.begin(), ready->features.end());
            return d;
          },
          py::arg("index"), py::arg("x"), py::arg("y"), py::arg("z"))
      .def("reset", &FeatureExtractor::reset)
      .def_property_readonly("acquisitions_seen", &FeatureExtractor::acquisitions_seen)
      .def_property_readonly("windows_completed", &FeatureExtractor::windows_completed);

  // -- inference
  py::class_<FloatModel>(m, "FloatModel")
      .def_property_readonly("hidden_widths", &FloatModel::hidden_widths)
      .def_property_readonly("architecture",
                             [](const FloatModel& fm) { return architecture_of(fm).name(); });
  py::class_<BinaryModel>(m, "BinaryModel")
      .def_property_readonly("hidden_widths", &BinaryModel::hidden_widths)
      .def_property_readonly("architecture",
                             [](const BinaryModel& bm) { return architecture_of(bm).name(); });

  m.def("softmax", [](std::vector<double> z) { return softmax(z); });
  m.def("float_infer",
        [](std::vector<double> f, const FloatModel& fm) { return prediction_tuple(float_infer(f, fm)); });
  m.def("binary_infer", [](std::vector<double> f, const BinaryModel& bm) {
    return prediction_tuple(binary_infer(f, bm));
  });
  m.def("infer", [](std::vector<double> f, const Model& model) {
    return prediction_tuple(infer(f, model));
  });
  m.def("pad_input", [](std::vector<double> f) { return pad_input(f); });
  m.def(
      "binarize",
      [](std::vector<double> x, std::vector<double> gamma, std::vector<double> beta,
         std::vector<double> mu, std::vector<double> sigma, double epsilon) {
        BatchNormParams p{std::move(gamma), std::move(beta), std::move(mu), std::move(sigma),
                          epsilon};
        p.validate();
        const BitVector bits = binarize(x, p);
        return std::vector<std::uint32_t>(bits.words().begin(), bits.words().end());
      },
      py::arg("x"), py::arg("gamma"), py::arg("beta"), py::arg("mu"), py::arg("sigma"),
      py::arg("epsilon") = kDefaultBnEpsilon);
  m.def(
      "xnor_dot",
      [](std::vector<std::uint32_t> a, std::vector<std::uint32_t> b) {
        return xnor_dot(bits_from_words(std::move(a)), bits_from_words(std::move(b)));
      },
      "n - 2 popcount(a ^ b) over packed 32-bit words");
  m.def(
      "fold_bn_threshold",
      [](double gamma, double beta, double mu, double sigma, double epsilon) {
        const auto t = fold_bn_threshold(gamma, beta, mu, sigma, epsilon);
        return py::make_tuple(t.tau, t.flip);
      },
      py::arg("gamma"), py::arg("beta"), py::arg("mu"), py::arg("sigma"),
      py::arg("epsilon") = kDefaultBnEpsilon);

  // -- model files
  m.def("load_model", [](const std::filesystem::path& p) { return load_model(p).model; });
  m.def("parse_model", [](const std::string& text) { return parse_model(text).model; });
  m.def("serialize_model", [](const Model& model) { return serialize_model(model); });
  m.def("save_model",
        [](const Model& model, const std::filesystem::path& p) { save_model(model, p); });
  m.def(
      "make_model",
      [](const std::string& arch, const std::string& init, std::uint64_t seed) {
        auto a = parse_architecture(arch);
        if (!a) throw Error(ErrorKind::kValidation, "unknown architecture '" + arch + "'");
        return make_model(*a, init == "random" ? ModelInit::kRandom : ModelInit::kZero, seed);
      },
      py::arg("arch"), py::arg("init") = "zero", py::arg("seed") = 0);

  // -- cost model
  py::class_<ModelArchitecture>(m, "ModelArchitecture")
      .def_property_readonly("name", &ModelArchitecture::name)
      .def_property_readonly("kind", [](const ModelArchitecture& a) { return to_string(a.kind); })
      .def_readonly("hidden", &ModelArchitecture::hidden)
      .def_readonly("output", &ModelArchitecture::output)
      .def_property_readonly("input", &ModelArchitecture::input)
      .def("__repr__", [](const ModelArchitecture& a) { return "<ModelArchitecture " + a.name() + ">"; });

  m.def("parse_architecture", [](const std::string& name) {
    auto a = parse_architecture(name);
    if (!a) throw Error(ErrorKind::kValidation, "unknown architecture '" + name + "'");
    a->validate();
    return *a;
  });
  m.def("architecture_catalog", &architecture_catalog);
  m.def("published_macs", &published_macs);
  m.def("canonical_macs", &canonical_macs);
  m.def("paper_macs", &paper_macs);
  m.def("memory_footprint", &memory_footprint);

  py::class_<CalibrationTable>(m, "CalibrationTable")
      .def_static("defaults", &CalibrationTable::defaults)
      .def_static("parse", [](const std::string& text) { return parse_calibration(text); })
      .def("format", [](const CalibrationTable& c) { return format_calibration(c); })
      .def_readwrite("clock_mhz", &CalibrationTable::clock_mhz)
      .def_readwrite("feature_ms", &CalibrationTable::feature_ms)
      .def_readwrite("ram_kib", &CalibrationTable::ram_kib)
      .def_readwrite("power_mw", &CalibrationTable::power_mw)
      .def("effective_power_mw", &CalibrationTable::effective_power_mw);

  m.def(
      "estimate_latency",
      [](const ModelArchitecture& a, const CalibrationTable& cal, std::optional<double> cpm) {
        const Latency l = estimate_latency(a, cal, cpm);
        return py::make_tuple(l.nn_cycles, l.nn_ms, l.total_ms);
      },
      py::arg("arch"), py::arg("calibration"), py::arg("cycles_per_mac") = py::none());
  m.def("estimate_energy_uj", &estimate_energy_uj);
  m.def("speedup", &speedup);

  m.def(
      "make_cost_report",
      [](const ModelArchitecture& a, const CalibrationTable& cal, std::optional<double> cpm) {
        return report_dict(make_cost_report(a, cal, cpm));
      },
      py::arg("arch"), py::arg("calibration"), py::arg("cycles_per_mac") = py::none());

  // -- synthetic data and pipeline
  m.def(
      "generate",
      [](const std::string& script, std::uint64_t seed, double noise) {
        ActivityScript s;
        s.segments = parse_script_segments(script);
        s.seed = seed;
        s.noise_floor = noise;
        std::vector<py::tuple> rows;
        for (const auto& r : generate(s)) {
          rows.push_back(py::make_tuple(r.sample.index, r.sample.x, r.sample.y, r.sample.z,
                                        static_cast<int>(r.label)));
        }
        return rows;
      },
      py::arg("script"), py::arg("seed") = 0, py::arg("noise") = kDefaultNoiseFloor,
      "Rows of (index, x, y, z, label) for a script such as 'idle:640,move:640'");

  py::class_<Pipeline>(m, "Pipeline")
      .def(py::init([](const Model& model) { return Pipeline(model); }))
      .def(
          "step",
          [](Pipeline& self, std::int64_t index, std::int16_t x, std::int16_t y,
             std::int16_t z) -> py::object {
            auto c = self.step(Acquisition{index, x, y, z});
            if (!c) return py::none();
            py::dict d;
            d["window_index"] = c->window_index;
            d["acquisition_index"] = c->acquisition_index;
            d["label"] = static_cast<int>(c->label);
            d["probabilities"] =
                std::vector<double>(c->probabilities.begin(), c->probabilities.end());
            return d;
          },
          py::arg("index"), py::arg("x"), py::arg("y"), py::arg("z"))
      .def("reset", &Pipeline::reset)
      .def_property_readonly("inference_count", &Pipeline::inference_count);
}
