#include "ispu/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ispu/error.hpp"

namespace ispu {
namespace {

using nlohmann::json;

constexpr char kFormatTag[] = "ispu-model";

std::string hex_row(const BitVector& row) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(row.words().size() * 8);
  for (std::uint32_t w : row.words()) {
    for (int shift = 28; shift >= 0; shift -= 4) out.push_back(digits[(w >> shift) & 0xFu]);
  }
  return out;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

BitVector parse_hex_row(const std::string& text, std::size_t bits, int layer) {
  if (bits % kWordBits != 0) {
    throw LayerError(ErrorKind::kWidthLegality, layer,
                     "input width " + std::to_string(bits) + " is not a multiple of 32");
  }
  if (text.size() != bits / 4) {
    throw LayerError(ErrorKind::kValidation, layer,
                     "packed row has " + std::to_string(text.size()) + " hex digits, expected " +
                         std::to_string(bits / 4));
  }
  std::vector<std::uint32_t> words(bits / kWordBits, 0u);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const int v = hex_value(text[i]);
    if (v < 0) throw Error(ErrorKind::kParse, "invalid hex digit in packed row");
    words[i / 8] = (words[i / 8] << 4) | static_cast<std::uint32_t>(v);
  }
  return BitVector(bits, std::move(words));
}

json bn_to_json(const BatchNormParams& p) {
  return json{{"gamma", p.gamma}, {"beta", p.beta}, {"mu", p.mu},
              {"sigma", p.sigma}, {"epsilon", p.epsilon}};
}

BatchNormParams bn_from_json(const json& j) {
  BatchNormParams p;
  p.gamma = j.at("gamma").get<std::vector<double>>();
  p.beta = j.at("beta").get<std::vector<double>>();
  p.mu = j.at("mu").get<std::vector<double>>();
  p.sigma = j.at("sigma").get<std::vector<double>>();
  p.epsilon = j.contains("epsilon") ? j.at("epsilon").get<double>() : kDefaultBnEpsilon;
  return p;
}

json arch_to_json(const ModelArchitecture& a) {
  return json{{"name", a.name()},
              {"input", a.input()},
              {"hidden", a.hidden},
              {"output", a.output}};
}

json metadata_to_json(const ModelMetadata& meta) {
  json m;
  if (meta.class_names.empty()) {
    std::vector<std::string> names(kClassNames.begin(), kClassNames.end());
    m["classes"] = names;
  } else {
    m["classes"] = meta.class_names;
  }
  m["feature_order"] = meta.feature_order.empty() ? std::string(kFeatureOrderTag)
                                                  : meta.feature_order;
  if (!meta.note.empty()) m["note"] = meta.note;
  return m;
}

json float_to_json(const FloatModel& m) {
  json layers = json::array();
  for (const DenseLayer& l : m.layers) {
    json rows = json::array();
    for (std::size_t r = 0; r < l.out; ++r) {
      rows.push_back(std::vector<double>(l.weights.begin() + static_cast<std::ptrdiff_t>(r * l.in),
                                         l.weights.begin() + static_cast<std::ptrdiff_t>((r + 1) * l.in)));
    }
    layers.push_back(json{{"activation", to_string(l.activation)},
                          {"bias", l.bias},
                          {"weights", rows}});
  }
  return layers;
}

json binary_to_json(const BinaryModel& m) {
  json layers = json::array();
  for (const BinaryDenseLayer& l : m.layers) {
    std::vector<std::string> rows;
    for (const BitVector& row : l.rows) rows.push_back(hex_row(row));
    json jl{{"in", l.in}, {"weights", rows}, {"final", l.is_final}};
    if (!l.is_final) {
      std::vector<int> flips(l.flip.begin(), l.flip.end());
      jl["tau"] = l.tau;
      jl["flip"] = flips;
    }
    layers.push_back(std::move(jl));
  }
  return layers;
}

Activation parse_activation(const std::string& s, int layer) {
  if (s == "relu") return Activation::kRelu;
  if (s == "softmax") return Activation::kSoftmax;
  if (s == "none") return Activation::kNone;
  throw LayerError(ErrorKind::kValidation, layer, "unknown activation '" + s + "'");
}

ModelArchitecture declared_architecture(const json& j, ModelKind kind) {
  ModelArchitecture a;
  a.kind = kind;
  a.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  a.output = j.at("output").get<std::size_t>();
  if (j.contains("input") && j.at("input").get<std::size_t>() != a.input()) {
    throw LayerError(ErrorKind::kValidation, 0,
                     "declared input " + std::to_string(j.at("input").get<std::size_t>()) +
                         " but " + to_string(kind) + " models take " +
                         std::to_string(a.input()));
  }
  for (std::size_t i = 0; i < a.hidden.size(); ++i) {
    if (a.hidden[i] == 0) {
      throw LayerError(ErrorKind::kValidation, static_cast<int>(i) + 1, "empty hidden layer");
    }
    if (kind == ModelKind::kBinary && a.hidden[i] % kWordBits != 0) {
      throw LayerError(ErrorKind::kWidthLegality, static_cast<int>(i) + 1,
                       "hidden width " + std::to_string(a.hidden[i]) +
                           " is not a multiple of 32");
    }
  }
  if (a.output != static_cast<std::size_t>(kNumClasses)) {
    throw LayerError(ErrorKind::kValidation, static_cast<int>(a.hidden.size()) + 1,
                     "output must have " + std::to_string(kNumClasses) + " classes");
  }
  return a;
}

void check_layer_count(const json& layers, const ModelArchitecture& a) {
  if (layers.size() != a.hidden.size() + 1) {
    throw LayerError(ErrorKind::kValidation, static_cast<int>(layers.size()),
                     "payload has " + std::to_string(layers.size()) +
                         " layers, architecture declares " + std::to_string(a.hidden.size() + 1));
  }
}

FloatModel float_from_json(const json& doc, const ModelArchitecture& a) {
  FloatModel m;
  m.input_bn = bn_from_json(doc.at("input_bn"));
  const json& layers = doc.at("layers");
  check_layer_count(layers, a);
  std::size_t prev = a.input();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const int index = static_cast<int>(i) + 1;
    const json& jl = layers[i];
    DenseLayer l;
    l.in = prev;
    l.out = i < a.hidden.size() ? a.hidden[i] : a.output;
    l.activation = parse_activation(jl.at("activation").get<std::string>(), index);
    l.bias = jl.at("bias").get<std::vector<double>>();
    const auto rows = jl.at("weights").get<std::vector<std::vector<double>>>();
    if (rows.size() != l.out) {
      throw LayerError(ErrorKind::kValidation, index,
                       "has " + std::to_string(rows.size()) + " weight rows, architecture declares " +
                           std::to_string(l.out));
    }
    for (const auto& row : rows) {
      if (row.size() != l.in) {
        throw LayerError(ErrorKind::kValidation, index,
                         "weight row length " + std::to_string(row.size()) + ", expected " +
                             std::to_string(l.in));
      }
      l.weights.insert(l.weights.end(), row.begin(), row.end());
    }
    m.layers.push_back(std::move(l));
    prev = m.layers.back().out;
  }
  m.validate();
  return m;
}

BinaryModel binary_from_json(const json& doc, const ModelArchitecture& a) {
  BinaryModel m;
  m.input_bn = bn_from_json(doc.at("input_bn"));
  const json& layers = doc.at("layers");
  check_layer_count(layers, a);
  std::size_t prev = a.input();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const int index = static_cast<int>(i) + 1;
    const json& jl = layers[i];
    BinaryDenseLayer l;
    l.in = jl.contains("in") ? jl.at("in").get<std::size_t>() : prev;
    if (l.in != prev) {
      throw LayerError(ErrorKind::kValidation, index,
                       "input width " + std::to_string(l.in) + " does not match " +
                           std::to_string(prev));
    }
    l.is_final = i + 1 == layers.size();
    if (jl.contains("final") && jl.at("final").get<bool>() != l.is_final) {
      throw LayerError(ErrorKind::kValidation, index, "final flag out of place");
    }
    const std::size_t out = i < a.hidden.size() ? a.hidden[i] : a.output;
    const auto rows = jl.at("weights").get<std::vector<std::string>>();
    if (rows.size() != out) {
      throw LayerError(ErrorKind::kValidation, index,
                       "has " + std::to_string(rows.size()) + " weight rows, architecture declares " +
                           std::to_string(out));
    }
    for (const auto& row : rows) l.rows.push_back(parse_hex_row(row, l.in, index));
    if (!l.is_final) {
      if (jl.contains("bn")) {
        const BatchNormParams bn = bn_from_json(jl.at("bn"));
        if (bn.size() != out) {
          throw LayerError(ErrorKind::kValidation, index, "batch-norm size differs from width");
        }
        try {
          bn.validate();
          for (std::size_t j = 0; j < out; ++j) {
            const auto t = fold_bn_threshold(bn.gamma[j], bn.beta[j], bn.mu[j], bn.sigma[j],
                                             bn.epsilon);
            l.tau.push_back(t.tau);
            l.flip.push_back(t.flip);
          }
        } catch (const LayerError&) {
          throw;
        } catch (const Error& e) {
          throw LayerError(e.kind(), index, e.what());
        }
      } else {
        l.tau = jl.at("tau").get<std::vector<double>>();
        for (int f : jl.at("flip").get<std::vector<int>>()) {
          if (f != 0 && f != 1) throw LayerError(ErrorKind::kValidation, index, "flip must be 0 or 1");
          l.flip.push_back(f == 1);
        }
      }
    }
    m.layers.push_back(std::move(l));
    prev = out;
  }
  const json& affine = doc.at("output_affine");
  m.output_scale = affine.at("scale").get<std::vector<double>>();
  m.output_shift = affine.at("shift").get<std::vector<double>>();
  m.validate();
  return m;
}

}  // namespace

ModelArchitecture architecture_of(const FloatModel& m) {
  ModelArchitecture a;
  a.kind = ModelKind::kFloat;
  a.hidden = m.hidden_widths();
  a.output = m.layers.empty() ? 0 : m.layers.back().out;
  return a;
}

ModelArchitecture architecture_of(const BinaryModel& m) {
  ModelArchitecture a;
  a.kind = ModelKind::kBinary;
  a.hidden = m.hidden_widths();
  a.output = m.layers.empty() ? 0 : m.layers.back().out();
  return a;
}

ModelArchitecture architecture_of(const Model& m) {
  return std::visit([](const auto& model) { return architecture_of(model); }, m);
}

Prediction infer(std::span<const double> features, const Model& m) {
  if (const auto* f = std::get_if<FloatModel>(&m)) return float_infer(features, *f);
  return binary_infer(features, std::get<BinaryModel>(m));
}

std::string serialize_model(const Model& m, const ModelMetadata& meta) {
  std::visit([](const auto& model) { model.validate(); }, m);
  json doc;
  doc["format"] = kFormatTag;
  doc["version"] = std::string(kModelFormatVersion);
  doc["architecture"] = arch_to_json(architecture_of(m));
  doc["metadata"] = metadata_to_json(meta);
  if (const auto* f = std::get_if<FloatModel>(&m)) {
    doc["kind"] = "float";
    doc["input_bn"] = bn_to_json(f->input_bn);
    doc["layers"] = float_to_json(*f);
  } else {
    const auto& b = std::get<BinaryModel>(m);
    doc["kind"] = "binary";
    doc["input_bn"] = bn_to_json(b.input_bn);
    doc["layers"] = binary_to_json(b);
    doc["output_affine"] = json{{"scale", b.output_scale}, {"shift", b.output_shift}};
  }
  return doc.dump(1) + "\n";
}

LoadedModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed model document: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormatTag) {
      throw Error(ErrorKind::kParse, "not an ispu-model document");
    }
    if (!doc.contains("version")) throw Error(ErrorKind::kParse, "model lacks a version field");
    const json& version = doc.at("version");
    const std::string v = version.is_string() ? version.get<std::string>() : version.dump();
    if (v != kModelFormatVersion) {
      throw Error(ErrorKind::kParse, "unsupported model format version " + v);
    }
    const std::string kind = doc.at("kind").get<std::string>();
    LoadedModel loaded;
    if (doc.contains("metadata")) {
      const json& meta = doc.at("metadata");
      if (meta.contains("classes")) {
        loaded.metadata.class_names = meta.at("classes").get<std::vector<std::string>>();
        if (loaded.metadata.class_names.size() != static_cast<std::size_t>(kNumClasses)) {
          throw Error(ErrorKind::kValidation, "metadata lists a class count other than 5");
        }
      }
      loaded.metadata.feature_order = meta.value("feature_order", "");
      loaded.metadata.note = meta.value("note", "");
    }
    if (kind == "float") {
      loaded.model = float_from_json(doc, declared_architecture(doc.at("architecture"), ModelKind::kFloat));
    } else if (kind == "binary") {
      loaded.model = binary_from_json(doc, declared_architecture(doc.at("architecture"), ModelKind::kBinary));
    } else {
      throw Error(ErrorKind::kParse, "unknown model kind '" + kind + "'");
    }
    return loaded;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed model document: ") + e.what());
  }
}

void save_model(const Model& m, const std::filesystem::path& path, const ModelMetadata& meta) {
  const std::string text = serialize_model(m, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace ispu
