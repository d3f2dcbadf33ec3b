#include <algorithm>

#include <nlohmann/json.hpp>

#include "amr/common/error.hpp"
#include "amr/common/rng.hpp"
#include "amr/zoo/zoo.hpp"

namespace amr::zoo {

using nlohmann::json;

std::size_t param_count(const ModelConfig& cfg) { return amr::param_count(cfg.network); }

void validate(const ModelConfig& cfg) {
  if (!canonical_model_id(cfg.base_model) || *canonical_model_id(cfg.base_model) != cfg.base_model)
    throw InvalidConfig("unknown base model '" + cfg.base_model + "'");
  if (cfg.num_classes == 0) throw InvalidConfig("num_classes must be positive");
  if (cfg.train.batch_size == 0 || cfg.train.max_epochs == 0 || !(cfg.train.learning_rate > 0.0))
    throw InvalidConfig("training defaults must be positive");
  const Topology topo = resolve_topology(cfg.network);
  const auto shapes = infer_shapes(cfg.network, topo);
  const Shape& out = shapes[topo.output];
  if (out != Shape{cfg.num_classes})
    throw InvalidConfig("output layer produces " + to_string(out) + ", expected (" +
                        std::to_string(cfg.num_classes) + ",)");
}

ModelConfig augment(const ModelConfig& base, std::size_t bilstm_units, std::size_t gru_units) {
  if (base.augmented) throw InvalidConfig("config '" + base.model_id + "' is already augmented");
  if (bilstm_units == 0 || gru_units == 0) throw InvalidConfig("augmentation units must be positive");
  validate(base);
  ModelConfig cfg = base;
  NetworkSpec& net = cfg.network;
  const Topology topo = resolve_topology(net);
  const auto shapes = infer_shapes(net, topo);
  const std::size_t out = topo.output;
  if (net.layers[out].kind != LayerKind::dense)
    throw InvalidConfig("config '" + base.model_id + "' has no final dense layer to augment before");
  if (topo.edges[out].size() != 1 || topo.edges[out][0] < 0)
    throw InvalidConfig("final dense layer of '" + base.model_id + "' has no feature input");
  const auto feat_idx = static_cast<std::size_t>(topo.edges[out][0]);
  const std::string feat = net.layers[feat_idx].name;
  Shape fshape = shapes[feat_idx];

  // A recurrent feature layer hands over its whole sequence instead of the
  // last state; parameter counts are unaffected.
  LayerSpec& feat_layer = net.layers[feat_idx];
  const bool recurrent = feat_layer.kind == LayerKind::lstm || feat_layer.kind == LayerKind::gru ||
                         feat_layer.kind == LayerKind::bilstm;
  if (recurrent && !feat_layer.return_sequences) {
    feat_layer.return_sequences = true;
    fshape = infer_shapes(net, topo)[feat_idx];
  }

  std::vector<LayerSpec> extra;
  std::string seq_in = feat;
  if (fshape.size() != 2) {
    const std::size_t F = shape_size(fshape);
    std::size_t steps = 1;
    for (std::size_t t = 16; t >= 1; --t)
      if (F % t == 0) {
        steps = t;
        break;
      }
    LayerSpec r;
    r.name = "aug_sequence";
    r.kind = LayerKind::reshape;
    r.inputs = {feat};
    r.target_shape = {static_cast<long>(steps), static_cast<long>(F / steps)};
    extra.push_back(r);
    seq_in = r.name;
  }
  LayerSpec bi;
  bi.name = "aug_bilstm";
  bi.kind = LayerKind::bilstm;
  bi.inputs = {seq_in};
  bi.units = bilstm_units;
  bi.return_sequences = true;
  extra.push_back(bi);
  LayerSpec gru;
  gru.name = "aug_gru";
  gru.kind = LayerKind::gru;
  gru.inputs = {bi.name};
  gru.units = gru_units;
  extra.push_back(gru);

  for (const auto& l : net.layers)
    for (const auto& e : extra)
      if (l.name == e.name) throw InvalidConfig("layer name '" + e.name + "' already in use");

  // Insert just before the final dense layer and rewire it.
  LayerSpec head = net.layers[out];
  head.inputs = {gru.name};
  net.layers.erase(net.layers.begin() + static_cast<long>(out));
  net.layers.insert(net.layers.begin() + static_cast<long>(out), extra.begin(), extra.end());
  net.layers.insert(net.layers.begin() + static_cast<long>(out + extra.size()), head);
  // Layers that relied on the implicit previous-layer input keep their old source.
  for (std::size_t i = out + extra.size() + 1; i < net.layers.size(); ++i)
    if (net.layers[i].inputs.empty()) net.layers[i].inputs = {net.layers[i - 1].name};
  if (net.output.empty()) net.output = head.name;

  cfg.augmented = Augmentation{bilstm_units, gru_units};
  cfg.model_id = base.base_model + "+BiLSTM+GRU";
  validate(cfg);
  return cfg;
}

namespace {

json layer_to_json(const LayerSpec& s) {
  json j;
  j["name"] = s.name;
  j["kind"] = std::string(kind_name(s.kind));
  if (!s.inputs.empty()) j["inputs"] = s.inputs;
  auto act = [&] { j["activation"] = std::string(activation_name(s.activation)); };
  switch (s.kind) {
    case LayerKind::dense:
      j["units"] = s.units;
      act();
      break;
    case LayerKind::conv2d:
    case LayerKind::conv1d:
      j["filters"] = s.filters;
      j["kernel"] = s.kernel;
      if (!s.strides.empty()) j["strides"] = s.strides;
      j["padding"] = std::string(padding_name(s.padding));
      act();
      break;
    case LayerKind::max_pool:
      j["pool"] = s.pool;
      if (!s.strides.empty()) j["strides"] = s.strides;
      j["padding"] = std::string(padding_name(s.padding));
      break;
    case LayerKind::dropout:
      j["rate"] = s.rate;
      break;
    case LayerKind::activation:
      act();
      break;
    case LayerKind::zero_pad:
      j["pad"] = s.pad;
      break;
    case LayerKind::lstm:
    case LayerKind::gru:
    case LayerKind::bilstm:
      j["units"] = s.units;
      j["return_sequences"] = s.return_sequences;
      break;
    case LayerKind::reshape:
      j["target_shape"] = s.target_shape;
      break;
    case LayerKind::concat:
      j["axis"] = s.axis;
      break;
    case LayerKind::slice:
      j["axis"] = s.axis;
      j["begin"] = s.begin;
      j["end"] = s.end;
      break;
    case LayerKind::permute:
      j["perm"] = s.perm;
      break;
    case LayerKind::flatten:
    case LayerKind::add:
      break;
  }
  return j;
}

// Field readers that report the exact location on failure.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ParseError(key.empty() ? where_ : where_ + "." + key, what);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) const {
    used_.push_back(key);
    auto it = j_.find(key);
    if (it == j_.end()) fail(key, "missing field");
    return *it;
  }

  std::string string(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  long integer(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long>();
  }

  std::size_t positive(const std::string& key) const {
    const long v = integer(key);
    if (v <= 0) fail(key, "must be positive, got " + std::to_string(v));
    return static_cast<std::size_t>(v);
  }

  std::size_t non_negative(const std::string& key) const {
    const long v = integer(key);
    if (v < 0) fail(key, "must be non-negative, got " + std::to_string(v));
    return static_cast<std::size_t>(v);
  }

  double number(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  bool boolean(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_boolean()) fail(key, "expected a boolean");
    return v.get<bool>();
  }

  std::vector<long> int_list(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(key, "expected an array");
    std::vector<long> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) fail(key + "[" + std::to_string(i) + "]", "expected an integer");
      out.push_back(v[i].get<long>());
    }
    return out;
  }

  std::vector<std::size_t> positive_list(const std::string& key, std::size_t len) const {
    const auto raw = int_list(key);
    if (len && raw.size() != len) fail(key, "expected " + std::to_string(len) + " entries");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] <= 0) fail(key + "[" + std::to_string(i) + "]", "must be positive");
      out.push_back(static_cast<std::size_t>(raw[i]));
    }
    return out;
  }

  std::vector<std::string> string_list(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(key, "expected an array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) fail(key + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (std::find(used_.begin(), used_.end(), it.key()) == used_.end()) fail(it.key(), "unknown field");
  }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  mutable std::vector<std::string> used_;
};

LayerSpec layer_from_json(const json& j, const std::string& where) {
  Reader r(j, where);
  LayerSpec s;
  s.name = r.string("name");
  if (s.name.empty()) r.fail("name", "must not be empty");
  const std::string kind = r.string("kind");
  const auto k = parse_kind(kind);
  if (!k) r.fail("kind", "unknown layer kind '" + kind + "'");
  s.kind = *k;
  if (r.has("inputs")) s.inputs = r.string_list("inputs");
  auto read_act = [&] {
    const std::string a = r.string("activation");
    const auto pa = parse_activation(a);
    if (!pa) r.fail("activation", "unknown activation '" + a + "'");
    s.activation = *pa;
  };
  auto read_pad = [&] {
    const std::string p = r.string("padding");
    const auto pp = parse_padding(p);
    if (!pp) r.fail("padding", "unknown padding '" + p + "'");
    s.padding = *pp;
  };
  switch (s.kind) {
    case LayerKind::dense:
      s.units = r.positive("units");
      read_act();
      break;
    case LayerKind::conv2d:
    case LayerKind::conv1d: {
      const std::size_t rank = s.kind == LayerKind::conv2d ? 2 : 1;
      s.filters = r.positive("filters");
      s.kernel = r.positive_list("kernel", rank);
      if (r.has("strides")) s.strides = r.positive_list("strides", rank);
      read_pad();
      read_act();
      break;
    }
    case LayerKind::max_pool:
      s.pool = r.positive_list("pool", 2);
      if (r.has("strides")) s.strides = r.positive_list("strides", 2);
      read_pad();
      break;
    case LayerKind::dropout:
      s.rate = r.number("rate");
      if (!(s.rate >= 0.0 && s.rate < 1.0)) r.fail("rate", "must lie in [0, 1)");
      break;
    case LayerKind::activation:
      read_act();
      break;
    case LayerKind::zero_pad: {
      const auto p = r.int_list("pad");
      if (p.size() != 4) r.fail("pad", "expected 4 entries");
      for (std::size_t i = 0; i < 4; ++i) {
        if (p[i] < 0) r.fail("pad[" + std::to_string(i) + "]", "must be non-negative");
        s.pad[i] = static_cast<std::size_t>(p[i]);
      }
      break;
    }
    case LayerKind::lstm:
    case LayerKind::gru:
    case LayerKind::bilstm:
      s.units = r.positive("units");
      s.return_sequences = r.boolean("return_sequences");
      break;
    case LayerKind::reshape:
      s.target_shape = r.int_list("target_shape");
      break;
    case LayerKind::concat:
      s.axis = r.integer("axis");
      break;
    case LayerKind::slice:
      s.axis = r.integer("axis");
      s.begin = r.non_negative("begin");
      s.end = r.non_negative("end");
      break;
    case LayerKind::permute: {
      const auto p = r.int_list("perm");
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0) r.fail("perm[" + std::to_string(i) + "]", "must be non-negative");
        s.perm.push_back(static_cast<std::size_t>(p[i]));
      }
      break;
    }
    case LayerKind::flatten:
    case LayerKind::add:
      break;
  }
  r.reject_unknown();
  try {
    validate(s);
  } catch (const InvalidConfig& e) {
    throw ParseError(where, e.what());
  }
  return s;
}

}  // namespace

std::string save_config(const ModelConfig& cfg) {
  json j;
  j["schema"] = std::string(kConfigSchema);
  j["model_id"] = cfg.model_id;
  j["base_model"] = cfg.base_model;
  if (cfg.augmented)
    j["augmented"] = {{"bilstm_units", cfg.augmented->bilstm_units}, {"gru_units", cfg.augmented->gru_units}};
  else
    j["augmented"] = nullptr;
  j["num_classes"] = cfg.num_classes;
  j["input_shape"] = cfg.network.input_shape;
  j["train"] = {{"batch_size", cfg.train.batch_size},
                {"learning_rate", cfg.train.learning_rate},
                {"max_epochs", cfg.train.max_epochs}};
  json layers = json::array();
  for (const auto& l : cfg.network.layers) layers.push_back(layer_to_json(l));
  j["layers"] = std::move(layers);
  j["output"] = cfg.network.output;
  return j.dump(2) + "\n";
}

ModelConfig load_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("(document)", std::string("malformed JSON: ") + e.what());
  }
  Reader r(j, "$");
  const std::string schema = r.string("schema");
  if (schema != kConfigSchema) r.fail("schema", "unsupported schema '" + schema + "'");
  ModelConfig cfg;
  cfg.model_id = r.string("model_id");
  cfg.base_model = r.string("base_model");
  const auto canon = canonical_model_id(cfg.base_model);
  if (!canon) r.fail("base_model", "unknown model '" + cfg.base_model + "'");
  cfg.base_model = *canon;
  const json& aug = r.at("augmented");
  if (!aug.is_null()) {
    Reader a(aug, "$.augmented");
    cfg.augmented = Augmentation{a.positive("bilstm_units"), a.positive("gru_units")};
    a.reject_unknown();
  }
  cfg.num_classes = r.positive("num_classes");
  cfg.network.input_shape = r.positive_list("input_shape", 0);
  {
    Reader t(r.at("train"), "$.train");
    cfg.train.batch_size = t.positive("batch_size");
    cfg.train.learning_rate = t.number("learning_rate");
    if (!(cfg.train.learning_rate > 0.0)) t.fail("learning_rate", "must be positive");
    cfg.train.max_epochs = t.positive("max_epochs");
    t.reject_unknown();
  }
  const json& layers = r.at("layers");
  if (!layers.is_array() || layers.empty()) r.fail("layers", "expected a non-empty array");
  for (std::size_t i = 0; i < layers.size(); ++i)
    cfg.network.layers.push_back(layer_from_json(layers[i], "layers[" + std::to_string(i) + "]"));
  cfg.network.output = r.string("output");
  r.reject_unknown();
  try {
    validate(cfg);
  } catch (const InvalidConfig& e) {
    throw ParseError("$", e.what());
  } catch (const ShapeError& e) {
    throw ParseError("$", e.what());
  }
  return cfg;
}

std::uint64_t config_hash(const ModelConfig& cfg) { return fnv1a64(save_config(cfg)); }

}  // namespace amr::zoo
