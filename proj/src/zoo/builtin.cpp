#include <cctype>
#include <string>
#include <vector>

#include "amr/common/error.hpp"
#include "amr/zoo/zoo.hpp"

namespace amr::zoo {

namespace {

using Act = Activation;
using Pad = Padding;

// Appends layers to a network; each helper returns the new layer's name.
class Net {
 public:
  std::string dense(std::string name, std::size_t units, Act act = Act::linear, std::string in = {}) {
    LayerSpec s = make(std::move(name), LayerKind::dense, std::move(in));
    s.units = units;
    s.activation = act;
    return push(std::move(s));
  }
  std::string conv2d(std::string name, std::size_t filters, std::size_t kh, std::size_t kw, Pad pad,
                     std::string in = {}, std::vector<std::size_t> strides = {}) {
    LayerSpec s = make(std::move(name), LayerKind::conv2d, std::move(in));
    s.filters = filters;
    s.kernel = {kh, kw};
    s.padding = pad;
    s.activation = Act::relu;
    s.strides = std::move(strides);
    return push(std::move(s));
  }
  std::string conv1d(std::string name, std::size_t filters, std::size_t k, Pad pad, std::string in = {}) {
    LayerSpec s = make(std::move(name), LayerKind::conv1d, std::move(in));
    s.filters = filters;
    s.kernel = {k};
    s.padding = pad;
    s.activation = Act::relu;
    return push(std::move(s));
  }
  std::string pool(std::string name, std::size_t ph, std::size_t pw, std::size_t sh, std::size_t sw, Pad pad,
                   std::string in = {}) {
    LayerSpec s = make(std::move(name), LayerKind::max_pool, std::move(in));
    s.pool = {ph, pw};
    s.strides = {sh, sw};
    s.padding = pad;
    return push(std::move(s));
  }
  std::string dropout(std::string name, double rate, std::string in = {}) {
    LayerSpec s = make(std::move(name), LayerKind::dropout, std::move(in));
    s.rate = rate;
    return push(std::move(s));
  }
  std::string flatten(std::string name, std::string in = {}) {
    return push(make(std::move(name), LayerKind::flatten, std::move(in)));
  }
  std::string reshape(std::string name, std::vector<long> target, std::string in = {}) {
    LayerSpec s = make(std::move(name), LayerKind::reshape, std::move(in));
    s.target_shape = std::move(target);
    return push(std::move(s));
  }
  std::string permute(std::string name, std::vector<std::size_t> perm, std::string in = {}) {
    LayerSpec s = make(std::move(name), LayerKind::permute, std::move(in));
    s.perm = std::move(perm);
    return push(std::move(s));
  }
  std::string slice(std::string name, long axis, std::size_t begin, std::size_t end, std::string in = {}) {
    LayerSpec s = make(std::move(name), LayerKind::slice, std::move(in));
    s.axis = axis;
    s.begin = begin;
    s.end = end;
    return push(std::move(s));
  }
  std::string recurrent(std::string name, LayerKind kind, std::size_t units, bool sequences, std::string in = {}) {
    LayerSpec s = make(std::move(name), kind, std::move(in));
    s.units = units;
    s.return_sequences = sequences;
    return push(std::move(s));
  }
  std::string concat(std::string name, long axis, std::vector<std::string> in) {
    LayerSpec s = make(std::move(name), LayerKind::concat, {});
    s.axis = axis;
    s.inputs = std::move(in);
    return push(std::move(s));
  }
  std::string add(std::string name, std::vector<std::string> in) {
    LayerSpec s = make(std::move(name), LayerKind::add, {});
    s.inputs = std::move(in);
    return push(std::move(s));
  }

  NetworkSpec finish() {
    NetworkSpec n{kFrameShape, std::move(layers_), {}};
    n.output = n.layers.back().name;
    return n;
  }

 private:
  static LayerSpec make(std::string name, LayerKind kind, std::string in) {
    LayerSpec s;
    s.name = std::move(name);
    s.kind = kind;
    if (!in.empty()) s.inputs = {std::move(in)};
    return s;
  }
  std::string push(LayerSpec s) {
    layers_.push_back(std::move(s));
    return layers_.back().name;
  }
  std::vector<LayerSpec> layers_;
};

NetworkSpec cnn1() {
  Net n;
  n.reshape("frame", {2, 128, 1});
  n.conv2d("conv1", 50, 1, 8, Pad::same);
  n.dropout("drop1", 0.5);
  n.conv2d("conv2", 50, 2, 8, Pad::valid);
  n.dropout("drop2", 0.5);
  n.flatten("flatten");
  n.dense("fc1", 256, Act::relu);
  n.dropout("drop3", 0.5);
  n.dense("logits", kNumClasses);
  return n.finish();
}

NetworkSpec cnn2() {
  Net n;
  n.reshape("frame", {2, 128, 1});
  const std::size_t widths[] = {256, 128, 64, 64};
  for (int i = 0; i < 4; ++i) {
    const std::string k = std::to_string(i + 1);
    n.conv2d("conv" + k, widths[i], 2, 8, Pad::same);
    n.pool("pool" + k, 1, 2, 1, 2, Pad::valid);
    n.dropout("drop" + k, 0.5);
  }
  n.flatten("flatten");
  n.dense("fc1", 128, Act::relu);
  n.dropout("drop5", 0.5);
  n.dense("logits", kNumClasses);
  return n.finish();
}

NetworkSpec cldnn() {
  Net n;
  n.reshape("frame", {2, 128, 1});
  n.conv2d("conv1", 256, 1, 3, Pad::valid);
  n.dropout("drop1", 0.5);
  n.conv2d("conv2", 256, 2, 3, Pad::valid);
  n.dropout("drop2", 0.5);
  n.conv2d("conv3", 64, 1, 3, Pad::valid);
  n.dropout("drop3", 0.5);
  n.conv2d("conv4", 80, 1, 3, Pad::valid);
  n.dropout("drop4", 0.5);
  n.reshape("to_sequence", {120, 80});
  n.recurrent("lstm", LayerKind::lstm, 128, false);
  n.dense("fc1", 474, Act::relu);
  n.dropout("drop5", 0.5);
  n.dense("logits", kNumClasses);
  return n.finish();
}

NetworkSpec ic_amcnet() {
  Net n;
  n.reshape("frame", {2, 128, 1});
  n.conv2d("conv1", 64, 1, 8, Pad::same);
  n.pool("pool1", 2, 2, 1, 2, Pad::same);
  n.conv2d("conv2", 64, 1, 4, Pad::same);
  n.conv2d("conv3", 128, 1, 8, Pad::same);
  n.pool("pool2", 1, 2, 1, 2, Pad::same);
  n.dropout("drop1", 0.4);
  n.conv2d("conv4", 128, 1, 8, Pad::same);
  n.dropout("drop2", 0.4);
  n.flatten("flatten");
  n.dense("fc1", 128, Act::relu);
  n.dropout("drop3", 0.4);
  n.dense("logits", kNumClasses);
  return n.finish();
}

// 1x1 reduction followed by parallel (3,1), (1,3) and (1,1) branches.
std::string m_block(Net& n, const std::string& tag, const std::string& in, std::size_t f0, std::size_t f1,
                    std::size_t f2, bool strided) {
  const std::string base = n.conv2d(tag + "_base", f0, 1, 1, Pad::same, in,
                                    strided ? std::vector<std::size_t>{1, 2} : std::vector<std::size_t>{});
  const std::string a = n.conv2d(tag + "_3x1", f1, 3, 1, Pad::same, base);
  const std::string b = n.conv2d(tag + "_1x3", f1, 1, 3, Pad::same, base);
  const std::string c = n.conv2d(tag + "_1x1", f2, 1, 1, Pad::same, base);
  return n.concat(tag + "_concat", -1, {a, b, c});
}

NetworkSpec mcnet() {
  Net n;
  n.reshape("frame", {2, 128, 1});
  n.conv2d("stem", 64, 3, 7, Pad::same);
  const std::string stem = n.pool("stem_pool", 1, 3, 1, 2, Pad::same);
  n.conv2d("pre_3x1", 32, 3, 1, Pad::same, stem);
  const std::string pa = n.pool("pre_3x1_pool", 1, 3, 1, 2, Pad::same);
  n.conv2d("pre_1x3", 32, 1, 3, Pad::same, stem);
  const std::string pb = n.pool("pre_1x3_pool", 1, 3, 1, 2, Pad::same);
  const std::string pre = n.concat("pre_concat", -1, {pa, pb});
  const std::string m1 = m_block(n, "m1", pre, 32, 48, 32, true);
  const std::string m2 = n.add("m2_residual", {m1, m_block(n, "m2", m1, 32, 48, 32, false)});
  const std::string m3 = m_block(n, "m3", m2, 32, 48, 32, true);
  const std::string m4 = n.add("m4_residual", {m3, m_block(n, "m4", m3, 32, 48, 32, false)});
  const std::string m5 = n.add("m5_residual", {m4, m_block(n, "m5", m4, 32, 48, 32, false)});
  const std::string m6 = m_block(n, "m6", m5, 32, 128, 128, false);
  n.pool("head_pool", 2, 8, 2, 8, Pad::valid, m6);
  n.flatten("flatten");
  n.dropout("drop", 0.5);
  n.dense("logits", kNumClasses);
  return n.finish();
}

NetworkSpec stacked_recurrent(LayerKind kind) {
  Net n;
  n.permute("time_major", {1, 0});
  n.recurrent("rnn1", kind, 128, true);
  n.recurrent("rnn2", kind, 128, false);
  n.dense("logits", kNumClasses);
  return n.finish();
}

NetworkSpec mcldnn() {
  Net n;
  using S = std::string;
  const S iq = n.reshape("frame", {2, 128, 1}, S(kNetworkInput));
  const S x1 = n.conv2d("iq_conv", 50, 2, 7, Pad::same, iq);
  n.slice("i_slice", 0, 0, 1, S(kNetworkInput));
  n.reshape("i_seq", {128, 1});
  n.conv1d("i_conv", 50, 8, Pad::causal);
  const S i = n.reshape("i_map", {1, 128, 50});
  n.slice("q_slice", 0, 1, 2, S(kNetworkInput));
  n.reshape("q_seq", {128, 1});
  n.conv1d("q_conv", 50, 8, Pad::causal);
  const S q = n.reshape("q_map", {1, 128, 50});
  n.concat("iq_stack", 0, {i, q});
  const S x2 = n.conv2d("stack_conv", 50, 1, 8, Pad::same);
  n.concat("merge", -1, {x1, x2});
  n.conv2d("merge_conv", 100, 2, 5, Pad::valid);
  n.reshape("to_sequence", {124, 100});
  n.recurrent("lstm1", LayerKind::lstm, 128, true);
  n.recurrent("lstm2", LayerKind::lstm, 128, false);
  n.dense("fc1", 134, Act::selu);
  n.dropout("drop1", 0.5);
  n.dense("fc2", 123, Act::selu);
  n.dropout("drop2", 0.5);
  n.dense("logits", kNumClasses);
  return n.finish();
}

NetworkSpec cgdnet() {
  Net n;
  n.reshape("frame", {2, 128, 1});
  std::vector<std::string> stages;
  for (int i = 0; i < 3; ++i) {
    const std::string k = std::to_string(i + 1);
    n.conv2d("conv" + k, 48, 1, 10, Pad::valid);
    n.pool("pool" + k, 2, 2, 1, 1, Pad::same);
    stages.push_back(n.dropout("drop" + k, 0.2));
  }
  n.concat("skip_concat", 1, {stages[0], stages[2]});
  n.permute("time_major", {1, 0, 2});
  n.reshape("to_sequence", {220, 96});
  n.recurrent("gru", LayerKind::gru, 50, true);
  n.flatten("flatten");
  n.dense("fc1", 158, Act::relu);
  n.dropout("drop4", 0.5);
  n.dense("logits", kNumClasses);
  return n.finish();
}

struct Entry {
  std::string_view id;
  NetworkSpec (*make)();
  TrainDefaults train;
  PublishedFigures published;
};

const Entry kEntries[] = {
    {"CNN1", cnn1, {1024, 1e-4, 100}, {1592383, 100, 0.5423, 0.5523}},
    {"CNN2", cnn2, {1024, 1e-4, 100}, {858123, 100, 0.5725, 0.5633}},
    {"CLDNN", cldnn, {400, 1e-3, 100}, {632531, 100, 0.5650, 0.6158}},
    {"IC-AMCNet", ic_amcnet, {400, 1e-3, 100}, {1264011, 77, 0.5870, 0.6237}},
    {"MCNet", mcnet, {128, 1e-4, 100}, {121611, 63, 0.5453, 0.5432}},
    {"LSTM", [] { return stacked_recurrent(LayerKind::lstm); }, {400, 1e-3, 100}, {200075, 84, 0.5615, 0.5715}},
    {"GRU", [] { return stacked_recurrent(LayerKind::gru); }, {400, 1e-3, 100}, {151179, 54, 0.5526, 0.5753}},
    {"MCLDNN", mcldnn, {400, 1e-3, 100}, {405887, 39, 0.5982, 0.6580}},
    {"CGDNet", cgdnet, {1024, 1e-2, 100}, {1808811, 42, 0.4700, 0.5043}},
};

const Entry& entry(std::string_view id) {
  const auto canon = canonical_model_id(id);
  if (canon)
    for (const auto& e : kEntries)
      if (e.id == *canon) return e;
  std::string ids;
  for (auto k : kModelIds) ids += (ids.empty() ? "" : ", ") + std::string(k);
  throw InvalidConfig("unknown model id '" + std::string(id) + "' (expected one of: " + ids + ")");
}

}  // namespace

std::optional<std::string> canonical_model_id(std::string_view id) {
  auto squash = [](std::string_view s) {
    std::string out;
    for (char c : s)
      if (c != '-' && c != '_' && c != ' ') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string key = squash(id);
  for (auto k : kModelIds)
    if (squash(k) == key) return std::string(k);
  return std::nullopt;
}

ModelConfig builtin_config(std::string_view id) {
  const Entry& e = entry(id);
  ModelConfig cfg;
  cfg.model_id = std::string(e.id);
  cfg.base_model = cfg.model_id;
  cfg.train = e.train;
  cfg.network = e.make();
  return cfg;
}

PublishedFigures published_figures(std::string_view id) { return entry(id).published; }

}  // namespace amr::zoo
