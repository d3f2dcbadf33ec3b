#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "amr/common/error.hpp"
#include "amr/tensor/checkpoint.hpp"
#include "amr/tensor/grad_check.hpp"
#include "amr/tensor/loss.hpp"
#include "amr/tensor/model.hpp"
#include "amr/tensor/optimizer.hpp"
#include "support/layer_cases.hpp"

using namespace amr;

namespace {

NetworkSpec small_net() {
  NetworkSpec net;
  net.input_shape = {2, 8, 1};
  LayerSpec c;
  c.name = "conv", c.kind = LayerKind::conv2d, c.filters = 3, c.kernel = {1, 3}, c.padding = Padding::same;
  c.activation = Activation::relu;
  LayerSpec f;
  f.name = "flat", f.kind = LayerKind::flatten;
  LayerSpec d;
  d.name = "out", d.kind = LayerKind::dense, d.units = 4;
  net.layers = {c, f, d};
  return net;
}

}  // namespace

class LayerGradients : public ::testing::TestWithParam<LayerKind> {};

TEST_P(LayerGradients, MatchFiniteDifferences) {
  const auto cases = amr::testing::random_layer_cases(GetParam(), 10, 11);
  ASSERT_GE(cases.size(), 10u);
  for (const auto& c : cases) {
    const auto r = grad_check(c.spec, c.inputs);
    EXPECT_LT(r.max_rel_error, 1e-4) << c.label << " worst " << r.worst;
    EXPECT_GT(r.checked, 0u) << c.label;
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, LayerGradients, ::testing::ValuesIn(kAllLayerKinds),
                         [](const auto& info) {
                           std::string n(kind_name(info.param));
                           for (auto& ch : n)
                             if (ch == '-') ch = '_';
                           return n;
                         });

TEST(Layers, DenseWorkedExample) {
  LayerSpec d;
  d.name = "d", d.kind = LayerKind::dense, d.units = 2;
  auto p = zero_params<double>(d, {{2}});
  p.tensors[0].data = {1, 0, 0, 1};  // identity kernel
  Tensor<double> x({2, 2}, {1, 2, 3, 4});
  const auto r = layer_forward<double>(d, p, {&x}, {});
  EXPECT_EQ(r.output.data, (std::vector<double>{1, 2, 3, 4}));
  // Unit upstream: dW = x^T 1, db = batch count.
  const auto b = layer_backward<double>(d, p, r.cache, Tensor<double>({2, 2}, 1.0));
  EXPECT_EQ(b.param_grads[0].data, (std::vector<double>{4, 4, 6, 6}));
  EXPECT_EQ(b.param_grads[1].data, (std::vector<double>{2, 2}));
}

TEST(Layers, DropoutRateZeroIsIdentity) {
  LayerSpec s;
  s.name = "d", s.kind = LayerKind::dropout, s.rate = 0.0;
  Rng rng(1);
  Tensor<double> x({2, 3}, {1, -2, 3, -4, 5, -6});
  const auto r = layer_forward<double>(s, {}, {&x}, {Mode::train, &rng, true});
  EXPECT_EQ(r.output.data, x.data);
  s.rate = 0.5;
  const auto e = layer_forward<double>(s, {}, {&x}, {Mode::eval, nullptr, true});
  EXPECT_EQ(e.output.data, x.data);
}

TEST(Layers, ZeroUpstreamGivesZeroGradients) {
  for (LayerKind k : kAllLayerKinds) {
    for (const auto& c : amr::testing::random_layer_cases(k, 2, 5)) {
      Rng rng(3);
      auto p = init_params<double>(c.spec, c.inputs, rng);
      std::vector<Tensor<double>> xs;
      for (const auto& s : c.inputs) {
        Tensor<double> t(batched(2, s));
        for (auto& v : t.data) v = std::uniform_real_distribution<double>(-1, 1)(rng);
        xs.push_back(std::move(t));
      }
      std::vector<const Tensor<double>*> ptrs;
      for (const auto& t : xs) ptrs.push_back(&t);
      const auto f = layer_forward<double>(c.spec, p, ptrs, {Mode::train, &rng, true});
      const auto b = layer_backward<double>(c.spec, p, f.cache, Tensor<double>(f.output.shape, 0.0));
      for (const auto& g : b.input_grads)
        for (double v : g.data) ASSERT_EQ(v, 0.0) << c.label;
      for (const auto& g : b.param_grads)
        for (double v : g.data) ASSERT_EQ(v, 0.0) << c.label;
    }
  }
}

TEST(Layers, StaleCacheIsRejected) {
  LayerSpec d;
  d.name = "d", d.kind = LayerKind::dense, d.units = 2;
  auto p = zero_params<double>(d, {{3}});
  Tensor<double> x({1, 3}, 1.0);
  const auto r = layer_forward<double>(d, p, {&x}, {});
  const Tensor<double> g({1, 2}, 1.0);
  p.version += 1;
  EXPECT_THROW(layer_backward<double>(d, p, r.cache, g), ContractError);
  EXPECT_THROW(layer_backward<double>(d, p, LayerCache<double>{}, g), ContractError);
  auto other = zero_params<double>(d, {{3}});
  EXPECT_THROW(layer_backward<double>(d, other, r.cache, g), ContractError);
}

TEST(Layers, ShapeMismatchThrows) {
  LayerSpec d;
  d.name = "d", d.kind = LayerKind::dense, d.units = 2;
  EXPECT_THROW(infer_shape(d, {{}}), ShapeError);
  LayerSpec c;
  c.name = "c", c.kind = LayerKind::conv2d, c.filters = 1, c.kernel = {3, 3};
  EXPECT_THROW(infer_shape(c, {{2, 8}}), ShapeError);
  EXPECT_THROW(infer_shape(c, {{2, 8, 1}}), ShapeError);
  LayerSpec a;
  a.name = "a", a.kind = LayerKind::add;
  EXPECT_THROW(infer_shape(a, {{3}, {4}}), ShapeError);
}

TEST(Layers, ParamCountsOfRecurrentLayers) {
  LayerSpec l;
  l.name = "l", l.kind = LayerKind::lstm, l.units = 128;
  EXPECT_EQ(param_count(l, {{128, 2}}), 4u * (128 * (2 + 128) + 128));
  l.kind = LayerKind::gru;  // reset-after carries two bias vectors
  EXPECT_EQ(param_count(l, {{128, 2}}), 3u * (128 * (2 + 128) + 2 * 128));
  l.kind = LayerKind::bilstm;
  EXPECT_EQ(param_count(l, {{128, 2}}), 2u * 4u * (128 * (2 + 128) + 128));
  LayerSpec d;
  d.name = "d", d.kind = LayerKind::dense, d.units = 3;
  EXPECT_EQ(param_count(d, {{2}}), 9u);
}

TEST(Loss, UniformLogitsGiveLogOfClassCount) {
  Tensor<double> logits({3, 11}, 0.25);
  const std::vector<std::uint8_t> labels{0, 5, 10};
  const auto r = cross_entropy<double>(logits, labels);
  EXPECT_NEAR(r.loss, std::log(11.0), 1e-12);
}

TEST(Loss, SaturatedLogitsStayFinite) {
  Tensor<double> logits({2, 11}, 0.0);
  logits.data[0] = 1e6;        // right and confident
  logits.data[11 + 3] = 1e6;   // wrong and confident
  const std::vector<std::uint8_t> labels{0, 0};
  const auto r = cross_entropy<double>(logits, labels);
  EXPECT_TRUE(std::isfinite(r.loss));
  EXPECT_NEAR(r.loss, 1e6 / 2, 1.0);
  EXPECT_TRUE(r.grad.all_finite());
}

TEST(Loss, GradientIsSoftmaxMinusTargetOverBatch) {
  Tensor<double> logits({1, 3}, {1.0, 2.0, 3.0});
  const auto r = cross_entropy<double>(logits, std::vector<std::uint8_t>{2});
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  EXPECT_NEAR(r.grad[0], std::exp(1.0) / z, 1e-12);
  EXPECT_NEAR(r.grad[2], std::exp(3.0) / z - 1.0, 1e-12);
}

TEST(Loss, InvalidLabels) {
  Tensor<double> logits({1, 3}, 0.0);
  EXPECT_THROW(cross_entropy<double>(logits, std::vector<std::uint8_t>{3}), InvalidLabel);
  EXPECT_THROW(cross_entropy<double>(logits, Tensor<double>({1, 3}, {1, 1, 0})), InvalidLabel);
  EXPECT_THROW(cross_entropy<double>(logits, Tensor<double>({1, 3}, {0, 0, 0})), InvalidLabel);
  EXPECT_THROW(cross_entropy<double>(logits, Tensor<double>({1, 3}, {0.5, 0.5, 0})), InvalidLabel);
  EXPECT_NO_THROW(cross_entropy<double>(logits, Tensor<double>({1, 3}, {0, 1, 0})));
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  Tensor<double> p({3}, {1, 2, 3}), g({3}, 0.0);
  AdamState<double> st;
  adam_step<double>({&p}, {&g}, st, {});
  EXPECT_EQ(p.data, (std::vector<double>{1, 2, 3}));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Tensor<double> p({3}, {1, 2, 3}), g({3}, {0.5, -2.0, 1e-3});
  AdamState<double> st;
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  adam_step<double>({&p}, {&g}, st, cfg);
  EXPECT_NEAR(p[0], 1 - 0.01, 1e-8);
  EXPECT_NEAR(p[1], 2 + 0.01, 1e-8);
  EXPECT_NEAR(p[2], 3 - 0.01, 1e-6);
  EXPECT_EQ(st.step, 1u);
}

TEST(Adam, NonFiniteGradientRaisesAndLeavesState) {
  Tensor<double> p({2}, {1, 2}), g({2}, {0.1, 0.1});
  AdamState<double> st;
  adam_step<double>({&p}, {&g}, st, {});
  const auto before = p.data;
  const auto m = st.m;
  g.data[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(adam_step<double>({&p}, {&g}, st, {}), TrainingDivergence);
  EXPECT_EQ(p.data, before);
  EXPECT_EQ(st.m, m);
  EXPECT_EQ(st.step, 1u);
}

TEST(Model, SameSeedSameParametersAndOutputs) {
  Model<float> a(small_net(), 42), b(small_net(), 42), c(small_net(), 43);
  Tensor<float> x({2, 2, 8, 1});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(static_cast<float>(i));
  EXPECT_EQ(a.predict(x).data, b.predict(x).data);
  EXPECT_NE(a.predict(x).data, c.predict(x).data);
  EXPECT_EQ(a.total_params(), param_count(small_net()));
}

TEST(Model, TrainingStepReducesLoss) {
  Model<float> m(small_net(), 1);
  Tensor<float> x({4, 2, 8, 1});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(0.3f * static_cast<float>(i));
  const std::vector<std::uint8_t> y{0, 1, 2, 3};
  AdamConfig cfg;
  cfg.learning_rate = 1e-2;
  Adam<float> opt(cfg);
  double first = 0.0, last = 0.0;
  for (int it = 0; it < 150; ++it) {
    m.zero_grad();
    const auto r = cross_entropy(m.forward(x, Mode::train), std::span<const std::uint8_t>(y));
    m.backward(r.grad);
    opt.step(m);
    (it == 0 ? first : last) = r.loss;
  }
  EXPECT_LT(last, 0.1 * first);
}

TEST(Model, BackwardWithoutForwardThrows) {
  Model<float> m(small_net(), 1);
  EXPECT_THROW(m.backward(Tensor<float>({1, 4}, 1.0f)), ContractError);
}

TEST(Topology, CyclesAndUnknownInputsAreInvalid) {
  NetworkSpec net = small_net();
  net.layers[0].inputs = {"out"};
  EXPECT_THROW(resolve_topology(net), InvalidConfig);
  net = small_net();
  net.layers[1].inputs = {"nope"};
  EXPECT_THROW(resolve_topology(net), InvalidConfig);
  net = small_net();
  net.layers[1].name = "conv";
  EXPECT_THROW(resolve_topology(net), InvalidConfig);
}

TEST(Checkpoint, RoundTripRestoresExactValues) {
  Model<float> a(small_net(), 1), b(small_net(), 2);
  std::stringstream ss;
  write_checkpoint(ss, snapshot(a, 77));
  restore(b, read_checkpoint(ss), 77);
  Tensor<float> x({1, 2, 8, 1}, 0.5f);
  EXPECT_EQ(a.predict(x).data, b.predict(x).data);
}

TEST(Checkpoint, HashMismatchIsConsistencyError) {
  Model<float> a(small_net(), 1);
  EXPECT_THROW(restore(a, snapshot(a, 1), 2), ConsistencyError);
}

TEST(Checkpoint, CorruptStreamsReportTheirFault) {
  Model<float> a(small_net(), 1);
  std::stringstream ss;
  write_checkpoint(ss, snapshot(a, 5));
  const std::string good = ss.str();
  const auto fault_of = [](std::string bytes) {
    std::istringstream is(bytes);
    try {
      read_checkpoint(is);
    } catch (const FormatError& e) {
      return e.fault();
    }
    ADD_FAILURE() << "no error";
    return FormatFault::malformed;
  };
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_EQ(fault_of(bad), FormatFault::bad_magic);
  bad = good;
  bad[4] = 9;
  EXPECT_EQ(fault_of(bad), FormatFault::version_mismatch);
  EXPECT_EQ(fault_of(good.substr(0, good.size() - 3)), FormatFault::truncated);
}
