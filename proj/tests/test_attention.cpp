// Copyright 2026 The CinCGAN-SE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <cmath>

#include "cincgan/attention.hpp"
#include "cincgan/complex_ops.hpp"
#include "cincgan/errors.hpp"
#include "test_support.hpp"

namespace cincgan::nn {
namespace {

const auto kF64 = torch::TensorOptions().dtype(torch::kFloat64);

void randomize_gates(Atfa& block, double t, double f) {
  torch::NoGradGuard g;
  block->alpha_t.fill_(t);
  block->alpha_f.fill_(f);
}

TEST(Atfa, IdentityAtInitialisation) {
  torch::manual_seed(0);
  for (bool complex_mode : {false, true}) {
    Atfa block(16, complex_mode);
    const auto x = torch::randn({2, complex_mode ? 32 : 16, 12, 9});
    EXPECT_TRUE(torch::equal(block(x), x));
  }
}

TEST(Atfa, PreservesShape) {
  Atfa block(16, false);
  randomize_gates(block, 0.7, -0.3);
  EXPECT_EQ(block(torch::randn({1, 16, 108, 129})).sizes(), (std::vector<int64_t>{1, 16, 108, 129}));
  Atfa cblock(8, true);
  randomize_gates(cblock, 0.7, -0.3);
  EXPECT_EQ(cblock(torch::randn({2, 16, 20, 5})).sizes(), (std::vector<int64_t>{2, 16, 20, 5}));
}

TEST(Atfa, SingleFrameIsFinite) {
  Atfa block(8, false);
  randomize_gates(block, 1.0, 1.0);
  const auto y = block(torch::randn({1, 8, 1, 33}));
  EXPECT_TRUE(torch::isfinite(y).all().item<bool>());
  AxisAttention time(8, AttentionAxis::kTime, false);
  const auto w = time->attention_weights(torch::randn({1, 8, 1, 33}));
  EXPECT_TRUE(torch::allclose(w, torch::ones_like(w)));
}

TEST(Atfa, ChannelMismatchIsShapeError) {
  Atfa block(8, false);
  EXPECT_THROW(block(torch::randn({1, 6, 4, 4})), ShapeError);
  Atfa cblock(8, true);
  EXPECT_THROW(cblock(torch::randn({1, 8, 4, 4})), ShapeError);
}

TEST(AxisAttention, MatchesScalarOracle) {
  torch::manual_seed(1);
  for (auto axis : {AttentionAxis::kTime, AttentionAxis::kFrequency}) {
    AxisAttention att(8, axis, false);
    att->to(torch::kFloat64);
    const int64_t T = 5, F = 4;
    const auto x = torch::randn({1, 8, T, F}, kF64);
    const auto y = att(x);
    const auto q = att->query(x), k = att->key(x), v = att->value(x);
    const int64_t d = att->width;
    auto expected = torch::zeros({1, d, T, F}, kF64);
    for (int64_t t = 0; t < T; ++t)
      for (int64_t f = 0; f < F; ++f) {
        const int64_t L = axis == AttentionAxis::kTime ? T : F;
        std::vector<double> s(L);
        double mx = -1e300;
        for (int64_t j = 0; j < L; ++j) {
          const int64_t tj = axis == AttentionAxis::kTime ? j : t, fj = axis == AttentionAxis::kTime ? f : j;
          double dot = 0.0;
          for (int64_t c = 0; c < d; ++c) dot += q[0][c][t][f].item<double>() * k[0][c][tj][fj].item<double>();
          s[j] = dot / std::sqrt(static_cast<double>(d));
          mx = std::max(mx, s[j]);
        }
        double z = 0.0;
        for (auto& e : s) z += (e = std::exp(e - mx));
        for (int64_t j = 0; j < L; ++j) {
          const int64_t tj = axis == AttentionAxis::kTime ? j : t, fj = axis == AttentionAxis::kTime ? f : j;
          for (int64_t c = 0; c < d; ++c) expected[0][c][t][f] += s[j] / z * v[0][c][tj][fj];
        }
      }
    EXPECT_LT((y - att->output(expected)).abs().max().item<double>(), 1e-10);
  }
}

TEST(AxisAttention, WeightsAreRowStochastic) {
  torch::manual_seed(2);
  AxisAttention att(8, AttentionAxis::kFrequency, true);
  const auto w = att->attention_weights(torch::randn({2, 16, 6, 7}));
  EXPECT_EQ(w.sizes(), (std::vector<int64_t>{12, 7, 7}));
  EXPECT_GE(w.min().item<float>(), 0.0f);
  EXPECT_LT((w.sum(-1) - 1).abs().max().item<float>(), 1e-6);
}

TEST(AxisAttention, ComplexModeAppliesSameWeightsToBothParts) {
  torch::manual_seed(3);
  AxisAttention att(4, AttentionAxis::kTime, true);
  const auto x = torch::randn({1, 8, 6, 5});
  const auto y = att(x);
  // Swapping the parts leaves the magnitude proxy, hence the weights, unchanged.
  const auto swapped = make_complex(imag_part(x), real_part(x));
  const auto ys = att(swapped);
  EXPECT_LT((real_part(ys) - imag_part(y)).abs().max().item<float>(), 1e-6);
  EXPECT_LT((imag_part(ys) - real_part(y)).abs().max().item<float>(), 1e-6);
}

TEST(AxisAttention, LargeInputsStayFinite) {
  torch::manual_seed(4);
  for (bool complex_mode : {false, true}) {
    Atfa block(8, complex_mode);
    randomize_gates(block, 1.0, 1.0);
    const auto x = torch::randn({1, complex_mode ? 16 : 8, 10, 9}) * 1e3;
    EXPECT_TRUE(torch::isfinite(block(x)).all().item<bool>());
  }
}

TEST(AxisAttention, GradientsMatchFiniteDifferences) {
  torch::manual_seed(5);
  for (bool complex_mode : {false, true}) {
    Atfa block(4, complex_mode);
    block->to(torch::kFloat64);
    randomize_gates(block, 0.8, -0.6);
    auto x = torch::randn({2, complex_mode ? 8 : 4, 5, 6}, kF64).requires_grad_();
    const auto target = torch::randn_like(x);
    auto [ps, names] = testing::params_of(*block);
    ps.push_back(x);
    names.push_back("x");
    const auto r = testing::gradcheck([&] { return (block(x) * target).sum(); }, ps, names);
    EXPECT_LT(r.max_relative_error, 1e-3) << r.worst << (complex_mode ? " (complex)" : "");
  }
}

TEST(Aha, EmptyListIsInvalidInput) {
  Aha aha(4, false);
  EXPECT_THROW(aha(std::vector<torch::Tensor>{}), InvalidInputError);
  EXPECT_THROW(aha(std::vector<torch::Tensor>{torch::randn({1, 4, 3, 3}), torch::randn({1, 4, 3, 4})}),
               ShapeError);
}

TEST(Aha, FusionWeightsAreConvex) {
  torch::manual_seed(6);
  for (bool complex_mode : {false, true}) {
    Aha aha(6, complex_mode);
    std::vector<torch::Tensor> maps;
    for (int k = 0; k < 4; ++k) maps.push_back(torch::randn({3, complex_mode ? 12 : 6, 5, 7}) * (k + 1));
    const auto w = aha->fusion_weights(maps);
    EXPECT_EQ(w.sizes(), (std::vector<int64_t>{3, 4, 6}));
    EXPECT_GE(w.min().item<float>(), 0.0f);
    EXPECT_LT((w.sum(1) - 1).abs().max().item<float>(), 1e-6);
  }
}

TEST(Aha, IdenticalMapsAndSingleMapPassThrough) {
  torch::manual_seed(7);
  Aha aha(6, false);
  aha->to(torch::kFloat64);
  const auto m = torch::randn({2, 6, 4, 5}, kF64);
  EXPECT_LT((aha(std::vector<torch::Tensor>{m, m, m}) - m).abs().max().item<double>(), 1e-12);
  EXPECT_LT((aha(std::vector<torch::Tensor>{m}) - m).abs().max().item<double>(), 1e-12);
}

TEST(Aha, ThreeBranchFusionMatchesScalarOracle) {
  torch::manual_seed(8);
  for (bool complex_mode : {false, true}) {
    const int64_t C = 4, parts = complex_mode ? 2 : 1;
    Aha aha(C, complex_mode);
    aha->to(torch::kFloat64);
    std::vector<torch::Tensor> maps;
    for (int k = 0; k < 3; ++k) maps.push_back(torch::randn({2, parts * C, 3, 4}, kF64));
    const auto y = aha(maps);
    const auto W1 = aha->fc1->weight, b1 = aha->fc1->bias, W2 = aha->fc2->weight, b2 = aha->fc2->bias;
    const int64_t H = W1.size(0);
    for (int64_t b = 0; b < 2; ++b) {
      // scores[k][c]
      std::vector<std::vector<double>> scores(3, std::vector<double>(C));
      for (int k = 0; k < 3; ++k) {
        std::vector<double> gap(C, 0.0);
        for (int64_t c = 0; c < C; ++c) {
          for (int64_t t = 0; t < 3; ++t)
            for (int64_t f = 0; f < 4; ++f) {
              const double re = maps[k][b][c][t][f].item<double>();
              if (complex_mode) {
                const double im = maps[k][b][C + c][t][f].item<double>();
                gap[c] += std::sqrt(re * re + im * im + kNormEps);
              } else {
                gap[c] += re;
              }
            }
          gap[c] /= 12.0;
        }
        std::vector<double> hidden(H);
        for (int64_t h = 0; h < H; ++h) {
          double a = b1[h].item<double>();
          for (int64_t c = 0; c < C; ++c) a += W1[h][c].item<double>() * gap[c];
          hidden[h] = std::max(a, 0.0);
        }
        for (int64_t c = 0; c < C; ++c) {
          double a = b2[c].item<double>();
          for (int64_t h = 0; h < H; ++h) a += W2[c][h].item<double>() * hidden[h];
          scores[k][c] = a;
        }
      }
      for (int64_t c = 0; c < C; ++c) {
        double z = 0.0;
        std::vector<double> w(3);
        for (int k = 0; k < 3; ++k) z += (w[k] = std::exp(scores[k][c]));
        for (int64_t p = 0; p < parts; ++p)
          for (int64_t t = 0; t < 3; ++t)
            for (int64_t f = 0; f < 4; ++f) {
              double expected = 0.0;
              for (int k = 0; k < 3; ++k) expected += w[k] / z * maps[k][b][p * C + c][t][f].item<double>();
              EXPECT_NEAR(y[b][p * C + c][t][f].item<double>(), expected, 1e-5);
            }
      }
    }
  }
}

TEST(Aha, GradientsMatchFiniteDifferences) {
  torch::manual_seed(9);
  Aha aha(4, true);
  aha->to(torch::kFloat64);
  auto a = torch::randn({2, 8, 3, 4}, kF64).requires_grad_();
  auto b = torch::randn({2, 8, 3, 4}, kF64).requires_grad_();
  const auto target = torch::randn({2, 8, 3, 4}, kF64);
  auto [ps, names] = testing::params_of(*aha);
  ps.push_back(a);
  ps.push_back(b);
  names.push_back("a");
  names.push_back("b");
  const auto r = testing::gradcheck([&] { return (aha(std::vector<torch::Tensor>{a, b}) * target).sum(); }, ps, names);
  EXPECT_LT(r.max_relative_error, 1e-3) << r.worst;
}

TEST(Aia, DoublesInputAtInitialisation) {
  torch::manual_seed(10);
  for (bool complex_mode : {false, true}) {
    Aia aia(AiaConfig{8, 6, complex_mode});
    const auto x = torch::randn({1, complex_mode ? 16 : 8, 12, 9});
    EXPECT_LT((aia(x) - 2 * x).abs().max().item<float>(), 1e-6);
  }
}

TEST(Aia, PreservesBottleneckShape) {
  Aia aia(AiaConfig{64, 6, false});
  for (auto& p : aia->named_parameters())
    if (p.key().find("alpha") != std::string::npos) p.value().data().fill_(0.5);
  EXPECT_EQ(aia(torch::randn({1, 64, 108, 33})).sizes(), (std::vector<int64_t>{1, 64, 108, 33}));
}

TEST(Aia, RejectsZeroBlocks) { EXPECT_THROW(Aia(AiaConfig{8, 0, false}), InvalidParameterError); }

TEST(Aia, EveryParameterReceivesGradient) {
  torch::manual_seed(11);
  for (bool complex_mode : {false, true}) {
    Aia aia(AiaConfig{8, 3, complex_mode});
    // With zero gates the attention projections are disconnected, so open the gates first.
    for (auto& p : aia->named_parameters())
      if (p.key().find("alpha") != std::string::npos) p.value().data().fill_(0.5);
    const auto x = torch::randn({2, complex_mode ? 16 : 8, 6, 5});
    torch::nn::functional::l1_loss(aia(x), torch::randn_like(x)).backward();
    for (auto& p : aia->named_parameters()) {
      ASSERT_TRUE(p.value().grad().defined()) << p.key();
      EXPECT_GT(p.value().grad().abs().sum().item<float>(), 0.0f) << p.key();
    }
  }
}

TEST(Aia, GatesReceiveGradientAtInitialisation) {
  torch::manual_seed(12);
  Aia aia(AiaConfig{8, 2, false});
  const auto x = torch::randn({2, 8, 6, 5});
  torch::nn::functional::l1_loss(aia(x), torch::randn_like(x)).backward();
  for (auto& p : aia->named_parameters())
    if (p.key().find("alpha") != std::string::npos) EXPECT_GT(p.value().grad().abs().item<float>(), 0.0f) << p.key();
}

}  // namespace
}  // namespace cincgan::nn
