// Tests for structured relational attention: the node-score (f, g) and
// relation-score (delta) MLPs over one-hot-plus-statement inputs, the
// transition matrix tau, and the factored path weight
// alpha = beta(rels, s) * gamma(type_src, type_dst, s).

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mhgrn/attention.hpp"
#include "mhgrn/error.hpp"
#include "mhgrn/path.hpp"
#include "mhgrn/synthetic.hpp"

namespace {

// Attention stack with bias-only scoring functions: f == fb, g == gb,
// delta == db for every input, tau given explicitly.
mhgrn::AttentionParams bias_only(int m, int d_s, double fb, double gb,
                                 double db, mhgrn::DenseMatrix tau) {
  mhgrn::AttentionParams att;
  att.m = m;
  att.d_s = d_s;
  att.f_mlp.w1 = mhgrn::DenseMatrix(1, 3 + d_s);
  att.f_mlp.b1 = {0.0};
  att.f_mlp.w2 = mhgrn::DenseMatrix(1, 1);
  att.f_mlp.b2 = {fb};
  att.g_mlp = att.f_mlp;
  att.g_mlp.b2 = {gb};
  att.delta_mlp.w1 = mhgrn::DenseMatrix(1, m + d_s);
  att.delta_mlp.b1 = {0.0};
  att.delta_mlp.w2 = mhgrn::DenseMatrix(1, 1);
  att.delta_mlp.b2 = {db};
  att.tau = std::move(tau);
  return att;
}

}  // namespace

TEST(Attention, BiasOnlyGammaIsExpOfSum) {
  // f = ln 2, g = ln 5 for every type: gamma = exp(ln 2 + ln 5) = 10.
  auto att = bias_only(2, 3, std::log(2.0), std::log(5.0), 0.0,
                       mhgrn::DenseMatrix(2, 2));
  std::vector<double> s = {0.0, 0.0, 0.0};
  double g = mhgrn::gamma_score(mhgrn::NodeType::Question,
                                mhgrn::NodeType::Answer, s, att);
  EXPECT_NEAR(g, 10.0, 1e-12);
}

TEST(Attention, NodeScoreMatchesIndependentArithmetic) {
  // Hand-sized f MLP: 3+2 inputs, 2 hidden units. Recompute by scalar loops.
  mhgrn::AttentionParams att;
  att.m = 2;
  att.d_s = 2;
  mhgrn::Rng rng(13);
  att.f_mlp = mhgrn::make_mlp(5, 2, 1, rng);
  att.g_mlp = mhgrn::make_mlp(5, 2, 1, rng);
  att.delta_mlp = mhgrn::make_mlp(4, 2, 1, rng);
  att.tau = mhgrn::DenseMatrix(2, 2);
  std::vector<double> s = {0.25, -0.5};

  // Question one-hot occupies slot 0; statement fills the tail slots.
  std::vector<double> x = {1.0, 0.0, 0.0, 0.25, -0.5};
  double expect = att.f_mlp.b2[0];
  for (int h = 0; h < 2; ++h) {
    double pre = att.f_mlp.b1[h];
    for (int c = 0; c < 5; ++c) pre += att.f_mlp.w1(h, c) * x[c];
    expect += att.f_mlp.w2(0, h) * std::tanh(pre);
  }
  EXPECT_NEAR(mhgrn::f_score(mhgrn::NodeType::Question, s, att), expect,
              1e-15);

  // Answer occupies slot 1, Other slot 2; scores differ from Question.
  EXPECT_NE(mhgrn::f_score(mhgrn::NodeType::Answer, s, att),
            mhgrn::f_score(mhgrn::NodeType::Question, s, att));
  EXPECT_NE(mhgrn::g_score(mhgrn::NodeType::Other, s, att),
            mhgrn::g_score(mhgrn::NodeType::Answer, s, att));
}

TEST(Attention, DeltaUsesOneHotRelationSlot) {
  mhgrn::AttentionParams att;
  att.m = 3;
  att.d_s = 1;
  mhgrn::Rng rng(17);
  att.f_mlp = mhgrn::make_mlp(4, 2, 1, rng);
  att.g_mlp = mhgrn::make_mlp(4, 2, 1, rng);
  att.delta_mlp = mhgrn::make_mlp(4, 2, 1, rng);
  att.tau = mhgrn::DenseMatrix(3, 3);
  std::vector<double> s = {0.7};
  // Relation 2 lights slot 1 of the one-hot block.
  std::vector<double> x = {0.0, 1.0, 0.0, 0.7};
  double expect = att.delta_mlp.b2[0];
  for (int h = 0; h < 2; ++h) {
    double pre = att.delta_mlp.b1[h];
    for (int c = 0; c < 4; ++c) pre += att.delta_mlp.w1(h, c) * x[c];
    expect += att.delta_mlp.w2(0, h) * std::tanh(pre);
  }
  EXPECT_NEAR(mhgrn::delta_score(2, s, att), expect, 1e-15);
  EXPECT_THROW(mhgrn::delta_score(0, s, att), mhgrn::BadRelationId);
  EXPECT_THROW(mhgrn::delta_score(4, s, att), mhgrn::BadRelationId);
}

TEST(Attention, TauIndexing) {
  mhgrn::DenseMatrix tau(2, 2);
  tau(0, 0) = 0.1;
  tau(0, 1) = -0.2;
  tau(1, 0) = 0.4;
  auto att = bias_only(2, 1, 0.0, 0.0, 0.0, tau);
  EXPECT_DOUBLE_EQ(mhgrn::tau_score(1, 2, att), -0.2);
  EXPECT_DOUBLE_EQ(mhgrn::tau_score(2, 1, att), 0.4);
  EXPECT_THROW(mhgrn::tau_score(0, 1, att), mhgrn::BadRelationId);
  EXPECT_THROW(mhgrn::tau_score(1, 3, att), mhgrn::BadRelationId);
}

TEST(Attention, BetaTwoHopKnownValue) {
  // delta == 0.3 per hop, tau(1->2) = -0.2:
  // beta(1, 2) = exp(0.3 + 0.3 - 0.2) = exp(0.4).
  mhgrn::DenseMatrix tau(2, 2);
  tau(0, 1) = -0.2;
  auto att = bias_only(2, 1, 0.0, 0.0, 0.3, tau);
  std::vector<double> s = {0.0};
  EXPECT_NEAR(mhgrn::beta_score({1, 2}, s, att), 1.4918246976412703, 1e-15);
  // Single hop has no transition term.
  EXPECT_NEAR(mhgrn::beta_score({1}, s, att), std::exp(0.3), 1e-15);
  EXPECT_THROW(mhgrn::beta_score({}, s, att), mhgrn::InvalidPath);
  EXPECT_THROW(mhgrn::beta_score({0}, s, att), mhgrn::BadRelationId);
}

TEST(Attention, ScoresArePositiveForRandomParams) {
  mhgrn::Rng rng(31);
  auto att = mhgrn::make_attention_params(4, 3, 8, rng);
  std::vector<double> s = {0.1, -0.2, 0.3};
  for (int r = 1; r <= 4; ++r) {
    EXPECT_GT(std::exp(mhgrn::delta_score(r, s, att)), 0.0);
  }
  EXPECT_GT(mhgrn::beta_score({1, 3, 2}, s, att), 0.0);
  EXPECT_GT(mhgrn::gamma_score(mhgrn::NodeType::Other,
                               mhgrn::NodeType::Question, s, att),
            0.0);
}

TEST(Attention, StatementDimMismatchThrows) {
  mhgrn::Rng rng(3);
  auto att = mhgrn::make_attention_params(2, 3, 4, rng);
  std::vector<double> s_bad = {1.0};  // d_s is 3
  EXPECT_THROW(mhgrn::f_score(mhgrn::NodeType::Question, s_bad, att),
               mhgrn::DimMismatch);
  EXPECT_THROW(mhgrn::beta_score({1}, s_bad, att), mhgrn::DimMismatch);
}

TEST(Attention, AlphaFactorsExactly) {
  auto g = mhgrn::chain_graph(3);
  mhgrn::Rng rng(7);
  auto att = mhgrn::make_attention_params(g.m(), 2, 4, rng);
  std::vector<double> s = {0.4, -0.1};
  mhgrn::ReasoningPath path;
  path.source = 0;
  path.rels = {1, 1};
  path.intermediates = {1};
  path.target = 2;
  double alpha = mhgrn::alpha_path(path, g, s, att);
  double beta = mhgrn::beta_score(path.rels, s, att);
  double gamma = mhgrn::gamma_score(g.phi()[0], g.phi()[2], s, att);
  EXPECT_EQ(alpha, beta * gamma);  // identical expression tree, exact
  EXPECT_GT(alpha, 0.0);
}

TEST(Attention, AlphaValidatesPathAgainstGraph) {
  auto g = mhgrn::chain_graph(3);
  mhgrn::Rng rng(7);
  auto att = mhgrn::make_attention_params(g.m(), 2, 4, rng);
  std::vector<double> s = {0.0, 0.0};
  mhgrn::ReasoningPath missing;
  missing.source = 0;
  missing.rels = {2};  // relation 2 runs backward; 0 -(2)-> 1 does not exist
  missing.target = 1;
  EXPECT_THROW(mhgrn::alpha_path(missing, g, s, att), mhgrn::InvalidPath);

  mhgrn::ReasoningPath ragged;
  ragged.source = 0;
  ragged.rels = {1, 1};
  ragged.intermediates = {};  // needs exactly k-1 intermediates
  ragged.target = 2;
  EXPECT_THROW(mhgrn::alpha_path(ragged, g, s, att), mhgrn::InvalidPath);
}

TEST(Attention, HardTransitionKillsPathWeight) {
  // tau(1->1) = -1e30 drives the weight of any path using that transition
  // to exactly zero (the exponential underflows), many orders below the
  // unpenalized weight.
  auto g = mhgrn::chain_graph(3);
  mhgrn::Rng rng(11);
  auto att = mhgrn::make_attention_params(g.m(), 2, 4, rng);
  std::vector<double> s = {0.2, 0.2};
  mhgrn::ReasoningPath path;
  path.source = 0;
  path.rels = {1, 1};
  path.intermediates = {1};
  path.target = 2;
  double alpha_soft = mhgrn::alpha_path(path, g, s, att);
  att.tau(0, 0) = -1e30;
  double alpha_hard = mhgrn::alpha_path(path, g, s, att);
  EXPECT_GT(alpha_soft, 0.0);
  EXPECT_EQ(alpha_hard, 0.0);
  EXPECT_LT(alpha_hard, 1e-300 * alpha_soft);
}
