/*
 * Copyright 2026 The lexalign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "lexalign/gbt.hpp"
#include "lexalign/shap.hpp"
#include "oracles.hpp"

namespace lexalign::gbt {
namespace {

std::vector<oracle::Tree> ToOracle(const BoostedModel& model) {
  std::vector<oracle::Tree> out;
  for (const RegressionTree& tree : model.trees) {
    oracle::Tree t;
    for (const TreeNode& n : tree.nodes)
      t.push_back({n.feature, n.threshold, n.left, n.right, n.default_left,
                   n.value, n.cover});
    out.push_back(t);
  }
  return out;
}

// Trained ensemble with up to 4 features and depth up to 3; some cells NaN.
BoostedModel RandomEnsemble(std::mt19937_64& gen, Matrix& x) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u;
  const std::size_t m = 1 + gen() % 4;
  const std::size_t n = 8 + gen() % 60;
  x = Matrix(n, m);
  for (double& v : x.data)
    v = u(gen) < 0.1 ? std::numeric_limits<double>::quiet_NaN()
                     : std::round(normal(gen) * 4.0) / 4.0;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = normal(gen) * 0.3;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = std::isnan(x(i, j)) ? 0.5 : x(i, j);
      s += (j % 2 ? v * v : std::sin(2.0 * v)) * (1.0 + j);
    }
    y[i] = s;
  }
  BoosterParams params;
  params.n_rounds = 1 + gen() % 6;
  params.max_depth = 1 + gen() % 3;
  params.learning_rate = std::uniform_real_distribution<double>(0.05, 1.0)(gen);
  params.lambda = std::uniform_real_distribution<double>(0.0, 2.0)(gen);
  return Train(x, y, params);
}

// Hand-built tree with random covers in which features may repeat on a path.
RegressionTree RandomTree(std::mt19937_64& gen, std::size_t m, std::size_t depth) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u(0.05, 0.95);
  RegressionTree tree;
  struct Pending {
    int id;
    std::size_t depth;
  };
  tree.nodes.push_back({});
  tree.nodes[0].cover = 100.0;
  std::vector<Pending> stack{{0, 0}};
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    if (p.depth == depth || (p.depth > 0 && gen() % 4 == 0)) {
      tree.nodes[p.id].value = normal(gen);
      continue;
    }
    const int l = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes.push_back({});
    TreeNode& node = tree.nodes[p.id];
    node.feature = static_cast<int>(gen() % m);
    node.threshold = normal(gen);
    node.default_left = gen() % 2;
    node.left = l;
    node.right = l + 1;
    const double share = u(gen);
    tree.nodes[l].cover = node.cover * share;
    tree.nodes[l + 1].cover = node.cover * (1.0 - share);
    stack.push_back({l, p.depth + 1});
    stack.push_back({l + 1, p.depth + 1});
  }
  return tree;
}

std::vector<double> RandomPoint(std::mt19937_64& gen, std::size_t m) {
  std::normal_distribution<double> normal;
  std::vector<double> x(m);
  for (double& v : x)
    v = gen() % 8 == 0 ? std::numeric_limits<double>::quiet_NaN() : normal(gen);
  return x;
}

void ExpectLocalAccuracy(const ShapExplanation& e) {
  double total = e.base;
  for (double p : e.phi) total += p;
  EXPECT_LT(std::fabs(total - e.prediction), 1e-8);
}

TEST(TreeShap, MatchesBruteForceOnTrainedEnsembles) {
  std::mt19937_64 gen(61);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix x;
    const BoostedModel model = RandomEnsemble(gen, x);
    const std::vector<oracle::Tree> trees = ToOracle(model);
    for (std::size_t i = 0; i < std::min<std::size_t>(x.rows, 5); ++i) {
      const std::span<const double> row(x.row(i), x.cols);
      const ShapExplanation e = TreeShap(model, row);
      ExpectLocalAccuracy(e);
      const std::vector<double> brute = BruteForceShap(model, row);
      const oracle::Vec exact =
          oracle::PermutationShapley(trees, model.learning_rate(),
                                     oracle::Vec(row.begin(), row.end()));
      for (std::size_t j = 0; j < x.cols; ++j) {
        EXPECT_NEAR(e.phi[j], brute[j], 1e-10) << "trial " << trial;
        EXPECT_NEAR(brute[j], exact[j], 1e-10) << "trial " << trial;
      }
    }
    EXPECT_NEAR(TreeShap(model, RandomPoint(gen, x.cols)).base,
                ExpectedOutput(model), 1e-12);
  }
}

TEST(TreeShap, MatchesOracleOnHandBuiltTreesWithRepeatedFeatures) {
  std::mt19937_64 gen(62);
  for (int trial = 0; trial < 200; ++trial) {
    BoostedModel model;
    model.n_features = 1 + gen() % 4;
    model.base_score = 0.25;
    model.params.learning_rate = 0.5;
    for (std::size_t t = 1 + gen() % 3; t > 0; --t)
      model.trees.push_back(RandomTree(gen, model.n_features, 1 + gen() % 3));
    const std::vector<oracle::Tree> trees = ToOracle(model);
    for (int point = 0; point < 3; ++point) {
      const std::vector<double> x = RandomPoint(gen, model.n_features);
      const ShapExplanation e = TreeShap(model, x);
      ExpectLocalAccuracy(e);
      const oracle::Vec exact = oracle::PermutationShapley(trees, 0.5, x);
      for (std::size_t j = 0; j < model.n_features; ++j)
        EXPECT_NEAR(e.phi[j], exact[j], 1e-10) << "trial " << trial;
    }
  }
}

TEST(TreeShap, LocalAccuracyOnLargerModels) {
  std::mt19937_64 gen(63);
  std::normal_distribution<double> normal;
  Matrix x(300, 8);
  for (double& v : x.data) v = normal(gen);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) y[i] = x(i, 0) * x(i, 1) + std::fabs(x(i, 2));
  BoosterParams params;
  params.n_rounds = 200;
  params.max_depth = 6;
  params.learning_rate = 0.05;
  const BoostedModel model = Train(x, y, params);
  for (std::size_t i = 0; i < x.rows; ++i)
    ExpectLocalAccuracy(TreeShap(model, std::span<const double>(x.row(i), 8)));
}

TEST(TreeShap, SingleLeafAndStump) {
  BoostedModel model;
  model.n_features = 2;
  model.base_score = 1.0;
  model.params.learning_rate = 0.1;
  RegressionTree leaf;
  leaf.nodes.push_back({});
  leaf.nodes[0].value = 3.0;
  leaf.nodes[0].cover = 5.0;
  model.trees.push_back(leaf);
  ShapExplanation e = TreeShap(model, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(e.phi, (std::vector<double>{0.0, 0.0}));
  EXPECT_DOUBLE_EQ(e.base, 1.3);
  EXPECT_DOUBLE_EQ(e.prediction, 1.3);

  // Stump on feature 1 with covers 1:3; E = (1 * -2 + 3 * 2) / 4 = 1.
  RegressionTree stump;
  stump.nodes.resize(3);
  stump.nodes[0] = {1, 0.0, 1, 2, true, 0.0, 4.0};
  stump.nodes[1].value = -2.0;
  stump.nodes[1].cover = 1.0;
  stump.nodes[2].value = 2.0;
  stump.nodes[2].cover = 3.0;
  model.trees = {stump};
  e = TreeShap(model, std::vector<double>{5.0, -1.0});
  EXPECT_EQ(e.phi[0], 0.0);
  EXPECT_NEAR(e.phi[1], 0.1 * (-2.0 - 1.0), 1e-15);
  EXPECT_NEAR(e.base, 1.0 + 0.1 * 1.0, 1e-15);
  e = TreeShap(model, std::vector<double>{5.0, std::numeric_limits<double>::quiet_NaN()});
  EXPECT_NEAR(e.phi[1], 0.1 * (-2.0 - 1.0), 1e-15);
}

TEST(TreeShap, XorSplitsCreditEvenly) {
  // Leaves (x0, x1): (0,0) -> 0, (0,1) -> 1, (1,0) -> 1, (1,1) -> 0.
  RegressionTree tree;
  tree.nodes.resize(7);
  tree.nodes[0] = {0, 0.5, 1, 2, true, 0.0, 4.0};
  tree.nodes[1] = {1, 0.5, 3, 4, true, 0.0, 2.0};
  tree.nodes[2] = {1, 0.5, 5, 6, true, 0.0, 2.0};
  const double leaves[4] = {0.0, 1.0, 1.0, 0.0};
  for (int k = 0; k < 4; ++k) {
    tree.nodes[3 + k].value = leaves[k];
    tree.nodes[3 + k].cover = 1.0;
  }
  BoostedModel model;
  model.n_features = 2;
  model.params.learning_rate = 1.0;
  model.trees = {tree};
  for (double a : {0.0, 1.0}) {
    for (double b : {0.0, 1.0}) {
      const ShapExplanation e = TreeShap(model, std::vector<double>{a, b});
      EXPECT_NEAR(e.phi[0], e.phi[1], 1e-15);
      EXPECT_NEAR(e.phi[0], (a != b ? 0.25 : -0.25), 1e-15);
      EXPECT_EQ(e.base, 0.5);
    }
  }
}

TEST(TreeShap, RejectsMissingCoversAndBadWidths) {
  BoostedModel model;
  model.n_features = 1;
  model.params.learning_rate = 1.0;
  RegressionTree tree;
  tree.nodes.resize(3);
  tree.nodes[0] = {0, 0.0, 1, 2, true, 0.0, 0.0};
  model.trees = {tree};
  EXPECT_THROW(TreeShap(model, std::vector<double>{1.0}), Error);
  EXPECT_THROW(BruteForceShap(model, std::vector<double>{1.0}), Error);
  EXPECT_THROW(TreeShap(model, std::vector<double>{1.0, 2.0}), Error);
}

TEST(Importance, MatchesTwoPassOracle) {
  std::mt19937_64 gen(64);
  Matrix x;
  BoostedModel model;
  do {
    model = RandomEnsemble(gen, x);
  } while (x.cols < 3);
  std::vector<ShapExplanation> explanations;
  for (std::size_t i = 0; i < x.rows; ++i) {
    std::vector<double> row(x.row(i), x.row(i) + x.cols);
    for (double& v : row)
      if (std::isnan(v)) v = 0.0;
    explanations.push_back(TreeShap(model, row));
  }
  const std::vector<FeatureImportance> got = GlobalImportance(explanations);
  ASSERT_EQ(got.size(), x.cols);
  for (std::size_t j = 0; j < x.cols; ++j) {
    long double sum = 0.0L;
    oracle::Vec values, phis;
    for (const ShapExplanation& e : explanations) {
      sum += std::fabs(e.phi[j]);
      values.push_back(e.features[j]);
      phis.push_back(e.phi[j]);
    }
    EXPECT_NEAR(got[j].mean_abs_shap, static_cast<double>(sum / explanations.size()),
                1e-12);
    bool constant = true;
    for (double p : phis) constant = constant && p == phis.front();
    if (!constant) {
      const double r = oracle::Pearson(values, phis);
      EXPECT_EQ(got[j].sign, r > 0 ? 1 : (r < 0 ? -1 : 0));
    } else {
      EXPECT_EQ(got[j].sign, 0);
    }
  }
  EXPECT_THROW(GlobalImportance(std::vector<ShapExplanation>{}), Error);
}

}  // namespace
}  // namespace lexalign::gbt
