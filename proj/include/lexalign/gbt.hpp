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

#ifndef LEXALIGN_GBT_HPP_
#define LEXALIGN_GBT_HPP_

// Gradient-boosted regression trees for squared error with exact greedy
// split search.
//
// Each round fits one tree to g_i = yhat_i - y_i, h_i = 1:
//   gain(split) = 1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda)
//                      - G^2/(H+lambda)] - gamma
//   leaf weight = -G / (H + lambda)
// Trees store unshrunk leaf weights. Prediction starts at base_score and adds
// learning_rate * leaf for each tree in order, the same update applied to the
// training predictions, so Predict reproduces them bit for bit.
//
// Rows with value x go left iff x < threshold. Thresholds are midpoints
// between adjacent distinct training values. A NaN feature value follows the
// node's default branch, which is the child that received more non-missing
// training weight (left on ties). Among equal gains the lowest feature index
// wins, then the lowest threshold.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexalign/error.hpp"
#include "lexalign/matrix.hpp"

namespace lexalign::gbt {

struct BoosterParams {
  std::size_t n_rounds = 10000;
  std::size_t max_depth = 10;
  double learning_rate = 0.02;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  std::optional<double> base_score;  // unset: mean of the targets

  void Check() const {
    if (max_depth < 1) Fail("booster: max_depth must be at least 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      Fail("booster: learning_rate must be in (0, 1]");
    if (!(lambda >= 0.0)) Fail("booster: lambda must be non-negative");
    if (!(gamma >= 0.0)) Fail("booster: gamma must be non-negative");
    if (!(min_child_weight >= 0.0))
      Fail("booster: min_child_weight must be non-negative");
  }
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  bool default_left = true;
  double value = 0.0;  // leaf weight, unshrunk
  double cover = 0.0;  // training weight (sum of hessians) reaching the node

  bool is_leaf() const { return left < 0; }
};

// Routing shared by prediction and both SHAP routines.
inline bool GoesLeft(const TreeNode& node, double x) {
  if (std::isnan(x)) return node.default_left;
  return x < node.threshold;
}

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  std::size_t LeafIndex(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const TreeNode& node = nodes[i];
      i = static_cast<std::size_t>(GoesLeft(node, x[node.feature]) ? node.left
                                                                    : node.right);
    }
    return i;
  }
  double Eval(std::span<const double> x) const {
    return nodes[LeafIndex(x)].value;
  }
  std::size_t Depth(std::size_t i = 0) const {
    if (nodes[i].is_leaf()) return 0;
    return 1 + std::max(Depth(nodes[i].left), Depth(nodes[i].right));
  }
};

struct BoostedModel {
  BoosterParams params;
  double base_score = 0.0;
  std::vector<RegressionTree> trees;
  std::vector<std::string> feature_names;
  std::size_t n_features = 0;
  // Training mean squared error after each round (index 0: base score only).
  std::vector<double> training_mse;

  double learning_rate() const { return params.learning_rate; }
};

inline double Predict(const BoostedModel& model, std::span<const double> x) {
  if (x.size() != model.n_features) {
    Fail("predict: expected " + std::to_string(model.n_features) +
         " features, got " + std::to_string(x.size()));
  }
  double out = model.base_score;
  for (const RegressionTree& tree : model.trees)
    out += model.params.learning_rate * tree.Eval(x);
  return out;
}

// Mean that returns c exactly for constant input c.
inline double ShiftedMean(std::span<const double> values) {
  const double pivot = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - pivot;
  return pivot + sum / static_cast<double>(values.size());
}

namespace internal {

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  bool default_left = true;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& features, std::span<const double> gradients,
              const BoosterParams& params,
              const std::vector<std::vector<std::uint32_t>>& sorted,
              const std::vector<std::vector<std::uint32_t>>& missing)
      : x_(features), g_(gradients), params_(params) {
    leaf_of_row_.assign(features.rows, 0);
    NodeRows root;
    root.sorted = sorted;
    root.missing = missing;
    Grow(std::move(root), 0);
  }

  RegressionTree Take() { return std::move(tree_); }
  const std::vector<std::uint32_t>& leaf_of_row() const { return leaf_of_row_; }

 private:
  // Rows of a node, per feature: non-missing rows sorted by value, and the
  // rows whose value is missing.
  struct NodeRows {
    std::vector<std::vector<std::uint32_t>> sorted;
    std::vector<std::vector<std::uint32_t>> missing;
  };

  double Score(double g, double h) const {
    return g * g / (h + params_.lambda);
  }

  int Grow(NodeRows rows, std::size_t depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    // Totals in a fixed order: feature 0's sorted rows, then its missing rows.
    double g_total = 0.0;
    double h_total = 0.0;
    for (std::uint32_t r : rows.sorted[0]) g_total += g_[r], h_total += 1.0;
    for (std::uint32_t r : rows.missing[0]) g_total += g_[r], h_total += 1.0;
    tree_.nodes[id].cover = h_total;

    SplitCandidate best;
    if (depth < params_.max_depth) best = FindSplit(rows, g_total, h_total);

    if (best.feature < 0) {
      tree_.nodes[id].value = -g_total / (h_total + params_.lambda);
      for (const auto* list : {&rows.sorted[0], &rows.missing[0]})
        for (std::uint32_t r : *list) leaf_of_row_[r] = static_cast<std::uint32_t>(id);
      return id;
    }

    const std::size_t f = static_cast<std::size_t>(best.feature);
    std::vector<char> to_left(x_.rows, 0);
    for (std::uint32_t r : rows.sorted[f])
      to_left[r] = x_(r, f) < best.threshold;
    for (std::uint32_t r : rows.missing[f]) to_left[r] = best.default_left;

    NodeRows left, right;
    const std::size_t m = rows.sorted.size();
    left.sorted.resize(m);
    left.missing.resize(m);
    right.sorted.resize(m);
    right.missing.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::uint32_t r : rows.sorted[j])
        (to_left[r] ? left : right).sorted[j].push_back(r);
      for (std::uint32_t r : rows.missing[j])
        (to_left[r] ? left : right).missing[j].push_back(r);
    }
    rows = NodeRows();

    tree_.nodes[id].feature = best.feature;
    tree_.nodes[id].threshold = best.threshold;
    tree_.nodes[id].default_left = best.default_left;
    const int l = Grow(std::move(left), depth + 1);
    const int r = Grow(std::move(right), depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  SplitCandidate FindSplit(const NodeRows& rows, double g_total,
                           double h_total) const {
    SplitCandidate best;
    const double parent = Score(g_total, h_total);
    for (std::size_t f = 0; f < rows.sorted.size(); ++f) {
      const auto& order = rows.sorted[f];
      if (order.size() < 2) continue;
      double g_missing = 0.0;
      double h_missing = 0.0;
      for (std::uint32_t r : rows.missing[f]) g_missing += g_[r], h_missing += 1.0;
      const double g_present = g_total - g_missing;
      const double h_present = h_total - h_missing;

      double g_left = 0.0;
      double h_left = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        g_left += g_[order[i]];
        h_left += 1.0;
        const double a = x_(order[i], f);
        const double b = x_(order[i + 1], f);
        if (!(a < b)) continue;
        double threshold = a + (b - a) / 2.0;
        if (!(threshold > a)) threshold = b;

        const double h_right = h_present - h_left;
        const bool default_left = h_left >= h_right;
        double gl = g_left, hl = h_left;
        double gr = g_present - g_left, hr = h_right;
        if (default_left) {
          gl += g_missing;
          hl += h_missing;
        } else {
          gr += g_missing;
          hr += h_missing;
        }
        if (hl < params_.min_child_weight || hr < params_.min_child_weight)
          continue;
        const double gain =
            0.5 * (Score(gl, hl) + Score(gr, hr) - parent) - params_.gamma;
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.threshold = threshold;
          best.default_left = default_left;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const double> g_;
  const BoosterParams& params_;
  RegressionTree tree_;
  std::vector<std::uint32_t> leaf_of_row_;
};

}  // namespace internal

inline BoostedModel Train(const Matrix& features, std::span<const double> targets,
                          const BoosterParams& params,
                          std::vector<std::string> feature_names = {}) {
  params.Check();
  const std::size_t n = features.rows;
  const std::size_t m = features.cols;
  if (n == 0 || m == 0) Fail("train: empty data");
  if (n < 2) Fail("train: needs at least 2 rows");
  if (targets.size() != n) Fail("train: targets and features differ in rows");
  for (double y : targets)
    if (!std::isfinite(y)) Fail("train: targets must be finite");
  if (!feature_names.empty() && feature_names.size() != m)
    Fail("train: feature name count does not match columns");
  if (feature_names.empty())
    for (std::size_t j = 0; j < m; ++j)
      feature_names.push_back("f" + std::to_string(j));

  BoostedModel model;
  model.params = params;
  model.n_features = m;
  model.feature_names = std::move(feature_names);
  model.base_score = params.base_score ? *params.base_score : ShiftedMean(targets);

  std::vector<std::vector<std::uint32_t>> sorted(m), missing(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::uint32_t r = 0; r < n; ++r)
      (std::isnan(features(r, j)) ? missing[j] : sorted[j]).push_back(r);
    std::stable_sort(sorted[j].begin(), sorted[j].end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return features(a, j) < features(b, j);
                     });
  }

  std::vector<double> yhat(n, model.base_score);
  std::vector<double> gradients(n);
  auto mse = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      sum += (yhat[i] - targets[i]) * (yhat[i] - targets[i]);
    return sum / static_cast<double>(n);
  };
  model.training_mse.push_back(mse());

  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) gradients[i] = yhat[i] - targets[i];
    internal::TreeBuilder builder(features, gradients, params, sorted, missing);
    const auto& leaf_of_row = builder.leaf_of_row();
    RegressionTree tree = builder.Take();
    for (std::size_t i = 0; i < n; ++i)
      yhat[i] += params.learning_rate * tree.nodes[leaf_of_row[i]].value;
    model.trees.push_back(std::move(tree));
    model.training_mse.push_back(mse());
  }
  return model;
}

// ---------------------------------------------------------------------------
// model.json

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::ordered_json ModelToJson(const BoostedModel& model) {
  nlohmann::ordered_json out;
  out["format"] = "lexalign-gbt";
  out["version"] = kModelFormatVersion;
  out["shrinkage"] = "applied at prediction; leaf values are unshrunk";
  nlohmann::ordered_json params;
  params["n_rounds"] = model.params.n_rounds;
  params["max_depth"] = model.params.max_depth;
  params["learning_rate"] = model.params.learning_rate;
  params["lambda"] = model.params.lambda;
  params["gamma"] = model.params.gamma;
  params["min_child_weight"] = model.params.min_child_weight;
  if (model.params.base_score)
    params["base_score"] = *model.params.base_score;
  else
    params["base_score"] = "auto";
  out["params"] = params;
  out["base_score"] = model.base_score;
  out["n_features"] = model.n_features;
  out["feature_names"] = model.feature_names;
  out["trees"] = nlohmann::ordered_json::array();
  for (const RegressionTree& tree : model.trees) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const TreeNode& node : tree.nodes) {
      nlohmann::ordered_json record;
      record["feature"] = node.feature;
      record["threshold"] = node.threshold;
      record["left"] = node.left;
      record["right"] = node.right;
      record["default_left"] = node.default_left;
      record["value"] = node.value;
      record["cover"] = node.cover;
      nodes.push_back(std::move(record));
    }
    out["trees"].push_back({{"nodes", std::move(nodes)}});
  }
  return out;
}

inline BoostedModel ModelFromJson(const nlohmann::json& in) {
  try {
    if (in.at("format") != "lexalign-gbt") Fail("model: unknown format");
    if (in.at("version").get<int>() != kModelFormatVersion)
      Fail("model: unsupported version");
    BoostedModel model;
    const auto& params = in.at("params");
    model.params.n_rounds = params.at("n_rounds").get<std::size_t>();
    model.params.max_depth = params.at("max_depth").get<std::size_t>();
    model.params.learning_rate = params.at("learning_rate").get<double>();
    model.params.lambda = params.at("lambda").get<double>();
    model.params.gamma = params.at("gamma").get<double>();
    model.params.min_child_weight = params.at("min_child_weight").get<double>();
    if (params.at("base_score").is_number())
      model.params.base_score = params.at("base_score").get<double>();
    model.base_score = in.at("base_score").get<double>();
    model.n_features = in.at("n_features").get<std::size_t>();
    model.feature_names =
        in.at("feature_names").get<std::vector<std::string>>();
    for (const auto& tree_json : in.at("trees")) {
      RegressionTree tree;
      for (const auto& record : tree_json.at("nodes")) {
        TreeNode node;
        node.feature = record.at("feature").get<int>();
        node.threshold = record.at("threshold").get<double>();
        node.left = record.at("left").get<int>();
        node.right = record.at("right").get<int>();
        node.default_left = record.at("default_left").get<bool>();
        node.value = record.at("value").get<double>();
        node.cover = record.at("cover").get<double>();
        tree.nodes.push_back(node);
      }
      if (tree.nodes.empty()) Fail("model: tree without nodes");
      const int count = static_cast<int>(tree.nodes.size());
      for (const TreeNode& node : tree.nodes) {
        if (node.is_leaf()) continue;
        if (node.left >= count || node.right < 0 || node.right >= count ||
            node.feature < 0 ||
            static_cast<std::size_t>(node.feature) >= model.n_features)
          Fail("model: malformed tree node");
      }
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    Fail(std::string("model: invalid JSON: ") + e.what());
  }
}

}  // namespace lexalign::gbt

#endif  // LEXALIGN_GBT_HPP_
