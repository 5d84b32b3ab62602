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

#ifndef LEXALIGN_SHAP_HPP_
#define LEXALIGN_SHAP_HPP_

// Path-dependent TreeSHAP for BoostedModel, plus an exhaustive Shapley
// oracle that uses the same cover-weighted conditional expectations.
//
// A feature outside the coalition is marginalized at each node splitting on
// it by averaging both children weighted by their training cover.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lexalign/error.hpp"
#include "lexalign/gbt.hpp"
#include "lexalign/stats.hpp"

namespace lexalign::gbt {

struct ShapExplanation {
  std::vector<double> features;  // the explained input
  std::vector<double> phi;       // one attribution per feature
  double base = 0.0;             // expected model output
  double prediction = 0.0;
};

namespace internal {

inline void CheckCovers(const RegressionTree& tree) {
  for (const TreeNode& node : tree.nodes) {
    if (!node.is_leaf() && !(node.cover > 0.0))
      Fail("tree SHAP: missing cover metadata");
  }
}

inline double ExpectedValue(const RegressionTree& tree, std::size_t i = 0) {
  const TreeNode& node = tree.nodes[i];
  if (node.is_leaf()) return node.value;
  const TreeNode& left = tree.nodes[node.left];
  const TreeNode& right = tree.nodes[node.right];
  return (left.cover * ExpectedValue(tree, node.left) +
          right.cover * ExpectedValue(tree, node.right)) /
         node.cover;
}

struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double weight = 0.0;
};

using Path = std::vector<PathElement>;

inline void ExtendPath(Path& path, double zero_fraction, double one_fraction,
                       int feature) {
  const std::size_t depth = path.size();
  path.push_back({feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0});
  const double d1 = static_cast<double>(depth + 1);
  for (std::size_t i = depth; i-- > 0;) {
    path[i + 1].weight +=
        one_fraction * path[i].weight * static_cast<double>(i + 1) / d1;
    path[i].weight =
        zero_fraction * path[i].weight * static_cast<double>(depth - i) / d1;
  }
}

inline void UnwindPath(Path& path, std::size_t index) {
  const std::size_t depth = path.size() - 1;
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].weight;
  for (std::size_t j = depth; j-- > 0;) {
    if (one != 0.0) {
      const double saved = path[j].weight;
      path[j].weight = next * d1 / (static_cast<double>(j + 1) * one);
      next = saved -
             path[j].weight * zero * static_cast<double>(depth - j) / d1;
    } else {
      path[j].weight =
          path[j].weight * d1 / (zero * static_cast<double>(depth - j));
    }
  }
  for (std::size_t j = index; j < depth; ++j) {
    path[j].feature = path[j + 1].feature;
    path[j].zero_fraction = path[j + 1].zero_fraction;
    path[j].one_fraction = path[j + 1].one_fraction;
  }
  path.pop_back();
}

// Total permutation weight of the path with element `index` removed.
inline double UnwoundPathSum(const Path& path, std::size_t index) {
  const std::size_t depth = path.size() - 1;
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].weight;
  double total = 0.0;
  for (std::size_t j = depth; j-- > 0;) {
    if (one != 0.0) {
      const double term = next * d1 / (static_cast<double>(j + 1) * one);
      total += term;
      next = path[j].weight -
             term * zero * static_cast<double>(depth - j) / d1;
    } else {
      total += path[j].weight / zero * d1 / static_cast<double>(depth - j);
    }
  }
  return total;
}

inline void TreeShapRecurse(const RegressionTree& tree, std::size_t node_index,
                            std::span<const double> x, double scale,
                            Path path, double zero_fraction,
                            double one_fraction, int feature,
                            std::vector<double>& phi) {
  ExtendPath(path, zero_fraction, one_fraction, feature);
  const TreeNode& node = tree.nodes[node_index];
  if (node.is_leaf()) {
    for (std::size_t i = 1; i < path.size(); ++i) {
      const double w = UnwoundPathSum(path, i);
      const PathElement& el = path[i];
      phi[el.feature] +=
          w * (el.one_fraction - el.zero_fraction) * scale * node.value;
    }
    return;
  }

  const bool left = GoesLeft(node, x[node.feature]);
  const std::size_t hot = static_cast<std::size_t>(left ? node.left : node.right);
  const std::size_t cold = static_cast<std::size_t>(left ? node.right : node.left);
  double incoming_zero = 1.0;
  double incoming_one = 1.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (path[k].feature == node.feature) {
      incoming_zero = path[k].zero_fraction;
      incoming_one = path[k].one_fraction;
      UnwindPath(path, k);
      break;
    }
  }
  const double hot_fraction = tree.nodes[hot].cover / node.cover;
  const double cold_fraction = tree.nodes[cold].cover / node.cover;
  TreeShapRecurse(tree, hot, x, scale, path, incoming_zero * hot_fraction,
                  incoming_one, node.feature, phi);
  TreeShapRecurse(tree, cold, x, scale, std::move(path),
                  incoming_zero * cold_fraction, 0.0, node.feature, phi);
}

// E[tree(x) | features in `coalition` fixed to x].
inline double ConditionalExpectation(const RegressionTree& tree,
                                     std::size_t node_index,
                                     std::span<const double> x,
                                     std::uint32_t coalition) {
  const TreeNode& node = tree.nodes[node_index];
  if (node.is_leaf()) return node.value;
  if (coalition & (1u << node.feature)) {
    return ConditionalExpectation(
        tree, GoesLeft(node, x[node.feature]) ? node.left : node.right, x,
        coalition);
  }
  const TreeNode& left = tree.nodes[node.left];
  const TreeNode& right = tree.nodes[node.right];
  return (left.cover * ConditionalExpectation(tree, node.left, x, coalition) +
          right.cover * ConditionalExpectation(tree, node.right, x, coalition)) /
         node.cover;
}

}  // namespace internal

// Expected model output over the training distribution.
inline double ExpectedOutput(const BoostedModel& model) {
  double out = model.base_score;
  for (const RegressionTree& tree : model.trees)
    out += model.params.learning_rate * internal::ExpectedValue(tree);
  return out;
}

inline ShapExplanation TreeShap(const BoostedModel& model,
                                std::span<const double> x) {
  if (x.size() != model.n_features) Fail("tree SHAP: feature count mismatch");
  ShapExplanation out;
  out.features.assign(x.begin(), x.end());
  out.phi.assign(model.n_features, 0.0);
  out.base = model.base_score;
  for (const RegressionTree& tree : model.trees) {
    internal::CheckCovers(tree);
    out.base += model.params.learning_rate * internal::ExpectedValue(tree);
    if (tree.nodes.front().is_leaf()) continue;
    internal::Path path;
    path.reserve(tree.Depth() + 2);
    internal::TreeShapRecurse(tree, 0, x, model.params.learning_rate,
                              std::move(path), 1.0, 1.0, -1, out.phi);
  }
  out.prediction = Predict(model, x);
  return out;
}

inline constexpr std::size_t kMaxBruteForceFeatures = 15;

// Exact Shapley values by enumerating all 2^m coalitions.
inline std::vector<double> BruteForceShap(const BoostedModel& model,
                                          std::span<const double> x) {
  const std::size_t m = model.n_features;
  if (x.size() != m) Fail("brute-force SHAP: feature count mismatch");
  if (m > kMaxBruteForceFeatures)
    Fail("brute-force SHAP: at most 15 features are supported");
  for (const RegressionTree& tree : model.trees) internal::CheckCovers(tree);

  const std::uint32_t full = 1u << m;
  std::vector<double> value(full, 0.0);
  for (std::uint32_t s = 0; s < full; ++s) {
    double v = model.base_score;
    for (const RegressionTree& tree : model.trees)
      v += model.params.learning_rate *
           internal::ConditionalExpectation(tree, 0, x, s);
    value[s] = v;
  }
  // weight[k] = k! (m - k - 1)! / m!
  std::vector<double> weight(m);
  for (std::size_t k = 0; k < m; ++k) {
    weight[k] = std::exp(std::lgamma(static_cast<double>(k + 1)) +
                         std::lgamma(static_cast<double>(m - k)) -
                         std::lgamma(static_cast<double>(m + 1)));
  }
  std::vector<double> phi(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const std::uint32_t bit = 1u << j;
    for (std::uint32_t s = 0; s < full; ++s) {
      if (s & bit) continue;
      phi[j] += weight[std::popcount(s)] * (value[s | bit] - value[s]);
    }
  }
  return phi;
}

struct FeatureImportance {
  double mean_abs_shap = 0.0;
  int sign = 0;  // sign of corr(feature value, SHAP value); 0 if undefined
};

inline std::vector<FeatureImportance> GlobalImportance(
    std::span<const ShapExplanation> explanations) {
  if (explanations.empty()) Fail("global importance of no explanations");
  const std::size_t m = explanations.front().phi.size();
  for (const ShapExplanation& e : explanations) {
    if (e.phi.size() != m || e.features.size() != m)
      Fail("global importance: inconsistent feature counts");
  }
  std::vector<FeatureImportance> out(m);
  const double n = static_cast<double>(explanations.size());
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> values, phis;
    double sum_abs = 0.0;
    for (const ShapExplanation& e : explanations) {
      sum_abs += std::fabs(e.phi[j]);
      values.push_back(e.features[j]);
      phis.push_back(e.phi[j]);
    }
    out[j].mean_abs_shap = sum_abs / n;
    if (explanations.size() >= 2) {
      try {
        const double r = Pearson(values, phis);
        out[j].sign = r > 0.0 ? 1 : (r < 0.0 ? -1 : 0);
      } catch (const Error&) {
        out[j].sign = 0;
      }
    }
  }
  return out;
}

}  // namespace lexalign::gbt

#endif  // LEXALIGN_SHAP_HPP_
