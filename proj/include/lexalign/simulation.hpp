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

#ifndef LEXALIGN_SIMULATION_HPP_
#define LEXALIGN_SIMULATION_HPP_

// Exemplar-aggregation campaigns. A simulation draws a random visiting order
// of every word's exemplars; the prototype at level k is the mean of the
// first k exemplars in that order, and the level's score is the relative
// alignment strength of the resulting system against freshly drawn permuted
// mappings.
//
// Seeding (all streams are SplitMix64, see rng.hpp):
//   curve sim s:        sim seed   = DeriveSeed(seed, s)
//                       selection  = SelectionOrder(..., sim seed)
//                       level L    = permutations from DeriveSeed(sim seed, L)
//   grid sim s:         sim seed   = DeriveSeed(seed, s)
//                       selection  = SelectionOrder(..., sim seed)
//                       cell c     = permutations from DeriveSeed(sim seed, c)
// Because selections are nested, one simulation's visiting order yields
// every cell of the grid; only the permuted mappings are drawn per cell.
// With independent_cells set, cell c of sim s instead uses task seed
// DeriveSeed(seed, c, s) for its selection and DeriveSeed(task seed, 0) for
// its permutations.
//   bootstrap, level L: DeriveSeed(seed, kBootstrapStream, L)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lexalign/alignment.hpp"
#include "lexalign/data_model.hpp"
#include "lexalign/error.hpp"
#include "lexalign/kernels.hpp"
#include "lexalign/parallel.hpp"
#include "lexalign/rng.hpp"
#include "lexalign/stats.hpp"
#include "lexalign/text.hpp"

namespace lexalign {

inline constexpr std::uint64_t kBootstrapStream = 0xB0075742ULL;

struct AggregationOptions {
  std::size_t n_sims = 1000;
  std::size_t n_perms = 1000;
  std::size_t bootstrap_resamples = 1000;
  double confidence = 0.95;
  unsigned threads = 1;
  // Grid only: draw a separate visiting order for every cell instead of
  // reading all cells off one nested trajectory per simulation.
  bool independent_cells = false;
};

struct CurveLevel {
  std::size_t k = 0;
  double mean_relative_strength = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_sims = 0;
  std::vector<double> relative_strengths;  // one per simulation
  std::vector<double> true_rhos;           // one per simulation
};

struct AggregationCurve {
  Modality mode = Modality::kVisual;
  std::size_t fixed_other = 0;
  std::vector<CurveLevel> levels;
};

struct GridCell {
  std::size_t k_visual = 0;
  std::size_t k_linguistic = 0;
  double mean_relative_strength = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_sims = 0;
  double grad_v = 0.0;
  double grad_l = 0.0;
};

struct AggregationGrid {
  std::size_t max_v = 0;
  std::size_t max_l = 0;
  std::vector<GridCell> cells;  // row-major: index (v - 1) * max_l + (l - 1)
  bool has_gradient = false;

  GridCell& at(std::size_t v, std::size_t l) {
    return cells[(v - 1) * max_l + (l - 1)];
  }
  const GridCell& at(std::size_t v, std::size_t l) const {
    return cells[(v - 1) * max_l + (l - 1)];
  }
};

namespace internal {

inline void RequireExemplars(const LexicalSystem& system, Modality modality,
                             std::size_t needed) {
  for (const WordEntry& entry : system.words) {
    if (entry.exemplars(modality).size() < needed) {
      Fail("word '" + entry.word + "' has " +
           std::to_string(entry.exemplars(modality).size()) + " " +
           std::string(ToString(modality)) + " exemplars, " +
           std::to_string(needed) + " required");
    }
  }
}

inline std::vector<std::vector<std::size_t>> SelectionOrders(
    const LexicalSystem& system, Modality modality, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> orders(system.size());
  for (std::size_t w = 0; w < system.size(); ++w)
    orders[w] = SelectionOrder(system, w, modality, seed);
  return orders;
}

// Running per-word exemplar sums for one modality.
class PrototypeAccumulator {
 public:
  PrototypeAccumulator(const LexicalSystem& system, Modality modality,
                       const std::vector<std::vector<std::size_t>>& orders)
      : system_(system),
        modality_(modality),
        orders_(orders),
        sums_(system.size(), system.dim(modality)) {}

  // Adds exemplars until each prototype aggregates k of them.
  void AdvanceTo(std::size_t k) {
    const std::size_t dim = sums_.cols;
    for (; count_ < k; ++count_) {
      for (std::size_t w = 0; w < system_.size(); ++w) {
        const Vector& x =
            system_.words[w].exemplars(modality_)[orders_[w][count_]];
        kernels::AddTo(sums_.row(w), x.data(), dim);
      }
    }
  }

  Matrix Prototypes() const {
    Matrix out = sums_;
    const double n = static_cast<double>(count_);
    for (double& v : out.data) v /= n;
    return out;
  }

  std::size_t count() const { return count_; }

 private:
  const LexicalSystem& system_;
  Modality modality_;
  const std::vector<std::vector<std::size_t>>& orders_;
  Matrix sums_;
  std::size_t count_ = 0;
};

inline Interval ContainingCi(std::span<const double> values, double mean,
                             const AggregationOptions& options,
                             std::uint64_t seed) {
  Interval ci;
  if (values.size() >= 2) {
    ci = BootstrapMeanCi(values, options.bootstrap_resamples,
                         options.confidence, seed);
  } else {
    ci = {mean, mean};
  }
  // A percentile interval can miss the sample mean for very skewed data.
  ci.lo = std::min(ci.lo, mean);
  ci.hi = std::max(ci.hi, mean);
  return ci;
}

}  // namespace internal

inline AggregationCurve AggregateCurve(const LexicalSystem& system,
                                       Modality mode, std::size_t max_k,
                                       std::size_t fixed_other,
                                       const AggregationOptions& options,
                                       std::uint64_t seed) {
  if (max_k < 1) Fail("aggregation: max_k must be at least 1");
  if (fixed_other < 1) Fail("aggregation: fixed count must be at least 1");
  if (options.n_sims < 1) Fail("aggregation: n_sims must be at least 1");
  if (options.n_perms < 1) Fail("aggregation: n_perms must be at least 1");
  if (system.size() < 3) Fail("aggregation: needs at least 3 words");
  const Modality other =
      mode == Modality::kVisual ? Modality::kLinguistic : Modality::kVisual;
  internal::RequireExemplars(system, mode, max_k);
  internal::RequireExemplars(system, other, fixed_other);
  const std::vector<std::string> labels = WordLabels(system);

  AggregationCurve curve;
  curve.mode = mode;
  curve.fixed_other = fixed_other;
  curve.levels.resize(max_k);
  for (std::size_t L = 0; L < max_k; ++L) {
    curve.levels[L].k = L + 1;
    curve.levels[L].n_sims = options.n_sims;
    curve.levels[L].relative_strengths.resize(options.n_sims);
    curve.levels[L].true_rhos.resize(options.n_sims);
  }

  ParallelFor(options.n_sims, options.threads, [&](std::size_t s) {
    const std::uint64_t sim_seed = DeriveSeed(seed, s);
    const auto fixed_orders = internal::SelectionOrders(system, other, sim_seed);
    const auto varying_orders = internal::SelectionOrders(system, mode, sim_seed);

    internal::PrototypeAccumulator fixed(system, other, fixed_orders);
    fixed.AdvanceTo(fixed_other);
    const auto fixed_ranks = RankTriangle(
        CosineSimilarity(fixed.Prototypes(), other, labels),
        other == Modality::kLinguistic);

    internal::PrototypeAccumulator varying(system, mode, varying_orders);
    std::vector<std::uint32_t> scratch;
    for (std::size_t L = 0; L < max_k; ++L) {
      varying.AdvanceTo(L + 1);
      const auto varying_ranks = RankTriangle(
          CosineSimilarity(varying.Prototypes(), mode, labels),
          mode == Modality::kLinguistic);
      const PermutationScorer scorer =
          mode == Modality::kVisual
              ? PermutationScorer(varying_ranks, fixed_ranks)
              : PermutationScorer(fixed_ranks, varying_ranks);
      const double rho = scorer.RhoIdentity();
      curve.levels[L].true_rhos[s] = rho;
      curve.levels[L].relative_strengths[s] = RelativeAlignment(
          scorer, rho, options.n_perms, DeriveSeed(sim_seed, L), scratch);
    }
  });

  for (std::size_t L = 0; L < max_k; ++L) {
    CurveLevel& level = curve.levels[L];
    level.mean_relative_strength = Mean(level.relative_strengths);
    const Interval ci = internal::ContainingCi(
        level.relative_strengths, level.mean_relative_strength, options,
        DeriveSeed(seed, kBootstrapStream, L));
    level.ci_lo = ci.lo;
    level.ci_hi = ci.hi;
  }
  return curve;
}

inline AggregationGrid AggregateGrid(const LexicalSystem& system,
                                     std::size_t max_v, std::size_t max_l,
                                     const AggregationOptions& options,
                                     std::uint64_t seed) {
  if (max_v < 1 || max_l < 1)
    Fail("aggregation: grid ranges must be at least 1");
  if (options.n_sims < 1) Fail("aggregation: n_sims must be at least 1");
  if (options.n_perms < 1) Fail("aggregation: n_perms must be at least 1");
  if (system.size() < 3) Fail("aggregation: needs at least 3 words");
  internal::RequireExemplars(system, Modality::kVisual, max_v);
  internal::RequireExemplars(system, Modality::kLinguistic, max_l);
  const std::vector<std::string> labels = WordLabels(system);

  AggregationGrid grid;
  grid.max_v = max_v;
  grid.max_l = max_l;
  const std::size_t n_cells = max_v * max_l;
  grid.cells.resize(n_cells);
  std::vector<double> scores(n_cells * options.n_sims);

  if (options.independent_cells) {
    ParallelFor(n_cells * options.n_sims, options.threads, [&](std::size_t task) {
      const std::size_t cell = task / options.n_sims;
      const std::size_t s = task % options.n_sims;
      const std::uint64_t task_seed = DeriveSeed(seed, cell, s);
      auto ranks = [&](Modality modality, std::size_t k) {
        const auto orders = internal::SelectionOrders(system, modality, task_seed);
        internal::PrototypeAccumulator acc(system, modality, orders);
        acc.AdvanceTo(k);
        return RankTriangle(CosineSimilarity(acc.Prototypes(), modality, labels),
                            modality == Modality::kLinguistic);
      };
      const PermutationScorer scorer(
          ranks(Modality::kVisual, cell / max_l + 1),
          ranks(Modality::kLinguistic, cell % max_l + 1));
      std::vector<std::uint32_t> scratch;
      scores[cell * options.n_sims + s] =
          RelativeAlignment(scorer, scorer.RhoIdentity(), options.n_perms,
                            DeriveSeed(task_seed, 0), scratch);
    });
  } else {
    ParallelFor(options.n_sims, options.threads, [&](std::size_t s) {
      const std::uint64_t sim_seed = DeriveSeed(seed, s);
      auto level_ranks = [&](Modality modality, std::size_t max_k) {
        const auto orders = internal::SelectionOrders(system, modality, sim_seed);
        internal::PrototypeAccumulator acc(system, modality, orders);
        std::vector<std::shared_ptr<const RankedTriangle>> ranks(max_k);
        for (std::size_t k = 1; k <= max_k; ++k) {
          acc.AdvanceTo(k);
          ranks[k - 1] = RankTriangle(
              CosineSimilarity(acc.Prototypes(), modality, labels),
              modality == Modality::kLinguistic);
        }
        return ranks;
      };
      const auto visual = level_ranks(Modality::kVisual, max_v);
      const auto linguistic = level_ranks(Modality::kLinguistic, max_l);
      std::vector<std::uint32_t> scratch;
      for (std::size_t cell = 0; cell < n_cells; ++cell) {
        const PermutationScorer scorer(visual[cell / max_l],
                                       linguistic[cell % max_l]);
        scores[cell * options.n_sims + s] =
            RelativeAlignment(scorer, scorer.RhoIdentity(), options.n_perms,
                              DeriveSeed(sim_seed, cell), scratch);
      }
    });
  }

  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    GridCell& out = grid.cells[cell];
    out.k_visual = cell / max_l + 1;
    out.k_linguistic = cell % max_l + 1;
    out.n_sims = options.n_sims;
    const std::span<const double> values(scores.data() + cell * options.n_sims,
                                         options.n_sims);
    out.mean_relative_strength = Mean(values);
    const Interval ci =
        internal::ContainingCi(values, out.mean_relative_strength, options,
                               DeriveSeed(seed, kBootstrapStream, cell));
    out.ci_lo = ci.lo;
    out.ci_hi = ci.hi;
  }
  return grid;
}

// Unit gradient directions of the mean surface: central differences inside,
// one-sided differences on the edges, unit cell spacing.
inline AggregationGrid GradientField(AggregationGrid grid) {
  if (grid.max_v < 2 || grid.max_l < 2)
    Fail("gradient field needs a grid of at least 2 x 2");
  auto value = [&](std::size_t v, std::size_t l) {
    return grid.at(v, l).mean_relative_strength;
  };
  auto derivative = [](auto f, std::size_t i, std::size_t max) {
    if (i == 1) return f(2) - f(1);
    if (i == max) return f(max) - f(max - 1);
    return 0.5 * (f(i + 1) - f(i - 1));
  };
  std::vector<std::pair<double, double>> gradients(grid.cells.size());
  for (std::size_t v = 1; v <= grid.max_v; ++v) {
    for (std::size_t l = 1; l <= grid.max_l; ++l) {
      const double gv = derivative(
          [&](std::size_t i) { return value(i, l); }, v, grid.max_v);
      const double gl = derivative(
          [&](std::size_t i) { return value(v, i); }, l, grid.max_l);
      const double norm = std::hypot(gv, gl);
      gradients[(v - 1) * grid.max_l + (l - 1)] =
          norm == 0.0 ? std::pair{0.0, 0.0} : std::pair{gv / norm, gl / norm};
    }
  }
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    grid.cells[c].grad_v = gradients[c].first;
    grid.cells[c].grad_l = gradients[c].second;
  }
  grid.has_gradient = true;
  return grid;
}

inline std::string AggregationCsv(const AggregationCurve& curve) {
  std::string out =
      "mode,k_visual,k_linguistic,mean_relative_strength,ci_lo,ci_hi,n_sims\n";
  for (const CurveLevel& level : curve.levels) {
    const bool visual = curve.mode == Modality::kVisual;
    out += std::string(ToString(curve.mode)) + "," +
           std::to_string(visual ? level.k : curve.fixed_other) + "," +
           std::to_string(visual ? curve.fixed_other : level.k) + "," +
           FormatSig17(level.mean_relative_strength) + "," +
           FormatSig17(level.ci_lo) + "," + FormatSig17(level.ci_hi) + "," +
           std::to_string(level.n_sims) + "\n";
  }
  return out;
}

inline std::string AggregationCsv(const AggregationGrid& grid) {
  std::string out =
      "mode,k_visual,k_linguistic,mean_relative_strength,ci_lo,ci_hi,n_sims";
  out += grid.has_gradient ? ",grad_v,grad_l\n" : "\n";
  for (const GridCell& cell : grid.cells) {
    out += "grid," + std::to_string(cell.k_visual) + "," +
           std::to_string(cell.k_linguistic) + "," +
           FormatSig17(cell.mean_relative_strength) + "," +
           FormatSig17(cell.ci_lo) + "," + FormatSig17(cell.ci_hi) + "," +
           std::to_string(cell.n_sims);
    if (grid.has_gradient)
      out += "," + FormatSig17(cell.grad_v) + "," + FormatSig17(cell.grad_l);
    out += "\n";
  }
  return out;
}

}  // namespace lexalign

#endif  // LEXALIGN_SIMULATION_HPP_
