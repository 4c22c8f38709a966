#pragma once

#include <span>
#include <vector>

#include "mfgfn/env.hpp"

namespace mfgfn {

/// A candidate with its target-oracle score and acquisition value.
struct ScoredItem {
    std::vector<int> x;
    double score = 0.0;  // under f_M, larger is better
    double acq = 0.0;
};

enum class SelectBy { Score, Acquisition };

/// Parameters of the pairwise similarity used by the diversity metrics.
/// Sequences use normalized Hamming identity (fixed length); grids use
/// 1 - Euclidean distance / grid diagonal.
struct SimilarityMetric {
    PayloadKind kind = PayloadKind::Sequence;
    int grid_side = 2;
    int grid_dims = 2;

    double identity(const std::vector<int>& a, const std::vector<int>& b) const;
};

/// Mean f_M score of the top-K items ranked by the chosen key. K is clamped
/// to the item count; throws EmptySetError when there are no items.
double mean_topk(std::span<const ScoredItem> items, int k, SelectBy by);

/// Mean pairwise diversity in [0,1]; higher = more diverse. Requires >= 2
/// objects (TooFewError otherwise).
double pairwise_diversity(std::span<const std::vector<int>> objects,
                          const SimilarityMetric& metric);

/// Greedy top-K in score order, skipping candidates whose identity to any
/// already-selected item exceeds the threshold. May return fewer than K.
std::vector<ScoredItem> diverse_topk(std::span<const ScoredItem> items, int k,
                                     double threshold,
                                     const SimilarityMetric& metric);

}  // namespace mfgfn
