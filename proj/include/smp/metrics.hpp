#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smp {

// Rank-based (Mann-Whitney) AUC with average ranks for ties. labels are 0/1
// and both classes must be present.
double auc(std::span<const double> scores, std::span<const int> labels);

// AUC of positives scored against negatives.
double auc(std::span<const double> pos_scores, std::span<const double> neg_scores);

// Fraction of idx where pred == truth.
double accuracy(std::span<const int> pred, std::span<const int> truth, std::span<const std::size_t> idx);

// Fraction of positive scores strictly above the k-th largest negative score.
double hits_at_k(std::span<const double> pos_scores, std::span<const double> neg_scores, std::size_t k);

}  // namespace smp
