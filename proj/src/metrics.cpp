#include "smp/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "smp/error.hpp"

namespace smp {

double auc(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), "auc: scores and labels differ in length");
  std::size_t n_pos = 0;
  for (int l : labels) {
    require(l == 0 || l == 1, "auc: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(l);
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Ranks are 1-based; tied runs share the mean of their ranks.
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t)
      if (labels[order[t]] == 1) pos_rank_sum += avg_rank;
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double auc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  std::vector<double> scores(pos_scores.begin(), pos_scores.end());
  scores.insert(scores.end(), neg_scores.begin(), neg_scores.end());
  std::vector<int> labels(pos_scores.size(), 1);
  labels.resize(scores.size(), 0);
  return auc(scores, labels);
}

double accuracy(std::span<const int> pred, std::span<const int> truth, std::span<const std::size_t> idx) {
  require(pred.size() == truth.size(), "accuracy: prediction and truth lengths differ");
  if (idx.empty()) throw DataError("accuracy: empty index set");
  std::size_t correct = 0;
  for (std::size_t i : idx) {
    require(i < pred.size(), "accuracy: index out of range");
    correct += pred[i] == truth[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(idx.size());
}

double hits_at_k(std::span<const double> pos_scores, std::span<const double> neg_scores, std::size_t k) {
  require(k >= 1, "hits_at_k: k must be positive");
  if (neg_scores.size() < k) throw DataError("hits_at_k: fewer negatives than k");
  if (pos_scores.empty()) throw DataError("hits_at_k: no positive scores");
  std::vector<double> neg(neg_scores.begin(), neg_scores.end());
  std::nth_element(neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(k - 1), neg.end(), std::greater<>());
  const double threshold = neg[k - 1];
  const auto hits = std::count_if(pos_scores.begin(), pos_scores.end(), [&](double s) { return s > threshold; });
  return static_cast<double>(hits) / static_cast<double>(pos_scores.size());
}

}  // namespace smp
