#include "car/clustering.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>

#include "car/errors.hpp"
#include "car/parallel.hpp"

namespace car {

namespace {

// Positions of `answers` sorted by sample_index.
std::vector<std::size_t> index_order(std::span<const AnswerSample> answers) {
  if (answers.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot cluster zero answers");
  std::vector<std::size_t> order(answers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return answers[a].sample_index < answers[b].sample_index;
  });
  return order;
}

ClusterAssignment from_labels(std::vector<std::size_t> labels, std::size_t cluster_count) {
  ClusterAssignment out;
  out.cluster_sizes.assign(cluster_count, 0);
  for (auto label : labels) ++out.cluster_sizes[label];
  out.labels = std::move(labels);
  return out;
}

}  // namespace

bool semantically_equivalent(std::string_view a, std::string_view b, const Judge& judge,
                             bool short_circuit) {
  const bool forward = judge(a, b) == EntailmentVerdict::kEntails;
  if (!forward && short_circuit) return false;
  const bool backward = judge(b, a) == EntailmentVerdict::kEntails;
  return forward && backward;
}

ClusterAssignment cluster_greedy(std::span<const AnswerSample> answers, const Judge& judge) {
  const auto order = index_order(answers);
  std::vector<std::size_t> representatives;  // position in `answers`
  std::vector<std::size_t> labels(answers.size());

  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    const auto& text = answers[order[slot]].text;
    std::size_t cluster = representatives.size();
    for (std::size_t c = 0; c < representatives.size(); ++c) {
      const auto& rep = answers[representatives[c]].text;
      if (text == rep || semantically_equivalent(text, rep, judge, true)) {
        cluster = c;
        break;
      }
    }
    if (cluster == representatives.size()) representatives.push_back(order[slot]);
    labels[slot] = cluster;
  }
  return from_labels(std::move(labels), representatives.size());
}

ClusterAssignment cluster_pairwise(std::span<const AnswerSample> answers, const Judge& judge,
                                   PairwiseOptions options) {
  const auto order = index_order(answers);

  // Identical texts are merged up front; only distinct texts get judged.
  std::vector<std::string_view> distinct;
  std::vector<std::size_t> distinct_of(order.size());
  std::unordered_map<std::string_view, std::size_t> seen;
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    std::string_view text = answers[order[slot]].text;
    auto [it, inserted] = seen.try_emplace(text, distinct.size());
    if (inserted) distinct.push_back(text);
    distinct_of[slot] = it->second;
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < distinct.size(); ++i)
    for (std::size_t j = i + 1; j < distinct.size(); ++j) pairs.emplace_back(i, j);

  std::vector<char> equivalent(pairs.size(), 0);
  parallel_for(pairs.size(), options.concurrency, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    equivalent[p] = semantically_equivalent(distinct[i], distinct[j], judge, options.short_circuit);
  });

  DisjointSet components(distinct.size());
  for (std::size_t p = 0; p < pairs.size(); ++p)
    if (equivalent[p]) components.unite(pairs[p].first, pairs[p].second);

  // Distinct texts are in first-appearance order, so numbering components as
  // they are first met gives smallest-member numbering.
  std::unordered_map<std::size_t, std::size_t> label_of_root;
  std::vector<std::size_t> labels(order.size());
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    const auto root = components.find(distinct_of[slot]);
    auto [it, inserted] = label_of_root.try_emplace(root, label_of_root.size());
    labels[slot] = it->second;
  }
  return from_labels(std::move(labels), label_of_root.size());
}

ConfidenceValue confidence_from_clusters(const ClusterAssignment& assignment) {
  if (!is_valid(assignment))
    throw Error(ErrorCode::kInvalidArgument, "cluster assignment is not a valid partition");
  const auto largest =
      *std::max_element(assignment.cluster_sizes.begin(), assignment.cluster_sizes.end());
  return ConfidenceValue(largest, assignment.sample_count());
}

DisjointSet::DisjointSet(std::size_t count) : parent_(count), rank_size_(count, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSet::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSet::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_size_[a] < rank_size_[b]) std::swap(a, b);
  parent_[b] = a;
  rank_size_[a] += rank_size_[b];
  return true;
}

}  // namespace car
