#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "car/domain.hpp"
#include "car/generator.hpp"

namespace car {

// One directed entailment judgment (premise -> hypothesis).
using Judge = std::function<EntailmentVerdict(std::string_view, std::string_view)>;

// Bidirectional entailment. With short_circuit, the b -> a direction is not
// requested once a -> b fails.
bool semantically_equivalent(std::string_view a, std::string_view b, const Judge& judge,
                             bool short_circuit = true);

// Token-efficient mode. Each answer, in sample_index order, is compared to
// the representative (first member) of every existing cluster in creation
// order and joins the first equivalent one. Answers whose text equals a
// representative's join without a judge call.
ClusterAssignment cluster_greedy(std::span<const AnswerSample> answers, const Judge& judge);

struct PairwiseOptions {
  bool short_circuit = false;
  // Directed judgments for all pairs may be in flight at once; the judge
  // must then be thread-safe.
  std::size_t concurrency = 1;
};

// Low-latency mode. Every pair of distinct answer texts is judged, and
// clusters are the connected components of the equivalence graph. Cluster
// ids follow the smallest member sample_index.
ClusterAssignment cluster_pairwise(std::span<const AnswerSample> answers, const Judge& judge,
                                   PairwiseOptions options = {});

// Largest cluster proportion max_j n_j / k.
ConfidenceValue confidence_from_clusters(const ClusterAssignment& assignment);

// Union-find with path halving and union by size.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t count);

  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_size_;
};

}  // namespace car
