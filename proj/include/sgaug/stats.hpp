#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sgaug/core_model.hpp"
#include "sgaug/dataset.hpp"

namespace sgaug {

using TripletSet = std::set<Triplet>;

/// Lookup of compositions by the two fixed members of an edge: which subject
/// categories complete (?, predicate, object), and which object categories
/// complete (subject, predicate, ?).
class TripletIndex {
 public:
  struct Entry {
    CategoryId category;
    std::uint64_t count;
  };

  TripletIndex() = default;
  explicit TripletIndex(const std::map<Triplet, std::uint64_t>& counts);

  // Entries sorted by category id.
  const std::vector<Entry>& subjects_for(PredicateId p, CategoryId object) const;
  const std::vector<Entry>& objects_for(CategoryId subject, PredicateId p) const;

 private:
  static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }
  std::map<std::uint64_t, std::vector<Entry>> by_predicate_object_;
  std::map<std::uint64_t, std::vector<Entry>> by_subject_predicate_;
};

/// Multiset of training compositions. Stored counts are always >= 1.
class TripletFrequencyTable {
 public:
  TripletFrequencyTable() = default;
  explicit TripletFrequencyTable(std::map<Triplet, std::uint64_t> counts);

  std::uint64_t count(const Triplet& t) const;
  bool contains(const Triplet& t) const { return counts_.count(t) > 0; }

  std::uint64_t total_triplets() const { return total_; }
  std::size_t distinct_triplets() const { return counts_.size(); }
  const std::map<Triplet, std::uint64_t>& counts() const { return counts_; }
  const TripletIndex& index() const { return index_; }

 private:
  std::map<Triplet, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  TripletIndex index_;
};

TripletFrequencyTable build_frequency_table(const Dataset& train);

enum class ShotBucket { kZero, kFew10, kFew100, kAll };

inline constexpr std::array<ShotBucket, 4> kAllBuckets = {
    ShotBucket::kZero, ShotBucket::kFew10, ShotBucket::kFew100, ShotBucket::kAll};

// "zs", "few10", "few100", "all".
const char* bucket_name(ShotBucket bucket);

// Bucket of a composition seen `count` times in training; counts above 100
// fall in no restricted bucket and yield kAll.
ShotBucket bucket_for_count(std::uint64_t count);

struct ShotSubset {
  Dataset graphs;       // retained graphs with edges filtered to the bucket
  TripletSet triplets;  // compositions of the bucket present in the test set
};

struct ShotSubsets {
  ShotSubset zero;
  ShotSubset few10;
  ShotSubset few100;
  ShotSubset all;

  const ShotSubset& at(ShotBucket bucket) const;
};

ShotSubsets shot_subsets(const Dataset& test, const TripletFrequencyTable& table);

// f_r: fraction of training edges labeled with predicate r.
std::vector<double> predicate_frequencies(const Dataset& train);

struct Histogram {
  std::map<std::uint32_t, std::uint64_t> counts;  // id -> occurrences
  std::uint64_t total = 0;

  double fraction(std::uint32_t id) const;
  // (id, count) pairs by descending count, ties by ascending id.
  std::vector<std::pair<std::uint32_t, std::uint64_t>> top_k(std::size_t k) const;
};

struct Marginals {
  Histogram objects;     // node occurrences
  Histogram predicates;  // edge occurrences
};

Marginals marginal_distributions(const Dataset& dataset);

// JSON for stats.json. Compositions are sorted, so output is diff-stable.
nlohmann::json stats_to_json(const TripletFrequencyTable& table,
                             const std::vector<double>& predicate_freq,
                             const Marginals& marginals, const Vocabulary& vocab);
TripletFrequencyTable frequency_table_from_json(const nlohmann::json& doc,
                                                const Vocabulary& vocab);
TripletFrequencyTable load_frequency_table(const std::filesystem::path& path,
                                           const Vocabulary& vocab);

// Sidecar listing each bucket's compositions: {"zs": [{"s","p","o"}...], ...}.
nlohmann::json subset_triplets_to_json(const ShotSubsets& subsets,
                                       const Vocabulary& vocab);
std::map<std::string, TripletSet> load_subset_triplets(
    const std::filesystem::path& path, const Vocabulary& vocab);

nlohmann::json triplet_to_json(const Triplet& t, const Vocabulary& vocab);
Triplet triplet_from_json(const nlohmann::json& doc, const Vocabulary& vocab,
                          const std::string& where);

}  // namespace sgaug
