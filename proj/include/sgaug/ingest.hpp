#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sgaug/core_model.hpp"
#include "sgaug/dataset.hpp"
#include "sgaug/feature_set.hpp"
#include "sgaug/predicted_graph.hpp"

namespace sgaug {

/// Word vectors for every object category of a vocabulary.
class EmbeddingTable {
 public:
  // `vectors[c]` is the embedding of category c. All vectors must share one
  // dimension, be finite and be non-zero.
  explicit EmbeddingTable(std::vector<std::vector<double>> vectors);

  std::size_t dimension() const { return dimension_; }
  std::size_t num_categories() const { return vectors_.size(); }
  const std::vector<double>& vector(CategoryId c) const { return vectors_.at(c); }
  double norm(CategoryId c) const { return norms_.at(c); }

  double cosine(CategoryId a, CategoryId b) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::vector<double>> vectors_;
  std::vector<double> norms_;
};

// {"objects": [...], "predicates": [...]}; ids are array positions.
Vocabulary load_vocabulary(const std::filesystem::path& path);
Vocabulary parse_vocabulary(std::istream& in, const std::string& source);

// JSON-Lines scene graphs. Blank lines are ignored.
Dataset load_dataset(const std::filesystem::path& path, const Vocabulary& vocab);
Dataset parse_dataset(std::istream& in, const Vocabulary& vocab,
                      const std::string& source);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
void write_dataset(std::ostream& out, const Dataset& dataset);
std::string graph_to_json_line(const SceneGraph& graph);

// Plain-text "token v1 ... vD" lines. A category name missing from the file
// is embedded as the mean of its whitespace-separated words.
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const Vocabulary& vocab);
EmbeddingTable parse_embeddings(std::istream& in, const Vocabulary& vocab,
                                const std::string& source);

std::vector<PredictedGraph> load_predictions(const std::filesystem::path& path,
                                             const Vocabulary& vocab);
std::vector<PredictedGraph> parse_predictions(std::istream& in,
                                              const Vocabulary& vocab,
                                              const std::string& source);

// Header "N D" followed by N rows of D whitespace-separated floats.
FeatureSet load_feature_matrix(const std::filesystem::path& path);
FeatureSet parse_feature_matrix(std::istream& in, const std::string& source);
void write_feature_matrix(std::ostream& out, const FeatureSet& features);

}  // namespace sgaug
