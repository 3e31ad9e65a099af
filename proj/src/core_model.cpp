#include "sgaug/core_model.hpp"

#include <cmath>
#include <string>

#include "sgaug/errors.hpp"

namespace sgaug {
namespace {

template <typename Id>
std::unordered_map<std::string, Id> index_names(
    const std::vector<std::string>& names, const char* what) {
  if (names.empty()) {
    throw InvalidArgument(std::string("vocabulary: ") + what + " list is empty");
  }
  std::unordered_map<std::string, Id> ids;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) {
      throw InvalidArgument(std::string("vocabulary: empty name in ") + what +
                            " at position " + std::to_string(i));
    }
    if (!ids.emplace(names[i], static_cast<Id>(i)).second) {
      throw InvalidArgument(std::string("vocabulary: duplicate ") + what +
                            " name '" + names[i] + "'");
    }
  }
  return ids;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> object_names,
                       std::vector<std::string> predicate_names)
    : object_names_(std::move(object_names)),
      predicate_names_(std::move(predicate_names)),
      object_ids_(index_names<CategoryId>(object_names_, "objects")),
      predicate_ids_(index_names<PredicateId>(predicate_names_, "predicates")) {}

const std::string& Vocabulary::object_name(CategoryId id) const {
  if (id >= object_names_.size()) {
    throw InvalidArgument("object category id " + std::to_string(id) +
                          " out of range");
  }
  return object_names_[id];
}

const std::string& Vocabulary::predicate_name(PredicateId id) const {
  if (id >= predicate_names_.size()) {
    throw InvalidArgument("predicate id " + std::to_string(id) + " out of range");
  }
  return predicate_names_[id];
}

std::optional<CategoryId> Vocabulary::find_object(std::string_view name) const {
  auto it = object_ids_.find(std::string(name));
  if (it == object_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<PredicateId> Vocabulary::find_predicate(
    std::string_view name) const {
  auto it = predicate_ids_.find(std::string(name));
  if (it == predicate_ids_.end()) return std::nullopt;
  return it->second;
}

bool BoundingBox::is_valid() const {
  for (double v : {x1, y1, x2, y2}) {
    if (!std::isfinite(v) || v < 0.0) return false;
  }
  return x1 < x2 && y1 < y2;
}

SceneGraph::SceneGraph(std::string image_id, double width, double height,
                       std::vector<ObjectNode> nodes,
                       std::vector<Relationship> edges)
    : image_id_(std::move(image_id)),
      width_(width),
      height_(height),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)) {
  const std::string where = "image '" + image_id_ + "': ";
  if (!(width_ > 0.0) || !(height_ > 0.0) || !std::isfinite(width_) ||
      !std::isfinite(height_)) {
    throw InvalidArgument(where + "width and height must be positive");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].box.is_valid()) {
      throw InvalidArgument(where + "objects[" + std::to_string(i) +
                            "].box is degenerate or negative");
    }
  }
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    if (e.subject >= nodes_.size() || e.object >= nodes_.size()) {
      throw InvalidArgument(where + "relationships[" + std::to_string(k) +
                            "] node index out of range");
    }
    if (e.subject == e.object) {
      throw InvalidArgument(where + "relationships[" + std::to_string(k) +
                            "] is a self-loop");
    }
  }
}

CategoryId SceneGraph::category(NodeIndex node) const {
  if (node >= nodes_.size()) {
    throw InvalidArgument("image '" + image_id_ + "': node " +
                          std::to_string(node) + " out of range");
  }
  return nodes_[node].category;
}

Triplet SceneGraph::triplet(std::size_t edge_index) const {
  const auto& e = edges_.at(edge_index);
  return {nodes_[e.subject].category, e.predicate, nodes_[e.object].category};
}

SceneGraph SceneGraph::relabeled(NodeIndex node, CategoryId category) const {
  SceneGraph copy = *this;
  if (node >= copy.nodes_.size()) {
    throw InvalidArgument("image '" + image_id_ + "': node " +
                          std::to_string(node) + " out of range");
  }
  copy.nodes_[node].category = category;
  return copy;
}

SceneGraph SceneGraph::with_edges(
    const std::vector<std::size_t>& edge_indices) const {
  std::vector<Relationship> kept;
  kept.reserve(edge_indices.size());
  for (std::size_t k : edge_indices) kept.push_back(edges_.at(k));
  return SceneGraph(image_id_, width_, height_, nodes_, std::move(kept));
}

void validate(const SceneGraph& graph, const Vocabulary& vocab) {
  const std::string where = "image '" + graph.image_id() + "': ";
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    if (graph.nodes()[i].category >= vocab.num_objects()) {
      throw InvalidArgument(where + "objects[" + std::to_string(i) +
                            "].category out of vocabulary range");
    }
  }
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    if (graph.edges()[k].predicate >= vocab.num_predicates()) {
      throw InvalidArgument(where + "relationships[" + std::to_string(k) +
                            "].predicate out of vocabulary range");
    }
  }
}

std::size_t degree(const SceneGraph& graph, NodeIndex node) {
  if (node >= graph.num_nodes()) {
    throw InvalidArgument("degree: node " + std::to_string(node) +
                          " out of range for graph with " +
                          std::to_string(graph.num_nodes()) + " nodes");
  }
  std::size_t d = 0;
  for (const auto& e : graph.edges()) {
    if (e.subject == node) ++d;
    if (e.object == node) ++d;
  }
  return d;
}

std::vector<std::size_t> incident_edges(const SceneGraph& graph,
                                        NodeIndex node) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    const auto& e = graph.edges()[k];
    if (e.subject == node || e.object == node) out.push_back(k);
  }
  return out;
}

std::vector<Triplet> categorical_triplets(const SceneGraph& graph) {
  std::vector<Triplet> out;
  out.reserve(graph.num_edges());
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    out.push_back(graph.triplet(k));
  }
  return out;
}

}  // namespace sgaug
