#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sgaug {

using CategoryId = std::uint32_t;
using PredicateId = std::uint32_t;
using NodeIndex = std::size_t;

/// Object-category and predicate names, indexed by position.
///
/// When the background-aware edge loss is used, predicate 0 is expected to be
/// the "no edge" class; nothing in this type enforces that.
class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> object_names,
             std::vector<std::string> predicate_names);

  std::size_t num_objects() const { return object_names_.size(); }
  std::size_t num_predicates() const { return predicate_names_.size(); }

  const std::string& object_name(CategoryId id) const;
  const std::string& predicate_name(PredicateId id) const;

  std::optional<CategoryId> find_object(std::string_view name) const;
  std::optional<PredicateId> find_predicate(std::string_view name) const;

  const std::vector<std::string>& object_names() const { return object_names_; }
  const std::vector<std::string>& predicate_names() const {
    return predicate_names_;
  }

  bool operator==(const Vocabulary& other) const {
    return object_names_ == other.object_names_ &&
           predicate_names_ == other.predicate_names_;
  }

 private:
  std::vector<std::string> object_names_;
  std::vector<std::string> predicate_names_;
  std::unordered_map<std::string, CategoryId> object_ids_;
  std::unordered_map<std::string, PredicateId> predicate_ids_;
};

/// Corner-format box in pixel coordinates.
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }

  bool is_valid() const;

  bool operator==(const BoundingBox&) const = default;
};

struct ObjectNode {
  CategoryId category = 0;
  BoundingBox box;

  bool operator==(const ObjectNode&) const = default;
};

struct Relationship {
  NodeIndex subject = 0;
  PredicateId predicate = 0;
  NodeIndex object = 0;

  bool operator==(const Relationship&) const = default;
};

/// Categorical composition (subject category, predicate, object category).
struct Triplet {
  CategoryId subject = 0;
  PredicateId predicate = 0;
  CategoryId object = 0;

  auto operator<=>(const Triplet&) const = default;
};

struct TripletHash {
  std::size_t operator()(const Triplet& t) const noexcept {
    std::uint64_t h = t.subject;
    h = h * 0x9E3779B97F4A7C15ULL + t.predicate;
    h = h * 0x9E3779B97F4A7C15ULL + t.object;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// An image's scene graph. Structural invariants are checked at construction;
/// vocabulary ranges are checked separately by validate().
class SceneGraph {
 public:
  SceneGraph(std::string image_id, double width, double height,
             std::vector<ObjectNode> nodes, std::vector<Relationship> edges);

  const std::string& image_id() const { return image_id_; }
  double width() const { return width_; }
  double height() const { return height_; }
  const std::vector<ObjectNode>& nodes() const { return nodes_; }
  const std::vector<Relationship>& edges() const { return edges_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  CategoryId category(NodeIndex node) const;
  Triplet triplet(std::size_t edge_index) const;

  // Copy of this graph with one node's category replaced.
  SceneGraph relabeled(NodeIndex node, CategoryId category) const;
  // Copy of this graph keeping only the edges at the given indices, in order.
  SceneGraph with_edges(const std::vector<std::size_t>& edge_indices) const;

  bool operator==(const SceneGraph&) const = default;

 private:
  std::string image_id_;
  double width_;
  double height_;
  std::vector<ObjectNode> nodes_;
  std::vector<Relationship> edges_;
};

// Throws InvalidArgument naming the image and field if any id is out of range.
void validate(const SceneGraph& graph, const Vocabulary& vocab);

std::size_t degree(const SceneGraph& graph, NodeIndex node);

// Indices of edges with `node` as subject or object, in edge order.
std::vector<std::size_t> incident_edges(const SceneGraph& graph, NodeIndex node);

std::vector<Triplet> categorical_triplets(const SceneGraph& graph);

}  // namespace sgaug
