#include "sgaug/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "sgaug/errors.hpp"

namespace sgaug {
namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view text, double& value) {
  // from_chars rejects a leading '+', which some writers emit.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool is_blank(const std::string& line) {
  for (char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

std::vector<std::string> string_array(const json& doc, const char* key,
                                      const std::string& source) {
  const json& arr = require(doc, key, source);
  if (!arr.is_array()) {
    throw ParseError(source + ": field '" + key + "' must be an array");
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) {
      throw ParseError(source + ": " + key + "[" + std::to_string(i) +
                       "] must be a string");
    }
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

template <typename Id, typename Find>
Id resolve_id(const json& value, std::size_t limit, Find find,
              const std::string& where) {
  if (value.is_number_unsigned() || value.is_number_integer()) {
    const auto id = value.get<long long>();
    if (id < 0 || static_cast<std::size_t>(id) >= limit) {
      throw ParseError(where + " id " + std::to_string(id) + " out of range");
    }
    return static_cast<Id>(id);
  }
  if (value.is_string()) {
    auto id = find(value.get<std::string>());
    if (!id) {
      throw ParseError(where + " unknown name '" + value.get<std::string>() + "'");
    }
    return *id;
  }
  throw ParseError(where + " must be an integer id or a name");
}

std::size_t node_index(const json& value, const std::string& where) {
  if (!value.is_number_integer() || value.get<long long>() < 0) {
    throw ParseError(where + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(value.get<long long>());
}

double number(const json& value, const std::string& where) {
  if (!value.is_number()) throw ParseError(where + " must be a number");
  return value.get<double>();
}

BoundingBox parse_box(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 4) {
    throw ParseError(where + " must be [x1, y1, x2, y2]");
  }
  BoundingBox box{number(value[0], where), number(value[1], where),
                  number(value[2], where), number(value[3], where)};
  if (!box.is_valid()) {
    throw ParseError(where + " is degenerate (need 0 <= x1 < x2, 0 <= y1 < y2)");
  }
  return box;
}

std::string image_id_of(const json& doc) {
  if (!doc.is_object() || !doc.contains("image_id")) return {};
  const json& v = doc.at("image_id");
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return {};
}

json parse_json_line(const std::string& line, const std::string& where) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(where + ": malformed JSON: " + e.what());
  }
}

SceneGraph parse_graph(const json& doc, const Vocabulary& vocab,
                       const std::string& line_ctx) {
  const std::string image_id = image_id_of(doc);
  if (image_id.empty()) {
    throw ParseError(line_ctx + ": missing or invalid field 'image_id'");
  }
  const std::string where = line_ctx + " image '" + image_id + "'";
  const double width = number(require(doc, "width", where), where + " width");
  const double height = number(require(doc, "height", where), where + " height");

  const json& objects = require(doc, "objects", where);
  if (!objects.is_array()) throw ParseError(where + ": 'objects' must be an array");
  std::vector<ObjectNode> nodes;
  nodes.reserve(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string field = where + " objects[" + std::to_string(i) + "]";
    ObjectNode node;
    node.category = resolve_id<CategoryId>(
        require(objects[i], "category", field), vocab.num_objects(),
        [&](const std::string& n) { return vocab.find_object(n); },
        field + ".category");
    node.box = parse_box(require(objects[i], "box", field), field + ".box");
    nodes.push_back(node);
  }

  std::vector<Relationship> edges;
  if (doc.contains("relationships")) {
    const json& rels = doc.at("relationships");
    if (!rels.is_array()) {
      throw ParseError(where + ": 'relationships' must be an array");
    }
    edges.reserve(rels.size());
    for (std::size_t k = 0; k < rels.size(); ++k) {
      const std::string field = where + " relationships[" + std::to_string(k) + "]";
      Relationship rel;
      rel.subject = node_index(require(rels[k], "subject", field), field + ".subject");
      rel.object = node_index(require(rels[k], "object", field), field + ".object");
      rel.predicate = resolve_id<PredicateId>(
          require(rels[k], "predicate", field), vocab.num_predicates(),
          [&](const std::string& n) { return vocab.find_predicate(n); },
          field + ".predicate");
      if (rel.subject >= nodes.size() || rel.object >= nodes.size()) {
        throw ParseError(field + ": node index out of range (n=" +
                         std::to_string(nodes.size()) + ")");
      }
      if (rel.subject == rel.object) {
        throw ParseError(field + ": self-loop (subject == object)");
      }
      edges.push_back(rel);
    }
  }
  try {
    return SceneGraph(image_id, width, height, std::move(nodes), std::move(edges));
  } catch (const InvalidArgument& e) {
    throw ParseError(line_ctx + ": " + e.what());
  }
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::vector<double>> vectors)
    : vectors_(std::move(vectors)) {
  if (vectors_.empty()) throw InvalidArgument("embedding table is empty");
  dimension_ = vectors_.front().size();
  if (dimension_ == 0) throw InvalidArgument("embedding dimension is zero");
  norms_.reserve(vectors_.size());
  for (std::size_t c = 0; c < vectors_.size(); ++c) {
    if (vectors_[c].size() != dimension_) {
      throw InvalidArgument("embedding for category " + std::to_string(c) +
                            " has dimension " + std::to_string(vectors_[c].size()) +
                            ", expected " + std::to_string(dimension_));
    }
    double sq = 0.0;
    for (double v : vectors_[c]) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("embedding for category " + std::to_string(c) +
                              " is not finite");
      }
      sq += v * v;
    }
    if (sq == 0.0) {
      throw InvalidArgument("embedding for category " + std::to_string(c) +
                            " is all zeros");
    }
    norms_.push_back(std::sqrt(sq));
  }
}

double EmbeddingTable::cosine(CategoryId a, CategoryId b) const {
  const auto& va = vectors_.at(a);
  const auto& vb = vectors_.at(b);
  double dot = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) dot += va[i] * vb[i];
  return dot / (norms_[a] * norms_[b]);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_vocabulary(in, path.string());
}

Vocabulary parse_vocabulary(std::istream& in, const std::string& source) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw ParseError(source + ": expected a JSON object");
  auto objects = string_array(doc, "objects", source);
  auto predicates = string_array(doc, "predicates", source);
  try {
    return Vocabulary(std::move(objects), std::move(predicates));
  } catch (const InvalidArgument& e) {
    throw ParseError(source + ": " + e.what());
  }
}

Dataset load_dataset(const std::filesystem::path& path, const Vocabulary& vocab) {
  auto in = open_input(path);
  return parse_dataset(in, vocab, path.string());
}

Dataset parse_dataset(std::istream& in, const Vocabulary& vocab,
                      const std::string& source) {
  Dataset dataset{vocab, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const std::string ctx = source + ":" + std::to_string(line_no);
    dataset.graphs.push_back(parse_graph(parse_json_line(line, ctx), vocab, ctx));
  }
  return dataset;
}

std::string graph_to_json_line(const SceneGraph& graph) {
  // Ids rather than names keep the output independent of name spelling.
  json doc;
  doc["image_id"] = graph.image_id();
  doc["width"] = graph.width();
  doc["height"] = graph.height();
  json objects = json::array();
  for (const auto& node : graph.nodes()) {
    objects.push_back({{"category", node.category},
                       {"box", {node.box.x1, node.box.y1, node.box.x2, node.box.y2}}});
  }
  doc["objects"] = std::move(objects);
  json rels = json::array();
  for (const auto& e : graph.edges()) {
    rels.push_back(
        {{"subject", e.subject}, {"predicate", e.predicate}, {"object", e.object}});
  }
  doc["relationships"] = std::move(rels);
  return doc.dump();
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  for (const auto& g : dataset.graphs) out << graph_to_json_line(g) << '\n';
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_dataset(out, dataset);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const Vocabulary& vocab) {
  auto in = open_input(path);
  return parse_embeddings(in, vocab, path.string());
}

EmbeddingTable parse_embeddings(std::istream& in, const Vocabulary& vocab,
                                const std::string& source) {
  std::unordered_set<std::string> wanted;
  std::vector<std::vector<std::string>> words(vocab.num_objects());
  for (CategoryId c = 0; c < vocab.num_objects(); ++c) {
    const std::string& name = vocab.object_name(c);
    wanted.insert(name);
    for (auto w : split_ws(name)) {
      words[c].emplace_back(w);
      wanted.emplace(w);
    }
  }

  std::unordered_map<std::string, std::vector<double>> found;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const std::size_t d = tokens.size() - 1;
    const std::string ctx = source + ":" + std::to_string(line_no);
    if (d == 0) throw ParseError(ctx + ": token without values");
    if (dim == 0) {
      dim = d;
    } else if (d != dim) {
      throw ParseError(ctx + ": expected " + std::to_string(dim) +
                       " values, found " + std::to_string(d));
    }
    std::string token(tokens[0]);
    if (!wanted.count(token) || found.count(token)) continue;
    std::vector<double> vec(d);
    for (std::size_t i = 0; i < d; ++i) {
      if (!parse_double(tokens[i + 1], vec[i]) || !std::isfinite(vec[i])) {
        throw ParseError(ctx + ": invalid value '" + std::string(tokens[i + 1]) + "'");
      }
    }
    found.emplace(std::move(token), std::move(vec));
  }
  if (dim == 0) throw ParseError(source + ": no embedding lines");

  std::vector<std::vector<double>> vectors(vocab.num_objects());
  std::vector<std::string> unresolved;
  for (CategoryId c = 0; c < vocab.num_objects(); ++c) {
    const std::string& name = vocab.object_name(c);
    if (auto it = found.find(name); it != found.end()) {
      vectors[c] = it->second;
      continue;
    }
    std::vector<double> mean(dim, 0.0);
    std::size_t hits = 0;
    for (const auto& w : words[c]) {
      if (auto it = found.find(w); it != found.end()) {
        for (std::size_t i = 0; i < dim; ++i) mean[i] += it->second[i];
        ++hits;
      }
    }
    if (hits == 0) {
      unresolved.push_back(name);
      continue;
    }
    for (double& v : mean) v /= static_cast<double>(hits);
    vectors[c] = std::move(mean);
  }
  if (!unresolved.empty()) {
    std::string msg = source + ": no embedding for categories:";
    for (const auto& n : unresolved) msg += " '" + n + "'";
    throw ParseError(msg);
  }
  try {
    return EmbeddingTable(std::move(vectors));
  } catch (const InvalidArgument& e) {
    throw ParseError(source + ": " + e.what());
  }
}

std::vector<PredictedGraph> load_predictions(const std::filesystem::path& path,
                                             const Vocabulary& vocab) {
  auto in = open_input(path);
  return parse_predictions(in, vocab, path.string());
}

std::vector<PredictedGraph> parse_predictions(std::istream& in,
                                              const Vocabulary& vocab,
                                              const std::string& source) {
  std::vector<PredictedGraph> out;
  std::string line;
  std::size_t line_no = 0;
  const std::size_t num_objects = vocab.num_objects();
  const std::size_t num_predicates = vocab.num_predicates();
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const std::string ctx = source + ":" + std::to_string(line_no);
    const json doc = parse_json_line(line, ctx);
    PredictedGraph pred;
    pred.image_id = image_id_of(doc);
    if (pred.image_id.empty()) {
      throw ParseError(ctx + ": missing or invalid field 'image_id'");
    }
    const std::string where = ctx + " image '" + pred.image_id + "'";

    if (doc.contains("object_scores")) {
      const json& rows = doc.at("object_scores");
      if (!rows.is_array()) throw ParseError(where + ": object_scores must be an array");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string field = where + " object_scores[" + std::to_string(i) + "]";
        if (!rows[i].is_array() || rows[i].size() != num_objects) {
          throw ParseError(field + ": expected " + std::to_string(num_objects) +
                           " scores");
        }
        std::vector<double> row;
        row.reserve(num_objects);
        for (const auto& v : rows[i]) row.push_back(number(v, field));
        pred.object_scores.push_back(std::move(row));
      }
    } else if (doc.contains("object_labels")) {
      const json& labels = doc.at("object_labels");
      if (!labels.is_array()) throw ParseError(where + ": object_labels must be an array");
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto c = resolve_id<CategoryId>(
            labels[i], num_objects,
            [&](const std::string& n) { return vocab.find_object(n); },
            where + " object_labels[" + std::to_string(i) + "]");
        std::vector<double> row(num_objects, 0.0);
        row[c] = 1.0;
        pred.object_scores.push_back(std::move(row));
      }
    } else {
      throw ParseError(where + ": needs 'object_scores' or 'object_labels'");
    }

    if (doc.contains("pairs")) {
      const json& pairs = doc.at("pairs");
      if (!pairs.is_array()) throw ParseError(where + ": 'pairs' must be an array");
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const std::string field = where + " pairs[" + std::to_string(k) + "]";
        PairScores ps;
        ps.subject = node_index(require(pairs[k], "subject", field), field + ".subject");
        ps.object = node_index(require(pairs[k], "object", field), field + ".object");
        const json& scores = require(pairs[k], "predicate_scores", field);
        if (!scores.is_array() || scores.size() != num_predicates) {
          throw ParseError(field + ".predicate_scores: expected " +
                           std::to_string(num_predicates) + " scores");
        }
        for (const auto& v : scores) ps.predicate_scores.push_back(number(v, field));
        pred.pairs.push_back(std::move(ps));
      }
    }

    if (doc.contains("boxes") && !doc.at("boxes").is_null()) {
      const json& boxes = doc.at("boxes");
      if (!boxes.is_array()) throw ParseError(where + ": 'boxes' must be an array");
      std::vector<BoundingBox> parsed;
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        parsed.push_back(parse_box(boxes[i], where + " boxes[" + std::to_string(i) + "]"));
      }
      pred.boxes = std::move(parsed);
    }

    try {
      validate(pred, num_objects, num_predicates);
    } catch (const InvalidArgument& e) {
      throw ParseError(ctx + ": " + e.what());
    }
    out.push_back(std::move(pred));
  }
  return out;
}

FeatureSet load_feature_matrix(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_feature_matrix(in, path.string());
}

FeatureSet parse_feature_matrix(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    header = split_ws(line);
  }
  if (header.size() != 2) {
    throw ParseError(source + ": header must be 'N D'");
  }
  long long n = -1;
  long long d = -1;
  auto parse_count = [&](std::string_view t, long long& v) {
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    return ec == std::errc() && ptr == t.data() + t.size() && v >= 0;
  };
  if (!parse_count(header[0], n) || !parse_count(header[1], d)) {
    throw ParseError(source + ": header must be two non-negative integers 'N D'");
  }
  if (n > 0 && d == 0) throw ParseError(source + ": dimension must be >= 1");

  Eigen::MatrixXd rows(n, d);
  long long row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (row >= n) {
      throw ParseError(source + ": more than " + std::to_string(n) +
                       " rows (extra row at line " + std::to_string(line_no) + ")");
    }
    const std::string where = source + ": row " + std::to_string(row + 1);
    if (static_cast<long long>(tokens.size()) != d) {
      throw ParseError(where + " has " + std::to_string(tokens.size()) +
                       " values, expected " + std::to_string(d));
    }
    for (long long j = 0; j < d; ++j) {
      double v = 0.0;
      if (!parse_double(tokens[j], v)) {
        throw ParseError(where + ": invalid value '" + std::string(tokens[j]) + "'");
      }
      if (!std::isfinite(v)) {
        throw ParseError(where + ": non-finite value '" + std::string(tokens[j]) + "'");
      }
      rows(row, j) = v;
    }
    ++row;
  }
  if (row != n) {
    throw ParseError(source + ": header declares " + std::to_string(n) +
                     " rows, found " + std::to_string(row));
  }
  return FeatureSet(std::move(rows));
}

void write_feature_matrix(std::ostream& out, const FeatureSet& features) {
  out << features.size() << ' ' << features.dim() << '\n';
  std::ostringstream buf;
  buf.precision(17);
  for (Eigen::Index i = 0; i < features.size(); ++i) {
    for (Eigen::Index j = 0; j < features.dim(); ++j) {
      if (j) buf << '\t';
      buf << features.rows()(i, j);
    }
    buf << '\n';
  }
  out << buf.str();
}

}  // namespace sgaug
