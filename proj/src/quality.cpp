#include "sgaug/quality.hpp"

#include <cmath>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <json.hpp>

#include "sgaug/errors.hpp"
#include "sgaug/parallel.hpp"

namespace sgaug {

using nlohmann::json;

HitRate hit_rate(const std::vector<PerturbationRecord>& records,
                 const Dataset& perturbed, const TripletSet& reference) {
  std::unordered_map<std::string, const SceneGraph*> by_id;
  for (const auto& g : perturbed.graphs) by_id.emplace(g.image_id(), &g);
  HitRate out;
  for (const auto& r : records) {
    auto it = by_id.find(r.image_id);
    if (it == by_id.end()) {
      throw InvalidArgument("hit_rate: record for image '" + r.image_id +
                            "' has no perturbed graph");
    }
    const SceneGraph& g = *it->second;
    for (std::size_t k : r.affected_edges) {
      if (k >= g.num_edges()) {
        throw InvalidArgument("hit_rate: image '" + r.image_id + "' edge " +
                              std::to_string(k) + " out of range");
      }
      ++out.total;
      if (reference.count(g.triplet(k))) ++out.hits;
    }
  }
  if (out.total == 0) {
    out.empty = true;
    return out;
  }
  out.percent = 100.0 * static_cast<double>(out.hits) / static_cast<double>(out.total);
  return out;
}

PlausibilityQuery build_query(const SceneGraph& graph, NodeIndex masked_node,
                              const Vocabulary& vocab, Rng& rng,
                              const std::string& mask_token) {
  if (masked_node >= graph.num_nodes()) {
    throw InvalidArgument("build_query: node " + std::to_string(masked_node) +
                          " out of range");
  }
  const auto incident = incident_edges(graph, masked_node);
  if (incident.empty()) {
    throw InvalidArgument("build_query: node " + std::to_string(masked_node) +
                          " of image '" + graph.image_id() + "' has no edges");
  }
  const std::size_t masked_edge = incident[rng.uniform_index(incident.size())];

  std::vector<std::string> phrases;
  phrases.reserve(graph.num_edges());
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    const auto& e = graph.edges()[k];
    std::string subject = vocab.object_name(graph.category(e.subject));
    std::string object = vocab.object_name(graph.category(e.object));
    if (k == masked_edge) {
      (e.subject == masked_node ? subject : object) = mask_token;
    }
    phrases.push_back(subject + " " + vocab.predicate_name(e.predicate) + " " + object);
  }
  rng.shuffle(phrases);

  PlausibilityQuery q;
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    if (i) q.text += " . ";
    q.text += phrases[i];
  }
  q.target = vocab.object_name(graph.category(masked_node));
  q.masked_triplet = graph.triplet(masked_edge);
  q.masked_node = masked_node;
  return q;
}

double FrequencyStubScorer::score(const PlausibilityQuery& query) {
  return std::log1p(static_cast<double>(table_.count(query.masked_triplet)));
}

std::string score_request_body(const PlausibilityQuery& query) {
  return json{{"text", query.text}, {"target", query.target}}.dump();
}

double parse_score_response(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ScorerError(std::string("malformed score response: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("score") || !doc.at("score").is_number()) {
    throw ScorerError("score response lacks a numeric 'score' field");
  }
  const double s = doc.at("score").get<double>();
  if (!std::isfinite(s)) throw ScorerError("score response is not finite");
  return s;
}

HttpPlausibilityScorer::HttpPlausibilityScorer(HttpScorerOptions options)
    : options_(std::move(options)) {
  if (options_.endpoint.empty()) {
    throw InvalidArgument("plausibility endpoint is empty");
  }
  scheme_host_port_ = options_.endpoint;
  while (!scheme_host_port_.empty() && scheme_host_port_.back() == '/') {
    scheme_host_port_.pop_back();
  }
  if (options_.max_attempts < 1) options_.max_attempts = 1;
}

double HttpPlausibilityScorer::score(const PlausibilityQuery& query) {
  const std::string body = score_request_body(query);
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    httplib::Client client(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
        options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(options_.path, body, "application/json");
    if (res && res->status == 200) return parse_score_response(res->body);
    last_error = res ? "HTTP status " + std::to_string(res->status)
                     : "transport error: " + httplib::to_string(res.error());
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(options_.retry_backoff * attempt);
    }
  }
  throw ScorerError("scoring request to " + scheme_host_port_ + options_.path +
                    " failed after " + std::to_string(options_.max_attempts) +
                    " attempts: " + last_error);
}

PlausibilityReport score_graphs(PlausibilityScorer& scorer, const Dataset& dataset,
                                const std::vector<PerturbationRecord>* records,
                                std::uint64_t seed, std::size_t jobs,
                                const std::string& mask_token) {
  std::unordered_map<std::string, const PerturbationRecord*> by_id;
  if (records) {
    for (const auto& r : *records) by_id.emplace(r.image_id, &r);
  }
  const std::size_t n = dataset.graphs.size();
  std::vector<std::optional<double>> scores(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const SceneGraph& g = dataset.graphs[i];
    std::vector<NodeIndex> maskable;
    if (records) {
      auto it = by_id.find(g.image_id());
      if (it != by_id.end()) {
        for (const auto& c : it->second->changes) {
          if (c.node < g.num_nodes() && degree(g, c.node) > 0) maskable.push_back(c.node);
        }
      }
    } else {
      for (NodeIndex v = 0; v < g.num_nodes(); ++v) {
        if (degree(g, v) > 0) maskable.push_back(v);
      }
    }
    if (maskable.empty()) return;
    Rng rng(image_seed(g.image_id(), seed));
    const NodeIndex node = maskable[rng.uniform_index(maskable.size())];
    const auto query = build_query(g, node, dataset.vocab, rng, mask_token);
    try {
      scores[i] = scorer.score(query);
    } catch (const ScorerError& e) {
      throw ScorerError("image '" + g.image_id() + "': " + e.what());
    }
  });

  PlausibilityReport report;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!scores[i]) {
      ++report.skipped;
      continue;
    }
    report.per_graph.push_back({dataset.graphs[i].image_id(), *scores[i]});
    sum += *scores[i];
  }
  if (!report.per_graph.empty()) {
    report.mean = sum / static_cast<double>(report.per_graph.size());
  }
  return report;
}

}  // namespace sgaug
