#include "sgaug/stats.hpp"

#include <algorithm>
#include <fstream>

#include "sgaug/errors.hpp"

namespace sgaug {
namespace {

using nlohmann::json;

const std::vector<TripletIndex::Entry>& lookup(
    const std::map<std::uint64_t, std::vector<TripletIndex::Entry>>& m,
    std::uint64_t k) {
  static const std::vector<TripletIndex::Entry> kEmpty;
  auto it = m.find(k);
  return it == m.end() ? kEmpty : it->second;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": malformed JSON: " + e.what());
  }
}

json histogram_to_json(const Histogram& h, const std::vector<std::string>& names) {
  json out = json::array();
  for (const auto& [id, count] : h.top_k(h.counts.size())) {
    out.push_back({{"id", id},
                   {"name", names.at(id)},
                   {"count", count},
                   {"fraction", h.fraction(id)}});
  }
  return out;
}

}  // namespace

TripletIndex::TripletIndex(const std::map<Triplet, std::uint64_t>& counts) {
  // std::map iteration is ordered by (s, p, o), so subject lists come out
  // sorted; object lists are sorted because o varies fastest within (s, p).
  for (const auto& [t, n] : counts) {
    by_predicate_object_[key(t.predicate, t.object)].push_back({t.subject, n});
    by_subject_predicate_[key(t.subject, t.predicate)].push_back({t.object, n});
  }
}

const std::vector<TripletIndex::Entry>& TripletIndex::subjects_for(
    PredicateId p, CategoryId object) const {
  return lookup(by_predicate_object_, key(p, object));
}

const std::vector<TripletIndex::Entry>& TripletIndex::objects_for(
    CategoryId subject, PredicateId p) const {
  return lookup(by_subject_predicate_, key(subject, p));
}

TripletFrequencyTable::TripletFrequencyTable(std::map<Triplet, std::uint64_t> counts)
    : counts_(std::move(counts)) {
  for (const auto& [t, n] : counts_) {
    if (n == 0) throw InvalidArgument("frequency table: zero count stored");
    total_ += n;
  }
  index_ = TripletIndex(counts_);
}

std::uint64_t TripletFrequencyTable::count(const Triplet& t) const {
  auto it = counts_.find(t);
  return it == counts_.end() ? 0 : it->second;
}

TripletFrequencyTable build_frequency_table(const Dataset& train) {
  if (train.graphs.empty()) {
    throw InvalidArgument("build_frequency_table: training dataset is empty");
  }
  std::map<Triplet, std::uint64_t> counts;
  for (const auto& g : train.graphs) {
    for (const auto& t : categorical_triplets(g)) ++counts[t];
  }
  return TripletFrequencyTable(std::move(counts));
}

const char* bucket_name(ShotBucket bucket) {
  switch (bucket) {
    case ShotBucket::kZero: return "zs";
    case ShotBucket::kFew10: return "few10";
    case ShotBucket::kFew100: return "few100";
    case ShotBucket::kAll: return "all";
  }
  return "?";
}

ShotBucket bucket_for_count(std::uint64_t count) {
  if (count == 0) return ShotBucket::kZero;
  if (count <= 10) return ShotBucket::kFew10;
  if (count <= 100) return ShotBucket::kFew100;
  return ShotBucket::kAll;
}

const ShotSubset& ShotSubsets::at(ShotBucket bucket) const {
  switch (bucket) {
    case ShotBucket::kZero: return zero;
    case ShotBucket::kFew10: return few10;
    case ShotBucket::kFew100: return few100;
    case ShotBucket::kAll: return all;
  }
  throw InvalidArgument("unknown shot bucket");
}

ShotSubsets shot_subsets(const Dataset& test, const TripletFrequencyTable& table) {
  ShotSubsets out{{{test.vocab, {}}, {}},
                  {{test.vocab, {}}, {}},
                  {{test.vocab, {}}, {}},
                  {test, {}}};
  for (const auto& g : test.graphs) {
    std::array<std::vector<std::size_t>, 3> kept;
    for (std::size_t k = 0; k < g.num_edges(); ++k) {
      const Triplet t = g.triplet(k);
      out.all.triplets.insert(t);
      switch (bucket_for_count(table.count(t))) {
        case ShotBucket::kZero:
          kept[0].push_back(k);
          out.zero.triplets.insert(t);
          break;
        case ShotBucket::kFew10:
          kept[1].push_back(k);
          out.few10.triplets.insert(t);
          break;
        case ShotBucket::kFew100:
          kept[2].push_back(k);
          out.few100.triplets.insert(t);
          break;
        case ShotBucket::kAll:
          break;
      }
    }
    ShotSubset* targets[3] = {&out.zero, &out.few10, &out.few100};
    for (int b = 0; b < 3; ++b) {
      if (!kept[b].empty()) targets[b]->graphs.graphs.push_back(g.with_edges(kept[b]));
    }
  }
  return out;
}

std::vector<double> predicate_frequencies(const Dataset& train) {
  std::vector<std::uint64_t> counts(train.vocab.num_predicates(), 0);
  std::uint64_t total = 0;
  for (const auto& g : train.graphs) {
    for (const auto& e : g.edges()) {
      ++counts.at(e.predicate);
      ++total;
    }
  }
  if (total == 0) {
    throw InvalidArgument("predicate_frequencies: training set has no edges");
  }
  std::vector<double> f(counts.size());
  for (std::size_t r = 0; r < counts.size(); ++r) {
    f[r] = static_cast<double>(counts[r]) / static_cast<double>(total);
  }
  return f;
}

double Histogram::fraction(std::uint32_t id) const {
  if (total == 0) return 0.0;
  auto it = counts.find(id);
  return it == counts.end() ? 0.0
                            : static_cast<double>(it->second) / static_cast<double>(total);
}

std::vector<std::pair<std::uint32_t, std::uint64_t>> Histogram::top_k(
    std::size_t k) const {
  std::vector<std::pair<std::uint32_t, std::uint64_t>> items(counts.begin(),
                                                             counts.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (items.size() > k) items.resize(k);
  return items;
}

Marginals marginal_distributions(const Dataset& dataset) {
  Marginals m;
  for (const auto& g : dataset.graphs) {
    for (const auto& node : g.nodes()) {
      ++m.objects.counts[node.category];
      ++m.objects.total;
    }
    for (const auto& e : g.edges()) {
      ++m.predicates.counts[e.predicate];
      ++m.predicates.total;
    }
  }
  return m;
}

json triplet_to_json(const Triplet& t, const Vocabulary& vocab) {
  return {{"s", vocab.object_name(t.subject)},
          {"p", vocab.predicate_name(t.predicate)},
          {"o", vocab.object_name(t.object)}};
}

Triplet triplet_from_json(const json& doc, const Vocabulary& vocab,
                          const std::string& where) {
  auto field = [&](const char* key) -> const json& {
    if (!doc.is_object() || !doc.contains(key)) {
      throw ParseError(where + ": missing field '" + key + "'");
    }
    return doc.at(key);
  };
  auto object_id = [&](const json& v, const char* key) -> CategoryId {
    if (v.is_number_integer() && v.get<long long>() >= 0 &&
        static_cast<std::size_t>(v.get<long long>()) < vocab.num_objects()) {
      return static_cast<CategoryId>(v.get<long long>());
    }
    if (v.is_string()) {
      if (auto id = vocab.find_object(v.get<std::string>())) return *id;
    }
    throw ParseError(where + ": field '" + key + "' is not a known object category");
  };
  Triplet t;
  t.subject = object_id(field("s"), "s");
  t.object = object_id(field("o"), "o");
  const json& p = field("p");
  if (p.is_number_integer() && p.get<long long>() >= 0 &&
      static_cast<std::size_t>(p.get<long long>()) < vocab.num_predicates()) {
    t.predicate = static_cast<PredicateId>(p.get<long long>());
  } else if (auto id = p.is_string() ? vocab.find_predicate(p.get<std::string>())
                                     : std::nullopt) {
    t.predicate = *id;
  } else {
    throw ParseError(where + ": field 'p' is not a known predicate");
  }
  return t;
}

json stats_to_json(const TripletFrequencyTable& table,
                   const std::vector<double>& predicate_freq,
                   const Marginals& marginals, const Vocabulary& vocab) {
  json doc;
  json triplets = json::array();
  for (const auto& [t, n] : table.counts()) {
    json entry = triplet_to_json(t, vocab);
    entry["count"] = n;
    triplets.push_back(std::move(entry));
  }
  doc["triplets"] = std::move(triplets);
  doc["total_triplets"] = table.total_triplets();
  doc["distinct_triplets"] = table.distinct_triplets();
  doc["predicate_freq"] = predicate_freq;
  doc["object_hist"] = histogram_to_json(marginals.objects, vocab.object_names());
  doc["predicate_hist"] =
      histogram_to_json(marginals.predicates, vocab.predicate_names());
  return doc;
}

TripletFrequencyTable frequency_table_from_json(const json& doc,
                                                const Vocabulary& vocab) {
  if (!doc.is_object() || !doc.contains("triplets") || !doc.at("triplets").is_array()) {
    throw ParseError("stats: missing 'triplets' array");
  }
  std::map<Triplet, std::uint64_t> counts;
  const json& arr = doc.at("triplets");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "stats triplets[" + std::to_string(i) + "]";
    const Triplet t = triplet_from_json(arr[i], vocab, where);
    if (!arr[i].contains("count") || !arr[i].at("count").is_number_unsigned() ||
        arr[i].at("count").get<std::uint64_t>() == 0) {
      throw ParseError(where + ": 'count' must be a positive integer");
    }
    counts[t] += arr[i].at("count").get<std::uint64_t>();
  }
  return TripletFrequencyTable(std::move(counts));
}

TripletFrequencyTable load_frequency_table(const std::filesystem::path& path,
                                           const Vocabulary& vocab) {
  try {
    return frequency_table_from_json(read_json_file(path), vocab);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json subset_triplets_to_json(const ShotSubsets& subsets, const Vocabulary& vocab) {
  json doc = json::object();
  for (ShotBucket b : kAllBuckets) {
    json arr = json::array();
    for (const auto& t : subsets.at(b).triplets) arr.push_back(triplet_to_json(t, vocab));
    doc[bucket_name(b)] = std::move(arr);
  }
  return doc;
}

std::map<std::string, TripletSet> load_subset_triplets(
    const std::filesystem::path& path, const Vocabulary& vocab) {
  const json doc = read_json_file(path);
  if (!doc.is_object()) throw ParseError(path.string() + ": expected a JSON object");
  std::map<std::string, TripletSet> out;
  for (const auto& [name, arr] : doc.items()) {
    if (!arr.is_array()) {
      throw ParseError(path.string() + ": '" + name + "' must be an array");
    }
    TripletSet& set = out[name];
    for (std::size_t i = 0; i < arr.size(); ++i) {
      set.insert(triplet_from_json(
          arr[i], vocab, path.string() + " " + name + "[" + std::to_string(i) + "]"));
    }
  }
  return out;
}

}  // namespace sgaug
