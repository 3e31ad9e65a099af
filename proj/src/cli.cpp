#include "sgaug/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgaug/errors.hpp"
#include "sgaug/eval.hpp"
#include "sgaug/featmetrics.hpp"
#include "sgaug/ingest.hpp"
#include "sgaug/parallel.hpp"
#include "sgaug/perturb.hpp"
#include "sgaug/quality.hpp"
#include "sgaug/stats.hpp"

namespace sgaug::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void log(const std::string& msg) { std::cerr << "sgaug: " << msg << '\n'; }

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string fmt_double(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string train, vocab, out, csv;
  std::size_t top = 25;
};

int cmd_stats(const StatsArgs& a) {
  const Vocabulary vocab = load_vocabulary(a.vocab);
  const Dataset train = load_dataset(a.train, vocab);
  if (train.graphs.empty()) throw InvalidArgument("training dataset '" + a.train + "' is empty");
  const auto table = build_frequency_table(train);
  const auto freq = predicate_frequencies(train);
  const auto marginals = marginal_distributions(train);
  write_json(a.out, stats_to_json(table, freq, marginals, vocab));
  if (!a.csv.empty()) {
    auto out = open_output(a.csv);
    out << "kind,rank,name,count,fraction\n";
    auto emit = [&](const char* kind, const Histogram& h,
                    const std::vector<std::string>& names) {
      std::size_t rank = 1;
      for (const auto& [id, count] : h.top_k(a.top)) {
        out << kind << ',' << rank++ << ',' << names.at(id) << ',' << count << ','
            << fmt_double(h.fraction(id)) << '\n';
      }
    };
    emit("predicate", marginals.predicates, vocab.predicate_names());
    emit("object", marginals.objects, vocab.object_names());
  }
  log("stats: " + std::to_string(table.distinct_triplets()) + " distinct / " +
      std::to_string(table.total_triplets()) + " total triplets");
  return kExitOk;
}

// -------------------------------------------------------------- subsets

struct SubsetsArgs {
  std::string train, test, vocab, out_dir;
};

int cmd_subsets(const SubsetsArgs& a) {
  const Vocabulary vocab = load_vocabulary(a.vocab);
  const Dataset train = load_dataset(a.train, vocab);
  const Dataset test = load_dataset(a.test, vocab);
  const auto table = build_frequency_table(train);
  const auto subsets = shot_subsets(test, table);
  const fs::path dir(a.out_dir);
  json summary = json::object();
  for (ShotBucket b : {ShotBucket::kZero, ShotBucket::kFew10, ShotBucket::kFew100}) {
    const auto& s = subsets.at(b);
    auto out = open_output(dir / (std::string(bucket_name(b)) + ".jsonl"));
    write_dataset(out, s.graphs);
    summary[bucket_name(b)] = {{"graphs", s.graphs.graphs.size()},
                               {"triplets", s.triplets.size()}};
  }
  summary["all"] = {{"graphs", subsets.all.graphs.graphs.size()},
                    {"triplets", subsets.all.triplets.size()}};
  write_json(dir / "subset_triplets.json", subset_triplets_to_json(subsets, vocab));
  write_json(dir / "subsets_summary.json", summary);
  log("subsets: zs=" + std::to_string(subsets.zero.graphs.graphs.size()) +
      " few10=" + std::to_string(subsets.few10.graphs.graphs.size()) +
      " few100=" + std::to_string(subsets.few100.graphs.graphs.size()) + " graphs");
  return kExitOk;
}

// -------------------------------------------------------------- perturb

struct PerturbArgs {
  std::string method = "graphn";
  double intensity = 0.2;
  std::size_t top_k = 0;  // 0 = method default
  bool top_k_set = false;
  double alpha = 2.0;
  std::uint64_t seed = 0;
  std::string input, vocab, embeddings, stats, train, zs, out, records;
  std::size_t jobs = 0;
};

struct PerturbInputs {
  Vocabulary vocab;
  Dataset input;
  std::optional<EmbeddingTable> embeddings;
  std::optional<TripletFrequencyTable> table;
  std::optional<TripletSet> zs;
};

PerturbationConfig make_config(const PerturbArgs& a) {
  PerturbationConfig cfg;
  auto method = parse_method(a.method);
  if (!method) throw InvalidArgument("unknown method '" + a.method + "'");
  cfg.method = *method;
  cfg.intensity = a.intensity;
  cfg.alpha = a.alpha;
  cfg.master_seed = a.seed;
  cfg.top_k = a.top_k_set ? a.top_k : (cfg.method == PerturbMethod::kNeigh ? 10 : 5);
  cfg.validate();
  return cfg;
}

PerturbInputs load_perturb_inputs(const PerturbArgs& a, const PerturbationConfig& cfg) {
  // Flag combinations are checked before any file is read.
  const bool needs_emb =
      cfg.method == PerturbMethod::kNeigh || cfg.method == PerturbMethod::kGraphN;
  if (needs_emb && a.embeddings.empty()) {
    throw InvalidArgument(std::string(method_name(cfg.method)) + " requires --embeddings");
  }
  if (cfg.method == PerturbMethod::kOracleZs && a.zs.empty()) {
    throw InvalidArgument("oracle_zs requires --zs (subset_triplets.json)");
  }
  Vocabulary vocab = load_vocabulary(a.vocab);
  PerturbInputs in{vocab, load_dataset(a.input, vocab), {}, {}, {}};
  if (needs_emb) in.embeddings = load_embeddings(a.embeddings, vocab);
  if (cfg.method == PerturbMethod::kGraphN) {
    if (!a.stats.empty()) {
      in.table = load_frequency_table(a.stats, vocab);
    } else if (!a.train.empty()) {
      in.table = build_frequency_table(load_dataset(a.train, vocab));
    } else {
      in.table = build_frequency_table(in.input);
    }
  }
  if (cfg.method == PerturbMethod::kOracleZs) {
    auto sets = load_subset_triplets(a.zs, vocab);
    auto it = sets.find("zs");
    if (it == sets.end()) throw InvalidArgument("'" + a.zs + "' has no 'zs' entry");
    in.zs = std::move(it->second);
  }
  return in;
}

PerturbResources resources_of(const PerturbInputs& in) {
  return {in.embeddings ? &*in.embeddings : nullptr, in.table ? &*in.table : nullptr,
          in.zs ? &*in.zs : nullptr};
}

int cmd_perturb(const PerturbArgs& a) {
  const PerturbationConfig cfg = make_config(a);
  const PerturbInputs in = load_perturb_inputs(a, cfg);
  const auto result = perturb_dataset(in.input, cfg, resources_of(in),
                                      a.jobs ? a.jobs : default_jobs());
  {
    auto out = open_output(a.out);
    write_dataset(out, result.dataset);
  }
  {
    auto out = open_output(a.records);
    write_records(out, result.records);
  }
  std::size_t changed = 0;
  for (const auto& r : result.records) changed += r.changes.size();
  log(std::string("perturb[") + method_name(cfg.method) + "]: " +
      std::to_string(changed) + " nodes changed in " +
      std::to_string(result.records.size()) + " graphs");
  return kExitOk;
}

// ------------------------------------------------------------- hit-rate

struct HitRateArgs {
  std::string records, perturbed, vocab, subsets, out, csv, label;
  std::vector<double> sweep_alpha;
  PerturbArgs perturb;  // used by --sweep-alpha
};

const std::vector<std::string> kBucketOrder = {"zs", "few10", "few100", "all"};

json hit_rate_json(const HitRate& h) {
  return {{"percent", h.percent}, {"hits", h.hits}, {"total", h.total}, {"empty", h.empty}};
}

int cmd_hit_rate(const HitRateArgs& a) {
  if (!a.sweep_alpha.empty()) {
    if (a.csv.empty()) throw InvalidArgument("--sweep-alpha writes CSV; pass --csv");
    PerturbArgs pa = a.perturb;
    pa.method = "graphn";
    pa.vocab = a.vocab;
    const PerturbationConfig base_cfg = make_config(pa);
    const PerturbInputs in = load_perturb_inputs(pa, base_cfg);
    const auto refs = load_subset_triplets(a.subsets, in.vocab);
    auto out = open_output(a.csv);
    out << "alpha";
    for (const auto& b : kBucketOrder) {
      if (refs.count(b)) out << ',' << b;
    }
    out << '\n';
    for (double alpha : a.sweep_alpha) {
      PerturbationConfig cfg = base_cfg;
      cfg.alpha = alpha;
      const auto result = perturb_dataset(in.input, cfg, resources_of(in),
                                          pa.jobs ? pa.jobs : default_jobs());
      out << fmt_double(alpha);
      for (const auto& b : kBucketOrder) {
        auto it = refs.find(b);
        if (it == refs.end()) continue;
        out << ',' << fmt_double(hit_rate(result.records, result.dataset, it->second).percent);
      }
      out << '\n';
    }
    return kExitOk;
  }

  if (a.records.empty() || a.perturbed.empty() || a.out.empty()) {
    throw InvalidArgument("hit-rate needs --records, --perturbed and --out (or --sweep-alpha)");
  }
  const Vocabulary vocab = load_vocabulary(a.vocab);
  const auto records = load_records(a.records);
  const Dataset perturbed = load_dataset(a.perturbed, vocab);
  const auto refs = load_subset_triplets(a.subsets, vocab);
  json buckets = json::object();
  bool empty = false;
  std::ostringstream row;
  row << a.label;
  for (const auto& [name, set] : refs) {
    const HitRate h = hit_rate(records, perturbed, set);
    empty = empty || h.empty;
    buckets[name] = hit_rate_json(h);
  }
  for (const auto& b : kBucketOrder) {
    if (buckets.contains(b)) row << ',' << fmt_double(buckets[b]["percent"].get<double>());
  }
  if (empty) log("warning: no perturbed triplets; hit rates reported as 0");
  json doc = {{"buckets", buckets}, {"empty", empty}};
  if (!a.label.empty()) doc["label"] = a.label;
  write_json(a.out, doc);
  if (!a.csv.empty()) {
    auto out = open_output(a.csv);
    out << "label";
    for (const auto& b : kBucketOrder) {
      if (buckets.contains(b)) out << ',' << b;
    }
    out << '\n' << row.str() << '\n';
  }
  return kExitOk;
}

// --------------------------------------------------------- plausibility

struct PlausibilityArgs {
  std::string graphs, vocab, records, endpoint, out, mask_token = kDefaultMaskToken;
  std::string stub_train;
  std::uint64_t seed = 0;
  int timeout_ms = 10000;
  int attempts = 3;
  int backoff_ms = 200;
  std::size_t jobs = 0;
};

int cmd_plausibility(const PlausibilityArgs& a) {
  std::string endpoint = a.endpoint;
  if (endpoint.empty()) {
    if (const char* env = std::getenv("SGG_LM_ENDPOINT")) endpoint = env;
  }
  if (endpoint.empty() && a.stub_train.empty()) {
    throw InvalidArgument("no scorer: pass --endpoint, set SGG_LM_ENDPOINT, or use --stub-train");
  }
  const Vocabulary vocab = load_vocabulary(a.vocab);
  const Dataset graphs = load_dataset(a.graphs, vocab);
  std::optional<std::vector<PerturbationRecord>> records;
  if (!a.records.empty()) records = load_records(a.records);

  std::unique_ptr<PlausibilityScorer> scorer;
  std::optional<TripletFrequencyTable> table;
  if (!a.stub_train.empty()) {
    table = build_frequency_table(load_dataset(a.stub_train, vocab));
    scorer = std::make_unique<FrequencyStubScorer>(*table);
  } else {
    HttpScorerOptions opts;
    opts.endpoint = endpoint;
    opts.timeout = std::chrono::milliseconds(a.timeout_ms);
    opts.max_attempts = a.attempts;
    opts.retry_backoff = std::chrono::milliseconds(a.backoff_ms);
    scorer = std::make_unique<HttpPlausibilityScorer>(opts);
  }
  const auto report = score_graphs(*scorer, graphs, records ? &*records : nullptr, a.seed,
                                   a.jobs ? a.jobs : std::min<std::size_t>(default_jobs(), 8),
                                   a.mask_token);
  json per = json::array();
  for (const auto& g : report.per_graph) per.push_back({{"image_id", g.image_id}, {"score", g.score}});
  write_json(a.out, {{"mean", report.mean},
                     {"scored", report.per_graph.size()},
                     {"skipped", report.skipped},
                     {"per_graph", per}});
  if (report.skipped) log(std::to_string(report.skipped) + " graphs skipped (no maskable node)");
  return kExitOk;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  std::string predictions, gt, vocab, out, subset, subsets_file, train;
  std::string mode = "sgcls", metric = "recall", aggregate = "image";
  std::size_t k = 0;
  bool graph_constraint = false;
  double reweight_x = 0.0;
  bool per_image = false;
};

int cmd_eval(const EvalArgs& a) {
  auto mode = parse_mode(a.mode);
  if (!mode) throw InvalidArgument("unknown --mode '" + a.mode + "'");
  if (a.metric != "recall" && a.metric != "mean_recall") {
    throw InvalidArgument("--metric must be recall or mean_recall");
  }
  if (a.aggregate != "image" && a.aggregate != "triplet") {
    throw InvalidArgument("--aggregate must be image or triplet");
  }
  if (!a.subset.empty() && a.subsets_file.empty()) {
    throw InvalidArgument("--subset needs --subsets-file");
  }
  if (a.reweight_x != 0.0 && a.train.empty()) {
    throw InvalidArgument("--reweight-x needs --train for predicate frequencies");
  }
  const Vocabulary vocab = load_vocabulary(a.vocab);
  const Dataset gt = load_dataset(a.gt, vocab);
  const auto preds = load_predictions(a.predictions, vocab);

  RecallOptions opts;
  opts.mode = *mode;
  opts.k = a.k ? a.k : (*mode == EvalMode::kPredCls ? 50 : 100);
  opts.graph_constraint = a.graph_constraint;
  opts.reweight_x = a.reweight_x;
  opts.aggregate = a.aggregate == "image" ? RecallAggregate::kImage : RecallAggregate::kTriplet;
  std::optional<TripletSet> filter;
  if (!a.subset.empty()) {
    auto sets = load_subset_triplets(a.subsets_file, vocab);
    auto it = sets.find(a.subset);
    if (it == sets.end()) throw InvalidArgument("subset '" + a.subset + "' not in subsets file");
    filter = std::move(it->second);
    opts.subset_filter = &*filter;
  }
  std::vector<double> freq;
  if (a.reweight_x != 0.0) {
    freq = predicate_frequencies(load_dataset(a.train, vocab));
    opts.predicate_freq = &freq;
  }

  json doc = {{"metric", a.metric},
              {"K", opts.k},
              {"mode", mode_name(opts.mode)},
              {"graph_constraint", opts.graph_constraint},
              {"subset", a.subset.empty() ? "all" : a.subset},
              {"reweight_x", opts.reweight_x},
              {"aggregate", a.aggregate}};
  std::vector<ImageRecall> per_image;
  if (a.metric == "recall") {
    auto report = recall_at_k(preds, gt, opts);
    doc["value"] = report.value;
    per_image = std::move(report.per_image);
  } else {
    auto report = mean_recall(preds, gt, opts);
    doc["value"] = report.value;
    json per_pred = json::object();
    for (std::size_t r = 0; r < report.per_predicate.size(); ++r) {
      if (report.per_predicate[r]) per_pred[vocab.predicate_name(r)] = *report.per_predicate[r];
    }
    doc["per_predicate"] = per_pred;
    per_image = std::move(report.per_image);
  }
  doc["images"] = per_image.size();
  if (a.per_image) {
    json arr = json::array();
    for (const auto& ir : per_image) {
      arr.push_back({{"image_id", ir.image_id},
                     {"matched", ir.matched},
                     {"total", ir.total},
                     {"recall", 100.0 * ir.recall()}});
    }
    doc["per_image"] = arr;
  }
  write_json(a.out, doc);
  log(a.metric + "@" + std::to_string(opts.k) + " = " + fmt_double(doc["value"].get<double>()));
  return kExitOk;
}

// --------------------------------------------------------- feat-metrics

struct FeatArgs {
  std::string real, out, group = "features";
  std::vector<std::string> fakes, labels;
  int k = kDefaultNeighborhood;
  bool frechet = false;
  int decimals = 2;
};

int cmd_feat_metrics(const FeatArgs& a) {
  if (!a.labels.empty() && a.labels.size() != a.fakes.size()) {
    throw InvalidArgument("--label must be given once per --fake");
  }
  if (a.k < 1) throw InvalidArgument("--k must be >= 1");
  const FeatureSet real = load_feature_matrix(a.real);
  std::vector<ManifoldMetrics> metrics;
  std::vector<std::string> labels;
  std::vector<double> fds;
  for (std::size_t i = 0; i < a.fakes.size(); ++i) {
    const FeatureSet fake = load_feature_matrix(a.fakes[i]);
    metrics.push_back(precision_recall_density_coverage(real, fake, a.k));
    labels.push_back(a.labels.empty() ? a.fakes[i] : a.labels[i]);
    if (a.frechet) fds.push_back(frechet_distance(real, fake));
  }
  const auto report = summarize_feature_report(a.group, labels, metrics, a.decimals);
  json rows = json::array();
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    json row = {{"label", r.label},
                {"precision", r.metrics.precision},
                {"recall", r.metrics.recall},
                {"density", r.metrics.density},
                {"coverage", r.metrics.coverage},
                {"avg", r.average},
                {"avg_shown", r.shown_average},
                {"drop_percent", r.drop_percent},
                {"drop_rounded", r.drop_rounded}};
    if (a.frechet) row["frechet_distance"] = fds[i];
    rows.push_back(std::move(row));
  }
  write_json(a.out, {{"group", report.group}, {"k", a.k}, {"rows", rows}});
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Scene-graph perturbation and evaluation toolkit", "sgaug"};
  app.require_subcommand(1);

  StatsArgs stats;
  auto* s = app.add_subcommand("stats", "Triplet frequencies, predicate frequencies, marginals");
  s->add_option("--train", stats.train, "Training dataset (JSONL)")->required();
  s->add_option("--vocab", stats.vocab, "Vocabulary JSON")->required();
  s->add_option("--out", stats.out, "Output stats.json")->required();
  s->add_option("--csv", stats.csv, "Optional top-k marginals CSV");
  s->add_option("--top", stats.top, "Rows per histogram in the CSV")->capture_default_str();

  SubsetsArgs subsets;
  auto* ss = app.add_subcommand("subsets", "Zero/10/100-shot test subsets");
  ss->add_option("--train", subsets.train)->required();
  ss->add_option("--test", subsets.test)->required();
  ss->add_option("--vocab", subsets.vocab)->required();
  ss->add_option("--out-dir", subsets.out_dir)->required();

  auto add_perturb_flags = [](CLI::App* c, PerturbArgs& p, bool with_outputs) {
    c->add_option("--intensity", p.intensity, "Fraction L of nodes")->capture_default_str();
    c->add_option("--topk", p.top_k, "Semantic neighbours (default 10 neigh, 5 graphn)")
        ->each([&p](const std::string&) { p.top_k_set = true; });
    c->add_option("--alpha", p.alpha, "GraphN frequency threshold")->capture_default_str();
    c->add_option("--seed", p.seed, "Master seed")->capture_default_str();
    c->add_option("--input", p.input, "Dataset to perturb (JSONL)")->required(with_outputs);
    c->add_option("--embeddings", p.embeddings, "Word embeddings (text)");
    c->add_option("--stats", p.stats, "stats.json with the training frequency table");
    c->add_option("--train", p.train, "Training dataset for the frequency table");
    c->add_option("--jobs", p.jobs, "Worker threads (0 = all cores)");
  };

  PerturbArgs perturb;
  auto* p = app.add_subcommand("perturb", "Perturb scene graphs");
  p->add_option("--method", perturb.method, "rand | neigh | graphn | oracle_zs")
      ->check(CLI::IsMember({"rand", "neigh", "graphn", "oracle_zs"}))
      ->capture_default_str();
  add_perturb_flags(p, perturb, true);
  p->add_option("--vocab", perturb.vocab)->required();
  p->add_option("--zs", perturb.zs, "subset_triplets.json (oracle_zs)");
  p->add_option("--out", perturb.out, "Perturbed dataset (JSONL)")->required();
  p->add_option("--records", perturb.records, "Perturbation records (JSONL)")->required();

  HitRateArgs hit;
  auto* h = app.add_subcommand("hit-rate", "Hit rates of perturbed triplets per test subset");
  h->add_option("--records", hit.records);
  h->add_option("--perturbed", hit.perturbed);
  h->add_option("--vocab", hit.vocab)->required();
  h->add_option("--subsets", hit.subsets, "subset_triplets.json")->required();
  h->add_option("--out", hit.out, "JSON report");
  h->add_option("--csv", hit.csv, "CSV output");
  h->add_option("--label", hit.label, "Row label for CSV output");
  h->add_option("--sweep-alpha", hit.sweep_alpha, "Perturb with graphn at each alpha")
      ->delimiter(',');
  add_perturb_flags(h, hit.perturb, false);

  PlausibilityArgs plaus;
  auto* pl = app.add_subcommand("plausibility", "Masked-LM plausibility of scene graphs");
  pl->add_option("--graphs", plaus.graphs)->required();
  pl->add_option("--vocab", plaus.vocab)->required();
  pl->add_option("--records", plaus.records, "Mask perturbed nodes from these records");
  pl->add_option("--endpoint", plaus.endpoint, "Scoring service URL (overrides SGG_LM_ENDPOINT)");
  pl->add_option("--stub-train", plaus.stub_train, "Offline log-frequency scorer from this training set");
  pl->add_option("--seed", plaus.seed)->capture_default_str();
  pl->add_option("--mask-token", plaus.mask_token)->capture_default_str();
  pl->add_option("--timeout-ms", plaus.timeout_ms)->capture_default_str();
  pl->add_option("--retries", plaus.attempts, "Attempts per request")->capture_default_str();
  pl->add_option("--backoff-ms", plaus.backoff_ms)->capture_default_str();
  pl->add_option("--jobs", plaus.jobs, "Concurrent requests");
  pl->add_option("--out", plaus.out)->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Recall evaluation of predictions");
  e->add_option("--predictions", ev.predictions)->required();
  e->add_option("--gt", ev.gt)->required();
  e->add_option("--vocab", ev.vocab)->required();
  e->add_option("--mode", ev.mode)->check(CLI::IsMember({"sgcls", "predcls", "sggen"}))
      ->capture_default_str();
  e->add_option("--k", ev.k, "Top-K (default 100 sgcls/sggen, 50 predcls)");
  e->add_flag("--graph-constraint", ev.graph_constraint, "One predicate per pair");
  e->add_option("--metric", ev.metric, "recall | mean_recall")->capture_default_str();
  e->add_option("--subset", ev.subset, "Restrict GT to a subset (zs, few10, few100)");
  e->add_option("--subsets-file", ev.subsets_file, "subset_triplets.json");
  e->add_option("--reweight-x", ev.reweight_x, "Predicate reweighting exponent")
      ->capture_default_str();
  e->add_option("--train", ev.train, "Training dataset (predicate frequencies)");
  e->add_option("--aggregate", ev.aggregate, "image | triplet")->capture_default_str();
  e->add_flag("--per-image", ev.per_image);
  e->add_option("--out", ev.out)->required();

  FeatArgs feat;
  auto* f = app.add_subcommand("feat-metrics", "Precision/recall/density/coverage report");
  f->add_option("--real", feat.real, "Reference features (TSV)")->required();
  f->add_option("--fake", feat.fakes, "Compared features; repeatable")->required();
  f->add_option("--label", feat.labels, "Row label per --fake");
  f->add_option("--k", feat.k)->capture_default_str();
  f->add_option("--group", feat.group)->capture_default_str();
  f->add_flag("--frechet", feat.frechet, "Also report the Frechet distance");
  f->add_option("--decimals", feat.decimals, "Rounding of shown averages")->capture_default_str();
  f->add_option("--out", feat.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_stats(stats);
    if (ss->parsed()) return cmd_subsets(subsets);
    if (p->parsed()) return cmd_perturb(perturb);
    if (h->parsed()) return cmd_hit_rate(hit);
    if (pl->parsed()) return cmd_plausibility(plaus);
    if (e->parsed()) return cmd_eval(ev);
    if (f->parsed()) return cmd_feat_metrics(feat);
  } catch (const InvalidArgument& err) {
    log(std::string("error: ") + err.what());
    return kExitUsage;
  } catch (const ParseError& err) {
    log(std::string("error: ") + err.what());
    return kExitUsage;
  } catch (const CannotPerturb& err) {
    log(std::string("error: ") + err.what());
    return kExitUsage;
  } catch (const std::exception& err) {
    log(std::string("error: ") + err.what());
    return kExitRuntime;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sgaug::cli
