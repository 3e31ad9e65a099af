#include <doctest.h>
#include <cmath>
#include <functional>

#include <sstream>

#include "sgaug/errors.hpp"
#include "sgaug/ingest.hpp"
#include "support.hpp"

using namespace sgaug;

namespace {

Vocabulary vocab_from(const std::string& text) {
  std::istringstream in(text);
  return parse_vocabulary(in, "vocab.json");
}

Dataset dataset_from(const std::string& text, const Vocabulary& vocab) {
  std::istringstream in(text);
  return parse_dataset(in, vocab, "data.jsonl");
}

EmbeddingTable embeddings_from(const std::string& text, const Vocabulary& vocab) {
  std::istringstream in(text);
  return parse_embeddings(in, vocab, "emb.txt");
}

FeatureSet features_from(const std::string& text) {
  std::istringstream in(text);
  return parse_feature_matrix(in, "feat.tsv");
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("vocabulary parsing") {
  const Vocabulary v = vocab_from(R"({"objects":["person","dog"],"predicates":["on"]})");
  CHECK(v.num_objects() == 2);
  CHECK(v.find_object("dog") == 1u);
  CHECK(v.find_predicate("on") == 0u);
  CHECK_THROWS_AS(vocab_from(R"({"objects":["a",""],"predicates":["on"]})"), ParseError);
  CHECK_THROWS_AS(vocab_from(R"({"objects":["a"]})"), ParseError);
  CHECK_THROWS_AS(vocab_from(R"({"objects":[],"predicates":["on"]})"), ParseError);
  CHECK_THROWS_AS(vocab_from(R"({"objects":["a","a"],"predicates":["on"]})"), ParseError);
  CHECK_THROWS_AS(vocab_from("{"), ParseError);
}

TEST_CASE("dataset parsing") {
  const Vocabulary v = vocab_from(R"({"objects":["person","dog"],"predicates":["on"]})");
  const Dataset ds = dataset_from(
      R"({"image_id":"a","width":10,"height":8,"objects":[{"category":"person","box":[0,0,5,5]},{"category":1,"box":[1,1,4,6]}],"relationships":[{"subject":0,"predicate":"on","object":1}],"extra":true})"
      "\n\n",
      v);
  REQUIRE(ds.graphs.size() == 1);
  CHECK(ds.graphs[0].num_nodes() == 2);
  CHECK(ds.graphs[0].num_edges() == 1);
  CHECK(ds.graphs[0].category(1) == 1u);

  const std::string self_loop =
      R"({"image_id":"b","width":10,"height":8,"objects":[{"category":0,"box":[0,0,5,5]}],"relationships":[{"subject":0,"predicate":0,"object":0}]})";
  const std::string msg = error_of([&] { dataset_from(self_loop, v); });
  CHECK(msg.find("'b'") != std::string::npos);
  CHECK(msg.find("self-loop") != std::string::npos);

  const std::string bad_box =
      R"({"image_id":"c","width":10,"height":8,"objects":[{"category":0,"box":[5,0,5,5]}],"relationships":[]})";
  CHECK(error_of([&] { dataset_from(bad_box, v); }).find("box") != std::string::npos);
  const std::string bad_cat =
      R"({"image_id":"d","width":10,"height":8,"objects":[{"category":9,"box":[0,0,5,5]}],"relationships":[]})";
  CHECK_THROWS_AS(dataset_from(bad_cat, v), ParseError);
  CHECK_THROWS_AS(dataset_from("{not json", v), ParseError);
}

TEST_CASE("dataset save/load round trip") {
  const Vocabulary v = sgaug::testing::make_vocab(7, 4);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset ds = sgaug::testing::random_dataset(v, 15, seed);
    std::ostringstream out;
    write_dataset(out, ds);
    CHECK(dataset_from(out.str(), v) == ds);
  }
}

TEST_CASE("embedding parsing") {
  const Vocabulary cat({"cat"}, {"on"});
  const EmbeddingTable t = embeddings_from("cat 1.0 0.0\n", cat);
  CHECK(t.dimension() == 2);
  CHECK(t.vector(0) == std::vector<double>{1.0, 0.0});

  const Vocabulary tl({"traffic light", "car"}, {"on"});
  const EmbeddingTable m = embeddings_from("light 0 2\ntraffic 2 0\ncar 1 0\n", tl);
  CHECK(m.vector(0) == std::vector<double>{1.0, 1.0});

  CHECK_THROWS_AS(embeddings_from("cat 1 0\ndog 1 0 0\n", cat), ParseError);
  const Vocabulary two({"cat", "zebra crossing"}, {"on"});
  const std::string msg = error_of([&] { embeddings_from("cat 1 0\n", two); });
  CHECK(msg.find("zebra crossing") != std::string::npos);
  CHECK_THROWS_AS(embeddings_from("cat 0 0\n", cat), std::exception);
}

TEST_CASE("embedding cosine") {
  const EmbeddingTable t({{1.0, 0.0}, {0.9, 0.1}, {0.0, 1.0}});
  CHECK(t.cosine(0, 0) == doctest::Approx(1.0));
  CHECK(t.cosine(0, 2) == doctest::Approx(0.0));
  CHECK(t.cosine(0, 1) == doctest::Approx(0.9 / std::sqrt(0.82)));
}

TEST_CASE("prediction parsing") {
  const Vocabulary v({"a", "b", "c"}, {"p", "q"});
  std::istringstream labels(
      R"({"image_id":"x","object_labels":[2,0],"pairs":[{"subject":0,"object":1,"predicate_scores":[0.3,0.7]}]})");
  const auto preds = parse_predictions(labels, v, "pred.jsonl");
  REQUIRE(preds.size() == 1);
  CHECK(preds[0].object_scores[0] == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(preds[0].object_scores[1] == std::vector<double>{1.0, 0.0, 0.0});
  CHECK(preds[0].pairs[0].predicate_scores == std::vector<double>{0.3, 0.7});

  std::istringstream scores(
      R"({"image_id":"y","object_scores":[[0.2,0.3,0.5],[0.1,0.1,0.8]],"pairs":[],"boxes":[[0,0,1,1],[1,1,2,2]]})");
  const auto full = parse_predictions(scores, v, "pred.jsonl");
  CHECK(full[0].object_scores[1][2] == 0.8);
  CHECK(full[0].boxes.has_value());

  std::istringstream wrong(
      R"({"image_id":"z","object_labels":[0,1],"pairs":[{"subject":0,"object":1,"predicate_scores":[1.0]}]})");
  CHECK_THROWS_AS(parse_predictions(wrong, v, "pred.jsonl"), ParseError);
  std::istringstream unnormalised(
      R"({"image_id":"z","object_scores":[[0.5,0.5,0.5]],"pairs":[]})");
  CHECK_THROWS_AS(parse_predictions(unnormalised, v, "pred.jsonl"), ParseError);
}

TEST_CASE("feature matrix parsing") {
  const FeatureSet f = features_from("2 3\n1 2 3\n4 5 6\n");
  CHECK(f.size() == 2);
  CHECK(f.dim() == 3);
  CHECK(f.rows()(1, 2) == 6.0);

  const std::string nan_row5 = "6 2\n0 0\n0 0\n0 0\n0 0\n1 nan\n0 0\n";
  const std::string msg = error_of([&] { features_from(nan_row5); });
  CHECK(msg.find("row 5") != std::string::npos);

  CHECK(features_from("0 4\n").size() == 0);
  CHECK_THROWS_AS(features_from("3 2\n1 2\n"), ParseError);
  CHECK_THROWS_AS(features_from("1 2\n1 2 3\n"), ParseError);

  std::ostringstream out;
  write_feature_matrix(out, f);
  CHECK(features_from(out.str()).rows() == f.rows());
}
