#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "sectree/circa.hpp"
#include "sectree/error.hpp"
#include "sectree/generators.hpp"
#include "sectree/serialize.hpp"

namespace sectree {
namespace {

using nlohmann::json;

TEST(TreeJson, RoundTrip) {
  Graph g = erdos_renyi(20, 0.25, 3);
  CodingTree t = circa(g, 3).tree;
  const json doc = tree_to_json(t);
  CodingTree back = tree_from_json(doc, g);
  EXPECT_EQ(tree_to_json(back), doc);
  EXPECT_EQ(structural_entropy(g, back).total, structural_entropy(g, t).total);
  EXPECT_EQ(doc.at("graph_hash").get<std::string>().size(), 16u);

  CodingTree loose = tree_from_json(doc);
  EXPECT_EQ(tree_to_json(loose), doc);
}

TEST(TreeJson, WritesCompactedForm) {
  Graph k3 = complete_graph(3);
  CodingTree t = CodingTree::star(k3);
  NodeId e = t.merge(k3, 0, 1);
  t.remove(e);
  const json doc = tree_to_json(t);
  EXPECT_EQ(doc.at("nodes").size(), 4u);
  EXPECT_EQ(doc.at("root").get<NodeId>(), 3u);
}

TEST(TreeJson, RejectsWrongGraph) {
  Graph g = erdos_renyi(10, 0.4, 1);
  const json doc = tree_to_json(circa(g, 2).tree);
  EXPECT_THROW(tree_from_json(doc, erdos_renyi(10, 0.4, 2)), Error);
}

TEST(TreeJson, RejectsTampering) {
  Graph g = complete_graph(4);
  const json good = tree_to_json(circa(g, 2).tree);

  json bad_volume = good;
  bad_volume["nodes"][0]["volume"] = 99;
  EXPECT_THROW(tree_from_json(bad_volume, g), Error);

  json bad_height = good;
  bad_height["nodes"][0]["height"] = 3;
  EXPECT_THROW(tree_from_json(bad_height, g), Error);

  json dup_leaf = good;
  dup_leaf["nodes"][1]["leaf_vertex"] = 0;
  EXPECT_THROW(tree_from_json(dup_leaf, g), Error);
  EXPECT_THROW(tree_from_json(dup_leaf), Error);

  json bad_hash = good;
  bad_hash["graph_hash"] = "xyz";
  EXPECT_THROW(tree_from_json(bad_hash, g), Error);

  EXPECT_THROW(tree_from_json(json::object(), g), Error);
  EXPECT_THROW(tree_from_json(json::parse(R"({"root":0,"graph_hash":"0000000000000000","nodes":[]})")), Error);
}

TEST(WeightsJson, RoundTrip) {
  std::mt19937_64 rng(4);
  for (NormMode norm : {NormMode::Off, NormMode::Inference}) {
    TinWeights w = testing::random_weights(5, 3, 2, 2, rng, PoolMode::Max, norm);
    const json doc = weights_to_json(w);
    TinWeights back = weights_from_json(doc);
    EXPECT_EQ(weights_to_json(back), doc);
    EXPECT_EQ(back.pool, PoolMode::Max);
    EXPECT_EQ(back.norm, norm);
    EXPECT_EQ(back.classifier, w.classifier);
    EXPECT_EQ(back.mlps[1].w2, w.mlps[1].w2);
  }
}

TEST(WeightsJson, Errors) {
  std::mt19937_64 rng(4);
  const json good = weights_to_json(testing::random_weights(3, 2, 2, 1, rng));

  json missing = good;
  missing.erase("w_c");
  EXPECT_THROW(weights_from_json(missing), Error);

  json ragged = good;
  ragged["w_p"] = json::parse("[[1, 2], [3]]");
  EXPECT_THROW(weights_from_json(ragged), Error);

  json wrong_shape = good;
  wrong_shape["b_c"] = json::parse("[1, 2]");
  EXPECT_THROW(weights_from_json(wrong_shape), Error);

  json extra_layer = good;
  extra_layer["mlps"].push_back(extra_layer["mlps"][0]);
  EXPECT_THROW(weights_from_json(extra_layer), Error);

  json bad_pool = good;
  bad_pool["pool"] = "median";
  EXPECT_THROW(weights_from_json(bad_pool), Error);

  json text = good;
  text["d_v"] = "two";
  EXPECT_THROW(weights_from_json(text), Error);
}

TEST(Rounding, SignificantDigits) {
  EXPECT_EQ(round_significant(1.3899750004807707), 1.389975);
  EXPECT_EQ(round_significant(1.584962500721156), 1.584963);
  EXPECT_EQ(round_significant(0.0), 0.0);
  EXPECT_EQ(round_significant(-0.0001234567891), -0.0001234568);
  EXPECT_EQ(round_significant(123456789.0), 123456800.0);
}

TEST(ReportJson, TermsAndLabels) {
  Graph g = Graph::from_edges(2, std::vector<std::pair<VertexId, VertexId>>{{0, 1}}, {"left", "right"});
  CodingTree t = CodingTree::star(g);
  const json doc = report_to_json(structural_entropy(g, t), t, g);
  EXPECT_EQ(doc.at("entropy").get<double>(), 1.0);
  EXPECT_EQ(doc.at("log_base").get<int>(), 2);
  ASSERT_EQ(doc.at("terms").size(), 2u);
  EXPECT_EQ(doc["terms"][1]["label"], "right");
}

}  // namespace
}  // namespace sectree
