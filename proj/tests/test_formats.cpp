#include <doctest.h>

#include <random>

#include "cstream/classifier.hpp"
#include "oracles.hpp"

using namespace cstream;

TEST_CASE("model JSON round trip is byte-identical") {
  std::mt19937_64 rng(91);
  for (int i = 0; i < 1'000; ++i) {
    const Model model = oracle::random_tree_model(rng);
    const std::string text = model_to_json(model);
    const Model back = model_from_json(text);
    CHECK(model_to_json(back) == text);
    CHECK(std::get<TreeModel>(back) == std::get<TreeModel>(model));
  }
}

TEST_CASE("trained models survive serialization with identical predictions") {
  std::mt19937_64 rng(92);
  std::vector<FeatureVector> examples;
  for (int i = 0; i < 400; ++i) {
    FeatureVector v;
    const bool pos = rng() % 5 == 0;
    v.num_children = static_cast<double>(pos ? 8 + rng() % 30 : rng() % 5);
    v.content_type = pos ? "text/html" : (rng() % 2 ? "image/png" : "text/css");
    v.url_length = static_cast<double>(10 + rng() % 80);
    if (rng() % 2) v.dt_parent = static_cast<double>(rng() % 100) / 10.0;
    v.has_referer = v.dt_parent.has_value();
    v.label = pos ? Label::user_action : Label::automatic;
    examples.push_back(std::move(v));
  }

  SUBCASE("tree") {
    const Model model = train_tree(examples);
    const Model back = model_from_json(model_to_json(model));
    for (const auto& e : examples) {
      CHECK(predict(back, e).label == predict(model, e).label);
      CHECK(predict(back, e).probability == predict(model, e).probability);
    }
  }
  SUBCASE("forest") {
    ForestParams params;
    params.n_trees = 7;
    params.seed = 3;
    const Model model = train_forest(examples, params);
    const std::string text = model_to_json(model);
    const Model back = model_from_json(text);
    CHECK(model_to_json(back) == text);
    CHECK(std::get<ForestModel>(back) == std::get<ForestModel>(model));
    for (const auto& e : examples) {
      CHECK(predict(back, e).label == predict(model, e).label);
    }
  }
}

TEST_CASE("model schema validation") {
  SUBCASE("version mismatch") {
    CHECK_THROWS_AS(model_from_json(R"({"schema_version": 2, "type": "tree"})"), ModelSchemaError);
  }
  SUBCASE("garbage") {
    CHECK_THROWS_AS(model_from_json("not json at all"), ModelSchemaError);
  }
  SUBCASE("missing fields") {
    CHECK_THROWS_AS(model_from_json(R"({"schema_version": 1})"), ModelSchemaError);
  }
  SUBCASE("wrong feature names") {
    std::mt19937_64 rng(93);
    std::string text = model_to_json(oracle::random_tree_model(rng));
    const auto pos = text.find("num_children");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "num_kidlings");
    CHECK_THROWS_AS(model_from_json(text), ModelSchemaError);
  }
  SUBCASE("child index out of range") {
    const char* text = R"({
      "schema_version": 1, "type": "tree",
      "feature_names": ["num_children","content_type","dt_prev_request","status_code",
        "url_length","dt_sibling","ads_in_url","dt_parent","content_length",
        "parent_status_code","has_referer","max_dt_child","parent_content_type",
        "ads_in_referer","max_length_child","min_dt_child","parent_content_length"],
      "params": {"min_leaf": 5, "min_gain": 0.0001},
      "nodes": [{"kind":"num","feature":0,"threshold":1.5,"le":7,"gt":1,"absent":1},
                {"kind":"leaf","class":"automatic","p":1.0}]
    })";
    CHECK_THROWS_AS(model_from_json(text), ModelSchemaError);
  }
}
