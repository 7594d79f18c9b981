#include <json.hpp>

#include "cstream/classifier.hpp"
#include "cstream/util.hpp"

namespace cstream {

namespace {

using nlohmann::json;

json node_to_json(const TreeNode& n) {
  json j;
  switch (n.kind) {
    case TreeNode::Kind::leaf:
      j["kind"] = "leaf";
      j["class"] = std::string(label_name(n.klass));
      j["p"] = n.probability;
      break;
    case TreeNode::Kind::numeric_split:
      j["kind"] = "num";
      j["feature"] = n.feature;
      j["threshold"] = n.threshold;
      j["le"] = n.le_child;
      j["gt"] = n.gt_child;
      j["absent"] = n.absent_child;
      break;
    case TreeNode::Kind::categorical_split: {
      j["kind"] = "cat";
      j["feature"] = n.feature;
      json branches = json::object();
      for (const auto& [value, child] : n.branches) branches[value] = child;
      j["branches"] = std::move(branches);
      j["default"] = n.default_child;
      break;
    }
  }
  return j;
}

TreeNode node_from_json(const json& j) {
  TreeNode n;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "leaf") {
    n.kind = TreeNode::Kind::leaf;
    const auto label = label_from_name(j.at("class").get<std::string>());
    if (!label) throw ModelSchemaError("model file: unknown class name");
    n.klass = *label;
    n.probability = j.at("p").get<double>();
  } else if (kind == "num") {
    n.kind = TreeNode::Kind::numeric_split;
    n.feature = j.at("feature").get<std::uint32_t>();
    n.threshold = j.at("threshold").get<double>();
    n.le_child = j.at("le").get<std::int32_t>();
    n.gt_child = j.at("gt").get<std::int32_t>();
    n.absent_child = j.at("absent").get<std::int32_t>();
  } else if (kind == "cat") {
    n.kind = TreeNode::Kind::categorical_split;
    n.feature = j.at("feature").get<std::uint32_t>();
    for (const auto& [value, child] : j.at("branches").items()) {
      n.branches.emplace_back(value, child.get<std::int32_t>());
    }
    std::sort(n.branches.begin(), n.branches.end());
    n.default_child = j.at("default").get<std::int32_t>();
  } else {
    throw ModelSchemaError("model file: unknown node kind '" + kind + "'");
  }
  return n;
}

json tree_nodes_json(const TreeModel& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) nodes.push_back(node_to_json(n));
  return nodes;
}

std::vector<TreeNode> tree_nodes_from_json(const json& nodes, std::size_t feature_count) {
  std::vector<TreeNode> out;
  out.reserve(nodes.size());
  for (const auto& j : nodes) out.push_back(node_from_json(j));
  for (const auto& n : out) {
    const auto check_child = [&](std::int32_t c) {
      if (c < 0 || static_cast<std::size_t>(c) >= out.size()) {
        throw ModelSchemaError("model file: node child index out of range");
      }
    };
    if (n.kind == TreeNode::Kind::numeric_split) {
      check_child(n.le_child);
      check_child(n.gt_child);
      check_child(n.absent_child);
    } else if (n.kind == TreeNode::Kind::categorical_split) {
      for (const auto& [_, child] : n.branches) check_child(child);
      check_child(n.default_child);
    }
    if (n.kind != TreeNode::Kind::leaf && n.feature >= feature_count) {
      throw ModelSchemaError("model file: feature index out of range");
    }
  }
  if (out.empty()) throw ModelSchemaError("model file: empty node list");
  return out;
}

json feature_names_json() {
  json names = json::array();
  for (const auto& info : feature_table()) names.push_back(std::string(info.name));
  return names;
}

void check_feature_names(const json& j) {
  const auto& table = feature_table();
  if (!j.is_array() || j.size() != table.size()) {
    throw ModelSchemaError("model file: feature_names must list the 17 features");
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (j[i].get<std::string>() != table[i].name) {
      throw ModelSchemaError("model file: unexpected feature name '" +
                             j[i].get<std::string>() + "'");
    }
  }
}

}  // namespace

std::string model_to_json(const Model& model) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["feature_names"] = feature_names_json();
  if (const auto* tree = std::get_if<TreeModel>(&model)) {
    j["type"] = "tree";
    j["params"] = {{"min_leaf", tree->params.min_leaf}, {"min_gain", tree->params.min_gain}};
    j["nodes"] = tree_nodes_json(*tree);
  } else {
    const auto& forest = std::get<ForestModel>(model);
    j["type"] = "forest";
    j["params"] = {{"n_trees", forest.params.n_trees},
                   {"feature_subset_size", forest.params.feature_subset_size},
                   {"seed", forest.params.seed},
                   {"bootstrap", forest.params.bootstrap},
                   {"min_leaf", forest.params.tree.min_leaf},
                   {"min_gain", forest.params.tree.min_gain}};
    json trees = json::array();
    for (const auto& tree : forest.trees) {
      json t;
      t["nodes"] = tree_nodes_json(tree);
      trees.push_back(std::move(t));
    }
    j["trees"] = std::move(trees);
  }
  return j.dump(1);
}

Model model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelSchemaError(std::string("model file: not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw ModelSchemaError("model file: schema version " + std::to_string(version) +
                             " unsupported (expected " + std::to_string(kModelSchemaVersion) + ")");
    }
    check_feature_names(j.at("feature_names"));
    const std::string type = j.at("type").get<std::string>();
    if (type == "tree") {
      TreeModel tree;
      tree.params.min_leaf = j.at("params").at("min_leaf").get<std::size_t>();
      tree.params.min_gain = j.at("params").at("min_gain").get<double>();
      tree.nodes = tree_nodes_from_json(j.at("nodes"), kFeatureCount);
      return tree;
    }
    if (type == "forest") {
      ForestModel forest;
      const auto& p = j.at("params");
      forest.params.n_trees = p.at("n_trees").get<std::size_t>();
      forest.params.feature_subset_size = p.at("feature_subset_size").get<std::size_t>();
      forest.params.seed = p.at("seed").get<std::uint64_t>();
      forest.params.bootstrap = p.at("bootstrap").get<bool>();
      forest.params.tree.min_leaf = p.at("min_leaf").get<std::size_t>();
      forest.params.tree.min_gain = p.at("min_gain").get<double>();
      for (const auto& t : j.at("trees")) {
        TreeModel tree;
        tree.params = forest.params.tree;
        tree.nodes = tree_nodes_from_json(t.at("nodes"), kFeatureCount);
        forest.trees.push_back(std::move(tree));
      }
      if (forest.trees.empty()) throw ModelSchemaError("model file: forest without trees");
      if (forest.trees.size() != forest.params.n_trees) {
        throw ModelSchemaError("model file: n_trees does not match the tree list");
      }
      return forest;
    }
    throw ModelSchemaError("model file: unknown type '" + type + "'");
  } catch (const json::exception& e) {
    throw ModelSchemaError(std::string("model file: ") + e.what());
  }
}

std::string report_to_json(const EvalReport& r) {
  json j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["tn"] = r.tn;
  j["fn"] = r.fn;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision ? json(*r.precision) : json(nullptr);
  j["recall"] = r.recall ? json(*r.recall) : json(nullptr);
  j["f_measure"] = r.f_measure ? json(*r.f_measure) : json(nullptr);
  return j.dump(2);
}

std::string report_to_table(const EvalReport& r) {
  auto cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("n/a");
  };
  std::string out;
  out += "accuracy   " + format_double(r.accuracy) + "\n";
  out += "precision  " + cell(r.precision) + "\n";
  out += "recall     " + cell(r.recall) + "\n";
  out += "f-measure  " + cell(r.f_measure) + "\n";
  out += "confusion  tp=" + format_i64(static_cast<std::int64_t>(r.tp)) +
         " fp=" + format_i64(static_cast<std::int64_t>(r.fp)) +
         " tn=" + format_i64(static_cast<std::int64_t>(r.tn)) +
         " fn=" + format_i64(static_cast<std::int64_t>(r.fn)) + "\n";
  return out;
}

}  // namespace cstream
