#include "sectree/serialize.hpp"

#include <cmath>
#include <cstdio>

#include "sectree/error.hpp"

namespace sectree {

namespace {

using nlohmann::json;

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t parse_hash(const json& doc) {
  const auto text = doc.at("graph_hash").get<std::string>();
  if (text.size() != 16 || text.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw Error("tree: graph_hash must be 16 lowercase hex digits");
  }
  return std::stoull(text, nullptr, 16);
}

struct ParsedTree {
  std::vector<NodeLink> links;
  std::vector<int> heights;
  std::vector<std::vector<NodeId>> children;
  NodeId root;
  std::uint64_t hash;
  std::size_t vertex_count = 0;
};

ParsedTree parse_tree(const json& doc) {
  ParsedTree out;
  try {
    out.root = doc.at("root").get<NodeId>();
    out.hash = parse_hash(doc);
    const auto& nodes = doc.at("nodes");
    if (!nodes.is_array() || nodes.empty()) throw Error("tree: 'nodes' must be a non-empty array");
    out.links.resize(nodes.size());
    out.heights.resize(nodes.size());
    out.children.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      if (n.at("id").get<std::size_t>() != i) {
        throw Error("tree: node ids must be 0..N-1 in order (entry " + std::to_string(i) + ")");
      }
      NodeLink& link = out.links[i];
      if (!n.at("parent").is_null()) link.parent = n.at("parent").get<NodeId>();
      if (n.contains("leaf_vertex") && !n.at("leaf_vertex").is_null()) {
        link.leaf_vertex = n.at("leaf_vertex").get<VertexId>();
        out.vertex_count++;
      }
      link.volume = n.at("volume").get<std::int64_t>();
      link.out_degree = n.at("out_degree").get<std::int64_t>();
      out.heights[i] = n.at("height").get<int>();
      out.children[i] = n.at("children").get<std::vector<NodeId>>();
    }
  } catch (const json::exception& e) {
    throw Error(std::string("tree: malformed document: ") + e.what());
  }
  return out;
}

// Links, heights and child lists in the document must agree with the tree
// they assemble into.
void check_against(const ParsedTree& parsed, const CodingTree& t) {
  if (t.root() != parsed.root) throw Error("tree: 'root' does not name the parentless node");
  for (NodeId id = 0; id < parsed.links.size(); ++id) {
    const TreeNode& n = t.node(id);
    if (n.height != parsed.heights[id]) throw Error("tree: stored height of node " + std::to_string(id) + " is wrong");
    if (n.children != parsed.children[id]) {
      throw Error("tree: children of node " + std::to_string(id) + " disagree with the parent links");
    }
  }
}

void require_valid(const ValidationReport& report) {
  if (report) return;
  std::string msg = "tree: invalid coding tree: " + to_string(*report.violated);
  if (report.node) msg += " at node " + std::to_string(*report.node);
  throw Error(msg + ": " + report.message);
}

json matrix_json(const DenseMatrix& m) { return m.to_rows(); }

json flat_json(const DenseMatrix& m) {
  std::vector<double> v(m.values().begin(), m.values().end());
  return v;
}

DenseMatrix read_matrix(const json& doc, const char* key) {
  if (!doc.contains(key)) throw Error(std::string("weights: missing '") + key + "'");
  return DenseMatrix::from_rows(doc.at(key).get<std::vector<std::vector<double>>>());
}

DenseMatrix read_row(const json& doc, const char* key) {
  if (!doc.contains(key)) throw Error(std::string("weights: missing '") + key + "'");
  auto v = doc.at(key).get<std::vector<double>>();
  return DenseMatrix::row_vector(v);
}

}  // namespace

json tree_to_json(const CodingTree& tree) {
  const CodingTree t = tree.compacted();
  json nodes = json::array();
  for (NodeId id : t.node_ids()) {
    const TreeNode& n = t.node(id);
    json entry = {{"id", id},
                  {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                  {"children", n.children},
                  {"height", n.height},
                  {"volume", n.volume},
                  {"out_degree", n.out_degree}};
    if (n.leaf_vertex) entry["leaf_vertex"] = *n.leaf_vertex;
    nodes.push_back(std::move(entry));
  }
  return {{"root", t.root()}, {"graph_hash", hash_hex(t.graph_fingerprint())}, {"nodes", std::move(nodes)}};
}

CodingTree tree_from_json(const json& doc, const Graph& g) {
  const ParsedTree parsed = parse_tree(doc);
  if (parsed.hash != g.fingerprint()) throw Error("tree: graph_hash does not match the graph");
  CodingTree t = CodingTree::from_links(g, parsed.links);
  check_against(parsed, t);
  require_valid(validate(t, g));
  for (NodeId id = 0; id < parsed.links.size(); ++id) {
    if (parsed.links[id].volume != t.node(id).volume || parsed.links[id].out_degree != t.node(id).out_degree) {
      throw Error("tree: stored volume/out_degree of node " + std::to_string(id) + " disagree with the graph");
    }
  }
  return t;
}

CodingTree tree_from_json(const json& doc) {
  const ParsedTree parsed = parse_tree(doc);
  CodingTree t = CodingTree::from_links(parsed.links, parsed.vertex_count, parsed.hash);
  check_against(parsed, t);
  require_valid(validate_structure(t, parsed.vertex_count));
  return t;
}

json report_to_json(const EntropyReport& report, const CodingTree& t, const Graph& g) {
  json terms = json::array();
  for (const auto& term : report.terms) {
    const TreeNode& n = t.node(term.node);
    json entry = {{"node", term.node},
                  {"term", round_significant(term.value)},
                  {"volume", n.volume},
                  {"out_degree", n.out_degree}};
    if (n.leaf_vertex) entry["label"] = g.name(*n.leaf_vertex);
    terms.push_back(std::move(entry));
  }
  return {{"entropy", round_significant(report.total)}, {"log_base", report.log_base}, {"terms", std::move(terms)}};
}

json trace_to_json(const CircaTrace& trace) {
  auto rounded = [](const std::vector<double>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(round_significant(x));
    return out;
  };
  return {{"stage1_deltas", rounded(trace.stage1_deltas)},
          {"stage2_deltas", rounded(trace.stage2_deltas)},
          {"h_max", trace.h_max},
          {"shifts", trace.shifts},
          {"padded_layers", trace.padded_layers},
          {"final_entropy", round_significant(trace.final_entropy)}};
}

TinWeights weights_from_json(const json& doc) {
  TinWeights w;
  try {
    w.labels = doc.at("labels").get<std::size_t>();
    w.text_dim = doc.at("d_h").get<std::size_t>();
    w.node_dim = doc.at("d_v").get<std::size_t>();
    w.height = doc.at("k").get<int>();
    w.pool = parse_pool_mode(doc.value("pool", std::string("sum")));
    w.norm = parse_norm_mode(doc.value("norm", std::string("off")));
    w.duplication = read_matrix(doc, "w_d");
    w.projection = read_matrix(doc, "w_p");
    w.node_bias = read_matrix(doc, "b_h");
    for (const auto& m : doc.at("mlps")) {
      MlpWeights mlp{read_matrix(m, "w1"), read_row(m, "b1"), read_matrix(m, "w2"), read_row(m, "b2"), {}, {}};
      if (w.norm == NormMode::Inference) {
        mlp.scale = read_row(m, "scale");
        mlp.shift = read_row(m, "shift");
      }
      w.mlps.push_back(std::move(mlp));
    }
    w.classifier = read_matrix(doc, "w_c");
    w.classifier_bias = read_row(doc, "b_c");
  } catch (const json::exception& e) {
    throw Error(std::string("weights: malformed document: ") + e.what());
  }
  w.validate();
  return w;
}

json weights_to_json(const TinWeights& w) {
  json mlps = json::array();
  for (const auto& m : w.mlps) {
    json entry = {{"w1", matrix_json(m.w1)}, {"b1", flat_json(m.b1)}, {"w2", matrix_json(m.w2)}, {"b2", flat_json(m.b2)}};
    if (w.norm == NormMode::Inference) {
      entry["scale"] = flat_json(m.scale);
      entry["shift"] = flat_json(m.shift);
    }
    mlps.push_back(std::move(entry));
  }
  return {{"labels", w.labels}, {"d_h", w.text_dim}, {"d_v", w.node_dim}, {"k", w.height},
          {"pool", to_string(w.pool)}, {"norm", to_string(w.norm)},
          {"w_d", matrix_json(w.duplication)}, {"w_p", matrix_json(w.projection)}, {"b_h", matrix_json(w.node_bias)},
          {"mlps", std::move(mlps)}, {"w_c", matrix_json(w.classifier)}, {"b_c", flat_json(w.classifier_bias)}};
}

double round_significant(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value == 0.0 ? 0.0 : value;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return std::strtod(buf, nullptr);
}

}  // namespace sectree
