#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sectree/circa.hpp"
#include "sectree/entropy.hpp"
#include "sectree/error.hpp"
#include "sectree/metrics.hpp"
#include "sectree/serialize.hpp"

namespace sectree::cli {

namespace {

using nlohmann::json;

// Oracle runs at k=2 stay fast up to here.
constexpr std::size_t kOracleMaxVertices = 6;

std::string read_file(const std::string& path, const char* what) {
  if (path.empty()) throw Error(std::string("missing --") + what);
  if (!std::filesystem::is_regular_file(path)) throw Error(std::string(what) + " file not found: " + path);
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in.good() && !in.eof()) throw Error("cannot read " + path);
  return ss.str();
}

json read_json(const std::string& path, const char* what) {
  const std::string text = read_file(path, what);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(path + ": not valid JSON: " + e.what());
  }
}

struct LoadedGraph {
  Graph graph;
  std::optional<Taxonomy> taxonomy;
};

LoadedGraph load_graph(const CommandConfig& cfg) {
  const std::string text = read_file(cfg.input, "input");
  try {
    if (cfg.format == "edgelist") return {from_edge_list(text), std::nullopt};
    if (cfg.format == "taxonomy") {
      Taxonomy tax = from_taxonomy(text);
      Graph g = tax.graph;
      return {std::move(g), std::move(tax)};
    }
  } catch (const ParseError& e) {
    throw Error(cfg.input + ": " + e.what());
  }
  throw Error("unknown --format '" + cfg.format + "' (expected edgelist or taxonomy)");
}

void require_k(int k) {
  if (k < 1) throw Error("--k must be at least 1, got " + std::to_string(k));
}

std::vector<double> parse_numbers(const std::string& line, std::size_t line_no, const std::string& path) {
  std::vector<double> row;
  std::istringstream ss(line);
  std::string token;
  while (ss >> token) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw Error(path + ": line " + std::to_string(line_no) + ": '" + token + "' is not a number");
    }
    row.push_back(x);
  }
  return row;
}

// One row of numbers per non-blank line.
std::vector<std::vector<double>> read_rows(const std::string& path, const char* what) {
  std::istringstream in(read_file(path, what));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto row = parse_numbers(line, line_no, path);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(path + ": no rows");
  return rows;
}

json rounded(const std::vector<double>& xs) {
  json arr = json::array();
  for (double x : xs) arr.push_back(round_significant(x));
  return arr;
}

json cmd_ingest(const CommandConfig& cfg) {
  LoadedGraph loaded = load_graph(cfg);
  const Graph& g = loaded.graph;
  std::ostringstream hash;
  hash << std::hex;
  hash.width(16);
  hash.fill('0');
  hash << g.fingerprint();
  json doc = {{"vertices", g.vertex_count()}, {"edges", g.edge_count()}, {"volume", g.volume()},
              {"graph_hash", hash.str()}};
  if (loaded.taxonomy) {
    const Taxonomy& tax = *loaded.taxonomy;
    doc["labels"] = tax.label_count();
    doc["depth"] = tax.depth();
    doc["root"] = g.name(tax.root);
    doc["warnings"] = tax.warnings;
  }
  return doc;
}

json cmd_entropy(const CommandConfig& cfg) {
  LoadedGraph loaded = load_graph(cfg);
  const Graph& g = loaded.graph;
  CodingTree t = cfg.tree == "star" ? CodingTree::star(g) : tree_from_json(read_json(cfg.tree, "tree"), g);
  json doc = report_to_json(structural_entropy(g, t), t, g);
  doc["height"] = t.height();
  return doc;
}

json cmd_circa(const CommandConfig& cfg) {
  require_k(cfg.k);
  LoadedGraph loaded = load_graph(cfg);
  auto result = circa(loaded.graph, cfg.k);
  json doc = {{"k", cfg.k}, {"entropy", round_significant(result.trace.final_entropy)},
              {"tree", tree_to_json(result.tree)}};
  if (cfg.trace) doc["trace"] = trace_to_json(result.trace);
  return doc;
}

json cmd_random_tree(const CommandConfig& cfg) {
  require_k(cfg.k);
  LoadedGraph loaded = load_graph(cfg);
  CodingTree t = random_tree(loaded.graph, cfg.k, cfg.seed);
  return {{"k", cfg.k}, {"seed", cfg.seed}, {"entropy", round_significant(structural_entropy(loaded.graph, t).total)},
          {"tree", tree_to_json(t)}};
}

json cmd_compare(const CommandConfig& cfg) {
  require_k(cfg.k);
  if (cfg.trials < 1) throw Error("--trials must be at least 1");
  LoadedGraph loaded = load_graph(cfg);
  const Graph& g = loaded.graph;
  const double greedy = circa(g, cfg.k).trace.final_entropy;
  double sum = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.trials; ++i) {
    const double h = structural_entropy(g, random_tree(g, cfg.k, cfg.seed + static_cast<std::uint64_t>(i))).total;
    sum += h;
    best = std::min(best, h);
  }
  json doc = {{"k", cfg.k},
              {"vertices", g.vertex_count()},
              {"one_dim", round_significant(one_dim_entropy(g))},
              {"circa", round_significant(greedy)},
              {"random", {{"trials", cfg.trials}, {"seed", cfg.seed},
                          {"mean", round_significant(sum / cfg.trials)}, {"min", round_significant(best)}}}};
  if (g.vertex_count() <= kOracleMaxVertices) {
    // Null when k is past the exhaustive search's size limit.
    try {
      doc["optimum"] = round_significant(brute_force_k_entropy(g, cfg.k).entropy);
    } catch (const Error&) {
      doc["optimum"] = nullptr;
    }
  }
  return doc;
}

json cmd_sweep(const CommandConfig& cfg) {
  require_k(cfg.k_min);
  if (cfg.k_max < cfg.k_min) throw Error("--k-max must not be below --k-min");
  LoadedGraph loaded = load_graph(cfg);
  json rows = json::array();
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    auto result = circa(loaded.graph, k);
    rows.push_back({{"k", k}, {"entropy", round_significant(result.trace.final_entropy)},
                    {"h_max", result.trace.h_max}, {"nodes", result.tree.node_count()}});
  }
  return {{"one_dim", round_significant(one_dim_entropy(loaded.graph))}, {"results", std::move(rows)}};
}

json cmd_encode(const CommandConfig& cfg) {
  if (cfg.tree == "star") throw Error("encode needs --tree <file>");
  CodingTree t = tree_from_json(read_json(cfg.tree, "tree"));
  TinWeights w = weights_from_json(read_json(cfg.weights, "weights"));
  auto rows = read_rows(cfg.input, "input");
  if (rows.size() != 1) throw Error(cfg.input + ": expected one row, found " + std::to_string(rows.size()));
  auto enc = encode(t, DenseMatrix::row_vector(rows[0]), w);
  return {{"d_t", enc.tree_repr.cols()},
          {"tree_repr", rounded(std::vector<double>(enc.tree_repr.values().begin(), enc.tree_repr.values().end()))},
          {"probabilities", rounded(enc.probabilities)}};
}

json cmd_evaluate(const CommandConfig& cfg) {
  PredictionSet ps;
  ps.probabilities = read_rows(cfg.pred, "pred");
  for (const auto& row : read_rows(cfg.gold, "gold")) {
    std::vector<std::uint8_t> bits;
    for (double x : row) {
      if (x != 0.0 && x != 1.0) throw Error(cfg.gold + ": truth entries must be 0 or 1");
      bits.push_back(static_cast<std::uint8_t>(x));
    }
    ps.truth.push_back(std::move(bits));
  }
  ps.threshold = cfg.threshold;
  return {{"documents", ps.document_count()}, {"labels", ps.label_count()}, {"threshold", cfg.threshold},
          {"micro_f1", round_significant(micro_f1(ps))}, {"macro_f1", round_significant(macro_f1(ps))}};
}

json dispatch(const CommandConfig& cfg) {
  if (cfg.command == "ingest") return cmd_ingest(cfg);
  if (cfg.command == "entropy") return cmd_entropy(cfg);
  if (cfg.command == "circa") return cmd_circa(cfg);
  if (cfg.command == "random-tree") return cmd_random_tree(cfg);
  if (cfg.command == "compare") return cmd_compare(cfg);
  if (cfg.command == "encode") return cmd_encode(cfg);
  if (cfg.command == "evaluate") return cmd_evaluate(cfg);
  if (cfg.command == "sweep-k") return cmd_sweep(cfg);
  throw Error("unknown command '" + cfg.command + "'");
}

std::string one_line(std::string msg) {
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return msg;
}

}  // namespace

int run(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const std::string text = dispatch(cfg).dump(2) + "\n";
    if (cfg.output.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) throw Error("cannot write " + cfg.output);
      file << text;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace sectree::cli
