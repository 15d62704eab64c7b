#include <CLI11.hpp>

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  using sectree::cli::CommandConfig;
  CommandConfig cfg;
  CLI::App app{"Coding trees by structural entropy minimization"};
  app.require_subcommand(1);

  auto graph_flags = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "graph file")->required();
    sub->add_option("--format", cfg.format, "edgelist or taxonomy")
        ->check(CLI::IsMember({"edgelist", "taxonomy"}));
  };
  auto output_flag = [&](CLI::App* sub) { sub->add_option("--output", cfg.output, "write JSON here"); };

  auto* ingest = app.add_subcommand("ingest", "graph or taxonomy statistics");
  graph_flags(ingest);

  auto* entropy = app.add_subcommand("entropy", "structural entropy of a tree");
  graph_flags(entropy);
  entropy->add_option("--tree", cfg.tree, "'star' or a tree file");

  auto* circa = app.add_subcommand("circa", "greedy coding tree of height k");
  graph_flags(circa);
  circa->add_option("--k", cfg.k, "tree height");
  circa->add_flag("--trace", cfg.trace, "include per-stage deltas");

  auto* random = app.add_subcommand("random-tree", "random-pairing tree of height k");
  graph_flags(random);
  random->add_option("--k", cfg.k, "tree height");
  random->add_option("--seed", cfg.seed, "generator seed");

  auto* compare = app.add_subcommand("compare", "circa against random trees and the exact optimum");
  graph_flags(compare);
  compare->add_option("--k", cfg.k, "tree height");
  compare->add_option("--seed", cfg.seed, "first random seed");
  compare->add_option("--trials", cfg.trials, "random trees to draw");

  auto* sweep = app.add_subcommand("sweep-k", "circa entropy over a range of heights");
  graph_flags(sweep);
  sweep->add_option("--k-min", cfg.k_min, "smallest height");
  sweep->add_option("--k-max", cfg.k_max, "largest height");

  auto* encode = app.add_subcommand("encode", "forward pass of the tree encoder");
  encode->add_option("--tree", cfg.tree, "tree file")->required();
  encode->add_option("--weights", cfg.weights, "weights file")->required();
  encode->add_option("--input", cfg.input, "text vector file (one row)")->required();

  auto* evaluate = app.add_subcommand("evaluate", "micro and macro F1");
  evaluate->add_option("--pred", cfg.pred, "probabilities, one row per document")->required();
  evaluate->add_option("--gold", cfg.gold, "0/1 truth, one row per document")->required();
  evaluate->add_option("--threshold", cfg.threshold, "decision threshold");

  for (auto* sub : {ingest, entropy, circa, random, compare, sweep, encode, evaluate}) output_flag(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return sectree::cli::run(cfg, std::cout, std::cerr);
}
