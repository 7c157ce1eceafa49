// ermetrics — evaluate, perturb, and rank-compare entity-resolution
// clusterings from the command line.
//
// Exit codes: 0 on success, 1 when the evaluation succeeded but at least
// one requested metric was null (precondition failed, e.g. an empty
// clustering side), 2 on input, parse, or universe errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ermetrics/ermetrics.hpp"

namespace {

std::vector<std::string> parse_metric_list(const std::string& list) {
  std::vector<std::string> out;
  if (list.empty() || list == "all") return out;  // empty selects all
  std::size_t pos = 0;
  while (pos <= list.size()) {
    auto comma = list.find(',', pos);
    auto part = std::string(
        ermetrics::trim(list.substr(pos, comma == std::string::npos ? comma : comma - pos)));
    if (!part.empty()) out.push_back(part);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ermetrics::Error("empty metric list");
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ermetrics::Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out.good()) throw ermetrics::Error("failed writing '" + path + "'");
}

struct EvalArgs {
  std::string pred, gold;
  std::string format = "tsv";
  std::string metrics = "all";
  std::string universe = "strict";
  double beta = 1.0;
  std::string gmd_split = "product:1";
  std::string gmd_merge = "product:1";
  std::string out = "json";
};

int run_eval(const EvalArgs& args) {
  auto format = ermetrics::parse_file_format(args.format);
  if (!format) throw ermetrics::Error("unknown format '" + args.format + "'");
  auto policy = ermetrics::parse_universe_policy(args.universe);
  if (!policy) throw ermetrics::Error("unknown universe policy '" + args.universe + "'");

  ermetrics::EvalConfig config;
  config.policy = *policy;
  config.beta = args.beta;
  config.gmd_split = ermetrics::parse_cost_spec(args.gmd_split);
  config.gmd_merge = ermetrics::parse_cost_spec(args.gmd_merge);
  config.metrics = parse_metric_list(args.metrics);

  auto pred = ermetrics::parse_clustering_file(args.pred, *format);
  auto gold = ermetrics::parse_clustering_file(args.gold, *format);
  auto report = ermetrics::evaluate(pred, gold, config);

  if (args.out == "json") std::cout << ermetrics::render_report_json(report);
  else if (args.out == "csv") std::cout << ermetrics::render_report_csv(report);
  else if (args.out == "table") std::cout << ermetrics::render_report_table(report);
  else throw ermetrics::Error("unknown output style '" + args.out + "'");

  return report.any_null() ? 1 : 0;
}

struct PerturbArgs {
  std::string in;
  std::uint64_t ops = 0;
  std::string mix = "split:1,merge:1,move:1";
  std::uint64_t seed = 0;
  std::string format = "tsv";
  std::string out;
  std::string log;
};

int run_perturb(const PerturbArgs& args) {
  auto format = ermetrics::parse_file_format(args.format);
  if (!format) throw ermetrics::Error("unknown format '" + args.format + "'");
  auto mix = ermetrics::parse_op_mix(args.mix);
  auto base = ermetrics::parse_clustering_file(args.in, *format);
  auto result = ermetrics::perturb(base, args.ops, mix, args.seed);
  if (args.out == "-") {
    if (*format == ermetrics::FileFormat::Tsv)
      ermetrics::write_clustering_tsv(std::cout, result.clustering);
    else
      ermetrics::write_clustering_json(std::cout, result.clustering);
  } else {
    ermetrics::write_clustering_file(args.out, result.clustering, *format);
  }
  if (!args.log.empty())
    write_text_file(args.log, ermetrics::render_perturbation_log(result.log));
  return 0;
}

struct RankArgs {
  std::string gold;
  std::vector<std::string> candidates;
  std::string format = "tsv";
  std::string metrics = "all";
  std::string universe = "strict";
  double beta = 1.0;
  std::string gmd_split = "product:1";
  std::string gmd_merge = "product:1";
  std::string out = "json";
};

int run_rank_compare(const RankArgs& args) {
  auto format = ermetrics::parse_file_format(args.format);
  if (!format) throw ermetrics::Error("unknown format '" + args.format + "'");
  auto policy = ermetrics::parse_universe_policy(args.universe);
  if (!policy) throw ermetrics::Error("unknown universe policy '" + args.universe + "'");

  ermetrics::RankOptions options;
  options.policy = *policy;
  options.beta = args.beta;
  options.gmd_split = ermetrics::parse_cost_spec(args.gmd_split);
  options.gmd_merge = ermetrics::parse_cost_spec(args.gmd_merge);
  options.metrics = parse_metric_list(args.metrics);

  auto gold = ermetrics::parse_clustering_file(args.gold, *format);
  std::vector<ermetrics::NamedClustering> candidates;
  for (const auto& path : args.candidates)
    candidates.push_back({path, ermetrics::parse_clustering_file(path, *format)});

  auto summary = ermetrics::rank_compare(gold, candidates, options);
  if (args.out == "json") std::cout << ermetrics::render_rank_json(summary);
  else if (args.out == "table") std::cout << ermetrics::render_rank_table(summary);
  else throw ermetrics::Error("unknown output style '" + args.out + "'");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entity-resolution clustering metrics"};
  app.require_subcommand(1);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "score a predicted clustering against a gold one");
  eval->add_option("--pred", eval_args.pred, "predicted clustering file")->required();
  eval->add_option("--gold", eval_args.gold, "gold clustering file")->required();
  eval->add_option("--format", eval_args.format, "input format: tsv or json");
  eval->add_option("--metrics", eval_args.metrics, "comma-separated metric names, or 'all'");
  eval->add_option("--universe", eval_args.universe,
                   "record universe policy: strict, intersection, or union-singletons");
  eval->add_option("--beta", eval_args.beta, "v-measure beta weight");
  eval->add_option("--gmd-split", eval_args.gmd_split,
                   "split cost: constant:K, product:K, affine:K1,K2, or vi");
  eval->add_option("--gmd-merge", eval_args.gmd_merge,
                   "merge cost: constant:K, product:K, affine:K1,K2, or vi");
  eval->add_option("--out", eval_args.out, "output style: json, csv, or table");

  PerturbArgs perturb_args;
  auto* perturb = app.add_subcommand("perturb", "apply seeded random edits to a clustering");
  perturb->add_option("--in", perturb_args.in, "input clustering file")->required();
  perturb->add_option("--ops", perturb_args.ops, "number of edits to apply")->required();
  perturb->add_option("--mix", perturb_args.mix, "op weights, e.g. split:1,merge:1,move:2");
  perturb->add_option("--seed", perturb_args.seed, "random seed")->required();
  perturb->add_option("--format", perturb_args.format, "clustering format: tsv or json");
  perturb->add_option("--out", perturb_args.out, "output clustering file ('-' for stdout)")
      ->required();
  perturb->add_option("--log", perturb_args.log, "write the replayable op log here (JSON)");

  RankArgs rank_args;
  auto* rank = app.add_subcommand("rank-compare",
                                  "rank candidate clusterings under every metric");
  rank->add_option("--gold", rank_args.gold, "gold clustering file")->required();
  rank->add_option("--candidates", rank_args.candidates, "candidate clustering files")
      ->required()
      ->expected(2, -1);
  rank->add_option("--format", rank_args.format, "input format: tsv or json");
  rank->add_option("--metrics", rank_args.metrics, "comma-separated metric names, or 'all'");
  rank->add_option("--universe", rank_args.universe,
                   "record universe policy: strict, intersection, or union-singletons");
  rank->add_option("--beta", rank_args.beta, "v-measure beta weight");
  rank->add_option("--gmd-split", rank_args.gmd_split, "split cost spec");
  rank->add_option("--gmd-merge", rank_args.gmd_merge, "merge cost spec");
  rank->add_option("--out", rank_args.out, "output style: json or table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0; bad usage is an input error
  }

  try {
    if (*eval) return run_eval(eval_args);
    if (*perturb) return run_perturb(perturb_args);
    return run_rank_compare(rank_args);
  } catch (const ermetrics::UniverseMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ermetrics::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
