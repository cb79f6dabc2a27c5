// Command-line surface for the MHGRN library: knowledge-graph extraction,
// option scoring, path decoding, DP-vs-enumeration oracle checks, path
// counting, and the runtime scaling benchmark.
//
// Exit codes: 0 success, 1 property violation (oracle mismatch, no decodable
// path), 2 usage or I/O errors. Stdout is a single JSON document on success;
// diagnostics go to stderr.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mhgrn/bench.hpp"
#include "mhgrn/encoder.hpp"
#include "mhgrn/error.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/graph_io.hpp"
#include "mhgrn/matrix_io.hpp"
#include "mhgrn/params_io.hpp"
#include "mhgrn/pathreason.hpp"
#include "mhgrn/qa.hpp"
#include "mhgrn/synthetic.hpp"
#include "mhgrn/vocab.hpp"

namespace {

using nlohmann::json;

mhgrn::RelationVocab resolve_vocab(const std::string& vocab_path) {
  if (vocab_path.empty()) return mhgrn::builtin_vocab();
  return mhgrn::vocab_from_json(
      mhgrn::detail::parse_json_file(vocab_path, "vocab"));
}

int cmd_extract(const std::string& kg_path, const std::vector<std::string>& q,
                const std::vector<std::string>& a, const std::string& out,
                const std::string& vocab_path) {
  auto vocab = resolve_vocab(vocab_path);
  auto kg = mhgrn::load_kg(kg_path, vocab);
  std::vector<long> q_ids, a_ids;
  for (const auto& name : q) q_ids.push_back(kg.entity_id(name));
  for (const auto& name : a) a_ids.push_back(kg.entity_id(name));
  auto g = mhgrn::extract_subgraph(kg, q_ids, a_ids);

  std::ofstream f(out);
  if (!f) throw mhgrn::IoError("cannot open " + out);
  f << mhgrn::graph_to_json(g).dump(1) << "\n";
  if (!f) throw mhgrn::IoError("write failed for " + out);

  int nq = 0, na = 0, no = 0;
  for (auto t : g.phi()) {
    if (t == mhgrn::NodeType::Question) ++nq;
    else if (t == mhgrn::NodeType::Answer) ++na;
    else ++no;
  }
  json j;
  j["n"] = g.n();
  j["edges"] = g.edges().size();
  j["nodes_question"] = nq;
  j["nodes_answer"] = na;
  j["nodes_other"] = no;
  j["out"] = out;
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_oracle_check(std::uint64_t seed, int n, int m, int k, int trials) {
  const int threads =
      std::min<int>(mhgrn::detail::fd_thread_count(), trials);
  std::vector<double> trial_diff(static_cast<std::size_t>(trials), 0.0);

  auto run_trial = [&](int t) {
    const std::uint64_t graph_seed = seed + 2ull * static_cast<unsigned>(t);
    auto g = mhgrn::erdos_graph(n, 2.5, m, graph_seed);
    mhgrn::ModelDims dims;
    dims.d_in = 6;
    dims.d = 5;
    dims.d_out = 4;
    dims.d_s = 3;
    dims.K = k;
    dims.m = m;
    dims.h_att = 4;
    auto params = mhgrn::make_params(dims, graph_seed + 1);
    mhgrn::Rng data_rng(graph_seed + 1000003);
    mhgrn::DenseMatrix H(static_cast<std::size_t>(n), 6);
    for (std::size_t r = 0; r < H.rows(); ++r)
      for (std::size_t c = 0; c < H.cols(); ++c)
        H(r, c) = data_rng.uniform(-1.0, 1.0);
    std::vector<double> s(3);
    for (auto& v : s) v = data_rng.uniform(-1.0, 1.0);

    auto X = mhgrn::type_transform(H, g.phi(), params);
    auto dp = mhgrn::multihop_pass(g, X, s, params, k);
    double worst = 0.0;
    for (int hop = 1; hop <= k; ++hop) {
      auto [Z, d] = mhgrn::brute_force_zk(g, X, s, params, hop, k);
      const auto& Zdp = dp.Z[hop - 1];
      for (std::size_t r = 0; r < Z.rows(); ++r)
        for (std::size_t c = 0; c < Z.cols(); ++c)
          worst = std::max(worst, std::abs(Zdp(r, c) - Z(r, c)));
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double db = d[i];
        const double da = dp.d_norm[hop - 1][i];
        const double diff =
            db == 0.0 ? std::abs(da) : std::abs(da - db) / std::abs(db);
        worst = std::max(worst, diff);
      }
    }
    trial_diff[static_cast<std::size_t>(t)] = worst;
  };

  if (threads <= 1) {
    for (int t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (int t = w; t < trials; t += threads) run_trial(t);
      });
    for (auto& th : pool) th.join();
  }

  double max_diff = 0.0;
  int failed = -1;
  for (int t = 0; t < trials; ++t) {
    max_diff = std::max(max_diff, trial_diff[static_cast<std::size_t>(t)]);
    if (failed < 0 && trial_diff[static_cast<std::size_t>(t)] >= 1e-9)
      failed = t;
  }

  json j;
  j["trials"] = trials;
  j["n"] = n;
  j["m"] = m;
  j["k"] = k;
  j["seed"] = seed;
  j["max_abs_diff"] = max_diff;
  j["tolerance"] = 1e-9;
  j["ok"] = failed < 0;
  if (failed >= 0)
    j["failed_seed"] = seed + 2ull * static_cast<unsigned>(failed);
  std::cout << j.dump() << "\n";
  return failed < 0 ? 0 : 1;
}

json fit_to_json(const mhgrn::LinearFit& fit) {
  json j;
  j["defined"] = fit.defined;
  if (fit.defined) {
    j["slope_ns_per_hop"] = fit.slope;
    j["intercept_ns"] = fit.intercept;
    j["r2"] = fit.r2;
  }
  return j;
}

int cmd_bench(int k_max, int n, int m, double deg, int trials,
              std::uint64_t seed, const std::string& out) {
  auto records = mhgrn::run_bench(k_max, n, m, deg, trials, seed);
  mhgrn::write_bench_csv(out, records);
  json j;
  j["csv"] = out;
  j["records"] = records.size();
  j["fit"]["mhgrn"] = fit_to_json(mhgrn::fit_for_model(records, "mhgrn"));
  j["fit"]["rgcn"] = fit_to_json(mhgrn::fit_for_model(records, "rgcn"));
  json ratios = json::array();
  for (int k = 1; k <= k_max; ++k) {
    double a = 0.0, b = 0.0;
    for (const auto& rec : records) {
      if (rec.K != k) continue;
      if (rec.model == "mhgrn") a = static_cast<double>(rec.wall_ns);
      if (rec.model == "rgcn") b = static_cast<double>(rec.wall_ns);
    }
    ratios.push_back(a / b);  // wall_ns >= 1, so finite
  }
  j["runtime_ratio_mhgrn_over_rgcn"] = std::move(ratios);
  std::cout << j.dump() << "\n";
  return 0;
}

mhgrn::MultiRelGraph synthetic_graph(const std::string& desc) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t colon = desc.find(':', start);
    parts.push_back(desc.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  try {
    if (parts[0] == "complete" && parts.size() == 2)
      return mhgrn::complete_digraph(std::stoi(parts[1]));
    if (parts[0] == "chain" && parts.size() == 2)
      return mhgrn::chain_graph(std::stoi(parts[1]));
    if (parts[0] == "erdos" && (parts.size() == 4 || parts.size() == 5)) {
      std::uint64_t seed = parts.size() == 5 ? std::stoull(parts[4]) : 13;
      return mhgrn::erdos_graph(std::stoi(parts[1]), std::stod(parts[2]),
                                std::stoi(parts[3]), seed);
    }
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  throw mhgrn::ParseError(
      "bad --synthetic '" + desc +
      "'; expected complete:n, chain:n, or erdos:n:deg:m[:seed]");
}

int cmd_count_paths(const std::string& graph_path, const std::string& synth,
                    int k) {
  if (graph_path.empty() == synth.empty())
    throw mhgrn::ParseError("give exactly one of --graph and --synthetic");
  mhgrn::MultiRelGraph g = [&] {
    if (!synth.empty()) return synthetic_graph(synth);
    auto j = mhgrn::detail::parse_json_file(graph_path, "count-paths");
    int m = 1;
    if (j.contains("edges"))
      for (const auto& e : j["edges"])
        if (e.is_array() && e.size() == 3 && e[1].is_number_integer())
          m = std::max(m, e[1].get<int>());
    return mhgrn::graph_from_json(j, m);
  }();
  auto counts = mhgrn::count_paths(g, k);
  json j;
  j["n"] = g.n();
  j["k"] = k;
  j["counts"] = counts;
  std::cout << j.dump() << "\n";
  return 0;
}

struct LoadedInstance {
  mhgrn::QaInstance instance;
  mhgrn::EncoderConfig config;
};

std::string resolve_against(const std::string& base_file,
                            const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_file).parent_path() / p).string();
}

LoadedInstance load_instance(const std::string& instance_path,
                             const std::vector<std::string>& ablate,
                             const mhgrn::ModelParams& params) {
  mhgrn::EncoderConfig config;
  for (const auto& flag : ablate) {
    if (flag == "type-transform")
      config.use_type_transform = false;
    else if (flag == "rel-attention")
      config.use_rel_attention = false;
    else if (flag == "node-attention")
      config.use_node_attention = false;
    else
      throw mhgrn::ParseError("unknown --ablate flag '" + flag +
                              "'; known: type-transform, rel-attention, "
                              "node-attention");
  }

  auto j = mhgrn::detail::parse_json_file(instance_path, "instance");
  if (!j.contains("options") || !j["options"].is_array())
    throw mhgrn::ParseError("instance: missing \"options\" array");
  std::vector<mhgrn::QaOption> options;
  for (const auto& opt : j["options"]) {
    for (const char* key : {"s_csv", "graph_json", "features"})
      if (!opt.contains(key) || !opt[key].is_string())
        throw mhgrn::ParseError(std::string("instance option: missing \"") +
                                key + "\"");
    mhgrn::QaOption option;
    option.s = mhgrn::load_vector(
        resolve_against(instance_path, opt["s_csv"].get<std::string>()));
    option.H = mhgrn::load_matrix(
        resolve_against(instance_path, opt["features"].get<std::string>()));
    auto gj = mhgrn::detail::parse_json_file(
        resolve_against(instance_path, opt["graph_json"].get<std::string>()),
        "instance graph");
    option.g = mhgrn::graph_from_json(gj, params.dims.m);
    options.push_back(std::move(option));
  }
  int correct = 0;
  const bool has_correct = j.contains("correct");
  if (has_correct) {
    if (!j["correct"].is_number_integer())
      throw mhgrn::ParseError("instance: \"correct\" must be an integer");
    correct = j["correct"].get<int>();
    if (correct < 0 || correct >= static_cast<int>(options.size()))
      throw mhgrn::ParseError("instance: \"correct\" index out of range");
  }
  LoadedInstance loaded{mhgrn::make_qa_instance(std::move(options), correct),
                        config};
  if (!has_correct) loaded.instance.correct = -1;  // unlabeled: score only
  return loaded;
}

int cmd_score(const std::string& params_path, const std::string& instance_path,
              const std::vector<std::string>& ablate, bool decode) {
  auto params = mhgrn::read_params(params_path);
  auto loaded = load_instance(instance_path, ablate, params);
  const auto& instance = loaded.instance;
  auto scores = mhgrn::option_scores(instance, params, loaded.config);
  int argmax = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[static_cast<std::size_t>(argmax)])
      argmax = static_cast<int>(i);

  json j;
  j["scores"] = scores;
  j["argmax"] = argmax;
  if (instance.correct >= 0 &&
      instance.correct < static_cast<int>(scores.size())) {
    j["correct"] = instance.correct;
    j["loss"] = mhgrn::qa_loss(scores, instance.correct);
  }

  if (decode) {
    const auto& opt = instance.options[static_cast<std::size_t>(argmax)];
    auto output = mhgrn::encode(opt.g, opt.H, opt.s, params, loaded.config);
    auto eff = mhgrn::effective_params(params, loaded.config);
    auto path = mhgrn::decode_path(opt.g, output, opt.s, eff);
    auto vocab = mhgrn::builtin_vocab();
    const bool named =
        params.dims.m == static_cast<int>(vocab.num_relations());
    json rels = json::array();
    for (int r : path.rels)
      rels.push_back(named ? vocab.relation_name(r)
                           : "r" + std::to_string(r));
    json pj;
    pj["option"] = argmax;
    pj["source"] = path.source;
    pj["rels"] = std::move(rels);
    pj["intermediates"] = path.intermediates;
    pj["target"] = path.target;
    pj["score"] = path.score;
    pj["k"] = path.k();
    j["decoded"] = std::move(pj);
  }
  std::cout << j.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-hop graph relation network encoder toolkit"};
  app.require_subcommand(1);

  auto* extract = app.add_subcommand(
      "extract", "Extract a question-answer subgraph from a triple TSV");
  std::string kg_path, out_path, vocab_path;
  std::vector<std::string> q_names, a_names;
  extract->add_option("--kg", kg_path, "knowledge graph TSV (head\\trel\\ttail)")
      ->required();
  extract->add_option("--q", q_names, "question entity names")
      ->delimiter(',');
  extract->add_option("--a", a_names, "answer entity names")->delimiter(',');
  extract->add_option("--out", out_path, "output graph JSON path")->required();
  extract->add_option("--vocab", vocab_path, "relation vocabulary JSON");

  auto* oracle = app.add_subcommand(
      "oracle-check",
      "Compare the DP message pass against brute-force path enumeration");
  std::uint64_t seed = 13;
  int on = 8, om = 3, ok = 3, otrials = 20;
  oracle->add_option("--seed", seed, "base seed");
  oracle->add_option("--n", on, "nodes per graph (enumeration cap)")
      ->check(CLI::Range(2, 12));
  oracle->add_option("--m", om, "relation types")->check(CLI::Range(1, 34));
  oracle->add_option("--k", ok, "hops (enumeration cap)")
      ->check(CLI::Range(1, 5));
  oracle->add_option("--trials", otrials, "random trials")
      ->check(CLI::Range(1, 100000));

  auto* bench = app.add_subcommand(
      "bench", "Time the encoder and the relational-GCN baseline vs hops");
  int k_max = 6, bn = 200, bm = 34, btrials = 5;
  double bdeg = 10.0;
  std::uint64_t bseed = 4242;
  std::string bout;
  bench->add_option("--k-max", k_max, "largest hop count")
      ->check(CLI::Range(1, 16));
  bench->add_option("--n", bn, "nodes")->check(CLI::Range(2, 100000));
  bench->add_option("--m", bm, "relation types")->check(CLI::Range(1, 1000));
  bench->add_option("--deg", bdeg, "mean degree")
      ->check(CLI::PositiveNumber);
  bench->add_option("--trials", btrials, "timing trials per point (median)")
      ->check(CLI::Range(3, 1000));
  bench->add_option("--seed", bseed, "graph/params seed");
  bench->add_option("--out", bout, "output CSV path")->required();

  auto* count = app.add_subcommand(
      "count-paths", "Count k-hop relational walks, k = 1..K");
  std::string cgraph, csynth;
  int ck = 0;
  count->add_option("--graph", cgraph, "graph JSON path");
  count->add_option("--synthetic", csynth,
                    "complete:n | chain:n | erdos:n:deg:m[:seed]");
  count->add_option("--k", ck, "maximum hops")
      ->required()
      ->check(CLI::Range(1, 64));

  auto* score = app.add_subcommand(
      "score", "Score every option of a multiple-choice instance");
  auto* decode = app.add_subcommand(
      "decode", "Score an instance and decode the best option's path");
  std::string params_path, instance_path;
  std::vector<std::string> ablate;
  for (auto* sub : {score, decode}) {
    sub->add_option("--params", params_path, "model parameters JSON")
        ->required();
    sub->add_option("--instance", instance_path, "instance JSON")->required();
    sub->add_option("--ablate", ablate,
                    "disable components: type-transform, rel-attention, "
                    "node-attention")
        ->delimiter(',');
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (extract->parsed())
      return cmd_extract(kg_path, q_names, a_names, out_path, vocab_path);
    if (oracle->parsed()) return cmd_oracle_check(seed, on, om, ok, otrials);
    if (bench->parsed())
      return cmd_bench(k_max, bn, bm, bdeg, btrials, bseed, bout);
    if (count->parsed()) return cmd_count_paths(cgraph, csynth, ck);
    if (score->parsed())
      return cmd_score(params_path, instance_path, ablate, false);
    if (decode->parsed())
      return cmd_score(params_path, instance_path, ablate, true);
  } catch (const mhgrn::NoPath& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mhgrn::NoAnswerNodes& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mhgrn::AllMasked& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mhgrn::NonFinite& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const mhgrn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
