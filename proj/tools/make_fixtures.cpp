// Regenerates the checked-in test fixtures: a hand-traceable toy knowledge
// graph, two extracted option graphs, seed-13 model parameters, random-but-
// seeded features and statement vectors, and the instance manifest tying
// them together. Usage: make_fixtures <output-dir>
//
// Everything is deterministic, so rerunning reproduces the committed files
// byte for byte (golden score files are frozen CLI output, not written here).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "mhgrn/encoder.hpp"
#include "mhgrn/graph.hpp"
#include "mhgrn/graph_io.hpp"
#include "mhgrn/matrix_io.hpp"
#include "mhgrn/params_io.hpp"
#include "mhgrn/rng.hpp"
#include "mhgrn/vocab.hpp"

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw mhgrn::IoError("cannot open " + path);
  out << content;
}

mhgrn::DenseMatrix random_matrix(std::size_t rows, std::size_t cols,
                                 std::uint64_t seed) {
  mhgrn::Rng rng(seed);
  mhgrn::DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output-dir>\n";
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir);
  auto at = [&](const std::string& name) { return (dir / name).string(); };

  try {
    const std::string kg_tsv =
        "child\tatlocation\tclassroom\n"
        "classroom\tsynonym\tschoolroom\n"
        "child\tdesires\tplay\n"
        "banana\tisa\tfruit\n";
    write_text(at("toy_kg.tsv"), kg_tsv);

    auto vocab = mhgrn::builtin_vocab();
    auto kg = mhgrn::load_kg(at("toy_kg.tsv"), vocab);
    auto g0 = mhgrn::extract_subgraph(kg, {kg.entity_id("child")},
                                      {kg.entity_id("schoolroom")});
    auto g1 = mhgrn::extract_subgraph(kg, {kg.entity_id("child")},
                                      {kg.entity_id("play")});
    write_text(at("opt0_graph.json"), mhgrn::graph_to_json(g0).dump(1) + "\n");
    write_text(at("opt1_graph.json"), mhgrn::graph_to_json(g1).dump(1) + "\n");

    mhgrn::ModelDims dims;
    dims.d_in = 4;
    dims.d = 4;
    dims.d_out = 4;
    dims.d_s = 3;
    dims.K = 2;
    dims.m = static_cast<int>(vocab.num_relations());
    dims.h_att = 4;
    dims.rho_hidden = 4;
    mhgrn::write_params(at("params_13.json"), mhgrn::make_params(dims, 13));

    mhgrn::write_csv(at("opt0_features.csv"),
                     random_matrix(static_cast<std::size_t>(g0.n()), 4, 101));
    mhgrn::write_csv(at("opt1_features.csv"),
                     random_matrix(static_cast<std::size_t>(g1.n()), 4, 102));
    mhgrn::write_csv(at("s0.csv"), random_matrix(1, 3, 201));
    mhgrn::write_csv(at("s1.csv"), random_matrix(1, 3, 202));

    nlohmann::json instance;
    instance["options"] = nlohmann::json::array(
        {{{"s_csv", "s0.csv"},
          {"graph_json", "opt0_graph.json"},
          {"features", "opt0_features.csv"}},
         {{"s_csv", "s1.csv"},
          {"graph_json", "opt1_graph.json"},
          {"features", "opt1_features.csv"}}});
    instance["correct"] = 0;
    write_text(at("instance.json"), instance.dump(1) + "\n");
  } catch (const mhgrn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "fixtures written to " << dir.string() << "\n";
  return 0;
}
