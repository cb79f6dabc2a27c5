// Round-trip and validation tests for the JSON parameter files.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "mhgrn/baselines.hpp"
#include "mhgrn/encoder.hpp"
#include "mhgrn/error.hpp"
#include "mhgrn/params_io.hpp"
#include "mhgrn/qa.hpp"

namespace {

mhgrn::ModelDims small_dims() {
  mhgrn::ModelDims dims;
  dims.d_in = 3;
  dims.d = 4;
  dims.d_out = 3;
  dims.d_s = 2;
  dims.K = 2;
  dims.m = 3;
  dims.h_att = 2;
  dims.rho_hidden = 3;
  dims.activation = "relu";
  return dims;
}

void expect_bitwise_equal(mhgrn::ModelParams& a, mhgrn::ModelParams& b) {
  auto pa = mhgrn::param_pointers(a);
  auto pb = mhgrn::param_pointers(b);
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i)
    ASSERT_EQ(*pa[i], *pb[i]) << "parameter " << i;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST(ParamsJson, RoundTripPreservesEveryScalarBitwise) {
  auto params = mhgrn::make_params(small_dims(), 13);
  auto restored = mhgrn::params_from_json(mhgrn::params_to_json(params));
  EXPECT_EQ(restored.dims.d_in, params.dims.d_in);
  EXPECT_EQ(restored.dims.d, params.dims.d);
  EXPECT_EQ(restored.dims.d_out, params.dims.d_out);
  EXPECT_EQ(restored.dims.d_s, params.dims.d_s);
  EXPECT_EQ(restored.dims.K, params.dims.K);
  EXPECT_EQ(restored.dims.m, params.dims.m);
  EXPECT_EQ(restored.dims.h_att, params.dims.h_att);
  EXPECT_EQ(restored.dims.rho_hidden, params.dims.rho_hidden);
  EXPECT_EQ(restored.dims.activation, "relu");
  EXPECT_EQ(restored.seed, 13u);
  expect_bitwise_equal(params, restored);
}

TEST(ParamsJson, RoundTripsThroughAFile) {
  auto params = mhgrn::make_params(small_dims(), 99);
  const std::string path = temp_path("mhgrn_params_roundtrip.json");
  mhgrn::write_params(path, params);
  auto restored = mhgrn::read_params(path);
  expect_bitwise_equal(params, restored);
  std::remove(path.c_str());
}

TEST(ParamsJson, PreservesNonDefaultHiddenWidths) {
  // Parameters built analytically rather than drawn: the attention MLPs'
  // hidden widths differ from h_att and must be carried by the arrays.
  auto rn = mhgrn::make_rn_params(4, 2, 2, 3, 2, 7);
  auto [params, config] = mhgrn::construct_equiv_params(rn, 2);
  auto restored = mhgrn::params_from_json(mhgrn::params_to_json(params));
  EXPECT_EQ(restored.att.f_mlp.hidden_dim(), 3u);
  EXPECT_EQ(restored.rho.hidden_dim(), 1u);
  expect_bitwise_equal(params, restored);
  (void)config;
}

TEST(ParamsJson, RejectsMissingKeysAndBadShapes) {
  auto params = mhgrn::make_params(small_dims(), 5);
  auto j = mhgrn::params_to_json(params);

  auto missing = j;
  missing.erase("Vp");
  EXPECT_THROW(mhgrn::params_from_json(missing), mhgrn::ParseError);

  auto short_row = j;
  short_row["V"][0].erase(0);
  EXPECT_THROW(mhgrn::params_from_json(short_row), mhgrn::ParseError);

  auto wrong_hops = j;
  wrong_hops["W"].erase(1);
  EXPECT_THROW(mhgrn::params_from_json(wrong_hops), mhgrn::ParseError);

  auto text_entry = j;
  text_entry["B_hop"][0][0] = "oops";
  EXPECT_THROW(mhgrn::params_from_json(text_entry), mhgrn::ParseError);

  auto bad_dim = j;
  bad_dim["K"] = 0;
  EXPECT_THROW(mhgrn::params_from_json(bad_dim), mhgrn::ParseError);

  auto poisoned = j;
  poisoned["P_pool"][0][0] = std::nan("");
  EXPECT_THROW(mhgrn::params_from_json(poisoned), mhgrn::NonFinite);
}

TEST(ParamsJson, MissingFileAndMalformedJson) {
  EXPECT_THROW(mhgrn::read_params(temp_path("does_not_exist_7731.json")),
               mhgrn::IoError);
  const std::string path = temp_path("mhgrn_params_malformed.json");
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    ASSERT_NE(f, nullptr);
    std::fputs("{ not json", f);
    std::fclose(f);
  }
  EXPECT_THROW(mhgrn::read_params(path), mhgrn::ParseError);
  std::remove(path.c_str());
}

TEST(RnParamsJson, RoundTripsIncludingEmptyRelationEmbeddings) {
  auto rn = mhgrn::make_rn_params(5, 3, 2, 4, 3, 21);
  auto restored = mhgrn::rn_params_from_json(mhgrn::rn_params_to_json(rn));
  for (std::size_t r = 0; r < rn.W_tilde.rows(); ++r)
    for (std::size_t c = 0; c < rn.W_tilde.cols(); ++c)
      ASSERT_EQ(restored.W_tilde(r, c), rn.W_tilde(r, c));
  for (std::size_t r = 0; r < rn.E_tilde.rows(); ++r)
    for (std::size_t c = 0; c < rn.E_tilde.cols(); ++c)
      ASSERT_EQ(restored.E_tilde(r, c), rn.E_tilde(r, c));
  for (std::size_t r = 0; r < rn.H_tilde.rows(); ++r)
    for (std::size_t c = 0; c < rn.H_tilde.cols(); ++c)
      ASSERT_EQ(restored.H_tilde(r, c), rn.H_tilde(r, c));

  // Relation embeddings of width zero survive the trip.
  auto bare = mhgrn::make_rn_params(4, 2, 0, 3, 2, 22);
  auto bare_back = mhgrn::rn_params_from_json(mhgrn::rn_params_to_json(bare));
  EXPECT_EQ(bare_back.E_tilde.rows(), 2u);
  EXPECT_EQ(bare_back.E_tilde.cols(), 0u);
  EXPECT_EQ(bare_back.W_tilde.cols(), 4u);

  const std::string path = temp_path("mhgrn_rn_roundtrip.json");
  mhgrn::write_rn_params(path, rn);
  auto from_file = mhgrn::read_rn_params(path);
  EXPECT_EQ(from_file.H_tilde(0, 0), rn.H_tilde(0, 0));
  std::remove(path.c_str());
}

TEST(RnParamsJson, RejectsInconsistentWidths) {
  auto rn = mhgrn::make_rn_params(4, 2, 2, 3, 2, 30);
  auto j = mhgrn::rn_params_to_json(rn);
  j["W_tilde"][0].erase(0);  // width no longer 2*d1 + d2
  EXPECT_THROW(mhgrn::rn_params_from_json(j), mhgrn::ParseError);
  auto missing = mhgrn::rn_params_to_json(rn);
  missing.erase("H_tilde");
  EXPECT_THROW(mhgrn::rn_params_from_json(missing), mhgrn::ParseError);
}
