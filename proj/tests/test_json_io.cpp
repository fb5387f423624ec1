#include "doctest.h"
#include "ricyl/json_io.hpp"

using namespace ricyl;
using namespace ricyl::io;

TEST_CASE("sectioned text parses to nested sections") {
  auto j = parse_sectioned_text("# c\n[cross_section]\ndim = 2\nlengths = [1, 2.5]\n[a.b]\nname = hello\nx = \"q\"\n",
                                "t");
  CHECK(j["cross_section"]["dim"] == 2);
  CHECK(j["cross_section"]["lengths"][1] == 2.5);
  CHECK(j["a"]["b"]["name"] == "hello");
  CHECK(j["a"]["b"]["x"] == "q");
  CHECK_THROWS_AS(parse_sectioned_text("[x\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_sectioned_text("[x]\nnovalue\n", "t"), ConfigError);
  CHECK_THROWS_AS(parse_sectioned_text("[x]\nv = [1,\n", "t"), ConfigError);
}

TEST_CASE("expansion json round trip") {
  std::vector<double> L{1.0, 2.0};
  ModeExpansion h(L, 2);
  h.add({{1, 0}, Phase::Cos}, h.comp(0, 1), RadialProfile::exponential(0.7, -0.5));
  h.add({{1, -1}, Phase::Sin}, h.comp(2, 2), RadialProfile({{0.4, 1, -0.3, 0.0, kInf}}));
  auto j = expansion_to_json(h);
  auto back = expansion_from_json(j, L, "h");
  CHECK((back - h).coefficient_sup(0, 3) == 0.0);
}

TEST_CASE("negated frequency flips sin terms") {
  std::vector<double> L{1.0};
  auto j = json::parse(R"({"rank":0,"terms":[{"k":[-1],"phase":"sin","profile":[{"c":2}]}]})");
  auto f = expansion_from_json(j, L, "f");
  CHECK(f.get({{1}, Phase::Sin}, 0)(0.3) == doctest::Approx(-2.0));
}

TEST_CASE("mode lists and field errors") {
  std::vector<double> L{1.0, 1.0, 1.0};
  auto ok = json::parse(R"({"rank":2,"modes":[{"kind":"TT","k":[1,0,0],"pol_index":1,"profile":[{"c":1,"rate":-1}]}]})");
  CHECK(!expansion_from_json(ok, L, "f").is_zero());
  auto bad_pol = ok;
  bad_pol["modes"][0]["pol_index"] = 9;
  CHECK_THROWS_AS(expansion_from_json(bad_pol, L, "f"), ConfigError);
  auto bad_rank = ok;
  bad_rank["rank"] = 1;
  CHECK_THROWS_AS(expansion_from_json(bad_rank, L, "f"), ConfigError);
  auto bad_k = json::parse(R"({"rank":0,"terms":[{"k":[0,0,0],"phase":"sin","profile":[{"c":1}]}]})");
  CHECK_THROWS_AS(expansion_from_json(bad_k, L, "f"), ConfigError);
  CHECK_THROWS_WITH_AS(get_double(json::object(), "a.b"), "missing field 'a.b'", ConfigError);
}

TEST_CASE("digest and list parsing") {
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
  auto rows = parse_int_rows("0,1,2; 3,4,5");
  CHECK(rows.size() == 2);
  CHECK(rows[1][2] == 5);
  CHECK_THROWS_AS(parse_int_rows("1,x"), ConfigError);
  CHECK(parse_doubles("1.5,2")[0] == 1.5);
}
