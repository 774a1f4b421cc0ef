#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "indicatrix/io.hpp"

using namespace indicatrix;
using indicatrix::io::json;

TEST_CASE("json writer pins float formatting") {
  json j = json::object();
  j["a"] = 0.1;
  j["b"] = 1.0;
  j["c"] = 2;
  j["d"] = json::array({true, nullptr, "s"});
  CHECK(io::dump_json(j) ==
        "{\"a\":0.10000000000000001,\"b\":1,\"c\":2,\"d\":[true,null,\"s\"]}");
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("fnv1a64 known vectors") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(io::fnv1a64_hex("") == "0xcbf29ce484222325");
}

TEST_CASE("space JSON round trip") {
  const PointCloudSpace s =
      build_point_cloud({{0.0, 1.0}, {2.0, 3.0}}, {1.5, 2.5}, Metric::manhattan);
  const PointCloudSpace back = io::space_from_json(io::space_to_json(s));
  CHECK(back.coords == s.coords);
  CHECK(back.weights == s.weights);
  CHECK(back.metric == s.metric);
  // a second serialization is byte-identical
  CHECK(io::dump_json(io::space_to_json(back)) == io::dump_json(io::space_to_json(s)));
}

TEST_CASE("matrix space JSON round trip") {
  const PointCloudSpace s = build_point_cloud_from_matrix(
      {{0.0, 1.0, 2.0}, {1.0, 0.0, 1.5}, {2.0, 1.5, 0.0}}, {1.0, 2.0, 3.0});
  const PointCloudSpace back = io::space_from_json(io::space_to_json(s));
  CHECK(back.matrix == s.matrix);
  CHECK(back.weights == s.weights);
}

TEST_CASE("space CSV round trip, with and without header") {
  const PointCloudSpace s = build_point_cloud({{0.0, 0.25}, {1.0, 0.5}}, {2.0, 3.0});
  const PointCloudSpace back = io::space_from_csv(io::space_to_csv(s));
  CHECK(back.coords == s.coords);
  CHECK(back.weights == s.weights);

  const PointCloudSpace bare = io::space_from_csv("1,5.0\n0,3.0\n");
  REQUIRE(bare.size() == 2);
  CHECK(bare.coords[0] == std::vector<double>{3.0});  // rows sorted by id
  CHECK(bare.weights == std::vector<double>({1.0, 1.0}));
}

TEST_CASE("space readers reject malformed input") {
  CHECK_THROWS_AS(io::space_from_csv(""), SchemaError);
  CHECK_THROWS_AS(io::space_from_csv("0,1.0\n0,2.0\n"), SchemaError);  // repeated id
  CHECK_THROWS_AS(io::space_from_csv("0,1.0\n2,2.0\n"), SchemaError);  // gap in ids
  CHECK_THROWS_AS(io::space_from_csv("x,1.0\n"), SchemaError);
  CHECK_THROWS_AS(io::space_from_json(io::parse_json("{\"metric\":\"sphere\"}")), SchemaError);
  CHECK_THROWS_AS(io::parse_json("{nope"), SchemaError);
  CHECK_THROWS_AS(io::read_text_file("/nonexistent/file.json"), FileNotFound);
}

TEST_CASE("mapping JSON round trip with undefined points") {
  auto space = std::make_shared<const PointCloudSpace>(
      build_point_cloud({{0.0}, {1.0}, {2.0}}));
  const SampledMapping f =
      make_mapping(space, {{1.0, 2.0}, {}, {3.0, 4.0}}, {1, 0, 1});
  const SampledMapping back = io::mapping_from_json(io::mapping_to_json(f), space);
  CHECK(back.values == f.values);
  CHECK(back.defined == f.defined);
  CHECK(back.codomain_metric == f.codomain_metric);
}

TEST_CASE("mapping CSV leaves missing ids undefined") {
  auto space = std::make_shared<const PointCloudSpace>(
      build_point_cloud({{0.0}, {1.0}, {2.0}, {3.0}}));
  const SampledMapping f = io::mapping_from_csv("id,v\n0,5\n2,6\n", space);
  CHECK(f.is_defined(0));
  CHECK_FALSE(f.is_defined(1));
  CHECK(f.is_defined(2));
  CHECK_FALSE(f.is_defined(3));
  CHECK(f.values[2] == std::vector<double>{6.0});
  CHECK_THROWS_AS(io::mapping_from_csv("0,1\n0,2\n", space), SchemaError);
  CHECK_THROWS_AS(io::mapping_from_csv("9,1\n", space), SchemaError);
}

TEST_CASE("mapping JSON validates the defined mask") {
  auto space =
      std::make_shared<const PointCloudSpace>(build_point_cloud({{0.0}, {1.0}}));
  CHECK_THROWS_AS(
      io::mapping_from_json(
          io::parse_json("{\"values\":[1,null],\"defined\":[false,false]}"), space),
      SchemaError);
}

TEST_CASE("dyadic JSON round trip preserves the whole system") {
  auto space = std::make_shared<const PointCloudSpace>(build_point_cloud(
      {{0.0}, {0.125}, {0.25}, {0.375}, {0.5}, {0.625}, {0.75}, {0.875}}));
  const DyadicSystem sys = build_dyadic_system(space, DyadicParams{0.5, 0, 3, 1.0});
  const json j = io::dyadic_to_json(sys);
  // pinned top-level schema
  CHECK(j.contains("delta"));
  CHECK(j.contains("scale"));
  CHECK(j.contains("generations"));
  CHECK(j.at("constants").contains("c"));
  CHECK(j.at("constants").contains("C"));
  CHECK(j.at("generations")[0].at("k") == 0);
  CHECK(j.at("generations")[0].at("cubes")[0].at("parent").is_null());

  const DyadicSystem back = io::dyadic_from_json(j, space);
  REQUIRE(back.generation_count() == sys.generation_count());
  for (int g = 0; g < sys.generation_count(); ++g) {
    REQUIRE(back.generations[g].size() == sys.generations[g].size());
    for (std::size_t a = 0; a < sys.generations[g].size(); ++a) {
      CHECK(back.generations[g][a].center == sys.generations[g][a].center);
      CHECK(back.generations[g][a].members == sys.generations[g][a].members);
      CHECK(back.generations[g][a].parent == sys.generations[g][a].parent);
    }
  }
  CHECK(back.inner_constant == sys.inner_constant);
  CHECK(back.outer_constant == sys.outer_constant);
  CHECK(io::dump_json(io::dyadic_to_json(back)) == io::dump_json(j));
}

TEST_CASE("dyadic reader rejects corrupt documents") {
  auto space = std::make_shared<const PointCloudSpace>(
      build_point_cloud({{0.0}, {0.5}}));
  const DyadicSystem sys = build_dyadic_system(space, DyadicParams{0.5, 0, 1, 1.0});
  json j = io::dyadic_to_json(sys);
  json missing = j;
  missing["generations"][1]["cubes"][0]["members"] = json::array({0});
  missing["generations"][1]["cubes"][1]["members"] = json::array({0});
  CHECK_THROWS_AS(io::dyadic_from_json(missing, space), SchemaError);
  json bad_delta = j;
  bad_delta["delta"] = 1.5;
  CHECK_THROWS_AS(io::dyadic_from_json(bad_delta, space), SchemaError);
}

TEST_CASE("grid, id and schedule readers") {
  const auto grid = io::y_grid_from_json(io::parse_json("[1, 2.5, [3, 4]]"));
  REQUIRE(grid.size() == 3);
  CHECK(grid[0] == std::vector<double>{1.0});
  CHECK(grid[2] == std::vector<double>({3.0, 4.0}));
  CHECK(io::ids_from_json(io::parse_json("[0, 2, 5]")) ==
        std::vector<PointId>({0, 2, 5}));
  CHECK_THROWS_AS(io::ids_from_json(io::parse_json("[0.5]")), SchemaError);
  const auto sched = io::schedule_from_json(
      io::parse_json("[{\"r\": 0.5, \"eps\": 0.1}, {\"r\": 0.25, \"eps\": 0.2}]"));
  REQUIRE(sched.size() == 2);
  CHECK(sched[0].radius == 0.5);
  CHECK(sched[1].bound == 0.2);
  CHECK_THROWS_AS(io::schedule_from_json(io::parse_json("[{\"r\": 1}]")), SchemaError);
}

TEST_CASE("function CSV reader sorts and validates") {
  const Sampled1DFunction f = io::function_from_csv("x,y\n1.0,2.0\n0.0,1.0\n2.0,0.5\n");
  CHECK(f.xs == std::vector<double>({0.0, 1.0, 2.0}));
  CHECK(f.ys == std::vector<double>({1.0, 2.0, 0.5}));
  CHECK_THROWS_AS(io::function_from_csv("0,1\n0,2\n"), SchemaError);  // duplicate x
  CHECK_THROWS_AS(io::function_from_csv("0,1,2\n"), SchemaError);
}

TEST_CASE("argument parsers for polynomials and intervals") {
  const Polynomial u = io::coeffs_from_arg("1,0,2");
  CHECK(u(2.0) == 9.0);
  CHECK_THROWS_AS(io::coeffs_from_arg("1,x"), SchemaError);
  const auto ivs = io::intervals_from_arg("0:0.5,0.75:1");
  REQUIRE(ivs.size() == 2);
  CHECK(ivs[1].first == 0.75);
  CHECK_THROWS_AS(io::intervals_from_arg("0-1"), SchemaError);
}

TEST_CASE("identity report serialization carries every field") {
  IdentityReport r;
  r.lhs = 1.0;
  r.rhs = 1.5;
  r.abs_diff = 0.5;
  r.rel_diff = 1.0 / 3.0;
  r.resolution = 100;
  r.tolerance_used = 1e-6;
  const json j = io::identity_report_to_json(r);
  CHECK(j.at("lhs") == 1.0);
  CHECK(j.at("resolution") == 100);
  CHECK(io::dump_json(j).find("0.33333333333333331") != std::string::npos);
}
