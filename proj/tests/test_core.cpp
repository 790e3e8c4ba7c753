#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "leadsel/assignment.hpp"
#include "leadsel/constraints.hpp"
#include "leadsel/errors.hpp"
#include "leadsel/instance.hpp"
#include "leadsel/instance_io.hpp"
#include "leadsel/rng.hpp"
#include "leadsel/score.hpp"
#include "test_support.hpp"

using namespace leadsel;

TEST_CASE("score arithmetic is exact on micro-units") {
  const Score a = 7, b = Score::from_double(2.5);
  CHECK((a + b).units() == 9'500'000);
  CHECK((a - b) == Score::from_double(4.5));
  CHECK(b * 4 == Score(10));
  CHECK(b.str() == "2.5");
  CHECK(Score(3).str() == "3");
  CHECK(Score::from_double(0.1234564).units() == 123456);
  CHECK(Score::from_double(0.1234565).units() == 123457);
  CHECK_FALSE(b.is_integral());
  CHECK(in_score_range(Score(10)));
  CHECK_FALSE(in_score_range(Score::from_units(10 * Score::kScale + 1)));
}

TEST_CASE("threshold admits strictly above rho") {
  const Threshold rho(Score(5));
  CHECK(rho.admits(Score::from_units(5 * Score::kScale + 1)));
  CHECK_FALSE(rho.admits(Score(5)));
  CHECK(Threshold::clamped(Score(12)).value() == Score(10));
  CHECK(Threshold::clamped(Score(-1)).value() == Score(0));
}

TEST_CASE("instance A accessors and LI scores") {
  const Instance a = test::instance_a();
  CHECK(a.n() == 3);
  CHECK_FALSE(a.has_edge_server());
  CHECK(a.node_count() == 3);
  CHECK(a.lii(1) == Score(7));
  CHECK(a.lxi(3, 2) == Score(9));
  CHECK(a.ues() == std::vector<UeId>{1, 2, 3});
  CHECK(a.nodes() == std::vector<UeId>{1, 2, 3});
  CHECK_FALSE(a.contains(0));
  CHECK(li_score(a, 2, 1) == Score(13));
  CHECK(li_score(a, 2, 3) == Score(7));
  CHECK_THROWS_AS(li_score(a, 2, 2), InvalidArgument);
}

TEST_CASE("instance construction rejects invariant violations") {
  SUBCASE("nonzero diagonal") {
    CHECK_THROWS_AS(Instance::from_rows({1, 2}, {{1, 2}, {3, 0}}), InvalidInstance);
  }
  SUBCASE("score out of range") {
    CHECK_THROWS_AS(Instance::from_rows({11, 2}, {{0, 2}, {3, 0}}), InvalidInstance);
    CHECK_THROWS_AS(Instance::from_rows({1, 2}, {{0, -1}, {3, 0}}), InvalidInstance);
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(Instance::from_rows({1, 2}, {{0, 2}}), InvalidInstance);
  }
  SUBCASE("edge server row must be zero and LII positive") {
    std::vector<Score> lii{0, 3, 4};
    std::vector<std::vector<Score>> lxi{{0, 0, 0}, {1, 0, 2}, {1, 2, 0}};
    CHECK_THROWS_AS(Instance(2, lii, lxi, true), InvalidInstance);
    lii[0] = 10;
    CHECK_NOTHROW(Instance(2, lii, lxi, true));
    lxi[0][1] = 1;
    CHECK_THROWS_AS(Instance(2, lii, lxi, true), InvalidInstance);
  }
  SUBCASE("slot 0 must stay empty without an edge server") {
    std::vector<Score> lii{1, 3, 4};
    std::vector<std::vector<Score>> lxi{{0, 0, 0}, {0, 0, 2}, {0, 2, 0}};
    CHECK_THROWS_AS(Instance(2, lii, lxi, false), InvalidInstance);
  }
}

TEST_CASE("attach_edge_server adds node 0") {
  const Instance e = attach_edge_server(test::instance_a(), 10, {1, 1, 1});
  CHECK(e.has_edge_server());
  CHECK(e.node_count() == 4);
  CHECK(e.nodes().front() == kEdgeServer);
  CHECK(e.lxi(0, 2) == Score(0));
  CHECK(e.lxi(3, 0) == Score(1));
  Assignment all_edge;
  all_edge.leaders = {0};
  all_edge.follows = {{1, 0}, {2, 0}, {3, 0}};
  CHECK(utility(e, all_edge) == Score(13));  // 10 + 1 + 1 + 1
  CHECK_THROWS_AS(attach_edge_server(e, 10, {1, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(attach_edge_server(test::instance_a(), 0, {1, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(attach_edge_server(test::instance_a(), 10, {1, 1}), InvalidArgument);
}

TEST_CASE("generate_instance is deterministic and well formed") {
  CHECK(generate_instance(6, 99) == generate_instance(6, 99));
  CHECK_FALSE(generate_instance(6, 99) == generate_instance(6, 100));
  CHECK_THROWS_AS(generate_instance(0, 1), InvalidArgument);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = generate_instance(1 + seed % 12, seed);
    for (UeId m : inst.ues()) {
      CHECK(inst.lii(m).is_integral());
      CHECK(in_score_range(inst.lii(m)));
      CHECK(inst.lxi(m, m) == Score(0));
      for (UeId n : inst.ues()) CHECK(in_score_range(inst.lxi(m, n)));
    }
  }
}

TEST_CASE("generate_instance draw order: LII first, then LXI row-major") {
  const Instance inst = generate_instance(3, 2024);
  Rng rng(2024);
  for (UeId m = 1; m <= 3; ++m) CHECK(inst.lii(m) == Score(static_cast<int>(rng.uniform_int(0, 10))));
  for (UeId m = 1; m <= 3; ++m)
    for (UeId n = 1; n <= 3; ++n)
      if (m != n) CHECK(inst.lxi(m, n) == Score(static_cast<int>(rng.uniform_int(0, 10))));
}

TEST_CASE("generate_instance with edge server") {
  EdgeServerSpec spec{Score(10), {Score(1), Score(2), Score(3)}};
  const Instance e = generate_instance(3, 5, spec);
  CHECK(e.has_edge_server());
  CHECK(e.lii(0) == Score(10));
  CHECK(e.lxi(2, 0) == Score(2));
  for (UeId m : e.ues()) CHECK(e.lii(m) == generate_instance(3, 5).lii(m));
}

TEST_CASE("rng engine matches the standard mt19937_64 reference") {
  // The C++ standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489u);
  for (int i = 0; i < 9999; ++i) rng.next();
  CHECK(rng.next() == 9981545732273789042ULL);
}

TEST_CASE("splitmix64 matches the reference first output") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {}) != derive_seed(2, {}));
}

TEST_CASE("uniform_int covers the range evenly") {
  Rng rng(7);
  std::map<std::int64_t, int> hist;
  const int draws = 110000;
  for (int i = 0; i < draws; ++i) ++hist[rng.uniform_int(0, 10)];
  REQUIRE(hist.size() == 11);
  CHECK(hist.begin()->first == 0);
  CHECK(hist.rbegin()->first == 10);
  for (const auto& [v, c] : hist) CHECK(std::abs(c - 10000) < 500);  // > 5 sigma
  CHECK_THROWS_AS(rng.uniform_int(3, 2), InvalidArgument);
}

TEST_CASE("shuffle draws every permutation of three with equal frequency") {
  Rng rng(11);
  std::map<std::vector<int>, int> hist;
  for (int i = 0; i < 60000; ++i) {
    std::vector<int> v{1, 2, 3};
    rng.shuffle(std::span<int>(v));
    ++hist[v];
  }
  REQUIRE(hist.size() == 6);
  for (const auto& [p, c] : hist) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("bernoulli and uniform_real stay in range") {
  Rng rng(3);
  int hits = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform_real();
    CHECK((u >= 0.0 && u < 1.0));
    hits += rng.bernoulli(0.25) ? 1 : 0;
  }
  CHECK(std::abs(hits - 5000) < 400);
  CHECK_FALSE(rng.bernoulli(0.0));
  CHECK(rng.bernoulli(1.0));
}

TEST_CASE("utility of the two instance A configurations") {
  const Instance a = test::instance_a();
  Assignment lead1{{1}, {{2, 1}, {3, 1}}, {}};
  Assignment lead3{{3}, {{1, 3}, {2, 3}}, {}};
  CHECK(utility(a, lead1) == Score(17));  // 7 + 6 + 4
  CHECK(utility(a, lead3) == Score(15));  // 5 + 8 + 2
  CHECK(utility(a, all_isolated(a)) == Score(0));
  Assignment bad{{4}, {}, {}};
  CHECK_THROWS_AS(utility(a, bad), InvalidAssignment);
}

TEST_CASE("validate_structure requires a partition") {
  const Instance a = test::instance_a();
  CHECK_NOTHROW(validate_structure(a, Assignment{{1}, {{2, 1}}, {3}}));
  CHECK_THROWS_AS(validate_structure(a, Assignment{{1}, {{2, 1}}, {}}), InvalidAssignment);
  CHECK_THROWS_AS(validate_structure(a, Assignment{{1}, {{1, 1}, {2, 1}}, {3}}), InvalidAssignment);
  CHECK_THROWS_AS(validate_structure(a, Assignment{{1}, {{2, 1}}, {1, 3}}), InvalidAssignment);
}

TEST_CASE("assignment helpers") {
  Assignment x{{3, 1}, {{2, 1}, {4, 3}, {5, 1}}, {6}};
  x.normalize();
  CHECK(x.leaders == std::vector<UeId>{1, 3});
  CHECK(x.is_leader(3));
  CHECK(x.leader_of(5) == 1u);
  CHECK_FALSE(x.leader_of(6).has_value());
  CHECK(x.follower_count(1) == 2);
}

TEST_CASE("check_constraints flags each constraint") {
  const Instance a = test::instance_a();
  const Threshold rho0(Score(0));

  CHECK(check_constraints(a, Assignment{{1}, {{2, 1}, {3, 1}}, {}}, rho0).all_ok());

  SUBCASE("C1: missing role") {
    auto r = check_constraints(a, Assignment{{1}, {{2, 1}}, {}}, rho0);
    CHECK_FALSE(r.c1_ok);
  }
  SUBCASE("C1: isolation is a violation only in strict mode") {
    const Assignment x{{1}, {{2, 1}}, {3}};
    CHECK(check_constraints(a, x, rho0).all_ok());
    auto strict = check_constraints(a, x, rho0, std::nullopt, SolveMode::strict);
    CHECK_FALSE(strict.c1_ok);
    CHECK(strict.isolated == std::vector<UeId>{3});
  }
  SUBCASE("C2: leader without followers") {
    auto r = check_constraints(a, Assignment{{1, 3}, {{2, 1}}, {}}, rho0);
    CHECK_FALSE(r.c2_ok);
  }
  SUBCASE("C2: following a non-leader") {
    auto r = check_constraints(a, Assignment{{1}, {{2, 1}, {3, 2}}, {}}, rho0);
    CHECK_FALSE(r.c2_ok);
  }
  SUBCASE("C3: leader LII not above rho") {
    auto r = check_constraints(a, Assignment{{3}, {{1, 3}, {2, 3}}, {}}, Threshold(Score(5)));
    CHECK_FALSE(r.c3_ok);
    CHECK(check_constraints(a, Assignment{{3}, {{1, 3}, {2, 3}}, {}}, Threshold(Score(4))).c3_ok);
  }
  SUBCASE("capacity") {
    Capacities caps;
    caps.set(1, 1);
    auto r = check_constraints(a, Assignment{{1}, {{2, 1}, {3, 1}}, {}}, rho0, caps);
    CHECK_FALSE(r.capacity_ok);
    CHECK(r.c1_ok);
  }
  SUBCASE("eligibility: LXI must be positive") {
    const Instance z = Instance::from_rows({5, 5}, {{0, 0}, {3, 0}});
    auto r = check_constraints(z, Assignment{{2}, {{1, 2}}, {}}, rho0);
    CHECK_FALSE(r.eligibility_ok);
    CHECK(r.c1_ok);
    CHECK(r.c2_ok);
  }
  SUBCASE("edge server is exempt from C3") {
    const Instance e = attach_edge_server(a, 1, {1, 1, 1});
    auto r = check_constraints(e, Assignment{{0}, {{1, 0}, {2, 0}, {3, 0}}, {}}, Threshold(Score(9)));
    CHECK(r.all_ok());
  }
}

TEST_CASE("feasibility_scan identifies Case 1 and Case 2") {
  const Instance zero = Instance::from_rows({0, 0, 0}, {{0, 3, 8}, {6, 0, 2}, {4, 9, 0}});
  const FeasibilityReport f1 = feasibility_scan(zero, Threshold(Score(0)));
  CHECK(f1.case1);
  CHECK(f1.case2_isolated == std::vector<UeId>{1, 2, 3});

  // UE 3 cannot lead at rho 4 and refuses everyone.
  const Instance c2 = Instance::from_rows({7, 2, 3}, {{0, 3, 8}, {6, 0, 2}, {0, 0, 0}});
  const FeasibilityReport f2 = feasibility_scan(c2, Threshold(Score(4)));
  CHECK_FALSE(f2.case1);
  CHECK(f2.case2_isolated == std::vector<UeId>{3});

  CHECK(feasibility_scan(test::instance_a(), Threshold(Score(0))).case2_isolated.empty());
}

TEST_CASE("instance JSON round trip") {
  for (bool edge : {false, true}) {
    std::optional<EdgeServerSpec> spec;
    if (edge) spec = EdgeServerSpec{Score(10), std::vector<Score>(5, Score(1))};
    const Instance inst = generate_instance(5, 17, spec);
    CHECK(instance_from_json(to_json(inst)) == inst);
    CHECK(parse_instance(to_json(inst).dump()) == inst);
  }
  const Instance frac = Instance::from_rows({Score::from_double(2.5), 1}, {{0, 1}, {Score::from_double(0.25), 0}});
  CHECK(parse_instance(to_json(frac).dump()) == frac);
}

TEST_CASE("instance JSON diagnostics name the field") {
  auto message = [](const std::string& text) {
    try {
      parse_instance(text);
    } catch (const InvalidInstance& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"n":2,"edge_server":false,"lii":[1,2]})").find("lxi") != std::string::npos);
  CHECK(message(R"({"n":2,"edge_server":false,"lii":[1],"lxi":[[0,1],[1,0]]})").find("lii") != std::string::npos);
  CHECK(message(R"({"n":2,"edge_server":false,"lii":[1,"x"],"lxi":[[0,1],[1,0]]})").find("lii[1]") !=
        std::string::npos);
  CHECK(message(R"({"n":2,"edge_server":false,"lii":[1,2],"lxi":[[0,1],[1,0,3]]})").find("lxi[1]") !=
        std::string::npos);
  CHECK(message("{\n\"n\": 2,\n oops}").find("line 3") != std::string::npos);
  CHECK(message(R"({"n":2,"edge_server":false,"lii":[1,2],"lxi":[[1,1],[1,0]]})") != "no error");
}

TEST_CASE("capacities JSON") {
  const Capacities c = capacities_from_json(nlohmann::json::parse(R"({"1": 2, "0": 5})"));
  CHECK(c.limit(1) == 2u);
  CHECK(c.limit(0) == 5u);
  CHECK_FALSE(c.limit(2).has_value());
  CHECK_THROWS_AS(capacities_from_json(nlohmann::json::parse(R"({"a": 2})")), InvalidArgument);
  CHECK_THROWS_AS(capacities_from_json(nlohmann::json::parse(R"({"1": -2})")), InvalidArgument);
  CHECK(Capacities::uniform(test::instance_a(), 1).limits().size() == 3);
}

TEST_CASE("assignment JSON uses string keys for follows") {
  const auto j = to_json(Assignment{{1}, {{2, 1}, {3, 1}}, {}});
  CHECK(j["leaders"] == nlohmann::json::array({1}));
  CHECK(j["follows"]["2"] == 1);
  CHECK(j["isolated"].empty());
}
