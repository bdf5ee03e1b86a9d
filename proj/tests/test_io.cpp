#include "doctest.h"
#include "persmod/construct.hpp"
#include "persmod/decomp.hpp"
#include "persmod/io.hpp"
#include "persmod/kan.hpp"
#include "persmod/random.hpp"

using namespace pm;

namespace {

Rational q(long a, long b = 1) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

void round_trip(const GridModule& M) {
  json j = module_to_json(M);
  GridModule back = module_from_json(parse_json(dump(j)));
  CHECK(back == M);
  CHECK(dump(module_to_json(back)) == dump(j));
}

void round_trip(const InterleavingCertificate& c) {
  json j = certificate_to_json(c);
  auto back = certificate_from_json(parse_json(dump(j)));
  CHECK(back.M == c.M);
  CHECK(back.N == c.N);
  CHECK(back.eps == c.eps);
  CHECK(back.grid == c.grid);
  CHECK(back.f == c.f);
  CHECK(back.g == c.g);
  CHECK(dump(certificate_to_json(back)) == dump(j));
}

}  // namespace

TEST_CASE("module round trip") {
  round_trip(module_G());
  round_trip(module_G(Field(2)));
  round_trip(GridModule::zero(Grid::regular(3, -1, 2)));
  round_trip(interval_module({q(-1, 3), q(0)}, {q(5, 7), q(2)}));
  for (std::uint64_t s = 0; s < 30; ++s) round_trip(random_module(1 + s % 3, 3, 3, s));

  json j = module_to_json(module_G());
  CHECK(j["p"] == 65521);
  CHECK(j["axes"][0][1] == "1/1");
  CHECK(j["dims"].size() == 25);
}

TEST_CASE("certificate and morphism round trip") {
  GridModule M = random_module(2, 3, 2, 7);
  round_trip(identity_certificate(M));
  round_trip(shift_certificate(M, q(1, 3), q(1, 2)));
  round_trip(snap_certificate(M, q(2, 3)));
  round_trip(zero_certificate(interval_module({q(0), q(0)}, {q(1), q(1)}), q(1, 2)));
  auto t = tack(module_G(), module_G(), q(1));
  round_trip(t.certificate);
  for (const auto& s : t.stages) round_trip(s);

  Decomposition d = decompose(random_basis_change(direct_sum(M, M), 3));
  json mj = morphism_to_json(d.witness);
  auto back = morphism_from_json(parse_json(dump(mj)));
  CHECK(back.source == d.witness.source);
  CHECK(back.target == d.witness.target);
  CHECK(back.mats == d.witness.mats);
}

TEST_CASE("malformed input") {
  json good = module_to_json(module_G());
  auto bad = [&](auto edit) {
    json j = good;
    edit(j);
    CHECK_THROWS_AS(module_from_json(j), MalformedInput);
  };
  bad([](json& j) { j["p"] = 65520; });
  bad([](json& j) { j["p"] = -3; });
  bad([](json& j) { j.erase("dims"); });
  bad([](json& j) { j["dims"].erase(0); });
  bad([](json& j) { j["n"] = 3; });
  bad([](json& j) { j["axes"][0][1] = "1/0"; });
  bad([](json& j) { j["axes"][0][1] = "one"; });
  bad([](json& j) { j["axes"][0][1] = "0/1"; });
  bad([](json& j) { j["axes"][0][1] = 1; });
  bad([](json& j) { j["steps"][0][0] = json::array({1, 2}); });
  bad([](json& j) {
    for (auto& ax : j["steps"])
      for (auto& m : ax)
        if (!m.empty()) {
          m[0] = 65521;
          return;
        }
  });
  bad([](json& j) { j["steps"].erase(1); });
  bad([](json& j) { j["dims"][0] = "1"; });
  CHECK_THROWS_AS(parse_json("{\"p\": 2,"), MalformedInput);
  CHECK_THROWS_AS(module_from_json(json::array()), MalformedInput);
  CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), MalformedInput);

  // a non-commuting square parses; validate reports it
  ModuleBuilder b(Grid::regular(2, 0, 2), Field());
  for (std::size_t v = 0; v < 4; ++v) b.set_dim(v, 1);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t v = 0; v < 4; ++v)
      if (b.grid().has_successor(v, k)) b.set_step(k, v, Matrix::identity(1));
  json nc = module_to_json(b.build());
  nc["steps"][0][0] = json::array({2});
  GridModule M;
  CHECK_NOTHROW(M = module_from_json(nc));
  CHECK_FALSE(validate(M).ok);
}
