#include <doctest.h>

#include "kcbs/error.hpp"
#include "kcbs/json_io.hpp"
#include "kcbs/oracles.hpp"

using namespace kcbs;
using kcbs::io::json;

TEST_CASE("rationals") {
    CHECK(io::parse_rational("3/4") == mpq_class(3, 4));
    CHECK(io::parse_rational("-2") == -2);
    CHECK(io::parse_rational("0.25") == mpq_class(1, 4));
    CHECK(io::parse_rational("6/8") == mpq_class(3, 4));
    CHECK(io::format_rational(io::parse_rational("-6/8")) == "-3/4");
    CHECK(io::format_rational(mpq_class(2)) == "2");
    CHECK_THROWS(io::parse_rational("1/0"));
    CHECK_THROWS(io::parse_rational("abc"));
}

TEST_CASE("geometry round trips are bit exact") {
    oracle::Sampler rng(51);
    for (int k = 0; k < 50; ++k) {
        const SpinState s = rng.state();
        const SpinState back = io::state_from_json(json::parse(io::to_json(s).dump()));
        CHECK(back.amplitudes() == s.amplitudes());
        const Pentagram p = rng.pentagram();
        const Pentagram pb = io::pentagram_from_json(json::parse(io::to_json(p).dump()));
        for (int i = 0; i < 5; ++i) CHECK(pb.leg(i).vec() == p.leg(i).vec());
    }
}

TEST_CASE("hv round trips") {
    const auto m = hv::pentagram_model(std::vector<mpq_class>(5, mpq_class(1, 3)));
    CHECK(io::exact_model_from_json(io::to_json(m)).tables == m.tables);
    const auto f = hv::to_float(m);
    CHECK(io::float_model_from_json(json::parse(io::to_json(f).dump())).tables == f.tables);
    const auto r = hv::pentagram_ray();
    CHECK(io::ray_from_json(io::to_json(r)) == r);

    hv::JointDistribution<mpq_class> w{5, std::vector<mpq_class>(32, 0)};
    w.weights[3] = mpq_class(1, 3);
    w.weights[17] = mpq_class(2, 3);
    CHECK(io::exact_joint_from_json(io::to_json(w)).weights == w.weights);

    search::SearchConfig c;
    c.seed = 77;
    c.restarts = 3;
    const auto cb = io::search_config_from_json(io::to_json(c));
    CHECK(cb.seed == 77);
    CHECK(cb.restarts == 3);
}

TEST_CASE("malformed input") {
    CHECK_THROWS_AS(io::direction_from_json(json::parse("[1, 2, 3]")), InvalidInput);
    CHECK_NOTHROW(io::direction_from_json(json::parse("[1, 2, 3]"), true));
    CHECK_THROWS(io::direction_from_json(json::parse("[1, 0]")));
    CHECK_THROWS(io::state_from_json(json::parse(R"({"re": [1, 0], "im": [0, 0]})")));
    CHECK_THROWS(io::structure_from_json(json::parse(R"({"n": 2, "contexts": [[0, 2]]})")));
    CHECK_THROWS(io::ray_from_json(json::parse(R"({"n": 2, "contexts": [[0, 1]], "coeffs": {"a0a2": 1}})")));
}
