#include <doctest.h>

#include <cmath>
#include <fstream>

#include "kcbs/error.hpp"
#include "kcbs/hv.hpp"
#include "kcbs/json_io.hpp"
#include "kcbs/oracles.hpp"

using namespace kcbs;
using namespace kcbs::hv;

namespace {

const double kRt5 = std::sqrt(5.0);

FloatModel axis_marginals() { return marginals_from_state(regular_pentagram(Direction(0, 0, 1)), SpinState(0, 0, 1)); }

FloatModel perp_coherent_marginals() {
    const double r = 1 / std::sqrt(2.0);
    return marginals_from_state(regular_pentagram(Direction(0, 0, 1)), SpinState(r, Complex(0, r), 0));
}

ExactModel uniform_q(const mpq_class& q) { return pentagram_model(std::vector<mpq_class>(5, q)); }

}  // namespace

TEST_CASE("structures") {
    const auto p = ContextStructure::pentagram5();
    CHECK(p.n() == 5);
    CHECK(p.dimension() == 11);
    CHECK(p.monomial_name(0) == "1");
    CHECK(p.monomial_from_name("a0a1") >= 0);
    CHECK(p.monomial_from_name("a0a2") == -1);
    CHECK(p.outcome_label(0, 1) == "-+");
    CHECK(ContextStructure::chsh().dimension() == 9);
    CHECK_THROWS_AS(ContextStructure(3, {{0, 3}}), InvalidInput);
}

TEST_CASE("quantum marginals") {
    const FloatModel m = axis_marginals();
    const double q = 1 / kRt5;
    for (const auto& t : m.tables) {
        CHECK(t[0] == 0.0);
        CHECK(t[1] == doctest::Approx(q));
        CHECK(t[2] == doctest::Approx(q));
        CHECK(t[3] == doctest::Approx(1 - 2 * q));
    }

    const Pentagram p = from_chain(ChainParams{Direction(0, 0, 1), {0.3, 0.9, 2.0}});
    const FloatModel l1 = marginals_from_state(p, SpinState::along(p.leg(0)));
    CHECK(l1.tables[0] == std::vector<double>{0, 1, 0, 0});

    oracle::Sampler rng(31);
    for (int k = 0; k < 50; ++k) {
        const FloatModel r = marginals_from_state(rng.pentagram(), rng.state());
        for (const auto& t : r.tables) CHECK(t[0] == 0.0);
        CHECK_NOTHROW(validate(r));
    }
}

TEST_CASE("certificates for pentagram states") {
    const auto axis = lp_feasible(axis_marginals());
    CHECK(axis.verdict == Verdict::infeasible);
    REQUIRE(axis.violated);
    CHECK(*axis.violated == pentagram_ray());
    CHECK(axis.violated_expectation == doctest::Approx(8 - 4 * kRt5).epsilon(1e-12));
    CHECK(ray_expectation(pentagram_ray(), axis_marginals()) == doctest::Approx(8 - 4 * kRt5).epsilon(1e-12));

    const ExactModel ex = to_exact(axis_marginals());
    const auto exact = lp_feasible(ex);
    CHECK(exact.verdict == Verdict::infeasible);
    CHECK(*exact.violated == pentagram_ray());
    CHECK(exact.violated_expectation == oracle::expectation_from_tables(pentagram_ray(), ex));

    const FloatModel coh = perp_coherent_marginals();
    CHECK(ray_expectation(pentagram_ray(), coh) == doctest::Approx(4 * (5 - (5 - kRt5) / 2) - 15 + 3).epsilon(1e-12));
    const auto cc = lp_feasible(coh);
    CHECK(cc.verdict == Verdict::feasible);
    REQUIRE(cc.witness);
    const FloatModel back = pushforward(coh.structure, *cc.witness);
    for (std::size_t c = 0; c < coh.tables.size(); ++c)
        for (std::size_t o = 0; o < 4; ++o) CHECK(std::abs(back.tables[c][o] - coh.tables[c][o]) < 1e-9);
}

TEST_CASE("point mass is feasible with itself as witness") {
    const auto s = ContextStructure::pentagram5();
    JointDistribution<mpq_class> w{5, std::vector<mpq_class>(32, 0)};
    w.weights[0] = 1;
    const ExactModel m = pushforward(s, w);
    const auto c = lp_feasible(m);
    CHECK(c.verdict == Verdict::feasible);
    REQUIRE(c.witness);
    CHECK(oracle::pushes_forward_to(*c.witness, m));
}

TEST_CASE("exact boundary and radius") {
    // q = 2/5 saturates the pentagram inequality.
    const auto edge = lp_feasible(uniform_q(mpq_class(2, 5)));
    CHECK(edge.verdict == Verdict::feasible);
    CHECK(edge.margin == 0);
    CHECK(lp_feasible(uniform_q(mpq_class(2, 5)), mpq_class(1, 1000)).verdict == Verdict::indeterminate);

    const auto over = lp_feasible(uniform_q(mpq_class(21, 50)));
    CHECK(over.verdict == Verdict::infeasible);
    CHECK(*over.violated == pentagram_ray());
    CHECK(over.violated_expectation < 0);
    CHECK(lp_feasible(uniform_q(mpq_class(21, 50)), mpq_class(1, 1000)).verdict == Verdict::infeasible);

    // Strictly inside the polytope: every assignment has weight 1/32.
    JointDistribution<mpq_class> flat{5, std::vector<mpq_class>(32, mpq_class(1, 32))};
    const ExactModel inside = pushforward(ContextStructure::pentagram5(), flat);
    CHECK(lp_feasible(inside).verdict == Verdict::feasible);
    CHECK(lp_feasible(inside, mpq_class(1, 1000)).verdict == Verdict::feasible);

    // A structural zero puts the model on a facet of the polytope, so any
    // positive radius reaches outside it.
    const auto facet = uniform_q(mpq_class(1, 4));
    CHECK(lp_feasible(facet).verdict == Verdict::feasible);
    CHECK(lp_feasible(facet, mpq_class(1, 1000)).verdict == Verdict::indeterminate);
}

TEST_CASE("float borderline is indeterminate") {
    CHECK(lp_feasible(to_float(uniform_q(mpq_class(2, 5)))).verdict == Verdict::indeterminate);
    CHECK(lp_feasible(to_float(uniform_q(mpq_class(1, 4)))).verdict == Verdict::feasible);
}

TEST_CASE("flips") {
    const RayFunction r = pentagram_ray();
    const RayFunction f = flip(r, Mask{1});
    const auto& s = r.structure;
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        const std::string name = s.monomial_name(i);
        const bool touched = name == "a0a1" || name == "a0a4";
        CHECK(f.coeffs[i] == (touched ? -r.coeffs[i] : r.coeffs[i]));
    }
    CHECK(flip(f, Mask{1}) == r);

    const ExactModel m = uniform_q(mpq_class(1, 3));
    const ExactModel mm = flip(flip(m, Mask{5}), Mask{5});
    CHECK(mm.tables == m.tables);
    CHECK(lp_feasible(flip(m, Mask{6})).verdict == Verdict::feasible);
    CHECK(ray_expectation(flip(r, Mask{6}), flip(m, Mask{6})) == ray_expectation(r, m));
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(ray_expectation(chsh_ray(), uniform_q(mpq_class(1, 3))), StructureMismatch);
    std::vector<std::vector<int>> path;
    for (int i = 0; i < 20; ++i) path.push_back({i, i + 1});
    CHECK_THROWS_AS(enumerate_extremal_rays(ContextStructure(21, path)), ScaleGuard);

    ExactModel bad = uniform_q(mpq_class(1, 3));
    bad.tables[2] = {0, mpq_class(1, 2), mpq_class(1, 4), mpq_class(1, 4)};
    try {
        validate(bad);
        FAIL("expected InconsistentModel");
    } catch (const InconsistentModel& e) {
        CHECK((e.context_a() == 1 || e.context_b() == 1 || e.context_a() == 3 || e.context_b() == 3));
        CHECK((e.context_a() == 2 || e.context_b() == 2));
    }

    ExactModel neg = uniform_q(mpq_class(1, 3));
    neg.tables[0][0] = -1;
    CHECK_THROWS_AS(validate(neg), InvalidInput);
}

TEST_CASE("cone of a single pair") {
    const auto rays = enumerate_extremal_rays(ContextStructure::single_pair());
    CHECK(rays.size() == 4);
    for (const auto& r : rays) CHECK(r.cls == RayClass::trivial);
}

TEST_CASE("chsh cone") {
    const auto rays = enumerate_extremal_rays(ContextStructure::chsh());
    int nontrivial = 0;
    for (const auto& r : rays) {
        CHECK(oracle::extremal_by_rank(r));
        if (r.cls == RayClass::nontrivial) {
            ++nontrivial;
            CHECK(oracle::is_flip_image(r, chsh_ray()));
        }
    }
    CHECK(nontrivial == 8);
    CHECK(rays.size() == 8 + trivial_rays(ContextStructure::chsh()).size());
}

TEST_CASE("pentagram5 cone matches the frozen golden file") {
    std::ifstream in(KCBS_TEST_DATA "/pentagram5_rays.json");
    REQUIRE(in);
    const auto golden = io::json::parse(in);
    const auto rays = enumerate_extremal_rays(ContextStructure::pentagram5());
    REQUIRE(rays.size() == golden.at("rays").size());
    CHECK(golden.at("counts").at("trivial") == 20);
    CHECK(golden.at("counts").at("nontrivial") == 16);
    for (std::size_t i = 0; i < rays.size(); ++i) CHECK(rays[i] == io::ray_from_json(golden["rays"][i]));
}
