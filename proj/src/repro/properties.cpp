#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "checks.hpp"
#include "kcbs/biphoton.hpp"
#include "kcbs/cli.hpp"
#include "kcbs/error.hpp"
#include "kcbs/json_io.hpp"
#include "kcbs/oracles.hpp"
#include "kcbs/repro.hpp"
#include "kcbs/search.hpp"

namespace kcbs::repro {

namespace {

using hv::Mask;
using json = nlohmann::json;

// Runs check() `cases` times; a false return or an exception is a failure.
class Suite {
public:
    Suite(std::vector<PropertyResult>& out, std::string module) : out_(out), module_(std::move(module)) {}

    void run(const std::string& name, int cases, const std::function<bool(int, std::string&)>& check) {
        PropertyResult r{module_, name, cases, 0, {}};
        for (int i = 0; i < cases; ++i) {
            std::string why;
            bool ok = false;
            try {
                ok = check(i, why);
            } catch (const std::exception& e) {
                why = std::string("exception: ") + e.what();
            }
            if (!ok) {
                ++r.failures;
                if (r.first_failure.empty()) r.first_failure = "case " + std::to_string(i) + (why.empty() ? "" : ": " + why);
            }
        }
        out_.push_back(std::move(r));
    }

    /// For properties whose cases are counted by the caller.
    void record(const std::string& name, int cases, int failures, const std::string& first) {
        out_.push_back({module_, name, cases, failures, failures ? first : std::string()});
    }

private:
    std::vector<PropertyResult>& out_;
    std::string module_;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

bool near(double a, double b, double tol, std::string& why) {
    if (std::abs(a - b) <= tol) return true;
    why = num(a) + " vs " + num(b);
    return false;
}

std::array<Vec3, 5> leg_vectors(const Pentagram& p) {
    std::array<Vec3, 5> v;
    for (int i = 0; i < 5; ++i) v[i] = p.leg(i).vec();
    return v;
}

void spin_core_suite(Suite& s, int n, oracle::Sampler& rng) {
    s.run("s_squared + |overlap|^2 = 1", n, [&](int, std::string& why) {
        const Direction l = rng.direction();
        const SpinState psi = rng.state();
        return near(s_squared_expectation(l, psi) + std::norm(overlap(l, psi)), 1.0, 1e-12, why);
    });
    s.run("resolution of identity over a triad", n, [&](int, std::string& why) {
        const Mat3 r = rng.rotation().matrix();
        const SpinState psi = rng.state();
        double total = 0;
        for (int k = 0; k < 3; ++k) total += std::norm(overlap(Direction(Vec3(r.col(k))), psi));
        return near(total, 1.0, 1e-12, why);
    });
    s.run("S_l^2 psi = psi - l <l|psi>", n, [&](int, std::string& why) {
        const Direction l = rng.direction();
        const SpinState psi = rng.state();
        const CVec3 twice = spin_apply(l, spin_apply(l, psi));
        const CVec3 expect = psi.amplitudes() - l.vec().cast<Complex>() * overlap(l, psi);
        return near((twice - expect).norm(), 0.0, 1e-12, why);
    });
    s.run("concurrence invariant under rotation and phase", n, [&](int, std::string& why) {
        const SpinState psi = rng.state();
        const double c = concurrence(psi);
        // The phased amplitudes are themselves rounded, so "exact" can only
        // mean agreement to a few ulps.
        return near(concurrence(rotate(psi, rng.rotation())), c, 1e-12, why) &&
               near(concurrence(psi.with_phase(rng.uniform(0, 2 * M_PI))), c, 1e-15, why);
    });
    s.run("wootters concurrence of the two-qubit image", n, [&](int, std::string& why) {
        const SpinState psi = rng.state();
        const auto tq = two_qubit(psi);
        return near(wootters_concurrence(tq), concurrence(psi), 1e-9, why) &&
               near(oracle::pure_concurrence(tq.product_amplitudes()), concurrence(psi), 1e-9, why);
    });
    s.run("canonical form round trip", n, [&](int, std::string& why) {
        const SpinState psi = rng.state();
        const CVec3 rec = to_canonical(psi).reconstruct().amplitudes();
        const Complex align = rec.dot(psi.amplitudes());  // conjugates rec
        const Complex phase = std::abs(align) > 0 ? align / std::abs(align) : Complex(1);
        return near((phase * rec - psi.amplitudes()).norm(), 0.0, 1e-9, why);
    });
}

void pentagram_suite(Suite& s, int n, oracle::Sampler& rng) {
    s.run("0 <= K <= gram_max <= 5, attained by the eigenvector", n, [&](int, std::string& why) {
        const Pentagram p = rng.pentagram();
        const double k = kcbs_sum(p, rng.state());
        const double g = gram_max(p);
        if (!(k >= -1e-12 && k <= g + 1e-12 && g <= 5 + 1e-12)) {
            why = "K=" + num(k) + " gram_max=" + num(g);
            return false;
        }
        return near(kcbs_sum(p, SpinState::along(gram_max_direction(p))), g, 1e-9, why);
    });
    s.run("rotation equivariance", n, [&](int, std::string& why) {
        const Pentagram p = rng.pentagram();
        const SpinState psi = rng.state();
        const Rotation r = rng.rotation();
        return near(kcbs_sum(p.rotated(r), rotate(psi, r)), kcbs_sum(p, psi), 1e-12, why);
    });
    s.run("leg sign invariance", n, [&](int, std::string& why) {
        const Pentagram p = rng.pentagram();
        const SpinState psi = rng.state();
        auto legs = leg_vectors(p);
        std::array<Direction, 5> dirs = p.legs();
        for (int k = 0; k < 5; ++k) {
            if (rng.integer(0, 1)) {
                legs[k] = -legs[k];
                dirs[k] = -dirs[k];
            }
        }
        const Pentagram q(dirs);
        return near(oracle::kcbs_sum_direct(legs, psi.amplitudes()), kcbs_sum(p, psi), 1e-12, why) &&
               near(oracle::correlation_form_operator(legs, psi.amplitudes()), correlation_form(p, psi), 1e-12, why) &&
               near(kcbs_spin_form(q, psi), kcbs_spin_form(p, psi), 1e-12, why);
    });
    s.run("form identities", n, [&](int, std::string& why) {
        const Pentagram p = rng.pentagram();
        const SpinState psi = rng.state();
        const double k = kcbs_sum(p, psi);
        const double spin = kcbs_spin_form(p, psi);
        return near(k + spin, 5.0, 1e-12, why) && near(correlation_form(p, psi), 4 * spin - 15, 1e-12, why) &&
               near(oracle::correlation_form_operator(leg_vectors(p), psi.amplitudes()), 4 * spin - 15, 1e-12, why);
    });
    s.run("single-flip inequality on the regular pentagram", n, [&](int, std::string& why) {
        const Pentagram p = regular_pentagram(rng.direction(), rng.uniform(0, 2 * M_PI));
        const SpinState psi = rng.state();
        for (int i = 0; i < 5; ++i) {
            const double lhs = s_squared_expectation(p.leg(i), psi);
            const double rhs = s_squared_expectation(p.leg(i - 2), psi) + s_squared_expectation(p.leg(i + 2), psi);
            if (lhs > rhs + 1e-12) {
                why = "leg " + std::to_string(i) + ": " + num(lhs) + " > " + num(rhs);
                return false;
            }
        }
        return true;
    });
    s.run("chain pentagrams are closed and orthogonal", n, [&](int, std::string& why) {
        const Pentagram p = rng.pentagram();
        for (int i = 0; i < 5; ++i) {
            if (!near(p.leg(i).vec().dot(p.leg(i + 1).vec()), 0.0, 1e-12, why)) return false;
            if (!near(p.leg(i).vec().norm(), 1.0, 1e-12, why)) return false;
        }
        return true;
    });
}

// Random structure on up to 5 observables with no context inside another.
hv::ContextStructure random_structure(oracle::Sampler& rng) {
    for (;;) {
        const int n = static_cast<int>(rng.integer(2, 5));
        const int count = static_cast<int>(rng.integer(1, 5));
        std::vector<Mask> masks;
        for (int c = 0; c < count; ++c) {
            Mask m = 0;
            const int size = static_cast<int>(rng.integer(1, std::min(3, n)));
            while (__builtin_popcount(m) < size) m |= Mask{1} << rng.integer(0, n - 1);
            masks.push_back(m);
        }
        bool nested = false;
        for (std::size_t a = 0; a < masks.size(); ++a) {
            for (std::size_t b = 0; b < masks.size(); ++b) {
                if (a != b && (masks[a] & masks[b]) == masks[a]) nested = true;
            }
        }
        if (nested) continue;
        std::vector<std::vector<int>> contexts;
        for (Mask m : masks) {
            std::vector<int> ctx;
            for (int i = 0; i < n; ++i) {
                if ((m >> i) & 1u) ctx.push_back(i);
            }
            contexts.push_back(ctx);
        }
        try {
            return hv::ContextStructure(n, contexts);
        } catch (const InvalidInput&) {
            continue;
        }
    }
}

void hv_suite(Suite& s, int n, oracle::Sampler& rng) {
    {
        const auto st = detail::duality_run(n, rng.integer(0, 1u << 30));
        s.record("duality: LP verdict matches the ray oracle (exact)", st.models, st.disagreements, st.first_problem);
        s.record("exact certificates check independently", st.models, st.bad_certificates, st.first_problem);
    }
    s.run("float witnesses reproduce the marginals", n, [&](int i, std::string& why) {
        const Pentagram p = rng.pentagram();
        const SpinState psi = i % 2 ? rng.coherent_state() : rng.state();
        const auto m = hv::marginals_from_state(p, psi);
        const auto cert = hv::lp_feasible(m);
        if (cert.verdict != hv::Verdict::feasible) return true;
        double total = 0;
        for (double w : cert.witness->weights) {
            if (w < 0) {
                why = "negative weight";
                return false;
            }
            total += w;
        }
        const auto pushed = hv::pushforward(m.structure, *cert.witness);
        for (std::size_t c = 0; c < m.tables.size(); ++c) {
            for (std::size_t o = 0; o < m.tables[c].size(); ++o) {
                if (!near(pushed.tables[c][o], m.tables[c][o], 1e-9, why)) return false;
            }
        }
        return near(total, 1.0, 1e-9, why);
    });
    s.run("enumerated rays are extremal and correctly classified", n, [&](int, std::string& why) {
        const auto st = random_structure(rng);
        const auto rays = hv::enumerate_extremal_rays(st);
        const auto ind = oracle::indicator_coeffs(st);
        std::set<std::vector<std::int64_t>> expected_trivial(ind.begin(), ind.end());
        std::size_t trivial = 0;
        for (const auto& r : rays) {
            if (!oracle::extremal_by_rank(r, &why)) return false;
            const bool is_ind = expected_trivial.count(r.coeffs) > 0;
            if (is_ind != (r.cls == hv::RayClass::trivial)) {
                why = "misclassified ray";
                return false;
            }
            trivial += is_ind;
        }
        if (trivial != expected_trivial.size()) {
            why = "trivial rays " + std::to_string(trivial) + " of " + std::to_string(expected_trivial.size());
            return false;
        }
        return true;
    });
    s.run("infeasible certificates carry a negative ray", n, [&](int, std::string& why) {
        const Pentagram p = rng.pentagram();
        const SpinState psi = SpinState::along(gram_max_direction(p));
        const auto m = hv::marginals_from_state(p, psi);
        const auto cert = hv::lp_feasible(m);
        if (cert.verdict != hv::Verdict::infeasible) return true;
        if (!cert.violated) {
            why = "no ray";
            return false;
        }
        const double e = oracle::expectation_from_tables(*cert.violated, m);
        const mpq_class ex = oracle::expectation_from_tables(*cert.violated, hv::to_exact(m));
        if (!(e < 0 && ex < 0)) {
            why = "expectation " + num(e);
            return false;
        }
        return oracle::extremal_by_rank(*cert.violated, &why);
    });
    s.run("state marginals are consistent", n, [&](int, std::string&) {
        hv::validate(hv::marginals_from_state(rng.pentagram(), rng.state()));
        return true;
    });
    s.run("flip is an involution and preserves verdicts", n, [&](int, std::string& why) {
        const auto st = rng.integer(0, 1) ? hv::ContextStructure::pentagram5() : hv::ContextStructure::chsh();
        const Mask f = static_cast<Mask>(rng.integer(0, st.assignment_count() - 1));
        std::vector<mpq_class> mu(st.dimension(), 0);
        mu[0] = 1;
        for (const auto& ctx : st.contexts()) {
            const Mask pair = (Mask{1} << ctx[0]) | (Mask{1} << ctx[1]);
            mu[st.monomial_index(pair)] = rng.rational(-100, 100, 100);
        }
        const auto m = hv::model_from_moments(st, mu);
        if (hv::flip(hv::flip(m, f), f).tables != m.tables) {
            why = "model involution";
            return false;
        }
        for (const auto& r : detail::cached_rays(st)) {
            const auto fr = hv::flip(r, f);
            if (!(hv::flip(fr, f) == r) || !oracle::extremal_by_rank(fr, &why)) return false;
        }
        if (hv::lp_feasible(m).verdict != hv::lp_feasible(hv::flip(m, f)).verdict) {
            why = "verdict changed under flip";
            return false;
        }
        return true;
    });
}

void search_suite(Suite& s, int n, oracle::Sampler& rng) {
    s.run("scan K is non-decreasing in c (regression)", 1, [&](int, std::string& why) {
        const auto rows = search::detection_scan(search::default_scan_grid(), {});
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].k < rows[i - 1].k - 1e-6) {
                why = "c=" + num(rows[i].c) + " K=" + num(rows[i].k) + " below " + num(rows[i - 1].k);
                return false;
            }
        }
        return true;
    });
    s.run("regular_K matches direct evaluation", n, [&](int, std::string& why) {
        const double phi = rng.uniform(0, M_PI / 4);
        return near(search::regular_K(phi), kcbs_sum(regular_pentagram(Direction(1, 0, 0)), canonical_state(phi)), 1e-12,
                    why);
    });
    s.run("search results are valid and bit-reproducible", n, [&](int, std::string& why) {
        search::SearchConfig cfg;
        cfg.restarts = 1;
        cfg.max_iterations = 40;
        cfg.jitter_rounds = 0;
        cfg.seed = rng.integer(0, ~0ull);
        const SpinState psi = rng.state();
        const auto a = search::optimize_pentagram(psi, cfg);
        const auto b = search::optimize_pentagram(psi, cfg);
        if (io::to_json(a).dump() != io::to_json(b).dump()) {
            why = "two runs differ";
            return false;
        }
        const Pentagram replay = io::pentagram_from_json(io::to_json(a).at("pentagram"));
        return near(kcbs_sum(replay, psi), a.k, 1e-9, why) && near(a.violation, a.k - 2, 0.0, why);
    });
}

void biphoton_suite(Suite& s, int n, oracle::Sampler& rng) {
    s.run("rate + <S^2> = 1", n, [&](int, std::string& why) {
        const Direction l = rng.direction();
        const SpinState psi = rng.state();
        return near(biphoton::coincidence_rate(l, psi) + s_squared_expectation(l, psi), 1.0, 1e-12, why);
    });
    s.run("rotational covariance", n, [&](int, std::string& why) {
        const Direction l = rng.direction();
        const Direction p = rng.direction();
        const Rotation r = rng.rotation();
        const SpinState psi = biphoton::biphoton_state(p);
        return near(biphoton::coincidence_rate(r.apply(l), rotate(psi, r)), biphoton::coincidence_rate(l, psi), 1e-12,
                    why);
    });
    const std::array<biphoton::CoincidencePlan, 3> plans{{{0.44721, 0.4, 0.95}, {0.5, 0.4, 0.9}, {0.33, 0.4, 0.95}}};
    for (const auto& plan : plans) {
        const auto trials = biphoton::plan_trials(plan);
        int wrong = 0;
        s.run("planned n keeps wrong-side runs within budget (p=" + num(plan.true_rate) + ")", n,
              [&](int i, std::string& why) {
                  const auto rep = biphoton::simulate_counts(plan.true_rate, trials, 1000 + i, plan.confidence);
                  wrong += biphoton::wrong_side(plan, rep.coincidences, trials);
                  if (i + 1 < n) return true;
                  const double frac = static_cast<double>(wrong) / n;
                  why = num(frac) + " wrong with n=" + std::to_string(trials);
                  return frac <= (1 - plan.confidence) + 0.02;
              });
    }
    s.run("5 x rate at the test angle equals K of the aligned pentagram", n, [&](int, std::string& why) {
        const Direction axis = rng.direction();
        const Pentagram p = regular_pentagram(axis, rng.uniform(0, 2 * M_PI));
        const SpinState psi = biphoton::biphoton_state(axis);
        const double angle = std::acos(std::abs(p.leg(0).vec().dot(axis.vec())));
        return near(angle, biphoton::symmetric_test_angle(), 1e-12, why) &&
               near(5 * biphoton::coincidence_rate(p.leg(0), psi), kcbs_sum(p, psi), 1e-12, why);
    });
}

void cli_suite(Suite& s, int n, oracle::Sampler& rng) {
    const std::map<std::string, int> exit_of{{"feasible", cli::kOk}, {"infeasible", cli::kInfeasible},
                                             {"indeterminate", cli::kIndeterminate}};
    s.run("emitted artifacts are accepted back unchanged", n, [&](int i, std::string& why) {
        const Pentagram p = rng.pentagram();
        const SpinState psi = i % 2 ? rng.state() : rng.coherent_state();
        cli::Options opt;
        const json input{{"state", io::to_json(psi)}, {"pentagram", io::to_json(p)}};
        const auto ev = cli::cmd_eval(input, opt);
        const auto ev2 = cli::cmd_eval(json{{"state", ev.report.at("state")}, {"pentagram", ev.report.at("pentagram")}}, opt);
        if (ev.exit_code != 0 || ev2.report.dump() != ev.report.dump()) {
            why = "eval round trip";
            return false;
        }
        const auto cert = cli::cmd_certify(input, opt);
        const auto again = cli::cmd_certify(cert.report.at("model"), opt);
        if (again.report.dump() != cert.report.dump() || again.exit_code != cert.exit_code) {
            why = "model round trip";
            return false;
        }
        if (cert.report.contains("witness")) {
            const json joint_input{{"structure", json{{"n", 5}, {"contexts", cert.report.at("model").at("contexts")}}},
                                   {"joint", cert.report.at("witness")}};
            const auto w = cli::cmd_certify(joint_input, opt);
            if (w.exit_code != cli::kOk || w.report.at("model") != cert.report.at("model")) {
                why = "witness round trip";
                return false;
            }
        }
        if (cert.report.contains("violated")) {
            const auto ex = cli::cmd_expect(json{{"ray", cert.report.at("violated")}, {"model", cert.report.at("model")}}, opt);
            if (ex.exit_code != 0 || ex.report.at("expectation") != cert.report.at("violated_expectation") ||
                ex.report.at("ray") != cert.report.at("violated")) {
                why = "ray round trip";
                return false;
            }
        }
        return true;
    });
    s.run("exit codes agree with reported verdicts", n, [&](int i, std::string& why) {
        cli::Options opt;
        opt.mode = i % 2 ? "exact" : "float";
        const Pentagram p = rng.pentagram();
        const SpinState psi = i % 3 ? rng.state() : SpinState::along(gram_max_direction(p));
        const auto res = cli::cmd_certify(json{{"state", io::to_json(psi)}, {"pentagram", io::to_json(p)}}, opt);
        const std::string v = res.report.at("verdict");
        why = v + " with exit " + std::to_string(res.exit_code);
        return exit_of.at(v) == res.exit_code && res.report.contains("witness") == (v == "feasible") &&
               (v != "infeasible" || res.report.contains("violated"));
    });
    s.run("stochastic commands are reproducible per seed", n, [&](int, std::string& why) {
        cli::Options opt;
        opt.seed = rng.integer(0, ~0ull);
        const json sim{{"rate", rng.uniform()}, {"trials", 200}};
        const json sw{{"angles", {0.0, rng.uniform(0, 1.5)}}, {"trials", 100}};
        const bool same = cli::cmd_biphoton("simulate", sim, opt).report.dump() ==
                              cli::cmd_biphoton("simulate", sim, opt).report.dump() &&
                          cli::cmd_biphoton("sweep", sw, opt).report.dump() == cli::cmd_biphoton("sweep", sw, opt).report.dump();
        if (!same) why = "outputs differ";
        return same;
    });
}

}  // namespace

std::vector<PropertyResult> run_property_suites(int cases, unsigned long long seed) {
    std::vector<PropertyResult> out;
    oracle::Sampler rng(seed);
    Suite spin(out, "spin_core");
    spin_core_suite(spin, cases, rng);
    Suite geom(out, "pentagram_geom");
    pentagram_suite(geom, cases, rng);
    Suite hvs(out, "hv_solver");
    hv_suite(hvs, cases, rng);
    Suite srch(out, "search");
    search_suite(srch, cases, rng);
    Suite bip(out, "biphoton");
    biphoton_suite(bip, cases, rng);
    Suite cl(out, "cli");
    cli_suite(cl, cases, rng);
    return out;
}

}  // namespace kcbs::repro
