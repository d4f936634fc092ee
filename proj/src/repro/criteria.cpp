#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "checks.hpp"
#include "kcbs/biphoton.hpp"
#include "kcbs/cli.hpp"
#include "kcbs/json_io.hpp"
#include "kcbs/oracles.hpp"
#include "kcbs/repro.hpp"
#include "kcbs/search.hpp"

namespace kcbs::repro {

namespace {

using hv::Mask;
using json = nlohmann::json;

const double kSqrt5 = std::sqrt(5.0);

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v, int prec = 12) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

// Exact model from a random joint supported on a few assignments.
hv::ExactModel point_mass_mixture(oracle::Sampler& rng, const hv::ContextStructure& s) {
    hv::JointDistribution<mpq_class> w{s.n(), std::vector<mpq_class>(s.assignment_count(), 0)};
    const int k = static_cast<int>(rng.integer(1, 4));
    mpq_class total = 0;
    std::vector<std::pair<Mask, mpq_class>> picks;
    for (int i = 0; i < k; ++i) {
        const mpq_class v(static_cast<unsigned long>(rng.integer(1, 9)));
        picks.emplace_back(static_cast<Mask>(rng.integer(0, s.assignment_count() - 1)), v);
        total += v;
    }
    for (auto& [x, v] : picks) w.weights[x] += v / total;
    return hv::pushforward(s, w);
}

hv::ExactModel rational_leg_model(oracle::Sampler& rng) {
    std::vector<mpq_class> q;
    // q_i <= 1/2 keeps every adjacent pair compatible.
    for (int i = 0; i < 5; ++i) q.push_back(rng.rational(0, 500, 1000));
    return hv::pentagram_model(q);
}

hv::ExactModel scaled_axis_model(oracle::Sampler& rng) {
    const double s = rng.uniform(0.8, 1.0);
    std::vector<mpq_class> q;
    for (int i = 0; i < 5; ++i) q.emplace_back(s / kSqrt5 + rng.uniform(-0.02, 0.02));
    return hv::pentagram_model(q);
}

// Unbiased marginals with random pair correlations in [-1, 1].
hv::ExactModel correlation_model(oracle::Sampler& rng, const hv::ContextStructure& s) {
    std::vector<mpq_class> mu(s.dimension(), 0);
    mu[0] = 1;
    for (const auto& ctx : s.contexts()) {
        const Mask pair = (Mask{1} << ctx[0]) | (Mask{1} << ctx[1]);
        mu[s.monomial_index(pair)] = rng.rational(-100, 100, 100);
    }
    return hv::model_from_moments(s, mu);
}

Outcome criterion_regular_violation() {
    const Pentagram p = regular_pentagram(Direction(0, 0, 1));
    const SpinState psi = SpinState::along(Direction(0, 0, 1));
    const double k = kcbs_sum(p, psi);
    const double spin = kcbs_spin_form(p, psi);
    const double corr = correlation_form(p, psi);
    std::array<Vec3, 5> legs;
    for (int i = 0; i < 5; ++i) legs[i] = p.leg(i).vec();
    const double k_oracle = oracle::kcbs_sum_direct(legs, psi.amplitudes());
    const double corr_oracle = oracle::correlation_form_operator(legs, psi.amplitudes());
    const bool pass = std::abs(k - kSqrt5) <= 1e-9 && std::abs(spin - (5 - kSqrt5)) <= 1e-9 && spin < 3 &&
                      std::abs(corr - (5 - 4 * kSqrt5)) <= 1e-9 && corr < -3 && std::abs(k - k_oracle) <= 1e-12 &&
                      std::abs(corr - corr_oracle) <= 1e-12;
    return {pass, "K=" + fmt(k) + " spin_form=" + fmt(spin) + " correlation_form=" + fmt(corr)};
}

Outcome criterion_hv_decision() {
    const json axis = io::to_json(SpinState::along(Direction(0, 0, 1)));
    std::string detail;
    bool pass = true;
    for (const char* mode : {"exact", "float"}) {
        cli::Options opt;
        opt.mode = mode;
        const auto res = cli::cmd_certify(json{{"state", axis}, {"pentagram", "regular"}}, opt);
        const bool ok = res.exit_code == cli::kInfeasible && res.report.contains("violated") &&
                        io::ray_from_json(res.report.at("violated")) == hv::pentagram_ray();
        pass = pass && ok;
        detail += std::string(mode) + ": exit " + std::to_string(res.exit_code) + (ok ? " ray=pentagram; " : " FAIL; ");
    }

    oracle::Sampler rng(2);
    int feasible = 0;
    int witnessed = 0;
    for (int i = 0; i < 100; ++i) {
        const Pentagram p = rng.pentagram();
        const SpinState psi = rng.coherent_state();
        const auto res = cli::cmd_certify(json{{"state", io::to_json(psi)}, {"pentagram", io::to_json(p)}}, {});
        if (res.exit_code != cli::kOk) continue;
        ++feasible;
        const auto model = io::exact_model_from_json(res.report.at("model"));
        const auto w = io::exact_joint_from_json(res.report.at("witness"));
        // The witness must reproduce the certified rationals exactly and the
        // state's marginals to double precision.
        bool good = oracle::pushes_forward_to(w, model);
        const auto direct = hv::marginals_from_state(p, psi);
        for (std::size_t c = 0; c < direct.tables.size() && good; ++c) {
            for (std::size_t o = 0; o < direct.tables[c].size(); ++o) {
                good = good && std::abs(model.tables[c][o].get_d() - direct.tables[c][o]) <= 1e-12;
            }
        }
        witnessed += good;
    }
    pass = pass && feasible == 100 && witnessed == 100;
    detail += "coherent: " + std::to_string(feasible) + "/100 feasible, " + std::to_string(witnessed) + " witnesses valid";
    return {pass, detail};
}

Outcome criterion_chsh_cone() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rays = hv::enumerate_extremal_rays(hv::ContextStructure::chsh());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    int nontrivial = 0;
    int flips = 0;
    int extremal = 0;
    for (const auto& r : rays) {
        extremal += oracle::extremal_by_rank(r);
        if (r.cls != hv::RayClass::nontrivial) continue;
        ++nontrivial;
        flips += oracle::is_flip_image(r, hv::chsh_ray());
    }
    const bool pass = nontrivial == 8 && flips == 8 && extremal == static_cast<int>(rays.size()) && secs < 10;
    return {pass, std::to_string(nontrivial) + " nontrivial, " + std::to_string(flips) + " flip images of CHSH, " +
                      std::to_string(extremal) + "/" + std::to_string(rays.size()) + " pass rank check, " +
                      fmt(secs, 3) + " s"};
}

Outcome criterion_pentagram_cone() {
    const auto s = hv::ContextStructure::pentagram5();
    const auto t0 = std::chrono::steady_clock::now();
    const auto rays = hv::enumerate_extremal_rays(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto indicators = oracle::indicator_coeffs(s);
    int trivial = 0;
    int nontrivial = 0;
    int extremal = 0;
    int classified = 0;
    bool has_pentagram = false;
    for (const auto& r : rays) {
        std::string why;
        extremal += oracle::extremal_by_rank(r, &why);
        const bool is_indicator = std::find(indicators.begin(), indicators.end(), r.coeffs) != indicators.end();
        classified += is_indicator == (r.cls == hv::RayClass::trivial);
        if (r.cls == hv::RayClass::trivial) {
            ++trivial;
        } else {
            ++nontrivial;
            has_pentagram = has_pentagram || r == hv::pentagram_ray();
        }
    }
    const bool pass = has_pentagram && trivial == 20 && nontrivial == 16 && extremal == static_cast<int>(rays.size()) &&
                      classified == static_cast<int>(rays.size()) && secs < 60;
    return {pass, std::to_string(trivial) + " trivial, " + std::to_string(nontrivial) + " nontrivial, " +
                      std::to_string(extremal) + "/" + std::to_string(rays.size()) + " pass rank check, " +
                      (has_pentagram ? "includes" : "MISSING") + " pentagram ray, " + fmt(secs, 3) + " s"};
}

Outcome criterion_duality() {
    const auto st = detail::duality_run(1200, 5);
    const bool pass = st.models >= 1000 && st.disagreements == 0 && st.bad_certificates == 0 && st.feasible > 0 &&
                      st.infeasible > 0;
    return {pass, std::to_string(st.models) + " models (" + std::to_string(st.feasible) + " feasible, " +
                      std::to_string(st.infeasible) + " infeasible), " + std::to_string(st.disagreements) +
                      " disagreements, " + std::to_string(st.bad_certificates) + " bad certificates" +
                      (st.first_problem.empty() ? "" : "; " + st.first_problem)};
}

Outcome criterion_concurrence() {
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const double phi = (M_PI / 4) * i / 99.0;
        const SpinState psi = canonical_state(phi);
        const auto tq = two_qubit(psi);
        const double w = wootters_concurrence(tq);
        const auto& a = psi.amplitudes();
        const double sum_sq = std::abs(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
        const double direct = oracle::pure_concurrence(tq.product_amplitudes());
        worst = std::max({worst, std::abs(w - sum_sq), std::abs(w - std::cos(2 * phi)), std::abs(direct - w)});
    }
    return {worst <= 1e-9, "max deviation over 100 phi: " + fmt(worst, 3)};
}

Outcome criterion_threshold() {
    const double phi_t = 0.5 * std::acos(1 / kSqrt5);
    const double at_t = search::regular_K(phi_t);
    const double at_0 = search::regular_K(0);
    const double at_q = search::regular_K(M_PI / 4);
    const double direct = kcbs_sum(regular_pentagram(Direction(1, 0, 0)), canonical_state(phi_t));
    const bool pass = std::abs(at_t - 2) <= 1e-12 && std::abs(direct - 2) <= 1e-12 && std::abs(at_0 - kSqrt5) <= 1e-12 &&
                      std::abs(at_q - (5 - kSqrt5) / 2) <= 1e-12;
    return {pass, "K(threshold)=" + fmt(at_t, 15) + " K(0)=" + fmt(at_0, 15) + " K(pi/4)=" + fmt(at_q, 15)};
}

Outcome criterion_skew_detection() {
    bool pass = true;
    std::string detail;
    for (double c : {0.1, 0.2, 0.3}) {
        const auto t0 = std::chrono::steady_clock::now();
        const SpinState psi = state_with_concurrence(c);
        const auto res = search::optimize_pentagram(psi, {});
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double recheck = kcbs_sum(res.pentagram, psi);
        const bool ok = res.k > 2 && recheck > 2 && std::abs(recheck - res.k) <= 1e-9 && secs < 60;
        pass = pass && ok;
        detail += "c=" + fmt(c, 2) + ": K=" + fmt(res.k, 10) + " (" + fmt(secs, 2) + " s); ";
    }
    search::SearchConfig cfg;
    cfg.restarts = 64;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = search::optimize_pentagram(state_with_concurrence(0), cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double worst = 0;
    for (const auto& t : res.trace) worst = std::max(worst, t.k);
    pass = pass && worst <= 2 + 1e-6 && secs < 60;
    detail += "c=0: max K over 64 restarts " + fmt(worst, 12) + " (" + fmt(secs, 2) + " s)";
    return {pass, detail};
}

Outcome criterion_biphoton_numbers() {
    const double delta = biphoton::symmetric_test_angle();
    const SpinState psi = biphoton::biphoton_state(Direction(0, 0, 1));
    const double rate = biphoton::coincidence_rate(Direction(std::sin(delta), 0, std::cos(delta), true), psi);
    const bool pass = std::abs(delta - 0.8383) <= 5e-4 && std::abs(rate - 0.4472) <= 1e-4 &&
                      biphoton::kClassicalRate == 0.4 && rate > biphoton::kClassicalRate;
    return {pass, "angle=" + fmt(delta, 8) + " rate=" + fmt(rate, 8) + " threshold=" + fmt(biphoton::kClassicalRate)};
}

Outcome criterion_statistics() {
    const biphoton::CoincidencePlan plan{0.44721, 0.4, 0.95};
    const auto n = biphoton::plan_trials(plan);
    const auto n_oracle = oracle::plan_trials_bruteforce(0.44721, 2, 5, 0.95);
    int wrong = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const auto rep = biphoton::simulate_counts(plan.true_rate, n, seed, plan.confidence);
        wrong += 5 * rep.coincidences <= 2 * n;
    }
    const double frac = wrong / 1000.0;
    const bool pass = n == n_oracle && frac <= 0.07;
    return {pass, "n=" + std::to_string(n) + " (oracle " + std::to_string(n_oracle) + "), wrong side in " +
                      std::to_string(wrong) + "/1000 runs"};
}

Outcome criterion_properties() {
    const auto results = run_property_suites(1000);
    int failing = 0;
    int min_cases = 1 << 30;
    std::string first;
    for (const auto& r : results) {
        min_cases = std::min(min_cases, r.cases);
        if (r.failures > 0) {
            ++failing;
            if (first.empty()) first = r.module + "/" + r.name + ": " + r.first_failure;
        }
    }
    return {failing == 0, std::to_string(results.size()) + " properties, " + std::to_string(failing) + " failing" +
                              (first.empty() ? "" : "; " + first)};
}

struct Entry {
    const char* name;
    std::function<Outcome()> run;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries{
        {"regular pentagram violation", criterion_regular_violation},
        {"hidden-variable decision", criterion_hv_decision},
        {"CHSH cone enumeration", criterion_chsh_cone},
        {"pentagram cone enumeration", criterion_pentagram_cone},
        {"LP / ray duality", criterion_duality},
        {"concurrence", criterion_concurrence},
        {"regular detection threshold", criterion_threshold},
        {"skew pentagram detection", criterion_skew_detection},
        {"biphoton numbers", criterion_biphoton_numbers},
        {"trial planning statistics", criterion_statistics},
        {"property suites", criterion_properties},
    };
    return entries;
}

}  // namespace

namespace detail {

const std::vector<hv::RayFunction>& cached_rays(const hv::ContextStructure& s) {
    static std::map<std::vector<std::vector<int>>, std::vector<hv::RayFunction>> cache;
    auto it = cache.find(s.contexts());
    if (it == cache.end()) it = cache.emplace(s.contexts(), hv::enumerate_extremal_rays(s)).first;
    return it->second;
}

DualityStats duality_run(int count, std::uint64_t seed) {
    oracle::Sampler rng(seed);
    const auto penta = hv::ContextStructure::pentagram5();
    const auto chsh = hv::ContextStructure::chsh();
    DualityStats st;
    auto problem = [&st](const std::string& what) {
        ++st.bad_certificates;
        if (st.first_problem.empty()) st.first_problem = what;
    };
    for (int i = 0; i < count; ++i) {
        const hv::ExactModel m = [&] {
            switch (i % 6) {
                case 0: return point_mass_mixture(rng, penta);
                case 1: return point_mass_mixture(rng, chsh);
                case 2: return rational_leg_model(rng);
                case 3: return scaled_axis_model(rng);
                case 4: return correlation_model(rng, chsh);
                default: return correlation_model(rng, penta);
            }
        }();
        ++st.models;
        bool oracle_ok = true;
        for (const auto& r : cached_rays(m.structure)) {
            if (oracle::expectation_from_tables(r, m) < 0) oracle_ok = false;
        }
        const auto cert = hv::lp_feasible(m);
        if (cert.verdict == hv::Verdict::feasible) {
            ++st.feasible;
            if (!cert.witness || !oracle::pushes_forward_to(*cert.witness, m)) problem("witness fails pushforward");
        } else if (cert.verdict == hv::Verdict::infeasible) {
            ++st.infeasible;
            if (!cert.violated || !(oracle::expectation_from_tables(*cert.violated, m) < 0) ||
                !oracle::extremal_by_rank(*cert.violated)) {
                problem("violated ray not negative or not extremal");
            }
        } else {
            problem("indeterminate at radius 0");
        }
        if ((cert.verdict == hv::Verdict::feasible) != oracle_ok) {
            ++st.disagreements;
            if (st.first_problem.empty()) st.first_problem = "disagreement on model " + std::to_string(i);
        }
    }
    return st;
}

}  // namespace detail

CriterionResult run_criterion(int id) {
    if (id < 1 || id > kCriterionCount) return {id, "unknown", false, "no such criterion", 0.0};
    const auto& e = registry()[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
        out = e.run();
    } catch (const std::exception& ex) {
        out = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {id, e.name, out.pass, out.detail, secs};
}

std::vector<CriterionResult> run_all() {
    std::vector<CriterionResult> out;
    for (int i = 1; i <= kCriterionCount; ++i) out.push_back(run_criterion(i));
    return out;
}

}  // namespace kcbs::repro
