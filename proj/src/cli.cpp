#include "kcbs/cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kcbs/biphoton.hpp"
#include "kcbs/error.hpp"
#include "kcbs/hv.hpp"
#include "kcbs/json_io.hpp"
#include "kcbs/search.hpp"

namespace kcbs::cli {

namespace {

constexpr double kDefaultFloatTol = 1e-9;

template <class F>
CommandResult guarded(F&& f) {
    try {
        return f();
    } catch (const InconsistentModel& e) {
        return {kBadInput, json{{"error", e.what()}, {"contexts", {e.context_a(), e.context_b()}}}, {}};
    } catch (const Error& e) {
        return {kBadInput, json{{"error", e.what()}}, {}};
    } catch (const json::exception& e) {
        return {kBadInput, json{{"error", std::string("malformed input: ") + e.what()}}, {}};
    } catch (const std::invalid_argument& e) {
        return {kBadInput, json{{"error", e.what()}}, {}};
    }
}

void check_mode(const Options& opt) {
    if (opt.mode != "exact" && opt.mode != "float") throw InvalidInput("--mode must be exact or float");
    if (opt.format != "json" && opt.format != "csv") throw InvalidInput("--format must be json or csv");
}

// "regular" is the regular pentagram about the z axis with chi = 0.
Pentagram pentagram_for(const json& spec, bool normalize) {
    if (spec.is_string()) {
        if (spec.get<std::string>() != "regular") throw InvalidInput("pentagram: expected \"regular\" or an object");
        return regular_pentagram(Direction(0.0, 0.0, 1.0));
    }
    if (spec.contains("legs")) return io::pentagram_from_json(spec, normalize);
    if (spec.contains("l1")) return from_chain(io::chain_from_json(spec, normalize));
    if (spec.contains("regular")) {
        const json& r = spec.at("regular");
        return regular_pentagram(io::direction_from_json(r.at("axis"), normalize), r.value("chi", 0.0));
    }
    throw InvalidInput("pentagram: expected legs, chain parameters, or \"regular\"");
}

int exit_for(hv::Verdict v) {
    switch (v) {
        case hv::Verdict::feasible: return kOk;
        case hv::Verdict::infeasible: return kInfeasible;
        case hv::Verdict::indeterminate: return kIndeterminate;
    }
    return kFailure;
}

hv::ContextStructure named_structure(const json& j) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "pentagram5") return hv::ContextStructure::pentagram5();
        if (name == "chsh") return hv::ContextStructure::chsh();
        if (name == "pair") return hv::ContextStructure::single_pair();
        throw InvalidInput("unknown structure '" + name + "' (pentagram5, chsh, pair)");
    }
    return io::structure_from_json(j);
}

std::uint64_t required_seed(const Options& opt, const json& fallback) {
    if (opt.seed) return *opt.seed;
    if (fallback.is_number_unsigned() || fallback.is_number_integer()) return fallback.get<std::uint64_t>();
    throw InvalidInput("a seed is required for stochastic commands (--seed)");
}

json interval_json(const biphoton::Interval& i) { return json::array({i.lower, i.upper}); }

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json load_input(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[' || arg[first] == '"')) {
        return json::parse(arg);
    }
    std::ifstream in(arg);
    if (!in) throw InvalidInput("cannot read input file '" + arg + "'");
    return json::parse(in);
}

CommandResult cmd_eval(const json& input, const Options& opt) {
    return guarded([&] {
        check_mode(opt);
        const SpinState psi = io::state_from_json(input.at("state"), opt.normalize);
        const Pentagram p = pentagram_for(input.value("pentagram", json("regular")), opt.normalize);
        const double k = kcbs_sum(p, psi);
        json legs = json::array();
        for (double q : leg_overlaps(p, psi)) legs.push_back(q);
        json report{{"k", k},
                    {"spin_form", kcbs_spin_form(p, psi)},
                    {"correlation_form", correlation_form(p, psi)},
                    {"leg_overlaps", std::move(legs)},
                    {"gram_max", gram_max(p)},
                    {"verdict", k > 2.0 ? "violates" : "classical-compatible"},
                    {"pentagram", io::to_json(p)},
                    {"state", io::to_json(psi)}};
        return CommandResult{kOk, std::move(report), {}};
    });
}

CommandResult cmd_certify(const json& input, const Options& opt) {
    return guarded([&] {
        check_mode(opt);
        const bool exact = opt.mode == "exact";
        json report{{"mode", opt.mode}};
        hv::HvCertificate<mpq_class> exact_cert;
        hv::HvCertificate<double> float_cert;

        if (input.contains("tables")) {
            if (exact) {
                const auto m = io::exact_model_from_json(input);
                const mpq_class radius(opt.tol.value_or(0.0));
                exact_cert = hv::lp_feasible(m, radius);
                report["radius"] = io::format_rational(radius);
                report["model"] = io::to_json(m);
            } else {
                const auto m = io::float_model_from_json(input);
                float_cert = hv::lp_feasible(m, opt.tol.value_or(kDefaultFloatTol));
                report["tol"] = opt.tol.value_or(kDefaultFloatTol);
                report["model"] = io::to_json(m);
            }
        } else if (input.contains("state")) {
            const SpinState psi = io::state_from_json(input.at("state"), opt.normalize);
            const Pentagram p = pentagram_for(input.value("pentagram", json("regular")), opt.normalize);
            if (exact) {
                auto q = leg_overlaps(p, psi);
                std::vector<mpq_class> qr(q.begin(), q.end());
                // Rounding can push an adjacent pair past 1 by an ulp.
                for (int i = 0; i < 5; ++i) {
                    const mpq_class excess = qr[i] + qr[(i + 1) % 5] - 1;
                    if (excess > 0) qr[(i + 1) % 5] -= excess;
                }
                const auto m = hv::pentagram_model(qr);
                const mpq_class radius(opt.tol.value_or(0.0));
                exact_cert = hv::lp_feasible(m, radius);
                report["radius"] = io::format_rational(radius);
                report["model"] = io::to_json(m);
            } else {
                const auto m = hv::marginals_from_state(p, psi);
                float_cert = hv::lp_feasible(m, opt.tol.value_or(kDefaultFloatTol));
                report["tol"] = opt.tol.value_or(kDefaultFloatTol);
                report["model"] = io::to_json(m);
            }
        } else if (input.contains("joint")) {
            const auto s = named_structure(input.at("structure"));
            const auto w = io::exact_joint_from_json(input.at("joint"));
            const auto m = hv::pushforward(s, w);
            if (exact) {
                exact_cert = hv::lp_feasible(m, mpq_class(opt.tol.value_or(0.0)));
                report["model"] = io::to_json(m);
            } else {
                const auto fm = hv::to_float(m);
                float_cert = hv::lp_feasible(fm, opt.tol.value_or(kDefaultFloatTol));
                report["model"] = io::to_json(fm);
            }
        } else {
            throw InvalidInput("certify: expected a model, {state, pentagram}, or {structure, joint}");
        }

        const json cert = exact ? io::to_json(exact_cert) : io::to_json(float_cert);
        for (const auto& [k, v] : cert.items()) report[k] = v;
        if (exact) report["margin_approx"] = exact_cert.margin.get_d();
        const int code = exit_for(exact ? exact_cert.verdict : float_cert.verdict);
        return CommandResult{code, std::move(report), {}};
    });
}

CommandResult cmd_cone(const json& structure, const Options& opt) {
    return guarded([&] {
        check_mode(opt);
        const auto s = named_structure(structure);
        const auto rays = hv::enumerate_extremal_rays(s);
        json list = json::array();
        int trivial = 0;
        for (const auto& r : rays) {
            if (r.cls == hv::RayClass::trivial) ++trivial;
            list.push_back(io::to_json(r));
        }
        json report{{"structure", io::to_json(s)},
                    {"counts", {{"trivial", trivial}, {"nontrivial", static_cast<int>(rays.size()) - trivial}}},
                    {"rays", std::move(list)}};
        CommandResult res{kOk, std::move(report), {}};
        if (opt.format == "csv") {
            std::ostringstream os;
            os << "class";
            for (std::size_t k = 0; k < s.dimension(); ++k) os << ',' << s.monomial_name(k);
            os << '\n';
            for (const auto& r : rays) {
                os << hv::to_string(r.cls);
                for (auto c : r.coeffs) os << ',' << c;
                os << '\n';
            }
            res.csv = os.str();
        }
        return res;
    });
}

CommandResult cmd_expect(const json& input, const Options& opt) {
    return guarded([&] {
        check_mode(opt);
        const auto ray = io::ray_from_json(input.at("ray"));
        json report{{"ray", io::to_json(ray)}};
        if (opt.mode == "exact") {
            const auto m = io::exact_model_from_json(input.at("model"));
            const mpq_class e = hv::ray_expectation(ray, m);
            report["expectation"] = io::format_rational(e);
            report["expectation_approx"] = e.get_d();
            report["violated"] = e < 0;
        } else {
            const auto m = io::float_model_from_json(input.at("model"));
            const double e = hv::ray_expectation(ray, m);
            report["expectation"] = e;
            report["violated"] = e < 0.0;
        }
        return CommandResult{kOk, std::move(report), {}};
    });
}

CommandResult cmd_search(const json& input, const Options& opt) {
    return guarded([&] {
        check_mode(opt);
        const json cfg_json = input.value("config", json::object());
        search::SearchConfig cfg = io::search_config_from_json(cfg_json);
        cfg.seed = required_seed(opt, cfg_json.value("seed", json()));

        if (input.contains("grid")) {
            const auto grid = input.at("grid").get<std::vector<double>>();
            const auto rows = search::detection_scan(grid, cfg);
            json table = json::array();
            std::ostringstream csv;
            csv << "c,k,violated\n";
            for (const auto& r : rows) {
                table.push_back({{"c", r.c}, {"k", r.k}, {"violated", r.violated}});
                csv << format_double(r.c) << ',' << format_double(r.k) << ',' << (r.violated ? "true" : "false") << '\n';
            }
            return CommandResult{kOk, json{{"config", io::to_json(cfg)}, {"scan", std::move(table)}},
                                 opt.format == "csv" ? csv.str() : std::string()};
        }
        const SpinState psi = io::state_from_json(input.at("state"), opt.normalize);
        const auto res = search::optimize_pentagram(psi, cfg);
        json report = io::to_json(res);
        report["config"] = io::to_json(cfg);
        report["state"] = io::to_json(psi);
        report["violated"] = res.violation > search::kViolationMargin;
        return CommandResult{kOk, std::move(report), {}};
    });
}

CommandResult cmd_biphoton(const std::string& action, const json& input, const Options& opt) {
    return guarded([&] {
        check_mode(opt);
        if (action == "plan") {
            const biphoton::CoincidencePlan plan{input.at("true_rate").get<double>(),
                                                 input.value("threshold", biphoton::kClassicalRate),
                                                 input.value("confidence", 0.95)};
            const auto n = biphoton::plan_trials(plan);
            json report{{"true_rate", plan.true_rate},
                        {"threshold", plan.threshold},
                        {"confidence", plan.confidence},
                        {"trials", n},
                        {"wrong_side_probability", biphoton::wrong_side_probability(plan, n)}};
            return CommandResult{kOk, std::move(report), {}};
        }
        if (action == "simulate") {
            const std::uint64_t seed = required_seed(opt, input.value("seed", json()));
            const auto rep = biphoton::simulate_counts(input.at("rate").get<double>(),
                                                       input.at("trials").get<std::uint64_t>(), seed,
                                                       input.value("confidence", 0.95));
            json report{{"rate", rep.rate},           {"trials", rep.trials}, {"coincidences", rep.coincidences},
                        {"estimate", rep.estimate},   {"confidence", rep.confidence},
                        {"ci", interval_json(rep.ci)}, {"seed", seed}};
            return CommandResult{kOk, std::move(report), {}};
        }
        if (action == "sweep") {
            const std::uint64_t seed = required_seed(opt, input.value("seed", json()));
            std::vector<double> angles;
            if (input.contains("angles")) {
                angles = input.at("angles").get<std::vector<double>>();
            } else {
                const double from = input.value("from", 0.0);
                const double to = input.value("to", M_PI / 2);
                const int steps = input.value("steps", 31);
                if (steps < 2) throw InvalidInput("sweep: steps must be >= 2");
                for (int i = 0; i < steps; ++i) angles.push_back(from + (to - from) * i / (steps - 1));
            }
            const auto rows = biphoton::sweep(angles, input.value("trials", std::uint64_t{10000}), seed,
                                              input.value("confidence", 0.95), input.value("visibility", 1.0));
            json table = json::array();
            std::ostringstream csv;
            csv << "angle,predicted_rate,simulated_estimate,ci_lower,ci_upper\n";
            for (const auto& r : rows) {
                table.push_back({{"angle", r.angle},
                                 {"predicted_rate", r.predicted},
                                 {"simulated_estimate", r.estimate},
                                 {"ci", interval_json(r.ci)}});
                csv << format_double(r.angle) << ',' << format_double(r.predicted) << ',' << format_double(r.estimate)
                    << ',' << format_double(r.ci.lower) << ',' << format_double(r.ci.upper) << '\n';
            }
            return CommandResult{kOk, json{{"seed", seed}, {"sweep", std::move(table)}},
                                 opt.format == "csv" ? csv.str() : std::string()};
        }
        throw InvalidInput("biphoton: action must be plan, simulate, or sweep");
    });
}

}  // namespace kcbs::cli
