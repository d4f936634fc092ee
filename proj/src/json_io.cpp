#include "kcbs/json_io.hpp"

#include <cctype>

#include "kcbs/error.hpp"

namespace kcbs::io {

namespace {

Vec3 vec_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw InvalidInput(std::string(what) + ": expected an array of 3 numbers");
    return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

template <class T>
json table_entry(const T& v) {
    if constexpr (std::is_same_v<T, double>) {
        return v;
    } else {
        return format_rational(v);
    }
}

template <class T>
json model_to_json(const hv::MarginalModel<T>& m) {
    json j = to_json(m.structure);
    json tables = json::object();
    for (std::size_t c = 0; c < m.tables.size(); ++c) {
        json t = json::object();
        for (std::size_t k = 0; k < m.tables[c].size(); ++k) t[m.structure.outcome_label(c, k)] = table_entry(m.tables[c][k]);
        tables[std::to_string(c)] = std::move(t);
    }
    j["tables"] = std::move(tables);
    return j;
}

// Reads the table entry for every (context, outcome) pair, in table order.
template <class F>
void for_each_entry(const hv::ContextStructure& s, const json& j, F&& f) {
    const json& tables = j.at("tables");
    for (std::size_t c = 0; c < s.contexts().size(); ++c) {
        const std::string key = std::to_string(c);
        if (!tables.contains(key)) throw InvalidInput("model: missing table for context " + key);
        const json& t = tables.at(key);
        for (std::size_t k = 0; k < (std::size_t{1} << s.context_size(c)); ++k) {
            const std::string label = s.outcome_label(c, k);
            if (!t.contains(label)) throw InvalidInput("model: table " + key + " lacks outcome " + label);
            f(c, t.at(label));
        }
    }
}

std::string assignment_label(int n, hv::Mask x) {
    std::string s(static_cast<std::size_t>(n), '+');
    for (int i = 0; i < n; ++i) {
        if ((x >> i) & 1u) s[i] = '-';
    }
    return s;
}

template <class T>
json joint_to_json(const hv::JointDistribution<T>& w) {
    json weights = json::object();
    for (hv::Mask x = 0; x < w.weights.size(); ++x) {
        if (w.weights[x] != T(0)) weights[assignment_label(w.n, x)] = table_entry(w.weights[x]);
    }
    return json{{"n", w.n}, {"weights", std::move(weights)}};
}

template <class T>
json certificate_to_json(const hv::HvCertificate<T>& c) {
    json j{{"verdict", hv::to_string(c.verdict)}, {"margin", table_entry(c.margin)}};
    if (c.witness) j["witness"] = joint_to_json(*c.witness);
    if (c.violated) {
        j["violated"] = to_json(*c.violated);
        j["violated_expectation"] = table_entry(c.violated_expectation);
    }
    return j;
}

}  // namespace

mpq_class parse_rational(const std::string& raw) {
    std::string s;
    for (char ch : raw) {
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    }
    if (s.empty()) throw InvalidInput("empty rational");
    try {
        const auto dot = s.find('.');
        const auto exp = s.find_first_of("eE");
        if (dot == std::string::npos && exp == std::string::npos) {
            mpq_class q(s, 10);
            if (q.get_den() == 0) throw InvalidInput("zero denominator in '" + raw + "'");
            q.canonicalize();
            return q;
        }
        // Decimal notation: mantissa digits over a power of ten.
        std::string mantissa = exp == std::string::npos ? s : s.substr(0, exp);
        long e10 = exp == std::string::npos ? 0 : std::stol(s.substr(exp + 1));
        if (const auto d = mantissa.find('.'); d != std::string::npos) {
            e10 -= static_cast<long>(mantissa.size() - d - 1);
            mantissa.erase(d, 1);
        }
        if (mantissa.empty() || mantissa == "-" || mantissa == "+") throw InvalidInput("malformed decimal");
        if (mantissa[0] == '+') mantissa.erase(0, 1);
        mpz_class num(mantissa, 10);
        mpz_class pow10;
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(e10)));
        mpq_class q = e10 >= 0 ? mpq_class(num * pow10) : mpq_class(num, pow10);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw InvalidInput("malformed rational '" + raw + "'");
    }
}

std::string format_rational(const mpq_class& q) { return q.get_str(); }

json to_json(const Direction& d) { return json::array({d.x(), d.y(), d.z()}); }

Direction direction_from_json(const json& j, bool normalize) {
    return Direction(vec_from_json(j, "direction"), normalize);
}

json to_json(const SpinState& s) {
    const CVec3& a = s.amplitudes();
    return json{{"re", {a[0].real(), a[1].real(), a[2].real()}}, {"im", {a[0].imag(), a[1].imag(), a[2].imag()}}};
}

SpinState state_from_json(const json& j, bool normalize) {
    if (!j.is_object() || !j.contains("re")) throw InvalidInput("state: expected {\"re\": [...], \"im\": [...]}");
    const Vec3 re = vec_from_json(j.at("re"), "state.re");
    const Vec3 im = j.contains("im") ? vec_from_json(j.at("im"), "state.im") : Vec3::Zero();
    CVec3 a;
    for (int i = 0; i < 3; ++i) a[i] = Complex(re[i], im[i]);
    return SpinState(a, normalize);
}

json to_json(const Pentagram& p) {
    json legs = json::array();
    for (const auto& l : p.legs()) legs.push_back(to_json(l));
    return json{{"legs", std::move(legs)}};
}

Pentagram pentagram_from_json(const json& j, bool normalize) {
    const json& legs = j.at("legs");
    if (!legs.is_array() || legs.size() != 5) throw InvalidInput("pentagram: expected 5 legs");
    for (const auto& l : legs) {
        if (l.is_object()) throw InvalidInput("pentagram: complex legs are not supported");
    }
    return Pentagram({direction_from_json(legs[0], normalize), direction_from_json(legs[1], normalize),
                      direction_from_json(legs[2], normalize), direction_from_json(legs[3], normalize),
                      direction_from_json(legs[4], normalize)});
}

json to_json(const ChainParams& p) { return json{{"l1", to_json(p.l1)}, {"t", {p.t[0], p.t[1], p.t[2]}}}; }

ChainParams chain_from_json(const json& j, bool normalize) {
    const json& t = j.at("t");
    if (!t.is_array() || t.size() != 3) throw InvalidInput("chain: expected three angles in \"t\"");
    return ChainParams{direction_from_json(j.at("l1"), normalize),
                       {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()}};
}

json to_json(const hv::ContextStructure& s) { return json{{"n", s.n()}, {"contexts", s.contexts()}}; }

hv::ContextStructure structure_from_json(const json& j) {
    return hv::ContextStructure(j.at("n").get<int>(), j.at("contexts").get<std::vector<std::vector<int>>>());
}

json to_json(const hv::ExactModel& m) { return model_to_json(m); }
json to_json(const hv::FloatModel& m) { return model_to_json(m); }

hv::ExactModel exact_model_from_json(const json& j) {
    const auto s = structure_from_json(j);
    bool numeric = false;
    for_each_entry(s, j, [&](std::size_t, const json& e) { numeric = numeric || e.is_number(); });
    if (numeric) return hv::to_exact(float_model_from_json(j));
    hv::ExactModel m{s, std::vector<std::vector<mpq_class>>(s.contexts().size())};
    for_each_entry(s, j, [&](std::size_t c, const json& e) { m.tables[c].push_back(parse_rational(e.get<std::string>())); });
    return m;
}

hv::FloatModel float_model_from_json(const json& j) {
    const auto s = structure_from_json(j);
    hv::FloatModel m{s, std::vector<std::vector<double>>(s.contexts().size())};
    for_each_entry(s, j, [&](std::size_t c, const json& e) {
        m.tables[c].push_back(e.is_string() ? parse_rational(e.get<std::string>()).get_d() : e.get<double>());
    });
    return m;
}

json to_json(const hv::RayFunction& r) {
    json j = to_json(r.structure);
    json coeffs = json::object();
    for (std::size_t k = 0; k < r.coeffs.size(); ++k) {
        if (r.coeffs[k] != 0) coeffs[r.structure.monomial_name(k)] = r.coeffs[k];
    }
    j["coeffs"] = std::move(coeffs);
    j["class"] = hv::to_string(r.cls);
    return j;
}

hv::RayFunction ray_from_json(const json& j) {
    const auto s = structure_from_json(j);
    std::vector<mpq_class> coeffs(s.dimension(), mpq_class(0));
    for (const auto& [name, value] : j.at("coeffs").items()) {
        const int k = s.monomial_from_name(name);
        if (k < 0) throw InvalidInput("ray: monomial " + name + " is not in the structure's basis");
        coeffs[k] = value.is_string() ? parse_rational(value.get<std::string>()) : mpq_class(value.get<long>());
    }
    return hv::make_ray(s, coeffs);
}

json to_json(const hv::JointDistribution<mpq_class>& w) { return joint_to_json(w); }
json to_json(const hv::JointDistribution<double>& w) { return joint_to_json(w); }

hv::JointDistribution<mpq_class> exact_joint_from_json(const json& j) {
    hv::JointDistribution<mpq_class> w;
    w.n = j.at("n").get<int>();
    if (w.n < 1 || w.n > hv::kMaxObservables) throw InvalidInput("joint: n out of range");
    w.weights.assign(std::size_t{1} << w.n, mpq_class(0));
    for (const auto& [label, value] : j.at("weights").items()) {
        if (label.size() != static_cast<std::size_t>(w.n)) throw InvalidInput("joint: assignment label of wrong length");
        hv::Mask x = 0;
        for (int i = 0; i < w.n; ++i) {
            if (label[i] == '-') {
                x |= hv::Mask{1} << i;
            } else if (label[i] != '+') {
                throw InvalidInput("joint: assignment labels use '+' and '-'");
            }
        }
        w.weights[x] = value.is_string() ? parse_rational(value.get<std::string>()) : mpq_class(value.get<double>());
    }
    mpq_class total = 0;
    for (const auto& v : w.weights) {
        if (v < 0) throw InvalidInput("joint: negative weight");
        total += v;
    }
    if (total != 1) throw InvalidInput("joint: weights must sum to 1");
    return w;
}

json to_json(const hv::HvCertificate<mpq_class>& c) { return certificate_to_json(c); }
json to_json(const hv::HvCertificate<double>& c) { return certificate_to_json(c); }

json to_json(const search::SearchConfig& c) {
    return json{{"restarts", c.restarts},         {"max_iterations", c.max_iterations}, {"seed", c.seed},
                {"tol", c.tol},                   {"initial_step", c.initial_step},     {"jitter_rounds", c.jitter_rounds}};
}

search::SearchConfig search_config_from_json(const json& j) {
    search::SearchConfig c;
    if (!j.is_object()) throw InvalidInput("config: expected an object");
    c.restarts = j.value("restarts", c.restarts);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.seed = j.value("seed", c.seed);
    c.tol = j.value("tol", c.tol);
    c.initial_step = j.value("initial_step", c.initial_step);
    c.jitter_rounds = j.value("jitter_rounds", c.jitter_rounds);
    search::validate(c);
    return c;
}

json to_json(const search::SearchResult& r) {
    json trace = json::array();
    for (const auto& t : r.trace) trace.push_back({{"restart", t.restart}, {"k", t.k}, {"evaluations", t.evaluations}});
    return json{{"pentagram", to_json(r.pentagram)}, {"k", r.k}, {"violation", r.violation}, {"trace", std::move(trace)}};
}

}  // namespace kcbs::io
