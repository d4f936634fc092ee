#pragma once

// JSON wire formats.
//
//   Direction      [x, y, z]
//   SpinState      {"re": [r1, r2, r3], "im": [i1, i2, i3]}
//   Pentagram      {"legs": [[x, y, z] x 5]}
//   ChainParams    {"l1": [x, y, z], "t": [t1, t2, t3]}
//   Structure      {"n": 5, "contexts": [[0, 1], ...]}
//   MarginalModel  structure fields plus
//                  {"tables": {"0": {"--": "0", "-+": "p/q", ...}, ...}}
//                  rationals as "p/q" strings (exact), doubles as numbers
//   RayFunction    structure fields plus
//                  {"coeffs": {"1": 3, "a0a1": 1, ...}, "class": "nontrivial"}
//   Joint          {"n": 5, "weights": {"+-+--": "1/2", ...}}  (nonzero entries;
//                  the i-th sign is a_i)

#include <string>

#include <json.hpp>

#include "kcbs/hv.hpp"
#include "kcbs/pentagram.hpp"
#include "kcbs/search.hpp"
#include "kcbs/spin.hpp"

namespace kcbs::io {

using nlohmann::json;

/// Parses "p/q", "p", or a decimal string such as "0.25" exactly.
mpq_class parse_rational(const std::string& s);
std::string format_rational(const mpq_class& q);

json to_json(const Direction& d);
Direction direction_from_json(const json& j, bool normalize = false);

json to_json(const SpinState& s);
SpinState state_from_json(const json& j, bool normalize = false);

json to_json(const Pentagram& p);
Pentagram pentagram_from_json(const json& j, bool normalize = false);

json to_json(const ChainParams& p);
ChainParams chain_from_json(const json& j, bool normalize = false);

json to_json(const hv::ContextStructure& s);
hv::ContextStructure structure_from_json(const json& j);

json to_json(const hv::ExactModel& m);
json to_json(const hv::FloatModel& m);
/// Numeric entries are taken as doubles and converted with hv::to_exact.
hv::ExactModel exact_model_from_json(const json& j);
hv::FloatModel float_model_from_json(const json& j);

json to_json(const hv::RayFunction& r);
hv::RayFunction ray_from_json(const json& j);

json to_json(const hv::JointDistribution<mpq_class>& w);
json to_json(const hv::JointDistribution<double>& w);
hv::JointDistribution<mpq_class> exact_joint_from_json(const json& j);

json to_json(const hv::HvCertificate<mpq_class>& c);
json to_json(const hv::HvCertificate<double>& c);

json to_json(const search::SearchConfig& c);
search::SearchConfig search_config_from_json(const json& j);
json to_json(const search::SearchResult& r);

}  // namespace kcbs::io
