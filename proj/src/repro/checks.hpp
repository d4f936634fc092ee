#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kcbs/hv.hpp"

namespace kcbs::repro::detail {

/// Extremal rays of a built-in structure, enumerated once per process.
const std::vector<hv::RayFunction>& cached_rays(const hv::ContextStructure& s);

struct DualityStats {
    int models = 0;
    int feasible = 0;
    int infeasible = 0;
    int disagreements = 0;
    int bad_certificates = 0;
    std::string first_problem;
};

/// Random exact models on pentagram5 and chsh: point-mass mixtures, rational
/// leg-probability models, scaled axis-state models and correlation models.
/// Compares the LP verdict with the nontrivial-ray oracle and checks every
/// certificate independently.
DualityStats duality_run(int count, std::uint64_t seed);

}  // namespace kcbs::repro::detail
