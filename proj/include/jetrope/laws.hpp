#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace jetrope {

/// Outcome of one randomized invariant check. `worst` is the largest error
/// seen (or, for lower-bound checks, the smallest margin value).
struct LawResult {
    std::string name;
    int draws = 0;
    int failures = 0;
    double worst = 0.0;
    double tolerance = 0.0;
    /// Failures allowed before the law is considered broken.
    int allowed_failures = 0;

    bool passed() const { return draws > 0 && failures <= allowed_failures; }
};

/// Portable uniform draw in [lo, hi) from a 64-bit engine output.
double uniform_from_bits(std::uint64_t bits, double lo, double hi);

// Each check is seed-deterministic.
LawResult check_exact_group_law(std::uint64_t seed, int draws = 1000);
LawResult check_stabilized_group_defect(std::uint64_t seed, int draws = 1000);
LawResult check_scaled_score(std::uint64_t seed, int draws = 500);
LawResult check_raw_score(std::uint64_t seed, int draws = 500);
LawResult check_shift_invariance(std::uint64_t seed, int draws = 500);
LawResult check_center_invariance(std::uint64_t seed, int draws = 200);
LawResult check_scalar_factor();
LawResult check_stabilized_nonpurity(std::uint64_t seed, int draws = 200);
LawResult check_sigma_obstruction();
LawResult check_frequency_jet(std::uint64_t seed, int order, int draws = 100);
LawResult check_coefficient_map(std::uint64_t seed, int draws = 200);

/// Every check above in a fixed order.
std::vector<LawResult> run_all_laws(std::uint64_t seed);

} // namespace jetrope
