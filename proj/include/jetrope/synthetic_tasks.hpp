#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace jetrope {

enum class KernelKind { FirstJet, SecondJet, ThirdJet };

/// Weighting of past bits by lag. FirstJet is (d/L)cos(omega d); the others
/// are the damped scaled jets x^r e^{-damping x} cos(omega d), x = d/L.
struct TeacherKernel {
    KernelKind kind = KernelKind::FirstJet;
    double length = 1024.0;
    double omega = 0.05;
    double damping = 0.1;

    double operator()(double d) const;
};

const char* kernel_name(KernelKind kind);
KernelKind parse_kernel(const std::string& name);

/// Weighted sums below this magnitude count as ties and are labelled +1.
inline constexpr double kTieThreshold = 1e-12;

struct QuerySequence {
    std::vector<int> bits; ///< positions 1..T-1, entries in {-1, +1}; the query sits at T
    int label = 1;
    bool tie = false;
    std::uint64_t seed = 0;
};

/// Draws T-1 bits from std::mt19937_64 seeded with `seed` (one draw per bit,
/// the top bit of the 64-bit output selects +1) and labels the query at T.
QuerySequence generate(const TeacherKernel& kernel, int length, std::uint64_t seed);

/// Straightforward recomputation of the label from the bits alone.
int oracle_label(const std::vector<int>& bits, const TeacherKernel& kernel);

/// Signed kernel-weighted sum that the label is the sign of.
double weighted_sum(const std::vector<int>& bits, const TeacherKernel& kernel);

/// "seed,T,label,bitstring" with '1' for +1 and '0' for -1.
std::string export_line(const QuerySequence& seq);

} // namespace jetrope
