#include "jetrope/synthetic_tasks.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "jetrope/features.hpp"

namespace jetrope {

double TeacherKernel::operator()(double d) const {
    switch (kind) {
    case KernelKind::FirstJet: return mixed_target(d, omega, length);
    case KernelKind::SecondJet: return scaled_jet_target(d, 2, omega, length, damping);
    case KernelKind::ThirdJet: return scaled_jet_target(d, 3, omega, length, damping);
    }
    return 0.0;
}

const char* kernel_name(KernelKind kind) {
    switch (kind) {
    case KernelKind::FirstJet: return "first_jet";
    case KernelKind::SecondJet: return "second_jet";
    case KernelKind::ThirdJet: return "third_jet";
    }
    return "unknown";
}

KernelKind parse_kernel(const std::string& name) {
    for (KernelKind k : {KernelKind::FirstJet, KernelKind::SecondJet, KernelKind::ThirdJet}) {
        if (name == kernel_name(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown kernel: " + name);
}

QuerySequence generate(const TeacherKernel& kernel, int length, std::uint64_t seed) {
    if (length < 2) {
        throw std::invalid_argument("sequence length must be at least 2");
    }
    QuerySequence seq;
    seq.seed = seed;
    seq.bits.resize(static_cast<std::size_t>(length - 1));
    std::mt19937_64 rng(seed);
    // Fused draw and accumulation; the oracle recomputes the sum separately.
    double sum = 0.0;
    for (int j = 0; j < length - 1; ++j) {
        const int bit = (rng() >> 63) ? 1 : -1;
        seq.bits[static_cast<std::size_t>(j)] = bit;
        sum += kernel(static_cast<double>(length - 1 - j)) * bit;
    }
    seq.tie = std::abs(sum) < kTieThreshold;
    seq.label = seq.tie || sum > 0.0 ? 1 : -1;
    return seq;
}

double weighted_sum(const std::vector<int>& bits, const TeacherKernel& kernel) {
    // Bit j sits at position j + 1 and the query at position bits.size() + 1.
    const std::size_t query = bits.size() + 1;
    double sum = 0.0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
        const double lag = static_cast<double>(query - (j + 1));
        sum += kernel(lag) * bits[j];
    }
    return sum;
}

int oracle_label(const std::vector<int>& bits, const TeacherKernel& kernel) {
    const double sum = weighted_sum(bits, kernel);
    return std::abs(sum) < kTieThreshold || sum > 0.0 ? 1 : -1;
}

std::string export_line(const QuerySequence& seq) {
    std::string out = std::to_string(seq.seed) + "," + std::to_string(seq.bits.size() + 1) + "," +
                      std::to_string(seq.label) + ",";
    out.reserve(out.size() + seq.bits.size());
    for (int b : seq.bits) {
        out.push_back(b > 0 ? '1' : '0');
    }
    return out;
}

} // namespace jetrope
