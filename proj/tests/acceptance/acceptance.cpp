// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracle.hpp"
#include "jetrope/features.hpp"
#include "jetrope/laws.hpp"
#include "jetrope/probes.hpp"
#include "jetrope/synthetic_tasks.hpp"

using namespace jetrope;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Report {
public:
    void run(int id, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out = body();
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (budget_seconds > 0.0 && seconds >= budget_seconds) {
            out.pass = false;
            out.detail += "; over time budget";
        }
        std::printf("[%s] %2d %s (%.2fs): %s\n", out.pass ? "PASS" : "FAIL", id, title, seconds, out.detail.c_str());
        std::fflush(stdout);
        failed_ += out.pass ? 0 : 1;
    }
    int failed() const { return failed_; }

private:
    int failed_ = 0;
};

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string law_detail(const LawResult& r) {
    return r.name + " " + std::to_string(r.draws - r.failures) + "/" + std::to_string(r.draws) + " worst " +
           fmt("%.3g", r.worst);
}

Outcome from_laws(std::initializer_list<LawResult> laws) {
    Outcome out;
    for (const auto& l : laws) {
        out.pass = out.pass && l.passed();
        out.detail += (out.detail.empty() ? "" : "; ") + law_detail(l);
    }
    return out;
}

const LagGrid& grid() {
    static const LagGrid g = LagGrid::integers(8192, 1024);
    return g;
}

FitResult fit(const std::string& method, const std::string& target) {
    static const auto catalogue = evaluate_targets();
    const Method m = Method::parse(method);
    const double lambda = m.kind == MethodKind::RawJordan ? 1e-4 : 1e-8;
    return fit_readout(build_bank(m, BankConfig{}, grid()), find_target(catalogue, target), lambda);
}

Outcome expm_oracle() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int bad = 0;
    const int draws = 500;
    for (int n = 0; n < draws; ++n) {
        const int m = 1 + static_cast<int>(rng() % 4);
        const auto gen = n % 2 ? JordanGenerator::raw(0.2 * u(rng), std::numbers::pi * (2.0 * u(rng) - 1.0),
                                                      2.0 * u(rng) - 1.0, m)
                               : JordanGenerator::scaled(2.0 * u(rng), 1024.0, std::numbers::pi * (2.0 * u(rng) - 1.0),
                                                         2.0 * u(rng) - 1.0, m);
        // Pick d so that |d J|_F is uniform on [0, 20].
        const double d = 20.0 * u(rng) / oracle::generator(gen).norm();
        const oracle::CMat ref = oracle::expm(gen, d);
        const double err = (oracle::to_eigen(relative_operator(gen, d).matrix) - ref).norm() / ref.norm();
        worst = std::max(worst, err);
        bad += err < 1e-9 ? 0 : 1;
    }
    return {bad == 0, std::to_string(draws - bad) + "/" + std::to_string(draws) + " worst rel " + fmt("%.3g", worst)};
}

Outcome jet_reproduction() {
    struct Row {
        const char* method;
        const char* target;
        bool at_least;
        double bound;
    };
    const Row rows[] = {
        {"scaled_exact_m3_c0.1", "jet2", true, 0.9999},  {"scaled_exact_m2_c0.1", "jet2", false, 0.5},
        {"scaled_exact_m4_c0.1", "jet3", true, 0.999},   {"scaled_exact_m3_c0.1", "jet3", false, 0.6},
        {"scaled_exact_m2_c0.1", "jet1", true, 0.9999},
    };
    Outcome out;
    for (const auto& r : rows) {
        const double r2 = fit(r.method, r.target).r_squared;
        const bool ok = r.at_least ? r2 >= r.bound : r2 <= r.bound;
        out.pass = out.pass && ok;
        out.detail += std::string(out.detail.empty() ? "" : "; ") + r.method + "/" + r.target + " R2 " +
                      fmt("%.4f", r2) + (ok ? "" : " (out of bound)");
    }
    for (const char* target : {"jet2", "jet3"}) {
        double best = -INFINITY;
        for (const char* control : {"rope", "rope_alibi", "direct_sum", "direct_sum_p3"}) {
            best = std::max(best, fit(control, target).r_squared);
        }
        out.pass = out.pass && best <= 0.5;
        out.detail += std::string("; best control/") + target + " R2 " + fmt("%.4g", best);
    }
    return out;
}

Outcome mixed_ordering() {
    const double rope_phase = fit("rope", "phase").eval_mse;
    const double alibi_linear = fit("alibi", "linear").eval_mse;
    const double raw = fit("raw_jordan", "mixed").eval_mse;
    const double scaled_c1 = fit("scaled_exact_m2_c1", "mixed").eval_mse;
    const double rope = fit("rope", "mixed").eval_mse;
    const double stab = fit("stabilized_jordan", "mixed").eval_mse;
    Outcome out;
    out.pass = rope_phase < 1e-8 && alibi_linear < 1e-8 && raw < scaled_c1 && raw < 0.5 * rope && stab < rope;
    out.detail = "rope phase " + fmt("%.3g", rope_phase) + ", alibi linear " + fmt("%.3g", alibi_linear) +
                 ", mixed: raw " + fmt("%.4g", raw) + " scaled(c=1) " + fmt("%.4g", scaled_c1) + " rope " +
                 fmt("%.4g", rope) + " stabilized " + fmt("%.4g", stab);
    return out;
}

Outcome structured_winners() {
    Outcome out;
    for (const char* target : {"damped_wave", "rhythm_envelope"}) {
        std::string best;
        double best_mse = INFINITY;
        double raw_mse = NAN;
        for (const auto& method : default_methods(Suite::Structured)) {
            const double mse = fit(method, target).eval_mse;
            if (method == "raw_jordan") {
                raw_mse = mse;
            }
            if (mse < best_mse) {
                best_mse = mse;
                best = method;
            }
        }
        const bool ok = best == "raw_jordan";
        out.pass = out.pass && ok;
        out.detail += std::string(out.detail.empty() ? "" : "; ") + target + ": best " + best + " " +
                      fmt("%.3g", best_mse) + ", raw_jordan " + fmt("%.3g", raw_mse);
    }
    return out;
}

Outcome synthetic_contract() {
    int mismatches = 0;
    int total = 0;
    for (KernelKind kind : {KernelKind::FirstJet, KernelKind::SecondJet, KernelKind::ThirdJet}) {
        TeacherKernel kernel;
        kernel.kind = kind;
        for (int length : {256, 1024}) {
            for (std::uint64_t seed = 0; seed < 10000; ++seed) {
                const auto seq = generate(kernel, length, seed);
                mismatches += oracle_label(seq.bits, kernel) == seq.label ? 0 : 1;
                ++total;
            }
        }
    }
    const auto targets = evaluate_targets();
    TeacherKernel first, second, third;
    second.kind = KernelKind::SecondJet;
    third.kind = KernelKind::ThirdJet;
    double formula_gap = 0.0;
    for (double d = 0.0; d < 8192.0; d += 1.0) {
        formula_gap = std::max({formula_gap, std::abs(first(d) - find_target(targets, "mixed").y(d)),
                                std::abs(second(d) - find_target(targets, "jet2").y(d)),
                                std::abs(third(d) - find_target(targets, "jet3").y(d))});
    }
    return {mismatches == 0 && formula_gap <= 1e-14,
            std::to_string(total - mismatches) + "/" + std::to_string(total) + " labels agree, formula gap " +
                fmt("%.3g", formula_gap)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / "jetrope_acceptance";
    std::filesystem::remove_all(root);
    Outcome out;
    int identical = 0;
    const Suite suites[] = {Suite::Laws,      Suite::BasisMixed, Suite::Structured, Suite::HighJet,
                            Suite::MatchedJet, Suite::Norms,     Suite::Taskgen};
    for (Suite s : suites) {
        std::string csv[2];
        for (int pass = 0; pass < 2; ++pass) {
            SuiteConfig c;
            c.suite = s;
            c.seed = 7;
            c.out_dir = root / (std::string(suite_name(s)) + "_" + std::to_string(pass));
            run(c);
            csv[pass] = slurp(c.out_dir / (std::string(suite_name(s)) + ".csv"));
        }
        const bool same = !csv[0].empty() && csv[0] == csv[1];
        identical += same ? 1 : 0;
        if (!same) {
            out.pass = false;
            out.detail += std::string(suite_name(s)) + " differs; ";
        }
    }
    out.detail += std::to_string(identical) + "/7 suite CSVs byte-identical";
    std::filesystem::remove_all(root);
    return out;
}

} // namespace

int main() {
    Report report;
    report.run(1, "representation law", 5.0, [] {
        return from_laws({check_exact_group_law(1), check_stabilized_group_defect(2)});
    });
    report.run(2, "closed form vs expm oracle", 5.0, expm_oracle);
    report.run(3, "contragredient score identity", 10.0, [] {
        return from_laws({check_scaled_score(3), check_raw_score(4), check_shift_invariance(5)});
    });
    report.run(4, "centered factorization", 0.0, [] {
        return from_laws({check_center_invariance(6), check_scalar_factor()});
    });
    report.run(5, "frequency jets", 0.0, [] {
        return from_laws({check_frequency_jet(7, 1), check_frequency_jet(8, 2), check_coefficient_map(9)});
    });
    report.run(6, "high-jet minimal order", 60.0, jet_reproduction);
    report.run(7, "mixed-target ordering", 0.0, mixed_ordering);
    report.run(8, "structured probe winners", 0.0, structured_winners);
    report.run(9, "synthetic task contract", 0.0, synthetic_contract);
    report.run(10, "suite determinism", 0.0, determinism);
    std::printf("%d of 10 criteria passed\n", 10 - report.failed());
    return report.failed() == 0 ? 0 : 1;
}
