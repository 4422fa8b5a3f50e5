#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "jetrope/probes.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Run operator law checks and fixed-basis probe suites."};
    std::string suite;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::vector<std::string> methods;
    app.add_option("suite", suite, "laws | basis_mixed | structured | high_jet | matched_jet | norms | taskgen")
        ->required();
    app.add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory")->required();
    auto* seed_opt = app.add_option("--seed", seed, "overrides run.seed");
    app.add_option("--methods", methods, "comma separated method list")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    try {
        jetrope::SuiteConfig config = jetrope::config_load(config_path);
        config.suite = jetrope::parse_suite(suite);
        config.out_dir = out_dir;
        if (*seed_opt) {
            config.seed = seed;
        }
        if (!methods.empty()) {
            config.methods = methods;
        }
        const jetrope::RunResult result = jetrope::run(config);
        for (const auto& f : result.files) {
            std::printf("wrote %s\n", f.string().c_str());
        }
        return result.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "jetrope: %s\n", e.what());
        return 2;
    }
}
