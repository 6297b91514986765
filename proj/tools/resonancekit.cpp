#include "resonancekit/resonancekit.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

namespace {

using namespace resonancekit;

struct CommonFlags {
    std::string config;
    std::map<std::string, std::string> overrides;
};

// Only flags that are actually given become overrides of the config file.
void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "key=value config file");
    const char* keys[] = {"omega", "omega0", "g-min", "g-max", "g-steps", "n-max", "levels", "methods", "out"};
    for (const char* key : keys) {
        const std::string name = key;
        cmd->add_option_function<std::string>(
            "--" + name, [&flags, name](const std::string& v) { flags.overrides[name] = v; }, "override " + name);
    }
}

void report_failures(const std::vector<PointFailure>& failures) {
    for (const PointFailure& f : failures) {
        std::fprintf(stderr, "failed: g=%.17g method=%s: %s\n", f.g, to_string(f.method).c_str(), f.message.c_str());
    }
}

int run_sweep_cmd(const CommonFlags& flags) {
    const SweepConfig c = load_config(flags.config, flags.overrides);
    const SweepResult r = run_sweep(c);
    report_failures(r.failures);
    std::printf("wrote %zu rows to %s\n", r.table.rows.size(), c.output_path.c_str());
    return r.ok() ? 0 : 2;
}

int run_compare_cmd(const CommonFlags& flags) {
    const SweepConfig c = load_config(flags.config, flags.overrides);
    const CompareResult r = compare_methods(c);
    report_failures(r.sweep.failures);
    std::printf("levels compared per point: %d\n", r.levels_compared);
    std::printf("%-12s %14s %14s %9s %10s\n", "method", "max_error", "mean_error", "compared", "worst_g");
    for (const MethodError& e : r.errors) {
        std::printf("%-12s %14.6e %14.6e %9d %10.4f\n", to_string(e.method).c_str(), e.max_error, e.mean_error,
                    e.compared, e.worst_g);
    }
    std::printf("wrote %s and %s\n", c.output_path.c_str(), errors_path(c.output_path).c_str());
    return r.sweep.ok() ? 0 : 2;
}

int run_resonances_cmd(const CommonFlags& flags, int n_last) {
    std::map<std::string, std::string> overrides = flags.overrides;
    if (!overrides.count("methods")) {
        overrides["methods"] = "exact";
    }
    const SweepConfig c = load_config(flags.config, overrides);
    const ResonanceReport rep = resonance_report(c, n_last);
    const std::string text = format_resonance_csv(rep);
    write_text(c.output_path, text);
    std::cout << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rabi-model spectra by averaging, KAM and resonant transformations"};
    app.require_subcommand(1);

    CommonFlags sweep_flags;
    CLI::App* sweep = app.add_subcommand("sweep", "write the spectrum of every method over the g grid as CSV");
    add_common(sweep, sweep_flags);

    CommonFlags compare_flags;
    CLI::App* compare = app.add_subcommand("compare", "error of every method against exact diagonalization");
    add_common(compare, compare_flags);

    CommonFlags res_flags;
    int n_last = 6;
    CLI::App* res = app.add_subcommand("resonances", "locate avoided crossings near the nonlinear resonance loci");
    add_common(res, res_flags);
    res->add_option("--n-last", n_last, "highest photon index of the loci")->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            return run_sweep_cmd(sweep_flags);
        }
        if (*compare) {
            return run_compare_cmd(compare_flags);
        }
        return run_resonances_cmd(res_flags, n_last);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
