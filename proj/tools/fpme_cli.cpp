#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fpme/app/runner.hpp"
#include "fpme/inequality/battery.hpp"

using namespace fpme;
using namespace fpme::app;

namespace {

int summarize(const EstimateReport& r, const std::filesystem::path& out)
{
    int failed = 0;
    int inconclusive = 0;
    for (const auto& c : r.checks) {
        std::cout << "  " << c.id << ": " << to_string(c.status) << "\n";
        failed += c.status == CheckStatus::fail;
        inconclusive += c.status == CheckStatus::inconclusive;
    }
    std::cout << r.checks.size() << " checks, " << failed << " failed, " << inconclusive << " inconclusive; outputs in "
              << out.string() << "\n";
    return failed ? exit_check_failed : exit_ok;
}

template <class F>
int guarded(F&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return exit_solver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_solver;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fractional porous medium solver and estimate checker"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = "out";
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "solve one configuration and evaluate its checks");
    run->add_option("config", config, "configuration JSON")->required();
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    run->add_option("--jobs", jobs, "worker threads for sub-runs")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "seed for random initial data");

    std::string axis;
    std::string values;
    auto* sweep = app.add_subcommand("sweep", "one sub-run per value along an axis");
    sweep->add_option("config", config, "configuration JSON")->required();
    sweep->add_option("--axis", axis, "delta, kappa1, kappa2, varpi, mass or k_scaling")->required();
    sweep->add_option("--values", values, "comma separated values")->required();
    sweep->add_option("--out", out_dir, "output directory")->capture_default_str();
    sweep->add_option("--jobs", jobs, "worker threads for sub-runs")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed, "seed for random initial data");

    BatteryOptions bopt;
    std::size_t fields = 0;
    bool inject = false;
    std::string verify_out;
    auto* verify = app.add_subcommand("verify-operators", "run the operator inequality battery");
    verify->add_option("--alphas", bopt.alphas, "fractional orders")->delimiter(',')->check(CLI::Range(0.0, 1.0));
    verify->add_option("--fields", fields, "random fields per inequality");
    verify->add_option("--seed", bopt.seed, "ensemble seed");
    verify->add_flag("--inject-fault", inject, "negate the multiplier (sensitivity check)");
    verify->add_option("--out", verify_out, "also write the table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    auto apply_seed = [&](RunConfig& cfg) {
        if (seed) {
            cfg.initial.seed = *seed;
            cfg.forcing.profile.seed = *seed;
        }
    };

    if (*run) {
        return guarded([&] {
            RunConfig cfg = load_config(config);
            apply_seed(cfg);
            const RunOutcome r = execute_run(cfg, jobs);
            write_run_outputs(out_dir, cfg, r);
            return summarize(r.report, out_dir);
        });
    }
    if (*sweep) {
        return guarded([&] {
            RunConfig cfg = load_config(config);
            apply_seed(cfg);
            if (values.empty()) {
                throw InvalidArgument("--values is empty");
            }
            const SweepOutcome s = execute_sweep(cfg, axis, parse_value_list(values), jobs);
            write_sweep_outputs(out_dir, s);
            return summarize(s.report, out_dir);
        });
    }
    return guarded([&] {
        for (double a : bopt.alphas) {
            if (!(a > 0.0 && a < 1.0)) {
                throw InvalidArgument("alphas must lie in (0, 1)");
            }
        }
        if (fields > 0) {
            bopt.cordoba_fields = fields;
            bopt.sv_fields = fields;
        }
        bopt.fault.negate_multiplier = inject;
        const auto rows = run_inequality_battery(bopt);
        std::ostringstream table;
        write_battery_csv(table, rows);
        std::cout << table.str();
        if (!verify_out.empty()) {
            std::ofstream os(verify_out, std::ios::binary);
            os << table.str();
        }
        const bool ok = all_pass(rows);
        std::cout << (ok ? "all operator checks passed" : "operator checks FAILED") << "\n";
        return ok ? exit_ok : exit_check_failed;
    });
}
