// decomc - canonical vs microcanonical qubit decoherence in oscillator baths.
//
// Subcommands:
//   thermal  - canonical Q_R / Q_I and |C| over the time grid
//   micro    - microcanonical coherence (contour / saddle / ohmic closed form)
//   compare  - both, with the |C_micro - C_thermal| gap per row
//   oracle   - exact Fock-space validation of the contour route (exit 3 on
//              disagreement beyond numerics.oracle_rtol)
//   sweep    - repeat over a [sweep] variable grid (beta, E or M)
//   neff     - populated-mode estimate k_B T L / (pi hbar c) for a line
//
// Exit codes: 0 success, 1 configuration error, 2 numerical non-convergence,
// 3 oracle mismatch.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "decomc/decomc.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_override;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "scenario config file (schema v1)")
        ->required();
    cmd->add_option("--set", args.overrides,
                    "override a config key, e.g. --set drive.omega_r=100");
    cmd->add_option("--out", args.out_override, "override [output] path");
}

int run(decomc::Command command, const CommonArgs& args) {
    auto cfg = decomc::ConfigText::load(args.config_path);
    for (const auto& o : args.overrides) cfg.apply_override(o);
    auto sc = decomc::build_scenario(cfg);
    if (!args.out_override.empty()) sc.output_path = args.out_override;

    const auto result = decomc::run_scenario(sc, command);
    decomc::write_table(sc, command, result);
    std::cout << "wrote " << sc.output_path << " (" << result.rows.size() << " rows)\n";

    bool any_failed = false;
    for (const auto& r : result.rows) {
        if (!r.error.empty()) {
            std::cerr << "row t=" << r.t << " failed: " << r.error << "\n";
            any_failed = true;
        }
    }
    if (command == decomc::Command::Oracle) {
        std::cout << "oracle worst relative deviation: " << result.worst_oracle_dev
                  << " (tolerance " << sc.numerics.oracle_rtol << ")\n";
        if (any_failed) return 2;          // validation did not complete
        if (!result.oracle_ok) return 3;   // completed and disagreed
    }
    if (any_failed) return 2;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decomc - qubit decoherence from canonical and microcanonical oscillator baths"};
    app.set_version_flag("--version", std::string("decomc ") + decomc::kVersion);
    app.require_subcommand(1);

    CommonArgs thermal_args, micro_args, compare_args, oracle_args, sweep_args;
    auto* thermal = app.add_subcommand("thermal", "canonical decoherence over the t grid");
    add_common(thermal, thermal_args);
    auto* micro = app.add_subcommand("micro", "microcanonical coherence over the t grid");
    add_common(micro, micro_args);
    auto* compare = app.add_subcommand("compare", "canonical vs microcanonical per row");
    add_common(compare, compare_args);
    auto* oracle = app.add_subcommand("oracle", "validate the contour against the Fock oracle");
    add_common(oracle, oracle_args);
    auto* sweep = app.add_subcommand("sweep", "sweep a [sweep] variable grid");
    add_common(sweep, sweep_args);

    double neff_L = 0.0, neff_T = 0.0;
    auto* neff = app.add_subcommand("neff", "populated-mode estimate for a transmission line");
    neff->add_option("--L", neff_L, "line length in meters")->required();
    neff->add_option("--T", neff_T, "temperature in kelvin")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (neff->parsed()) {
            const double v = decomc::n_eff_si(neff_L, neff_T);
            std::printf("N_eff = %.4g  (k_B T L / (pi hbar c), order-of-magnitude estimate)\n", v);
            return 0;
        }
        if (thermal->parsed()) return run(decomc::Command::Thermal, thermal_args);
        if (micro->parsed()) return run(decomc::Command::Micro, micro_args);
        if (compare->parsed()) return run(decomc::Command::Compare, compare_args);
        if (oracle->parsed()) return run(decomc::Command::Oracle, oracle_args);
        if (sweep->parsed()) return run(decomc::Command::Sweep, sweep_args);
    } catch (const decomc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const decomc::NonConvergence& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 2;
    } catch (const decomc::QuadratureFailure& e) {
        std::cerr << "quadrature failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
