// homstat: CSV datasets and verification reports for two identical particles
// on a two-site interferometer.
//
// Exit codes: 0 success, 1 verification or I/O failure, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "homstat/commands.hpp"

namespace {

using namespace homstat;
using namespace homstat::cli;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::optional<Statistics> parse_statistics(const std::string& s)
{
    if (s == "boson")
        return Statistics::Boson;
    if (s == "fermion")
        return Statistics::Fermion;
    return std::nullopt; // "both"
}

double parse_real(const std::string& flag, const std::string& text)
{
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size())
        throw UsageError(flag + ": not a number: '" + text + "'");
    return v;
}

// Writes via `emit` to the --out file, or stdout for "" and "-".
int write_output(const std::string& path, const std::function<void(std::ostream&)>& emit)
{
    if (path.empty() || path == "-") {
        emit(std::cout);
        std::cout.flush();
        return std::cout ? 0 : kExitFailure;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        std::cerr << "homstat: cannot open output file '" << path << "'\n";
        return kExitFailure;
    }
    emit(file);
    file.close();
    if (!file) {
        std::cerr << "homstat: failed writing '" << path << "'\n";
        return kExitFailure;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two identical particles: equilibrium coincidence statistics, dephased beam-splitter arrays, separation invariance"};
    app.require_subcommand(1);

    std::string out;
    std::string stats_text = "both";

    SweepConfig sweep;
    std::string grid_text = "log";
    auto* sweep_cmd = app.add_subcommand("sweep", "P(1,1) versus kT/Delta: closed form against truncated partition sums");
    sweep_cmd->add_option("--stats", stats_text, "boson, fermion or both")->check(CLI::IsMember({"boson", "fermion", "both"}));
    sweep_cmd->add_option("--kt-min", sweep.kt_min, "lowest kT/Delta")->capture_default_str();
    sweep_cmd->add_option("--kt-max", sweep.kt_max, "highest kT/Delta")->capture_default_str();
    sweep_cmd->add_option("--points", sweep.points, "grid points")->capture_default_str();
    sweep_cmd->add_option("--grid", grid_text, "log or linear")->check(CLI::IsMember({"log", "linear"}))->capture_default_str();
    sweep_cmd->add_option("--tol", sweep.truncation_tol, "ladder truncation tolerance")->capture_default_str();
    sweep_cmd->add_option("--out", out, "output CSV path (default stdout)");

    ArrayConfig array;
    std::string array_stats = "boson";
    std::string injection_text = "pure";
    std::string beta_text;
    auto* array_cmd = app.add_subcommand("bsarray", "dephased beam-splitter array trajectory");
    array_cmd->add_option("--stats", array_stats, "boson or fermion")->check(CLI::IsMember({"boson", "fermion"}))->capture_default_str();
    array_cmd->add_option("--levels", array.levels, "internal levels L")->capture_default_str();
    array_cmd->add_option("--theta", array.theta, "splitter angle (R = cos^2 theta)")->capture_default_str();
    array_cmd->add_option("--phase", array.phase, "splitter phase")->capture_default_str();
    array_cmd->add_option("--beta-delta", beta_text, "Delta/kT (omit or 'inf' for T = 0)");
    array_cmd->add_option("--injection", injection_text, "pure, product or thermal")
        ->check(CLI::IsMember({"pure", "product", "thermal"}))
        ->capture_default_str();
    array_cmd->add_option("--tol", array.tolerance, "convergence tolerance")->capture_default_str();
    array_cmd->add_option("--max-steps", array.max_steps, "step limit")->capture_default_str();
    array_cmd->add_option("--out", out, "output CSV path (default stdout)");

    VerifyConfig verify;
    auto* verify_cmd = app.add_subcommand("verify", "randomized residual checks of the scattering and partition identities");
    verify_cmd->add_option("--seed", verify.seed, "RNG seed")->capture_default_str();
    verify_cmd->add_option("--draws", verify.draws, "draws per suite")->capture_default_str();
    verify_cmd->add_flag("--corrupt-lift", verify.corrupt_lift, "negative control: inject a stray off-sector element");
    verify_cmd->add_option("--out", out, "report path (default stdout)");

    HomConfig hom;
    auto* hom_cmd = app.add_subcommand("hom", "single-splitter coincidence for one particle per port");
    hom_cmd->add_option("--theta", hom.theta, "splitter angle")->capture_default_str();
    hom_cmd->add_option("--phase", hom.phase, "splitter phase")->capture_default_str();
    hom_cmd->add_option("--stats", stats_text, "boson, fermion or both")->check(CLI::IsMember({"boson", "fermion", "both"}));
    hom_cmd->add_option("--out", out, "output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*sweep_cmd) {
            sweep.statistics = parse_statistics(stats_text);
            sweep.grid = grid_text == "log" ? Grid::Log : Grid::Linear;
            const auto rows = run_sweep(sweep);
            return write_output(out, [&](std::ostream& os) { write_sweep_csv(os, sweep, rows); });
        }
        if (*array_cmd) {
            array.statistics = array_stats == "boson" ? Statistics::Boson : Statistics::Fermion;
            array.injection = injection_text == "pure" ? Injection::Pure : injection_text == "product" ? Injection::Product : Injection::Thermal;
            if (!beta_text.empty() && beta_text != "inf")
                array.beta_delta = parse_real("--beta-delta", beta_text);
            const auto traj = run_bsarray(array);
            if (!traj.converged)
                std::cerr << "homstat: warning: not converged: " << traj.diagnostic << '\n';
            return write_output(out, [&](std::ostream& os) { write_bsarray_csv(os, array, traj); });
        }
        if (*verify_cmd) {
            const auto suites = run_verify(verify);
            std::cerr << "homstat: verify seed=" << verify.seed << '\n';
            const int rc = write_output(out, [&](std::ostream& os) { write_verify_report(os, verify, suites); });
            if (rc != 0)
                return rc;
            return all_passed(suites) ? 0 : kExitFailure;
        }
        if (*hom_cmd) {
            hom.statistics = parse_statistics(stats_text);
            const auto rows = run_hom(hom);
            return write_output(out, [&](std::ostream& os) { write_hom_csv(os, hom, rows); });
        }
    } catch (const UsageError& e) {
        std::cerr << "homstat: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "homstat: error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
