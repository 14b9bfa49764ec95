#ifndef HOMSTAT_COMMANDS_HPP
#define HOMSTAT_COMMANDS_HPP

// Subcommand bodies for the homstat tool: configuration, evaluation and
// CSV/report formatting. Argument parsing lives in tools/homstat.cpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "homstat/dephasing_dynamics.hpp"
#include "homstat/fock_basis.hpp"
#include "homstat/scattering.hpp"
#include "homstat/spectrum.hpp"
#include "homstat/thermal_equilibrium.hpp"

namespace homstat::cli {

/// Invalid flag values; the tool maps this to exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// 12 significant digits, locale independent.
inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

// Runs fn(i) for i in [0, n) on a few threads; fn must only write slot i.
template <typename Fn>
void parallel_for(std::size_t n, Fn fn)
{
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([=, &fn] {
            for (std::size_t i = w; i < n; i += workers)
                fn(i);
        });
}

inline std::vector<Statistics> selected(const std::optional<Statistics>& s)
{
    if (s)
        return {*s};
    return {Statistics::Boson, Statistics::Fermion};
}

} // namespace detail

// ---------------------------------------------------------------- sweep

enum class Grid { Log, Linear };

struct SweepConfig {
    std::optional<Statistics> statistics; // both when unset
    double kt_min = 0.01;
    double kt_max = 10.0;
    int points = 200;
    Grid grid = Grid::Log;
    double truncation_tol = 1e-12;

    void validate() const
    {
        if (!(kt_min > 0.0) || !(kt_max > 0.0) || !std::isfinite(kt_min) || !std::isfinite(kt_max))
            throw UsageError("kT/Delta bounds must be positive and finite");
        if (points < 1)
            throw UsageError("--points must be >= 1");
        if (points == 1 && kt_min != kt_max)
            throw UsageError("a single-point sweep needs --kt-min equal to --kt-max");
        if (points >= 2 && !(kt_min < kt_max))
            throw UsageError("--kt-min must be smaller than --kt-max");
        if (!(truncation_tol > 0.0 && truncation_tol < 1.0))
            throw UsageError("--tol must lie in (0, 1)");
    }
};

struct SweepRow {
    Statistics statistics = Statistics::Boson;
    double kt_over_delta = 0.0;
    double p11_analytic = 0.0;
    double p11_numeric = 0.0;
    int truncation_levels = 0;
    double abs_err = 0.0;
};

inline std::vector<double> temperature_grid(const SweepConfig& config)
{
    const int n = config.points;
    std::vector<double> kt(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        kt[static_cast<std::size_t>(i)] = config.grid == Grid::Log
            ? std::exp(std::log(config.kt_min) + f * (std::log(config.kt_max) - std::log(config.kt_min)))
            : config.kt_min + f * (config.kt_max - config.kt_min);
    }
    kt.front() = config.kt_min;
    kt.back() = config.kt_max;
    return kt;
}

/// Rows in (statistics, grid) order; grid points are evaluated concurrently.
inline std::vector<SweepRow> run_sweep(const SweepConfig& config)
{
    config.validate();
    const auto kts = temperature_grid(config);
    const auto stats = detail::selected(config.statistics);
    std::vector<SweepRow> rows(stats.size() * kts.size());
    detail::parallel_for(rows.size(), [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.statistics = stats[i / kts.size()];
        row.kt_over_delta = kts[i % kts.size()];
        const double beta_delta = 1.0 / row.kt_over_delta;
        row.truncation_levels = required_truncation(beta_delta, config.truncation_tol);
        const auto spectrum = LevelSpectrum::equally_spaced(static_cast<std::size_t>(row.truncation_levels));
        row.p11_analytic = p11_analytic(beta_delta, row.statistics);
        row.p11_numeric = p11_numeric(spectrum, Beta(beta_delta), row.statistics);
        row.abs_err = std::abs(row.p11_numeric - row.p11_analytic);
    });
    return rows;
}

inline void write_sweep_csv(std::ostream& os, const SweepConfig& config, const std::vector<SweepRow>& rows)
{
    os << "# homstat sweep: two-particle coincidence probability P(1,1) versus kT/Delta\n"
       << "# p11_analytic: closed form for the infinite equally spaced ladder; p11_numeric: partition sums truncated at truncation_L levels\n"
       << "# grid=" << (config.grid == Grid::Log ? "log" : "linear") << " points=" << config.points
       << " kt_min=" << format_number(config.kt_min) << " kt_max=" << format_number(config.kt_max)
       << " truncation_tol=" << format_number(config.truncation_tol) << '\n'
       << "statistics,kt_over_delta,p11_analytic,p11_numeric,truncation_L,abs_err\n";
    for (const auto& r : rows)
        os << to_string(r.statistics) << ',' << format_number(r.kt_over_delta) << ',' << format_number(r.p11_analytic) << ','
           << format_number(r.p11_numeric) << ',' << r.truncation_levels << ',' << format_number(r.abs_err) << '\n';
}

// -------------------------------------------------------------- bsarray

enum class Injection { Pure, Product, Thermal };

inline std::string_view to_string(Injection i)
{
    switch (i) {
    case Injection::Pure: return "pure";
    case Injection::Product: return "product";
    case Injection::Thermal: return "thermal";
    }
    return "";
}

struct ArrayConfig {
    Statistics statistics = Statistics::Boson;
    int levels = 1;
    double theta = std::numbers::pi / 4;
    double phase = 0.0;
    std::optional<double> beta_delta; // zero temperature when unset
    Injection injection = Injection::Pure;
    int max_steps = 10000;
    double tolerance = 1e-12;

    void validate() const
    {
        if (levels < 1 || levels > kMaxMatrixLevels)
            throw UsageError("--levels must lie in [1, " + std::to_string(kMaxMatrixLevels) + "]");
        if (!(tolerance > 0.0))
            throw UsageError("--tol must be positive");
        if (max_steps < 1)
            throw UsageError("--max-steps must be >= 1");
        if (beta_delta && (std::isnan(*beta_delta) || *beta_delta < 0.0))
            throw UsageError("--beta-delta must be non-negative");
        if (!std::isfinite(theta) || !std::isfinite(phase))
            throw UsageError("--theta and --phase must be finite");
    }

    Beta beta() const { return beta_delta ? Beta(*beta_delta) : Beta::zero_temperature(); }
};

/// Injected state for the array. Pure: both particles in the ground level,
/// one per port. Product: independent Boltzmann levels per port. Thermal:
/// Gibbs weight of each level sector placed on its coincidence states.
inline DensityMatrix initial_state(const ArrayConfig& config, const TwoParticleBasis& basis, const LevelSpectrum& spectrum)
{
    switch (config.injection) {
    case Injection::Pure:
        return DensityMatrix::basis_state(basis, *basis.index_of(Mode{Site::P, 0}, Mode{Site::Q, 0}));
    case Injection::Product:
        return product_injection_matrix(basis, spectrum, config.beta());
    case Injection::Thermal:
        return thermal_sector_injection_matrix(basis, spectrum, config.beta());
    }
    throw std::logic_error("unknown injection");
}

inline Trajectory run_bsarray(const ArrayConfig& config)
{
    config.validate();
    const auto basis = build_basis(config.statistics, config.levels);
    const auto spectrum = LevelSpectrum::equally_spaced(static_cast<std::size_t>(config.levels));
    const auto u = lift_two_particle(make_beam_splitter(config.theta, config.phase), basis);
    return iterate_to_equilibrium(initial_state(config, basis, spectrum), u, IterationOptions{config.max_steps, config.tolerance});
}

inline void write_bsarray_csv(std::ostream& os, const ArrayConfig& config, const Trajectory& traj)
{
    const bool sector_columns = config.statistics == Statistics::Boson && config.levels == 1;
    const auto splitter = make_beam_splitter(config.theta, config.phase);
    os << "# homstat bsarray: beam-splitter array with full dephasing after every splitter\n"
       << "# statistics=" << to_string(config.statistics) << " levels=" << config.levels
       << " theta=" << format_number(config.theta) << " phase=" << format_number(config.phase)
       << " R=" << format_number(splitter.reflectance()) << " T=" << format_number(splitter.transmittance())
       << " beta_delta=" << format_number(config.beta_delta.value_or(std::numeric_limits<double>::infinity()))
       << " injection=" << to_string(config.injection) << " tol=" << format_number(config.tolerance)
       << " max_steps=" << config.max_steps << '\n'
       << "step,p11,entropy,max_delta" << (sector_columns ? ",a,b,c" : "") << '\n';
    for (const auto& r : traj.records) {
        os << r.step << ',' << format_number(r.p11) << ',' << format_number(r.entropy) << ',' << format_number(r.max_delta);
        if (sector_columns) // pp, pq, qq -> a, c, b
            os << ',' << format_number(r.populations[0]) << ',' << format_number(r.populations[2]) << ',' << format_number(r.populations[1]);
        os << '\n';
    }
    os << "# converged=" << (traj.converged ? "true" : "false") << " steps_to_converge=" << traj.steps_to_converge << '\n';
}

// --------------------------------------------------------------- verify

struct VerifyConfig {
    std::uint64_t seed = 42;
    int draws = 100;
    bool corrupt_lift = false; // negative control: every checked lift gets one stray entry

    void validate() const
    {
        if (draws < 1)
            throw UsageError("--draws must be >= 1");
    }
};

inline constexpr double kVerifyThreshold = 1e-10;

struct SuiteResult {
    std::string name;
    int draws = 0;
    double max_residual = 0.0;
    std::string worst_draw; // parameters of the draw that produced max_residual
    bool passed() const { return max_residual <= kVerifyThreshold; }
};

namespace detail {

struct DrawSampler {
    std::mt19937_64 rng;

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    Statistics statistics() { return integer(0, 1) == 0 ? Statistics::Boson : Statistics::Fermion; }
    double angle() { return uniform(0.0, 2.0 * std::numbers::pi); }

    // Half equally spaced, half sorted random (unequal) ladders.
    LevelSpectrum spectrum(int levels)
    {
        if (integer(0, 1) == 0)
            return LevelSpectrum::equally_spaced(static_cast<std::size_t>(levels), uniform(0.1, 2.0));
        std::vector<double> e(static_cast<std::size_t>(levels));
        for (double& x : e)
            x = uniform(0.0, 3.0);
        std::sort(e.begin(), e.end());
        return LevelSpectrum(std::move(e));
    }
};

inline std::string describe(const LevelSpectrum& s)
{
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i)
        out += (i ? " " : "") + format_number(s[i]);
    return out + "]";
}

inline void record(SuiteResult& suite, double residual, const std::string& params)
{
    if (std::isnan(residual) || residual > suite.max_residual || suite.worst_draw.empty()) {
        suite.max_residual = std::isnan(residual) ? std::numeric_limits<double>::infinity() : std::max(suite.max_residual, residual);
        suite.worst_draw = params;
    }
}

inline TwoParticleUnitary checked_lift(const BeamSplitter& s, const TwoParticleBasis& basis, bool corrupt)
{
    auto u = lift_two_particle(s, basis);
    if (!corrupt)
        return u;
    // couple the ground coincidence state to the first excited one
    const auto row = *basis.index_of(Mode{Site::P, 0}, Mode{Site::Q, 0});
    const auto col = *basis.index_of(Mode{Site::P, 1}, Mode{Site::Q, 1});
    return u.with_entry(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), 0.1);
}

} // namespace detail

/// Randomized property suites; every residual must stay below 1e-10.
inline std::vector<SuiteResult> run_verify(const VerifyConfig& config)
{
    config.validate();
    detail::DrawSampler draw{std::mt19937_64(config.seed)};
    const int min_levels = config.corrupt_lift ? 2 : 1;
    std::vector<SuiteResult> suites;

    {
        SuiteResult s{"lift_unitarity", config.draws, 0.0, {}};
        for (int d = 0; d < config.draws; ++d) {
            const double theta = draw.angle(), phase = draw.angle();
            const int levels = draw.integer(min_levels, 5);
            const auto stats = draw.statistics();
            const auto basis = build_basis(stats, levels);
            const auto u = detail::checked_lift(make_beam_splitter(theta, phase), basis, config.corrupt_lift);
            detail::record(s, u.unitarity_error(),
                "draw=" + std::to_string(d) + " statistics=" + std::string(to_string(stats)) + " levels=" + std::to_string(levels)
                    + " theta=" + format_number(theta) + " phase=" + format_number(phase));
        }
        suites.push_back(s);
    }
    {
        SuiteResult s{"commutator", config.draws, 0.0, {}};
        for (int d = 0; d < config.draws; ++d) {
            const double theta = draw.angle(), phase = draw.angle();
            const int levels = draw.integer(min_levels, 5);
            const auto stats = draw.statistics();
            const auto spectrum = draw.spectrum(levels);
            const auto basis = build_basis(stats, levels);
            const auto u = detail::checked_lift(make_beam_splitter(theta, phase), basis, config.corrupt_lift);
            detail::record(s, commutator_residual(hamiltonian_matrix(basis, spectrum), u),
                "draw=" + std::to_string(d) + " statistics=" + std::string(to_string(stats)) + " spectrum=" + detail::describe(spectrum)
                    + " theta=" + format_number(theta) + " phase=" + format_number(phase));
        }
        suites.push_back(s);
    }
    {
        SuiteResult s{"separation_invariance", config.draws, 0.0, {}};
        for (int d = 0; d < config.draws; ++d) {
            const int levels = draw.integer(1, 5);
            const auto stats = draw.statistics();
            const auto spectrum = draw.spectrum(levels);
            const double beta = draw.uniform(0.0, 20.0);
            const auto basis = build_basis(stats, levels);
            const auto rho = thermal_density_matrix(basis, spectrum, Beta(beta));
            std::vector<TwoParticleUnitary> chain;
            std::string angles;
            for (int k = 0; k < 5; ++k) {
                const double theta = draw.angle(), phase = draw.angle();
                chain.push_back(lift_two_particle(make_beam_splitter(theta, phase), basis));
                angles += " (" + format_number(theta) + "," + format_number(phase) + ")";
            }
            const double single = invariance_residual(rho, chain.front());
            const double composed = invariance_residual(rho, chain);
            detail::record(s, std::max(single, composed),
                "draw=" + std::to_string(d) + " statistics=" + std::string(to_string(stats)) + " spectrum=" + detail::describe(spectrum)
                    + " beta=" + format_number(beta) + " splitters=" + angles);
        }
        suites.push_back(s);
    }
    {
        SuiteResult s{"partition_identity", config.draws, 0.0, {}};
        for (int d = 0; d < config.draws; ++d) {
            const int levels = draw.integer(1, 10);
            const auto spectrum = draw.spectrum(levels);
            const Beta beta(draw.uniform(0.0, 20.0));
            for (auto stats : {Statistics::Boson, Statistics::Fermion}) {
                const auto basis = build_basis(stats, levels);
                double coincident = 0.0, same_p = 0.0, same_q = 0.0;
                for (const auto& st : basis.states()) {
                    const double w = beta.boltzmann(state_energy(st, spectrum));
                    const auto occ = site_occupation(st);
                    (occ.coincidence() ? coincident : occ.p == 2 ? same_p : same_q) += w;
                }
                const auto terms = partition_terms(spectrum, beta, stats);
                const double z2_enum = coincident + same_p + same_q;
                auto rel = [](double x, double ref) { return ref == 0.0 ? std::abs(x) : std::abs(x - ref) / std::abs(ref); };
                const double residual = std::max({rel(terms.z_pq + 2.0 * terms.z_p, z2_enum), rel(terms.z_pq, coincident),
                    rel(terms.z_p, same_p), rel(terms.z_q, same_q)});
                detail::record(s, residual,
                    "draw=" + std::to_string(d) + " statistics=" + std::string(to_string(stats)) + " spectrum=" + detail::describe(spectrum)
                        + " beta=" + format_number(beta.value()));
            }
        }
        suites.push_back(s);
    }
    {
        SuiteResult s{"transfer_matrix_oracle", config.draws, 0.0, {}};
        const auto basis = build_basis(Statistics::Boson, 1);
        for (int d = 0; d < config.draws; ++d) {
            const double reflectance = draw.uniform(0.0, 1.0);
            const double phase = draw.angle();
            double a = draw.uniform(0.0, 1.0), b = draw.uniform(0.0, 1.0), c = draw.uniform(0.0, 1.0);
            const double total = a + b + c;
            a /= total, b /= total, c /= total;
            const auto splitter = make_beam_splitter(std::acos(std::sqrt(reflectance)), phase);
            const auto u = lift_two_particle(splitter, basis);
            const Eigen::Matrix3d m = transfer_matrix_3(splitter.reflectance(), splitter.transmittance());
            const double pops[] = {a, c, b};
            DensityMatrix rho = DensityMatrix::diagonal(basis, pops);
            Eigen::Vector3d v(a, b, c);
            double residual = 0.0;
            for (int k = 0; k < 20; ++k) {
                rho = step(rho, u);
                v = m * v;
                residual = std::max(residual, (sector_distribution(rho).as_vector() - v).cwiseAbs().maxCoeff());
            }
            detail::record(s, residual,
                "draw=" + std::to_string(d) + " R=" + format_number(reflectance) + " phase=" + format_number(phase) + " start=("
                    + format_number(a) + "," + format_number(b) + "," + format_number(c) + ")");
        }
        suites.push_back(s);
    }
    return suites;
}

inline bool all_passed(const std::vector<SuiteResult>& suites)
{
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

inline void write_verify_report(std::ostream& os, const VerifyConfig& config, const std::vector<SuiteResult>& suites)
{
    os << "# homstat verify: randomized property suites\n"
       << "# seed=" << config.seed << " draws=" << config.draws << " corrupt_lift=" << (config.corrupt_lift ? "true" : "false")
       << " threshold=" << format_number(kVerifyThreshold) << '\n'
       << "suite,draws,max_residual,status\n";
    for (const auto& s : suites)
        os << s.name << ',' << s.draws << ',' << format_number(s.max_residual) << ',' << (s.passed() ? "pass" : "FAIL") << '\n';
    for (const auto& s : suites)
        if (!s.passed())
            os << "# " << s.name << " failing draw (seed=" << config.seed << "): " << s.worst_draw << '\n';
}

// ------------------------------------------------------------------ hom

struct HomConfig {
    double theta = std::numbers::pi / 4;
    double phase = 0.0;
    std::optional<Statistics> statistics; // both when unset

    void validate() const
    {
        if (!std::isfinite(theta) || !std::isfinite(phase))
            throw UsageError("--theta and --phase must be finite");
    }
};

struct HomRow {
    Statistics statistics = Statistics::Boson;
    double reflectance = 0.0;
    double transmittance = 0.0;
    double coincidence = 0.0; // from the lifted two-particle dynamics
    double expected = 0.0;    // (R - T)^2 for bosons, 1 for fermions
};

/// Coincidence after a single splitter for one particle per input port.
inline std::vector<HomRow> run_hom(const HomConfig& config)
{
    config.validate();
    const auto splitter = make_beam_splitter(config.theta, config.phase);
    std::vector<HomRow> rows;
    for (auto stats : detail::selected(config.statistics)) {
        const auto basis = build_basis(stats, 1);
        const auto pq = DensityMatrix::basis_state(basis, *basis.index_of(Mode{Site::P, 0}, Mode{Site::Q, 0}));
        HomRow row;
        row.statistics = stats;
        row.reflectance = splitter.reflectance();
        row.transmittance = splitter.transmittance();
        row.coincidence = p11_of_rho(apply_unitary(lift_two_particle(splitter, basis), pq));
        const double diff = row.reflectance - row.transmittance;
        row.expected = stats == Statistics::Boson ? diff * diff : 1.0;
        rows.push_back(row);
    }
    return rows;
}

inline void write_hom_csv(std::ostream& os, const HomConfig& config, const std::vector<HomRow>& rows)
{
    os << "# homstat hom: coincidence probability after one beam splitter, one particle per input port\n"
       << "# theta=" << format_number(config.theta) << " phase=" << format_number(config.phase) << '\n'
       << "statistics,R,T,coincidence,expected\n";
    for (const auto& r : rows)
        os << to_string(r.statistics) << ',' << format_number(r.reflectance) << ',' << format_number(r.transmittance) << ','
           << format_number(r.coincidence) << ',' << format_number(r.expected) << '\n';
}

} // namespace homstat::cli

#endif // HOMSTAT_COMMANDS_HPP
