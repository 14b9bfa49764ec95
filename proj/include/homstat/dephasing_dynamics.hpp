#ifndef HOMSTAT_DEPHASING_DYNAMICS_HPP
#define HOMSTAT_DEPHASING_DYNAMICS_HPP

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "homstat/density_matrix.hpp"
#include "homstat/fock_basis.hpp"
#include "homstat/scattering.hpp"

namespace homstat {

/// Diagonal weights of the single-level boson problem:
/// a on |pp>, b on |qq>, c on |pq>.
struct SectorDistribution {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    Eigen::Vector3d as_vector() const { return {a, b, c}; }
    static SectorDistribution from_vector(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// Strong dephasing: drop every off-diagonal entry in the occupation basis.
inline DensityMatrix dephase(const DensityMatrix& rho)
{
    const Eigen::VectorXd p = rho.populations();
    return DensityMatrix::diagonal(rho.basis(), std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

/// One array element: scatter, then dephase.
inline DensityMatrix step(const DensityMatrix& rho, const TwoParticleUnitary& u)
{
    return dephase(apply_unitary(u, rho));
}

/// Total weight on states with one particle per site.
inline double p11_of_rho(const DensityMatrix& rho)
{
    const Eigen::VectorXd p = rho.populations();
    double out = 0.0;
    for (std::size_t i = 0; i < rho.dimension(); ++i)
        if (site_occupation(rho.basis()[i]).coincidence())
            out += p[static_cast<Eigen::Index>(i)];
    return out;
}

/// (a, b, c) read from a single-level boson density matrix.
inline SectorDistribution sector_distribution(const DensityMatrix& rho)
{
    const auto& basis = rho.basis();
    if (basis.statistics() != Statistics::Boson || basis.levels() != 1)
        throw std::invalid_argument("sector_distribution: requires a single-level boson basis");
    const Eigen::VectorXd p = rho.populations();
    // canonical order for one level: pp, pq, qq
    return SectorDistribution{p[0], p[2], p[1]};
}

/// -sum lambda ln lambda in nats; lambda below 1e-8 in magnitude counts as 0.
inline double von_neumann_entropy(const DensityMatrix& rho)
{
    double s = 0.0;
    for (double lambda : rho.eigenvalues()) {
        if (lambda < -1e-8)
            throw std::domain_error("von_neumann_entropy: density matrix has a negative eigenvalue");
        if (lambda > 0.0)
            s -= lambda * std::log(lambda);
    }
    return s;
}

/// Acts on (a, b, c) for one splitter plus dephasing. Doubly stochastic.
inline Eigen::Matrix3d transfer_matrix_3(double reflectance, double transmittance)
{
    const double R = reflectance;
    const double T = transmittance;
    if (!(R >= 0.0 && R <= 1.0) || std::abs(R + T - 1.0) > 1e-12)
        throw std::invalid_argument("transfer_matrix_3: need 0 <= R <= 1 and R + T = 1");
    Eigen::Matrix3d m;
    m << R * R, T * T, 2 * R * T,
         T * T, R * R, 2 * R * T,
         2 * R * T, 2 * R * T, (R - T) * (R - T);
    return m;
}

/// Per-step contraction factors of (a - b) and (a + b - 2c).
inline std::pair<double, double> recursion_ratios(double reflectance, double transmittance)
{
    const double R = reflectance;
    const double T = transmittance;
    if (std::abs(R + T - 1.0) > 1e-12)
        throw std::invalid_argument("recursion_ratios: need R + T = 1");
    return {R * R - T * T, (R - T) * (R - T) - 2 * R * T};
}

struct TrajectoryRecord {
    int step = 0;
    Eigen::VectorXd populations;
    double p11 = 0.0;
    double entropy = 0.0;
    /// Max population change from the previous record; NaN for step 0.
    double max_delta = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    bool converged = false;
    /// Index of the first record that the next step leaves unchanged (to tolerance).
    int steps_to_converge = -1;
    std::string diagnostic;

    const TrajectoryRecord& final_record() const { return records.back(); }
};

struct IterationOptions {
    int max_steps = 10000;
    double tolerance = 1e-12;
};

namespace detail {

inline bool is_non_mixing(const TwoParticleUnitary& u)
{
    if (!u.splitter())
        return false;
    const double R = u.splitter()->reflectance();
    return R <= 1e-12 || R >= 1.0 - 1e-12;
}

inline TrajectoryRecord make_record(int index, const DensityMatrix& rho, double max_delta)
{
    TrajectoryRecord r;
    r.step = index;
    r.populations = rho.populations();
    r.p11 = p11_of_rho(rho);
    r.entropy = von_neumann_entropy(rho);
    r.max_delta = max_delta;
    return r;
}

} // namespace detail

/// Iterates step() with sequence[i % size] at step i + 1 until consecutive
/// populations differ by less than the tolerance. A sequence made only of
/// splitters with R in {0, 1} never mixes the sites; such runs always report
/// converged = false with a diagnostic.
inline Trajectory iterate_to_equilibrium(const DensityMatrix& rho0, std::span<const TwoParticleUnitary> sequence, IterationOptions options = {})
{
    if (options.max_steps < 1)
        throw std::invalid_argument("iterate_to_equilibrium: max_steps must be >= 1");
    if (!(options.tolerance > 0.0))
        throw std::invalid_argument("iterate_to_equilibrium: tolerance must be positive");
    if (sequence.empty())
        throw std::invalid_argument("iterate_to_equilibrium: no beam splitters given");

    bool non_mixing = true;
    for (const auto& u : sequence)
        non_mixing = non_mixing && detail::is_non_mixing(u);

    Trajectory traj;
    traj.records.push_back(detail::make_record(0, rho0, std::numeric_limits<double>::quiet_NaN()));
    DensityMatrix current = rho0;
    for (int i = 1; i <= options.max_steps; ++i) {
        DensityMatrix next = step(current, sequence[static_cast<std::size_t>(i - 1) % sequence.size()]);
        const double delta = (next.populations() - current.populations()).cwiseAbs().maxCoeff();
        if (delta < options.tolerance) {
            traj.converged = !non_mixing;
            traj.steps_to_converge = non_mixing ? -1 : i - 1;
            break;
        }
        // R = 0 swaps the sites every step: stop once the two-cycle closes
        if (non_mixing && i >= 2 && (next.populations() - traj.records[static_cast<std::size_t>(i - 2)].populations).cwiseAbs().maxCoeff() < options.tolerance)
            break;
        traj.records.push_back(detail::make_record(i, next, delta));
        current = std::move(next);
    }
    if (non_mixing)
        traj.diagnostic = "beam splitter has R = 0 or R = 1; the array never mixes the two sites, so no equilibration is possible (need 0 < R < 1)";
    else if (!traj.converged)
        traj.diagnostic = "max_steps reached before the populations settled to tolerance";
    return traj;
}

inline Trajectory iterate_to_equilibrium(const DensityMatrix& rho0, const TwoParticleUnitary& u, IterationOptions options = {})
{
    return iterate_to_equilibrium(rho0, std::span<const TwoParticleUnitary>(&u, 1), options);
}

} // namespace homstat

#endif // HOMSTAT_DEPHASING_DYNAMICS_HPP
