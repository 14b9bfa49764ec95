#ifndef HOMSTAT_THERMAL_EQUILIBRIUM_HPP
#define HOMSTAT_THERMAL_EQUILIBRIUM_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "homstat/density_matrix.hpp"
#include "homstat/fock_basis.hpp"
#include "homstat/spectrum.hpp"

namespace homstat {

/// Partition function split by site configuration: both particles on
/// different sites (z_pq) or both on p / both on q.
struct PartitionTerms {
    double z_pq = 0.0;
    double z_p = 0.0;
    double z_q = 0.0;
    double z2 = 0.0;
};

/// sum_n e^{-beta eps_n}. At T = 0 this counts the zero-energy levels.
inline double single_particle_sum(const LevelSpectrum& spectrum, Beta beta)
{
    double s = 0.0;
    for (double e : spectrum.energies())
        s += beta.boltzmann(e);
    return s;
}

inline double z_pq(const LevelSpectrum& spectrum, Beta beta)
{
    const double s = single_particle_sum(spectrum, beta);
    return s * s;
}

namespace detail {

// Same-site weight from the per-level Boltzmann factors w_n: distinct pairs
// sum_{m<n} w_m w_n via a running prefix, plus sum_n w_n^2 for bosons.
// Forming (S^2 - D)/2 instead loses all digits once w_0 dominates.
inline double same_site_from_weights(const std::vector<double>& w, Statistics statistics)
{
    double prefix = 0.0;
    double distinct = 0.0;
    double doubled = 0.0;
    for (double x : w) {
        distinct += x * prefix;
        prefix += x;
        doubled += x * x;
    }
    return statistics == Statistics::Boson ? distinct + doubled : distinct;
}

inline std::vector<double> level_weights(const LevelSpectrum& spectrum, Beta beta, double shift = 0.0)
{
    std::vector<double> w;
    w.reserve(spectrum.size());
    for (double e : spectrum.energies())
        w.push_back(beta.boltzmann(e - shift));
    return w;
}

} // namespace detail

/// Weight of both particles on one given site:
/// (1/2) sum_{m != n} e^{-beta(eps_m + eps_n)} plus, for bosons only, the
/// doubly occupied levels sum_n e^{-2 beta eps_n}.
inline double z_same_site(const LevelSpectrum& spectrum, Beta beta, Statistics statistics)
{
    return detail::same_site_from_weights(detail::level_weights(spectrum, beta), statistics);
}

inline PartitionTerms partition_terms(const LevelSpectrum& spectrum, Beta beta, Statistics statistics)
{
    PartitionTerms t;
    t.z_pq = z_pq(spectrum, beta);
    t.z_p = z_same_site(spectrum, beta, statistics);
    t.z_q = t.z_p;
    t.z2 = t.z_pq + t.z_p + t.z_q;
    return t;
}

/// P(1,1) = z_pq / z2 from the truncated-ladder sums. Energies are measured
/// from the ground level internally; the ratio is shift invariant.
inline double p11_numeric(const LevelSpectrum& spectrum, Beta beta, Statistics statistics)
{
    const auto w = detail::level_weights(spectrum, beta, spectrum.ground_energy());
    double sum = 0.0;
    for (double x : w)
        sum += x;
    const double pq = sum * sum;
    return pq / (pq + 2.0 * detail::same_site_from_weights(w, statistics));
}

/// Closed-form P(1,1) for an infinite equally spaced ladder, as a function of
/// beta*Delta. Written in e^{-beta Delta} so that beta*Delta = inf is exact.
inline double p11_analytic(double beta_delta, Statistics statistics)
{
    if (std::isnan(beta_delta) || beta_delta < 0.0)
        throw std::invalid_argument("p11_analytic: beta*Delta must be non-negative");
    const double y = std::exp(-beta_delta);
    return statistics == Statistics::Boson ? (1.0 + y) / (3.0 + y) : (1.0 + y) / (1.0 + 3.0 * y);
}

/// Smallest L with e^{-beta_delta L} <= tolerance.
///
/// With s = e^{-beta_delta L}, the truncated and infinite-ladder P(1,1)
/// differ by at most s / (2 (1 - s)) for bosons and 2 s / (1 - s) for
/// fermions, so the returned L bounds the error by 2 tolerance / (1 - tolerance).
inline int required_truncation(double beta_delta, double tolerance)
{
    if (!(tolerance > 0.0 && tolerance < 1.0))
        throw std::invalid_argument("required_truncation: tolerance must lie in (0, 1)");
    if (std::isnan(beta_delta) || beta_delta < 0.0)
        throw std::invalid_argument("required_truncation: beta*Delta must be non-negative");
    if (beta_delta == 0.0)
        throw std::invalid_argument("required_truncation: no finite ladder reproduces infinite temperature");
    if (std::isinf(beta_delta))
        return 1;
    const double estimate = std::ceil(-std::log(tolerance) / beta_delta);
    if (estimate > static_cast<double>(std::numeric_limits<int>::max() / 2))
        throw std::invalid_argument("required_truncation: ladder too long for this beta*Delta");
    int levels = std::max(1, static_cast<int>(estimate));
    // correct the logarithm's rounding in either direction
    while (levels > 1 && std::exp(-beta_delta * (levels - 1)) <= tolerance)
        --levels;
    while (std::exp(-beta_delta * levels) > tolerance)
        ++levels;
    return levels;
}

/// Upper bound on |p11_numeric(L) - p11_analytic| for L = required_truncation(.., tolerance).
inline double truncation_error_bound(double tolerance)
{
    return 2.0 * tolerance / (1.0 - tolerance);
}

namespace detail {

inline void require_matching(const TwoParticleBasis& basis, const LevelSpectrum& spectrum)
{
    if (static_cast<std::size_t>(basis.levels()) != spectrum.size())
        throw std::invalid_argument("basis level count does not match spectrum length");
}

inline std::vector<double> normalized(std::vector<double> w)
{
    double total = 0.0;
    for (double x : w)
        total += x;
    for (double& x : w)
        x /= total;
    return w;
}

} // namespace detail

/// e^{-beta H} / Z2 over the basis (truncated ladder). At T = 0 this is the
/// uniform mixture over the degenerate ground states.
inline DensityMatrix thermal_density_matrix(const TwoParticleBasis& basis, const LevelSpectrum& spectrum, Beta beta)
{
    detail::require_matching(basis, spectrum);
    std::vector<double> energy(basis.dimension());
    double e_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        energy[i] = state_energy(basis[i], spectrum);
        e_min = std::min(e_min, energy[i]);
    }
    std::vector<double> w(basis.dimension());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = beta.boltzmann(energy[i] - e_min);
    return DensityMatrix::diagonal(basis, detail::normalized(std::move(w)));
}

/// Each particle enters through its own port with an independent Boltzmann
/// level: state c+_{p,m} c+_{q,n}|0> gets weight e^{-beta (eps_m + eps_n)}.
inline DensityMatrix product_injection_matrix(const TwoParticleBasis& basis, const LevelSpectrum& spectrum, Beta beta)
{
    detail::require_matching(basis, spectrum);
    const double e0 = spectrum.ground_energy();
    std::vector<double> w(basis.dimension(), 0.0);
    for (int m = 0; m < basis.levels(); ++m) {
        for (int n = 0; n < basis.levels(); ++n) {
            const auto idx = basis.index_of(Mode{Site::P, m}, Mode{Site::Q, n});
            w[*idx] += beta.boltzmann(spectrum[static_cast<std::size_t>(m)] - e0) * beta.boltzmann(spectrum[static_cast<std::size_t>(n)] - e0);
        }
    }
    return DensityMatrix::diagonal(basis, detail::normalized(std::move(w)));
}

/// Coincidence-only injection carrying the thermal weight of every level
/// sector: sector {m, n} receives its full Gibbs weight, placed on the
/// (1,1) states of that sector (split evenly between c+_{p,m} c+_{q,n} and
/// c+_{p,n} c+_{q,m} when m != n).
inline DensityMatrix thermal_sector_injection_matrix(const TwoParticleBasis& basis, const LevelSpectrum& spectrum, Beta beta)
{
    detail::require_matching(basis, spectrum);
    const double e0 = spectrum.ground_energy();
    const double same_level_states = basis.statistics() == Statistics::Boson ? 3.0 : 1.0;
    std::vector<double> w(basis.dimension(), 0.0);
    for (int m = 0; m < basis.levels(); ++m) {
        for (int n = m; n < basis.levels(); ++n) {
            const double g = beta.boltzmann(spectrum[static_cast<std::size_t>(m)] + spectrum[static_cast<std::size_t>(n)] - 2.0 * e0);
            if (m == n) {
                w[*basis.index_of(Mode{Site::P, m}, Mode{Site::Q, m})] += same_level_states * g;
            } else {
                w[*basis.index_of(Mode{Site::P, m}, Mode{Site::Q, n})] += 2.0 * g;
                w[*basis.index_of(Mode{Site::P, n}, Mode{Site::Q, m})] += 2.0 * g;
            }
        }
    }
    return DensityMatrix::diagonal(basis, detail::normalized(std::move(w)));
}

/// Long-run P(1,1) of a dephased splitter array fed by product injection on
/// the infinite equally spaced ladder. The splitter never changes internal
/// levels, so the probability s = (1-x)/(1+x), x = e^{-beta Delta}, that both
/// particles share a level is conserved; that fraction relaxes to the
/// identical-particle value and the rest to 1/2.
inline double p11_product_injection_limit(double beta_delta, Statistics statistics)
{
    if (std::isnan(beta_delta) || beta_delta < 0.0)
        throw std::invalid_argument("p11_product_injection_limit: beta*Delta must be non-negative");
    const double x = std::exp(-beta_delta);
    const double s = (1.0 - x) / (1.0 + x);
    const double same_level = statistics == Statistics::Boson ? 1.0 / 3.0 : 1.0;
    return s * same_level + (1.0 - s) * 0.5;
}

} // namespace homstat

#endif // HOMSTAT_THERMAL_EQUILIBRIUM_HPP
