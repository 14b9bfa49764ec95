#ifndef HOMSTAT_SPECTRUM_HPP
#define HOMSTAT_SPECTRUM_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace homstat {

/// Internal energy ladder of a single particle. Energies are non-decreasing;
/// degenerate levels are allowed.
class LevelSpectrum {
public:
    explicit LevelSpectrum(std::vector<double> energies)
        : energies_(std::move(energies))
    {
        if (energies_.empty())
            throw std::invalid_argument("LevelSpectrum: at least one level is required");
        for (std::size_t n = 0; n < energies_.size(); ++n) {
            if (!std::isfinite(energies_[n]))
                throw std::invalid_argument("LevelSpectrum: energy " + std::to_string(n) + " is not finite");
            if (n > 0 && energies_[n] < energies_[n - 1])
                throw std::invalid_argument("LevelSpectrum: energies must be non-decreasing");
        }
    }

    /// Ladder eps_n = n * spacing for n = 0 .. levels-1.
    static LevelSpectrum equally_spaced(std::size_t levels, double spacing = 1.0)
    {
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw std::invalid_argument("LevelSpectrum: spacing must be positive and finite");
        std::vector<double> e(levels);
        for (std::size_t n = 0; n < levels; ++n)
            e[n] = static_cast<double>(n) * spacing;
        LevelSpectrum s(std::move(e));
        s.spacing_ = spacing;
        return s;
    }

    std::size_t size() const { return energies_.size(); }
    double operator[](std::size_t n) const { return energies_[n]; }
    double at(std::size_t n) const
    {
        if (n >= energies_.size())
            throw std::invalid_argument("LevelSpectrum: level " + std::to_string(n) + " out of range");
        return energies_[n];
    }
    std::span<const double> energies() const { return energies_; }
    double ground_energy() const { return energies_.front(); }

    /// Set only for ladders built by equally_spaced().
    std::optional<double> spacing() const { return spacing_; }

private:
    std::vector<double> energies_;
    std::optional<double> spacing_;
};

/// Inverse temperature 1/kT. Zero temperature is a distinguished value rather
/// than a large finite number, so no e^{beta*eps} overflow can occur.
class Beta {
public:
    explicit Beta(double value) : value_(value)
    {
        if (std::isnan(value) || value < 0.0)
            throw std::invalid_argument("Beta: inverse temperature must be non-negative");
    }

    static Beta zero_temperature() { return Beta(std::numeric_limits<double>::infinity()); }
    static Beta infinite_temperature() { return Beta(0.0); }

    /// kT in units of the spacing; kT = 0 maps to zero temperature.
    static Beta from_kt(double kt, double spacing = 1.0)
    {
        if (std::isnan(kt) || kt < 0.0)
            throw std::invalid_argument("Beta: kT must be non-negative");
        if (kt == 0.0)
            return zero_temperature();
        return Beta(1.0 / (kt * spacing));
    }

    double value() const { return value_; }
    bool is_zero_temperature() const { return std::isinf(value_); }

    /// e^{-beta * energy}, with the T = 0 and T = inf limits taken exactly.
    double boltzmann(double energy) const
    {
        if (value_ == 0.0)
            return 1.0;
        if (is_zero_temperature()) {
            if (energy == 0.0)
                return 1.0;
            return energy > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        return std::exp(-value_ * energy);
    }

private:
    double value_;
};

} // namespace homstat

#endif // HOMSTAT_SPECTRUM_HPP
