#ifndef HOMSTAT_FOCK_BASIS_HPP
#define HOMSTAT_FOCK_BASIS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homstat/spectrum.hpp"

namespace homstat {

enum class Statistics { Boson, Fermion };

inline std::string_view to_string(Statistics s)
{
    return s == Statistics::Boson ? "boson" : "fermion";
}

enum class Site { P = 0, Q = 1 };

/// Single-particle mode: one of the two sites times an internal level.
/// Flat index is level-major, site-minor: 2*level + site.
struct Mode {
    Site site = Site::P;
    int level = 0;

    constexpr int flat() const { return 2 * level + (site == Site::Q ? 1 : 0); }

    static constexpr Mode from_flat(int index)
    {
        return Mode{index % 2 == 0 ? Site::P : Site::Q, index / 2};
    }

    friend constexpr bool operator==(const Mode&, const Mode&) = default;
};

/// Canonically ordered occupied mode pair (first <= second). The norm is the
/// prefactor in |state> = norm * c+_{first} c+_{second} |0>, i.e. 1/sqrt(2)
/// for a doubly occupied bosonic mode and 1 otherwise.
struct TwoParticleState {
    int first = 0;
    int second = 0;
    double norm = 1.0;

    Mode first_mode() const { return Mode::from_flat(first); }
    Mode second_mode() const { return Mode::from_flat(second); }

    friend bool operator==(const TwoParticleState& a, const TwoParticleState& b)
    {
        return a.first == b.first && a.second == b.second;
    }
};

/// Largest level count accepted by the dense/sparse matrix engine.
inline constexpr int kMaxMatrixLevels = 64;

/// Immutable enumerated basis; copies share the state table.
class TwoParticleBasis {
public:
    Statistics statistics() const { return data_->statistics; }
    int levels() const { return data_->levels; }
    int modes() const { return 2 * data_->levels; }
    std::size_t dimension() const { return data_->states.size(); }

    const std::vector<TwoParticleState>& states() const { return data_->states; }
    const TwoParticleState& operator[](std::size_t i) const { return data_->states[i]; }

    /// Index of the state occupying flat modes a and b (any order), if present.
    std::optional<std::size_t> index_of(int a, int b) const
    {
        if (a > b)
            std::swap(a, b);
        const auto& s = data_->states;
        auto it = std::lower_bound(s.begin(), s.end(), std::pair{a, b}, [](const TwoParticleState& st, const std::pair<int, int>& key) {
            return std::pair{st.first, st.second} < key;
        });
        if (it == s.end() || it->first != a || it->second != b)
            return std::nullopt;
        return static_cast<std::size_t>(it - s.begin());
    }

    std::optional<std::size_t> index_of(Mode a, Mode b) const { return index_of(a.flat(), b.flat()); }

    friend bool operator==(const TwoParticleBasis& a, const TwoParticleBasis& b)
    {
        return a.data_ == b.data_ || (a.statistics() == b.statistics() && a.levels() == b.levels());
    }

private:
    struct Data {
        Statistics statistics;
        int levels;
        std::vector<TwoParticleState> states;
    };

    explicit TwoParticleBasis(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

    std::shared_ptr<const Data> data_;

    friend TwoParticleBasis build_basis(Statistics statistics, int levels);
};

/// Two particles over sites {p, q} and `levels` internal levels. States are
/// sorted lexicographically by (first, second) flat mode.
inline TwoParticleBasis build_basis(Statistics statistics, int levels)
{
    if (levels < 1)
        throw std::invalid_argument("build_basis: levels must be >= 1");
    if (levels > kMaxMatrixLevels)
        throw std::invalid_argument("build_basis: levels must be <= " + std::to_string(kMaxMatrixLevels));

    const int m = 2 * levels;
    auto data = std::make_shared<TwoParticleBasis::Data>();
    data->statistics = statistics;
    data->levels = levels;
    data->states.reserve(static_cast<std::size_t>(statistics == Statistics::Boson ? m * (m + 1) / 2 : m * (m - 1) / 2));
    for (int a = 0; a < m; ++a) {
        for (int b = (statistics == Statistics::Boson ? a : a + 1); b < m; ++b) {
            const double norm = (a == b) ? 1.0 / std::sqrt(2.0) : 1.0;
            data->states.push_back(TwoParticleState{a, b, norm});
        }
    }
    return TwoParticleBasis(std::move(data));
}

struct SiteOccupation {
    int p = 0;
    int q = 0;

    bool coincidence() const { return p == 1 && q == 1; }
    friend constexpr bool operator==(const SiteOccupation&, const SiteOccupation&) = default;
};

/// (n_p, n_q): (2,0) both at p, (1,1) split, (0,2) both at q.
inline SiteOccupation site_occupation(const TwoParticleState& state)
{
    const int at_q = (state.first_mode().site == Site::Q ? 1 : 0) + (state.second_mode().site == Site::Q ? 1 : 0);
    return SiteOccupation{2 - at_q, at_q};
}

/// eps_{n1} + eps_{n2}, counted with multiplicity.
inline double state_energy(const TwoParticleState& state, const LevelSpectrum& spectrum)
{
    return spectrum.at(static_cast<std::size_t>(state.first_mode().level)) + spectrum.at(static_cast<std::size_t>(state.second_mode().level));
}

} // namespace homstat

#endif // HOMSTAT_FOCK_BASIS_HPP
