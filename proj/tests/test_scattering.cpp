#include "catch_amalgamated.hpp"

#include <numbers>
#include <random>

#include "homstat/scattering.hpp"
#include "oracles.hpp"

using namespace homstat;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double pi = std::numbers::pi;

Eigen::MatrixXcd dense(const TwoParticleUnitary& u)
{
    return Eigen::MatrixXcd(u.matrix());
}

std::size_t pq_index(const TwoParticleBasis& basis, int m = 0, int n = 0)
{
    return *basis.index_of(Mode{Site::P, m}, Mode{Site::Q, n});
}

LevelSpectrum random_spectrum(std::mt19937_64& rng, int levels)
{
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<double> e(static_cast<std::size_t>(levels));
    for (double& x : e)
        x = u(rng);
    std::sort(e.begin(), e.end());
    return LevelSpectrum(std::move(e));
}

} // namespace

TEST_CASE("make_beam_splitter", "[scattering]")
{
    const auto id = make_beam_splitter(0.0, 1.3);
    CHECK((id.matrix() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(id.reflectance() == 1.0);

    const auto half = make_beam_splitter(pi / 4, 0.0);
    CHECK_THAT(half.reflectance(), WithinAbs(0.5, 1e-15));
    CHECK_THAT(half.transmittance(), WithinAbs(0.5, 1e-15));

    const auto third = make_beam_splitter(pi / 3, 0.4);
    CHECK_THAT(third.reflectance(), WithinAbs(0.25, 1e-15));
    CHECK_THAT(third.transmittance(), WithinAbs(0.75, 1e-15));
    const Eigen::Matrix2cd s = third.matrix();
    CHECK((s.adjoint() * s - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THAT(std::abs(third.r()), WithinAbs(std::abs(third.r_prime()), 1e-15));
    CHECK_THAT(std::abs(third.t()), WithinAbs(std::abs(third.t_prime()), 1e-15));
}

TEST_CASE("BeamSplitter::from_amplitudes validates unitarity", "[scattering]")
{
    const double h = 1.0 / std::sqrt(2.0);
    CHECK_NOTHROW(BeamSplitter::from_amplitudes(h, h, -h, h));
    CHECK_THROWS_AS(BeamSplitter::from_amplitudes(h, h, h, h), std::invalid_argument);
    CHECK_THROWS_AS(BeamSplitter::from_amplitudes(1.0, 0.1, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("lift_two_particle: HOM dip for bosons", "[scattering]")
{
    const auto basis = build_basis(Statistics::Boson, 1);
    const auto u = lift_two_particle(make_beam_splitter(pi / 4, 0.0), basis);
    const auto pq = static_cast<Eigen::Index>(pq_index(basis));
    CHECK(std::abs(u(pq, pq)) <= 1e-15);
    CHECK_THAT(std::abs(u(0, pq)), WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
    CHECK_THAT(std::abs(u(2, pq)), WithinAbs(1.0 / std::sqrt(2.0), 1e-15));

    // r r' + t t' for a general splitter
    const auto s = make_beam_splitter(0.3, 1.1);
    const auto g = lift_two_particle(s, basis);
    CHECK_THAT(std::abs(g(pq, pq) - (s.r() * s.r_prime() + s.t() * s.t_prime())), WithinAbs(0.0, 1e-15));
}

TEST_CASE("lift_two_particle: fermions and trivial splitters", "[scattering]")
{
    const auto fermion = build_basis(Statistics::Fermion, 1);
    for (double theta : {0.0, 0.4, pi / 4, 1.2}) {
        const auto u = lift_two_particle(make_beam_splitter(theta, 0.7), fermion);
        CHECK(u.matrix().rows() == 1);
        CHECK_THAT(std::abs(u(0, 0)), WithinAbs(1.0, 1e-15));
    }
    const auto boson = build_basis(Statistics::Boson, 1);
    CHECK((dense(lift_two_particle(make_beam_splitter(0.0, 0.0), boson)) - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lift_two_particle matches the first-quantized symmetrizer oracle", "[scattering][oracle]")
{
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    for (int draw = 0; draw < 30; ++draw) {
        const int levels = 1 + draw % 3;
        for (auto stats : {Statistics::Boson, Statistics::Fermion}) {
            const auto s = make_beam_splitter(angle(rng), angle(rng));
            const auto u = lift_two_particle(s, build_basis(stats, levels));
            const Eigen::MatrixXcd ref = oracle::lift_by_symmetrizer(s.matrix(), levels, stats == Statistics::Fermion);
            REQUIRE((dense(u) - ref).cwiseAbs().maxCoeff() <= 1e-14);
        }
    }
}

TEST_CASE("lift unitarity and sector conservation", "[scattering][property]")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    for (int draw = 0; draw < 200; ++draw) {
        const int levels = 1 + draw % 5;
        const auto stats = draw % 2 == 0 ? Statistics::Boson : Statistics::Fermion;
        const auto basis = build_basis(stats, levels);
        const auto u = lift_two_particle(make_beam_splitter(angle(rng), angle(rng)), basis);
        REQUIRE(u.unitarity_error() <= 1e-12);
        const Eigen::MatrixXcd m = dense(u);
        for (std::size_t i = 0; i < basis.dimension(); ++i) {
            for (std::size_t j = 0; j < basis.dimension(); ++j) {
                auto levels_of = [](const TwoParticleState& s) { return std::pair{s.first_mode().level, s.second_mode().level}; };
                if (levels_of(basis[i]) != levels_of(basis[j]))
                    REQUIRE(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == Complex(0.0));
            }
        }
    }
}

TEST_CASE("lift blocks repeat across level sectors", "[scattering]")
{
    const auto basis = build_basis(Statistics::Boson, 3);
    const auto u = lift_two_particle(make_beam_splitter(0.9, 0.2), basis);
    const auto small = lift_two_particle(make_beam_splitter(0.9, 0.2), build_basis(Statistics::Boson, 1));
    // same-level sector n: states (p_n p_n), (p_n q_n), (q_n q_n)
    for (int n = 0; n < 3; ++n) {
        const std::size_t idx[] = {*basis.index_of(Mode{Site::P, n}, Mode{Site::P, n}), pq_index(basis, n, n),
            *basis.index_of(Mode{Site::Q, n}, Mode{Site::Q, n})};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(u(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j])) - small(i, j)) <= 1e-15);
    }
}

TEST_CASE("apply_unitary", "[scattering]")
{
    const auto basis = build_basis(Statistics::Boson, 1);
    const auto pq = DensityMatrix::basis_state(basis, pq_index(basis));

    const auto id = lift_two_particle(make_beam_splitter(0.0, 0.0), basis);
    CHECK(max_abs_difference(apply_unitary(id, pq), pq) == 0.0);

    const auto half = lift_two_particle(make_beam_splitter(pi / 4, 0.0), basis);
    const auto out = apply_unitary(half, pq);
    CHECK_THAT(out(0, 0).real(), WithinAbs(0.5, 1e-15));
    CHECK_THAT(out(1, 1).real(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(out(2, 2).real(), WithinAbs(0.5, 1e-15));
    CHECK_THAT(out.purity(), WithinAbs(1.0, 1e-12));
    CHECK(out.hermiticity_error() <= 1e-15);
    CHECK_NOTHROW(out.validate());

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    const auto big = build_basis(Statistics::Fermion, 4);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(big.dimension()));
    psi[3] = Complex(0.6, 0.0);
    psi[9] = Complex(0.0, 0.8);
    DensityMatrix rho = DensityMatrix::pure(big, psi);
    for (int k = 0; k < 10; ++k)
        rho = apply_unitary(lift_two_particle(make_beam_splitter(angle(rng), angle(rng)), big), rho);
    CHECK_THAT(rho.purity(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(rho.trace(), WithinAbs(1.0, 1e-12));
    CHECK_NOTHROW(rho.validate());

    CHECK_THROWS_AS(apply_unitary(half, DensityMatrix::basis_state(build_basis(Statistics::Fermion, 2), 0)), std::invalid_argument);
}

TEST_CASE("hamiltonian_matrix", "[scattering]")
{
    const auto zero = hamiltonian_matrix(build_basis(Statistics::Boson, 1), LevelSpectrum::equally_spaced(1));
    CHECK(zero.diagonal().cwiseAbs().maxCoeff() == 0.0);

    // L = 2 bosons, Delta = 1: level pairs (0,0) x3 -> 0, (0,1) x4 -> 1, (1,1) x3 -> 2
    const auto basis = build_basis(Statistics::Boson, 2);
    const auto h = hamiltonian_matrix(basis, LevelSpectrum::equally_spaced(2));
    std::map<double, int> counts;
    for (Eigen::Index i = 0; i < h.diagonal().size(); ++i)
        counts[h[i]] += 1;
    CHECK(counts == std::map<double, int>{{0.0, 3}, {1.0, 4}, {2.0, 3}});
    CHECK(h[static_cast<Eigen::Index>(pq_index(basis, 1, 1))] == 2.0);
    CHECK_THROWS_AS(hamiltonian_matrix(basis, LevelSpectrum::equally_spaced(3)), std::invalid_argument);
}

TEST_CASE("commutator_residual", "[scattering][property]")
{
    const auto one = build_basis(Statistics::Boson, 1);
    CHECK(commutator_residual(hamiltonian_matrix(one, LevelSpectrum::equally_spaced(1)), lift_two_particle(make_beam_splitter(0.7, 0.1), one))
        == 0.0);

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    for (int draw = 0; draw < 100; ++draw) {
        const auto stats = draw % 2 == 0 ? Statistics::Boson : Statistics::Fermion;
        const auto basis = build_basis(stats, 5);
        const auto u = lift_two_particle(make_beam_splitter(angle(rng), angle(rng)), basis);
        REQUIRE(commutator_residual(hamiltonian_matrix(basis, LevelSpectrum::equally_spaced(5)), u) <= 1e-12);
        REQUIRE(commutator_residual(hamiltonian_matrix(basis, random_spectrum(rng, 5)), u) <= 1e-12);
    }

    SECTION("negative control: one stray off-sector element")
    {
        const auto basis = build_basis(Statistics::Boson, 5);
        const auto u = lift_two_particle(make_beam_splitter(0.5, 0.3), basis);
        const auto bad = u.with_entry(static_cast<Eigen::Index>(pq_index(basis, 0, 0)), static_cast<Eigen::Index>(pq_index(basis, 0, 1)), 0.1);
        CHECK(commutator_residual(hamiltonian_matrix(basis, LevelSpectrum::equally_spaced(5)), bad) >= 0.09);
        CHECK(bad.unitarity_error() > 0.05);
    }
}

TEST_CASE("separation_invariance_residual", "[scattering][property]")
{
    {
        const auto basis = build_basis(Statistics::Boson, 1);
        const auto rho = thermal_density_matrix(basis, LevelSpectrum::equally_spaced(1), Beta::zero_temperature());
        for (double theta : {0.1, pi / 4, 1.3})
            CHECK(invariance_residual(rho, lift_two_particle(make_beam_splitter(theta, 0.5), basis)) <= 1e-14);
    }
    CHECK(separation_invariance_residual(LevelSpectrum::equally_spaced(4), Beta(1.0), Statistics::Fermion, make_beam_splitter(pi / 3, 0.0))
        <= 1e-12);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> angle(0.0, 2 * pi), beta(0.0, 20.0);
    for (int draw = 0; draw < 100; ++draw) {
        const auto stats = draw % 2 == 0 ? Statistics::Boson : Statistics::Fermion;
        const int levels = 1 + draw % 5;
        const auto spectrum = random_spectrum(rng, levels);
        const Beta b(beta(rng));
        REQUIRE(separation_invariance_residual(spectrum, b, stats, make_beam_splitter(angle(rng), angle(rng))) <= 1e-12);

        const auto basis = build_basis(stats, levels);
        std::vector<TwoParticleUnitary> chain;
        for (int k = 0; k < 5; ++k)
            chain.push_back(lift_two_particle(make_beam_splitter(angle(rng), angle(rng)), basis));
        REQUIRE(invariance_residual(thermal_density_matrix(basis, spectrum, b), chain) <= 1e-12);
    }

    SECTION("negative control: a non-equilibrium input is not invariant")
    // the pq population empties (1 -> 0), so the max-entry change is 1
    {
        const auto basis = build_basis(Statistics::Boson, 1);
        const auto pq = DensityMatrix::basis_state(basis, pq_index(basis));
        CHECK_THAT(invariance_residual(pq, lift_two_particle(make_beam_splitter(pi / 4, 0.0), basis)), WithinAbs(1.0, 1e-15));
    }
}

TEST_CASE("site exchange conjugates the lift by a permutation", "[scattering][property]")
{
    // swapping p <-> q maps S to X S X with X the Pauli flip
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    for (auto stats : {Statistics::Boson, Statistics::Fermion}) {
        const int levels = 3;
        const auto basis = build_basis(stats, levels);
        const auto s = make_beam_splitter(angle(rng), angle(rng));
        const auto flipped = BeamSplitter::from_amplitudes(s.r_prime(), s.t_prime(), s.r(), s.t());
        const Eigen::MatrixXcd u = dense(lift_two_particle(s, basis));
        const Eigen::MatrixXcd v = dense(lift_two_particle(flipped, basis));

        const auto d = static_cast<Eigen::Index>(basis.dimension());
        Eigen::MatrixXcd perm = Eigen::MatrixXcd::Zero(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto& st = basis[static_cast<std::size_t>(j)];
            const int a = st.first ^ 1, b = st.second ^ 1; // flip the site bit
            const auto i = static_cast<Eigen::Index>(*basis.index_of(a, b));
            // reordering a fermionic pair costs a sign
            perm(i, j) = (stats == Statistics::Fermion && a > b) ? -1.0 : 1.0;
        }
        CHECK((perm * u * perm.adjoint() - v).cwiseAbs().maxCoeff() <= 1e-14);

        const auto spectrum = random_spectrum(rng, levels);
        const auto h = hamiltonian_matrix(basis, spectrum);
        CHECK(commutator_residual(h, lift_two_particle(flipped, basis)) <= 1e-12);
        CHECK(separation_invariance_residual(spectrum, Beta(1.5), stats, flipped) <= 1e-12);
    }
}
