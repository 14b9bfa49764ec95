#ifndef HOMSTAT_SCATTERING_HPP
#define HOMSTAT_SCATTERING_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "homstat/density_matrix.hpp"
#include "homstat/fock_basis.hpp"
#include "homstat/spectrum.hpp"
#include "homstat/thermal_equilibrium.hpp"

namespace homstat {

/// Level-independent single-particle splitter S = [[r, t'], [t, r']].
/// Column index is the input site, row index the output site.
class BeamSplitter {
public:
    /// S = [[cos th, i e^{i ph} sin th], [i e^{-i ph} sin th, cos th]], R = cos^2 th.
    static BeamSplitter from_angles(double theta, double phase)
    {
        const Complex i(0.0, 1.0);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        BeamSplitter b;
        b.r_ = c;
        b.r_prime_ = c;
        b.t_prime_ = i * std::exp(i * phase) * s;
        b.t_ = i * std::exp(-i * phase) * s;
        return b;
    }

    /// Raw amplitudes; rejects anything that is not unitary to `tol`.
    static BeamSplitter from_amplitudes(Complex r, Complex t, Complex r_prime, Complex t_prime, double tol = 1e-12)
    {
        BeamSplitter b;
        b.r_ = r;
        b.t_ = t;
        b.r_prime_ = r_prime;
        b.t_prime_ = t_prime;
        const Eigen::Matrix2cd s = b.matrix();
        const double err = (s.adjoint() * s - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
        if (!(err <= tol))
            throw std::invalid_argument("BeamSplitter: amplitudes do not form a unitary matrix");
        return b;
    }

    Complex r() const { return r_; }
    Complex t() const { return t_; }
    Complex r_prime() const { return r_prime_; }
    Complex t_prime() const { return t_prime_; }

    Eigen::Matrix2cd matrix() const
    {
        Eigen::Matrix2cd s;
        s << r_, t_prime_, t_, r_prime_;
        return s;
    }

    Complex element(Site out, Site in) const
    {
        if (in == Site::P)
            return out == Site::P ? r_ : t_;
        return out == Site::P ? t_prime_ : r_prime_;
    }

    double reflectance() const { return std::norm(r_); }
    double transmittance() const { return std::norm(t_); }

private:
    BeamSplitter() = default;

    Complex r_{1.0};
    Complex t_{0.0};
    Complex r_prime_{1.0};
    Complex t_prime_{0.0};
};

inline BeamSplitter make_beam_splitter(double theta, double phase)
{
    return BeamSplitter::from_angles(theta, phase);
}

/// Operator on the two-particle space. Produced unitary by lift_two_particle;
/// the raw constructor does not check, so it can also hold test counterexamples.
class TwoParticleUnitary {
public:
    TwoParticleUnitary(TwoParticleBasis basis, SparseMatrix matrix, std::optional<BeamSplitter> splitter = std::nullopt)
        : basis_(std::move(basis)), matrix_(std::move(matrix)), splitter_(splitter)
    {
        const auto d = static_cast<Eigen::Index>(basis_.dimension());
        if (matrix_.rows() != d || matrix_.cols() != d)
            throw std::invalid_argument("TwoParticleUnitary: matrix shape does not match basis dimension");
        matrix_.makeCompressed();
    }

    const TwoParticleBasis& basis() const { return basis_; }
    const SparseMatrix& matrix() const { return matrix_; }

    /// The single-particle splitter this operator was lifted from, if any.
    const std::optional<BeamSplitter>& splitter() const { return splitter_; }

    Complex operator()(Eigen::Index i, Eigen::Index j) const { return matrix_.coeff(i, j); }

    double unitarity_error() const
    {
        SparseMatrix id(matrix_.rows(), matrix_.cols());
        id.setIdentity();
        return detail::max_abs_difference(SparseMatrix(SparseMatrix(matrix_.adjoint()) * matrix_), id);
    }

    /// Copy with one entry overwritten.
    TwoParticleUnitary with_entry(Eigen::Index row, Eigen::Index col, Complex value) const
    {
        SparseMatrix m = matrix_;
        m.coeffRef(row, col) = value;
        return TwoParticleUnitary(basis_, std::move(m));
    }

private:
    TwoParticleBasis basis_;
    SparseMatrix matrix_;
    std::optional<BeamSplitter> splitter_;
};

/// Induced action of the splitter on the (anti)symmetrized two-particle space:
/// c+_{s,n} -> sum_{s'} S(s', s) c+_{s',n} applied to both creation operators.
/// Each output pair is brought to canonical order (a fermionic swap flips the
/// sign, a Pauli-blocked pair vanishes) and the stored state norms convert
/// between operator products and normalized basis states.
inline TwoParticleUnitary lift_two_particle(const BeamSplitter& splitter, const TwoParticleBasis& basis)
{
    const bool fermion = basis.statistics() == Statistics::Fermion;
    const auto d = static_cast<Eigen::Index>(basis.dimension());
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(basis.dimension() * 4);

    constexpr Site sites[] = {Site::P, Site::Q};
    for (Eigen::Index col = 0; col < d; ++col) {
        const TwoParticleState& in = basis[static_cast<std::size_t>(col)];
        const Mode m1 = in.first_mode();
        const Mode m2 = in.second_mode();
        for (Site s1 : sites) {
            for (Site s2 : sites) {
                int a = Mode{s1, m1.level}.flat();
                int b = Mode{s2, m2.level}.flat();
                Complex amp = in.norm * splitter.element(s1, m1.site) * splitter.element(s2, m2.site);
                if (a == b && fermion)
                    continue;
                if (a > b) {
                    std::swap(a, b);
                    if (fermion)
                        amp = -amp;
                }
                const auto row = basis.index_of(a, b);
                entries.emplace_back(static_cast<Eigen::Index>(*row), col, amp / basis[*row].norm);
            }
        }
    }
    SparseMatrix m(d, d);
    m.setFromTriplets(entries.begin(), entries.end());
    m.prune([](Eigen::Index, Eigen::Index, const Complex& v) { return v != Complex(0.0); });
    return TwoParticleUnitary(basis, std::move(m), splitter);
}

/// a * b: apply b, then a.
inline TwoParticleUnitary compose(const TwoParticleUnitary& a, const TwoParticleUnitary& b)
{
    if (!(a.basis() == b.basis()))
        throw std::invalid_argument("compose: basis mismatch");
    return TwoParticleUnitary(a.basis(), SparseMatrix(a.matrix() * b.matrix()));
}

/// U rho U+.
inline DensityMatrix apply_unitary(const TwoParticleUnitary& u, const DensityMatrix& rho)
{
    if (!(u.basis() == rho.basis()))
        throw std::invalid_argument("apply_unitary: basis mismatch");
    const SparseMatrix left = u.matrix() * rho.matrix();
    SparseMatrix out = left * SparseMatrix(u.matrix().adjoint());
    return DensityMatrix(rho.basis(), std::move(out));
}

/// H = sum_n eps_n (n_{p,n} + n_{q,n}); diagonal in the occupation basis.
class HamiltonianMatrix {
public:
    HamiltonianMatrix(TwoParticleBasis basis, Eigen::VectorXd diagonal)
        : basis_(std::move(basis)), diagonal_(std::move(diagonal))
    {
        if (diagonal_.size() != static_cast<Eigen::Index>(basis_.dimension()))
            throw std::invalid_argument("HamiltonianMatrix: diagonal length does not match basis dimension");
    }

    const TwoParticleBasis& basis() const { return basis_; }
    const Eigen::VectorXd& diagonal() const { return diagonal_; }
    double operator[](Eigen::Index i) const { return diagonal_[i]; }

private:
    TwoParticleBasis basis_;
    Eigen::VectorXd diagonal_;
};

inline HamiltonianMatrix hamiltonian_matrix(const TwoParticleBasis& basis, const LevelSpectrum& spectrum)
{
    detail::require_matching(basis, spectrum);
    Eigen::VectorXd h(static_cast<Eigen::Index>(basis.dimension()));
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        h[static_cast<Eigen::Index>(i)] = state_energy(basis[i], spectrum);
    return HamiltonianMatrix(basis, std::move(h));
}

/// max |(HU - UH)_ij| = max |(h_i - h_j) U_ij| for diagonal H.
inline double commutator_residual(const HamiltonianMatrix& h, const TwoParticleUnitary& u)
{
    if (!(h.basis() == u.basis()))
        throw std::invalid_argument("commutator_residual: basis mismatch");
    double out = 0.0;
    const SparseMatrix& m = u.matrix();
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            out = std::max(out, std::abs((h[it.row()] - h[it.col()]) * it.value()));
    return out;
}

/// max |rho_out - rho_in| after passing rho through each operator in turn.
inline double invariance_residual(const DensityMatrix& rho, std::span<const TwoParticleUnitary> sequence)
{
    DensityMatrix out = rho;
    for (const auto& u : sequence)
        out = apply_unitary(u, out);
    return max_abs_difference(out, rho);
}

inline double invariance_residual(const DensityMatrix& rho, const TwoParticleUnitary& u)
{
    return invariance_residual(rho, std::span<const TwoParticleUnitary>(&u, 1));
}

/// Thermal state of the given spectrum, separated by one splitter; returns
/// the max-entry change of the density matrix.
inline double separation_invariance_residual(const LevelSpectrum& spectrum, Beta beta, Statistics statistics, const BeamSplitter& splitter)
{
    const TwoParticleBasis basis = build_basis(statistics, static_cast<int>(spectrum.size()));
    const DensityMatrix rho_in = thermal_density_matrix(basis, spectrum, beta);
    return invariance_residual(rho_in, lift_two_particle(splitter, basis));
}

} // namespace homstat

#endif // HOMSTAT_SCATTERING_HPP
