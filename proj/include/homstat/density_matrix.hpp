#ifndef HOMSTAT_DENSITY_MATRIX_HPP
#define HOMSTAT_DENSITY_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "homstat/fock_basis.hpp"

namespace homstat {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

namespace detail {

inline double max_abs_entry(const SparseMatrix& m)
{
    double out = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            out = std::max(out, std::abs(it.value()));
    return out;
}

inline double max_abs_difference(const SparseMatrix& a, const SparseMatrix& b)
{
    return max_abs_entry(SparseMatrix(a - b));
}

// Groups indices connected through non-zero entries; each group is an
// invariant subspace of a Hermitian matrix with that sparsity pattern.
inline std::vector<std::vector<int>> connected_blocks(const SparseMatrix& m)
{
    std::vector<int> parent(static_cast<std::size_t>(m.rows()));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            if (it.value() != Complex(0.0))
                parent[find(static_cast<int>(it.row()))] = find(static_cast<int>(it.col()));

    std::vector<std::vector<int>> by_root(parent.size());
    for (int i = 0; i < static_cast<int>(parent.size()); ++i)
        by_root[find(i)].push_back(i);
    std::vector<std::vector<int>> blocks;
    for (auto& b : by_root)
        if (!b.empty())
            blocks.push_back(std::move(b));
    return blocks;
}

} // namespace detail

/// Two-particle density matrix over a canonical basis. Storage is sparse:
/// every state this project produces is block-diagonal in level sectors.
class DensityMatrix {
public:
    DensityMatrix(TwoParticleBasis basis, SparseMatrix matrix)
        : basis_(std::move(basis)), matrix_(std::move(matrix))
    {
        const auto d = static_cast<Eigen::Index>(basis_.dimension());
        if (matrix_.rows() != d || matrix_.cols() != d)
            throw std::invalid_argument("DensityMatrix: matrix shape does not match basis dimension");
        matrix_.makeCompressed();
    }

    static DensityMatrix diagonal(TwoParticleBasis basis, std::span<const double> weights)
    {
        const auto d = static_cast<Eigen::Index>(basis.dimension());
        if (static_cast<Eigen::Index>(weights.size()) != d)
            throw std::invalid_argument("DensityMatrix::diagonal: weight count does not match basis dimension");
        SparseMatrix m(d, d);
        m.reserve(Eigen::VectorXi::Constant(d, 1));
        for (Eigen::Index i = 0; i < d; ++i)
            if (weights[static_cast<std::size_t>(i)] != 0.0)
                m.insert(i, i) = weights[static_cast<std::size_t>(i)];
        return DensityMatrix(std::move(basis), std::move(m));
    }

    /// |psi><psi| for a normalized amplitude vector.
    static DensityMatrix pure(TwoParticleBasis basis, const Eigen::VectorXcd& psi)
    {
        const auto d = static_cast<Eigen::Index>(basis.dimension());
        if (psi.size() != d)
            throw std::invalid_argument("DensityMatrix::pure: amplitude count does not match basis dimension");
        if (std::abs(psi.squaredNorm() - 1.0) > 1e-12)
            throw std::invalid_argument("DensityMatrix::pure: state is not normalized");
        std::vector<Eigen::Triplet<Complex>> t;
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                if (psi[i] != Complex(0.0) && psi[j] != Complex(0.0))
                    t.emplace_back(i, j, psi[i] * std::conj(psi[j]));
        SparseMatrix m(d, d);
        m.setFromTriplets(t.begin(), t.end());
        return DensityMatrix(std::move(basis), std::move(m));
    }

    /// Projector onto a single basis state.
    static DensityMatrix basis_state(TwoParticleBasis basis, std::size_t index)
    {
        std::vector<double> w(basis.dimension(), 0.0);
        w.at(index) = 1.0;
        return diagonal(std::move(basis), w);
    }

    const TwoParticleBasis& basis() const { return basis_; }
    const SparseMatrix& matrix() const { return matrix_; }
    std::size_t dimension() const { return basis_.dimension(); }

    Complex operator()(Eigen::Index i, Eigen::Index j) const { return matrix_.coeff(i, j); }

    Eigen::VectorXd populations() const
    {
        Eigen::VectorXd p(matrix_.rows());
        for (Eigen::Index i = 0; i < p.size(); ++i)
            p[i] = matrix_.coeff(i, i).real();
        return p;
    }

    double trace() const { return populations().sum(); }

    bool is_diagonal() const
    {
        for (int k = 0; k < matrix_.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it)
                if (it.row() != it.col() && it.value() != Complex(0.0))
                    return false;
        return true;
    }

    double hermiticity_error() const
    {
        return detail::max_abs_difference(matrix_, SparseMatrix(matrix_.adjoint()));
    }

    /// Tr(rho^2).
    double purity() const
    {
        double s = 0.0;
        for (int k = 0; k < matrix_.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it)
                s += std::norm(it.value());
        return s;
    }

    /// Eigenvalues in ascending order. Diagonal input is read off directly;
    /// otherwise each connected block of the sparsity pattern is diagonalized.
    std::vector<double> eigenvalues() const
    {
        std::vector<double> out;
        out.reserve(dimension());
        if (is_diagonal()) {
            const Eigen::VectorXd p = populations();
            out.assign(p.data(), p.data() + p.size());
        } else {
            for (const auto& block : detail::connected_blocks(matrix_)) {
                const auto n = static_cast<Eigen::Index>(block.size());
                if (n == 1) {
                    out.push_back(matrix_.coeff(block[0], block[0]).real());
                    continue;
                }
                Eigen::MatrixXcd dense(n, n);
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < n; ++j)
                        dense(i, j) = matrix_.coeff(block[i], block[j]);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense, Eigen::EigenvaluesOnly);
                for (Eigen::Index i = 0; i < n; ++i)
                    out.push_back(solver.eigenvalues()[i]);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Throws std::domain_error unless Hermitian, unit-trace and PSD within tolerance.
    void validate(double tol = 1e-12, double eigen_floor = -1e-10) const
    {
        if (hermiticity_error() > tol)
            throw std::domain_error("DensityMatrix: not Hermitian");
        if (std::abs(trace() - 1.0) > tol)
            throw std::domain_error("DensityMatrix: trace is not 1");
        const auto ev = eigenvalues();
        if (!ev.empty() && ev.front() < eigen_floor)
            throw std::domain_error("DensityMatrix: negative eigenvalue");
    }

private:
    TwoParticleBasis basis_;
    SparseMatrix matrix_;
};

/// Max-entry magnitude of a - b.
inline double max_abs_difference(const DensityMatrix& a, const DensityMatrix& b)
{
    if (!(a.basis() == b.basis()))
        throw std::invalid_argument("max_abs_difference: basis mismatch");
    return detail::max_abs_difference(a.matrix(), b.matrix());
}

} // namespace homstat

#endif // HOMSTAT_DENSITY_MATRIX_HPP
