// Two bosons meet a 50:50 splitter, then walk through a dephased array.

#include <cstdio>
#include <numbers>

#include "homstat/homstat.hpp"

int main()
{
    using namespace homstat;

    const auto basis = build_basis(Statistics::Boson, 1);
    const auto u = lift_two_particle(make_beam_splitter(std::numbers::pi / 4, 0.0), basis);
    const auto pq = DensityMatrix::basis_state(basis, *basis.index_of(Mode{Site::P, 0}, Mode{Site::Q, 0}));

    std::printf("coincidence after one splitter: %.3g\n", p11_of_rho(apply_unitary(u, pq)));

    const auto traj = iterate_to_equilibrium(pq, u);
    for (const auto& r : traj.records)
        if (r.step < 6)
            std::printf("step %d: P(1,1) = %.6f  S = %.6f\n", r.step, r.p11, r.entropy);
    const auto& last = traj.final_record();
    std::printf("settled after %d steps: P(1,1) = %.12f  S = %.12f (ln 3 = %.12f)\n", traj.steps_to_converge, last.p11, last.entropy,
        std::log(3.0));

    const auto spectrum = LevelSpectrum::equally_spaced(40);
    std::printf("thermal P(1,1) at beta*Delta = ln 2, 40 levels: %.12f (closed form %.12f)\n",
        p11_numeric(spectrum, Beta(std::numbers::ln2), Statistics::Boson), p11_analytic(std::numbers::ln2, Statistics::Boson));
    return 0;
}
