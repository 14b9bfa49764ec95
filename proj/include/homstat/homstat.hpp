#ifndef HOMSTAT_HOMSTAT_HPP
#define HOMSTAT_HOMSTAT_HPP

#include "homstat/spectrum.hpp"
#include "homstat/fock_basis.hpp"
#include "homstat/density_matrix.hpp"
#include "homstat/thermal_equilibrium.hpp"
#include "homstat/scattering.hpp"
#include "homstat/dephasing_dynamics.hpp"

#endif // HOMSTAT_HOMSTAT_HPP
