#pragma once

namespace pairscope {

// CODATA Boltzmann constant, used for all eV <-> K conversions.
inline constexpr double kBoltzmannEvPerK = 8.617333e-5;

inline constexpr double kPi = 3.14159265358979323846;

inline double ev_to_kelvin(double e_ev) { return e_ev / kBoltzmannEvPerK; }
inline double kelvin_to_ev(double t_k) { return t_k * kBoltzmannEvPerK; }

}  // namespace pairscope
