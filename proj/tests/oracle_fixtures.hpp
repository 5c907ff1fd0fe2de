#pragma once

// Coherent relative entropy instance drawn once (3-dim input, 2-dim output, rank-2 input
// state, random Gamma operators) with reference values from an independent convex solver.

#include "ssqt/linalg.hpp"

namespace fixtures {

inline ssqt::CMat qutrit_to_qubit_process() {
  ssqt::CMat m(6, 6);
  m <<
      ssqt::Cplx(0.037595826558376899, 0), ssqt::Cplx(0.045333349557291937, -0.033112156070481291), ssqt::Cplx(-0.0044212849343675401, 0.041072042071553766), ssqt::Cplx(0.0034970402579017064, 0.012657217323134608), ssqt::Cplx(0.031332604454767904, 0.0089282363881221447), ssqt::Cplx(0.0079103161541195649, -0.015439411822576809),
      ssqt::Cplx(0.045333349557291937, 0.033112156070481291), ssqt::Cplx(0.14543580156933944, 0), ssqt::Cplx(0.053960229506769139, -0.003481702272999215), ssqt::Cplx(0.005031143997084331, 0.054201860686651671), ssqt::Cplx(0.011945494278823202, 0.024134889545874335), ssqt::Cplx(-0.15399509317337096, -0.024518132922443894),
      ssqt::Cplx(-0.0044212849343675401, -0.041072042071553766), ssqt::Cplx(0.053960229506769139, 0.003481702272999215), ssqt::Cplx(0.23246649362342114, 0), ssqt::Cplx(0.0033658291503542463, 0.059792461969076408), ssqt::Cplx(-0.010438263658611021, -0.071651134934515859), ssqt::Cplx(-0.28200936696778578, -0.16796838820693535),
      ssqt::Cplx(0.0034970402579017064, -0.012657217323134608), ssqt::Cplx(0.005031143997084331, -0.054201860686651671), ssqt::Cplx(0.0033658291503542463, -0.059792461969076408), ssqt::Cplx(0.027781255910612035, 0), ssqt::Cplx(-0.0058498783290810872, -0.002019705699160222), ssqt::Cplx(-0.046344001888817571, 0.096501735792353244),
      ssqt::Cplx(0.031332604454767904, -0.0089282363881221447), ssqt::Cplx(0.011945494278823202, -0.024134889545874335), ssqt::Cplx(-0.010438263658611021, 0.071651134934515859), ssqt::Cplx(-0.0058498783290810872, 0.002019705699160222), ssqt::Cplx(0.036760976571196063, 0), ssqt::Cplx(0.057568811858095113, -0.051895047602709084),
      ssqt::Cplx(0.0079103161541195649, 0.015439411822576809), ssqt::Cplx(-0.15399509317337096, 0.024518132922443894), ssqt::Cplx(-0.28200936696778578, 0.16796838820693535), ssqt::Cplx(-0.046344001888817571, -0.096501735792353244), ssqt::Cplx(0.057568811858095113, 0.051895047602709084), ssqt::Cplx(0.51995964576705422, 0);
  return m;
}

inline ssqt::CMat qutrit_gamma_r() {
  ssqt::CMat m(3, 3);
  m <<
      ssqt::Cplx(0.83015322320064944, 0), ssqt::Cplx(0.14874274110155666, -0.25683582855428266), ssqt::Cplx(-0.15248026713089169, 0.14186976753759564),
      ssqt::Cplx(0.14874274110155666, 0.25683582855428266), ssqt::Cplx(0.79283614489424747, 0), ssqt::Cplx(0.19535457737995521, 0.073030147030493875),
      ssqt::Cplx(-0.15248026713089169, -0.14186976753759564), ssqt::Cplx(0.19535457737995521, -0.073030147030493875), ssqt::Cplx(0.9628047102106434, 0);
  return m;
}

inline ssqt::CMat qubit_gamma_out() {
  ssqt::CMat m(2, 2);
  m <<
      ssqt::Cplx(1.1138309923826646, 0), ssqt::Cplx(0.14970964983435209, -0.058050926401977551),
      ssqt::Cplx(0.14970964983435209, 0.058050926401977551), ssqt::Cplx(1.4440938336391591, 0);
  return m;
}

// -log2 alpha at epsilon = 0 and the restricted smooth value at epsilon = 0.1.
inline constexpr double kQutritToQubitValue = -0.1967759095;
inline constexpr double kQutritToQubitSmooth = 0.1041918836;

}  // namespace fixtures
