#pragma once

// Littlewood-Paley blocks and the Sobolev / Besov / weighted norms.
//
// Block j multiplies the spectrum by phi(2^{-j} xi), phi(xi) = phi0(xi) - phi0(2 xi),
// and the zero block by phi0(xi). phi0 = 1 on |xi| <= 1 and vanishes for |xi| >= 2.

#include "hwlab/exponents.hpp"
#include "hwlab/grid.hpp"

namespace hwlab {

/// Radial profile psi(r): 1 for r <= 1, 0 for r >= 2, smooth and monotone between.
double bump_profile(double r);
/// phi(xi) at |xi| = r.
double annulus_bump(double r);

struct ZeroBlock {};
inline constexpr ZeroBlock zero_block{};

struct DyadicRange {
  /// Lowest block that touches a nonzero lattice frequency.
  int j_min = 0;
  /// Smallest j with 2^j >= k_max; blocks up to j_max complete the partition.
  int j_max = 0;
};

DyadicRange dyadic_range(const GridSpec& g);

/// Throws when j lies outside dyadic_range(f.grid()).
Field lp_project(const Field& f, int j);
Field lp_project(const Field& f, ZeroBlock);

/// Zero-padding factor for products of degree nu+1: ceil((nu+1)/2) rounded up to
/// a power of two for integer nu, 2 otherwise.
int padding_factor(double nu);

/// Physical-space L^q quadrature, q >= 1. For q = inf the maximum modulus is
/// taken on a 2x spectrally interpolated grid.
double lq_norm(const Field& f, Exponent q);

struct NormSpec {
  double gamma = 0.0;
  Exponent q = Exponent::finite(2.0);
  bool homogeneous = false;
  bool besov = false;
};

/// ||<Lambda>^gamma f||_{L^q} or ||Lambda^gamma f||_{L^q}; q >= 2.
double sobolev_norm(const Field& f, double gamma, bool homogeneous, Exponent q);

/// Inhomogeneous: ||P_0 f||_q + (sum_{j>=1} 2^{2 j gamma} ||P_j f||_q^2)^{1/2}.
/// Homogeneous: the l2 sum over every block in dyadic_range.
double besov_norm(const Field& f, double gamma, bool homogeneous, Exponent q);

double evaluate_norm(const Field& f, const NormSpec& spec);

/// sum_{|alpha| <= k} ||<x>^{k - |alpha|} D^alpha f||_{L^2}. The field must meet
/// the boundary decay guard, since the weights amplify wrap-around.
double weighted_norm_hkk(const Field& f, int k, double decay_guard = kDecayGuard);

struct ComparabilityBounds {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// c1 ||f||_{H.^gamma} <= ||f||_{B.^gamma_2} <= c2 ||f||_{H.^gamma} for fields whose
/// nonzero modes all lie inside the summed block range.
ComparabilityBounds besov_sobolev_bounds(double gamma, int mesh = 20000);

}  // namespace hwlab
