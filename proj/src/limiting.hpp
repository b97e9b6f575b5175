#ifndef DGFCT_LIMITING_HPP
#define DGFCT_LIMITING_HPP

#include "equations.hpp"
#include "tensor_ops.hpp"

namespace dgfct
{

// Smoothness ramp: 0 where the modal indicator says smooth, 1 where rough,
// sinusoidal in between.
double smoothness_factor(double s_K, double s0, double kappa);

// Default indicator threshold, s0 ~ log10(p^-4).
double smoothness_s0(int p);

namespace limiting
{

// Zalesak ratio min(1, Q/P) with a tie-break returning 1 for vanishing P.
// P and Q carry the same sign by construction.
inline double zalesak_ratio(double Q, double P, double thresh)
{
   double ap = std::abs(P);
   if (ap <= thresh) { return 1.0; }
   double r = std::abs(Q)/ap;
   return r < 1.0 ? r : 1.0;
}

// Provisional coefficients for the elementwise Zalesak limiter acting on the
// `comp` component of the total antidiffusive residuals r_tot (nn x nc).
// Returns the elementwise coefficient min_i alpha_i.
double zalesak_elementwise(int nn, int nc, int comp, const double *r_tot,
                           const double *uL, const double *mass, double dt,
                           const double *bmin, const double *bmax);

// Nodal provisional coefficients from the adjacent subcell face fluxes.
// rbar[k] has layout [(line*p + s)*nc + c]; alpha_tilde is filled per node.
void zalesak_subcell(const RefOps &r, int nc, int comp,
                     const double *const rbar[2], const double *uL,
                     const double *mass, double dt, const double *bmin,
                     const double *bmax, double *alpha_tilde);

// Largest a in [0,1] with base + a*dir admissible: rho > 0, rho e > 0 and,
// when sigma_min > -inf, rho e >= sigma_min rho^gamma (the entropy minimum
// written through the monotone surrogate sigma = rho e / rho^gamma).
// Newton iteration on the concave constraint residual with a bisection
// safeguard; the returned value is always feasible.
double convex_line_search(const Euler &m, const StateVec &base,
                          const StateVec &dir, double sigma_min);

// Largest admissible a for a scalar interval constraint lo <= u <= hi
// (closed form; oracle and elementwise convex path).
double interval_line_search(double base, double dir, double lo, double hi);

} // namespace limiting

} // namespace dgfct

#endif
