#ifndef DGFCT_EQUATIONS_HPP
#define DGFCT_EQUATIONS_HPP

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "common.hpp"

namespace dgfct
{

using StateVec = std::array<double, max_comp>;
using Vec2 = std::array<double, 2>;

// ---------------------------------------------------------------------------
// Velocity fields for linear advection
// ---------------------------------------------------------------------------

struct VelocityField
{
   enum class Kind { constant, rotation, linear };
   Kind kind = Kind::constant;
   Vec2 value = {1.0, 0.0};      // constant velocity
   Vec2 center = {0.5, 0.5};     // rotation: 2*pi*(yc - y, x - xc)
   double coef[2][3] = {};       // linear: b_k = coef[k][0] + coef[k][1] x + coef[k][2] y

   Vec2 eval(double x, double y) const
   {
      switch (kind)
      {
         case Kind::constant: return value;
         case Kind::rotation:
            return {2.0*M_PI*(center[1] - y), 2.0*M_PI*(x - center[0])};
         default:
            return {coef[0][0] + coef[0][1]*x + coef[0][2]*y,
                    coef[1][0] + coef[1][1]*x + coef[1][2]*y};
      }
   }
   bool is_constant() const { return kind == Kind::constant; }
};

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

struct Advection
{
   int dim = 1;
   VelocityField beta;
};

struct Burgers
{
   int dim = 1;
   Vec2 v = {1.0, 1.0};
};

// f(u) = 4u^2 / (4u^2 + (1-u)^2), 1D only. f' is maximized exactly over an
// interval by checking the endpoints and the real roots of f''.
struct BuckleyLeverett
{
   int dim = 1;
   std::array<double, 3> inflection; // roots of 10u^3 - 15u^2 + 1
   int n_inflection = 0;

   BuckleyLeverett();
   double flux(double u) const
   {
      double g = 4.0*u*u + sqr(1.0 - u);
      return 4.0*u*u/g;
   }
   double dflux(double u) const
   {
      double g = 4.0*u*u + sqr(1.0 - u);
      return 8.0*u*(1.0 - u)/(g*g);
   }
   double max_abs_dflux(double a, double b) const;
};

struct Euler
{
   int dim = 1;
   double gamma = 1.4;
   bool simple_wave_speed = false;   // |v.n|+c estimate instead of the
                                     // guaranteed two-rarefaction bound

   int ncomp() const { return dim + 2; }
   double pressure(const StateVec &u) const
   {
      double ke = 0.0;
      for (int k = 0; k < dim; k++) { ke += sqr(u[1 + k]); }
      return (gamma - 1.0)*(u[dim + 1] - 0.5*ke/u[0]);
   }
   double internal_energy(const StateVec &u) const   // specific
   {
      double ke = 0.0;
      for (int k = 0; k < dim; k++) { ke += sqr(u[1 + k]); }
      return u[dim + 1]/u[0] - 0.5*ke/(u[0]*u[0]);
   }
   double specific_entropy(const StateVec &u) const
   {
      return std::log(internal_energy(u))/(gamma - 1.0) - std::log(u[0]);
   }
   // Monotone surrogate for the specific entropy: sigma = rho e / rho^gamma,
   // s >= r  <=>  sigma >= exp((gamma-1) r).
   double entropy_surrogate(const StateVec &u) const
   {
      double ke = 0.0;
      for (int k = 0; k < dim; k++) { ke += sqr(u[1 + k]); }
      double rho_e = u[dim + 1] - 0.5*ke/u[0];
      return rho_e/std::pow(u[0], gamma);
   }
   bool admissible(const StateVec &u) const
   {
      if (!(u[0] > 0.0)) { return false; }
      return internal_energy(u) > 0.0;
   }
};

using Model = std::variant<Advection, Burgers, BuckleyLeverett, Euler>;

int model_ncomp(const Model &m);
int model_dim(const Model &m);
bool model_is_scalar(const Model &m);
std::string model_name(const Model &m);

// ---------------------------------------------------------------------------
// Fluxes and wave speeds. F is ncomp x dim, stored F[c*dim + k].
// ---------------------------------------------------------------------------

inline void flux(const Burgers &m, const StateVec &u, double *F)
{
   for (int k = 0; k < m.dim; k++) { F[k] = 0.5*u[0]*u[0]*m.v[k]; }
}

inline void flux(const BuckleyLeverett &m, const StateVec &u, double *F)
{
   F[0] = m.flux(u[0]);
}

// Advection flux depends on position; callers supply beta at the node.
inline void flux_advection(const Vec2 &beta, int dim, const StateVec &u,
                           double *F)
{
   for (int k = 0; k < dim; k++) { F[k] = beta[k]*u[0]; }
}

void flux(const Euler &m, const StateVec &u, double *F);

// Upper bound for the largest wave speed of the Riemann problem in direction
// n (unit). For Euler this is the guaranteed two-rarefaction bound unless the
// simple estimate was requested.
double wave_speed_bound(const Burgers &m, const StateVec &ul,
                        const StateVec &ur, const double *n);
double wave_speed_bound(const BuckleyLeverett &m, const StateVec &ul,
                        const StateVec &ur, const double *n);
double wave_speed_bound(const Euler &m, const StateVec &ul,
                        const StateVec &ur, const double *n);
inline double wave_speed_bound(const Advection &m, const Vec2 &beta,
                               const double *n)
{
   double bn = 0.0;
   for (int k = 0; k < m.dim; k++) { bn += beta[k]*n[k]; }
   return std::abs(bn);
}

// Generic dispatch used by tests and by closures that do not special-case
// advection; x is required only for the advection model.
double wave_speed_bound(const Model &m, const StateVec &ul, const StateVec &ur,
                        const double *n, const double *x = nullptr);
void model_flux(const Model &m, const StateVec &u, const double *x, double *F);

// ---------------------------------------------------------------------------
// Invariant-set predicates
// ---------------------------------------------------------------------------

struct InvariantBounds
{
   double lo = -infinity;    // scalar interval
   double hi = infinity;
   double entropy_min = -infinity;  // Euler: s >= entropy_min
};

bool invariant_check(const Model &m, const StateVec &u,
                     const InvariantBounds &b, double slack = 1e-12);

// ---------------------------------------------------------------------------
// Exact Riemann solver for the 1D Euler equations (reference solutions)
// ---------------------------------------------------------------------------

struct RiemannSolution
{
   double p_star = 0.0;
   double v_star = 0.0;
   double residual = 0.0;      // pressure-function residual at p_star
   double speed_min = 0.0;     // leftmost signal speed
   double speed_max = 0.0;     // rightmost signal speed
};

// States are (rho, rho v, rho E). Throws for vacuum-generating data.
RiemannSolution exact_riemann_euler(const Euler &m, const StateVec &ul,
                                    const StateVec &ur);
StateVec sample_riemann_euler(const Euler &m, const StateVec &ul,
                              const StateVec &ur, const RiemannSolution &sol,
                              double xi);

// Primitive (rho, v, p) -> conserved helper for 1D/2D Euler.
StateVec euler_state(const Euler &m, double rho, const Vec2 &v, double p);

} // namespace dgfct

#endif
