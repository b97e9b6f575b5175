#include "equations.hpp"

#include <algorithm>

namespace dgfct
{

BuckleyLeverett::BuckleyLeverett()
{
   // Roots of f''(u) = 0, i.e. 10u^3 - 15u^2 + 1 = 0 (three real roots).
   const double seeds[3] = {-0.25, 0.3, 1.45};
   n_inflection = 0;
   for (double s : seeds)
   {
      double u = s;
      for (int it = 0; it < 60; it++)
      {
         double f = 10.0*u*u*u - 15.0*u*u + 1.0;
         double df = 30.0*u*u - 30.0*u;
         double du = f/df;
         u -= du;
         if (std::abs(du) < 1e-15) { break; }
      }
      inflection[n_inflection++] = u;
   }
}

double BuckleyLeverett::max_abs_dflux(double a, double b) const
{
   if (a > b) { std::swap(a, b); }
   double m = std::max(std::abs(dflux(a)), std::abs(dflux(b)));
   for (int i = 0; i < n_inflection; i++)
   {
      double u = inflection[i];
      if (u > a && u < b) { m = std::max(m, std::abs(dflux(u))); }
   }
   return m;
}

int model_ncomp(const Model &m)
{
   return std::visit([](const auto &mm) -> int
   {
      using T = std::decay_t<decltype(mm)>;
      if constexpr (std::is_same_v<T, Euler>) { return mm.dim + 2; }
      else { return 1; }
   }, m);
}

int model_dim(const Model &m)
{
   return std::visit([](const auto &mm) { return mm.dim; }, m);
}

bool model_is_scalar(const Model &m)
{
   return !std::holds_alternative<Euler>(m);
}

std::string model_name(const Model &m)
{
   if (std::holds_alternative<Advection>(m)) { return "advection"; }
   if (std::holds_alternative<Burgers>(m)) { return "burgers"; }
   if (std::holds_alternative<BuckleyLeverett>(m)) { return "buckley_leverett"; }
   return "euler";
}

void flux(const Euler &m, const StateVec &u, double *F)
{
   require(u[0] > 0.0, errc::inadmissible_state,
           "euler flux: non-positive density");
   const int d = m.dim;
   double p = m.pressure(u);
   double H_rho = u[d + 1] + p;   // rho H
   for (int k = 0; k < d; k++)
   {
      double vk = u[1 + k]/u[0];
      F[0*d + k] = u[1 + k];
      for (int j = 0; j < d; j++)
      {
         F[(1 + j)*d + k] = u[1 + j]*vk + (j == k ? p : 0.0);
      }
      F[(d + 1)*d + k] = H_rho*vk;
   }
}

double wave_speed_bound(const Burgers &m, const StateVec &ul,
                        const StateVec &ur, const double *n)
{
   double vn = 0.0;
   for (int k = 0; k < m.dim; k++) { vn += m.v[k]*n[k]; }
   return std::abs(vn)*std::max(std::abs(ul[0]), std::abs(ur[0]));
}

double wave_speed_bound(const BuckleyLeverett &m, const StateVec &ul,
                        const StateVec &ur, const double *n)
{
   return std::abs(n[0])*m.max_abs_dflux(ul[0], ur[0]);
}

double wave_speed_bound(const Euler &m, const StateVec &ul,
                        const StateVec &ur, const double *n)
{
   const int d = m.dim;
   const double g = m.gamma;
   double pl = m.pressure(ul), pr = m.pressure(ur);
   require(ul[0] > 0.0 && ur[0] > 0.0 && pl > 0.0 && pr > 0.0,
           errc::inadmissible_state, "euler wave speed: inadmissible state");
   double al = 0.0, ar = 0.0;
   for (int k = 0; k < d; k++)
   {
      al += n[k]*ul[1 + k]/ul[0];
      ar += n[k]*ur[1 + k]/ur[0];
   }
   double cl = std::sqrt(g*pl/ul[0]), cr = std::sqrt(g*pr/ur[0]);
   if (m.simple_wave_speed)
   {
      return std::max(std::abs(al) + cl, std::abs(ar) + cr);
   }
   // Two-rarefaction pressure estimate; an upper bound for the star pressure
   // when gamma <= 5/3, which makes the resulting speed a guaranteed bound.
   double expo = (g - 1.0)/(2.0*g);
   double num = cl + cr - 0.5*(g - 1.0)*(ar - al);
   double p_star = 0.0;
   if (num > 0.0)
   {
      double den = cl*std::pow(pl, -expo) + cr*std::pow(pr, -expo);
      p_star = std::pow(num/den, 1.0/expo);
   }
   double fac = 0.5*(g + 1.0)/g;
   double lam_l = al - cl*std::sqrt(1.0 + fac*std::max((p_star - pl)/pl, 0.0));
   double lam_r = ar + cr*std::sqrt(1.0 + fac*std::max((p_star - pr)/pr, 0.0));
   return std::max(std::abs(lam_l), std::abs(lam_r));
}

double wave_speed_bound(const Model &m, const StateVec &ul, const StateVec &ur,
                        const double *n, const double *x)
{
   return std::visit([&](const auto &mm) -> double
   {
      using T = std::decay_t<decltype(mm)>;
      if constexpr (std::is_same_v<T, Advection>)
      {
         Vec2 b = x ? mm.beta.eval(x[0], mm.dim > 1 ? x[1] : 0.0)
                  : mm.beta.value;
         return wave_speed_bound(mm, b, n);
      }
      else { return wave_speed_bound(mm, ul, ur, n); }
   }, m);
}

void model_flux(const Model &m, const StateVec &u, const double *x, double *F)
{
   std::visit([&](const auto &mm)
   {
      using T = std::decay_t<decltype(mm)>;
      if constexpr (std::is_same_v<T, Advection>)
      {
         Vec2 b = x ? mm.beta.eval(x[0], mm.dim > 1 ? x[1] : 0.0)
                  : mm.beta.value;
         flux_advection(b, mm.dim, u, F);
      }
      else { flux(mm, u, F); }
   }, m);
}

bool invariant_check(const Model &m, const StateVec &u,
                     const InvariantBounds &b, double slack)
{
   if (const Euler *e = std::get_if<Euler>(&m))
   {
      if (!(u[0] > 0.0)) { return false; }
      if (!(e->internal_energy(u) > 0.0)) { return false; }
      if (b.entropy_min > -infinity)
      {
         return e->specific_entropy(u) >= b.entropy_min - slack;
      }
      return true;
   }
   return u[0] >= b.lo - slack && u[0] <= b.hi + slack;
}

// ---------------------------------------------------------------------------
// Exact Riemann solver (Godunov/Toro pressure-function construction)
// ---------------------------------------------------------------------------

namespace
{

struct Side
{
   double rho, v, p, c;
};

// f_K(p) and derivative for one side of the pressure equation.
void pressure_fn(const Side &s, double g, double p, double &f, double &df)
{
   if (p > s.p)   // shock
   {
      double A = 2.0/((g + 1.0)*s.rho);
      double B = (g - 1.0)/(g + 1.0)*s.p;
      double q = std::sqrt(A/(p + B));
      f = (p - s.p)*q;
      df = q*(1.0 - 0.5*(p - s.p)/(p + B));
   }
   else           // rarefaction
   {
      double pr = p/s.p;
      f = 2.0*s.c/(g - 1.0)*(std::pow(pr, (g - 1.0)/(2.0*g)) - 1.0);
      df = 1.0/(s.rho*s.c)*std::pow(pr, -(g + 1.0)/(2.0*g));
   }
}

} // namespace

StateVec euler_state(const Euler &m, double rho, const Vec2 &v, double p)
{
   StateVec u = {};
   u[0] = rho;
   double ke = 0.0;
   for (int k = 0; k < m.dim; k++)
   {
      u[1 + k] = rho*v[k];
      ke += v[k]*v[k];
   }
   u[m.dim + 1] = p/(m.gamma - 1.0) + 0.5*rho*ke;
   return u;
}

RiemannSolution exact_riemann_euler(const Euler &m, const StateVec &ul,
                                    const StateVec &ur)
{
   require(m.dim == 1, errc::invalid_argument, "exact riemann solver is 1D");
   const double g = m.gamma;
   Side L = {ul[0], ul[1]/ul[0], m.pressure(ul), 0.0};
   Side R = {ur[0], ur[1]/ur[0], m.pressure(ur), 0.0};
   require(L.rho > 0.0 && R.rho > 0.0 && L.p > 0.0 && R.p > 0.0,
           errc::inadmissible_state, "riemann: inadmissible data");
   L.c = std::sqrt(g*L.p/L.rho);
   R.c = std::sqrt(g*R.p/R.rho);
   double dv = R.v - L.v;
   require(2.0/(g - 1.0)*(L.c + R.c) > dv, errc::inadmissible_state,
           "riemann: vacuum-generating data");

   // Newton on f_L + f_R + dv = 0 from a positive guess, bisection-guarded.
   double p = std::max(1e-14, 0.5*(L.p + R.p) - 0.125*dv*(L.rho + R.rho)*(L.c + R.c)/2.0);
   double plo = 1e-300, phi = infinity;
   double fl, dfl, fr, dfr;
   for (int it = 0; it < 200; it++)
   {
      pressure_fn(L, g, p, fl, dfl);
      pressure_fn(R, g, p, fr, dfr);
      double f = fl + fr + dv;
      if (f > 0.0) { phi = p; } else { plo = p; }
      double dp = f/(dfl + dfr);
      double pn = p - dp;
      if (!(pn > plo && pn < phi)) { pn = std::isinf(phi) ? 2.0*p : 0.5*(plo + phi); }
      if (std::abs(pn - p) <= 1e-14*p) { p = pn; break; }
      p = pn;
   }
   pressure_fn(L, g, p, fl, dfl);
   pressure_fn(R, g, p, fr, dfr);
   RiemannSolution sol;
   sol.p_star = p;
   sol.residual = fl + fr + dv;
   sol.v_star = 0.5*(L.v + R.v) + 0.5*(fr - fl);
   // Extreme signal speeds.
   if (p > L.p)
   {
      sol.speed_min = L.v - L.c*std::sqrt((g + 1.0)/(2.0*g)*p/L.p + (g - 1.0)/(2.0*g));
   }
   else { sol.speed_min = L.v - L.c; }
   if (p > R.p)
   {
      sol.speed_max = R.v + R.c*std::sqrt((g + 1.0)/(2.0*g)*p/R.p + (g - 1.0)/(2.0*g));
   }
   else { sol.speed_max = R.v + R.c; }
   return sol;
}

StateVec sample_riemann_euler(const Euler &m, const StateVec &ul,
                              const StateVec &ur, const RiemannSolution &sol,
                              double xi)
{
   const double g = m.gamma;
   Side L = {ul[0], ul[1]/ul[0], m.pressure(ul), 0.0};
   Side R = {ur[0], ur[1]/ur[0], m.pressure(ur), 0.0};
   L.c = std::sqrt(g*L.p/L.rho);
   R.c = std::sqrt(g*R.p/R.rho);
   const double p = sol.p_star, vs = sol.v_star;
   double rho, v, pr;
   if (xi <= vs)   // left of contact
   {
      if (p > L.p)   // left shock
      {
         double sl = sol.speed_min;
         if (xi <= sl) { rho = L.rho; v = L.v; pr = L.p; }
         else
         {
            double r = p/L.p;
            rho = L.rho*(r + (g - 1.0)/(g + 1.0))/((g - 1.0)/(g + 1.0)*r + 1.0);
            v = vs;
            pr = p;
         }
      }
      else           // left rarefaction
      {
         double head = L.v - L.c;
         double cs = L.c*std::pow(p/L.p, (g - 1.0)/(2.0*g));
         double tail = vs - cs;
         if (xi <= head) { rho = L.rho; v = L.v; pr = L.p; }
         else if (xi >= tail)
         {
            rho = L.rho*std::pow(p/L.p, 1.0/g);
            v = vs;
            pr = p;
         }
         else           // inside fan
         {
            double c = (2.0*L.c + (g - 1.0)*(L.v - xi))/(g + 1.0);
            v = xi + c;
            rho = L.rho*std::pow(c/L.c, 2.0/(g - 1.0));
            pr = L.p*std::pow(c/L.c, 2.0*g/(g - 1.0));
         }
      }
   }
   else            // right of contact
   {
      if (p > R.p)   // right shock
      {
         double sr = sol.speed_max;
         if (xi >= sr) { rho = R.rho; v = R.v; pr = R.p; }
         else
         {
            double r = p/R.p;
            rho = R.rho*(r + (g - 1.0)/(g + 1.0))/((g - 1.0)/(g + 1.0)*r + 1.0);
            v = vs;
            pr = p;
         }
      }
      else           // right rarefaction
      {
         double head = R.v + R.c;
         double cs = R.c*std::pow(p/R.p, (g - 1.0)/(2.0*g));
         double tail = vs + cs;
         if (xi >= head) { rho = R.rho; v = R.v; pr = R.p; }
         else if (xi <= tail)
         {
            rho = R.rho*std::pow(p/R.p, 1.0/g);
            v = vs;
            pr = p;
         }
         else
         {
            double c = (2.0*R.c - (g - 1.0)*(R.v - xi))/(g + 1.0);
            v = xi - c;
            rho = R.rho*std::pow(c/R.c, 2.0/(g - 1.0));
            pr = R.p*std::pow(c/R.c, 2.0*g/(g - 1.0));
         }
      }
   }
   return euler_state(m, rho, {v, 0.0}, pr);
}

} // namespace dgfct
