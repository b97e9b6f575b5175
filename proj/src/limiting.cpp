#include "limiting.hpp"

#include <algorithm>
#include <cmath>

namespace dgfct
{

double smoothness_s0(int p)
{
   return p >= 1 ? -4.0*std::log10(double(p)) : infinity;
}

double smoothness_factor(double s_K, double s0, double kappa)
{
   if (s_K < s0 - kappa) { return 0.0; }
   if (s_K > s0 + kappa) { return 1.0; }
   return 0.5 + 0.5*std::sin(0.5*M_PI*(s_K - s0)/kappa);
}

namespace limiting
{

namespace
{
inline double p_thresh(double mass, double dt, double u)
{
   return 1e-14*(mass/dt)*std::max(1.0, std::abs(u));
}
}

double zalesak_elementwise(int nn, int nc, int comp, const double *r_tot,
                           const double *uL, const double *mass, double dt,
                           const double *bmin, const double *bmax)
{
   double alpha = 1.0;
   for (int i = 0; i < nn; i++)
   {
      double ri = r_tot[i*nc + comp];
      double u = uL[i*nc + comp];
      double th = p_thresh(mass[i], dt, u);
      double a;
      if (ri > 0.0)
      {
         double Q = std::max(0.0, (mass[i]/dt)*(bmax[i] - u));
         a = zalesak_ratio(Q, ri, th);
      }
      else if (ri < 0.0)
      {
         double Q = std::min(0.0, (mass[i]/dt)*(bmin[i] - u));
         a = zalesak_ratio(Q, ri, th);
      }
      else { a = 1.0; }
      alpha = std::min(alpha, a);
   }
   return alpha;
}

void zalesak_subcell(const RefOps &r, int nc, int comp,
                     const double *const rbar[2], const double *uL,
                     const double *mass, double dt, const double *bmin,
                     const double *bmax, double *alpha_tilde)
{
   const int nn = r.nn, p = r.p;
   for (int i = 0; i < nn; i++)
   {
      double Pp = 0.0, Pm = 0.0;
      for (int k = 0; k < r.d; k++)
      {
         int s = r.node_axis_idx[k*nn + i];
         int line = 0;
         // recover the line index of node i along axis k
         if (r.d == 2) { line = (k == 0) ? i/(r.p + 1) : i % (r.p + 1); }
         if (s < p)
         {
            double v = rbar[k][(line*p + s)*nc + comp];
            Pp += std::max(v, 0.0);
            Pm += std::min(v, 0.0);
         }
         if (s > 0)
         {
            double v = rbar[k][(line*p + s - 1)*nc + comp];
            Pp += std::max(-v, 0.0);
            Pm += std::min(-v, 0.0);
         }
      }
      double u = uL[i*nc + comp];
      double th = p_thresh(mass[i], dt, u);
      double Qp = std::max(0.0, (mass[i]/dt)*(bmax[i] - u));
      double Qm = std::min(0.0, (mass[i]/dt)*(bmin[i] - u));
      double Rp = zalesak_ratio(Qp, Pp, th);
      double Rm = zalesak_ratio(Qm, Pm, th);
      alpha_tilde[i] = std::min(Rp, Rm);
   }
}

double interval_line_search(double base, double dir, double lo, double hi)
{
   if (dir > 0.0)
   {
      if (base + dir <= hi) { return 1.0; }
      return std::max(0.0, (hi - base)/dir);
   }
   if (dir < 0.0)
   {
      if (base + dir >= lo) { return 1.0; }
      return std::max(0.0, (lo - base)/dir);
   }
   return 1.0;
}

namespace
{

// Constraint residual g(a) = rho e - sigma_min rho^gamma evaluated on
// base + a dir, with derivative. rho e = rhoE - |m|^2/(2 rho).
struct EntropyResidual
{
   const Euler &m;
   const StateVec &base, &dir;
   double sigma_min;

   void eval(double a, double &g, double &dg) const
   {
      const int d = m.dim;
      double rho = base[0] + a*dir[0];
      double rhoE = base[d + 1] + a*dir[d + 1];
      double m2 = 0.0, mdm = 0.0;
      for (int k = 0; k < d; k++)
      {
         double mo = base[1 + k] + a*dir[1 + k];
         m2 += mo*mo;
         mdm += mo*dir[1 + k];
      }
      double rho_e = rhoE - 0.5*m2/rho;
      double d_rho_e = dir[d + 1] - mdm/rho + 0.5*m2*dir[0]/(rho*rho);
      if (sigma_min > -infinity)
      {
         double rg = std::pow(rho, m.gamma);
         g = rho_e - sigma_min*rg;
         dg = d_rho_e - sigma_min*m.gamma*(rg/rho)*dir[0];
      }
      else
      {
         g = rho_e;
         dg = d_rho_e;
      }
   }
};

} // namespace

double convex_line_search(const Euler &m, const StateVec &base,
                          const StateVec &dir, double sigma_min)
{
   bool zero = true;
   for (int c = 0; c < m.ncomp(); c++)
   {
      if (dir[c] != 0.0) { zero = false; }
   }
   if (zero) { return 1.0; }

   EntropyResidual res{m, base, dir, sigma_min};
   auto feasible = [&](double a)
   {
      double rho = base[0] + a*dir[0];
      if (!(rho > 0.0)) { return false; }
      double g, dg;
      res.eval(a, g, dg);
      return g >= 0.0;
   };

   // Upper cap from the linear density constraint, then the quick exits.
   double hi = 1.0;
   if (dir[0] < 0.0)
   {
      hi = std::min(hi, -(1.0 - 1e-13)*base[0]/dir[0]);
      if (hi <= 0.0) { return 0.0; }
   }
   if (feasible(hi)) { return hi; }
   if (!feasible(0.0)) { return 0.0; }   // only roundoff-infeasible bases land here

   // Newton approaches the root of the concave residual from the infeasible
   // side; a bracket [lo, hi] guards against stalls.
   double lo = 0.0;
   double a = hi;
   for (int it = 0; it < 50; it++)
   {
      double g, dg;
      res.eval(a, g, dg);
      if (g >= 0.0) { lo = a; } else { hi = a; }
      if (hi - lo <= 1e-12) { break; }
      double an = (dg != 0.0) ? a - g/dg : 0.5*(lo + hi);
      if (!(an > lo && an < hi)) { an = 0.5*(lo + hi); }
      if (std::abs(an - a) <= 1e-12) { a = an; break; }
      a = an;
   }
   if (feasible(a)) { return a; }
   // back off just below the root; certified feasible or bisect the rest
   double cand = std::max(lo, a - 1e-10*std::max(1.0, std::abs(a)));
   if (feasible(cand)) { return cand; }
   for (int it = 0; it < 64; it++)
   {
      double mid = 0.5*(lo + hi);
      if (feasible(mid)) { lo = mid; } else { hi = mid; }
   }
   return lo;
}

} // namespace limiting

} // namespace dgfct
