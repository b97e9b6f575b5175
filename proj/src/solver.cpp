#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "parallel.hpp"

namespace dgfct
{

namespace
{

enum Mode
{
   MODE_DT = 0,
   MODE_FULL,
   MODE_LOW,
   MODE_RES_HIGH,
   MODE_RES_LOW,
   MODE_SPLIT,
   MODE_HULL
};

struct Scratch
{
   std::vector<double> ue, F, ctF, rH, rL, uL, rtot;
   std::vector<double> rbar[2];
   std::vector<double> dtii, bmin, bmax, sigmin, atilde;
   std::vector<double> afc[2];
   std::vector<double> ms_in, ms_a, ms_b;

   void size_for(int nn, int nc, int d, int nlines, int p)
   {
      if (int(ue.size()) == nn*nc && int(dtii.size()) == nn &&
          int(F.size()) == nn*nc*d) { return; }
      ue.resize(nn*nc);
      F.resize(nn*nc*d);
      ctF.resize(size_t(d)*nn*nc);
      rH.resize(size_t(d)*nn*nc);
      rL.resize(size_t(d)*nn*nc);
      uL.resize(nn*nc);
      rtot.resize(nn*nc);
      for (int k = 0; k < d; k++)
      {
         rbar[k].resize(size_t(std::max(nlines*p, 1))*nc);
         afc[k].resize(std::max(nlines*p, 1));
      }
      dtii.resize(nn);
      bmin.resize(nn);
      bmax.resize(nn);
      sigmin.resize(nn);
      atilde.resize(nn);
      ms_in.resize(nn);
      ms_a.resize(nn);
      ms_b.resize(nn);
   }
};

thread_local Scratch tls;

// Guaranteed wave-speed bound for Euler with cached p^-expo values; the
// gamma = 1.4 power is an exact seventh power.
inline double euler_lambda(const Euler &m, const StateVec &ul,
                           const StateVec &ur, const double *nhat,
                           double pl, double pr, double cl, double cr,
                           double pml, double pmr)
{
   const int d = m.dim;
   double al = 0.0, ar = 0.0;
   for (int k = 0; k < d; k++)
   {
      al += nhat[k]*ul[1 + k]/ul[0];
      ar += nhat[k]*ur[1 + k]/ur[0];
   }
   if (m.simple_wave_speed)
   {
      return std::max(std::abs(al) + cl, std::abs(ar) + cr);
   }
   const double g = m.gamma;
   double num = cl + cr - 0.5*(g - 1.0)*(ar - al);
   double ps = 0.0;
   if (num > 0.0)
   {
      double base = num/(cl*pml + cr*pmr);
      if (g == 1.4)
      {
         double b2 = base*base;
         ps = b2*b2*b2*base;
      }
      else { ps = std::pow(base, 2.0*g/(g - 1.0)); }
   }
   double fac = 0.5*(g + 1.0)/g;
   double ll = al - cl*std::sqrt(1.0 + fac*std::max((ps - pl)/pl, 0.0));
   double lr = ar + cr*std::sqrt(1.0 + fac*std::max((ps - pr)/pr, 0.0));
   return std::max(std::abs(ll), std::abs(lr));
}

inline void euler_cache_state(const Euler &m, const StateVec &u, double &p,
                              double &c, double &pm, double &sig)
{
   double ke = 0.0;
   for (int k = 0; k < m.dim; k++) { ke += sqr(u[1 + k]); }
   double rho_e = u[m.dim + 1] - 0.5*ke/u[0];
   p = (m.gamma - 1.0)*rho_e;
   require(u[0] > 0.0 && p > 0.0, errc::inadmissible_state,
           "inadmissible euler state");
   c = std::sqrt(m.gamma*p/u[0]);
   pm = std::pow(p, -(m.gamma - 1.0)/(2.0*m.gamma));
   sig = rho_e*std::pow(u[0], -m.gamma);
}

template <class M> constexpr bool is_advection_v = std::is_same_v<M, Advection>;
template <class M> constexpr bool is_euler_v = std::is_same_v<M, Euler>;

} // namespace

StateVec mirror_state(const StateVec &inside, const double *sn, double sn_norm,
                      int dim)
{
   StateVec ghost = inside;
   double mn = 0.0;
   for (int k = 0; k < dim; k++) { mn += inside[1 + k]*sn[k]; }
   mn /= (sn_norm*sn_norm);
   for (int k = 0; k < dim; k++) { ghost[1 + k] = inside[1 + k] - 2.0*mn*sn[k]; }
   return ghost;
}

Solver::Solver(const MeshSpec &spec, int degree, Model model,
               LimiterOptions lim, std::array<BoundaryClosure, 4> bcs)
   : grid_(build_grid(spec, degree)), model_(std::move(model)),
     lim_(lim), bcs_(std::move(bcs))
{
   nc_ = model_ncomp(model_);
   require(model_dim(model_) == spec.d, errc::invalid_argument,
           "model and mesh dimensions disagree");
   if (std::isnan(lim_.s0) || lim_.s0 == 0.0)
   {
      lim_.s0 = smoothness_s0(degree);
   }
   if (const Advection *adv = std::get_if<Advection>(&model_))
   {
      adv_ = std::make_unique<AdvectionCoeffs>(build_advection_coeffs(grid_, *adv));
   }
   if (lim_.unsparsified)
   {
      require(std::get_if<Advection>(&model_) == nullptr, errc::invalid_argument,
              "unsparsified variant uses the generic model path");
      require(lim_.strategy == LimiterStrategy::low_only, errc::invalid_argument,
              "unsparsified operator is only available for low-order runs");
      build_unsparsified(grid_);
   }
   const int nfn = grid_.faces.nfnodes;
   const int total = grid_.faces.count()*nfn;
   f_hat.resize(size_t(total)*nc_);
   f_ubar.resize(size_t(total)*nc_);
   f_uL.resize(size_t(total)*nc_);
   f_uR.resize(size_t(total)*nc_);
   f_dhat.resize(total);
   if (std::holds_alternative<Euler>(model_))
   {
      f_sigL.resize(total);
      f_sigR.resize(total);
      n_p.resize(nnodes());
      n_c.resize(nnodes());
      n_pm.resize(nnodes());
      n_sig.resize(nnodes());
   }
}

void Solver::set_initial(const std::function<StateVec(const double *)> &ic,
                         std::vector<double> &u)
{
   u.assign(ndof(), 0.0);
   const int nn = grid_.ref.nn;
   parallel_for(grid_.nelem, [&](int e)
   {
      double x[2];
      for (int n = 0; n < nn; n++)
      {
         grid_.node_coords(e, n, x);
         StateVec s = ic(x);
         for (int c = 0; c < nc_; c++) { u[(size_t(e)*nn + n)*nc_ + c] = s[c]; }
      }
   });
   if (const Euler *eu = std::get_if<Euler>(&model_))
   {
      double smin = infinity, rlo = infinity, rhi = -infinity;
      for (int i = 0; i < nnodes(); i++)
      {
         StateVec s{};
         for (int c = 0; c < nc_; c++) { s[c] = u[size_t(i)*nc_ + c]; }
         smin = std::min(smin, eu->entropy_surrogate(s));
         rlo = std::min(rlo, s[0]);
         rhi = std::max(rhi, s[0]);
      }
      sigma_floor_ = smin;
      if (std::isnan(lim_.global_lo)) { lim_.global_lo = rlo; }
      if (std::isnan(lim_.global_hi)) { lim_.global_hi = rhi; }
   }
   else
   {
      double lo = infinity, hi = -infinity;
      for (int i = 0; i < nnodes(); i++)
      {
         lo = std::min(lo, u[i]);
         hi = std::max(hi, u[i]);
      }
      if (std::isnan(lim_.global_lo)) { lim_.global_lo = lo; }
      if (std::isnan(lim_.global_hi)) { lim_.global_hi = hi; }
   }
}

// ---------------------------------------------------------------------------
// Face phase
// ---------------------------------------------------------------------------

template <class M>
void Solver::phase_faces(const M &m, const std::vector<double> &u, double t)
{
   const Grid &g = grid_;
   const FaceSet &fs = g.faces;
   const int nn = g.ref.nn, nc = nc_, d = g.spec.d;
   const int nfn = fs.nfnodes;

   if constexpr (is_euler_v<M>)
   {
      parallel_for(nnodes(), [&](int i)
      {
         StateVec s{};
         for (int c = 0; c < nc; c++) { s[c] = u[size_t(i)*nc + c]; }
         euler_cache_state(m, s, n_p[i], n_c[i], n_pm[i], n_sig[i]);
      });
   }

   parallel_for(fs.count(), [&](int f)
   {
      const int axis = fs.axis[f];
      const int stride = fs.stride(axis, g.ref);
      const int eL = fs.eL[f], eR = fs.eR[f];
      for (int tt = 0; tt < nfn; tt++)
      {
         const int fid = f*nfn + tt;
         const double *sn = &fs.sn[size_t(fid)*d];
         const double snn = fs.sn_norm[fid];
         const double *x = &fs.xf[size_t(fid)*d];
         const double w = g.face_weight(tt);

         StateVec uLs{}, uRs{};
         int gL = -1, gR = -1;
         if (eL >= 0)
         {
            gL = eL*nn + fs.nodeL[f] + tt*stride;
            for (int c = 0; c < nc; c++) { uLs[c] = u[size_t(gL)*nc + c]; }
         }
         if (eR >= 0)
         {
            gR = eR*nn + fs.nodeR[f] + tt*stride;
            for (int c = 0; c < nc; c++) { uRs[c] = u[size_t(gR)*nc + c]; }
         }
         if (eL < 0 || eR < 0)
         {
            const int side = eL < 0 ? 0 : 1;
            const BoundaryClosure &bc = bcs_[axis*2 + side];
            const StateVec &inside = eL < 0 ? uRs : uLs;
            // scaled normal pointing out of the domain
            double sn_out[2] = {side == 0 ? -sn[0] : sn[0],
                                d > 1 ? (side == 0 ? -sn[1] : sn[1]) : 0.0};
            StateVec ghost = inside;
            switch (bc.kind)
            {
               case BoundaryClosure::Kind::dirichlet:
                  ghost = bc.state(x, t);
                  break;
               case BoundaryClosure::Kind::reflect:
                  if (nc > 1) { ghost = mirror_state(inside, sn_out, snn, d); }
                  break;
               case BoundaryClosure::Kind::custom:
                  ghost = bc.custom(x, t, inside, sn_out, snn);
                  break;
               case BoundaryClosure::Kind::outflow:
                  break;
            }
            if (eL < 0) { uLs = ghost; } else { uRs = ghost; }
         }

         double dput = 0.0;
         if constexpr (is_advection_v<M>)
         {
            const double a = adv_->face_a[fid];
            for (int c = 0; c < nc; c++)
            {
               f_hat[size_t(fid)*nc + c] = 0.5*a*(uLs[c] + uRs[c])
                                           - 0.5*std::abs(a)*(uRs[c] - uLs[c]);
               f_ubar[size_t(fid)*nc + c] = a > 0.0 ? uLs[c]
                                            : (a < 0.0 ? uRs[c]
                                               : 0.5*(uLs[c] + uRs[c]));
            }
            dput = 0.5*std::abs(a)*w;
         }
         else
         {
            double nhat[2] = {sn[0]/snn, d > 1 ? sn[1]/snn : 0.0};
            double lam;
            if constexpr (is_euler_v<M>)
            {
               double pL, cL, pmL, sgL, pR, cR, pmR, sgR;
               if (gL >= 0) { pL = n_p[gL]; cL = n_c[gL]; pmL = n_pm[gL]; sgL = n_sig[gL]; }
               else { euler_cache_state(m, uLs, pL, cL, pmL, sgL); }
               if (gR >= 0) { pR = n_p[gR]; cR = n_c[gR]; pmR = n_pm[gR]; sgR = n_sig[gR]; }
               else { euler_cache_state(m, uRs, pR, cR, pmR, sgR); }
               lam = euler_lambda(m, uLs, uRs, nhat, pL, pR, cL, cR, pmL, pmR);
               f_sigL[fid] = sgL;
               f_sigR[fid] = sgR;
            }
            else
            {
               lam = wave_speed_bound(m, uLs, uRs, nhat);
            }
            double FL[max_comp*2], FR[max_comp*2];
            flux(m, uLs, FL);
            flux(m, uRs, FR);
            for (int c = 0; c < nc; c++)
            {
               double fl = 0.0, fr = 0.0;
               for (int k = 0; k < d; k++)
               {
                  fl += FL[c*d + k]*sn[k];
                  fr += FR[c*d + k]*sn[k];
               }
               f_hat[size_t(fid)*nc + c] = 0.5*(fl + fr)
                                           - 0.5*lam*snn*(uRs[c] - uLs[c]);
               double ub = 0.5*(uLs[c] + uRs[c]);
               if (lam > 0.0) { ub -= (fr - fl)/(2.0*lam*snn); }
               else
               {
                  require(std::abs(fr - fl) <= 1e-12*(1.0 + std::abs(fl)),
                          errc::internal,
                          "zero face viscosity with unequal fluxes");
               }
               f_ubar[size_t(fid)*nc + c] = ub;
            }
            dput = 0.5*lam*snn*w;
         }
         f_dhat[fid] = dput;
         for (int c = 0; c < nc; c++)
         {
            f_uL[size_t(fid)*nc + c] = uLs[c];
            f_uR[size_t(fid)*nc + c] = uRs[c];
         }
      }
   });
}

// ---------------------------------------------------------------------------
// Element phase
// ---------------------------------------------------------------------------

template <class M>
double Solver::phase_elements(const M &m, const std::vector<double> &u,
                              double dt, double t, int mode,
                              std::vector<double> *out)
{
   (void)t;
   const Grid &g = grid_;
   const RefOps &r = g.ref;
   const int nn = r.nn, nc = nc_, d = g.spec.d, p = r.p, n1 = r.n1();
   const int nlines = r.nlines();
   const LimiterStrategy strat = lim_.strategy;
   constexpr bool euler = is_euler_v<M>;
   constexpr bool advection = is_advection_v<M>;

   const bool need_high = mode == MODE_RES_HIGH || mode == MODE_SPLIT ||
                          (mode == MODE_FULL && strat != LimiterStrategy::low_only);
   const bool need_low = mode == MODE_RES_LOW || mode == MODE_SPLIT ||
                         mode == MODE_LOW || mode == MODE_HULL ||
                         (mode == MODE_FULL && strat != LimiterStrategy::none);
   const bool need_limits = mode == MODE_HULL ||
                            (mode == MODE_FULL &&
                             (strat == LimiterStrategy::elementwise ||
                              strat == LimiterStrategy::subcell));

   const double *bfield = nullptr;
   if (mode == MODE_FULL && lim_.bounds_source == BoundsSource::previous)
   {
      bfield = u.data();
   }
   if (mode == MODE_FULL && lim_.bounds_source == BoundsSource::low_order)
   {
      bfield = ulow_.data();
   }

   std::vector<double> elem_dt(g.nelem, infinity);
   std::vector<int> cfl_bad(g.nelem, 0);

   parallel_for(g.nelem, [&](int e)
   {
      Scratch &sc = tls;
      sc.size_for(nn, nc, d, nlines, p);
      const ElemGeom &gm = g.geom(e);
      const double *z_lo = adv_ ? &adv_->z[size_t(e)*nn*d] : nullptr;
      const double *z_hi = adv_ ? &adv_->z_high[size_t(e)*nn*d] : nullptr;
      const size_t base = size_t(e)*nn;
      const bool bounds_on = need_limits || mode == MODE_HULL;

      for (int n = 0; n < nn; n++)
      {
         for (int c = 0; c < nc; c++)
         {
            sc.ue[n*nc + c] = u[(base + n)*nc + c];
         }
      }
      if (bounds_on)
      {
         for (int n = 0; n < nn; n++)
         {
            sc.bmin[n] = sc.bmax[n] = bfield ? bfield[(base + n)*nc]
                                      : sc.ue[n*nc];
            if (euler) { sc.sigmin[n] = n_sig[base + n]; }
         }
      }

      if constexpr (!advection)
      {
         for (int n = 0; n < nn; n++)
         {
            StateVec s{};
            for (int c = 0; c < nc; c++) { s[c] = sc.ue[n*nc + c]; }
            flux(m, s, &sc.F[size_t(n)*nc*d]);
         }
      }

      std::fill(sc.rH.begin(), sc.rH.end(), 0.0);
      std::fill(sc.rL.begin(), sc.rL.end(), 0.0);
      std::fill(sc.dtii.begin(), sc.dtii.end(), 0.0);

      // --- high-order volume term
      if (need_high)
      {
         if constexpr (advection)
         {
            for (int k = 0; k < d; k++)
            {
               for (int n = 0; n < nn; n++)
               {
                  sc.ctF[(size_t(k)*nn + n)*nc] = z_hi[n*d + k]*sc.ue[n*nc];
               }
            }
         }
         else
         {
            for (int k = 0; k < d; k++)
            {
               for (int n = 0; n < nn; n++)
               {
                  const double *gj = &gm.gjinv[(n*d + k)*d];
                  for (int c = 0; c < nc; c++)
                  {
                     double acc = 0.0;
                     for (int b = 0; b < d; b++)
                     {
                        acc += gj[b]*sc.F[(size_t(n)*nc + c)*d + b];
                     }
                     sc.ctF[(size_t(k)*nn + n)*nc + c] = acc;
                  }
               }
            }
         }
         const double *Dw = r.ops.Dw.data();
         for (int k = 0; k < d; k++)
         {
            const LineTable &lt = r.lines[k];
            for (int l = 0; l < nlines; l++)
            {
               const int lb = lt.base[l];
               const int st = lt.stride;
               for (int i = 0; i < n1; i++)
               {
                  const int n = lb + i*st;
                  const double wt = r.wtrans[k*nn + n];
                  for (int c = 0; c < nc; c++)
                  {
                     double acc = 0.0;
                     for (int j = 0; j < n1; j++)
                     {
                        acc += Dw[i*n1 + j]*sc.ctF[(size_t(k)*nn + lb + j*st)*nc + c];
                     }
                     sc.rH[(size_t(k)*nn + n)*nc + c] = -wt*acc;
                  }
               }
            }
         }
      }

      // --- face terms
      for (int axis = 0; axis < d; axis++)
      {
         for (int side = 0; side < 2; side++)
         {
            const int f = g.elem_face(e, axis, side);
            const double sgn = side == 1 ? 1.0 : -1.0;
            const int first = side == 1 ? g.faces.nodeL[f] : g.faces.nodeR[f];
            const int fstride = g.faces.stride(axis, r);
            for (int tt = 0; tt < g.faces.nfnodes; tt++)
            {
               const int n = first + tt*fstride;
               const int fid = f*g.faces.nfnodes + tt;
               const double w = g.face_weight(tt);
               sc.dtii[n] += f_dhat[fid];
               if (need_high)
               {
                  const double *sn = &g.faces.sn[size_t(fid)*d];
                  for (int c = 0; c < nc; c++)
                  {
                     double fn;
                     if constexpr (advection)
                     {
                        fn = adv_->face_a[fid]*sc.ue[n*nc + c];
                     }
                     else
                     {
                        fn = 0.0;
                        for (int k = 0; k < d; k++)
                        {
                           fn += sc.F[(size_t(n)*nc + c)*d + k]*sn[k];
                        }
                     }
                     sc.rH[(size_t(axis)*nn + n)*nc + c] -=
                        w*(sgn*f_hat[size_t(fid)*nc + c] - sgn*fn);
                  }
               }
               if (need_low)
               {
                  for (int c = 0; c < nc; c++)
                  {
                     sc.rL[(size_t(axis)*nn + n)*nc + c] -=
                        w*sgn*f_hat[size_t(fid)*nc + c];
                  }
               }
               if (bounds_on && f_dhat[fid] > 0.0)
               {
                  if (bfield)
                  {
                     const int eo = side == 1 ? g.faces.eR[f] : g.faces.eL[f];
                     double v;
                     if (eo >= 0)
                     {
                        const int no = (side == 1 ? g.faces.nodeR[f]
                                        : g.faces.nodeL[f]) + tt*fstride;
                        v = bfield[(size_t(eo)*nn + no)*nc];
                     }
                     else
                     {
                        v = side == 1 ? f_uR[size_t(fid)*nc]
                            : f_uL[size_t(fid)*nc];
                     }
                     sc.bmin[n] = std::min(sc.bmin[n], v);
                     sc.bmax[n] = std::max(sc.bmax[n], v);
                  }
                  else
                  {
                     const double ub = f_ubar[size_t(fid)*nc];
                     sc.bmin[n] = std::min(sc.bmin[n], ub);
                     sc.bmax[n] = std::max(sc.bmax[n], ub);
                  }
                  if (euler)
                  {
                     const double so = side == 1 ? f_sigR[fid] : f_sigL[fid];
                     sc.sigmin[n] = std::min(sc.sigmin[n], so);
                  }
               }
            }
         }
      }

      // --- in-element pairs: graph viscosity d_ij and bar states; also the
      // sparsified volume contributions when the low-order residual is needed
      auto pair_dhat_generic = [&](int i, int j, const double *cf,
                                   const double *cb) -> double
      {
         double ncf = 0.0, ncb = 0.0, na = 0.0;
         for (int b = 0; b < d; b++)
         {
            ncf += cf[b]*cf[b];
            ncb += cb[b]*cb[b];
            na += sqr(cf[b] + cb[b]);
         }
         ncf = std::sqrt(ncf);
         ncb = std::sqrt(ncb);
         if (ncf + ncb <= 0.0) { return 0.0; }
         StateVec ui{}, uj{};
         for (int c = 0; c < nc; c++)
         {
            ui[c] = sc.ue[i*nc + c];
            uj[c] = sc.ue[j*nc + c];
         }
         // with exactly antisymmetric coefficients (all Cartesian meshes) the
         // two orientations share one wave-speed evaluation
         const bool antisym = std::sqrt(na) <= 1e-13*(ncf + ncb);
         double lamf = 0.0, lamb = 0.0;
         if (ncf > 0.0)
         {
            double nh[2] = {cf[0]/ncf, d > 1 ? cf[1]/ncf : 0.0};
            if constexpr (euler)
            {
               const int gi = int(base) + i, gj = int(base) + j;
               lamf = euler_lambda(m, ui, uj, nh, n_p[gi], n_p[gj],
                                   n_c[gi], n_c[gj], n_pm[gi], n_pm[gj]);
            }
            else { lamf = wave_speed_bound(m, ui, uj, nh); }
         }
         if (antisym) { lamb = lamf; }
         else if (ncb > 0.0)
         {
            double nh[2] = {cb[0]/ncb, d > 1 ? cb[1]/ncb : 0.0};
            if constexpr (euler)
            {
               const int gi = int(base) + i, gj = int(base) + j;
               lamb = euler_lambda(m, uj, ui, nh, n_p[gj], n_p[gi],
                                   n_c[gj], n_c[gi], n_pm[gj], n_pm[gi]);
            }
            else { lamb = wave_speed_bound(m, uj, ui, nh); }
         }
         return std::max(lamf*ncf, lamb*ncb);
      };

      auto do_pair = [&](int k, int i, int j, const double *cf,
                         const double *cb, bool with_volume, PairInfo *slot)
      {
         double dh;
         double kij = 0.0, kji = 0.0;
         if constexpr (advection)
         {
            const double wt = r.wtrans[k*nn + i];
            kij = -0.5*wt*z_lo[j*d + k];
            kji = +0.5*wt*z_lo[i*d + k];
            dh = 0.5*wt*std::max(std::abs(z_lo[i*d + k]), std::abs(z_lo[j*d + k]));
         }
         else
         {
            dh = pair_dhat_generic(i, j, cf, cb);
         }
         if (need_low)
         {
            if (with_volume)
            {
               if constexpr (advection)
               {
                  sc.rL[(size_t(k)*nn + i)*nc] += kij*sc.ue[j*nc];
                  sc.rL[(size_t(k)*nn + j)*nc] += kji*sc.ue[i*nc];
               }
               else
               {
                  for (int c = 0; c < nc; c++)
                  {
                     double ai = 0.0, aj = 0.0;
                     for (int b = 0; b < d; b++)
                     {
                        ai += cf[b]*sc.F[(size_t(j)*nc + c)*d + b];
                        aj += cb[b]*sc.F[(size_t(i)*nc + c)*d + b];
                     }
                     sc.rL[(size_t(k)*nn + i)*nc + c] += ai;
                     sc.rL[(size_t(k)*nn + j)*nc + c] += aj;
                  }
               }
            }
            for (int c = 0; c < nc; c++)
            {
               const double du = sc.ue[j*nc + c] - sc.ue[i*nc + c];
               sc.rL[(size_t(k)*nn + i)*nc + c] += dh*du;
               sc.rL[(size_t(k)*nn + j)*nc + c] -= dh*du;
            }
         }
         sc.dtii[i] += dh;
         sc.dtii[j] += dh;

         if ((bounds_on || slot) && dh > 0.0)
         {
            StateVec ubij{}, ubji{};
            if constexpr (advection)
            {
               const double du = sc.ue[j*nc] - sc.ue[i*nc];
               ubij[0] = 0.5*(sc.ue[i*nc] + sc.ue[j*nc]) + kij/(2.0*dh)*du;
               ubji[0] = 0.5*(sc.ue[i*nc] + sc.ue[j*nc]) - kji/(2.0*dh)*du;
            }
            else
            {
               for (int c = 0; c < nc; c++)
               {
                  double dfi = 0.0, dfj = 0.0;
                  for (int b = 0; b < d; b++)
                  {
                     const double df = sc.F[(size_t(j)*nc + c)*d + b]
                                       - sc.F[(size_t(i)*nc + c)*d + b];
                     dfi += cf[b]*df;
                     dfj += cb[b]*df;
                  }
                  const double mid = 0.5*(sc.ue[i*nc + c] + sc.ue[j*nc + c]);
                  ubij[c] = mid + dfi/(2.0*dh);
                  ubji[c] = mid - dfj/(2.0*dh);
               }
            }
            if (bounds_on)
            {
               if (bfield)
               {
                  sc.bmin[i] = std::min(sc.bmin[i], bfield[(base + j)*nc]);
                  sc.bmax[i] = std::max(sc.bmax[i], bfield[(base + j)*nc]);
                  sc.bmin[j] = std::min(sc.bmin[j], bfield[(base + i)*nc]);
                  sc.bmax[j] = std::max(sc.bmax[j], bfield[(base + i)*nc]);
               }
               else
               {
                  sc.bmin[i] = std::min(sc.bmin[i], ubij[0]);
                  sc.bmax[i] = std::max(sc.bmax[i], ubij[0]);
                  sc.bmin[j] = std::min(sc.bmin[j], ubji[0]);
                  sc.bmax[j] = std::max(sc.bmax[j], ubji[0]);
               }
               if (euler)
               {
                  sc.sigmin[i] = std::min(sc.sigmin[i], n_sig[base + j]);
                  sc.sigmin[j] = std::min(sc.sigmin[j], n_sig[base + i]);
               }
            }
            if (slot)
            {
               slot->elem = e;
               slot->i = int(base) + i;
               slot->j = int(base) + j;
               slot->axis = k;
               slot->dhat = dh;
               slot->ubar_ij = ubij;
               slot->ubar_ji = ubji;
               if constexpr (advection)
               {
                  slot->cij[0] = kij;
                  slot->cji[0] = kji;
               }
               else
               {
                  for (int b = 0; b < d; b++)
                  {
                     slot->cij[b] = cf[b];
                     slot->cji[b] = cb[b];
                  }
               }
            }
         }
         else if (slot) { slot->elem = -2; }
      };

      if (need_low || mode == MODE_DT || mode == MODE_FULL)
      {
         if (!lim_.unsparsified)
         {
            for (int k = 0; k < d; k++)
            {
               const LineTable &lt = r.lines[k];
               for (int l = 0; l < nlines; l++)
               {
                  for (int s = 0; s < p; s++)
                  {
                     const int i = lt.base[l] + s*lt.stride;
                     const int j = i + lt.stride;
                     PairInfo *slot = nullptr;
                     if (collect_slots_)
                     {
                        slot = collect_slots_ +
                               ((size_t(e)*d + k)*nlines + l)*p + s;
                     }
                     do_pair(k, i, j, &gm.cfwd[k][(l*p + s)*d],
                             &gm.cbwd[k][(l*p + s)*d], need_low, slot);
                  }
                  if (need_low && p > 0)
                  {
                     for (int s : {0, p})
                     {
                        const int n = lt.base[l] + s*lt.stride;
                        if constexpr (advection)
                        {
                           const double wt = r.wtrans[k*nn + n];
                           const double kd = (s == 0 ? -0.5 : 0.5)*wt*z_lo[n*d + k];
                           sc.rL[(size_t(k)*nn + n)*nc] += kd*sc.ue[n*nc];
                        }
                        else
                        {
                           const double *cd = &gm.cdiag[k][n*d];
                           for (int c = 0; c < nc; c++)
                           {
                              double acc = 0.0;
                              for (int b = 0; b < d; b++)
                              {
                                 acc += cd[b]*sc.F[(size_t(n)*nc + c)*d + b];
                              }
                              sc.rL[(size_t(k)*nn + n)*nc + c] += acc;
                           }
                        }
                     }
                  }
               }
            }
         }
         else
         {
            // dense (unsparsified) variant: full volume rows, viscosity on
            // every in-line pair
            for (int k = 0; k < d; k++)
            {
               const LineTable &lt = r.lines[k];
               for (int l = 0; l < nlines; l++)
               {
                  const int lb = lt.base[l];
                  const int st = lt.stride;
                  if (need_low)
                  {
                     for (int jj = 0; jj < n1; jj++)
                     {
                        const int nj = lb + jj*st;
                        for (int ii = 0; ii < n1; ii++)
                        {
                           const int ni = lb + ii*st;
                           const double *cij =
                              &gm.unsp[k][(size_t(l)*n1*n1 + jj*n1 + ii)*d];
                           for (int c = 0; c < nc; c++)
                           {
                              double acc = 0.0;
                              for (int b = 0; b < d; b++)
                              {
                                 acc += cij[b]*sc.F[(size_t(nj)*nc + c)*d + b];
                              }
                              sc.rL[(size_t(k)*nn + ni)*nc + c] += acc;
                           }
                        }
                     }
                  }
                  for (int ii = 0; ii < n1; ii++)
                  {
                     for (int jj = ii + 1; jj < n1; jj++)
                     {
                        const int i = lb + ii*st;
                        const int j = lb + jj*st;
                        const double *cf =
                           &gm.unsp[k][(size_t(l)*n1*n1 + jj*n1 + ii)*d];
                        const double *cb =
                           &gm.unsp[k][(size_t(l)*n1*n1 + ii*n1 + jj)*d];
                        double dh = pair_dhat_generic(i, j, cf, cb);
                        if (need_low)
                        {
                           for (int c = 0; c < nc; c++)
                           {
                              const double du = sc.ue[j*nc + c] - sc.ue[i*nc + c];
                              sc.rL[(size_t(k)*nn + i)*nc + c] += dh*du;
                              sc.rL[(size_t(k)*nn + j)*nc + c] -= dh*du;
                           }
                        }
                        sc.dtii[i] += dh;
                        sc.dtii[j] += dh;
                     }
                  }
               }
            }
         }
      }

      // --- IDP step bound
      double edt = infinity;
      for (int n = 0; n < nn; n++)
      {
         if (sc.dtii[n] > 0.0)
         {
            edt = std::min(edt, gm.mass[n]/(2.0*sc.dtii[n]));
         }
      }
      elem_dt[e] = edt;
      if (mode == MODE_DT) { return; }
      if ((mode == MODE_FULL || mode == MODE_LOW) && dt > edt*(1.0 + 1e-9))
      {
         cfl_bad[e] = 1;
         return;
      }

      if (mode == MODE_HULL)
      {
         for (int n = 0; n < nn; n++)
         {
            (*out)[base + n] = sc.bmin[n];
            (*out)[size_t(nnodes()) + base + n] = sc.bmax[n];
         }
         return;
      }
      if (mode == MODE_RES_HIGH || mode == MODE_RES_LOW)
      {
         const auto &src = mode == MODE_RES_HIGH ? sc.rH : sc.rL;
         for (int n = 0; n < nn; n++)
         {
            for (int c = 0; c < nc; c++)
            {
               double acc = 0.0;
               for (int k = 0; k < d; k++)
               {
                  acc += src[(size_t(k)*nn + n)*nc + c];
               }
               (*out)[(base + n)*nc + c] = acc;
            }
         }
         return;
      }
      if (mode == MODE_SPLIT)
      {
         for (int k = 0; k < d; k++)
         {
            for (int n = 0; n < nn; n++)
            {
               for (int c = 0; c < nc; c++)
               {
                  (*out)[size_t(k)*ndof() + (base + n)*nc + c] =
                     sc.rH[(size_t(k)*nn + n)*nc + c]
                     - sc.rL[(size_t(k)*nn + n)*nc + c];
               }
            }
         }
         return;
      }

      // --- forward-Euler low-order update
      for (int n = 0; n < nn; n++)
      {
         const double s = dt/gm.mass[n];
         for (int c = 0; c < nc; c++)
         {
            double acc = 0.0;
            for (int k = 0; k < d; k++)
            {
               acc += sc.rL[(size_t(k)*nn + n)*nc + c];
            }
            sc.uL[n*nc + c] = sc.ue[n*nc + c] + s*acc;
         }
      }
      if (mode == MODE_LOW || strat == LimiterStrategy::low_only)
      {
         for (int n = 0; n < nn; n++)
         {
            for (int c = 0; c < nc; c++)
            {
               (*out)[(base + n)*nc + c] = sc.uL[n*nc + c];
            }
         }
         return;
      }
      if (strat == LimiterStrategy::none)
      {
         for (int n = 0; n < nn; n++)
         {
            const double s = dt/gm.mass[n];
            for (int c = 0; c < nc; c++)
            {
               double acc = 0.0;
               for (int k = 0; k < d; k++)
               {
                  acc += sc.rH[(size_t(k)*nn + n)*nc + c];
               }
               (*out)[(base + n)*nc + c] = sc.ue[n*nc + c] + s*acc;
            }
         }
         return;
      }

      // --- antidiffusive residuals: totals and subcell face sums
      for (int n = 0; n < nn; n++)
      {
         for (int c = 0; c < nc; c++)
         {
            double acc = 0.0;
            for (int k = 0; k < d; k++)
            {
               acc += sc.rH[(size_t(k)*nn + n)*nc + c]
                      - sc.rL[(size_t(k)*nn + n)*nc + c];
            }
            sc.rtot[n*nc + c] = acc;
         }
      }
      if (strat == LimiterStrategy::subcell)
      {
         for (int k = 0; k < d; k++)
         {
            const LineTable &lt = r.lines[k];
            for (int l = 0; l < nlines; l++)
            {
               for (int c = 0; c < nc; c++)
               {
                  double acc = 0.0;
                  for (int s = 0; s < p; s++)
                  {
                     const int n = lt.base[l] + s*lt.stride;
                     acc += sc.rH[(size_t(k)*nn + n)*nc + c]
                            - sc.rL[(size_t(k)*nn + n)*nc + c];
                     sc.rbar[k][(size_t(l)*p + s)*nc + c] = acc;
                  }
               }
            }
         }
      }

      // --- smoothness-indicator bound relaxation (linear bounds only); the
      // blend can only widen the interval so that fields whose range has
      // legitimately left the initial bounds (Euler density) stay consistent.
      // Unbounded relaxation targets disable the linear constraint wherever
      // the indicator is below its ramp top.
      if (lim_.smoothness)
      {
         for (int n = 0; n < nn; n++) { sc.ms_in[n] = sc.ue[n*nc]; }
         const double sK = modal_truncation_error(r, sc.ms_in.data(),
                                                  sc.ms_a.data(), sc.ms_b.data());
         const double eps = smoothness_factor(sK, lim_.s0, lim_.kappa);
         if (eps < 1.0)
         {
            for (int n = 0; n < nn; n++)
            {
               const double blo = std::isfinite(lim_.global_lo)
                                  ? eps*sc.bmin[n] + (1.0 - eps)*lim_.global_lo
                                  : -infinity;
               const double bhi = std::isfinite(lim_.global_hi)
                                  ? eps*sc.bmax[n] + (1.0 - eps)*lim_.global_hi
                                  : infinity;
               sc.bmin[n] = std::min(sc.bmin[n], blo);
               sc.bmax[n] = std::max(sc.bmax[n], bhi);
            }
         }
      }

      // --- internal consistency: the low-order update must satisfy the
      // bounds it is being limited against
      for (int n = 0; n < nn; n++)
      {
         const double v = sc.uL[n*nc];
         const double slack = 1e-12*std::max(1.0, std::abs(v));
         require(v >= sc.bmin[n] - slack && v <= sc.bmax[n] + slack,
                 errc::internal, "low-order update escaped its bounds");
      }

      // --- limiting
      const double gam = 2.0*d;
      if (strat == LimiterStrategy::elementwise)
      {
         double a1 = limiting::zalesak_elementwise(nn, nc, 0, sc.rtot.data(),
                                                   sc.uL.data(), gm.mass.data(),
                                                   dt, sc.bmin.data(),
                                                   sc.bmax.data());
         double alpha = a1;
         if (euler)
         {
            const Euler *em = std::get_if<Euler>(&model_);
            double a2 = 1.0;
            for (int n = 0; n < nn; n++)
            {
               StateVec b{}, dir{};
               for (int c = 0; c < nc; c++)
               {
                  b[c] = sc.uL[n*nc + c];
                  dir[c] = (dt/gm.mass[n])*a1*sc.rtot[n*nc + c];
               }
               const double sg = lim_.euler_entropy ? sc.sigmin[n] : -infinity;
               a2 = std::min(a2, limiting::convex_line_search(*em, b, dir, sg));
            }
            alpha = a1*a2;
         }
         for (int n = 0; n < nn; n++)
         {
            const double s = dt/gm.mass[n];
            for (int c = 0; c < nc; c++)
            {
               (*out)[(base + n)*nc + c] = sc.uL[n*nc + c]
                                           + s*alpha*sc.rtot[n*nc + c];
            }
         }
         return;
      }

      // subcell strategy
      {
         const double *rbars[2] = {sc.rbar[0].data(),
                                   d > 1 ? sc.rbar[1].data() : nullptr};
         limiting::zalesak_subcell(r, nc, 0, rbars, sc.uL.data(),
                                   gm.mass.data(), dt, sc.bmin.data(),
                                   sc.bmax.data(), sc.atilde.data());
         // face coefficients, then scale the face fluxes in place
         for (int k = 0; k < d; k++)
         {
            const LineTable &lt = r.lines[k];
            for (int l = 0; l < nlines; l++)
            {
               for (int s = 0; s < p; s++)
               {
                  const int i = lt.base[l] + s*lt.stride;
                  const int j = i + lt.stride;
                  const double af = std::min(sc.atilde[i], sc.atilde[j]);
                  sc.afc[k][l*p + s] = af;
                  for (int c = 0; c < nc; c++)
                  {
                     sc.rbar[k][(size_t(l)*p + s)*nc + c] *= af;
                  }
               }
            }
         }
         if (euler)
         {
            const Euler *em = std::get_if<Euler>(&model_);
            // second stage: positivity and entropy via the convex split
            for (int n = 0; n < nn; n++) { sc.atilde[n] = 1.0; }
            for (int k = 0; k < d; k++)
            {
               const LineTable &lt = r.lines[k];
               for (int l = 0; l < nlines; l++)
               {
                  for (int s = 0; s <= p; s++)
                  {
                     if (p == 0) { break; }
                     const int n = lt.base[l] + s*lt.stride;
                     const double sfac = gam*dt/gm.mass[n];
                     StateVec b{};
                     for (int c = 0; c < nc; c++) { b[c] = sc.uL[n*nc + c]; }
                     const double sg = lim_.euler_entropy ? sc.sigmin[n]
                                       : -infinity;
                     if (s < p)   // plus-side face
                     {
                        StateVec dir{};
                        for (int c = 0; c < nc; c++)
                        {
                           dir[c] = sfac*sc.rbar[k][(size_t(l)*p + s)*nc + c];
                        }
                        sc.atilde[n] = std::min(sc.atilde[n],
                           limiting::convex_line_search(*em, b, dir, sg));
                     }
                     if (s > 0)   // minus-side face
                     {
                        StateVec dir{};
                        for (int c = 0; c < nc; c++)
                        {
                           dir[c] = -sfac*sc.rbar[k][(size_t(l)*p + s - 1)*nc + c];
                        }
                        sc.atilde[n] = std::min(sc.atilde[n],
                           limiting::convex_line_search(*em, b, dir, sg));
                     }
                  }
               }
            }
            for (int k = 0; k < d; k++)
            {
               const LineTable &lt = r.lines[k];
               for (int l = 0; l < nlines; l++)
               {
                  for (int s = 0; s < p; s++)
                  {
                     const int i = lt.base[l] + s*lt.stride;
                     const int j = i + lt.stride;
                     const double af = std::min(sc.atilde[i], sc.atilde[j]);
                     for (int c = 0; c < nc; c++)
                     {
                        sc.rbar[k][(size_t(l)*p + s)*nc + c] *= af;
                     }
                  }
               }
            }
         }
         // final update from the limited face fluxes
         for (int n = 0; n < nn; n++)
         {
            for (int c = 0; c < nc; c++)
            {
               (*out)[(base + n)*nc + c] = sc.uL[n*nc + c];
            }
         }
         for (int k = 0; k < d; k++)
         {
            const LineTable &lt = r.lines[k];
            for (int l = 0; l < nlines; l++)
            {
               for (int s = 0; s < p; s++)
               {
                  const int i = lt.base[l] + s*lt.stride;
                  const int j = i + lt.stride;
                  for (int c = 0; c < nc; c++)
                  {
                     const double v = sc.rbar[k][(size_t(l)*p + s)*nc + c];
                     (*out)[(base + i)*nc + c] += dt/gm.mass[i]*v;
                     (*out)[(base + j)*nc + c] -= dt/gm.mass[j]*v;
                  }
               }
            }
         }
      }
   });

   if (mode == MODE_FULL || mode == MODE_LOW)
   {
      for (int e = 0; e < g.nelem; e++)
      {
         if (cfl_bad[e])
         {
            fail(errc::cfl_violation,
                 "IDP step bound violated in element " + std::to_string(e) +
                 " (dt = " + std::to_string(dt) + ", bound = " +
                 std::to_string(elem_dt[e]) + ")");
         }
      }
   }
   double dtmin = infinity;
   for (double v : elem_dt) { dtmin = std::min(dtmin, v); }
   return dtmin;
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

double Solver::run_phases(const std::vector<double> &u, double dt, double t,
                          int mode, std::vector<double> *out)
{
   require(u.size() == ndof(), errc::invalid_argument, "state size mismatch");
   return std::visit([&](const auto &m) -> double
   {
      phase_faces(m, u, t);
      return phase_elements(m, u, dt, t, mode, out);
   }, model_);
}

double Solver::max_dt(const std::vector<double> &u, double t)
{
   if (adv_ && cached_dt_ > 0.0) { return cached_dt_; }
   double dt = run_phases(u, 0.0, t, MODE_DT, nullptr);
   if (adv_) { cached_dt_ = dt; }
   return dt;
}

void Solver::fe_step(const std::vector<double> &u, double dt, double t,
                     std::vector<double> &out)
{
   require(&out != &u, errc::invalid_argument, "fe_step output aliases input");
   out.resize(ndof());
   if (lim_.bounds_source == BoundsSource::low_order &&
       (lim_.strategy == LimiterStrategy::elementwise ||
        lim_.strategy == LimiterStrategy::subcell))
   {
      ulow_.resize(ndof());
      run_phases(u, dt, t, MODE_LOW, &ulow_);
   }
   run_phases(u, dt, t, MODE_FULL, &out);
}

void Solver::forward_euler_low(const std::vector<double> &u, double dt,
                               double t, std::vector<double> &out)
{
   require(&out != &u, errc::invalid_argument, "output aliases input");
   out.resize(ndof());
   run_phases(u, dt, t, MODE_LOW, &out);
}

void Solver::residual_high(const std::vector<double> &u, double t,
                           std::vector<double> &r)
{
   r.resize(ndof());
   run_phases(u, 0.0, t, MODE_RES_HIGH, &r);
}

void Solver::residual_low(const std::vector<double> &u, double t,
                          std::vector<double> &r)
{
   r.resize(ndof());
   run_phases(u, 0.0, t, MODE_RES_LOW, &r);
}

void Solver::antidiffusive_split(const std::vector<double> &u, double t,
                                 std::vector<double> &r)
{
   r.resize(size_t(grid_.spec.d)*ndof());
   run_phases(u, 0.0, t, MODE_SPLIT, &r);
}

void Solver::scalar_hull(const std::vector<double> &u, double t,
                         std::vector<double> &lo, std::vector<double> &hi)
{
   require(model_is_scalar(model_), errc::invalid_argument,
           "hull diagnostics are for scalar models");
   std::vector<double> buf(2*size_t(nnodes()));
   run_phases(u, 0.0, t, MODE_HULL, &buf);
   lo.assign(buf.begin(), buf.begin() + nnodes());
   hi.assign(buf.begin() + nnodes(), buf.end());
}

std::vector<PairInfo> Solver::collect_pairs(const std::vector<double> &u,
                                            double t)
{
   const Grid &g = grid_;
   const RefOps &r = g.ref;
   const int p = r.p, d = g.spec.d, nc = nc_, nn = r.nn;
   const size_t nslots = size_t(g.nelem)*d*r.nlines()*std::max(p, 1);
   std::vector<PairInfo> slots(std::max<size_t>(nslots, 1));
   for (auto &s : slots) { s.elem = -2; }
   collect_slots_ = slots.data();
   std::vector<double> buf(2*size_t(nnodes()));
   run_phases(u, 0.0, t, MODE_HULL, &buf);
   collect_slots_ = nullptr;

   std::vector<PairInfo> pairs;
   for (const auto &s : slots)
   {
      if (s.elem >= 0) { pairs.push_back(s); }
   }
   // cross-face pairs from the face-phase storage
   const FaceSet &fs = g.faces;
   for (int f = 0; f < fs.count(); f++)
   {
      if (fs.eL[f] < 0 || fs.eR[f] < 0) { continue; }
      const int stride = fs.stride(fs.axis[f], r);
      for (int tt = 0; tt < fs.nfnodes; tt++)
      {
         const int fid = f*fs.nfnodes + tt;
         if (!(f_dhat[fid] > 0.0)) { continue; }
         PairInfo pi;
         pi.elem = -1;
         pi.face = f;
         pi.axis = fs.axis[f];
         pi.i = fs.eL[f]*nn + fs.nodeL[f] + tt*stride;
         pi.j = fs.eR[f]*nn + fs.nodeR[f] + tt*stride;
         pi.dhat = f_dhat[fid];
         for (int c = 0; c < nc; c++)
         {
            pi.ubar_ij[c] = f_ubar[size_t(fid)*nc + c];
            pi.ubar_ji[c] = f_ubar[size_t(fid)*nc + c];
         }
         const double w = g.face_weight(tt);
         for (int b = 0; b < d; b++)
         {
            pi.cij[b] = -0.5*w*fs.sn[size_t(fid)*d + b];
            pi.cji[b] = +0.5*w*fs.sn[size_t(fid)*d + b];
         }
         pairs.push_back(pi);
      }
   }
   return pairs;
}

} // namespace dgfct
