#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "solver.hpp"

using namespace dgfct;

namespace
{

MeshSpec spec_1d(int n, bool periodic = true, double lo = 0.0, double hi = 1.0)
{
   MeshSpec s;
   s.d = 1;
   s.n[0] = n;
   s.lo[0] = lo;
   s.hi[0] = hi;
   s.periodic[0] = periodic;
   return s;
}

MeshSpec spec_2d(int nx, int ny, bool curved = false)
{
   MeshSpec s;
   s.d = 2;
   s.n[0] = nx;
   s.n[1] = ny;
   s.hi[0] = s.hi[1] = 1.0;
   s.periodic[0] = s.periodic[1] = true;
   if (curved)
   {
      s.mapping.kind = Mapping::Kind::sinusoidal;
      s.mapping.amplitude = 0.04;
   }
   return s;
}

LimiterOptions subcell_opts()
{
   LimiterOptions lim;
   lim.strategy = LimiterStrategy::subcell;
   return lim;
}

Model burgers2d()
{
   Burgers b;
   b.dim = 2;
   b.v = {1.0, 0.7};
   return b;
}

Model burgers1d()
{
   Burgers b;
   b.dim = 1;
   b.v = {1.0, 0.0};
   return b;
}

Model euler1d()
{
   Euler e;
   e.dim = 1;
   return e;
}

std::vector<double> random_state(Solver &s, unsigned seed, double lo = 0.2,
                                 double hi = 1.2)
{
   std::mt19937 rng(seed);
   std::uniform_real_distribution<double> dist(lo, hi);
   std::vector<double> u(s.ndof());
   if (std::holds_alternative<Euler>(s.model()))
   {
      const Euler &e = std::get<Euler>(s.model());
      for (int i = 0; i < s.nnodes(); i++)
      {
         StateVec v = euler_state(e, dist(rng),
                                  {0.5*(dist(rng) - 0.7), 0.5*(dist(rng) - 0.7)},
                                  dist(rng));
         for (int c = 0; c < s.ncomp(); c++) { u[size_t(i)*s.ncomp() + c] = v[c]; }
      }
   }
   else
   {
      for (double &v : u) { v = dist(rng); }
   }
   return u;
}

double total_residual(Solver &s, const std::vector<double> &r)
{
   std::vector<double> tot(s.ncomp(), 0.0);
   for (int i = 0; i < s.nnodes(); i++)
   {
      for (int c = 0; c < s.ncomp(); c++)
      {
         tot[c] += r[size_t(i)*s.ncomp() + c];
      }
   }
   double m = 0.0;
   for (double v : tot) { m = std::max(m, std::abs(v)); }
   return m;
}

double scale_of(const std::vector<double> &r)
{
   double m = 0.0;
   for (double v : r) { m += std::abs(v); }
   return std::max(m, 1e-30);
}

} // namespace

TEST_CASE("constant state: all residuals vanish on curved meshes")
{
   for (Model model : {burgers2d(), Model(Euler{2, 1.4, false})})
   {
      Solver s(spec_2d(3, 3, true), 3, model, subcell_opts());
      std::vector<double> u(s.ndof(), 0.0), r;
      if (std::holds_alternative<Euler>(model))
      {
         StateVec v = euler_state(std::get<Euler>(model), 1.1, {0.3, -0.2}, 0.8);
         for (int i = 0; i < s.nnodes(); i++)
         {
            for (int c = 0; c < 4; c++) { u[size_t(i)*4 + c] = v[c]; }
         }
      }
      else { std::fill(u.begin(), u.end(), 0.6); }
      s.residual_high(u, 0.0, r);
      double scale = std::max(1.0, scale_of(u));
      for (double v : r) { CHECK(std::abs(v) < 1e-12*scale); }
      s.residual_low(u, 0.0, r);
      for (double v : r) { CHECK(std::abs(v) < 1e-12*scale); }
      std::vector<double> out;
      s.fe_step(u, 1e-4, 0.0, out);
      for (size_t i = 0; i < u.size(); i++)
      {
         CHECK(std::abs(out[i] - u[i]) < 1e-15*scale);
      }
   }
}

TEST_CASE("pure upwind flux through element totals")
{
   Advection a;
   a.dim = 1;
   a.beta.value = {1.0, 0.0};
   Solver s(spec_1d(2), 1, a, subcell_opts());
   std::vector<double> u = {1.0, 1.0, 0.0, 0.0}, r;
   s.residual_low(u, 0.0, r);
   // element totals are inflow minus outflow of the upwind flux
   CHECK(r[0] + r[1] == doctest::Approx(-1.0).epsilon(1e-13));
   CHECK(r[2] + r[3] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("high-order residual against explicit kronecker assembly")
{
   for (int dcase = 0; dcase < 3; dcase++)
   {
      MeshSpec spec = dcase == 0 ? spec_1d(2) : spec_2d(2, 1, dcase == 2);
      Model model = dcase == 0 ? burgers1d() : burgers2d();
      const int p = 3;
      Solver s(spec, p, model, subcell_opts());
      std::vector<double> u = random_state(s, 42 + dcase);
      std::vector<double> r;
      s.residual_high(u, 0.0, r);

      const Grid &g = s.grid();
      const RefOps &ref = g.ref;
      const int nn = ref.nn, d = spec.d;
      const Burgers &bm = std::get<Burgers>(model);
      std::vector<double> oracle(s.ndof(), 0.0);
      for (int e = 0; e < g.nelem; e++)
      {
         const ElemGeom &gm = g.geom(e);
         for (int k = 0; k < d; k++)
         {
            std::vector<double> Dk = kron_axis_matrix(ref, k, ref.ops.Dw);
            std::vector<double> ctF(nn, 0.0);
            for (int n = 0; n < nn; n++)
            {
               StateVec un{};
               un[0] = u[size_t(e)*nn + n];
               double F[2];
               flux(bm, un, F);
               for (int b = 0; b < d; b++)
               {
                  ctF[n] += gm.gjinv[(n*d + k)*d + b]*F[b];
               }
            }
            for (int i = 0; i < nn; i++)
            {
               for (int j = 0; j < nn; j++)
               {
                  oracle[size_t(e)*nn + i] -= Dk[i*nn + j]*ctF[j];
               }
            }
         }
      }
      const FaceSet &fs = g.faces;
      for (int f = 0; f < fs.count(); f++)
      {
         const int axis = fs.axis[f];
         const int stride = fs.stride(axis, ref);
         for (int t = 0; t < fs.nfnodes; t++)
         {
            const int fid = f*fs.nfnodes + t;
            const double *sn = &fs.sn[size_t(fid)*d];
            const double snn = fs.sn_norm[fid];
            const double w = g.face_weight(t);
            int niL = fs.eL[f]*nn + fs.nodeL[f] + t*stride;
            int niR = fs.eR[f]*nn + fs.nodeR[f] + t*stride;
            StateVec uL{}, uR{};
            uL[0] = u[niL];
            uR[0] = u[niR];
            double nhat[2] = {sn[0]/snn, d > 1 ? sn[1]/snn : 0.0};
            double lam = wave_speed_bound(bm, uL, uR, nhat);
            double FL[2], FR[2];
            flux(bm, uL, FL);
            flux(bm, uR, FR);
            double fl = 0.0, fr = 0.0;
            for (int b = 0; b < d; b++)
            {
               fl += FL[b]*sn[b];
               fr += FR[b]*sn[b];
            }
            double fhat = 0.5*(fl + fr) - 0.5*lam*snn*(uR[0] - uL[0]);
            oracle[niL] -= w*(fhat - fl);
            oracle[niR] -= w*((-fhat) - (-fr));
         }
      }
      double scale = scale_of(r);
      for (size_t i = 0; i < r.size(); i++)
      {
         CHECK(std::abs(r[i] - oracle[i]) < 1e-12*scale);
      }
   }
}

TEST_CASE("constant preservation for variable-velocity advection")
{
   Advection adv;
   adv.dim = 2;
   adv.beta.kind = VelocityField::Kind::rotation;
   adv.beta.center = {0.5, 0.5};
   for (bool curved : {false, true})
   {
      Solver s(spec_2d(4, 4, curved), 3, adv, subcell_opts());
      std::vector<double> u(s.ndof(), 0.8), r;
      s.residual_low(u, 0.0, r);
      CHECK(scale_of(r) < 1e-12);
   }
}

TEST_CASE("conservation on periodic meshes")
{
   for (int dcase = 0; dcase < 3; dcase++)
   {
      MeshSpec spec = dcase == 0 ? spec_1d(4) : spec_2d(3, 2, dcase == 2);
      Model model = dcase == 0 ? euler1d() : burgers2d();
      Solver s(spec, 3, model, subcell_opts());
      std::vector<double> u = random_state(s, 7 + dcase), r;
      s.residual_high(u, 0.0, r);
      CHECK(total_residual(s, r) < 1e-12*scale_of(r));
      s.residual_low(u, 0.0, r);
      CHECK(total_residual(s, r) < 1e-12*scale_of(r));
   }
}

TEST_CASE("bar states and viscosity pairs: scalar hulls")
{
   for (int dcase = 0; dcase < 2; dcase++)
   {
      MeshSpec spec = dcase == 0 ? spec_1d(3) : spec_2d(2, 2, true);
      Model model = dcase == 0 ? burgers1d() : burgers2d();
      Solver s(spec, 2, model, subcell_opts());
      std::vector<double> u = random_state(s, 101 + dcase, -0.8, 1.0);
      auto pairs = s.collect_pairs(u, 0.0);
      CHECK(pairs.size() > 0);
      for (const PairInfo &pi : pairs)
      {
         CHECK(pi.dhat >= 0.0);
         const double ui = u[pi.i], uj = u[pi.j];
         const double lo = std::min(ui, uj) - 1e-12;
         const double hi = std::max(ui, uj) + 1e-12;
         CHECK(pi.ubar_ij[0] >= lo);
         CHECK(pi.ubar_ij[0] <= hi);
         CHECK(pi.ubar_ji[0] >= lo);
         CHECK(pi.ubar_ji[0] <= hi);
      }
   }
}

TEST_CASE("graph viscosity symmetry across faces")
{
   Solver s(spec_2d(3, 2, true), 3, burgers2d(), subcell_opts());
   std::vector<double> u = random_state(s, 77, -1.0, 1.0);
   auto pairs = s.collect_pairs(u, 0.0);
   // cross-face coefficients are exactly antisymmetric
   for (const PairInfo &pi : pairs)
   {
      if (pi.elem >= 0) { continue; }
      for (int b = 0; b < 2; b++)
      {
         CHECK(pi.cij[b] == doctest::Approx(-pi.cji[b]).epsilon(1e-13));
      }
   }
}

TEST_CASE("euler bar states stay admissible on steep data")
{
   Euler e;
   e.dim = 1;
   Solver s(spec_1d(2), 3, e, subcell_opts());
   StateVec ul = euler_state(e, 1.0, {0.0, 0.0}, 1.0);
   StateVec ur = euler_state(e, 0.125, {0.0, 0.0}, 0.1);
   std::vector<double> u(s.ndof());
   for (int i = 0; i < s.nnodes(); i++)
   {
      const StateVec &v = (i % 2 == 0) ? ul : ur;
      for (int c = 0; c < 3; c++) { u[size_t(i)*3 + c] = v[c]; }
   }
   const double smin = std::min(e.specific_entropy(ul), e.specific_entropy(ur));
   auto pairs = s.collect_pairs(u, 0.0);
   CHECK(pairs.size() > 0);
   for (const PairInfo &pi : pairs)
   {
      for (const StateVec *ub : {&pi.ubar_ij, &pi.ubar_ji})
      {
         CHECK((*ub)[0] > 0.0);
         CHECK(e.internal_energy(*ub) > 0.0);
         CHECK(e.specific_entropy(*ub) >= smin - 1e-11);
      }
   }
}

TEST_CASE("forward euler low equals the bar-state convex combination")
{
   for (int dcase = 0; dcase < 3; dcase++)
   {
      MeshSpec spec = dcase == 0 ? spec_1d(3) : spec_2d(2, 2, dcase == 2);
      Model model = dcase == 0 ? burgers1d() : burgers2d();
      Solver s(spec, 3, model, subcell_opts());
      std::vector<double> u = random_state(s, 300 + dcase, -0.5, 1.0);
      const double dt = 0.9*s.max_dt(u, 0.0);
      std::vector<double> ulow;
      s.forward_euler_low(u, dt, 0.0, ulow);

      auto pairs = s.collect_pairs(u, 0.0);
      const Grid &g = s.grid();
      std::vector<double> expect(s.nnodes(), 0.0);
      std::vector<double> wsum(s.nnodes(), 0.0);
      for (const PairInfo &pi : pairs)
      {
         const double mi = g.geom(pi.i/g.ref.nn).mass[pi.i % g.ref.nn];
         const double mj = g.geom(pi.j/g.ref.nn).mass[pi.j % g.ref.nn];
         expect[pi.i] += 2.0*dt*pi.dhat/mi*pi.ubar_ij[0];
         wsum[pi.i] += 2.0*dt*pi.dhat/mi;
         expect[pi.j] += 2.0*dt*pi.dhat/mj*pi.ubar_ji[0];
         wsum[pi.j] += 2.0*dt*pi.dhat/mj;
      }
      for (int i = 0; i < s.nnodes(); i++)
      {
         expect[i] += (1.0 - wsum[i])*u[i];
         CHECK(wsum[i] <= 1.0 + 1e-12);
         CHECK(ulow[i] == doctest::Approx(expect[i]).epsilon(1e-11));
      }
   }
}

TEST_CASE("idp step bound and local maximum principle")
{
   for (int dcase = 0; dcase < 2; dcase++)
   {
      MeshSpec spec = dcase == 0 ? spec_1d(4) : spec_2d(3, 3);
      Model model = dcase == 0 ? burgers1d() : burgers2d();
      Solver s(spec, 3, model, subcell_opts());
      std::vector<double> u = random_state(s, 55 + dcase, -1.0, 1.0);
      const double dtmax = s.max_dt(u, 0.0);
      std::vector<double> lo, hi, ulow;
      s.scalar_hull(u, 0.0, lo, hi);
      s.forward_euler_low(u, dtmax, 0.0, ulow);
      for (int i = 0; i < s.nnodes(); i++)
      {
         CHECK(ulow[i] >= lo[i] - 1e-12);
         CHECK(ulow[i] <= hi[i] + 1e-12);
      }
      CHECK_THROWS_AS(s.forward_euler_low(u, 1.02*dtmax, 0.0, ulow), error);
   }
}

TEST_CASE("mesh refinement halves the step bound (advection)")
{
   Advection a;
   a.dim = 1;
   a.beta.value = {1.0, 0.0};
   Solver s1(spec_1d(8), 3, a, subcell_opts());
   Solver s2(spec_1d(16), 3, a, subcell_opts());
   std::vector<double> u1(s1.ndof(), 0.3), u2(s2.ndof(), 0.3);
   CHECK(s1.max_dt(u1, 0.0)
         == doctest::Approx(2.0*s2.max_dt(u2, 0.0)).epsilon(1e-12));
}

TEST_CASE("zero-velocity advection: unbounded step")
{
   Advection a;
   a.dim = 1;
   a.beta.value = {0.0, 0.0};
   Solver s(spec_1d(4), 2, a, subcell_opts());
   std::vector<double> u(s.ndof(), 0.5);
   CHECK(std::isinf(s.max_dt(u, 0.0)));
}

TEST_CASE("sparsified equals unsparsified at p = 1")
{
   LimiterOptions lo_sparse;
   lo_sparse.strategy = LimiterStrategy::low_only;
   LimiterOptions lo_dense = lo_sparse;
   lo_dense.unsparsified = true;
   Solver ss(spec_1d(6), 1, burgers1d(), lo_sparse);
   Solver sd(spec_1d(6), 1, burgers1d(), lo_dense);
   std::vector<double> u = random_state(ss, 9, -1.0, 1.0);
   std::vector<double> rs, rd;
   ss.residual_low(u, 0.0, rs);
   sd.residual_low(u, 0.0, rd);
   for (size_t i = 0; i < rs.size(); i++)
   {
      CHECK(rs[i] == doctest::Approx(rd[i]).epsilon(1e-12));
   }
}

TEST_CASE("euler low-order step preserves the invariant set")
{
   Euler e;
   e.dim = 1;
   Solver s(spec_1d(8), 3, e, subcell_opts());
   std::mt19937 rng(31);
   std::uniform_real_distribution<double> rd(0.1, 2.0), vd(-0.6, 0.6);
   for (int trial = 0; trial < 50; trial++)
   {
      std::vector<double> u(s.ndof());
      double smin = infinity;
      for (int i = 0; i < s.nnodes(); i++)
      {
         StateVec v = euler_state(e, rd(rng), {vd(rng), 0.0}, rd(rng));
         smin = std::min(smin, e.specific_entropy(v));
         for (int c = 0; c < 3; c++) { u[size_t(i)*3 + c] = v[c]; }
      }
      const double dt = s.max_dt(u, 0.0);
      std::vector<double> ulow;
      s.forward_euler_low(u, dt, 0.0, ulow);
      for (int i = 0; i < s.nnodes(); i++)
      {
         StateVec v{};
         for (int c = 0; c < 3; c++) { v[c] = ulow[size_t(i)*3 + c]; }
         CHECK(v[0] > 0.0);
         CHECK(e.internal_energy(v) > 0.0);
         CHECK(e.specific_entropy(v) >= smin - 1e-11);
      }
   }
}
