#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mesh.hpp"

using namespace dgfct;

namespace
{

MeshSpec spec_1d(int n, double lo = 0.0, double hi = 1.0, bool periodic = true)
{
   MeshSpec s;
   s.d = 1;
   s.n[0] = n;
   s.lo[0] = lo;
   s.hi[0] = hi;
   s.periodic[0] = periodic;
   return s;
}

MeshSpec spec_2d(int nx, int ny, bool curved = false, double amp = 0.04)
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
      s.mapping.amplitude = amp;
   }
   return s;
}

} // namespace

TEST_CASE("1d uniform geometry")
{
   Grid g = build_grid(spec_1d(8), 3);
   const ElemGeom &gm = g.geom(0);
   for (int n = 0; n < g.ref.nn; n++)
   {
      CHECK(gm.detJ[n] == doctest::Approx(1.0/8.0).epsilon(1e-14));
      CHECK(gm.gjinv[n] == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(gm.mass[n] == doctest::Approx(g.ref.ops.q.w[n]/8.0).epsilon(1e-14));
   }
   // Cartesian correction vanishes
   CHECK(g.max_metric_correction(0) < 1e-15);
}

TEST_CASE("2d cartesian metric identities")
{
   Grid g = build_grid(spec_2d(4, 4), 3);
   const ElemGeom &gm = g.geom(0);
   CHECK(gm.gjinv[0] == doctest::Approx(0.25).epsilon(1e-14));
   CHECK(gm.gjinv[3] == doctest::Approx(0.25).epsilon(1e-14));
   CHECK(gm.gjinv[1] == doctest::Approx(0.0));
   CHECK(g.metric_residual_high(0) < 1e-14);
   CHECK(g.metric_residual_low(0) < 1e-14);
   CHECK(g.max_metric_correction(0) < 1e-15);
}

TEST_CASE("curved 2d metric identities and correction")
{
   for (int p : {2, 3})
   {
      Grid g = build_grid(spec_2d(4, 4, true), p);
      double res_h = 0.0, res_l = 0.0, corr = 0.0;
      for (int e = 0; e < g.nelem; e++)
      {
         res_h = std::max(res_h, g.metric_residual_high(e));
         res_l = std::max(res_l, g.metric_residual_low(e));
         corr = std::max(corr, g.max_metric_correction(e));
      }
      CHECK(res_h < 1e-12);
      CHECK(res_l < 1e-12);
      CHECK(corr > 1e-6);   // the correction is genuinely active

      // the identity fails without the correction
      double res_raw = 0.0;
      for (int e = 0; e < g.nelem; e++)
      {
         ElemGeom &gm = g.geoms[e];
         std::vector<double> keep = gm.gjinv_hat;
         gm.gjinv_hat = gm.gjinv;
         res_raw = std::max(res_raw, g.metric_residual_low(e));
         gm.gjinv_hat = keep;
      }
      CHECK(res_raw > 1e-5);
   }
}

TEST_CASE("metric correction vanishes under refinement, slope >= 0.9")
{
   // the correction is an O(h) perturbation at worst; smooth analytic
   // mappings decay even faster, so only the slope is pinned
   std::vector<double> corr;
   for (int lvl = 0; lvl < 3; lvl++)
   {
      int n = 4 << lvl;
      Grid g = build_grid(spec_2d(n, n, true), 3);
      double c = 0.0;
      for (int e = 0; e < g.nelem; e++)
      {
         c = std::max(c, g.max_metric_correction(e));
      }
      corr.push_back(c);
      if (lvl > 0) { CHECK(corr[lvl - 1]/c > 2.0*0.8); }
   }
   double slope = std::log2(corr[0]/corr[2])/2.0;
   CHECK(slope > 0.9);
}

TEST_CASE("inconsistent face data is rejected")
{
   // a face-normal perturbation with nonzero mean breaks the solvability of
   // the correction system
   Grid g = build_grid(spec_2d(2, 2, true), 3);
   int f = g.elem_face(0, 0, 1);
   for (int t = 0; t < g.faces.nfnodes; t++)
   {
      g.faces.sn[(size_t(f)*g.faces.nfnodes + t)*2 + 0] += 0.2;
   }
   CHECK_THROWS_AS(correct_metrics(g, 0), error);
}

TEST_CASE("generic stencil row sums vanish")
{
   for (int p : {1, 3})
   {
      for (bool curved : {false, true})
      {
         Grid g = build_grid(spec_2d(3, 3, curved), p);
         for (int e = 0; e < g.nelem; e++)
         {
            std::vector<double> sums = stencil_row_sums(g, e);
            for (double v : sums) { CHECK(std::abs(v) < 1e-13); }
            if (g.uniform) { break; }
         }
      }
   }
   Grid g1 = build_grid(spec_1d(5), 4);
   std::vector<double> sums = stencil_row_sums(g1, 0);
   for (double v : sums) { CHECK(std::abs(v) < 1e-13); }
}

TEST_CASE("advection coefficients: corrected row sums vanish")
{
   Advection rot;
   rot.dim = 2;
   rot.beta.kind = VelocityField::Kind::rotation;
   rot.beta.center = {0.5, 0.5};
   // div-free field whose contravariant components vary along their own
   // axis, so the correction is active even on Cartesian meshes
   Advection lin;
   lin.dim = 2;
   lin.beta.kind = VelocityField::Kind::linear;
   lin.beta.coef[0][0] = 0.3;
   lin.beta.coef[0][1] = 1.0;    // b_x = 0.3 + x
   lin.beta.coef[1][0] = 0.1;
   lin.beta.coef[1][2] = -1.0;   // b_y = 0.1 - y

   int active = 0;
   for (bool curved : {false, true})
   {
      for (const Advection *adv : {&rot, &lin})
      {
         MeshSpec spec = spec_2d(4, 4, curved);
         if (adv == &lin)
         {
            // beta . n of the linear field is not continuous across the
            // periodic identification; use walls there
            spec.periodic[0] = spec.periodic[1] = false;
         }
         Grid g = build_grid(spec, 3);
         AdvectionCoeffs ac = build_advection_coeffs(g, *adv);
         double dz = 0.0;
         for (size_t i = 0; i < ac.z.size(); i++)
         {
            dz = std::max(dz, std::abs(ac.z[i] - ac.z_high[i]));
         }
         if (dz > 1e-8) { active++; }
         for (int e = 0; e < g.nelem; e++)
         {
            std::vector<double> sums = stencil_row_sums(g, e, *adv, ac);
            for (double v : sums) { CHECK(std::abs(v) < 1e-13); }
         }
      }
   }
   CHECK(active >= 2);   // curved rotation and the linear field need it
}

TEST_CASE("face orientation and weighted normals")
{
   Grid g = build_grid(spec_2d(3, 2), 2);
   const FaceSet &fs = g.faces;
   for (int f = 0; f < fs.count(); f++)
   {
      for (int t = 0; t < fs.nfnodes; t++)
      {
         // axis faces are straight: sn aligned with the axis, length h_perp
         const double *sn = &fs.sn[(size_t(f)*fs.nfnodes + t)*2];
         if (fs.axis[f] == 0)
         {
            CHECK(sn[0] == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(sn[1] == doctest::Approx(0.0));
         }
         else
         {
            CHECK(sn[0] == doctest::Approx(0.0));
            CHECK(sn[1] == doctest::Approx(1.0/3.0).epsilon(1e-14));
         }
      }
   }
   // every element/side lookup resolves to a face adjacent to that element
   for (int e = 0; e < g.nelem; e++)
   {
      for (int axis = 0; axis < 2; axis++)
      {
         for (int side = 0; side < 2; side++)
         {
            int f = g.elem_face(e, axis, side);
            CHECK(fs.axis[f] == axis);
            CHECK((fs.eL[f] == e || fs.eR[f] == e));
         }
      }
   }
}

TEST_CASE("curved faces: sn matches the volume metric at face nodes")
{
   Grid g = build_grid(spec_2d(3, 3, true), 3);
   const FaceSet &fs = g.faces;
   const int n1 = g.ref.n1();
   // high-x face of element 0: sn should equal (gjinv_00, gjinv_01) there
   int f = g.elem_face(0, 0, 1);
   const ElemGeom &gm = g.geom(0);
   for (int t = 0; t < fs.nfnodes; t++)
   {
      int n = g.faces.nodeL[f] + t*fs.stride(0, g.ref);
      (void)n1;
      const double *sn = &fs.sn[(size_t(f)*fs.nfnodes + t)*2];
      CHECK(sn[0] == doctest::Approx(gm.gjinv[(n*2 + 0)*2 + 0]).epsilon(1e-11));
      CHECK(sn[1] == doctest::Approx(gm.gjinv[(n*2 + 0)*2 + 1]).epsilon(1e-11));
   }
}

TEST_CASE("periodic wrap and single-element meshes")
{
   Grid g = build_grid(spec_1d(1), 2);
   CHECK(g.faces.count() == 1);
   CHECK(g.faces.eL[0] == 0);
   CHECK(g.faces.eR[0] == 0);
   CHECK(g.elem_face(0, 0, 0) == 0);
   CHECK(g.elem_face(0, 0, 1) == 0);
}

TEST_CASE("non-positive jacobian is rejected")
{
   MeshSpec s = spec_2d(2, 2, true, 0.4);   // amplitude far past bijectivity
   CHECK_THROWS_AS(build_grid(s, 3), error);
}

TEST_CASE("minimum norm solver consistency check")
{
   Grid g = build_grid(spec_1d(4), 3);
   std::vector<double> rhs(g.ref.nn, 1.0);   // constant rhs is inconsistent
   CHECK_THROWS_AS(g.minnorm.solve(rhs, 1.0), error);
}
