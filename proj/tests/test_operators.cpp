#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "tensor_ops.hpp"

using namespace dgfct;

namespace
{

// quadrature of monomials on [0,1] against the exact value 1/(k+1)
double monomial_error(const Quadrature1D &q, int k)
{
   double acc = 0.0;
   for (int i = 0; i < q.n(); i++)
   {
      acc += q.w[i]*std::pow(q.xi[i], k);
   }
   return std::abs(acc - 1.0/(k + 1));
}

} // namespace

TEST_CASE("gauss-lobatto low degrees")
{
   Quadrature1D q1 = gauss_lobatto(1);
   CHECK(q1.xi[0] == doctest::Approx(0.0).epsilon(1e-15));
   CHECK(q1.xi[1] == doctest::Approx(1.0).epsilon(1e-15));
   CHECK(q1.w[0] == doctest::Approx(0.5).epsilon(1e-15));
   CHECK(q1.w[1] == doctest::Approx(0.5).epsilon(1e-15));

   Quadrature1D q2 = gauss_lobatto(2);
   CHECK(q2.xi[1] == doctest::Approx(0.5).epsilon(1e-15));
   CHECK(q2.w[0] == doctest::Approx(1.0/6.0).epsilon(1e-14));
   CHECK(q2.w[1] == doctest::Approx(2.0/3.0).epsilon(1e-14));
   for (int k = 0; k <= 3; k++) { CHECK(monomial_error(q2, k) < 1e-14); }

   Quadrature1D q3 = gauss_lobatto(3);
   CHECK(q3.xi[1] == doctest::Approx((1.0 - 1.0/std::sqrt(5.0))/2.0).epsilon(1e-14));
   CHECK(q3.xi[2] == doctest::Approx((1.0 + 1.0/std::sqrt(5.0))/2.0).epsilon(1e-14));
   for (int k = 0; k <= 5; k++) { CHECK(monomial_error(q3, k) < 1e-13); }

   Quadrature1D q0 = gauss_lobatto(0);
   CHECK(q0.xi[0] == 0.5);
   CHECK(q0.w[0] == 1.0);
}

TEST_CASE("gauss-lobatto properties for p = 0..10")
{
   for (int p = 0; p <= 10; p++)
   {
      Quadrature1D q = gauss_lobatto(p);
      double wsum = 0.0;
      for (int i = 0; i < q.n(); i++)
      {
         CHECK(q.w[i] > 0.0);
         wsum += q.w[i];
         // symmetry about 1/2
         CHECK(q.xi[i] + q.xi[q.n() - 1 - i] == doctest::Approx(1.0).epsilon(1e-14));
         CHECK(q.w[i] == doctest::Approx(q.w[q.n() - 1 - i]).epsilon(1e-14));
         if (i > 0) { CHECK(q.xi[i] > q.xi[i - 1]); }
      }
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
      // exactness through degree 2p-1
      for (int k = 0; k <= std::max(2*p - 1, 0); k++)
      {
         CHECK(monomial_error(q, k) < 1e-13);
      }
   }
}

TEST_CASE("1d operators: row and column sums")
{
   for (int p = 0; p <= 10; p++)
   {
      Operators1D o = build_operators_1d(gauss_lobatto(p));
      const int n = o.n();
      for (const std::vector<double> *D : {&o.Dw, &o.Dhat})
      {
         for (int i = 0; i < n; i++)
         {
            double rs = 0.0;
            for (int j = 0; j < n; j++) { rs += (*D)[i*n + j]; }
            CHECK(std::abs(rs) < 1e-13);   // P1
         }
         for (int j = 0; j < n; j++)
         {
            double cs = 0.0;
            for (int i = 0; i < n; i++) { cs += (*D)[i*n + j]; }
            double expect = 0.0;
            if (p > 0)
            {
               if (j == 0) { expect = -1.0; }
               if (j == n - 1) { expect = 1.0; }
            }
            CHECK(std::abs(cs - expect) < 1e-13);   // P2
         }
      }
   }
}

TEST_CASE("1d operators: p=1 weighted differentiation matrix")
{
   Operators1D o = build_operators_1d(gauss_lobatto(1));
   CHECK(o.dw(0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
   CHECK(o.dw(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
   CHECK(o.dw(1, 0) == doctest::Approx(-0.5).epsilon(1e-15));
   CHECK(o.dw(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("1d operators: sparsified matrix band structure at p=3")
{
   Operators1D o = build_operators_1d(gauss_lobatto(3));
   const double expect[4][4] =
   {
      {-0.5, 0.5, 0.0, 0.0},
      {-0.5, 0.0, 0.5, 0.0},
      {0.0, -0.5, 0.0, 0.5},
      {0.0, 0.0, -0.5, 0.5},
   };
   for (int i = 0; i < 4; i++)
   {
      for (int j = 0; j < 4; j++)
      {
         CHECK(o.dhat(i, j) == doctest::Approx(expect[i][j]).epsilon(1e-15));
      }
   }
}

TEST_CASE("nodal differentiation is exact on polynomials")
{
   for (int p : {2, 5, 8})
   {
      Operators1D o = build_operators_1d(gauss_lobatto(p));
      const int n = o.n();
      // differentiate x^p exactly
      for (int i = 0; i < n; i++)
      {
         double acc = 0.0;
         for (int j = 0; j < n; j++)
         {
            acc += o.dnodal(i, j)*std::pow(o.q.xi[j], p);
         }
         CHECK(acc == doctest::Approx(p*std::pow(o.q.xi[i], p - 1)).epsilon(1e-11));
      }
   }
}

TEST_CASE("kronecker assembly matches axis application")
{
   std::mt19937 rng(1234);
   std::uniform_real_distribution<double> dist(-1.0, 1.0);
   for (int p : {1, 3, 4})
   {
      RefOps r = build_ref_ops(p, 2);
      const int nn = r.nn;
      std::vector<double> u(nn);
      for (double &v : u) { v = dist(rng); }
      for (int axis : {0, 1})
      {
         std::vector<double> K = kron_axis_matrix(r, axis, r.ops.Dw);
         std::vector<double> expect(nn, 0.0);
         for (int i = 0; i < nn; i++)
         {
            for (int j = 0; j < nn; j++) { expect[i] += K[i*nn + j]*u[j]; }
         }
         // axis apply plus the transverse mass weights
         std::vector<double> got(nn, 0.0);
         apply_axis(r, axis, r.ops.Dw.data(), u.data(), got.data(), 1);
         for (int n = 0; n < nn; n++) { got[n] *= r.wtrans[axis*nn + n]; }
         for (int n = 0; n < nn; n++)
         {
            CHECK(got[n] == doctest::Approx(expect[n]).epsilon(1e-13));
         }
         // row sums of the derivative operators vanish
         for (int i = 0; i < nn; i++)
         {
            double rs = 0.0;
            for (int j = 0; j < nn; j++) { rs += K[i*nn + j]; }
            CHECK(std::abs(rs) < 1e-13);
         }
      }
   }
}

TEST_CASE("kronecker mass diagonal at p=1, d=2")
{
   RefOps r = build_ref_ops(1, 2);
   for (int n = 0; n < 4; n++)
   {
      CHECK(r.wnode[n] == doctest::Approx(0.25).epsilon(1e-15));
   }
}

TEST_CASE("d=1 operators equal their 1d factors")
{
   RefOps r = build_ref_ops(4, 1);
   std::vector<double> K = kron_axis_matrix(r, 0, r.ops.Dhat);
   for (size_t i = 0; i < K.size(); i++) { CHECK(K[i] == r.ops.Dhat[i]); }
}

TEST_CASE("modal transform round trip")
{
   std::mt19937 rng(99);
   std::uniform_real_distribution<double> dist(-1.0, 1.0);
   for (int p : {1, 4, 7})
   {
      ModalTransform m = build_modal_transform(gauss_lobatto(p));
      const int n = m.n();
      std::vector<double> u(n), w(n), v(n);
      for (double &x : u) { x = dist(rng); }
      for (int i = 0; i < n; i++)
      {
         w[i] = 0.0;
         for (int j = 0; j < n; j++) { w[i] += m.Vinv[i*n + j]*u[j]; }
      }
      for (int i = 0; i < n; i++)
      {
         v[i] = 0.0;
         for (int j = 0; j < n; j++) { v[i] += m.V[i*n + j]*w[j]; }
      }
      for (int i = 0; i < n; i++)
      {
         CHECK(v[i] == doctest::Approx(u[i]).epsilon(1e-12));
      }
   }
}

TEST_CASE("smoothness indicator cases")
{
   // degree-(p-1) data has zero masked coefficients -> -inf sentinel
   {
      RefOps r = build_ref_ops(3, 2);
      std::vector<double> u(r.nn), a(r.nn), b(r.nn);
      for (int n = 0; n < r.nn; n++)
      {
         double x = r.ops.q.xi[n % 4], y = r.ops.q.xi[n/4];
         u[n] = 1.0 + x + y + x*x*y*y;   // degree 2 in each variable
      }
      CHECK(modal_truncation_error(r, u.data(), a.data(), b.data()) == -infinity);
   }
   // highest mode only -> ratio 1 -> s = 0
   {
      RefOps r = build_ref_ops(4, 1);
      const int n = r.nn;
      std::vector<double> u(n), a(n), b(n);
      for (int i = 0; i < n; i++)
      {
         u[i] = r.modal.V[i*n + (n - 1)];   // top Legendre mode at the nodes
      }
      CHECK(modal_truncation_error(r, u.data(), a.data(), b.data())
            == doctest::Approx(0.0).epsilon(1e-12));
   }
   // zero field -> sentinel
   {
      RefOps r = build_ref_ops(2, 1);
      std::vector<double> u(r.nn, 0.0), a(r.nn), b(r.nn);
      CHECK(modal_truncation_error(r, u.data(), a.data(), b.data()) == -infinity);
   }
}

TEST_CASE("smoothness of a resolved sine at p=7")
{
   RefOps r = build_ref_ops(7, 1);
   const int n = r.nn;
   std::vector<double> u(n), a(n), b(n);
   for (int i = 0; i < n; i++) { u[i] = std::sin(M_PI*r.ops.q.xi[i]); }
   const double sK = modal_truncation_error(r, u.data(), a.data(), b.data());
   CHECK(sK < -8.0);

   // independent oracle: project the nodal interpolant onto the normalized
   // Legendre modes with a dense Gauss-Lobatto rule (exact for degree 2p)
   Quadrature1D dq = gauss_lobatto(20);
   ModalTransform mt = build_modal_transform(r.ops.q);
   std::vector<double> coef(n, 0.0);
   for (int k = 0; k < n; k++)
   {
      for (int q = 0; q < dq.n(); q++)
      {
         // evaluate the interpolant via its modal expansion is circular, so
         // use barycentric Lagrange evaluation instead
         double x = dq.xi[q];
         double num = 0.0, den = 0.0;
         bool hit = false;
         for (int j = 0; j < n && !hit; j++)
         {
            if (std::abs(x - r.ops.q.xi[j]) < 1e-14)
            {
               num = u[j];
               den = 1.0;
               hit = true;
            }
         }
         double val;
         if (hit) { val = num; }
         else
         {
            std::vector<double> lam(n, 1.0);
            for (int j = 0; j < n; j++)
            {
               for (int mm = 0; mm < n; mm++)
               {
                  if (mm != j) { lam[j] /= (r.ops.q.xi[j] - r.ops.q.xi[mm]); }
               }
            }
            num = den = 0.0;
            for (int j = 0; j < n; j++)
            {
               double wj = lam[j]/(x - r.ops.q.xi[j]);
               num += wj*u[j];
               den += wj;
            }
            val = num/den;
         }
         // normalized shifted Legendre P_k at x
         double t = 2.0*x - 1.0, p0 = 1.0, p1 = t, pk;
         if (k == 0) { pk = 1.0; }
         else if (k == 1) { pk = t; }
         else
         {
            pk = 0.0;
            for (int kk = 2; kk <= k; kk++)
            {
               pk = ((2*kk - 1)*t*p1 - (kk - 1)*p0)/kk;
               p0 = p1;
               p1 = pk;
            }
         }
         coef[k] += dq.w[q]*val*pk*std::sqrt(2.0*k + 1.0);
      }
   }
   // the projection coefficients must match the transform coefficients
   std::vector<double> tcoef(n, 0.0);
   for (int i = 0; i < n; i++)
   {
      for (int j = 0; j < n; j++) { tcoef[i] += mt.Vinv[i*n + j]*u[j]; }
   }
   for (int k = 0; k < n; k++)
   {
      CHECK(coef[k] == doctest::Approx(tcoef[k]).epsilon(1e-9));
   }
}
