#include "tensor_ops.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace dgfct
{

namespace
{

// Legendre P_n(x) and derivative on [-1,1] by recurrence.
void legendre(int n, double x, double &P, double &dP)
{
   double p0 = 1.0, p1 = x;
   if (n == 0) { P = 1.0; dP = 0.0; return; }
   for (int k = 2; k <= n; k++)
   {
      double p2 = ((2*k - 1)*x*p1 - (k - 1)*p0)/k;
      p0 = p1;
      p1 = p2;
   }
   P = p1;
   // (1-x^2) P_n' = n (P_{n-1} - x P_n)
   if (std::abs(x) < 1.0)
   {
      dP = n*(p0 - x*p1)/(1.0 - x*x);
   }
   else
   {
      dP = x > 0 ? n*(n + 1)/2.0 : (n % 2 == 0 ? -1.0 : 1.0)*n*(n + 1)/2.0;
   }
}

} // namespace

Quadrature1D gauss_lobatto(int p)
{
   require(p >= 0 && p <= 32, errc::invalid_argument,
           "gauss_lobatto: degree must be in [0,32]");
   Quadrature1D q;
   q.p = p;
   if (p == 0)
   {
      q.xi = {0.5};
      q.w = {1.0};
      return q;
   }
   const int n = p + 1;
   std::vector<double> x(n), w(n);
   x[0] = -1.0;
   x[n-1] = 1.0;
   // Interior nodes are roots of P_p'. Newton from Chebyshev-Lobatto guesses.
   for (int i = 1; i < n - 1; i++)
   {
      double xi = -std::cos(M_PI*i/p);
      for (int it = 0; it < 100; it++)
      {
         double P, dP;
         legendre(p, xi, P, dP);
         // d/dx P_p' from the Legendre ODE
         double d2P = (2.0*xi*dP - p*(p + 1)*P)/(1.0 - xi*xi);
         double dx = dP/d2P;
         xi -= dx;
         if (std::abs(dx) < 1e-15) { break; }
      }
      x[i] = xi;
   }
   for (int i = 0; i < n; i++)
   {
      double P, dP;
      legendre(p, x[i], P, dP);
      w[i] = 2.0/(p*(p + 1)*P*P);
   }
   // Symmetrize, then map [-1,1] -> [0,1].
   q.xi.resize(n);
   q.w.resize(n);
   for (int i = 0; i < n; i++)
   {
      double xs = 0.5*(x[i] - x[n-1-i]);
      double ws = 0.5*(w[i] + w[n-1-i]);
      q.xi[i] = 0.5*(xs + 1.0);
      q.w[i] = 0.5*ws;
   }
   q.xi[0] = 0.0;
   q.xi[n-1] = 1.0;
   return q;
}

Operators1D build_operators_1d(const Quadrature1D &q)
{
   Operators1D o;
   o.q = q;
   const int n = q.n();
   o.Dnodal.assign(n*n, 0.0);
   o.Dw.assign(n*n, 0.0);
   o.Dhat.assign(n*n, 0.0);
   if (q.p == 0) { return o; }   // all coupling is through faces

   // Barycentric weights for the Lagrange basis on the nodes.
   std::vector<double> lam(n, 1.0);
   for (int j = 0; j < n; j++)
   {
      for (int m = 0; m < n; m++)
      {
         if (m != j) { lam[j] /= (q.xi[j] - q.xi[m]); }
      }
   }
   for (int i = 0; i < n; i++)
   {
      double diag = 0.0;
      for (int j = 0; j < n; j++)
      {
         if (j == i) { continue; }
         double v = (lam[j]/lam[i])/(q.xi[i] - q.xi[j]);
         o.Dnodal[i*n + j] = v;
         diag -= v;
      }
      o.Dnodal[i*n + i] = diag;
   }
   for (int i = 0; i < n; i++)
   {
      for (int j = 0; j < n; j++)
      {
         o.Dw[i*n + j] = q.w[i]*o.Dnodal[i*n + j];
      }
   }
   // Band of +-1/2 coupling consecutive nodes; first and last rows carry the
   // diagonal entries that preserve the column-sum property.
   for (int i = 0; i < n; i++)
   {
      int lo = (i == 0) ? 0 : i - 1;
      int hi = (i == n - 1) ? n - 1 : i + 1;
      o.Dhat[i*n + lo] = -0.5;
      o.Dhat[i*n + hi] += 0.5;
   }
   return o;
}

ModalTransform build_modal_transform(const Quadrature1D &q)
{
   ModalTransform m;
   m.p = q.p;
   const int n = q.n();
   Eigen::MatrixXd V(n, n);
   for (int i = 0; i < n; i++)
   {
      double x = 2.0*q.xi[i] - 1.0;
      for (int k = 0; k < n; k++)
      {
         double P, dP;
         legendre(k, x, P, dP);
         V(i, k) = P*std::sqrt(2.0*k + 1.0);
      }
   }
   Eigen::MatrixXd Vi = V.inverse();
   m.V.resize(n*n);
   m.Vinv.resize(n*n);
   for (int i = 0; i < n; i++)
   {
      for (int j = 0; j < n; j++)
      {
         m.V[i*n + j] = V(i, j);
         m.Vinv[i*n + j] = Vi(i, j);
      }
   }
   return m;
}

RefOps build_ref_ops(int p, int d)
{
   require(d == 1 || d == 2, errc::invalid_argument,
           "reference operators support d in {1,2}");
   RefOps r;
   r.d = d;
   r.p = p;
   r.ops = build_operators_1d(gauss_lobatto(p));
   r.modal = build_modal_transform(r.ops.q);
   const int n1 = p + 1;
   r.nn = ipow(n1, d);
   r.wnode.resize(r.nn);
   r.wtrans.resize(d*r.nn);
   r.node_axis_idx.resize(d*r.nn);
   for (int n = 0; n < r.nn; n++)
   {
      int idx[2] = {n % n1, (n/n1) % n1};
      double wn = 1.0;
      for (int k = 0; k < d; k++) { wn *= r.ops.q.w[idx[k]]; }
      r.wnode[n] = wn;
      for (int k = 0; k < d; k++)
      {
         r.wtrans[k*r.nn + n] = wn/r.ops.q.w[idx[k]];
         r.node_axis_idx[k*r.nn + n] = idx[k];
      }
   }
   for (int k = 0; k < d; k++)
   {
      r.lines[k].stride = ipow(n1, k);
      r.lines[k].base.clear();
      if (d == 1)
      {
         r.lines[k].base.push_back(0);
      }
      else
      {
         int tstride = (k == 0) ? n1 : 1;
         for (int t = 0; t < n1; t++) { r.lines[k].base.push_back(t*tstride); }
      }
   }
   return r;
}

namespace
{
std::vector<double> kron_assemble(const std::vector<double> &A, int na,
                                  const std::vector<double> &B, int nb)
{
   std::vector<double> K(na*nb*na*nb, 0.0);
   for (int ia = 0; ia < na; ia++)
   {
      for (int ja = 0; ja < na; ja++)
      {
         for (int ib = 0; ib < nb; ib++)
         {
            for (int jb = 0; jb < nb; jb++)
            {
               K[(ia*nb + ib)*na*nb + (ja*nb + jb)] = A[ia*na + ja]*B[ib*nb + jb];
            }
         }
      }
   }
   return K;
}
} // namespace

std::vector<double> kron_axis_matrix(const RefOps &r, int axis,
                                     const std::vector<double> &op1d)
{
   const int n1 = r.n1();
   if (r.d == 1) { return op1d; }
   std::vector<double> M(n1*n1, 0.0);
   for (int i = 0; i < n1; i++) { M[i*n1 + i] = r.ops.q.w[i]; }
   // axis 0 is the fastest-varying index
   return axis == 0 ? kron_assemble(M, n1, op1d, n1)
          : kron_assemble(op1d, n1, M, n1);
}

void apply_axis(const RefOps &r, int axis, const double *op1d,
                const double *field, double *out, int ncomp, bool accumulate)
{
   const int n1 = r.n1();
   const LineTable &lt = r.lines[axis];
   for (int base : lt.base)
   {
      for (int i = 0; i < n1; i++)
      {
         const int oi = (base + i*lt.stride)*ncomp;
         for (int c = 0; c < ncomp; c++)
         {
            double acc = accumulate ? out[oi + c] : 0.0;
            for (int j = 0; j < n1; j++)
            {
               acc += op1d[i*n1 + j]*field[(base + j*lt.stride)*ncomp + c];
            }
            out[oi + c] = acc;
         }
      }
   }
}

double modal_truncation_error(const RefOps &r, const double *u_elem,
                              double *sa, double *sb)
{
   const int nn = r.nn;
   const int n1 = r.n1();
   // nodal -> modal
   std::copy(u_elem, u_elem + nn, sa);
   for (int k = 0; k < r.d; k++)
   {
      apply_axis(r, k, r.modal.Vinv.data(), sa, sb, 1);
      std::swap(sa, sb);
   }
   // zero every coefficient with any 1D index equal to p, transform back
   for (int n = 0; n < nn; n++)
   {
      bool masked = false;
      for (int k = 0; k < r.d; k++)
      {
         if (r.node_axis_idx[k*nn + n] == r.p) { masked = true; }
      }
      if (masked) { sa[n] = 0.0; }
   }
   for (int k = 0; k < r.d; k++)
   {
      apply_axis(r, k, r.modal.V.data(), sa, sb, 1);
      std::swap(sa, sb);
   }
   double num = 0.0, den = 0.0;
   for (int n = 0; n < nn; n++)
   {
      num += r.wnode[n]*sqr(u_elem[n] - sa[n]);
      den += r.wnode[n]*sqr(u_elem[n]);
   }
   // truncation energy at or below roundoff counts as exactly resolved
   if (den < 1e-300 || num <= 1e-28*den) { return -infinity; }
   return std::log10(num/den);
}

} // namespace dgfct
