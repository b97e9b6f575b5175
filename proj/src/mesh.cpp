#include "mesh.hpp"

#include <algorithm>
#include <cmath>

namespace dgfct
{

void map_point(const MeshSpec &spec, const double *xin, double *xout)
{
   if (spec.mapping.kind == Mapping::Kind::cartesian)
   {
      for (int k = 0; k < spec.d; k++) { xout[k] = xin[k]; }
      return;
   }
   const double a = spec.mapping.amplitude;
   double s = 1.0;
   for (int k = 0; k < spec.d; k++)
   {
      double t = (xin[k] - spec.lo[k])/(spec.hi[k] - spec.lo[k]);
      s *= std::sin(2.0*M_PI*t);
   }
   for (int k = 0; k < spec.d; k++)
   {
      xout[k] = xin[k] + a*(spec.hi[k] - spec.lo[k])*s;
   }
}

void Grid::node_coords(int e, int n, double *x) const
{
   int cell[2];
   elem_cell(e, cell);
   const int n1 = ref.n1();
   int idx[2] = {n % n1, (n/n1) % n1};
   double pre[2];
   for (int k = 0; k < spec.d; k++)
   {
      pre[k] = spec.lo[k] + (cell[k] + ref.ops.q.xi[idx[k]])*spec.h(k);
   }
   map_point(spec, pre, x);
}

int Grid::elem_face(int e, int axis, int side) const
{
   int cell[2];
   elem_cell(e, cell);
   const int nx = spec.n[0];
   const int ny = spec.d > 1 ? spec.n[1] : 1;
   if (axis == 0)
   {
      int per_row = spec.periodic[0] ? nx : nx + 1;
      int ix = side == 0 ? cell[0]
               : (spec.periodic[0] ? (cell[0] + 1) % nx : cell[0] + 1);
      return cell[1]*per_row + ix;
   }
   int n0_faces = (spec.periodic[0] ? nx : nx + 1)*ny;
   int iy = side == 0 ? cell[1]
            : (spec.periodic[1] ? (cell[1] + 1) % ny : cell[1] + 1);
   return n0_faces + iy*nx + cell[0];
}

// ---------------------------------------------------------------------------
// Minimum-norm correction solver
// ---------------------------------------------------------------------------

void MinNormSolver::build(const RefOps &r)
{
   nn = r.nn;
   d = r.d;
   Eigen::MatrixXd A(nn, d*nn);
   for (int k = 0; k < d; k++)
   {
      std::vector<double> K = kron_axis_matrix(r, k, r.ops.Dhat);
      for (int i = 0; i < nn; i++)
      {
         for (int j = 0; j < nn; j++)
         {
            A(i, k*nn + j) = K[j*nn + i];   // transpose
         }
      }
   }
   Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
   const auto &sv = svd.singularValues();
   double cutoff = 1e-12*(sv.size() > 0 ? sv(0) : 0.0);
   Eigen::VectorXd inv_sv(sv.size());
   for (int i = 0; i < sv.size(); i++)
   {
      inv_sv(i) = sv(i) > cutoff ? 1.0/sv(i) : 0.0;
   }
   pinv = svd.matrixV()*inv_sv.asDiagonal()*svd.matrixU().transpose();
}

std::vector<double> MinNormSolver::solve(const std::vector<double> &rhs,
                                         double scale) const
{
   double sum = 0.0;
   for (double v : rhs) { sum += v; }
   require(std::abs(sum) <= rhs_tol*std::max(scale, 1e-30), errc::geometry,
           "metric correction: rhs not orthogonal to the constant null-space");
   Eigen::Map<const Eigen::VectorXd> b(rhs.data(), nn);
   Eigen::VectorXd x = pinv*b;
   return std::vector<double>(x.data(), x.data() + d*nn);
}

// ---------------------------------------------------------------------------
// Geometry assembly
// ---------------------------------------------------------------------------

namespace
{

void sample_coords(const Grid &g, int e, std::vector<double> &xs)
{
   xs.resize(g.ref.nn*g.spec.d);
   for (int n = 0; n < g.ref.nn; n++)
   {
      g.node_coords(e, n, &xs[n*g.spec.d]);
   }
}

void build_volume_geometry(Grid &g, int e, ElemGeom &geom)
{
   const RefOps &r = g.ref;
   const MeshSpec &spec = g.spec;
   const int d = spec.d, nn = r.nn;
   geom.detJ.assign(nn, 0.0);
   geom.mass.assign(nn, 0.0);
   geom.gjinv.assign(nn*d*d, 0.0);

   if (spec.mapping.kind == Mapping::Kind::cartesian)
   {
      double det = 1.0;
      for (int k = 0; k < d; k++) { det *= spec.h(k); }
      for (int n = 0; n < nn; n++)
      {
         geom.detJ[n] = det;
         if (d == 1) { geom.gjinv[n] = 1.0; }
         else
         {
            geom.gjinv[n*4 + 0] = spec.h(1);
            geom.gjinv[n*4 + 3] = spec.h(0);
         }
      }
   }
   else
   {
      require(r.p >= 1, errc::geometry,
              "curved mappings need degree >= 1 for the metric terms");
      std::vector<double> xs;
      sample_coords(g, e, xs);
      // dx[a][b] = d x_a / d xi_b, from the degree-p coordinate interpolant
      std::vector<double> dx(d*d*nn);
      for (int b = 0; b < d; b++)
      {
         apply_axis(r, b, r.ops.Dnodal.data(), xs.data(), &dx[b*d*nn], d);
      }
      auto dxab = [&](int n, int a, int b) { return dx[b*d*nn + n*d + a]; };
      for (int n = 0; n < nn; n++)
      {
         if (d == 1)
         {
            geom.detJ[n] = dxab(n, 0, 0);
            geom.gjinv[n] = 1.0;
         }
         else
         {
            geom.detJ[n] = dxab(n, 0, 0)*dxab(n, 1, 1) - dxab(n, 0, 1)*dxab(n, 1, 0);
            geom.gjinv[n*4 + 0] = dxab(n, 1, 1);
            geom.gjinv[n*4 + 1] = -dxab(n, 0, 1);
            geom.gjinv[n*4 + 2] = -dxab(n, 1, 0);
            geom.gjinv[n*4 + 3] = dxab(n, 0, 0);
         }
         require(geom.detJ[n] > 0.0, errc::geometry,
                 "non-positive Jacobian determinant in element " + std::to_string(e));
      }
   }
   for (int n = 0; n < nn; n++) { geom.mass[n] = r.wnode[n]*geom.detJ[n]; }
}

// Outward-signed face term sum_e B_e (w sn_j) accumulated on the volume nodes
// of element e.
void face_normal_vector(const Grid &g, int e, int j, std::vector<double> &out)
{
   const RefOps &r = g.ref;
   out.assign(r.nn, 0.0);
   for (int axis = 0; axis < g.spec.d; axis++)
   {
      for (int side = 0; side < 2; side++)
      {
         int f = g.elem_face(e, axis, side);
         double sign = side == 1 ? 1.0 : -1.0;
         bool is_left = side == 1;   // high side of e => e is the L element
         int first = is_left ? g.faces.nodeL[f] : g.faces.nodeR[f];
         for (int t = 0; t < g.faces.nfnodes; t++)
         {
            int n = first + t*g.faces.stride(axis, r);
            out[n] += sign*g.face_weight(t)*
                      g.faces.sn[(f*g.faces.nfnodes + t)*g.spec.d + j];
         }
      }
   }
}

double surface_scale(const Grid &g, int e)
{
   double s = 0.0;
   for (int axis = 0; axis < g.spec.d; axis++)
   {
      for (int side = 0; side < 2; side++)
      {
         int f = g.elem_face(e, axis, side);
         for (int t = 0; t < g.faces.nfnodes; t++)
         {
            s += g.face_weight(t)*g.faces.sn_norm[f*g.faces.nfnodes + t];
         }
      }
   }
   return s;
}

void build_stencil_coeffs(const RefOps &r, ElemGeom &geom, int d)
{
   const int p = r.p, nn = r.nn;
   const int nlines = r.nlines();
   for (int k = 0; k < d; k++)
   {
      geom.cfwd[k].assign(std::max(nlines*p, 1)*d, 0.0);
      geom.cbwd[k].assign(std::max(nlines*p, 1)*d, 0.0);
      geom.cdiag[k].assign(nn*d, 0.0);
      const LineTable &lt = r.lines[k];
      for (int l = 0; l < nlines; l++)
      {
         for (int s = 0; s < p; s++)
         {
            int i = lt.base[l] + s*lt.stride;
            int j = i + lt.stride;
            double wt = r.wtrans[k*nn + i];
            for (int b = 0; b < d; b++)
            {
               // Dhat(s+1, s) = -1/2 and Dhat(s, s+1) = +1/2 on every band
               geom.cfwd[k][(l*p + s)*d + b] = -0.5*wt*geom.gjinv_hat[(j*d + k)*d + b];
               geom.cbwd[k][(l*p + s)*d + b] = +0.5*wt*geom.gjinv_hat[(i*d + k)*d + b];
            }
         }
         for (int s : {0, p})
         {
            int i = lt.base[l] + s*lt.stride;
            double wt = r.wtrans[k*nn + i];
            double dd = (s == 0) ? -0.5 : 0.5;
            if (p == 0) { dd = 0.0; }
            for (int b = 0; b < d; b++)
            {
               geom.cdiag[k][i*d + b] = dd*wt*geom.gjinv_hat[(i*d + k)*d + b];
            }
         }
      }
   }
}

} // namespace

int FaceSet::stride(int axis, const RefOps &r) const
{
   if (r.d == 1) { return 1; }
   return axis == 0 ? r.n1() : 1;
}

void correct_metrics(Grid &g, int gi)
{
   ElemGeom &geom = g.geoms[gi];
   const RefOps &r = g.ref;
   const int d = g.spec.d, nn = r.nn;
   const int e = g.uniform ? 0 : gi;
   geom.gjinv_hat = geom.gjinv;

   std::vector<double> dhat_t(r.ops.Dhat.size());
   const int n1 = r.n1();
   for (int i = 0; i < n1; i++)
   {
      for (int j = 0; j < n1; j++) { dhat_t[i*n1 + j] = r.ops.Dhat[j*n1 + i]; }
   }

   double scale = surface_scale(g, e);
   std::vector<double> rhs(nn), col(nn), tmp(nn), facev;
   for (int j = 0; j < d; j++)
   {
      face_normal_vector(g, e, j, facev);
      rhs = facev;
      for (int k = 0; k < d; k++)
      {
         for (int n = 0; n < nn; n++) { col[n] = geom.gjinv[(n*d + k)*d + j]; }
         apply_axis(r, k, dhat_t.data(), col.data(), tmp.data(), 1);
         for (int n = 0; n < nn; n++)
         {
            rhs[n] -= r.wtrans[k*nn + n]*tmp[n];
         }
      }
      std::vector<double> delta = g.minnorm.solve(rhs, scale);
      for (int k = 0; k < d; k++)
      {
         for (int n = 0; n < nn; n++)
         {
            geom.gjinv_hat[(n*d + k)*d + j] += delta[k*nn + n];
         }
      }
   }
   double res = g.metric_residual_low(e);
   require(res <= 1e-11*std::max(1.0, scale), errc::geometry,
           "metric correction failed to restore the low-order identity");
   build_stencil_coeffs(r, geom, d);
}

double Grid::metric_residual_high(int e) const
{
   const ElemGeom &gm = geom(e);
   const int d = spec.d, nn = ref.nn;
   std::vector<double> col(nn), acc(nn), tmp(nn);
   double res = 0.0;
   for (int j = 0; j < d; j++)
   {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int k = 0; k < d; k++)
      {
         for (int n = 0; n < nn; n++) { col[n] = gm.gjinv[(n*d + k)*d + j]; }
         apply_axis(ref, k, ref.ops.Dw.data(), col.data(), tmp.data(), 1);
         for (int n = 0; n < nn; n++)
         {
            acc[n] += ref.wtrans[k*nn + n]*tmp[n];
         }
      }
      for (int n = 0; n < nn; n++) { res = std::max(res, std::abs(acc[n])); }
   }
   return res;
}

double Grid::metric_residual_low(int e) const
{
   const ElemGeom &gm = geom(e);
   const RefOps &r = ref;
   const int d = spec.d, nn = r.nn, n1 = r.n1();
   std::vector<double> dhat_t(r.ops.Dhat.size());
   for (int i = 0; i < n1; i++)
   {
      for (int j = 0; j < n1; j++) { dhat_t[i*n1 + j] = r.ops.Dhat[j*n1 + i]; }
   }
   std::vector<double> col(nn), acc(nn), tmp(nn), facev;
   double res = 0.0;
   for (int j = 0; j < d; j++)
   {
      face_normal_vector(*this, e, j, facev);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int k = 0; k < d; k++)
      {
         for (int n = 0; n < nn; n++) { col[n] = gm.gjinv_hat[(n*d + k)*d + j]; }
         apply_axis(r, k, dhat_t.data(), col.data(), tmp.data(), 1);
         for (int n = 0; n < nn; n++) { acc[n] += r.wtrans[k*nn + n]*tmp[n]; }
      }
      for (int n = 0; n < nn; n++)
      {
         res = std::max(res, std::abs(acc[n] - facev[n]));
      }
   }
   return res;
}

double Grid::max_metric_correction(int e) const
{
   const ElemGeom &gm = geom(e);
   double m = 0.0;
   for (size_t i = 0; i < gm.gjinv.size(); i++)
   {
      m = std::max(m, std::abs(gm.gjinv_hat[i] - gm.gjinv[i]));
   }
   return m;
}

// ---------------------------------------------------------------------------
// Faces
// ---------------------------------------------------------------------------

namespace
{

void build_faces(Grid &g)
{
   const MeshSpec &spec = g.spec;
   const RefOps &r = g.ref;
   const int d = spec.d, p = r.p, n1 = r.n1();
   FaceSet &fs = g.faces;
   fs.nfnodes = d == 1 ? 1 : n1;
   const int nx = spec.n[0];
   const int ny = d > 1 ? spec.n[1] : 1;

   auto eid = [&](int ex, int ey) { return ey*nx + ex; };
   auto add_face = [&](int axis, int eL, int eR)
   {
      fs.axis.push_back(axis);
      fs.eL.push_back(eL);
      fs.eR.push_back(eR);
      int firstL, firstR;
      if (d == 1) { firstL = p; firstR = 0; }
      else if (axis == 0) { firstL = p; firstR = 0; }
      else { firstL = p*n1; firstR = 0; }
      fs.nodeL.push_back(firstL);
      fs.nodeR.push_back(firstR);
   };

   // axis 0
   int nfx = spec.periodic[0] ? nx : nx + 1;
   for (int iy = 0; iy < ny; iy++)
   {
      for (int ix = 0; ix < nfx; ix++)
      {
         int eL = -1, eR = -1;
         if (spec.periodic[0])
         {
            eL = eid((ix + nx - 1) % nx, iy);
            eR = eid(ix, iy);
         }
         else
         {
            if (ix > 0) { eL = eid(ix - 1, iy); }
            if (ix < nx) { eR = eid(ix, iy); }
         }
         add_face(0, eL, eR);
      }
   }
   // axis 1
   if (d > 1)
   {
      int nfy = spec.periodic[1] ? ny : ny + 1;
      for (int iy = 0; iy < nfy; iy++)
      {
         for (int ex = 0; ex < nx; ex++)
         {
            int eL = -1, eR = -1;
            if (spec.periodic[1])
            {
               eL = eid(ex, (iy + ny - 1) % ny);
               eR = eid(ex, iy);
            }
            else
            {
               if (iy > 0) { eL = eid(ex, iy - 1); }
               if (iy < ny) { eR = eid(ex, iy); }
            }
            add_face(1, eL, eR);
         }
      }
   }

   // geometry at face nodes
   const int nf = fs.count();
   fs.sn.assign(nf*fs.nfnodes*d, 0.0);
   fs.sn_norm.assign(nf*fs.nfnodes, 0.0);
   fs.xf.assign(nf*fs.nfnodes*d, 0.0);
   const bool cart = spec.mapping.kind == Mapping::Kind::cartesian;
   std::vector<double> edge(fs.nfnodes*d), tang(fs.nfnodes*d);

   int f = 0;
   auto face_geom = [&](int axis, int line_idx, int tcell)
   {
      // grid-line coordinate along `axis`, transverse cell index `tcell`
      double gl = spec.lo[axis] + line_idx*spec.h(axis);
      for (int t = 0; t < fs.nfnodes; t++)
      {
         double pre[2] = {0.0, 0.0};
         pre[axis] = gl;
         if (d > 1)
         {
            int ta = 1 - axis;
            pre[ta] = spec.lo[ta] + (tcell + r.ops.q.xi[t])*spec.h(ta);
         }
         map_point(spec, pre, &fs.xf[(f*fs.nfnodes + t)*d]);
      }
      if (d == 1)
      {
         fs.sn[f] = 1.0;
         fs.sn_norm[f] = 1.0;
         return;
      }
      if (cart)
      {
         double len = spec.h(1 - axis);
         for (int t = 0; t < fs.nfnodes; t++)
         {
            fs.sn[(f*fs.nfnodes + t)*d + axis] = len;
            fs.sn_norm[f*fs.nfnodes + t] = len;
         }
         return;
      }
      // differentiate the edge interpolant for the tangent
      for (int t = 0; t < fs.nfnodes; t++)
      {
         for (int a = 0; a < d; a++)
         {
            edge[t*d + a] = fs.xf[(f*fs.nfnodes + t)*d + a];
         }
      }
      for (int t = 0; t < fs.nfnodes; t++)
      {
         for (int a = 0; a < d; a++)
         {
            double acc = 0.0;
            for (int s = 0; s < fs.nfnodes; s++)
            {
               acc += r.ops.dnodal(t, s)*edge[s*d + a];
            }
            tang[t*d + a] = acc;
         }
      }
      for (int t = 0; t < fs.nfnodes; t++)
      {
         double tx = tang[t*d + 0], ty = tang[t*d + 1];
         double snx, sny;
         if (axis == 0) { snx = ty; sny = -tx; }
         else { snx = -ty; sny = tx; }
         fs.sn[(f*fs.nfnodes + t)*d + 0] = snx;
         fs.sn[(f*fs.nfnodes + t)*d + 1] = sny;
         fs.sn_norm[f*fs.nfnodes + t] = std::sqrt(snx*snx + sny*sny);
      }
   };

   f = 0;
   for (int iy = 0; iy < ny; iy++)
   {
      for (int ix = 0; ix < nfx; ix++) { face_geom(0, ix, iy); f++; }
   }
   if (d > 1)
   {
      int nfy = spec.periodic[1] ? ny : ny + 1;
      for (int iy = 0; iy < nfy; iy++)
      {
         for (int ex = 0; ex < nx; ex++) { face_geom(1, iy, ex); f++; }
      }
   }
}

} // namespace

Grid build_grid(const MeshSpec &spec, int p)
{
   require(spec.d == 1 || spec.d == 2, errc::invalid_argument,
           "mesh dimension must be 1 or 2");
   for (int k = 0; k < spec.d; k++)
   {
      require(spec.n[k] >= 1, errc::invalid_argument,
              "element count must be positive");
      require(spec.hi[k] > spec.lo[k], errc::invalid_argument,
              "empty axis extent");
   }
   require(spec.mapping.kind == Mapping::Kind::cartesian || p >= 1,
           errc::geometry, "curved mappings need degree >= 1");
   Grid g;
   g.spec = spec;
   g.ref = build_ref_ops(p, spec.d);
   g.nelem = spec.nelem();
   g.uniform = spec.mapping.kind == Mapping::Kind::cartesian;
   g.minnorm.build(g.ref);
   build_faces(g);
   int ngeom = g.uniform ? 1 : g.nelem;
   g.geoms.resize(ngeom);
   for (int i = 0; i < ngeom; i++)
   {
      build_volume_geometry(g, g.uniform ? 0 : i, g.geoms[i]);
      correct_metrics(g, i);
   }
   return g;
}

void build_unsparsified(Grid &g)
{
   const RefOps &r = g.ref;
   const int d = g.spec.d, n1 = r.n1(), nn = r.nn;
   for (ElemGeom &gm : g.geoms)
   {
      if (gm.has_unsp) { continue; }
      for (int k = 0; k < d; k++)
      {
         gm.unsp[k].assign(r.nlines()*n1*n1*d, 0.0);
         const LineTable &lt = r.lines[k];
         for (int l = 0; l < r.nlines(); l++)
         {
            for (int i = 0; i < n1; i++)
            {
               int ni = lt.base[l] + i*lt.stride;
               double wt = r.wtrans[k*nn + ni];
               for (int j = 0; j < n1; j++)
               {
                  int njn = lt.base[l] + j*lt.stride;
                  for (int b = 0; b < d; b++)
                  {
                     // coefficient of F_j in the residual at i (weak form,
                     // uncorrected metric terms)
                     gm.unsp[k][(l*n1*n1 + j*n1 + i)*d + b] =
                        wt*r.ops.dw(j, i)*gm.gjinv[(njn*d + k)*d + b];
                  }
               }
            }
         }
      }
      gm.has_unsp = true;
   }
}

AdvectionCoeffs build_advection_coeffs(const Grid &g, const Advection &adv)
{
   const RefOps &r = g.ref;
   const int d = g.spec.d, nn = r.nn, n1 = r.n1();
   AdvectionCoeffs ac;
   ac.z.assign(g.nelem*nn*d, 0.0);
   ac.z_high.assign(g.nelem*nn*d, 0.0);
   ac.face_a.assign(g.faces.count()*g.faces.nfnodes, 0.0);

   for (int f = 0; f < g.faces.count(); f++)
   {
      for (int t = 0; t < g.faces.nfnodes; t++)
      {
         const double *x = &g.faces.xf[(f*g.faces.nfnodes + t)*d];
         Vec2 b = adv.beta.eval(x[0], d > 1 ? x[1] : 0.0);
         double a = 0.0;
         for (int k = 0; k < d; k++)
         {
            a += g.faces.sn[(f*g.faces.nfnodes + t)*d + k]*b[k];
         }
         ac.face_a[f*g.faces.nfnodes + t] = a;
      }
   }

   std::vector<double> dhat_t(n1*n1);
   for (int i = 0; i < n1; i++)
   {
      for (int j = 0; j < n1; j++) { dhat_t[i*n1 + j] = r.ops.Dhat[j*n1 + i]; }
   }

   std::vector<double> rhs(nn), col(nn), tmp(nn);
   double x[2];
   for (int e = 0; e < g.nelem; e++)
   {
      const ElemGeom &gm = g.geom(e);
      double *z = &ac.z[e*nn*d];
      double *zh = &ac.z_high[e*nn*d];
      for (int n = 0; n < nn; n++)
      {
         g.node_coords(e, n, x);
         Vec2 b = adv.beta.eval(x[0], d > 1 ? x[1] : 0.0);
         for (int k = 0; k < d; k++)
         {
            double acc = 0.0, acc_h = 0.0;
            for (int bb = 0; bb < d; bb++)
            {
               acc += gm.gjinv_hat[(n*d + k)*d + bb]*b[bb];
               acc_h += gm.gjinv[(n*d + k)*d + bb]*b[bb];
            }
            z[n*d + k] = acc;
            zh[n*d + k] = acc_h;
         }
      }
      // enforce zero row sums: volume part must match the face part
      std::fill(rhs.begin(), rhs.end(), 0.0);
      for (int axis = 0; axis < d; axis++)
      {
         for (int side = 0; side < 2; side++)
         {
            int f = g.elem_face(e, axis, side);
            double sign = side == 1 ? 1.0 : -1.0;
            int first = side == 1 ? g.faces.nodeL[f] : g.faces.nodeR[f];
            for (int t = 0; t < g.faces.nfnodes; t++)
            {
               int n = first + t*g.faces.stride(axis, r);
               rhs[n] += sign*g.face_weight(t)*ac.face_a[f*g.faces.nfnodes + t];
            }
         }
      }
      double scale = 0.0;
      for (double v : rhs) { scale += std::abs(v); }
      for (int k = 0; k < d; k++)
      {
         for (int n = 0; n < nn; n++) { col[n] = z[n*d + k]; }
         apply_axis(r, k, dhat_t.data(), col.data(), tmp.data(), 1);
         for (int n = 0; n < nn; n++)
         {
            rhs[n] -= r.wtrans[k*nn + n]*tmp[n];
         }
      }
      std::vector<double> delta = g.minnorm.solve(rhs, std::max(scale, 1.0));
      for (int k = 0; k < d; k++)
      {
         for (int n = 0; n < nn; n++) { z[n*d + k] += delta[k*nn + n]; }
      }
   }
   return ac;
}

std::vector<double> stencil_row_sums(const Grid &g, int e)
{
   const RefOps &r = g.ref;
   const int d = g.spec.d, nn = r.nn, p = r.p;
   const ElemGeom &gm = g.geom(e);
   std::vector<double> sums(nn*d, 0.0);
   for (int k = 0; k < d; k++)
   {
      const LineTable &lt = r.lines[k];
      for (int l = 0; l < r.nlines(); l++)
      {
         for (int s = 0; s < p; s++)
         {
            int i = lt.base[l] + s*lt.stride;
            int j = i + lt.stride;
            for (int b = 0; b < d; b++)
            {
               sums[i*d + b] += gm.cfwd[k][(l*p + s)*d + b];
               sums[j*d + b] += gm.cbwd[k][(l*p + s)*d + b];
            }
         }
      }
      for (int n = 0; n < nn; n++)
      {
         for (int b = 0; b < d; b++) { sums[n*d + b] += gm.cdiag[k][n*d + b]; }
      }
   }
   // face contributions: own trace and cross pair both carry -1/2 w sn
   for (int axis = 0; axis < d; axis++)
   {
      for (int side = 0; side < 2; side++)
      {
         int f = g.elem_face(e, axis, side);
         double sign = side == 1 ? 1.0 : -1.0;
         int first = side == 1 ? g.faces.nodeL[f] : g.faces.nodeR[f];
         for (int t = 0; t < g.faces.nfnodes; t++)
         {
            int n = first + t*g.faces.stride(axis, r);
            for (int b = 0; b < d; b++)
            {
               sums[n*d + b] -= sign*g.face_weight(t)*
                                g.faces.sn[(f*g.faces.nfnodes + t)*d + b];
            }
         }
      }
   }
   return sums;
}

std::vector<double> stencil_row_sums(const Grid &g, int e,
                                     const Advection &,
                                     const AdvectionCoeffs &ac)
{
   const RefOps &r = g.ref;
   const int d = g.spec.d, nn = r.nn, p = r.p;
   const double *z = &ac.z[e*nn*d];
   std::vector<double> sums(nn, 0.0);
   for (int k = 0; k < d; k++)
   {
      const LineTable &lt = r.lines[k];
      for (int l = 0; l < r.nlines(); l++)
      {
         for (int s = 0; s < p; s++)
         {
            int i = lt.base[l] + s*lt.stride;
            int j = i + lt.stride;
            double wt = r.wtrans[k*nn + i];
            sums[i] += -0.5*wt*z[j*d + k];
            sums[j] += +0.5*wt*z[i*d + k];
         }
         for (int s : {0, p})
         {
            if (p == 0) { break; }
            int i = lt.base[l] + s*lt.stride;
            double wt = r.wtrans[k*nn + i];
            sums[i] += (s == 0 ? -0.5 : 0.5)*wt*z[i*d + k];
         }
      }
   }
   for (int axis = 0; axis < d; axis++)
   {
      for (int side = 0; side < 2; side++)
      {
         int f = g.elem_face(e, axis, side);
         double sign = side == 1 ? 1.0 : -1.0;
         int first = side == 1 ? g.faces.nodeL[f] : g.faces.nodeR[f];
         for (int t = 0; t < g.faces.nfnodes; t++)
         {
            int n = first + t*g.faces.stride(axis, r);
            sums[n] -= sign*g.face_weight(t)*ac.face_a[f*g.faces.nfnodes + t];
         }
      }
   }
   return sums;
}

} // namespace dgfct
