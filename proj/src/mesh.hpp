#ifndef DGFCT_MESH_HPP
#define DGFCT_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "equations.hpp"
#include "tensor_ops.hpp"

namespace dgfct
{

// Smooth global deformations of the Cartesian grid. Elements are images of
// grid cells, so meshes stay conforming for any amplitude that keeps the map
// bijective.
struct Mapping
{
   enum class Kind { cartesian, sinusoidal };
   Kind kind = Kind::cartesian;
   double amplitude = 0.0;
};

struct MeshSpec
{
   int d = 1;
   int n[2] = {1, 1};
   double lo[2] = {0.0, 0.0};
   double hi[2] = {1.0, 1.0};
   bool periodic[2] = {false, false};
   Mapping mapping;

   int nelem() const { return d == 1 ? n[0] : n[0]*n[1]; }
   double h(int k) const { return (hi[k] - lo[k])/n[k]; }
};

// Per-element geometric data sampled at the volume nodes. Shared across all
// elements of a uniform Cartesian mesh.
struct ElemGeom
{
   std::vector<double> detJ;        // nn
   std::vector<double> mass;        // nn, w_node * detJ
   std::vector<double> gjinv;       // nn*d*d, det(J) J^{-1}, [n*d*d + a*d + b]
   std::vector<double> gjinv_hat;   // corrected metric terms (same layout)

   // Sparsified volume stencil read off the corrected metric terms; pairs
   // couple consecutive nodes along each axis.
   //   cfwd[k]: coefficient of F_j in the residual of i        (j = i+1)
   //   cbwd[k]: coefficient of F_i in the residual of j
   //   cdiag[k]: axis-k diagonal coefficient (nonzero on end planes only)
   // Pair storage: [line*p + s]*d + b;  diag: [n*d + b].
   std::vector<double> cfwd[2], cbwd[2], cdiag[2];

   // Dense per-line volume coefficients for the unsparsified variant,
   // [k][line][(j1d*(p+1) + i1d)*d + b] = coefficient of F at (line,j) in the
   // residual at (line,i). Built on demand.
   std::vector<double> unsp[2];
   bool has_unsp = false;
};

// Mesh faces, including physical-boundary faces (eL or eR is -1 there).
// sn points from the L side to the R side and carries the surface element;
// the face quadrature weights live in RefOps (1D weights of the transverse
// axis; a single weight 1 in 1D).
struct FaceSet
{
   int nfnodes = 1;              // nodes per face
   std::vector<int> axis;
   std::vector<int> eL, eR;
   std::vector<int> nodeL, nodeR;   // first volume node id on each side
   std::vector<double> sn;          // [face*nfnodes*d]
   std::vector<double> sn_norm;     // [face*nfnodes]
   std::vector<double> xf;          // [face*nfnodes*d] face node coordinates

   int count() const { return int(axis.size()); }
   // volume-node stride between consecutive face nodes
   int stride(int axis_, const RefOps &r) const;
};

// Minimum-norm solver for the underdetermined reference-element systems
// [Dhat_1^T ... Dhat_d^T] x = rhs; factorized once and reused per element.
struct MinNormSolver
{
   int nn = 0, d = 1;
   Eigen::MatrixXd pinv;            // (d*nn) x nn
   double rhs_tol = 1e-10;

   void build(const RefOps &r);
   // rhs has nn entries; returns d*nn stacked corrections. Throws when the
   // rhs is not orthogonal to the constant null-space.
   std::vector<double> solve(const std::vector<double> &rhs,
                             double scale) const;
};

struct Grid
{
   MeshSpec spec;
   RefOps ref;
   int nelem = 0;
   std::vector<ElemGeom> geoms;     // one entry if uniform
   bool uniform = true;
   FaceSet faces;
   MinNormSolver minnorm;

   const ElemGeom &geom(int e) const { return geoms[uniform ? 0 : e]; }
   ElemGeom &geom_mutable(int e) { return geoms[uniform ? 0 : e]; }

   int ncomp_nodes() const { return nelem*ref.nn; }
   void elem_cell(int e, int *cell) const
   {
      cell[0] = e % spec.n[0];
      cell[1] = spec.d > 1 ? e/spec.n[0] : 0;
   }
   // face id of (element, axis, side 0=low/1=high); -1 never occurs
   int elem_face(int e, int axis, int side) const;
   // physical coordinates of a volume node
   void node_coords(int e, int n, double *x) const;
   double face_weight(int t) const
   {
      return spec.d == 1 ? 1.0 : ref.ops.q.w[t];
   }

   // Diagnostics: residuals of the discrete metric identities, scaled by the
   // element surface measure.
   double metric_residual_high(int e) const;
   double metric_residual_low(int e) const;
   double max_metric_correction(int e) const;
};

// Maps a point of the undeformed grid through the global deformation.
void map_point(const MeshSpec &spec, const double *xin, double *xout);

Grid build_grid(const MeshSpec &spec, int p);

// Rebuilds gjinv_hat of one geometry entry from scratch (tests use this to
// probe the before/after identity residuals).
void correct_metrics(Grid &grid, int geom_index);

// Unsparsified volume coefficients for the comparison runs.
void build_unsparsified(Grid &grid);

// Corrected contravariant velocity samples for linear advection; makes the
// discrete divergence of beta vanish in the sparsified weak operator so that
// constant states are stationary and bar states stay in the local hull.
struct AdvectionCoeffs
{
   std::vector<double> z;        // corrected, low-order  [e*nn*d + n*d + k]
   std::vector<double> z_high;   // uncorrected metric terms, same layout
   std::vector<double> face_a;   // [face*nfnodes]: sn . beta at the face node
};

AdvectionCoeffs build_advection_coeffs(const Grid &grid, const Advection &adv);

// Row sums sum_j chat_ij (generic) and sum_j chat_ij . beta_j (advection) for
// one element; used by setup validation and tests.
std::vector<double> stencil_row_sums(const Grid &grid, int e);
std::vector<double> stencil_row_sums(const Grid &grid, int e,
                                     const Advection &adv,
                                     const AdvectionCoeffs &coeffs);

} // namespace dgfct

#endif
