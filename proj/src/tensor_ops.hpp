#ifndef DGFCT_TENSOR_OPS_HPP
#define DGFCT_TENSOR_OPS_HPP

#include <vector>

#include "common.hpp"

namespace dgfct
{

// 1D Gauss-Lobatto rule on [0,1]. Nodes increasing, weights sum to one.
// p = 0 degenerates to the midpoint rule.
struct Quadrature1D
{
   int p = 0;
   std::vector<double> xi;
   std::vector<double> w;

   int n() const { return p + 1; }
};

Quadrature1D gauss_lobatto(int p);

// Collocated 1D operators on the Gauss-Lobatto nodes.
//   Dnodal(i,j) = l_j'(xi_i)            (nodal differentiation)
//   Dw(i,j)     = w_i l_j'(xi_i)        (weighted, row sums 0, column sums -1/0/1)
//   Dhat        = sparse first-order analogue with the same row/column sums,
//                 entries +-1/2 coupling consecutive nodes only.
struct Operators1D
{
   Quadrature1D q;
   std::vector<double> Dnodal;
   std::vector<double> Dw;
   std::vector<double> Dhat;

   int n() const { return q.n(); }
   double dnodal(int i, int j) const { return Dnodal[i*n() + j]; }
   double dw(int i, int j) const { return Dw[i*n() + j]; }
   double dhat(int i, int j) const { return Dhat[i*n() + j]; }
};

Operators1D build_operators_1d(const Quadrature1D &q);

// Nodal <-> modal (Legendre) change of basis in 1D; applied axis-by-axis on
// tensor grids. V(i,k) = normalized Legendre_k at node i.
struct ModalTransform
{
   int p = 0;
   std::vector<double> V;
   std::vector<double> Vinv;

   int n() const { return p + 1; }
};

ModalTransform build_modal_transform(const Quadrature1D &q);

// Lines of nodes along one axis of the (p+1)^d tensor grid.
struct LineTable
{
   int stride = 1;                 // step between consecutive nodes of a line
   std::vector<int> base;          // first node of each line
};

// Reference-element operator bundle for dimension d in {1,2}. All tensor
// operators are applied as compositions of the 1D factors along each axis;
// nothing larger than (p+1)^2 is ever stored.
struct RefOps
{
   int d = 1;
   int p = 0;
   Operators1D ops;
   ModalTransform modal;

   int nn = 0;                     // nodes per element, (p+1)^d
   std::vector<double> wnode;      // reference mass diagonal, product of 1D weights
   std::vector<double> wtrans;     // [axis*nn + node]: wnode / w_{i_axis}
   std::vector<int> node_axis_idx; // [axis*nn + node]: 1D index of node along axis
   LineTable lines[2];             // per axis

   int n1() const { return p + 1; }
   int nlines() const { return nn / n1(); }
};

RefOps build_ref_ops(int p, int d);

// Explicit Kronecker assembly of an operator with factor `op` in slot `axis`
// and the mass diagonal in the others (test and oracle use).
std::vector<double> kron_axis_matrix(const RefOps &r, int axis,
                                     const std::vector<double> &op1d);

// Apply a dense 1D matrix along one axis of a tensor field with `ncomp`
// interleaved components: out(i) (+)= sum_j op(i_axis, j) field(..j..).
void apply_axis(const RefOps &r, int axis, const double *op1d,
                const double *field, double *out, int ncomp,
                bool accumulate = false);

// Smoothness indicator s_K = log10(|u - u_trunc|^2 / |u|^2) with the
// truncation zeroing every modal coefficient whose 1D degree reaches p along
// any axis. Norms use the collocated quadrature. Returns -infinity for
// (numerically) zero fields.
double modal_truncation_error(const RefOps &r, const double *u_elem,
                              double *scratch_a, double *scratch_b);

} // namespace dgfct

#endif
