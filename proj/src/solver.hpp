#ifndef DGFCT_SOLVER_HPP
#define DGFCT_SOLVER_HPP

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "limiting.hpp"
#include "mesh.hpp"

namespace dgfct
{

enum class LimiterStrategy { none, low_only, elementwise, subcell };
enum class BoundsSource { bar_states, previous, low_order };

// Ghost-state closure for one physical boundary side. Periodic axes never
// consult these.
struct BoundaryClosure
{
   enum class Kind { dirichlet, reflect, outflow, custom };
   Kind kind = Kind::outflow;
   std::function<StateVec(const double *x, double t)> state;
   // custom closures see the interior trace and the scaled outward normal
   std::function<StateVec(const double *x, double t, const StateVec &inside,
                          const double *sn_out, double sn_norm)> custom;
};

// Interior state with the normal momentum mirrored (slip-wall ghost).
StateVec mirror_state(const StateVec &inside, const double *sn, double sn_norm,
                      int dim);

struct LimiterOptions
{
   LimiterStrategy strategy = LimiterStrategy::subcell;
   bool smoothness = false;
   double s0 = 0.0;                 // filled from smoothness_s0(p) when NaN
   double kappa = 1.0;
   BoundsSource bounds_source = BoundsSource::bar_states;
   bool euler_entropy = true;
   double global_lo = nan_value;    // relaxed-bound targets; NaN = take the
   double global_hi = nan_value;    // extremes of the initial data
   bool unsparsified = false;       // low-order comparison variant
};

// Pair-level data exposed for tests: graph viscosity, bar states, stencil
// coefficients.
struct PairInfo
{
   int elem = -1;                // -1 for cross-face pairs
   int face = -1;
   int i = 0, j = 0;             // global node ids
   int axis = 0;
   double dhat = 0.0;
   StateVec ubar_ij{}, ubar_ji{};
   double cij[2] = {0, 0}, cji[2] = {0, 0};
};

class Solver
{
public:
   Solver(const MeshSpec &spec, int degree, Model model, LimiterOptions lim,
          std::array<BoundaryClosure, 4> bcs = {});

   const Grid &grid() const { return grid_; }
   const Model &model() const { return model_; }
   LimiterOptions &options() { return lim_; }
   const LimiterOptions &options() const { return lim_; }

   int ncomp() const { return nc_; }
   int nnodes() const { return grid_.nelem*grid_.ref.nn; }
   std::size_t ndof() const { return std::size_t(nnodes())*nc_; }
   void node_coords(int e, int n, double *x) const { grid_.node_coords(e, n, x); }

   // Largest forward-Euler step for which the low-order update is a convex
   // combination of bar states: min_i m_i / (2 dhat_ii). +infinity when all
   // couplings vanish.
   double max_dt(const std::vector<double> &u, double t);

   // One forward-Euler application of the configured pipeline (low order,
   // high order, blend, limit). `out` must not alias `u`. Checks the IDP
   // step bound and aborts on violation.
   void fe_step(const std::vector<double> &u, double dt, double t,
                std::vector<double> &out);

   // Low-order IDP update only, with the same step-bound check.
   void forward_euler_low(const std::vector<double> &u, double dt, double t,
                          std::vector<double> &out);

   // Residuals in units of m_i du_i/dt (diagnostics and tests).
   void residual_high(const std::vector<double> &u, double t,
                      std::vector<double> &r);
   void residual_low(const std::vector<double> &u, double t,
                     std::vector<double> &r);

   // Per-node directional antidiffusive residuals r_{i,k} = rH_{i,k}-rL_{i,k}
   // laid out [k*ndof + node*nc + c] (tests of the zero-sum properties).
   void antidiffusive_split(const std::vector<double> &u, double t,
                            std::vector<double> &r);

   std::vector<PairInfo> collect_pairs(const std::vector<double> &u, double t);

   // Hull of {u_i} and the incident bar states per node (scalar models).
   void scalar_hull(const std::vector<double> &u, double t,
                    std::vector<double> &lo, std::vector<double> &hi);

   // Interpolates the initial condition and records the global bound /
   // entropy-floor metadata used for relaxation and monitoring.
   void set_initial(const std::function<StateVec(const double *)> &ic,
                    std::vector<double> &u);
   double global_lo() const { return lim_.global_lo; }
   double global_hi() const { return lim_.global_hi; }
   double sigma_floor() const { return sigma_floor_; }

private:
   Grid grid_;
   Model model_;
   LimiterOptions lim_;
   std::array<BoundaryClosure, 4> bcs_;
   int nc_ = 1;
   double sigma_floor_ = -infinity;   // min entropy surrogate of the data

   std::unique_ptr<AdvectionCoeffs> adv_;
   // advection graph viscosity is state-independent; cache the step bound
   double cached_dt_ = -1.0;

   // face-phase storage
   std::vector<double> f_hat, f_dhat, f_ubar, f_uL, f_uR, f_sigL, f_sigR;
   // Euler per-node caches (pressure, sound speed, p^-(g-1)/2g, sigma)
   std::vector<double> n_p, n_c, n_pm, n_sig;
   // low-order field for the alternative bounds source
   std::vector<double> ulow_;
   PairInfo *collect_slots_ = nullptr;

   template <class M> void phase_faces(const M &m, const std::vector<double> &u,
                                       double t);
   template <class M> double phase_elements(const M &m,
                                            const std::vector<double> &u,
                                            double dt, double t, int mode,
                                            std::vector<double> *out);
   double run_phases(const std::vector<double> &u, double dt, double t,
                     int mode, std::vector<double> *out);
};

} // namespace dgfct

#endif
