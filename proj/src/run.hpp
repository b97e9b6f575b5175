#ifndef DGFCT_RUN_HPP
#define DGFCT_RUN_HPP

#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "problems.hpp"
#include "time_integration.hpp"

namespace dgfct
{

struct RunReport
{
   std::string problem;
   int dimension = 1;
   int degree = 0;
   int elements[2] = {0, 0};
   int ncomp = 1;
   long dof = 0;
   long steps = 0;
   double end_time = 0.0;
   double cfl = 0.0;

   bool has_norms = false;
   std::array<double, max_comp> l1{}, l2{}, linf{};
   std::array<double, max_comp> umin{}, umax{};
   double mass_drift_per_step = 0.0;
   double wall_time = 0.0;
   long invariant_violations = 0;
};

// Builds solver and initial state from a configuration (shared by the run
// and convergence drivers and by tests).
struct RunInstance
{
   ProblemSetup setup;
   std::unique_ptr<Solver> solver;
   std::vector<double> state;
   double end_time = 0.0;
   double cfl = 0.5;
   double dt_fixed = 0.0;
   IntegratorKind integrator = IntegratorKind::ssprk3;
   long steps_max = 0;
   bool monitor = true;
};

RunInstance make_instance(const Config &cfg);

// Runs to the end time, computes norms against the exact solution or a
// cached degree-0 reference, writes outputs when output_dir is set.
RunReport run_from_config(const Config &cfg);

struct ConvergenceRow
{
   int elements = 0;
   double l1 = 0.0;
   double rate = 0.0;
};

// Doubles the element count per level starting from the configured value and
// reports L1 errors and rates; `slope` is the least-squares fit.
std::vector<ConvergenceRow> convergence_from_config(const Config &cfg,
                                                    int levels, double &slope);

// Quadrature error norms of `u` against a nodal evaluation of `ref`.
void error_norms(const Solver &s, const std::vector<double> &u,
                 const std::function<StateVec(const double *, double)> &ref,
                 double t, double *l1, double *l2, double *linf);

std::string format_report(const RunReport &r);

} // namespace dgfct

#endif
