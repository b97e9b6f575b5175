#ifndef DGFCT_TIME_INTEGRATION_HPP
#define DGFCT_TIME_INTEGRATION_HPP

#include <string>
#include <vector>

#include "solver.hpp"

namespace dgfct
{

enum class IntegratorKind { forward_euler, ssprk3, dopri5 };

IntegratorKind integrator_from_name(const std::string &name);

// Generic explicit steps over an ODE right-hand side f(t, y, dy). The Shu and
// Osher form keeps every stage a convex combination of forward Euler steps.
template <class RHS>
void ssprk3_step(RHS &&f, double t, double dt, std::vector<double> &y,
                 std::vector<double> &k, std::vector<double> &y1)
{
   const std::size_t n = y.size();
   k.resize(n);
   y1.resize(n);
   f(t, y, k);
   for (std::size_t i = 0; i < n; i++) { y1[i] = y[i] + dt*k[i]; }
   f(t + dt, y1, k);
   for (std::size_t i = 0; i < n; i++)
   {
      y1[i] = 0.75*y[i] + 0.25*(y1[i] + dt*k[i]);
   }
   f(t + 0.5*dt, y1, k);
   for (std::size_t i = 0; i < n; i++)
   {
      y[i] = y[i]/3.0 + 2.0/3.0*(y1[i] + dt*k[i]);
   }
}

// Dormand-Prince 5(4), fifth-order solution weights.
template <class RHS>
void dopri5_step(RHS &&f, double t, double dt, std::vector<double> &y,
                 std::vector<std::vector<double>> &ks,
                 std::vector<double> &ytmp)
{
   static const double c[7] = {0.0, 1.0/5, 3.0/10, 4.0/5, 8.0/9, 1.0, 1.0};
   static const double a[7][6] =
   {
      {},
      {1.0/5},
      {3.0/40, 9.0/40},
      {44.0/45, -56.0/15, 32.0/9},
      {19372.0/6561, -25360.0/2187, 64448.0/6561, -212.0/729},
      {9017.0/3168, -355.0/33, 46732.0/5247, 49.0/176, -5103.0/18656},
      {35.0/384, 0.0, 500.0/1113, 125.0/192, -2187.0/6784, 11.0/84},
   };
   static const double b[7] = {35.0/384, 0.0, 500.0/1113, 125.0/192,
                               -2187.0/6784, 11.0/84, 0.0};
   const std::size_t n = y.size();
   ks.resize(7);
   ytmp.resize(n);
   for (int s = 0; s < 7; s++)
   {
      ks[s].resize(n);
      for (std::size_t i = 0; i < n; i++)
      {
         double acc = y[i];
         for (int j = 0; j < s; j++)
         {
            if (a[s][j] != 0.0) { acc += dt*a[s][j]*ks[j][i]; }
         }
         ytmp[i] = acc;
      }
      f(t + c[s]*dt, ytmp, ks[s]);
   }
   for (std::size_t i = 0; i < n; i++)
   {
      double acc = y[i];
      for (int s = 0; s < 7; s++)
      {
         if (b[s] != 0.0) { acc += dt*b[s]*ks[s][i]; }
      }
      y[i] = acc;
   }
}

// Advances the solver state by one step of size dt. Every stage applies the
// full pipeline; for Runge-Kutta evaluations the pipeline result is converted
// to a rate with the step size also supplying the limiter ratios.
class TimeStepper
{
public:
   TimeStepper(Solver &s, IntegratorKind kind) : solver_(s), kind_(kind) { }

   void step(std::vector<double> &u, double dt, double t);
   // dt = cfl * (IDP bound), clipped to land on t_end.
   double compute_dt(const std::vector<double> &u, double t, double cfl,
                     double t_end, double dt_fixed = 0.0);

private:
   Solver &solver_;
   IntegratorKind kind_;
   std::vector<double> tmp_, tmp2_;
   std::vector<std::vector<double>> ks_;
};

} // namespace dgfct

#endif
