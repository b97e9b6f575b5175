#include "time_integration.hpp"

#include <algorithm>

namespace dgfct
{

IntegratorKind integrator_from_name(const std::string &name)
{
   if (name == "euler" || name == "forward_euler")
   {
      return IntegratorKind::forward_euler;
   }
   if (name == "ssprk3") { return IntegratorKind::ssprk3; }
   if (name == "dopri5") { return IntegratorKind::dopri5; }
   fail(errc::parse, "unknown integrator '" + name + "'");
}

double TimeStepper::compute_dt(const std::vector<double> &u, double t,
                               double cfl, double t_end, double dt_fixed)
{
   require(cfl > 0.0 && cfl <= 1.0, errc::invalid_argument,
           "cfl must be in (0,1]");
   double dt;
   if (dt_fixed > 0.0) { dt = dt_fixed; }
   else
   {
      double bound = solver_.max_dt(u, t);
      require(std::isfinite(bound), errc::invalid_argument,
              "static problem: supply an explicit dt");
      dt = cfl*bound;
   }
   if (t + dt > t_end) { dt = t_end - t; }
   return dt;
}

void TimeStepper::step(std::vector<double> &u, double dt, double t)
{
   switch (kind_)
   {
      case IntegratorKind::forward_euler:
      {
         tmp_.resize(u.size());
         solver_.fe_step(u, dt, t, tmp_);
         u.swap(tmp_);
         break;
      }
      case IntegratorKind::ssprk3:
      {
         // convex combinations of forward Euler applications, written out so
         // every stage is exactly a pipeline result
         tmp_.resize(u.size());
         tmp2_.resize(u.size());
         solver_.fe_step(u, dt, t, tmp_);
         solver_.fe_step(tmp_, dt, t + dt, tmp2_);
         for (std::size_t i = 0; i < u.size(); i++)
         {
            tmp2_[i] = 0.75*u[i] + 0.25*tmp2_[i];
         }
         solver_.fe_step(tmp2_, dt, t + 0.5*dt, tmp_);
         for (std::size_t i = 0; i < u.size(); i++)
         {
            u[i] = u[i]/3.0 + 2.0/3.0*tmp_[i];
         }
         break;
      }
      case IntegratorKind::dopri5:
      {
         auto rhs = [&](double ts, const std::vector<double> &y,
                        std::vector<double> &dy)
         {
            tmp2_.resize(y.size());
            solver_.fe_step(y, dt, ts, tmp2_);
            for (std::size_t i = 0; i < y.size(); i++)
            {
               dy[i] = (tmp2_[i] - y[i])/dt;
            }
         };
         dopri5_step(rhs, t, dt, u, ks_, tmp_);
         break;
      }
   }
}

} // namespace dgfct
