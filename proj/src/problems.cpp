#include "problems.hpp"

#include <cmath>

namespace dgfct
{

namespace
{

StateVec scalar_state(double v)
{
   StateVec s{};
   s[0] = v;
   return s;
}

BoundaryClosure dirichlet(std::function<StateVec(const double *, double)> f)
{
   BoundaryClosure bc;
   bc.kind = BoundaryClosure::Kind::dirichlet;
   bc.state = std::move(f);
   return bc;
}

// --- solid body rotation initial data -------------------------------------

double solid_body_value(double x, double y)
{
   const double r0 = 0.15;
   auto rad = [&](double x0, double y0)
   {
      return std::sqrt(sqr(x - x0) + sqr(y - y0))/r0;
   };
   double r = rad(0.25, 0.5);          // smooth bump
   if (r <= 1.0) { return 0.25*(1.0 + std::cos(M_PI*r)); }
   r = rad(0.5, 0.25);                 // cone
   if (r <= 1.0) { return 1.0 - r; }
   r = rad(0.5, 0.75);                 // slotted cylinder
   if (r <= 1.0)
   {
      if (std::abs(x - 0.5) >= 0.025 || y >= 0.85) { return 1.0; }
      return 0.0;
   }
   return 0.0;
}

// --- two square waves -------------------------------------------------------

double squares_value(double x)
{
   if ((x >= -0.6 && x < -0.2) || (x >= 0.2 && x < 0.6)) { return 1.0; }
   return 0.0;
}

double wrap_periodic(double x, double lo, double hi)
{
   const double L = hi - lo;
   double f = std::fmod(x - lo, L);
   if (f < 0.0) { f += L; }
   return lo + f;
}

// --- 2D Burgers quadrant data and its boundary traces ----------------------

double burgers2d_value(double x, double y)
{
   if (x > 0.5) { return y > 0.5 ? -1.0 : 0.8; }
   return y > 0.5 ? -0.2 : 0.5;
}

// Along each edge the solution stays one-dimensional until the interior
// waves arrive (speeds are at most 1, so this holds through t = 0.5).
double burgers2d_edge(int axis, int side, double x, double y, double t)
{
   if (axis == 1 && side == 0)        // bottom: rarefaction 0.5 -> 0.8
   {
      if (t <= 0.0) { return burgers2d_value(x, 0.0); }
      double xi = (x - 0.5)/t;
      return std::min(0.8, std::max(0.5, xi));
   }
   if (axis == 1 && side == 1)        // top: shock -0.2 | -1, speed -0.6
   {
      return x < 0.5 - 0.6*t ? -0.2 : -1.0;
   }
   if (axis == 0 && side == 0)        // left: shock 0.5 | -0.2, speed 0.15
   {
      return y < 0.5 + 0.15*t ? 0.5 : -0.2;
   }
   return y < 0.5 - 0.1*t ? 0.8 : -1.0;   // right: shock 0.8 | -1, speed -0.1
}

// --- 2D Euler Riemann configuration 12 -------------------------------------

StateVec riemann12_state(const Euler &m, double x, double y)
{
   // mirror-extend the unit-square data onto [0,2]^2 so the problem is
   // periodic; velocity components flip across each mirror plane
   double sx = 1.0, sy = 1.0;
   if (x > 1.0) { x = 2.0 - x; sx = -1.0; }
   if (y > 1.0) { y = 2.0 - y; sy = -1.0; }
   const double q = 3.0/std::sqrt(17.0);
   double rho, vx, vy, p;
   if (x <= 0.5 && y <= 0.5) { rho = 0.8;       vx = 0.0; vy = 0.0; p = 1.0; }
   else if (x <= 0.5)        { rho = 1.0;       vx = q;   vy = 0.0; p = 1.0; }
   else if (y <= 0.5)        { rho = 1.0;       vx = 0.0; vy = q;   p = 1.0; }
   else                      { rho = 17.0/32.0; vx = 0.0; vy = 0.0; p = 0.4; }
   return euler_state(m, rho, {sx*vx, sy*vy}, p);
}

// --- double Mach reflection -------------------------------------------------

struct DmrStates
{
   StateVec pre, post;
};

DmrStates dmr_states(const Euler &m)
{
   DmrStates s;
   s.pre = euler_state(m, 1.4, {0.0, 0.0}, 1.0);
   // Mach 10 incident shock at 60 degrees to the wall
   const double v = 8.25;
   s.post = euler_state(m, 8.0, {v*std::sqrt(3.0)/2.0, -v*0.5}, 116.5);
   return s;
}

double dmr_shock_x(double y, double t)
{
   return 1.0/6.0 + (y + 20.0*t)/std::sqrt(3.0);
}

} // namespace

std::vector<std::string> list_problems()
{
   return {"advect_sine_1d", "advect_sine_sym", "advect_squares_1d",
           "solid_body", "burgers2d", "buckley_leverett", "sod",
           "shu_osher", "riemann2d_12", "dmr"};
}

ProblemSetup make_problem(const std::string &name, const ProblemParams &pp)
{
   ProblemSetup ps;
   ps.name = name;

   if (name == "advect_sine_1d")
   {
      ps.description = "1D advection of sin(2 pi x) on [0,1], periodic";
      Advection adv;
      adv.dim = 1;
      adv.beta.kind = VelocityField::Kind::constant;
      adv.beta.value = {1.0, 0.0};
      ps.model = adv;
      ps.mesh.d = 1;
      ps.mesh.n[0] = 64;
      ps.mesh.lo[0] = 0.0;
      ps.mesh.hi[0] = 1.0;
      ps.mesh.periodic[0] = true;
      ps.end_time = 1.0;
      ps.initial = [](const double *x) { return scalar_state(std::sin(2.0*M_PI*x[0])); };
      ps.exact = [](const double *x, double t)
      {
         return scalar_state(std::sin(2.0*M_PI*(x[0] - t)));
      };
      ps.smoothness_default = true;
      return ps;
   }
   if (name == "advect_sine_sym")
   {
      ps.description = "1D advection of sin(pi x) on [-1,1], periodic";
      Advection adv;
      adv.dim = 1;
      adv.beta.value = {1.0, 0.0};
      ps.model = adv;
      ps.mesh.d = 1;
      ps.mesh.n[0] = 32;
      ps.mesh.lo[0] = -1.0;
      ps.mesh.hi[0] = 1.0;
      ps.mesh.periodic[0] = true;
      ps.end_time = 2.0;
      ps.initial = [](const double *x) { return scalar_state(std::sin(M_PI*x[0])); };
      ps.exact = [](const double *x, double t)
      {
         return scalar_state(std::sin(M_PI*(x[0] - t)));
      };
      ps.smoothness_default = true;
      return ps;
   }
   if (name == "advect_squares_1d")
   {
      ps.description = "1D advection of two square waves on [-1,1], periodic";
      Advection adv;
      adv.dim = 1;
      adv.beta.value = {1.0, 0.0};
      ps.model = adv;
      ps.mesh.d = 1;
      ps.mesh.n[0] = 80;
      ps.mesh.lo[0] = -1.0;
      ps.mesh.hi[0] = 1.0;
      ps.mesh.periodic[0] = true;
      ps.end_time = 2.0;
      ps.initial = [](const double *x) { return scalar_state(squares_value(x[0])); };
      ps.exact = [](const double *x, double t)
      {
         return scalar_state(squares_value(wrap_periodic(x[0] - t, -1.0, 1.0)));
      };
      ps.smoothness_default = false;
      return ps;
   }
   if (name == "solid_body")
   {
      ps.description = "solid body rotation of bump, cone and slotted cylinder";
      Advection adv;
      adv.dim = 2;
      adv.beta.kind = VelocityField::Kind::rotation;
      adv.beta.center = {0.5, 0.5};
      ps.model = adv;
      ps.mesh.d = 2;
      ps.mesh.n[0] = ps.mesh.n[1] = 64;
      ps.mesh.lo[0] = ps.mesh.lo[1] = 0.0;
      ps.mesh.hi[0] = ps.mesh.hi[1] = 1.0;
      ps.mesh.periodic[0] = ps.mesh.periodic[1] = true;
      ps.end_time = 1.0;
      ps.initial = [](const double *x)
      {
         return scalar_state(solid_body_value(x[0], x[1]));
      };
      ps.exact = [](const double *x, double t)
      {
         const double th = -2.0*M_PI*t;
         const double dx = x[0] - 0.5, dy = x[1] - 0.5;
         const double xr = 0.5 + std::cos(th)*dx - std::sin(th)*dy;
         const double yr = 0.5 + std::sin(th)*dx + std::cos(th)*dy;
         return scalar_state(solid_body_value(xr, yr));
      };
      ps.smoothness_default = true;
      return ps;
   }
   if (name == "burgers2d")
   {
      ps.description = "2D Burgers quadrant Riemann problem";
      Burgers b;
      b.dim = 2;
      b.v = {1.0, 1.0};
      ps.model = b;
      ps.mesh.d = 2;
      ps.mesh.n[0] = ps.mesh.n[1] = 40;
      ps.mesh.lo[0] = ps.mesh.lo[1] = 0.0;
      ps.mesh.hi[0] = ps.mesh.hi[1] = 1.0;
      ps.end_time = 0.5;
      ps.initial = [](const double *x)
      {
         return scalar_state(burgers2d_value(x[0], x[1]));
      };
      for (int axis = 0; axis < 2; axis++)
      {
         for (int side = 0; side < 2; side++)
         {
            ps.bcs[axis*2 + side] = dirichlet([axis, side](const double *x, double t)
            {
               return scalar_state(burgers2d_edge(axis, side, x[0], x[1], t));
            });
         }
      }
      ps.smoothness_default = false;
      return ps;
   }
   if (name == "buckley_leverett")
   {
      ps.description = "Buckley-Leverett Riemann problem (non-convex flux)";
      BuckleyLeverett bl;
      ps.model = bl;
      ps.mesh.d = 1;
      ps.mesh.n[0] = 64;
      ps.mesh.lo[0] = -1.0;
      ps.mesh.hi[0] = 1.0;
      ps.end_time = 0.25;
      ps.initial = [](const double *x)
      {
         return scalar_state(x[0] < 0.0 ? -3.0 : 3.0);
      };
      ps.bcs[0] = dirichlet([](const double *, double) { return scalar_state(-3.0); });
      ps.bcs[1] = dirichlet([](const double *, double) { return scalar_state(3.0); });
      ps.reference_elements = 10000;
      ps.smoothness_default = false;
      return ps;
   }
   if (name == "sod")
   {
      ps.description = "Sod shock tube";
      Euler m;
      m.dim = 1;
      m.gamma = pp.gamma;
      ps.model = m;
      ps.mesh.d = 1;
      ps.mesh.n[0] = 64;
      ps.mesh.lo[0] = -0.5;
      ps.mesh.hi[0] = 0.5;
      ps.end_time = 0.18;
      const StateVec ul = euler_state(m, 1.0, {0.0, 0.0}, 1.0);
      const StateVec ur = euler_state(m, 0.125, {0.0, 0.0}, 0.1);
      ps.initial = [ul, ur](const double *x) { return x[0] < 0.0 ? ul : ur; };
      ps.bcs[0] = dirichlet([ul](const double *, double) { return ul; });
      ps.bcs[1] = dirichlet([ur](const double *, double) { return ur; });
      Euler msol = m;
      ps.exact = [msol, ul, ur](const double *x, double t) -> StateVec
      {
         if (t <= 0.0) { return x[0] < 0.0 ? ul : ur; }
         RiemannSolution sol = exact_riemann_euler(msol, ul, ur);
         return sample_riemann_euler(msol, ul, ur, sol, x[0]/t);
      };
      return ps;
   }
   if (name == "shu_osher")
   {
      ps.description = "Shu-Osher sine-shock interaction";
      Euler m;
      m.dim = 1;
      m.gamma = pp.gamma;
      ps.model = m;
      ps.mesh.d = 1;
      ps.mesh.n[0] = 128;
      ps.mesh.lo[0] = -5.0;
      ps.mesh.hi[0] = 5.0;
      ps.end_time = 1.8;
      Euler mc = m;
      const StateVec ul = euler_state(m, 3.857143, {2.629369, 0.0}, 10.3333);
      ps.initial = [mc, ul](const double *x) -> StateVec
      {
         if (x[0] < -4.0) { return ul; }
         return euler_state(mc, 1.0 + 0.2*std::sin(5.0*x[0]), {0.0, 0.0}, 1.0);
      };
      ps.bcs[0] = dirichlet([ul](const double *, double) { return ul; });
      ps.bcs[1] = dirichlet([mc](const double *x, double)
      {
         return euler_state(mc, 1.0 + 0.2*std::sin(5.0*x[0]), {0.0, 0.0}, 1.0);
      });
      ps.reference_elements = 20000;
      return ps;
   }
   if (name == "riemann2d_12")
   {
      ps.description = "2D Euler Riemann problem, configuration 12 "
                       "(periodic mirror extension on [0,2]^2)";
      Euler m;
      m.dim = 2;
      m.gamma = pp.gamma;
      ps.model = m;
      ps.mesh.d = 2;
      ps.mesh.n[0] = ps.mesh.n[1] = 128;   // 64 cells per unit subdomain
      ps.mesh.lo[0] = ps.mesh.lo[1] = 0.0;
      ps.mesh.hi[0] = ps.mesh.hi[1] = 2.0;
      ps.mesh.periodic[0] = ps.mesh.periodic[1] = true;
      ps.end_time = 0.25;
      Euler mc = m;
      ps.initial = [mc](const double *x)
      {
         return riemann12_state(mc, x[0], x[1]);
      };
      return ps;
   }
   if (name == "dmr")
   {
      ps.description = "double Mach reflection (Mach 10, 60 degree wedge)";
      Euler m;
      m.dim = 2;
      m.gamma = pp.gamma;
      ps.model = m;
      ps.mesh.d = 2;
      ps.mesh.n[0] = 300;
      ps.mesh.n[1] = 75;
      ps.mesh.lo[0] = 0.0;
      ps.mesh.hi[0] = 4.0;
      ps.mesh.lo[1] = 0.0;
      ps.mesh.hi[1] = 1.0;
      ps.end_time = 0.275;
      const DmrStates st = dmr_states(m);
      ps.initial = [st](const double *x)
      {
         return x[0] < dmr_shock_x(x[1], 0.0) ? st.post : st.pre;
      };
      // left inflow: post-shock state
      ps.bcs[0] = dirichlet([st](const double *, double) { return st.post; });
      // right outflow
      ps.bcs[1].kind = BoundaryClosure::Kind::outflow;
      // bottom: post-shock state ahead of the wedge tip, slip wall after it
      ps.bcs[2].kind = BoundaryClosure::Kind::custom;
      ps.bcs[2].custom = [st](const double *x, double, const StateVec &inside,
                              const double *sn_out, double snn) -> StateVec
      {
         if (x[0] < 1.0/6.0) { return st.post; }
         return mirror_state(inside, sn_out, snn, 2);
      };
      // top: exact shock position at the current time
      ps.bcs[3] = dirichlet([st](const double *x, double t)
      {
         return x[0] < dmr_shock_x(1.0, t) ? st.post : st.pre;
      });
      return ps;
   }
   fail(errc::unknown_problem, "unknown problem '" + name + "'");
}

} // namespace dgfct
