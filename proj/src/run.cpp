#include "run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "parallel.hpp"

namespace dgfct
{

namespace
{

LimiterStrategy strategy_from_name(const std::string &s)
{
   if (s == "none") { return LimiterStrategy::none; }
   if (s == "low_only") { return LimiterStrategy::low_only; }
   if (s == "elementwise") { return LimiterStrategy::elementwise; }
   if (s == "subcell") { return LimiterStrategy::subcell; }
   fail(errc::parse, "unknown limiter strategy '" + s + "'");
}

BoundsSource bounds_from_name(const std::string &s)
{
   if (s == "bar_states") { return BoundsSource::bar_states; }
   if (s == "previous") { return BoundsSource::previous; }
   if (s == "low_order") { return BoundsSource::low_order; }
   fail(errc::parse, "unknown bounds source '" + s + "'");
}

std::string fmt(double v)
{
   char buf[40];
   std::snprintf(buf, sizeof(buf), "%.17g", v);
   return buf;
}

} // namespace

RunInstance make_instance(const Config &cfg)
{
   require(cfg.has("problem"), errc::parse, "configuration needs a problem");
   ProblemParams pp;
   pp.gamma = cfg.get_double("gamma", 1.4);
   RunInstance ri;
   ri.setup = make_problem(cfg.get("problem"), pp);

   MeshSpec spec = ri.setup.mesh;
   if (cfg.has("elements"))
   {
      spec.n[0] = cfg.get_int("elements", spec.n[0]);
      if (spec.d > 1) { spec.n[1] = spec.n[0]; }
   }
   spec.n[0] = cfg.get_int("elements_x", spec.n[0]);
   if (spec.d > 1) { spec.n[1] = cfg.get_int("elements_y", spec.n[1]); }
   const std::string mapping = cfg.get("mapping", "cartesian");
   if (mapping == "sinusoidal")
   {
      spec.mapping.kind = Mapping::Kind::sinusoidal;
      spec.mapping.amplitude = cfg.get_double("mapping_amplitude", 0.04);
   }
   else
   {
      require(mapping == "cartesian", errc::parse,
              "unknown mapping '" + mapping + "'");
   }

   Model model = ri.setup.model;
   if (Euler *eu = std::get_if<Euler>(&model))
   {
      eu->simple_wave_speed = cfg.get("wave_speed", "guaranteed") == "simple";
   }

   LimiterOptions lim;
   lim.strategy = strategy_from_name(cfg.get("limiter", "subcell"));
   const std::string sm = cfg.get("smoothness", "default");
   if (sm == "default") { lim.smoothness = ri.setup.smoothness_default; }
   else if (sm == "on") { lim.smoothness = true; }
   else if (sm == "off") { lim.smoothness = false; }
   else { fail(errc::parse, "smoothness must be on/off/default"); }
   lim.s0 = cfg.get_double("s0", 0.0);
   lim.kappa = cfg.get_double("kappa", 1.0);
   lim.bounds_source = bounds_from_name(cfg.get("bounds_source", "bar_states"));
   lim.euler_entropy = cfg.get_flag("euler_entropy", true);
   lim.unsparsified = cfg.get("low_order_operator", "sparsified") == "unsparsified";
   lim.global_lo = cfg.has("global_min") ? cfg.get_double("global_min", 0.0)
                   : nan_value;
   lim.global_hi = cfg.has("global_max") ? cfg.get_double("global_max", 0.0)
                   : nan_value;

   set_num_threads(cfg.get_int("threads", 0));

   const int degree = cfg.get_int("degree", 3);
   ri.solver = std::make_unique<Solver>(spec, degree, model, lim, ri.setup.bcs);
   ri.solver->set_initial(ri.setup.initial, ri.state);
   ri.end_time = cfg.get_double("end_time", ri.setup.end_time);
   ri.cfl = cfg.get_double("cfl", 0.5);
   ri.dt_fixed = cfg.get_double("dt", 0.0);
   ri.integrator = integrator_from_name(cfg.get("integrator", "ssprk3"));
   ri.steps_max = cfg.get_int("steps_max", 100000000);
   ri.monitor = cfg.get_flag("monitor", true);
   return ri;
}

// ---------------------------------------------------------------------------
// Norms, monitoring, mass
// ---------------------------------------------------------------------------

void error_norms(const Solver &s, const std::vector<double> &u,
                 const std::function<StateVec(const double *, double)> &ref,
                 double t, double *l1, double *l2, double *linf)
{
   const Grid &g = s.grid();
   const int nn = g.ref.nn, nc = s.ncomp();
   std::vector<double> e1(g.nelem*nc, 0.0), e2(g.nelem*nc, 0.0),
       einf(g.nelem*nc, 0.0);
   parallel_for(g.nelem, [&](int e)
   {
      const ElemGeom &gm = g.geom(e);
      double x[2];
      for (int n = 0; n < nn; n++)
      {
         g.node_coords(e, n, x);
         StateVec r = ref(x, t);
         for (int c = 0; c < nc; c++)
         {
            double d = std::abs(u[(size_t(e)*nn + n)*nc + c] - r[c]);
            e1[e*nc + c] += gm.mass[n]*d;
            e2[e*nc + c] += gm.mass[n]*d*d;
            einf[e*nc + c] = std::max(einf[e*nc + c], d);
         }
      }
   });
   for (int c = 0; c < nc; c++)
   {
      l1[c] = l2[c] = linf[c] = 0.0;
      for (int e = 0; e < g.nelem; e++)
      {
         l1[c] += e1[e*nc + c];
         l2[c] += e2[e*nc + c];
         linf[c] = std::max(linf[c], einf[e*nc + c]);
      }
      l2[c] = std::sqrt(l2[c]);
   }
}

namespace
{

void mass_totals(const Solver &s, const std::vector<double> &u, double *mass,
                 double *scale)
{
   const Grid &g = s.grid();
   const int nn = g.ref.nn, nc = s.ncomp();
   for (int c = 0; c < nc; c++) { mass[c] = 0.0; scale[c] = 0.0; }
   for (int e = 0; e < g.nelem; e++)
   {
      const ElemGeom &gm = g.geom(e);
      for (int n = 0; n < nn; n++)
      {
         for (int c = 0; c < nc; c++)
         {
            const double v = u[(size_t(e)*nn + n)*nc + c];
            mass[c] += gm.mass[n]*v;
            scale[c] += gm.mass[n]*std::abs(v);
         }
      }
   }
}

struct Monitor
{
   bool enabled = false;
   bool scalar_bounds = false;
   double lo = 0.0, hi = 0.0;
   bool euler = false;
   double sigma_floor = 0.0;
   const Euler *eu = nullptr;
   long violations = 0;

   void check(const Solver &s, const std::vector<double> &u)
   {
      if (!enabled) { return; }
      const int nc = s.ncomp();
      const long nn = s.nnodes();
      long bad = 0;
      if (euler)
      {
         #ifdef _OPENMP
         #pragma omp parallel for schedule(static) reduction(+:bad)
         #endif
         for (long i = 0; i < nn; i++)
         {
            StateVec v{};
            for (int c = 0; c < nc; c++) { v[c] = u[size_t(i)*nc + c]; }
            if (!(v[0] > 0.0) || !std::isfinite(v[0])) { bad++; continue; }
            const double sig = eu->entropy_surrogate(v);
            if (!(sig > 0.0) || !std::isfinite(sig)) { bad++; continue; }
            if (sig < sigma_floor - 1e-9*std::abs(sigma_floor)) { bad++; }
         }
      }
      else
      {
         const double slack = 1e-9*std::max({1.0, std::abs(lo), std::abs(hi)});
         #ifdef _OPENMP
         #pragma omp parallel for schedule(static) reduction(+:bad)
         #endif
         for (long i = 0; i < nn; i++)
         {
            const double v = u[size_t(i)*nc];
            if (!std::isfinite(v)) { bad++; continue; }
            if (scalar_bounds && (v < lo - slack || v > hi + slack)) { bad++; }
         }
      }
      violations += bad;
   }
};

} // namespace

// ---------------------------------------------------------------------------
// Reference solutions (degree-0 fine runs, cached on disk)
// ---------------------------------------------------------------------------

namespace
{

std::string reference_path(const Config &cfg, const RunInstance &ri, int nref)
{
   std::ostringstream os;
   os << cfg.get("cache_dir", ".dgfct-cache") << "/ref_" << ri.setup.name
      << "_n" << nref << "_t" << fmt(ri.end_time) << ".csv";
   return os.str();
}

// piecewise-constant field on a uniform grid
struct ReferenceField
{
   double lo = 0.0, hi = 1.0;
   int n = 0;
   int nc = 1;
   std::vector<double> values;

   StateVec eval(double x) const
   {
      int i = int((x - lo)/(hi - lo)*n);
      i = std::clamp(i, 0, n - 1);
      StateVec s{};
      for (int c = 0; c < nc; c++) { s[c] = values[size_t(i)*nc + c]; }
      return s;
   }
};

bool load_reference(const std::string &path, ReferenceField &rf)
{
   std::ifstream in(path);
   if (!in) { return false; }
   std::string line;
   std::getline(in, line);   // header
   rf.values.clear();
   while (std::getline(in, line))
   {
      std::istringstream is(line);
      std::string cell;
      std::getline(is, cell, ',');   // x column
      while (std::getline(is, cell, ','))
      {
         rf.values.push_back(std::stod(cell));
      }
   }
   if (rf.values.empty() || rf.values.size() % rf.nc != 0) { return false; }
   return int(rf.values.size()/rf.nc) == rf.n;
}

ReferenceField compute_reference(const Config &cfg, const RunInstance &ri)
{
   const int nref = cfg.get_int("reference_elements",
                                ri.setup.reference_elements);
   require(nref > 0, errc::invalid_argument,
           "problem has no reference resolution");
   ReferenceField rf;
   rf.lo = ri.setup.mesh.lo[0];
   rf.hi = ri.setup.mesh.hi[0];
   rf.n = nref;
   rf.nc = model_ncomp(ri.setup.model);

   const std::string path = reference_path(cfg, ri, nref);
   if (load_reference(path, rf)) { return rf; }

   Config rc = cfg;
   rc.set("degree", "0");
   rc.set("elements", std::to_string(nref));
   rc.set("use_reference", "off");
   rc.set("output_dir", "");
   rc.set("limiter", "low_only");
   rc.set("integrator", "ssprk3");
   RunInstance rri = make_instance(rc);
   TimeStepper ts(*rri.solver, rri.integrator);
   double t = 0.0;
   long steps = 0;
   while (t < rri.end_time - 1e-14*rri.end_time)
   {
      double dt = ts.compute_dt(rri.state, t, rri.cfl, rri.end_time,
                                rri.dt_fixed);
      ts.step(rri.state, dt, t);
      t += dt;
      require(++steps < rri.steps_max, errc::internal,
              "reference run exceeded the step budget");
   }
   rf.values = rri.state;

   std::filesystem::path p(path);
   if (!p.parent_path().empty())
   {
      std::filesystem::create_directories(p.parent_path());
   }
   std::ofstream out(path);
   require(bool(out), errc::io, "cannot write reference cache '" + path + "'");
   out << "x";
   for (int c = 0; c < rf.nc; c++) { out << ",u" << c; }
   out << "\n";
   const double h = (rf.hi - rf.lo)/rf.n;
   for (int i = 0; i < rf.n; i++)
   {
      out << fmt(rf.lo + (i + 0.5)*h);
      for (int c = 0; c < rf.nc; c++)
      {
         out << "," << fmt(rf.values[size_t(i)*rf.nc + c]);
      }
      out << "\n";
   }
   return rf;
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

void write_fields_csv(const std::string &path, const Solver &s,
                      const std::vector<double> &u)
{
   std::ofstream out(path);
   require(bool(out), errc::io, "cannot write '" + path + "'");
   const Grid &g = s.grid();
   const int nn = g.ref.nn, nc = s.ncomp(), d = g.spec.d;
   out << (d == 1 ? "x" : "x,y");
   for (int c = 0; c < nc; c++) { out << ",u" << c; }
   out << "\n";
   double x[2];
   for (int e = 0; e < g.nelem; e++)
   {
      for (int n = 0; n < nn; n++)
      {
         g.node_coords(e, n, x);
         out << fmt(x[0]);
         if (d > 1) { out << "," << fmt(x[1]); }
         for (int c = 0; c < nc; c++)
         {
            out << "," << fmt(u[(size_t(e)*nn + n)*nc + c]);
         }
         out << "\n";
      }
   }
}

void write_fields_vtk(const std::string &path, const Solver &s,
                      const std::vector<double> &u)
{
   const Grid &g = s.grid();
   require(g.spec.d == 2, errc::invalid_argument, "vtk output is 2D only");
   std::ofstream out(path);
   require(bool(out), errc::io, "cannot write '" + path + "'");
   const int n1 = g.ref.n1(), nc = s.ncomp();
   const int nx = g.spec.n[0]*n1, ny = g.spec.n[1]*n1;
   out << "# vtk DataFile Version 3.0\n" << "dgfct fields\n" << "ASCII\n";
   out << "DATASET STRUCTURED_GRID\n";
   out << "DIMENSIONS " << nx << " " << ny << " 1\n";
   out << "POINTS " << nx*ny << " double\n";
   double x[2];
   auto node_of = [&](int gx, int gy)
   {
      const int ex = gx/n1, ix = gx % n1, ey = gy/n1, iy = gy % n1;
      const int e = ey*g.spec.n[0] + ex;
      return std::pair<int, int>(e, iy*n1 + ix);
   };
   for (int gy = 0; gy < ny; gy++)
   {
      for (int gx = 0; gx < nx; gx++)
      {
         auto [e, n] = node_of(gx, gy);
         g.node_coords(e, n, x);
         out << fmt(x[0]) << " " << fmt(x[1]) << " 0\n";
      }
   }
   out << "POINT_DATA " << nx*ny << "\n";
   for (int c = 0; c < nc; c++)
   {
      out << "SCALARS u" << c << " double 1\n" << "LOOKUP_TABLE default\n";
      for (int gy = 0; gy < ny; gy++)
      {
         for (int gx = 0; gx < nx; gx++)
         {
            auto [e, n] = node_of(gx, gy);
            out << fmt(u[(size_t(e)*g.ref.nn + n)*nc + c]) << "\n";
         }
      }
   }
}

} // namespace

std::string format_report(const RunReport &r)
{
   std::ostringstream os;
   os << "problem = " << r.problem << "\n";
   os << "dimension = " << r.dimension << "\n";
   os << "degree = " << r.degree << "\n";
   os << "elements_x = " << r.elements[0] << "\n";
   if (r.dimension > 1) { os << "elements_y = " << r.elements[1] << "\n"; }
   os << "dof = " << r.dof << "\n";
   os << "ncomp = " << r.ncomp << "\n";
   os << "end_time = " << fmt(r.end_time) << "\n";
   os << "cfl = " << fmt(r.cfl) << "\n";
   os << "steps = " << r.steps << "\n";
   for (int c = 0; c < r.ncomp; c++)
   {
      os << "umin_" << c << " = " << fmt(r.umin[c]) << "\n";
      os << "umax_" << c << " = " << fmt(r.umax[c]) << "\n";
   }
   if (r.has_norms)
   {
      for (int c = 0; c < r.ncomp; c++)
      {
         os << "l1_error_" << c << " = " << fmt(r.l1[c]) << "\n";
         os << "l2_error_" << c << " = " << fmt(r.l2[c]) << "\n";
         os << "linf_error_" << c << " = " << fmt(r.linf[c]) << "\n";
      }
   }
   os << "mass_drift_per_step = " << fmt(r.mass_drift_per_step) << "\n";
   os << "invariant_violations = " << r.invariant_violations << "\n";
   os << "wall_time = " << fmt(r.wall_time) << "\n";
   return os.str();
}

RunReport run_from_config(const Config &cfg)
{
   const auto t0 = std::chrono::steady_clock::now();
   RunInstance ri = make_instance(cfg);
   Solver &s = *ri.solver;

   RunReport rep;
   rep.problem = ri.setup.name;
   rep.dimension = s.grid().spec.d;
   rep.degree = s.grid().ref.p;
   rep.elements[0] = s.grid().spec.n[0];
   rep.elements[1] = s.grid().spec.n[1];
   rep.ncomp = s.ncomp();
   rep.dof = long(s.ndof());
   rep.end_time = ri.end_time;
   rep.cfl = ri.cfl;

   double mass0[max_comp], scale0[max_comp];
   mass_totals(s, ri.state, mass0, scale0);

   Monitor mon;
   mon.enabled = ri.monitor;
   mon.euler = std::holds_alternative<Euler>(s.model());
   if (mon.euler)
   {
      mon.eu = std::get_if<Euler>(&s.model());
      mon.sigma_floor = s.sigma_floor();
   }
   else
   {
      mon.scalar_bounds = s.options().strategy != LimiterStrategy::none;
      mon.lo = s.global_lo();
      mon.hi = s.global_hi();
   }

   TimeStepper ts(s, ri.integrator);
   double t = 0.0;
   long steps = 0;
   while (t < ri.end_time - 1e-14*std::max(1.0, ri.end_time))
   {
      double dt = ts.compute_dt(ri.state, t, ri.cfl, ri.end_time, ri.dt_fixed);
      ts.step(ri.state, dt, t);
      t += dt;
      steps++;
      mon.check(s, ri.state);
      require(steps < ri.steps_max, errc::internal, "step budget exceeded");
   }
   rep.steps = steps;
   rep.invariant_violations = mon.violations;

   // field extrema
   for (int c = 0; c < s.ncomp(); c++)
   {
      rep.umin[c] = infinity;
      rep.umax[c] = -infinity;
   }
   for (long i = 0; i < s.nnodes(); i++)
   {
      for (int c = 0; c < s.ncomp(); c++)
      {
         rep.umin[c] = std::min(rep.umin[c], ri.state[size_t(i)*s.ncomp() + c]);
         rep.umax[c] = std::max(rep.umax[c], ri.state[size_t(i)*s.ncomp() + c]);
      }
   }

   // mass conservation drift
   double massT[max_comp], scaleT[max_comp];
   mass_totals(s, ri.state, massT, scaleT);
   double drift = 0.0;
   for (int c = 0; c < s.ncomp(); c++)
   {
      const double sc = std::max({scale0[c], 1e-300});
      drift = std::max(drift, std::abs(massT[c] - mass0[c])/sc);
   }
   rep.mass_drift_per_step = steps > 0 ? drift/steps : 0.0;

   // error norms
   if (ri.setup.exact)
   {
      error_norms(s, ri.state, ri.setup.exact, ri.end_time,
                  rep.l1.data(), rep.l2.data(), rep.linf.data());
      rep.has_norms = true;
   }
   else if (cfg.get_flag("use_reference", false))
   {
      ReferenceField rf = compute_reference(cfg, ri);
      auto ref = [&rf](const double *x, double) { return rf.eval(x[0]); };
      error_norms(s, ri.state, ref, ri.end_time,
                  rep.l1.data(), rep.l2.data(), rep.linf.data());
      rep.has_norms = true;
   }

   rep.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0).count();

   const std::string outdir = cfg.get("output_dir", "");
   if (!outdir.empty())
   {
      std::filesystem::create_directories(outdir);
      {
         std::ofstream out(outdir + "/results.txt");
         require(bool(out), errc::io, "cannot write results record");
         out << format_report(rep);
      }
      {
         std::ofstream out(outdir + "/config_used.txt");
         out << cfg.dump();
      }
      if (cfg.get_flag("write_fields", true))
      {
         write_fields_csv(outdir + "/fields.csv", s, ri.state);
      }
      if (s.grid().spec.d == 2 && cfg.get_flag("write_vtk", true))
      {
         write_fields_vtk(outdir + "/fields.vtk", s, ri.state);
      }
   }
   return rep;
}

std::vector<ConvergenceRow> convergence_from_config(const Config &cfg,
                                                    int levels, double &slope)
{
   require(levels >= 1, errc::invalid_argument, "need at least one level");
   Config base = cfg;
   base.set("output_dir", "");
   RunInstance probe = make_instance(cfg);
   int n0 = probe.solver->grid().spec.n[0];

   std::vector<ConvergenceRow> rows;
   for (int l = 0; l < levels; l++)
   {
      Config c = base;
      c.set("elements", std::to_string(n0 << l));
      RunReport rep = run_from_config(c);
      require(rep.has_norms, errc::invalid_argument,
              "convergence study needs an exact or reference solution");
      ConvergenceRow row;
      row.elements = n0 << l;
      row.l1 = rep.l1[0];
      row.rate = l > 0 ? std::log2(rows.back().l1/row.l1) : 0.0;
      rows.push_back(row);
   }
   // least-squares slope of log(l1) against log(h)
   slope = 0.0;
   if (levels >= 2)
   {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (int l = 0; l < levels; l++)
      {
         const double x = -std::log2(double(rows[l].elements));
         const double y = std::log2(std::max(rows[l].l1, 1e-300));
         sx += x; sy += y; sxx += x*x; sxy += x*y;
      }
      slope = (levels*sxy - sx*sy)/(levels*sxx - sx*sx);
   }
   return rows;
}

} // namespace dgfct
