#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "run.hpp"

using namespace dgfct;

namespace
{

std::string slurp(const std::string &path)
{
   std::ifstream in(path);
   std::ostringstream os;
   os << in.rdbuf();
   return os.str();
}

std::string strip_wall_time(const std::string &s)
{
   std::istringstream is(s);
   std::ostringstream os;
   std::string line;
   while (std::getline(is, line))
   {
      if (line.rfind("wall_time", 0) != 0) { os << line << "\n"; }
   }
   return os.str();
}

} // namespace

TEST_CASE("problem constants")
{
   double x[2] = {0.0, 0.0};

   ProblemSetup sod = make_problem("sod");
   x[0] = -0.25;
   StateVec ul = sod.initial(x);
   CHECK(ul[0] == doctest::Approx(1.0));
   CHECK(ul[1] == doctest::Approx(0.0));
   CHECK(std::get<Euler>(sod.model).pressure(ul) == doctest::Approx(1.0));
   x[0] = 0.25;
   StateVec ur = sod.initial(x);
   CHECK(ur[0] == doctest::Approx(0.125));
   CHECK(std::get<Euler>(sod.model).pressure(ur) == doctest::Approx(0.1));

   ProblemSetup sb = make_problem("solid_body");
   x[0] = 0.5;
   x[1] = 0.25;
   CHECK(sb.initial(x)[0] == doctest::Approx(1.0));   // cone apex
   x[0] = 0.25;
   x[1] = 0.5;
   CHECK(sb.initial(x)[0] == doctest::Approx(0.5));   // bump peak
   x[0] = 0.5;
   x[1] = 0.75;
   CHECK(sb.initial(x)[0] == doctest::Approx(0.0));   // inside the slot
   x[0] = 0.55;
   CHECK(sb.initial(x)[0] == doctest::Approx(1.0));   // cylinder body

   ProblemSetup r12 = make_problem("riemann2d_12");
   x[0] = 0.25;
   x[1] = 0.25;
   StateVec q3 = r12.initial(x);
   CHECK(q3[0] == doctest::Approx(0.8));
   CHECK(std::get<Euler>(r12.model).pressure(q3) == doctest::Approx(1.0));
   x[0] = 0.25;
   x[1] = 0.75;
   StateVec q2 = r12.initial(x);
   CHECK(q2[0] == doctest::Approx(1.0));
   CHECK(q2[1]/q2[0] == doctest::Approx(3.0/std::sqrt(17.0)));
   // mirror extension: the reflected quadrant flips the normal velocity
   x[0] = 1.75;
   x[1] = 0.75;
   StateVec qm = r12.initial(x);
   CHECK(qm[1]/qm[0] == doctest::Approx(-3.0/std::sqrt(17.0)));
   CHECK(qm[2] == doctest::Approx(0.0));

   ProblemSetup so = make_problem("shu_osher");
   x[0] = -4.5;
   StateVec sl = so.initial(x);
   CHECK(sl[0] == doctest::Approx(3.857143));
   CHECK(sl[1]/sl[0] == doctest::Approx(2.629369));
   CHECK(std::get<Euler>(so.model).pressure(sl) == doctest::Approx(10.3333));

   ProblemSetup bl = make_problem("buckley_leverett");
   x[0] = -0.5;
   CHECK(bl.initial(x)[0] == doctest::Approx(-3.0));

   ProblemSetup dmr = make_problem("dmr");
   x[0] = 0.0;
   x[1] = 0.5;
   StateVec post = dmr.initial(x);
   CHECK(post[0] == doctest::Approx(8.0));
   CHECK(std::get<Euler>(dmr.model).pressure(post) == doctest::Approx(116.5));
   x[0] = 3.0;
   StateVec pre = dmr.initial(x);
   CHECK(pre[0] == doctest::Approx(1.4));
   CHECK(std::get<Euler>(dmr.model).pressure(pre) == doctest::Approx(1.0));

   CHECK_THROWS_AS(make_problem("not_a_problem"), error);
   CHECK(list_problems().size() == 10);
}

TEST_CASE("error norms: exact field and constant offset")
{
   Config c;
   c.set("problem", "advect_sine_1d");
   c.set("degree", "3");
   c.set("elements", "8");
   RunInstance ri = make_instance(c);
   // state equals the reference: all norms vanish
   double l1[4], l2[4], linf[4];
   error_norms(*ri.solver, ri.state, ri.setup.exact, 0.0, l1, l2, linf);
   CHECK(l1[0] < 1e-14);
   CHECK(l2[0] < 1e-14);
   CHECK(linf[0] < 1e-14);
   // constant offset c has L1 = |c| on a unit domain
   for (double &v : ri.state) { v += 0.3; }
   error_norms(*ri.solver, ri.state, ri.setup.exact, 0.0, l1, l2, linf);
   CHECK(l1[0] == doctest::Approx(0.3).epsilon(1e-12));
   CHECK(linf[0] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("unknown configuration keys are rejected")
{
   Config c;
   CHECK_THROWS_AS(c.set("not_a_key", "1"), error);
   c.set("problem", "sod");
   CHECK_THROWS_AS(c.apply_override("--nope=3"), error);
   c.apply_override("--degree=2");
   CHECK(c.get_int("degree", 0) == 2);
   c.apply_override("elements=12");
   CHECK(c.get_int("elements", 0) == 12);
}

TEST_CASE("outputs: csv row count, results record, determinism")
{
   namespace fs = std::filesystem;
   fs::remove_all("test_out_a");
   fs::remove_all("test_out_b");
   Config c;
   c.set("problem", "advect_sine_1d");
   c.set("degree", "2");
   c.set("elements", "8");
   c.set("end_time", "0.05");
   c.set("output_dir", "test_out_a");
   RunReport rep = run_from_config(c);
   CHECK(fs::exists("test_out_a/results.txt"));
   CHECK(fs::exists("test_out_a/config_used.txt"));
   CHECK(fs::exists("test_out_a/fields.csv"));
   // row count equals total dof plus a header line
   std::ifstream in("test_out_a/fields.csv");
   int lines = 0;
   std::string line;
   while (std::getline(in, line)) { lines++; }
   CHECK(lines == int(rep.dof) + 1);
   // conservation drift is reported and tiny for the periodic run
   CHECK(rep.mass_drift_per_step <= 1e-12);

   c.set("output_dir", "test_out_b");
   run_from_config(c);
   CHECK(strip_wall_time(slurp("test_out_a/results.txt"))
         == strip_wall_time(slurp("test_out_b/results.txt")));
   fs::remove_all("test_out_a");
   fs::remove_all("test_out_b");
}

TEST_CASE("vtk output for 2d runs")
{
   namespace fs = std::filesystem;
   fs::remove_all("test_out_vtk");
   Config c;
   c.set("problem", "solid_body");
   c.set("degree", "1");
   c.set("elements", "6");
   c.set("end_time", "0.002");
   c.set("output_dir", "test_out_vtk");
   run_from_config(c);
   CHECK(fs::exists("test_out_vtk/fields.vtk"));
   std::string head = slurp("test_out_vtk/fields.vtk").substr(0, 200);
   CHECK(head.find("STRUCTURED_GRID") != std::string::npos);
   CHECK(head.find("DIMENSIONS 12 12 1") != std::string::npos);
   fs::remove_all("test_out_vtk");
}

TEST_CASE("reference solutions are computed once and cached")
{
   namespace fs = std::filesystem;
   fs::remove_all("test_cache");
   Config c;
   c.set("problem", "buckley_leverett");
   c.set("degree", "2");
   c.set("elements", "24");
   c.set("end_time", "0.1");
   c.set("use_reference", "on");
   c.set("reference_elements", "400");
   c.set("cache_dir", "test_cache");
   RunReport r1 = run_from_config(c);
   CHECK(r1.has_norms);
   CHECK(r1.l1[0] > 0.0);
   CHECK(r1.l1[0] < 1.0);
   int files = 0;
   for (auto &p : fs::directory_iterator("test_cache")) { (void)p; files++; }
   CHECK(files == 1);
   // second run loads the cache and reproduces the same norms
   RunReport r2 = run_from_config(c);
   CHECK(r2.l1[0] == doctest::Approx(r1.l1[0]).epsilon(1e-14));
   fs::remove_all("test_cache");
}

TEST_CASE("buckley-leverett run stays within the data bounds")
{
   Config c;
   c.set("problem", "buckley_leverett");
   c.set("degree", "3");
   c.set("elements", "64");
   RunReport rep = run_from_config(c);
   CHECK(rep.invariant_violations == 0);
   CHECK(rep.umin[0] >= -3.0 - 1e-11);
   CHECK(rep.umax[0] <= 3.0 + 1e-11);
}

TEST_CASE("burgers 2d quadrant problem runs with bounds intact")
{
   Config c;
   c.set("problem", "burgers2d");
   c.set("degree", "2");
   c.set("elements", "10");
   c.set("end_time", "0.5");
   RunReport rep = run_from_config(c);
   CHECK(rep.invariant_violations == 0);
   CHECK(rep.umin[0] >= -1.0 - 1e-11);
   CHECK(rep.umax[0] <= 0.8 + 1e-11);
}

TEST_CASE("convergence driver on a fast case")
{
   Config c;
   c.set("problem", "advect_sine_1d");
   c.set("degree", "1");
   c.set("elements", "8");
   c.set("smoothness", "off");
   double slope = 0.0;
   auto rows = convergence_from_config(c, 3, slope);
   CHECK(rows.size() == 3);
   CHECK(rows[0].elements == 8);
   CHECK(rows[2].elements == 32);
   CHECK(rows[2].l1 < rows[0].l1);
   CHECK(slope > 0.5);
}

TEST_CASE("solid body exact solution returns to the initial state")
{
   ProblemSetup sb = make_problem("solid_body");
   double x[2] = {0.31, 0.62};
   StateVec a = sb.initial(x);
   StateVec b = sb.exact(x, 1.0);
   CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
   // quarter revolution moves the cone apex to (0.75, 0.5)
   x[0] = 0.75;
   x[1] = 0.5;
   CHECK(sb.exact(x, 0.25)[0] == doctest::Approx(1.0).epsilon(1e-12));
}
