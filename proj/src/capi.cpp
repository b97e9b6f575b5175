#include "dgfct.h"

#include <cstring>
#include <string>

#include "config.hpp"
#include "run.hpp"

using namespace dgfct;

struct dgfct_config
{
   Config cfg;
};

struct dgfct_run
{
   RunReport report;
   std::string text;
};

namespace
{

thread_local std::string g_last_error;

dgfct_status status_of(errc c)
{
   switch (c)
   {
      case errc::invalid_argument: return DGFCT_ERR_INVALID_ARGUMENT;
      case errc::parse: return DGFCT_ERR_PARSE;
      case errc::unknown_key: return DGFCT_ERR_UNKNOWN_KEY;
      case errc::unknown_problem: return DGFCT_ERR_UNKNOWN_PROBLEM;
      case errc::geometry: return DGFCT_ERR_GEOMETRY;
      case errc::inadmissible_state: return DGFCT_ERR_INADMISSIBLE_STATE;
      case errc::cfl_violation: return DGFCT_ERR_CFL;
      case errc::invariant_violation: return DGFCT_ERR_INVARIANT_VIOLATION;
      case errc::io: return DGFCT_ERR_IO;
      case errc::internal: return DGFCT_ERR_INTERNAL;
   }
   return DGFCT_ERR_INTERNAL;
}

template <typename F>
dgfct_status guarded(F &&f)
{
   try
   {
      f();
      g_last_error.clear();
      return DGFCT_OK;
   }
   catch (const error &e)
   {
      g_last_error = e.what();
      return status_of(e.code);
   }
   catch (const std::exception &e)
   {
      g_last_error = e.what();
      return DGFCT_ERR_INTERNAL;
   }
   catch (...)
   {
      g_last_error = "unknown error";
      return DGFCT_ERR_INTERNAL;
   }
}

dgfct_status copy_out(const std::string &s, char *buf, size_t bufsize)
{
   if (buf == nullptr || bufsize == 0)
   {
      g_last_error = "null output buffer";
      return DGFCT_ERR_INVALID_ARGUMENT;
   }
   const size_t n = std::min(bufsize - 1, s.size());
   std::memcpy(buf, s.data(), n);
   buf[n] = '\0';
   return s.size() < bufsize ? DGFCT_OK : DGFCT_ERR_INVALID_ARGUMENT;
}

} // namespace

extern "C" {

const char *dgfct_status_string(dgfct_status status)
{
   switch (status)
   {
      case DGFCT_OK: return "ok";
      case DGFCT_ERR_INVALID_ARGUMENT: return "invalid argument";
      case DGFCT_ERR_PARSE: return "parse error";
      case DGFCT_ERR_UNKNOWN_KEY: return "unknown configuration key";
      case DGFCT_ERR_UNKNOWN_PROBLEM: return "unknown problem";
      case DGFCT_ERR_GEOMETRY: return "geometry error";
      case DGFCT_ERR_INADMISSIBLE_STATE: return "inadmissible state";
      case DGFCT_ERR_CFL: return "step-size bound violated";
      case DGFCT_ERR_INVARIANT_VIOLATION: return "invariant violation";
      case DGFCT_ERR_IO: return "i/o error";
      case DGFCT_ERR_INTERNAL: return "internal error";
   }
   return "unknown status";
}

const char *dgfct_last_error(void) { return g_last_error.c_str(); }

const char *dgfct_version(void) { return "0.1.0"; }

dgfct_status dgfct_config_create(dgfct_config **cfg)
{
   if (cfg == nullptr) { return DGFCT_ERR_INVALID_ARGUMENT; }
   return guarded([&] { *cfg = new dgfct_config(); });
}

dgfct_status dgfct_config_load(dgfct_config *cfg, const char *path)
{
   if (cfg == nullptr || path == nullptr)
   {
      return DGFCT_ERR_INVALID_ARGUMENT;
   }
   return guarded([&] { cfg->cfg = Config::load(path); });
}

dgfct_status dgfct_config_set(dgfct_config *cfg, const char *key,
                              const char *value)
{
   if (cfg == nullptr || key == nullptr || value == nullptr)
   {
      return DGFCT_ERR_INVALID_ARGUMENT;
   }
   return guarded([&] { cfg->cfg.set(key, value); });
}

dgfct_status dgfct_config_override(dgfct_config *cfg, const char *arg)
{
   if (cfg == nullptr || arg == nullptr)
   {
      return DGFCT_ERR_INVALID_ARGUMENT;
   }
   return guarded([&] { cfg->cfg.apply_override(arg); });
}

void dgfct_config_destroy(dgfct_config *cfg) { delete cfg; }

dgfct_status dgfct_run_execute(const dgfct_config *cfg, dgfct_run **run)
{
   if (cfg == nullptr || run == nullptr)
   {
      return DGFCT_ERR_INVALID_ARGUMENT;
   }
   *run = nullptr;
   dgfct_status st = guarded([&]
   {
      auto *r = new dgfct_run();
      try
      {
         r->report = run_from_config(cfg->cfg);
         r->text = format_report(r->report);
      }
      catch (...)
      {
         delete r;
         throw;
      }
      *run = r;
   });
   if (st != DGFCT_OK) { return st; }
   if ((*run)->report.invariant_violations > 0)
   {
      g_last_error = "run completed with invariant violations";
      return DGFCT_ERR_INVARIANT_VIOLATION;
   }
   return DGFCT_OK;
}

dgfct_status dgfct_run_report(const dgfct_run *run, const char *key,
                              double *value)
{
   if (run == nullptr || key == nullptr || value == nullptr)
   {
      return DGFCT_ERR_INVALID_ARGUMENT;
   }
   const RunReport &r = run->report;
   const std::string k(key);
   auto comp_key = [&](const char *prefix, const std::array<double, max_comp> &a,
                       bool need_norms) -> bool
   {
      const size_t n = std::strlen(prefix);
      if (k.rfind(prefix, 0) != 0 || k.size() != n + 1) { return false; }
      const int c = k[n] - '0';
      if (c < 0 || c >= r.ncomp || (need_norms && !r.has_norms))
      {
         return false;
      }
      *value = a[c];
      return true;
   };
   if (comp_key("l1_error_", r.l1, true)) { return DGFCT_OK; }
   if (comp_key("l2_error_", r.l2, true)) { return DGFCT_OK; }
   if (comp_key("linf_error_", r.linf, true)) { return DGFCT_OK; }
   if (comp_key("umin_", r.umin, false)) { return DGFCT_OK; }
   if (comp_key("umax_", r.umax, false)) { return DGFCT_OK; }
   if (k == "mass_drift_per_step") { *value = r.mass_drift_per_step; return DGFCT_OK; }
   if (k == "steps") { *value = double(r.steps); return DGFCT_OK; }
   if (k == "dof") { *value = double(r.dof); return DGFCT_OK; }
   if (k == "invariant_violations")
   {
      *value = double(r.invariant_violations);
      return DGFCT_OK;
   }
   if (k == "wall_time") { *value = r.wall_time; return DGFCT_OK; }
   if (k == "end_time") { *value = r.end_time; return DGFCT_OK; }
   g_last_error = "unknown report key '" + k + "'";
   return DGFCT_ERR_INVALID_ARGUMENT;
}

dgfct_status dgfct_run_report_text(const dgfct_run *run, char *buf,
                                   size_t bufsize)
{
   if (run == nullptr) { return DGFCT_ERR_INVALID_ARGUMENT; }
   return copy_out(run->text, buf, bufsize);
}

void dgfct_run_destroy(dgfct_run *run) { delete run; }

dgfct_status dgfct_convergence(const dgfct_config *cfg, int levels,
                               double *l1_errors, double *rates, double *slope)
{
   if (cfg == nullptr || levels < 1) { return DGFCT_ERR_INVALID_ARGUMENT; }
   return guarded([&]
   {
      double sl = 0.0;
      auto rows = convergence_from_config(cfg->cfg, levels, sl);
      for (int l = 0; l < levels; l++)
      {
         if (l1_errors) { l1_errors[l] = rows[l].l1; }
         if (rates) { rates[l] = rows[l].rate; }
      }
      if (slope) { *slope = sl; }
   });
}

dgfct_status dgfct_list_problems(char *buf, size_t bufsize)
{
   std::string all;
   for (const std::string &p : list_problems())
   {
      all += p;
      all += "\n";
   }
   return copy_out(all, buf, bufsize);
}

} // extern "C"
