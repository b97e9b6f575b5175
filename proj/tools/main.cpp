// Command-line driver for the dgfct shared library. Subcommands:
//   run <config> [--key=value ...]
//   convergence <config> --levels N [--key=value ...]
//   list-problems
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "dgfct.h"

namespace
{

int fail_status(dgfct_status st)
{
   std::fprintf(stderr, "error: %s", dgfct_status_string(st));
   const char *msg = dgfct_last_error();
   if (msg != nullptr && msg[0] != '\0')
   {
      std::fprintf(stderr, " (%s)", msg);
   }
   std::fprintf(stderr, "\n");
   return int(st);
}

void usage()
{
   std::printf(
      "usage:\n"
      "  dgfct run <config> [--key=value ...]\n"
      "  dgfct convergence <config> [--levels N] [--key=value ...]\n"
      "  dgfct list-problems\n"
      "\n"
      "Configs are flat key = value files; every key can be overridden on\n"
      "the command line. See README.md for the key reference.\n");
}

struct ConfigHandle
{
   dgfct_config *cfg = nullptr;
   ~ConfigHandle() { dgfct_config_destroy(cfg); }
};

int cmd_run(const std::string &path, const std::vector<std::string> &overrides)
{
   ConfigHandle h;
   dgfct_status st = dgfct_config_create(&h.cfg);
   if (st != DGFCT_OK) { return fail_status(st); }
   st = dgfct_config_load(h.cfg, path.c_str());
   if (st != DGFCT_OK) { return fail_status(st); }
   for (const std::string &o : overrides)
   {
      st = dgfct_config_override(h.cfg, o.c_str());
      if (st != DGFCT_OK) { return fail_status(st); }
   }
   dgfct_run *run = nullptr;
   st = dgfct_run_execute(h.cfg, &run);
   if (run != nullptr)
   {
      char buf[8192];
      if (dgfct_run_report_text(run, buf, sizeof(buf)) == DGFCT_OK)
      {
         std::fputs(buf, stdout);
      }
      dgfct_run_destroy(run);
   }
   if (st != DGFCT_OK) { return fail_status(st); }
   return 0;
}

int cmd_convergence(const std::string &path, int levels,
                    const std::vector<std::string> &overrides)
{
   ConfigHandle h;
   dgfct_status st = dgfct_config_create(&h.cfg);
   if (st != DGFCT_OK) { return fail_status(st); }
   st = dgfct_config_load(h.cfg, path.c_str());
   if (st != DGFCT_OK) { return fail_status(st); }
   for (const std::string &o : overrides)
   {
      st = dgfct_config_override(h.cfg, o.c_str());
      if (st != DGFCT_OK) { return fail_status(st); }
   }
   std::vector<double> l1(levels), rates(levels);
   double slope = 0.0;
   st = dgfct_convergence(h.cfg, levels, l1.data(), rates.data(), &slope);
   if (st != DGFCT_OK) { return fail_status(st); }
   std::printf("%10s  %14s  %8s\n", "levels", "L1 error", "rate");
   for (int l = 0; l < levels; l++)
   {
      if (l == 0) { std::printf("%10d  %14.6e  %8s\n", l, l1[l], "---"); }
      else { std::printf("%10d  %14.6e  %8.2f\n", l, l1[l], rates[l]); }
   }
   std::printf("least-squares slope: %.3f\n", slope);
   return 0;
}

} // namespace

int main(int argc, char **argv)
{
   std::vector<std::string> args(argv + 1, argv + argc);
   if (args.empty()) { usage(); return 1; }
   const std::string cmd = args[0];

   if (cmd == "list-problems")
   {
      char buf[4096];
      dgfct_status st = dgfct_list_problems(buf, sizeof(buf));
      if (st != DGFCT_OK) { return fail_status(st); }
      std::fputs(buf, stdout);
      return 0;
   }
   if (cmd == "run" || cmd == "convergence")
   {
      if (args.size() < 2) { usage(); return 1; }
      const std::string path = args[1];
      int levels = 4;
      std::vector<std::string> overrides;
      for (size_t i = 2; i < args.size(); i++)
      {
         if (args[i] == "--levels" && i + 1 < args.size())
         {
            levels = std::atoi(args[++i].c_str());
         }
         else if (args[i].rfind("--levels=", 0) == 0)
         {
            levels = std::atoi(args[i].c_str() + 9);
         }
         else { overrides.push_back(args[i]); }
      }
      return cmd == "run" ? cmd_run(path, overrides)
             : cmd_convergence(path, levels, overrides);
   }
   if (cmd == "--help" || cmd == "-h" || cmd == "help")
   {
      usage();
      return 0;
   }
   std::fprintf(stderr, "unknown command '%s'\n", cmd.c_str());
   usage();
   return 1;
}
