#include "parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace dgfct
{

namespace
{
int resolve_default()
{
   if (const char *env = std::getenv("DGFCT_NUM_THREADS"))
   {
      int n = std::atoi(env);
      if (n > 0) { return n; }
   }
   unsigned hw = std::thread::hardware_concurrency();
   return hw > 0 ? int(hw) : 1;
}

int g_threads = 0;
}

void set_num_threads(int n)
{
   g_threads = std::max(0, n);
}

int num_threads()
{
   if (g_threads == 0) { g_threads = resolve_default(); }
   return g_threads;
}

} // namespace dgfct
