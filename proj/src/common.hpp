#ifndef DGFCT_COMMON_HPP
#define DGFCT_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace dgfct
{

// Error categories mirrored by the C API status codes.
enum class errc
{
   invalid_argument,
   parse,
   unknown_key,
   unknown_problem,
   geometry,
   inadmissible_state,
   cfl_violation,
   invariant_violation,
   internal,
   io
};

class error : public std::runtime_error
{
public:
   error(errc c, const std::string &msg) : std::runtime_error(msg), code(c) { }
   errc code;
};

[[noreturn]] inline void fail(errc c, const std::string &msg)
{
   throw error(c, msg);
}

inline void require(bool ok, errc c, const std::string &msg)
{
   if (!ok) { fail(c, msg); }
}

constexpr int max_comp = 4;   // largest state size (2D Euler)
constexpr double infinity = std::numeric_limits<double>::infinity();
const double nan_value = std::numeric_limits<double>::quiet_NaN();

inline int ipow(int b, int e)
{
   int r = 1;
   for (int i = 0; i < e; i++) { r *= b; }
   return r;
}

inline double sqr(double x) { return x*x; }

} // namespace dgfct

#endif
