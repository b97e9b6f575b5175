#ifndef DGFCT_PROBLEMS_HPP
#define DGFCT_PROBLEMS_HPP

#include <functional>
#include <string>
#include <vector>

#include "solver.hpp"

namespace dgfct
{

// A benchmark problem: model, mesh defaults, initial data, boundary
// closures, optional exact solution.
struct ProblemSetup
{
   std::string name;
   std::string description;
   Model model;
   MeshSpec mesh;                     // n[] holds the default resolution
   double end_time = 1.0;
   std::function<StateVec(const double *)> initial;
   std::array<BoundaryClosure, 4> bcs{};
   std::function<StateVec(const double *, double)> exact;   // may be empty
   bool smoothness_default = false;
   int reference_elements = 0;        // degree-0 reference resolution
};

struct ProblemParams
{
   double gamma = 1.4;
};

ProblemSetup make_problem(const std::string &name,
                          const ProblemParams &params = {});
std::vector<std::string> list_problems();

} // namespace dgfct

#endif
