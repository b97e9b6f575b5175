#ifndef DGFCT_CONFIG_HPP
#define DGFCT_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "common.hpp"

namespace dgfct
{

// Flat key = value run configuration: a text file plus command-line
// overrides. Unknown keys are rejected at set time.
class Config
{
public:
   Config();

   static Config load(const std::string &path);
   void set(const std::string &key, const std::string &value);
   // accepts "--key=value" or "key=value"
   void apply_override(const std::string &arg);

   bool has(const std::string &key) const;
   std::string get(const std::string &key, const std::string &dflt = "") const;
   int get_int(const std::string &key, int dflt) const;
   double get_double(const std::string &key, double dflt) const;
   bool get_flag(const std::string &key, bool dflt) const;

   const std::map<std::string, std::string> &entries() const { return kv_; }
   std::string dump() const;

private:
   std::map<std::string, std::string> kv_;
};

} // namespace dgfct

#endif
