#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace dgfct
{

namespace
{

const std::set<std::string> &known_keys()
{
   static const std::set<std::string> keys =
   {
      "problem", "degree", "elements", "elements_x", "elements_y",
      "mapping", "mapping_amplitude",
      "cfl", "end_time", "dt", "steps_max",
      "integrator", "limiter", "smoothness", "s0", "kappa",
      "bounds_source", "wave_speed", "low_order_operator", "euler_entropy",
      "gamma", "global_min", "global_max",
      "threads", "monitor",
      "output_dir", "write_fields", "write_vtk",
      "use_reference", "reference_elements", "cache_dir",
   };
   return keys;
}

std::string trim(const std::string &s)
{
   size_t a = s.find_first_not_of(" \t\r\n");
   if (a == std::string::npos) { return ""; }
   size_t b = s.find_last_not_of(" \t\r\n");
   return s.substr(a, b - a + 1);
}

} // namespace

Config::Config() = default;

Config Config::load(const std::string &path)
{
   std::ifstream in(path);
   require(bool(in), errc::io, "cannot open config file '" + path + "'");
   Config cfg;
   std::string line;
   int lineno = 0;
   while (std::getline(in, line))
   {
      lineno++;
      size_t hash = line.find('#');
      if (hash != std::string::npos) { line = line.substr(0, hash); }
      line = trim(line);
      if (line.empty()) { continue; }
      size_t eq = line.find('=');
      require(eq != std::string::npos, errc::parse,
              path + ":" + std::to_string(lineno) + ": expected key = value");
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
   }
   return cfg;
}

void Config::set(const std::string &key, const std::string &value)
{
   require(known_keys().count(key) != 0, errc::unknown_key,
           "unknown configuration key '" + key + "'");
   kv_[key] = value;
}

void Config::apply_override(const std::string &arg)
{
   std::string s = arg;
   if (s.rfind("--", 0) == 0) { s = s.substr(2); }
   size_t eq = s.find('=');
   require(eq != std::string::npos, errc::parse,
           "override '" + arg + "' is not of the form key=value");
   set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
}

bool Config::has(const std::string &key) const { return kv_.count(key) != 0; }

std::string Config::get(const std::string &key, const std::string &dflt) const
{
   auto it = kv_.find(key);
   return it == kv_.end() ? dflt : it->second;
}

int Config::get_int(const std::string &key, int dflt) const
{
   auto it = kv_.find(key);
   if (it == kv_.end()) { return dflt; }
   try { return std::stoi(it->second); }
   catch (...) { fail(errc::parse, "key '" + key + "': expected an integer"); }
}

double Config::get_double(const std::string &key, double dflt) const
{
   auto it = kv_.find(key);
   if (it == kv_.end()) { return dflt; }
   try { return std::stod(it->second); }
   catch (...) { fail(errc::parse, "key '" + key + "': expected a number"); }
}

bool Config::get_flag(const std::string &key, bool dflt) const
{
   auto it = kv_.find(key);
   if (it == kv_.end()) { return dflt; }
   const std::string &v = it->second;
   if (v == "on" || v == "true" || v == "1" || v == "yes") { return true; }
   if (v == "off" || v == "false" || v == "0" || v == "no") { return false; }
   fail(errc::parse, "key '" + key + "': expected on/off");
}

std::string Config::dump() const
{
   std::ostringstream os;
   for (const auto &[k, v] : kv_) { os << k << " = " << v << "\n"; }
   return os.str();
}

} // namespace dgfct
