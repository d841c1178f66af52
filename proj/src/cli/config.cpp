#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "qdyn/cli.hpp"
#include "qdyn/errors.hpp"

namespace qdyn::cli {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_double(const std::string& key, const std::string& s) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw DomainError("config: bad number for " + key + ": " + s);
  return x;
}

long to_long(const std::string& key, const std::string& s) {
  long x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw DomainError("config: bad integer for " + key + ": " + s);
  return x;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::pair<std::string, std::string>> fields(const RunConfig& c) {
  std::string plist;
  for (std::size_t i = 0; i < c.p.size(); ++i) plist += (i ? "," : "") + num(c.p[i]);
  return {
      {"command", c.command},
      {"check", c.check},
      {"model", to_string(c.model)},
      {"lambda", num(c.lambda)},
      {"geometry", to_string(c.geometry)},
      {"k", std::to_string(c.k)},
      {"mmax", std::to_string(c.mmax)},
      {"samples", std::to_string(c.samples)},
      {"E", c.has_energy ? num(c.energy) : "none"},
      {"alpha", num(c.alpha)},
      {"T", num(c.T)},
      {"Tmin", num(c.Tmin)},
      {"Tmax", num(c.Tmax)},
      {"per_decade", std::to_string(c.per_decade)},
      {"p", plist},
      {"window", std::to_string(c.window)},
      {"bound", c.bound},
      {"eta", num(c.eta)},
      {"tol_edge", num(c.tol_edge)},
      {"tol_slope", num(c.tol_slope)},
      {"tol_l1", num(c.tol_l1)},
      {"budget", num(c.budget)},
      {"out", c.out},
      {"threads", std::to_string(c.threads)},
  };
}

}  // namespace

void RunConfig::validate() const {
  static const char* kCommands[] = {"spectrum", "trace", "verify", "dynamics", "powerlaw", "potential"};
  bool known = false;
  for (const char* name : kCommands) known = known || command == name;
  if (!known) throw DomainError("unknown command '" + command + "'");
  if (model != Model::Free && !(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (k < 0 || k > 40) throw DomainError("k must lie in [0, 40]");
  if (mmax < 2 || mmax > 40) throw DomainError("mmax must lie in [2, 40]");
  if (samples < 1) throw DomainError("samples must be positive");
  if (!(T > 0.0) || !(Tmin > 0.0) || !(Tmax > Tmin)) throw DomainError("need 0 < Tmin < Tmax and T > 0");
  if (per_decade < 1) throw DomainError("per_decade must be positive");
  if (p.empty()) throw DomainError("p list is empty");
  for (double x : p)
    if (!(x > 0.0)) throw DomainError("moment orders must be positive");
  if (window < 0) throw DomainError("window must be nonnegative");
  if (!(eta >= 0.0)) throw DomainError("eta must be nonnegative");
  if (!(tol_edge > 0.0) || !(tol_slope >= 0.0) || !(tol_l1 > 0.0)) throw DomainError("tolerances must be positive");
  if (!(budget > 0.0)) throw DomainError("budget must be positive");
  if (threads < 1 || threads > 256) throw DomainError("threads must lie in [1, 256]");
}

std::string to_text(const RunConfig& cfg) {
  std::string s;
  for (const auto& [k, v] : fields(cfg)) s += k + " = " + v + "\n";
  return s;
}

RunConfig parse_text(const std::string& text, RunConfig c) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> set{
      {"command", [&](auto&, auto& v) { c.command = v; }},
      {"check", [&](auto&, auto& v) { c.check = v; }},
      {"model", [&](auto&, auto& v) { c.model = parse_model(v); }},
      {"lambda", [&](auto& k, auto& v) { c.lambda = to_double(k, v); }},
      {"geometry", [&](auto&, auto& v) { c.geometry = parse_geometry(v); }},
      {"k", [&](auto& k, auto& v) { c.k = static_cast<int>(to_long(k, v)); }},
      {"mmax", [&](auto& k, auto& v) { c.mmax = static_cast<int>(to_long(k, v)); }},
      {"samples", [&](auto& k, auto& v) { c.samples = static_cast<int>(to_long(k, v)); }},
      {"E", [&](auto& k, auto& v) {
         c.has_energy = v != "none" && !v.empty();
         c.energy = c.has_energy ? to_double(k, v) : 0.0;
       }},
      {"alpha", [&](auto& k, auto& v) { c.alpha = to_double(k, v); }},
      {"T", [&](auto& k, auto& v) { c.T = to_double(k, v); }},
      {"Tmin", [&](auto& k, auto& v) { c.Tmin = to_double(k, v); }},
      {"Tmax", [&](auto& k, auto& v) { c.Tmax = to_double(k, v); }},
      {"per_decade", [&](auto& k, auto& v) { c.per_decade = static_cast<int>(to_long(k, v)); }},
      {"p", [&](auto& k, auto& v) {
         c.p.clear();
         std::stringstream ss(v);
         for (std::string item; std::getline(ss, item, ',');) c.p.push_back(to_double(k, trim(item)));
       }},
      {"window", [&](auto& k, auto& v) { c.window = to_long(k, v); }},
      {"bound", [&](auto&, auto& v) { c.bound = v; }},
      {"eta", [&](auto& k, auto& v) { c.eta = to_double(k, v); }},
      {"tol_edge", [&](auto& k, auto& v) { c.tol_edge = to_double(k, v); }},
      {"tol_slope", [&](auto& k, auto& v) { c.tol_slope = to_double(k, v); }},
      {"tol_l1", [&](auto& k, auto& v) { c.tol_l1 = to_double(k, v); }},
      {"budget", [&](auto& k, auto& v) { c.budget = to_double(k, v); }},
      {"out", [&](auto&, auto& v) { c.out = v; }},
      {"threads", [&](auto& k, auto& v) { c.threads = static_cast<std::size_t>(to_long(k, v)); }},
  };
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto it = set.find(key);
    if (it == set.end()) throw DomainError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    it->second(key, value);
  }
  return c;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [k, v] : fields(cfg)) {
    if (k == "threads" || k == "out") continue;
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string config_hash_hex(const RunConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

}  // namespace qdyn::cli
