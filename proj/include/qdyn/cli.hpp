#pragma once

// Command-line front end: run configuration, its key=value file form, and
// the subcommands that write deterministic CSV/JSON outputs.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qdyn/lattice.hpp"

namespace qdyn::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kResource = 3 };

struct RunConfig {
  std::string command;  // spectrum | trace | verify | dynamics | powerlaw | potential
  std::string check;    // verify target
  Model model = Model::Fibonacci;
  double lambda = 1.0;
  Geometry geometry = Geometry::WholeLine;
  int k = 8;
  int mmax = 9;
  int samples = 200;
  double energy = 0.0;
  bool has_energy = false;
  double alpha = -1.0;         // powerlaw exponent; < 0 selects the model default
  double T = 50.0;             // single-T checks
  double Tmin = 10.0;
  double Tmax = 1000.0;
  int per_decade = 6;
  std::vector<double> p{2.0};
  long window = 0;             // 0 selects the automatic window
  std::string bound;           // empty selects the model default
  double eta = 0.0;
  double tol_edge = 1e-10;
  double tol_slope = 0.15;
  double tol_l1 = 0.02;
  double budget = 2e9;         // max Tmax * window sites for dynamics
  std::string out;             // output prefix; empty writes JSON to stdout
  std::size_t threads = 1;

  /// Throws DomainError on out-of-range values.
  void validate() const;
};

/// Flat `key = value` lines, one per field, in a fixed order.
std::string to_text(const RunConfig& cfg);

/// Applies the keys present in `text` on top of `base`. Unknown keys throw.
RunConfig parse_text(const std::string& text, RunConfig base = {});

/// FNV-1a over the file form without threads and output paths.
std::uint64_t config_hash(const RunConfig& cfg);
std::string config_hash_hex(const RunConfig& cfg);

/// Runs a validated configuration. Results go to files when cfg.out is set,
/// else to `out`. Returns an ExitCode.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line handling (flags, --config, error records, exit codes).
int main_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qdyn::cli
