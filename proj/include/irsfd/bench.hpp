#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsfd/mm.hpp"
#include "irsfd/model.hpp"
#include "irsfd/rng.hpp"
#include "irsfd/types.hpp"

namespace irsfd {

enum class Scheme { bcd_mm, bcd_socp, socp_mm, rand_phase, two_bit };

const char* to_string(Scheme s);
/// Throws ConfigError("scheme", ...) for unknown names.
Scheme parse_scheme(const std::string& name);

/// Nearest of {0, pi/2, pi, 3pi/2} on the circle; exact ties go to the
/// smaller angle.
CVec quantize_phases_2bit(const CVec& phi);

struct ExperimentRecord {
  std::string scheme;
  std::string variable;
  std::string value;  // label of the swept value
  double number = 0.0;
  std::uint64_t seed = 0;
  double final_wmr = 0.0;
  int iters = 0;
  double wall_ms = 0.0;
  bool failed = false;
  std::string error;
};

/// Runs one scheme from `init`:
///   bcd_mm, bcd_socp  the two joint optimizers
///   socp_mm           MM phase steps with the convex precoder step
///   rand_phase        precoder-only MM with phi frozen at init
///   two_bit           bcd_mm, 2-bit quantization of phi, then precoder-only
///                     MM from the converged precoder
RunTrace run_scheme_trace(Scheme s, const SystemConfig& cfg, const ChannelSet& ch,
                          const BeamState& init);

/// Draws the initial state from `rng` and runs the scheme.
ExperimentRecord run_scheme(Scheme s, const SystemConfig& cfg, const ChannelSet& ch, Rng& rng);

/// Runs several schemes from a shared start; bcd_mm is computed once and
/// reused as the first stage of two_bit.
std::vector<ExperimentRecord> run_schemes(const std::vector<Scheme>& schemes,
                                          const SystemConfig& cfg, const ChannelSet& ch,
                                          const BeamState& init);

/// Exhaustive search over grid^M phase vectors with a precoder-only loop
/// (convex precoder step, started from maximum-ratio transmission) for each.
/// Requires M <= 3 and grid <= 64; returns the best weighted minimum rate.
double brute_force_oracle(const SystemConfig& cfg, const ChannelSet& ch, int grid_per_element);

/// -60 - 10 a log10(x_irs) - 10 a log10(x_uec - x_irs), in dB.
double approx_large_scale_gain(double x_irs, double x_uec, double exponent);

enum class SweepVariable { x_irs, rho_s, weights, pl_exponent, rician_kappa, n_elements };

const char* to_string(SweepVariable v);
SweepVariable parse_variable(const std::string& name);

/// Numeric values carry their number; weight patterns carry a label
/// ("U2D1", "U1D1", "U1D2", "equal", "user2_active") and number 0.
struct SweepValue {
  std::string label;
  double number = 0.0;
};

struct SweepSpec {
  SweepVariable variable = SweepVariable::x_irs;
  std::vector<SweepValue> values;
  int realizations = 1;
  std::vector<Scheme> schemes{Scheme::bcd_mm};
  SystemConfig base_config = default_config();
  Geometry base_geometry;  // user positions ignored; drawn per realization
  std::uint64_t seed = 1;
};

struct SummaryRow {
  std::string scheme;
  std::string value;
  double number = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  int n = 0;
  int failures = 0;
};

struct SweepResult {
  std::vector<ExperimentRecord> records;
  std::vector<SummaryRow> summary;
};

/// Applies one swept value to a base configuration/geometry. Returns true if
/// users sit at the fixed coordinates instead of being drawn at random.
bool apply_sweep_value(SweepVariable v, const SweepValue& value, SystemConfig& cfg,
                       Geometry& geo);

/// Deterministic sweep: realization r of value i uses sub-seed
/// derive_seed(seed, {i, r}) for geometry and channels and
/// derive_seed(sub, {1}) for the shared initial state. Records come back in
/// (value, realization, scheme) order regardless of `threads`.
SweepResult run_sweep(const SweepSpec& spec, int threads = 1);

/// Mean and standard error of the finite entries.
SummaryRow summarize(const std::vector<double>& values);

}  // namespace irsfd
