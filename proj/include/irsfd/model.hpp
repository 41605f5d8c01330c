#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "irsfd/rng.hpp"
#include "irsfd/types.hpp"

namespace irsfd {

/// Scalar parameters of one simulated system. All units SI (watts, hertz);
/// rates are in nats.
struct SystemConfig {
  int n_tx = 4;          // BS transmit antennas
  int n_rx = 4;          // BS receive antennas
  int n_users = 3;       // K
  int n_elements = 16;   // IRS elements M
  double p_max = 1.0;    // BS power budget
  std::vector<double> p_user{0.05, 0.05, 0.05};
  double rho_s = 1.0;    // residual self-interference coefficient
  // Effective noise powers; loop interference is folded in (1.1 x thermal).
  std::vector<double> noise_user;
  double noise_bs = 0.0;
  std::vector<double> weights_dl{1.0, 1.0, 1.0};
  std::vector<double> weights_ul{1.0, 1.0, 1.0};
  double mu0 = 5.0;
  double iota = 1.02;
  double mu_max = 500.0;
  double eps = 1e-6;
  int n_max = 200;
  double rician_kappa = 3.0;
  double pl_exponent_irs = 2.2;
  double bandwidth_hz = 10e6;
  double socp_tol = 1e-7;
  std::uint64_t seed = 1;
};

using Point2 = std::array<double, 2>;

struct Geometry {
  Point2 bs_xy{0.0, 0.0};
  Point2 irs_xy{10.0, 20.0};
  std::vector<Point2> user_xy;
  double bs_height = 30.0;
  double irs_height = 10.0;
  double user_height = 1.5;
};

/// One realization of every channel. G_t is BS->IRS (M x N_t), G_r is the
/// IRS-BS receive array (M x N_r, used as G_r^H), h_t[k] is user k -> IRS and
/// h_r[k] is IRS -> user k (both length M).
struct ChannelSet {
  CMat g_t;
  CMat g_r;
  std::vector<CVec> h_t;
  std::vector<CVec> h_r;
};

/// Thermal noise power in watts for the given bandwidth at -174 dBm/Hz.
double thermal_noise_watts(double bandwidth_hz, double density_dbm_hz = -174.0);

/// Effective noise used in the simulations: thermal noise times 1.1, the
/// residual interference-cancellation margin.
double effective_noise_watts(double bandwidth_hz);

/// Default parameter set: K = 3, N_t = N_r = 4, M = 16, 10 MHz, P_max = 1 W,
/// P_k = 50 mW, kappa = 3, alpha = 2.2, mu = 5, iota = 1.02, mu_max = 500.
SystemConfig default_config();

/// Resizes per-user lists to n_users (broadcasting the first entry) and
/// recomputes the noise powers from the bandwidth.
SystemConfig with_users(SystemConfig cfg, int n_users);

/// Throws ConfigError naming the first violated field.
void validate(const SystemConfig& cfg);
void validate(const Geometry& geo, int n_users);

/// BS at (0,0), IRS at (x_irs, 20), users uniform in the 40 m x 20 m
/// rectangle centred at (120, 0). Draws 2 uniforms per user (x then y).
Geometry random_geometry(int n_users, double x_irs, Rng& rng);

/// Users pinned at (100,10), (120,0), (140,-10) (requires n_users == 3).
Geometry fixed_user_geometry(double x_irs);

double distance_3d(const Point2& a, double ha, const Point2& b, double hb);

/// Large-scale path loss in dB: -30 - 10 * exponent * log10(d).
double path_loss_db(double exponent, double distance_m);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Uniform linear array response exp(j*pi*w*sin(angle)), w = 0..count-1.
CVec steering_vector(int count, double angle);

/// sqrt(kappa/(kappa+1)) * los + sqrt(1/(kappa+1)) * CN(0,1) entries.
/// The scattered part is drawn in column-major order.
CMat rician_matrix(const CMat& los, double kappa, Rng& rng);

/// Draws a full channel realization. Consumption order: G_t (AoA, AoD,
/// scattered entries), G_r (AoA, AoD, scattered), then h_t[0..K), then
/// h_r[0..K) (one angle and M scattered entries each).
ChannelSet generate_channels(const SystemConfig& cfg, const Geometry& geo, Rng& rng);

/// Random feasible start: phi entries exp(j*theta), theta ~ U[0, 2pi), then
/// Gaussian F scaled so that Tr[F^H F] = P_max.
BeamState init_state(const SystemConfig& cfg, Rng& rng);

}  // namespace irsfd
