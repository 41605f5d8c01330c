#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace irsfd {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Link direction: downlink (BS to user) or uplink (user to BS).
enum class Link { downlink, uplink };

inline const char* to_string(Link l) { return l == Link::downlink ? "downlink" : "uplink"; }

/// Decision variables: BS precoder F (N_t x K, column k serves user k) and
/// IRS reflection vector phi (M entries, unit modulus when feasible).
struct BeamState {
  CMat f;
  CVec phi;
};

/// WMMSE auxiliaries: scalar downlink decoders, uplink receive vectors and
/// the MSE weights of both links.
struct AuxState {
  std::vector<cd> u_d;
  std::vector<CVec> u_u;
  std::vector<double> w_d;
  std::vector<double> w_u;
};

/// Invalid argument to a mathematical operation (negative distance, zero
/// receiver, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation produced a non-finite or inaccurate result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value violates its documented constraint. `field()` names
/// the offending key so that CLI diagnostics can point at it.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace irsfd
