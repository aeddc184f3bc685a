#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "stheat/multiplicative.hpp"
#include "stheat/noise.hpp"
#include "stheat/problem.hpp"
#include "stheat/spectral.hpp"

namespace stheat {

/// Resolved experiment parameters. Read from an INI file with the sections
/// [experiment] [grid] [noise] [operator] [load] [regularity]
/// [multiplicative] [mc] [output]; every key is optional, unknown keys are
/// errors.
struct ExperimentConfig {
  // [experiment]
  std::string name = "energy";

  // [grid]
  std::size_t J = 16;
  std::size_t N = 128;
  double T = 1.0;
  std::vector<std::size_t> n_levels;  // refinement studies
  std::vector<std::size_t> j_levels;
  std::vector<std::pair<std::size_t, std::size_t>> sizes;  // (J, N) sweep points

  // [noise]
  double rho = 2.0;             // gamma_j = j^{-rho}
  std::vector<double> gammas;   // explicit spectrum, overrides rho
  NoiseBasis noise_basis = NoiseBasis::Sine;
  std::size_t noise_modes = 0;  // 0: same as J

  // [operator]
  std::string law = "constant";  // constant | uniform
  double kappa = 1.0;
  double a_min = 1.0;
  double a_max = 1.0;
  std::vector<double> kappas;    // infsup sweep

  // [load]
  std::vector<double> u0;        // leading coefficients, zero padded
  std::vector<double> f;         // constant-in-time source coefficients
  double psi = 1.0;              // Psi = psi * I unless psi_diag is given
  std::vector<double> psi_diag;

  // [regularity]
  double beta = 0.0;
  std::vector<double> betas;

  // [multiplicative]
  double g0 = 0.5;
  double p = 4.0;
  std::size_t m_colloc = 0;
  double tol = 1e-8;
  std::size_t max_iter = 100;
  std::string time_profile = "flat";  // flat | bump
  double bump_center = 0.5;
  double bump_width = 0.1;
  std::size_t segments = 1;

  // [mc]
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  std::uint64_t first_path = 0;
  std::size_t random_triples = 20;

  // [output]
  std::string out_dir = "out";

  /// Range checks; throws std::invalid_argument with the offending key.
  void validate() const;

  QSpec make_q(std::size_t J_override = 0) const;
  OperatorSpec make_operator() const;
  LoadSpec make_load(std::size_t J_override = 0) const;
  GSpec make_g() const;
};

/// Parses INI text. Throws std::invalid_argument on unknown sections or
/// keys, malformed values and failed validation.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

/// Canonical INI rendering of every field; parse_config inverts it.
std::string to_ini(const ExperimentConfig& cfg);
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace stheat
