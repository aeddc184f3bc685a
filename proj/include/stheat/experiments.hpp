#pragma once

#include <filesystem>

#include "stheat/config.hpp"
#include "stheat/report.hpp"

namespace stheat {

/// E[int ||U1||_V^2 + max_n ||U2(t_n)||_H^2] against
/// E[int ||f||_{V*}^2 + ||U0||_H^2 + int ||Psi Q^{1/2}||^2], plus the weak
/// residual, the integral identity of U2 and the version gap on every path.
Report run_energy_bound(const ExperimentConfig& cfg);

/// Beta-weighted energy statistic at each J in grid.j_levels (default J, 2J)
/// with independent paths per level, and the growth of the coupling series
/// sum_j lambda_j^{beta-1} gamma_j.
Report run_regularity(const ExperimentConfig& cfg);

/// Shared-noise distance between the space-time solution and the exact mild
/// solution at each N in grid.n_levels (default N, 2N, 4N, 8N), plus the
/// noise-free refinement with U0 (phi_1 when unset). Rejects random kappa.
Report run_mild_equivalence(const ExperimentConfig& cfg);

/// Discrete inf-sup and boundedness constants over kappas x betas x sizes.
Report run_infsup_sweep(const ExperimentConfig& cfg);

/// Both stochastic convolution inequalities: analytic on random
/// (lambda, gamma, T) triples and the configured spectrum, Monte Carlo for the
/// maximal inequality at N and 2N.
Report run_lemma_constants(const ExperimentConfig& cfg);

/// Picard solves of the multiplicative problem on every path: convergence,
/// contraction ratios, E||U(T)||^2 (with the closed form when J = 1), the
/// Hoelder estimate, and direct versus two-segment continuation.
Report run_multiplicative(const ExperimentConfig& cfg);

/// Moments of the sampled noise against their exact values, and the Ito
/// isometry for sum_j psi_j W_j(T).
Report run_noise_summary(const ExperimentConfig& cfg);

/// Writes <dir>/noise.csv and <dir>/noise_<path>.bin for each configured path.
void write_noise_dump(const ExperimentConfig& cfg, const std::filesystem::path& dir);

/// Dispatches on cfg.name.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace stheat
