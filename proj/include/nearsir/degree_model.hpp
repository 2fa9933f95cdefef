#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nearsir {

//! Per-degree vertex counts split by epidemic state, plus the two rates.
//! Index k of each vector holds the number of vertices of degree k in that
//! state. This is the whole static input of the model: every analytic
//! quantity below is a function of it.
struct DegreeConfiguration {
    std::vector<std::int64_t> n_s; // susceptible vertices by degree
    std::vector<std::int64_t> n_i; // infective vertices by degree
    std::vector<std::int64_t> n_r; // recovered vertices by degree
    double beta = 1.0;             // per-edge infection rate, > 0
    double rho = 1.0;              // recovery rate, >= 0

    std::int64_t count_susceptible() const;
    std::int64_t count_infective() const;
    std::int64_t count_recovered() const;
    std::int64_t count_vertices() const;
    std::int64_t total_degree() const;    // sum of k * n_k over all states
    std::int64_t x_i0() const;            // initially infective half-edges
    int max_degree() const;               // highest degree with a nonzero count
    int max_susceptible_degree() const;
    int max_infective_degree() const;

    //! Throws BadConfig / OddTotalDegree when the counts cannot describe a
    //! pairable vertex set (negative counts, empty, odd total degree).
    void validate() const;
};

//! Empirical factorial moments of the susceptible degree distribution,
//! plus the two whole-graph summaries the criticality formulas need.
struct MomentSummary {
    double lambda = 0;             // mean susceptible degree
    double lambda2 = 0;            // E D_S (D_S - 1)
    double lambda3 = 0;            // E D_S (D_S - 1)(D_S - 2)
    double mean_total_degree = 0;  // sum k n_k / n, all states
    double third_moment_bound = 0; // sum k^3 n_{S,k} / n_S
};

enum class Regime { NuZero, NuFinite, NuInfinite };

const char* regime_name(Regime r);

//! The nu proxy is a finite-n stand-in for an n->infinity limit, so the
//! regime split needs explicit cutoffs. These are artifact constants, echoed
//! into every report that uses them.
struct RegimeThresholds {
    double nu_zero_max = 0.01;
    double nu_infinite_min = 100.0;
};

//! Everything the near-critical theory derives from a configuration:
//! reproduction number, criticality measure, regime, and the constants that
//! enter the final-size and takeoff predictions.
struct CriticalityReport {
    double r0 = 0;        // mean secondary infections per case
    double alpha = 0;     // criticality measure, ~ (r0 - 1) * lambda2 near r0 = 1
    double alpha_bar = 0; // scale of the large-outbreak window; alpha except when nu = inf
    double nu = 0;        // X_{I,0} / (n_S alpha^2), finite-n proxy
    double pi = 0;        // beta / (beta + rho): P(a free infective half-edge pairs before recovery)
    double xi = 0;        // positive root of the drift quadratic f below
    double sigma2 = 0;    // variance constant of the takeoff walk
    double kappa = 0;     // exponent coefficient in the small-outbreak probability
    Regime regime = Regime::NuZero;
    MomentSummary moments;
    RegimeThresholds thresholds;

    //! Drift quadratic whose positive root is xi: nu + t - (lambda3/2) t^2 in
    //! the nu-finite regimes, 1 - (lambda3/2) t^2 when nu is infinite.
    double f(double t) const;
};

struct FinalSizePrediction {
    double predicted_size = 0;          // expected large-outbreak size (count scale)
    std::vector<double> degree_profile; // fraction of the outbreak at each degree
};

MomentSummary compute_moments(const DegreeConfiguration& config);

//! (beta/(rho+beta)) * sum (k-1)k n_{S,k} / sum k n_k
double compute_r0(const DegreeConfiguration& config);

//! -(1 + rho/beta) * sum k n_k / n_S + sum k(k-1) n_{S,k} / n_S
double compute_alpha(const DegreeConfiguration& config);

CriticalityReport compute_criticality(const DegreeConfiguration& config,
                                      const RegimeThresholds& thresholds = {});

FinalSizePrediction predict_final_size(const CriticalityReport& report,
                                       const DegreeConfiguration& config);

//! exp(-kappa * alpha * X_{I,0}), optionally corrected by the seed-degree
//! term sum_k n_{I,k} psi_n(k). Clamped to [0,1]. The asymptotic guarantee
//! behind the formula lives where alpha * X_{I,0} stays bounded and the nu
//! proxy is small; the value is still computed elsewhere (it decays toward 0
//! in the heavily seeded regimes, which is the right direction).
double predict_small_outbreak_probability(const CriticalityReport& report,
                                          const DegreeConfiguration& config,
                                          bool corrected);

//! log of the integral over [0,1] of exp(k alpha kappa / pi * (x^{beta/rho} -
//! rho/(beta+rho))). Zero when rho == 0 or k == 0; always >= 0 by Jensen.
double psi_n(int k, const CriticalityReport& report, const DegreeConfiguration& config);

struct Diagnostic {
    enum class Level { Pass, Warn, Fail };
    std::string name;
    double value = 0;
    Level level = Level::Pass;
    std::string note;
};

//! Finite-n proxies for the asymptotic assumptions the predictions lean on.
//! Diagnostics only: Warn/Fail flags, no exceptions. Fail marks a config the
//! near-critical theory does not cover at all (alpha <= 0, or no vertex of
//! degree >= 3 anywhere in the susceptible set).
std::vector<Diagnostic> validate_assumptions(const DegreeConfiguration& config);

} // namespace nearsir
