#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvnt/garch.hpp"
#include "mvnt/sampling.hpp"
#include "mvnt/statistics.hpp"

namespace mvnt {

/// A Monte Carlo table: row/column labelled values plus the seed and
/// replication bookkeeping needed to rerun it. Identical master seeds give
/// identical values for any worker count; wall_seconds is informational.
struct ExperimentReport {
    enum class Kind { critical, power, garch };
    Kind kind = Kind::critical;
    std::string title;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    Eigen::MatrixXd values;
    long replications = 0;
    std::uint64_t master_seed = 0;
    double wall_seconds = 0.0;

    std::string to_text() const;
    std::string to_csv() const;
    std::string to_json() const;  // sidecar with seeds and timing
};

/// Empirical upper-alpha quantile: the ceil(reps (1-alpha))-th order
/// statistic (at least the minimum). Sorts a copy.
double upper_quantile(std::vector<double> values, double alpha);

/// Critical points of (gamma/pi)^{d/2} T_{n,gamma} under the d-variate
/// standard normal: one row per (d, n, alpha), one column per gamma. Samples
/// are shared across gamma and alpha within a cell, mirroring the two-stage
/// table protocol.
ExperimentReport critical_table(const std::vector<int>& d_list, const std::vector<int>& n_list,
                                const std::vector<double>& gamma_list,
                                const std::vector<double>& alpha_list, int reps,
                                std::uint64_t master_seed, int threads = 0);

enum class PowerFamily { T, TtildeOne, TtildeTwo, HW };

/// Rejection percentages at level alpha against the listed alternatives
/// (their dimension field is re-bound to each d in d_list). Critical points
/// are simulated under the null with crit_reps replications on a seed class
/// derived from master_seed, then shared across alternatives.
ExperimentReport power_table(const std::vector<AlternativeSpec>& alternatives,
                             const std::vector<int>& d_list, int n,
                             const std::vector<double>& params,  // gamma, or beta for HW
                             double alpha, int reps, int crit_reps, PowerFamily family,
                             std::uint64_t master_seed, int threads = 0);

/// Warp-speed study of the GARCH Ttilde test: one bootstrap resample per
/// Monte Carlo sample, resampled statistics pooled into the null reference.
/// One row per alternative, one column per gamma. Failed replicates are
/// dropped; more than 5% aborts with BootstrapUnstable.
ExperimentReport warp_speed_garch(const GarchSpec& spec,
                                  const std::vector<AlternativeSpec>& alternatives, int n,
                                  const std::vector<double>& gamma_list, double alpha,
                                  int mc_reps, std::uint64_t master_seed, int threads = 0);

}  // namespace mvnt
