#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdsort/common.hpp"
#include "pdsort/exact_sort.hpp"
#include "pdsort/grid.hpp"
#include "pdsort/hj_solver.hpp"

namespace pdsort {

enum class AnalyticCaseId { f1_uniform, f2_gaussian, f3_punctured, f4_nonconvex };

/// A density with a known closed-form solution of the scheme's continuum
/// equation, dimension-generic. `density_bound` is the supremum of the
/// density over the sampling domain [0,1]^d (used for rejection sampling).
struct AnalyticCase {
    AnalyticCaseId id;
    std::string name;
    int dim;

    double density(std::span<const double> x) const;
    double solution(std::span<const double> x) const;

    /// True when sampling uses per-axis inverse CDFs (product densities
    /// integrating to one); otherwise rejection-thinning on [0,1]^d is used.
    bool separable_unit_mass() const;
    double density_bound() const;
};

AnalyticCase make_analytic_case(AnalyticCaseId id, int dim);
AnalyticCase make_analytic_case(const std::string& name, int dim);

/// (density(x), solution(x)) for x >= 0 componentwise.
std::pair<double, double> analytic_eval(const AnalyticCase& c, std::span<const double> x);

/// Density sampled at every grid node.
GridField density_grid(const AnalyticCase& c, const GridSpec& spec);

/// Draws a point process of intensity n * density. Unit-mass separable cases
/// return exactly n points via inverse CDFs; the others thin n * bound
/// uniform candidates on [0,1]^d, so the returned count is random with mean
/// n * (total mass). Norms against the continuum solution keep the requested
/// n in the normalization, which is what makes the comparison consistent for
/// densities whose restriction to [0,1]^d does not integrate to one.
PointCloud sample_case(const AnalyticCase& c, std::int64_t n, std::uint64_t seed);

/// Inverse error function (Newton refinement on std::erf).
double erf_inverse(double u);

/// Fraction of pairs ordered the same way by both rank vectors; pairs tied
/// in either vector count as unordered. O(n^2).
double accuracy_exact(std::span<const double> ranks_a, std::span<const double> ranks_b,
                      Exec exec = Exec::parallel);

struct AccuracyEstimate {
    double mean = 0.0;
    double ci95 = 0.0;
    std::vector<double> rep_estimates;
};

/// Monte-Carlo accuracy: `reps` independent estimates, each averaging over
/// `pairs` uniform random pairs i != j; reports the mean and the 95%
/// normal-approximation half-width across repetitions.
AccuracyEstimate accuracy_montecarlo(std::span<const double> ranks_a,
                                     std::span<const double> ranks_b,
                                     std::int64_t pairs, int reps, std::uint64_t seed,
                                     Exec exec = Exec::parallel);

/// Results of a convergence-rate sweep. `sizes` holds nodes-per-axis for the
/// scheme study and sample counts for the stochastic study; errors are means
/// over repetitions; alphas are the regression rates (positive = decaying).
struct ExperimentReport {
    std::string experiment;
    std::string case_name;
    int dim = 0;
    std::vector<double> sizes;
    std::vector<double> spacings;
    std::vector<double> l1_errors;
    std::vector<double> linf_errors;
    double alpha_l1 = 0.0;
    double alpha_linf = 0.0;
    double intercept_l1 = 0.0;
    double intercept_linf = 0.0;
    int reps = 1;
    std::uint64_t seed = 0;
};

std::string report_to_json(const ExperimentReport& report);

/// Solves the scheme per grid size and regresses node errors against the
/// spacing: L_inf is the max node error, L1 the cell-volume-weighted sum.
ExperimentReport pde_rate_experiment(const AnalyticCase& c,
                                     std::span<const std::int64_t> grid_sizes,
                                     const NodeSolveConfig& cfg, Exec exec = Exec::parallel);

/// Samples the case, exact-sorts, and regresses the discrete norms of
/// n^(-1/d) * depth - (c_d / d) * solution against n. Requires d = 2, the
/// only dimension beyond one with a known chain constant (c_2 = 2).
ExperimentReport stochastic_rate_experiment(const AnalyticCase& c,
                                            std::span<const std::int64_t> sample_sizes,
                                            int reps, std::uint64_t seed,
                                            Exec exec = Exec::parallel);

/// Least-squares line fit, returns (slope, intercept).
std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y);

} // namespace pdsort
