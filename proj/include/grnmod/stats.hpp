#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace grnmod {

/// Direction of a paired comparison on differences a - b.
enum class Alternative { ALessB, AGreaterB, TwoSided };

Alternative parse_alternative(std::string_view text);
std::string_view to_string(Alternative alt);

struct WilcoxonResult
{
    double w = 0.0;        ///< sum of ranks of positive differences
    double p_value = 1.0;
    int nonzero = 0;       ///< number of pairs after dropping zero differences
    bool exact = false;
};

/// Below this many nonzero differences the p-value is exact.
inline constexpr int kWilcoxonExactLimit = 20;

/// Midranks of |d| for the nonzero differences, in input order of those differences.
std::vector<double> signed_rank_magnitudes(std::span<const double> nonzero_differences);

/// Exact p-value of W under the sign-flip null, for the given (tied) ranks.
double wilcoxon_exact_p(std::span<const double> ranks, double w, Alternative alt);

/// Normal approximation with tie and continuity correction.
double wilcoxon_normal_p(std::span<const double> ranks, double w, Alternative alt);

/// Paired signed-rank test on (a_k, b_k). Zero differences are dropped.
/// Returns nullopt when every difference is zero. Uses the exact null when at
/// most kWilcoxonExactLimit differences remain (or when force_exact is set),
/// the normal approximation otherwise.
std::optional<WilcoxonResult> wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs,
                                                   Alternative alt);
std::optional<WilcoxonResult> wilcoxon_signed_rank(std::span<const double> differences,
                                                   Alternative alt, std::optional<bool> exact = {});

struct Summary
{
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0; ///< sample (n-1) standard deviation; 0 for one value
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

Summary summarize(std::span<const double> values);

} // namespace grnmod
