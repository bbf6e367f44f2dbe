#include "grnmod/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace grnmod {

Alternative parse_alternative(std::string_view text)
{
    if (text == "a_less_b" || text == "less")
        return Alternative::ALessB;
    if (text == "a_greater_b" || text == "greater")
        return Alternative::AGreaterB;
    if (text == "two_sided")
        return Alternative::TwoSided;
    throw std::invalid_argument("unknown alternative '" + std::string(text) + "'");
}

std::string_view to_string(Alternative alt)
{
    switch (alt) {
    case Alternative::ALessB: return "a_less_b";
    case Alternative::AGreaterB: return "a_greater_b";
    case Alternative::TwoSided: return "two_sided";
    }
    return "?";
}

std::vector<double> signed_rank_magnitudes(std::span<const double> nonzero_differences)
{
    const std::size_t m = nonzero_differences.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(nonzero_differences[a]) < std::fabs(nonzero_differences[b]);
    });
    std::vector<double> ranks(m);
    for (std::size_t i = 0; i < m;) {
        std::size_t j = i;
        while (j + 1 < m && std::fabs(nonzero_differences[order[j + 1]]) ==
                                std::fabs(nonzero_differences[order[i]]))
            ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = mid;
        i = j + 1;
    }
    return ranks;
}

double wilcoxon_exact_p(std::span<const double> ranks, double w, Alternative alt)
{
    // Midranks are multiples of 1/2, so doubled ranks are integers and the null
    // distribution of 2W is a subset-sum count over them.
    std::vector<int> doubled;
    doubled.reserve(ranks.size());
    int total = 0;
    for (double r : ranks) {
        doubled.push_back(static_cast<int>(std::lround(2.0 * r)));
        total += doubled.back();
    }
    std::vector<double> prob(static_cast<std::size_t>(total) + 1, 0.0);
    prob[0] = 1.0;
    int reach = 0;
    for (int r : doubled) {
        for (int s = reach; s >= 0; --s) {
            const double p = prob[s] * 0.5;
            prob[s] = p;
            prob[s + r] += p;
        }
        reach += r;
    }
    const auto observed = std::lround(2.0 * w);
    double lower = 0.0;
    double upper = 0.0;
    for (int s = 0; s <= total; ++s) {
        if (s <= observed)
            lower += prob[s];
        if (s >= observed)
            upper += prob[s];
    }
    switch (alt) {
    case Alternative::ALessB: return std::min(1.0, lower);
    case Alternative::AGreaterB: return std::min(1.0, upper);
    case Alternative::TwoSided: return std::min(1.0, 2.0 * std::min(lower, upper));
    }
    return 1.0;
}

double wilcoxon_normal_p(std::span<const double> ranks, double w, Alternative alt)
{
    const double m = static_cast<double>(ranks.size());
    const double mean = m * (m + 1.0) / 4.0;
    double var = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0;

    std::vector<double> sorted(ranks.begin(), ranks.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        const double t = static_cast<double>(j - i);
        var -= (t * t * t - t) / 48.0;
        i = j;
    }
    const double sd = std::sqrt(var);
    auto upper_tail = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };

    switch (alt) {
    case Alternative::AGreaterB: return upper_tail((w - mean - 0.5) / sd);
    case Alternative::ALessB: return upper_tail((mean - w - 0.5) / sd);
    case Alternative::TwoSided: {
        const double z = std::max(0.0, std::fabs(w - mean) - 0.5) / sd;
        return std::min(1.0, 2.0 * upper_tail(z));
    }
    }
    return 1.0;
}

std::optional<WilcoxonResult> wilcoxon_signed_rank(std::span<const double> differences,
                                                   Alternative alt, std::optional<bool> exact)
{
    std::vector<double> nonzero;
    for (double d : differences) {
        if (std::isnan(d))
            throw std::invalid_argument("wilcoxon: NaN difference");
        if (d != 0.0)
            nonzero.push_back(d);
    }
    if (nonzero.empty())
        return std::nullopt;

    const auto ranks = signed_rank_magnitudes(nonzero);
    WilcoxonResult result;
    result.nonzero = static_cast<int>(nonzero.size());
    for (std::size_t k = 0; k < nonzero.size(); ++k)
        if (nonzero[k] > 0.0)
            result.w += ranks[k];
    result.exact = exact.value_or(result.nonzero <= kWilcoxonExactLimit);
    result.p_value = result.exact ? wilcoxon_exact_p(ranks, result.w, alt)
                                  : wilcoxon_normal_p(ranks, result.w, alt);
    return result;
}

std::optional<WilcoxonResult> wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs,
                                                   Alternative alt)
{
    std::vector<double> diffs;
    diffs.reserve(pairs.size());
    for (const auto& [a, b] : pairs)
        diffs.push_back(a - b);
    return wilcoxon_signed_rank(diffs, alt);
}

Summary summarize(std::span<const double> values)
{
    if (values.empty())
        throw std::invalid_argument("summarize: empty sample");
    Summary s;
    s.count = values.size();
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    const std::size_t n = sorted.size();
    s.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - s.mean) * (v - s.mean);
        s.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return s;
}

} // namespace grnmod
