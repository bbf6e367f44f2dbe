#include "grnmod/modularity.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace grnmod {

Partition::Partition(std::vector<int> module_of) : module_of_(std::move(module_of))
{
    if (module_of_.empty() || module_of_.size() > kMaxGenes)
        throw std::invalid_argument("partition size out of range");
    const int k = *std::max_element(module_of_.begin(), module_of_.end()) + 1;
    members_.assign(k, 0);
    for (std::size_t i = 0; i < module_of_.size(); ++i) {
        if (module_of_[i] < 0)
            throw std::invalid_argument("partition: negative module id");
        members_[module_of_[i]] |= GeneMask{1} << i;
    }
    for (int m = 0; m < k; ++m)
        if (members_[m] == 0)
            throw std::invalid_argument("partition: module ids must be contiguous from 0");
}

Partition Partition::parse(std::string_view text)
{
    std::vector<int> ids;
    std::string token;
    std::istringstream in{std::string(text)};
    while (std::getline(in, token, ',')) {
        const auto b = token.find_first_not_of(" \t");
        const auto e = token.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw std::invalid_argument("partition: empty entry");
        try {
            std::size_t used = 0;
            const std::string trimmed = token.substr(b, e - b + 1);
            ids.push_back(std::stoi(trimmed, &used));
            if (used != trimmed.size())
                throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::invalid_argument("partition: bad module id '" + token + "'");
        }
    }
    return Partition(std::move(ids));
}

std::string Partition::str() const
{
    std::string out;
    for (std::size_t i = 0; i < module_of_.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(module_of_[i]);
    }
    return out;
}

Partition derive_partition(std::span<const Pattern> targets)
{
    if (targets.empty())
        throw std::invalid_argument("derive_partition: need at least one target");
    const int n = targets.front().size();
    for (const auto& t : targets)
        if (t.size() != n)
            throw std::invalid_argument("derive_partition: targets differ in length");

    std::map<std::vector<bool>, int> module_of_profile;
    std::vector<int> assignment(n);
    for (int i = 0; i < n; ++i) {
        std::vector<bool> profile;
        profile.reserve(targets.size());
        for (std::size_t k = 1; k < targets.size(); ++k)
            profile.push_back(targets[k].state(i) != targets[k - 1].state(i));
        const auto [it, inserted] =
            module_of_profile.try_emplace(profile, static_cast<int>(module_of_profile.size()));
        assignment[i] = it->second;
    }
    return Partition(std::move(assignment));
}

std::optional<double> q_score(const Genome& g, const Partition& partition, EdgeCollapse collapse)
{
    const int n = g.size();
    if (partition.size() != n)
        throw std::invalid_argument("q_score: partition does not cover the genome");

    // out[u]: genes regulated by u, rebuilt from the column masks.
    std::array<GeneMask, kMaxGenes> out{};
    for (int v = 0; v < n; ++v) {
        GeneMask regs = g.regulators(v);
        while (regs) {
            const int u = std::countr_zero(regs);
            regs &= regs - 1;
            out[u] |= GeneMask{1} << v;
        }
    }

    long edges = 0;
    std::vector<long> within(partition.module_count(), 0);
    std::vector<long> degree(partition.module_count(), 0);
    for (int u = 0; u < n; ++u) {
        const GeneMask self = GeneMask{1} << u;
        const int mod = partition.module_of(u);
        const GeneMask same = partition.members(mod);
        const bool loop = (g.regulators(u) & self) != 0;
        long deg;
        long inside;
        if (collapse == EdgeCollapse::Union) {
            const GeneMask nbrs = (g.regulators(u) | out[u]) & ~self;
            deg = std::popcount(nbrs);
            inside = std::popcount(nbrs & same);
        } else {
            const GeneMask in_nbrs = g.regulators(u) & ~self;
            const GeneMask out_nbrs = out[u] & ~self;
            deg = std::popcount(in_nbrs) + std::popcount(out_nbrs);
            inside = std::popcount(in_nbrs & same) + std::popcount(out_nbrs & same);
        }
        // Every non-loop edge is seen from both endpoints; keep it doubled for now.
        edges += deg;
        within[mod] += inside;
        if (loop) {
            edges += 2;
            within[mod] += 2;
            deg += 2;
        }
        degree[mod] += deg;
    }
    if (edges == 0)
        return std::nullopt;

    const double two_l = static_cast<double>(edges);
    double q = 0.0;
    for (int m = 0; m < partition.module_count(); ++m) {
        const double frac = static_cast<double>(within[m]) / two_l;
        const double expected = static_cast<double>(degree[m]) / two_l;
        q += frac - expected * expected;
    }
    return q;
}

} // namespace grnmod
