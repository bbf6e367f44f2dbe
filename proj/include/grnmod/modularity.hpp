#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grnmod/grn.hpp"

namespace grnmod {

/// Assignment of genes to modules 0..K-1.
class Partition
{
  public:
    Partition() = default;
    /// Module ids must be contiguous from 0 (every id in 0..K-1 used).
    explicit Partition(std::vector<int> module_of);

    static Partition single(int n) { return Partition(std::vector<int>(n, 0)); }
    /// "0,0,0,1,1" style.
    static Partition parse(std::string_view text);

    int size() const noexcept { return static_cast<int>(module_of_.size()); }
    int module_count() const noexcept { return static_cast<int>(members_.size()); }
    int module_of(int gene) const { return module_of_.at(gene); }
    const std::vector<int>& assignment() const noexcept { return module_of_; }
    /// Genes of module m as a bitmask.
    GeneMask members(int m) const { return members_.at(m); }
    /// Genes sharing gene i's module.
    GeneMask same_module(int gene) const { return members_[module_of_.at(gene)]; }

    std::string str() const;

    friend bool operator==(const Partition& a, const Partition& b)
    {
        return a.module_of_ == b.module_of_;
    }

  private:
    std::vector<int> module_of_;
    std::vector<GeneMask> members_;
};

/// Genes are grouped by their change profile across consecutive targets; genes
/// whose activation flips at exactly the same target transitions share a
/// module. Module ids follow first appearance.
Partition derive_partition(std::span<const Pattern> targets);

/// How a reciprocal pair of regulations (a_uv and a_vu both nonzero) maps to
/// undirected edges.
enum class EdgeCollapse {
    Union, ///< one edge
    Multi  ///< two parallel edges
};

/// Newman Q of the genome's undirected, unsigned graph under a fixed partition.
/// Self-loops count once toward L and twice toward their gene's degree.
/// Returns nullopt for an edgeless graph.
std::optional<double> q_score(const Genome& g, const Partition& partition,
                              EdgeCollapse collapse = EdgeCollapse::Union);

} // namespace grnmod
