#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace grnmod {

inline constexpr int kMaxGenes = 32;

using GeneMask = std::uint32_t;

constexpr GeneMask low_mask(int n) noexcept
{
    return n >= 32 ? ~GeneMask{0} : ((GeneMask{1} << n) - 1);
}

/// Gene activity pattern: one +1/-1 state per gene, stored as a bitmask of the
/// active (+1) genes.
class Pattern
{
  public:
    Pattern() = default;
    Pattern(int n, GeneMask active);

    /// From explicit states; every element must be +1 or -1.
    static Pattern from_states(const std::vector<int>& states);
    /// From a string of '+' and '-' characters, e.g. "+-+-+-+-+-".
    static Pattern parse(std::string_view text);
    static Pattern all_inactive(int n) { return Pattern(n, 0); }

    int size() const noexcept { return n_; }
    GeneMask active() const noexcept { return active_; }
    int state(int gene) const { return (active_ >> gene) & 1U ? 1 : -1; }

    Pattern flipped() const noexcept { return Pattern(n_, ~active_ & low_mask(n_), 0); }
    std::vector<int> states() const;
    std::string str() const;

    friend bool operator==(const Pattern&, const Pattern&) = default;

  private:
    Pattern(int n, GeneMask active, int) : n_(n), active_(active) {}

    int n_ = 0;
    GeneMask active_ = 0;
};

/// Signed regulatory network over n genes.
///
/// Entry (j, i) is the effect of gene j on gene i: +1 activation, -1
/// repression, 0 none. Storage is column-major bit planes: for every target
/// gene i, one mask of activating regulators and one of repressing regulators.
class Genome
{
  public:
    Genome() = default;
    /// Empty (all-zero) network. 2 <= n <= kMaxGenes.
    explicit Genome(int n);

    /// From a dense row-major matrix of n*n entries (row j lists a_j0..a_j(n-1)).
    static Genome from_dense(int n, const std::vector<int>& entries);
    static Genome identity(int n);

    int size() const noexcept { return n_; }

    int get(int from, int to) const;
    void set(int from, int to, int value);

    GeneMask activators(int gene) const { return pos_[gene]; }
    GeneMask repressors(int gene) const { return neg_[gene]; }
    GeneMask regulators(int gene) const { return pos_[gene] | neg_[gene]; }
    int regulator_count(int gene) const { return std::popcount(regulators(gene)); }
    int edge_count() const noexcept;

    void set_column(int gene, GeneMask activators, GeneMask repressors);

    std::vector<int> dense() const;

    friend bool operator==(const Genome&, const Genome&) = default;

    std::size_t hash() const noexcept;

  private:
    void check_index(int gene) const;

    int n_ = 0;
    std::array<GeneMask, kMaxGenes> pos_{};
    std::array<GeneMask, kMaxGenes> neg_{};
};

struct GenomeHash
{
    std::size_t operator()(const Genome& g) const noexcept { return g.hash(); }
};

namespace detail {

/// Bitmask form of step(); no dimension checks.
inline GeneMask step_mask(const Genome& g, GeneMask state) noexcept
{
    const int n = g.size();
    const GeneMask inactive = ~state & low_mask(n);
    GeneMask next = 0;
    for (int i = 0; i < n; ++i) {
        const GeneMask pos = g.activators(i);
        const GeneMask neg = g.repressors(i);
        // Input = (#pos on + #neg off) - (#pos off + #neg on).
        const int agree = std::popcount(pos & state) + std::popcount(neg & inactive);
        const int total = std::popcount(pos | neg);
        if (2 * agree > total)
            next |= GeneMask{1} << i;
    }
    return next;
}

/// Fixed point reached within max_steps transitions, or nullopt.
inline std::optional<GeneMask> settle_mask(const Genome& g, GeneMask state, int max_steps) noexcept
{
    for (int t = 0; t < max_steps; ++t) {
        const GeneMask next = step_mask(g, state);
        if (next == state)
            return state;
        state = next;
    }
    return std::nullopt;
}

} // namespace detail

/// One synchronous update: s'_i = +1 iff sum_j a_ji * s_j > 0.
Pattern step(const Genome& g, const Pattern& s);

struct Attractor
{
    Pattern state;
    int steps = 0;
};

/// Iterates step() at most max_steps times. Returns the fixed point and the
/// number of transitions taken to reach it, or nullopt when no fixed point was
/// reached (slow convergence and cycles alike).
std::optional<Attractor> find_attractor(const Genome& g, const Pattern& start, int max_steps);

int hamming(const Pattern& a, const Pattern& b);

/// Text format: "n=<N>" then N rows of N values from {-1,0,1}.
void write_genome(std::ostream& os, const Genome& g);
Genome read_genome(std::istream& is);
Genome load_genome(const std::string& path);
void save_genome(const std::string& path, const Genome& g);

} // namespace grnmod
