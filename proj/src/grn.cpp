#include "grnmod/grn.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "grnmod/random.hpp"

namespace grnmod {

namespace {

void check_gene_count(int n)
{
    if (n < 2 || n > kMaxGenes)
        throw std::invalid_argument("gene count must be in [2, " + std::to_string(kMaxGenes) +
                                    "], got " + std::to_string(n));
}

} // namespace

// ---------------------------------------------------------------------------
// Pattern

Pattern::Pattern(int n, GeneMask active) : n_(n), active_(active)
{
    if (n < 1 || n > kMaxGenes)
        throw std::invalid_argument("pattern length out of range");
    if ((active & ~low_mask(n)) != 0)
        throw std::invalid_argument("pattern mask has bits beyond its length");
}

Pattern Pattern::from_states(const std::vector<int>& states)
{
    const int n = static_cast<int>(states.size());
    if (n < 1 || n > kMaxGenes)
        throw std::invalid_argument("pattern length out of range");
    GeneMask mask = 0;
    for (int i = 0; i < n; ++i) {
        if (states[i] == 1)
            mask |= GeneMask{1} << i;
        else if (states[i] != -1)
            throw std::invalid_argument("pattern states must be +1 or -1");
    }
    return Pattern(n, mask, 0);
}

Pattern Pattern::parse(std::string_view text)
{
    std::vector<int> states;
    for (char c : text) {
        if (c == '+')
            states.push_back(1);
        else if (c == '-')
            states.push_back(-1);
        else if (c == ' ' || c == '\t')
            continue;
        else
            throw std::invalid_argument("pattern must consist of '+' and '-': '" +
                                        std::string(text) + "'");
    }
    return from_states(states);
}

std::vector<int> Pattern::states() const
{
    std::vector<int> out(n_);
    for (int i = 0; i < n_; ++i)
        out[i] = state(i);
    return out;
}

std::string Pattern::str() const
{
    std::string out(n_, '-');
    for (int i = 0; i < n_; ++i)
        if ((active_ >> i) & 1U)
            out[i] = '+';
    return out;
}

// ---------------------------------------------------------------------------
// Genome

Genome::Genome(int n) : n_(n)
{
    check_gene_count(n);
}

Genome Genome::from_dense(int n, const std::vector<int>& entries)
{
    Genome g(n);
    if (entries.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("dense genome needs n*n entries");
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            g.set(j, i, entries[static_cast<std::size_t>(j) * n + i]);
    return g;
}

Genome Genome::identity(int n)
{
    Genome g(n);
    for (int i = 0; i < n; ++i)
        g.set(i, i, 1);
    return g;
}

void Genome::check_index(int gene) const
{
    if (gene < 0 || gene >= n_)
        throw std::out_of_range("gene index " + std::to_string(gene) + " out of range");
}

int Genome::get(int from, int to) const
{
    check_index(from);
    check_index(to);
    const GeneMask bit = GeneMask{1} << from;
    if (pos_[to] & bit)
        return 1;
    if (neg_[to] & bit)
        return -1;
    return 0;
}

void Genome::set(int from, int to, int value)
{
    check_index(from);
    check_index(to);
    if (value < -1 || value > 1)
        throw std::invalid_argument("genome entries must be -1, 0 or 1");
    const GeneMask bit = GeneMask{1} << from;
    pos_[to] &= ~bit;
    neg_[to] &= ~bit;
    if (value == 1)
        pos_[to] |= bit;
    else if (value == -1)
        neg_[to] |= bit;
}

void Genome::set_column(int gene, GeneMask activators, GeneMask repressors)
{
    check_index(gene);
    const GeneMask valid = low_mask(n_);
    if ((activators & repressors) != 0 || ((activators | repressors) & ~valid) != 0)
        throw std::invalid_argument("invalid column masks");
    pos_[gene] = activators;
    neg_[gene] = repressors;
}

int Genome::edge_count() const noexcept
{
    int total = 0;
    for (int i = 0; i < n_; ++i)
        total += std::popcount(pos_[i] | neg_[i]);
    return total;
}

std::vector<int> Genome::dense() const
{
    std::vector<int> out(static_cast<std::size_t>(n_) * n_);
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i)
            out[static_cast<std::size_t>(j) * n_ + i] = get(j, i);
    return out;
}

std::size_t Genome::hash() const noexcept
{
    std::uint64_t h = static_cast<std::uint64_t>(n_);
    for (int i = 0; i < n_; ++i)
        h = mix64(h ^ ((static_cast<std::uint64_t>(pos_[i]) << 32) | neg_[i]));
    return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// Dynamics

Pattern step(const Genome& g, const Pattern& s)
{
    if (s.size() != g.size())
        throw std::invalid_argument("pattern length does not match genome size");
    return Pattern(g.size(), detail::step_mask(g, s.active()));
}

std::optional<Attractor> find_attractor(const Genome& g, const Pattern& start, int max_steps)
{
    if (start.size() != g.size())
        throw std::invalid_argument("pattern length does not match genome size");
    if (max_steps < 1)
        throw std::invalid_argument("max_steps must be >= 1");
    GeneMask state = start.active();
    for (int t = 0; t < max_steps; ++t) {
        const GeneMask next = detail::step_mask(g, state);
        if (next == state)
            return Attractor{Pattern(g.size(), state), t};
        state = next;
    }
    return std::nullopt;
}

int hamming(const Pattern& a, const Pattern& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("hamming: pattern lengths differ");
    return std::popcount(a.active() ^ b.active());
}

// ---------------------------------------------------------------------------
// Text format

void write_genome(std::ostream& os, const Genome& g)
{
    const int n = g.size();
    os << "n=" << n << '\n';
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i)
                os << ' ';
            os << g.get(j, i);
        }
        os << '\n';
    }
}

Genome read_genome(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("n=", 0) != 0)
        throw std::runtime_error("genome file: expected header 'n=<N>'");
    int n = 0;
    try {
        n = std::stoi(line.substr(2));
    } catch (const std::exception&) {
        throw std::runtime_error("genome file: bad header '" + line + "'");
    }
    check_gene_count(n);
    std::vector<int> entries;
    entries.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        if (!std::getline(is, line))
            throw std::runtime_error("genome file: missing row " + std::to_string(j));
        std::istringstream row(line);
        int v;
        int count = 0;
        while (row >> v) {
            entries.push_back(v);
            ++count;
        }
        if (count != n)
            throw std::runtime_error("genome file: row " + std::to_string(j) + " has " +
                                     std::to_string(count) + " values, expected " +
                                     std::to_string(n));
    }
    return Genome::from_dense(n, entries);
}

Genome load_genome(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open genome file " + path);
    return read_genome(in);
}

void save_genome(const std::string& path, const Genome& g)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write genome file " + path);
    write_genome(out, g);
}

} // namespace grnmod
