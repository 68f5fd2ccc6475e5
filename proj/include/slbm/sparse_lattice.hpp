#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slbm/enumeration.hpp"
#include "slbm/error.hpp"
#include "slbm/lattice_model.hpp"

namespace slbm {

/// Number of indirectly addressed directions per node (all but the center).
inline constexpr int link_count = D3Q19::q - 1;

/// Bytes per index / block entry used for traffic accounting.
inline constexpr std::size_t index_bytes = 4;

/// Which memory location an adjacency entry names.
///
/// pull: the location a two-grid pull step reads direction i from, i.e. slot i
///       of the upstream neighbor, or slot opposite(i) of the node itself at a
///       wall.
/// aa:   the location the odd AA step reads direction i from, i.e. slot
///       opposite(i) of the upstream neighbor, or slot i of the node itself.
///       The same entry for opposite(i) is where the result for i is written.
enum class Convention { pull, aa };

/// Flat PDF storage layout: slot-major, `stride` values per slot.
struct FieldLayout {
    std::size_t nodes = 0;
    std::size_t padding = 0;
    std::size_t ghosts = 0;

    [[nodiscard]] std::size_t stride() const noexcept { return nodes + padding; }
    [[nodiscard]] std::size_t slot_offset(int i) const noexcept { return static_cast<std::size_t>(i) * stride(); }
    /// Start of the ghost region appended after the 19 slots.
    [[nodiscard]] std::size_t ghost_offset() const noexcept { return D3Q19::q * stride(); }
    [[nodiscard]] std::size_t size() const noexcept { return ghost_offset() + ghosts; }

    friend bool operator==(const FieldLayout&, const FieldLayout&) = default;
};

/// Per-node list of the 18 flat PDF indices a node update accesses indirectly.
class AdjacencyList {
  public:
    AdjacencyList() = default;
    AdjacencyList(FieldLayout layout, Convention convention, std::vector<std::uint32_t> entries)
        : layout_(layout), convention_(convention), entries_(std::move(entries)) {
        if (entries_.size() != layout_.nodes * link_count)
            throw ShapeError("adjacency entry count does not match node count");
    }

    [[nodiscard]] std::size_t node_count() const noexcept { return layout_.nodes; }
    [[nodiscard]] const FieldLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] Convention convention() const noexcept { return convention_; }

    /// Entry for direction i in 1..18.
    [[nodiscard]] std::uint32_t operator()(std::size_t node, int i) const noexcept {
        return entries_[node * link_count + static_cast<std::size_t>(i - 1)];
    }
    [[nodiscard]] std::span<const std::uint32_t> row(std::size_t node) const noexcept {
        return {entries_.data() + node * link_count, link_count};
    }
    [[nodiscard]] std::span<const std::uint32_t> entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] std::size_t bytes() const noexcept { return entries_.size() * index_bytes; }

  private:
    FieldLayout layout_{};
    Convention convention_ = Convention::pull;
    std::vector<std::uint32_t> entries_;
};

/// Run-length coded groups of consecutive nodes whose adjacency rows are the
/// previous row shifted by one.
struct BlockVector {
    std::vector<std::uint32_t> runs;
    /// offsets[k] is the first node of run k; offsets.back() = node count.
    std::vector<std::size_t> offsets;

    [[nodiscard]] std::size_t run_count() const noexcept { return runs.size(); }
    [[nodiscard]] std::size_t node_count() const noexcept { return offsets.empty() ? 0 : offsets.back(); }
    [[nodiscard]] std::size_t bytes() const noexcept { return runs.size() * index_bytes; }
};

struct SparseLattice {
    AdjacencyList adjacency;
    BlockVector blocks;

    [[nodiscard]] std::size_t node_count() const noexcept { return adjacency.node_count(); }
    [[nodiscard]] const FieldLayout& layout() const noexcept { return adjacency.layout(); }
    [[nodiscard]] Convention convention() const noexcept { return adjacency.convention(); }
};

/// Builds the adjacency list with halfway bounce-back folded in: a link to a
/// solid neighbor refers back to the node itself in the reflected slot.
/// Neighbors across the x faces wrap periodically.
inline AdjacencyList build_adjacency(const Geometry& g, const Ordering& ordering,
                                     Convention convention = Convention::pull, std::size_t padding = 0) {
    const auto& d = g.dims();
    if (!(ordering.dims == d))
        throw ShapeError("ordering was built for a different geometry");
    const std::size_t n = ordering.size();
    if (n != fluid_count(g))
        throw ShapeError("ordering does not cover the geometry's fluid nodes");
    const FieldLayout layout{n, padding, 0};
    if (layout.size() > std::size_t{no_rank})
        throw InvalidGeometry("lattice too large for 32-bit PDF indices");

    std::vector<std::uint32_t> entries(n * link_count);
    for (std::size_t r = 0; r < n; ++r) {
        const Coord p = ordering.nodes[r];
        if (!g.is_fluid(p))
            throw ShapeError("ordering visits a solid cell");
        for (int i = 1; i < D3Q19::q; ++i) {
            const auto& ci = D3Q19::c[static_cast<std::size_t>(i)];
            const std::int32_t sx = ((p.x - ci[0]) % d.nx + d.nx) % d.nx;
            const std::int32_t sy = p.y - ci[1];
            const std::int32_t sz = p.z - ci[2];
            const int io = D3Q19::opposite[static_cast<std::size_t>(i)];
            std::size_t flat = 0;
            if (sy < 0 || sz < 0 || sy >= d.ny || sz >= d.nz) {
                throw TopologyError("fluid node (" + std::to_string(p.x) + "," + std::to_string(p.y) + "," +
                                    std::to_string(p.z) + ") has a neighbor outside the closed y/z faces");
            }
            if (g.is_fluid(sx, sy, sz)) {
                const std::uint32_t m = ordering.rank_of({sx, sy, sz});
                const int slot = convention == Convention::pull ? i : io;
                flat = layout.slot_offset(slot) + m;
            } else {
                const int slot = convention == Convention::pull ? io : i;
                flat = layout.slot_offset(slot) + r;
            }
            entries[r * link_count + static_cast<std::size_t>(i - 1)] = static_cast<std::uint32_t>(flat);
        }
    }
    return AdjacencyList(layout, convention, std::move(entries));
}

/// True when every entry of `node` equals the previous node's entry plus one.
inline bool shifts_by_one(const AdjacencyList& adj, std::size_t node) {
    const auto prev = adj.row(node - 1);
    const auto cur = adj.row(node);
    for (int k = 0; k < link_count; ++k)
        if (cur[static_cast<std::size_t>(k)] != prev[static_cast<std::size_t>(k)] + 1)
            return false;
    return true;
}

/// Greedy maximal run-length encoding of the adjacency list.
inline BlockVector build_block_vector(const AdjacencyList& adj) {
    BlockVector bv;
    const std::size_t n = adj.node_count();
    bv.offsets.push_back(0);
    if (n == 0)
        return bv;
    std::size_t start = 0;
    for (std::size_t r = 1; r < n; ++r) {
        if (!shifts_by_one(adj, r)) {
            bv.runs.push_back(static_cast<std::uint32_t>(r - start));
            bv.offsets.push_back(r);
            start = r;
        }
    }
    bv.runs.push_back(static_cast<std::uint32_t>(n - start));
    bv.offsets.push_back(n);
    return bv;
}

inline SparseLattice build_lattice(const Geometry& g, const Ordering& ordering,
                                   Convention convention = Convention::pull, std::size_t padding = 0) {
    SparseLattice lat{build_adjacency(g, ordering, convention, padding), {}};
    lat.blocks = build_block_vector(lat.adjacency);
    return lat;
}

/// Rebuilds a full adjacency list from run-start rows and increments.
inline std::vector<std::uint32_t> expand_runs(const AdjacencyList& adj, const BlockVector& bv) {
    std::vector<std::uint32_t> out(adj.size());
    for (std::size_t k = 0; k < bv.run_count(); ++k) {
        const std::size_t first = bv.offsets[k];
        const auto head = adj.row(first);
        for (std::size_t r = first; r < bv.offsets[k + 1]; ++r)
            for (int j = 0; j < link_count; ++j)
                out[r * link_count + static_cast<std::size_t>(j)] =
                    head[static_cast<std::size_t>(j)] + static_cast<std::uint32_t>(r - first);
    }
    return out;
}

struct RiaStats {
    std::size_t nodes = 0;
    std::size_t runs = 0;
    /// Runs per node.
    double run_density = 0.0;
    double mean_run_length = 0.0;
    /// Fraction of nodes that fall into full batches of V within a run.
    double vectorizable_fraction = 0.0;
};

inline RiaStats ria_stats(const BlockVector& bv, int vector_width) {
    if (vector_width < 1)
        throw InvalidParameter("vector width must be at least 1");
    RiaStats s;
    s.nodes = bv.node_count();
    s.runs = bv.run_count();
    if (s.nodes == 0)
        return s;
    const auto V = static_cast<std::size_t>(vector_width);
    std::size_t batched = 0;
    for (const auto len : bv.runs)
        batched += (len / V) * V;
    s.run_density = static_cast<double>(s.runs) / static_cast<double>(s.nodes);
    s.mean_run_length = static_cast<double>(s.nodes) / static_cast<double>(s.runs);
    s.vectorizable_fraction = static_cast<double>(batched) / static_cast<double>(s.nodes);
    return s;
}

/// Runs per chunk when the block vector is additionally cut at chunk bounds.
inline std::vector<std::size_t> runs_per_chunk(const BlockVector& bv, std::span<const std::size_t> chunk_bounds) {
    validate_chunk_bounds(chunk_bounds, bv.node_count());
    std::vector<std::size_t> out(chunk_bounds.size() - 1, 0);
    for (std::size_t c = 0; c + 1 < chunk_bounds.size(); ++c) {
        const std::size_t lo = chunk_bounds[c];
        const std::size_t hi = chunk_bounds[c + 1];
        // Runs overlapping [lo, hi).
        const auto first = std::upper_bound(bv.offsets.begin(), bv.offsets.end(), lo) - bv.offsets.begin() - 1;
        const auto last = std::lower_bound(bv.offsets.begin(), bv.offsets.end(), hi) - bv.offsets.begin();
        out[c] = static_cast<std::size_t>(last - first);
    }
    return out;
}

} // namespace slbm
