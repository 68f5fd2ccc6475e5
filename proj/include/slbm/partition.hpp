#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "slbm/enumeration.hpp"
#include "slbm/error.hpp"
#include "slbm/kernels.hpp"
#include "slbm/sparse_lattice.hpp"
#include "slbm/worker_pool.hpp"

namespace slbm {

/// Equal-size contiguous chunks of an ordering.
struct PartitionMap {
    /// parts()+1 rank offsets, strictly increasing from 0 to the node count.
    std::vector<std::size_t> bounds;
    /// Partition of every rank.
    std::vector<std::uint32_t> owner;

    [[nodiscard]] std::size_t parts() const noexcept { return bounds.empty() ? 0 : bounds.size() - 1; }
    [[nodiscard]] std::size_t size(std::size_t p) const { return bounds[p + 1] - bounds[p]; }
    [[nodiscard]] std::size_t node_count() const noexcept { return bounds.empty() ? 0 : bounds.back(); }
};

/// Cuts `nodes` ranks into `parts` chunks; the first nodes % parts chunks get
/// one extra node.
inline PartitionMap make_partition(std::size_t nodes, std::size_t parts) {
    if (parts < 1 || parts > nodes)
        throw InvalidParameter("partition count must lie in [1, node count]");
    PartitionMap pm;
    pm.bounds.resize(parts + 1);
    const std::size_t base = nodes / parts;
    const std::size_t extra = nodes % parts;
    pm.bounds[0] = 0;
    for (std::size_t p = 0; p < parts; ++p)
        pm.bounds[p + 1] = pm.bounds[p] + base + (p < extra ? 1 : 0);
    pm.owner.resize(nodes);
    for (std::size_t p = 0; p < parts; ++p)
        std::fill(pm.owner.begin() + static_cast<std::ptrdiff_t>(pm.bounds[p]),
                  pm.owner.begin() + static_cast<std::ptrdiff_t>(pm.bounds[p + 1]), static_cast<std::uint32_t>(p));
    return pm;
}

inline PartitionMap make_partition(const Ordering& ordering, std::size_t parts) {
    return make_partition(ordering.size(), parts);
}

//---------------------------------------------------------------------------//
// Communication statistics
//---------------------------------------------------------------------------//

struct PartitionComm {
    std::size_t size = 0;
    /// PDFs this partition reads from other partitions per step.
    std::size_t ghost_pdfs_in = 0;
    /// PDFs other partitions read from this one per step.
    std::size_t ghost_pdfs_out = 0;
    std::size_t ghost_bytes = 0;
    std::size_t neighbors = 0;
};

struct CommReport {
    std::vector<PartitionComm> parts;
    std::size_t total_ghost_pdfs = 0;
    std::size_t total_ghost_bytes = 0;
    std::size_t max_ghost_bytes = 0;
    double mean_ghost_bytes = 0.0;
    std::size_t max_neighbors = 0;
    double mean_neighbors = 0.0;
};

/// Counts adjacency entries that cross partition borders. Each such entry is
/// one PDF (8 B) to exchange per time step.
inline CommReport comm_stats(const SparseLattice& lat, const PartitionMap& pm) {
    if (pm.node_count() != lat.node_count())
        throw InvalidPartition("partition map does not match the lattice");
    const std::size_t stride = lat.layout().stride();
    const std::size_t P = pm.parts();
    CommReport rep;
    rep.parts.resize(P);
    std::vector<std::set<std::uint32_t>> peers(P);
    for (std::size_t p = 0; p < P; ++p) {
        rep.parts[p].size = pm.size(p);
        for (std::size_t n = pm.bounds[p]; n < pm.bounds[p + 1]; ++n) {
            for (const std::uint32_t e : lat.adjacency.row(n)) {
                const std::uint32_t q = pm.owner[e % stride];
                if (q == p)
                    continue;
                ++rep.parts[p].ghost_pdfs_in;
                ++rep.parts[q].ghost_pdfs_out;
                peers[p].insert(q);
                peers[q].insert(static_cast<std::uint32_t>(p));
            }
        }
    }
    for (std::size_t p = 0; p < P; ++p) {
        auto& pc = rep.parts[p];
        pc.ghost_bytes = pc.ghost_pdfs_in * pdf_bytes;
        pc.neighbors = peers[p].size();
        rep.total_ghost_pdfs += pc.ghost_pdfs_in;
        rep.total_ghost_bytes += pc.ghost_bytes;
        rep.max_ghost_bytes = std::max(rep.max_ghost_bytes, pc.ghost_bytes);
        rep.max_neighbors = std::max(rep.max_neighbors, pc.neighbors);
        rep.mean_neighbors += static_cast<double>(pc.neighbors);
    }
    if (P > 0) {
        rep.mean_ghost_bytes = static_cast<double>(rep.total_ghost_bytes) / static_cast<double>(P);
        rep.mean_neighbors /= static_cast<double>(P);
    }
    return rep;
}

/// Mean RIA run length inside every chunk (runs are cut at chunk borders).
inline std::vector<double> mean_run_length_per_chunk(const BlockVector& bv, const PartitionMap& pm) {
    const auto runs = runs_per_chunk(bv, pm.bounds);
    std::vector<double> out(runs.size());
    for (std::size_t p = 0; p < runs.size(); ++p)
        out[p] = static_cast<double>(pm.size(p)) / static_cast<double>(runs[p]);
    return out;
}

//---------------------------------------------------------------------------//
// Two-stage renumbering
//---------------------------------------------------------------------------//

struct RenumberedPartition {
    Ordering ordering;
    PartitionMap partition;
};

/// Hilbert ordering cut into equal chunks, then every chunk renumbered in
/// plain lexicographic order. Chunk membership is that of the Hilbert cut.
inline RenumberedPartition renumber_partitions(const Geometry& g, std::size_t parts) {
    const Ordering hilbert = order_hilbert(g);
    PartitionMap pm = make_partition(hilbert, parts);
    return {renumber_within_chunks(hilbert, pm.bounds), std::move(pm)};
}

//---------------------------------------------------------------------------//
// Partitioned execution
//---------------------------------------------------------------------------//

namespace detail {

/// Values moved from one partition's field into another's per exchange.
struct Message {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    /// Flat indices in the owner's local field.
    std::vector<std::uint32_t> owner_index;
    /// Flat indices in the reader's ghost region.
    std::vector<std::uint32_t> ghost_index;
    std::vector<double> payload;
};

struct LocalDomain {
    std::size_t first = 0;
    SparseLattice lattice;
    PdfField field;
    PdfField spare;
    std::vector<std::size_t> inbox;  // messages received before reading
    std::vector<std::size_t> outbox; // messages this partition serves
};

} // namespace detail

struct PartitionedResult {
    /// Global field gathered from all partitions, laid out like `lattice`.
    PdfField field;
    SparseLattice lattice;
    CommReport comm;
    /// PDF bytes moved by the harness in each time step.
    std::vector<std::size_t> exchanged_bytes;
    RunCounters counters;
    double seconds = 0.0;
};

/// Runs `opts.steps` steps with the lattice split into the chunks of `pm`.
///
/// Every partition owns a local field with a ghost region for the remote
/// PDFs it reads. Two-grid variants refresh the ghosts before each step; the
/// AA family fetches them before the odd step and returns the values pushed
/// into them afterwards. Exchanges are barriered phases, so the outcome does
/// not depend on the number of workers.
inline PartitionedResult run_partitioned(const Geometry& g, const Ordering& ordering, const PartitionMap& pm,
                                         const RunOptions& opts) {
    opts.params.validate();
    const Variant v = opts.variant;
    const bool aa = is_aa(v);
    const Convention conv = convention_for(v);
    if (pm.node_count() != ordering.size())
        throw InvalidPartition("partition map does not match the ordering");

    PartitionedResult out;
    out.lattice = build_lattice(g, ordering, conv);
    const auto& global = out.lattice;
    const std::size_t gstride = global.layout().stride();
    const std::size_t P = pm.parts();
    {
        // Ghost counts are identical under both conventions.
        out.comm = comm_stats(aa ? build_lattice(g, ordering, Convention::pull) : global, pm);
    }

    const PdfField initial = make_equilibrium_field(global, storage_for(v), opts.rho0, opts.u0);

    // Local lattices with ghost regions, and the message plan.
    std::vector<detail::LocalDomain> dom(P);
    std::vector<detail::Message> msgs;
    std::vector<std::vector<std::size_t>> msg_of(P, std::vector<std::size_t>(P, SIZE_MAX));
    for (std::size_t p = 0; p < P; ++p) {
        const std::size_t first = pm.bounds[p];
        const std::size_t n = pm.size(p);
        std::unordered_map<std::uint32_t, std::uint32_t> ghost_of;
        std::vector<std::uint32_t> ghost_global;
        std::vector<std::uint32_t> entries(n * link_count);
        for (std::size_t ln = 0; ln < n; ++ln) {
            const auto row = global.adjacency.row(first + ln);
            for (int j = 0; j < link_count; ++j) {
                const std::uint32_t e = row[static_cast<std::size_t>(j)];
                const std::size_t slot = e / gstride;
                const std::size_t m = e % gstride;
                std::uint32_t local = 0;
                if (pm.owner[m] == p) {
                    local = static_cast<std::uint32_t>(slot * n + (m - first));
                } else {
                    auto [it, fresh] = ghost_of.try_emplace(e, static_cast<std::uint32_t>(ghost_global.size()));
                    if (fresh)
                        ghost_global.push_back(e);
                    local = static_cast<std::uint32_t>(D3Q19::q * n + it->second);
                }
                entries[ln * link_count + static_cast<std::size_t>(j)] = local;
            }
        }
        const FieldLayout layout{n, 0, ghost_global.size()};
        auto& d = dom[p];
        d.first = first;
        d.lattice.adjacency = AdjacencyList(layout, conv, std::move(entries));
        d.lattice.blocks = build_block_vector(d.lattice.adjacency);
        d.field = PdfField(layout, storage_for(v));
        if (!aa)
            d.spare = PdfField(layout, Storage::two_grid);
        for (int i = 0; i < D3Q19::q; ++i)
            for (std::size_t ln = 0; ln < n; ++ln)
                d.field.at(i, ln) = initial.at(i, first + ln);

        for (std::size_t k = 0; k < ghost_global.size(); ++k) {
            const std::uint32_t e = ghost_global[k];
            const std::size_t slot = e / gstride;
            const std::size_t m = e % gstride;
            const std::uint32_t q = pm.owner[m];
            auto& id = msg_of[q][p];
            if (id == SIZE_MAX) {
                id = msgs.size();
                msgs.push_back({q, static_cast<std::uint32_t>(p), {}, {}, {}});
            }
            auto& msg = msgs[id];
            msg.owner_index.push_back(static_cast<std::uint32_t>(slot * pm.size(q) + (m - pm.bounds[q])));
            msg.ghost_index.push_back(static_cast<std::uint32_t>(layout.ghost_offset() + k));
        }
    }
    for (std::size_t id = 0; id < msgs.size(); ++id) {
        msgs[id].payload.resize(msgs[id].owner_index.size());
        dom[msgs[id].to].inbox.push_back(id);
        dom[msgs[id].from].outbox.push_back(id);
    }

    std::optional<WorkerPool> pool;
    if (opts.workers > 1)
        pool.emplace(opts.workers);
    auto parallel = [&](auto&& fn) {
        if (pool)
            pool->for_each(P, fn);
        else
            for (std::size_t p = 0; p < P; ++p)
                fn(p);
    };

    std::size_t moved = 0;
    // Owner -> reader: pack on the owner, then unpack into ghost slots.
    auto fetch_ghosts = [&](auto field_of) {
        parallel([&](std::size_t p) {
            const double* src = field_of(dom[p]).data();
            for (auto id : dom[p].outbox) {
                auto& m = msgs[id];
                for (std::size_t k = 0; k < m.payload.size(); ++k)
                    m.payload[k] = src[m.owner_index[k]];
            }
        });
        parallel([&](std::size_t p) {
            double* dst = field_of(dom[p]).data();
            for (auto id : dom[p].inbox) {
                const auto& m = msgs[id];
                for (std::size_t k = 0; k < m.payload.size(); ++k)
                    dst[m.ghost_index[k]] = m.payload[k];
            }
        });
        for (const auto& m : msgs)
            moved += m.payload.size() * pdf_bytes;
    };
    // Reader -> owner: values pushed into ghost slots go home.
    auto return_ghosts = [&] {
        parallel([&](std::size_t p) {
            const double* src = dom[p].field.data();
            for (auto id : dom[p].inbox) {
                auto& m = msgs[id];
                for (std::size_t k = 0; k < m.payload.size(); ++k)
                    m.payload[k] = src[m.ghost_index[k]];
            }
        });
        parallel([&](std::size_t p) {
            double* dst = dom[p].field.data();
            for (auto id : dom[p].outbox) {
                const auto& m = msgs[id];
                for (std::size_t k = 0; k < m.payload.size(); ++k)
                    dst[m.owner_index[k]] = m.payload[k];
            }
        });
        for (const auto& m : msgs)
            moved += m.payload.size() * pdf_bytes;
    };

    std::vector<TrafficCounters> partial(P);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t s = 0; s < opts.steps; ++s) {
        moved = 0;
        std::fill(partial.begin(), partial.end(), TrafficCounters{});
        if (!aa) {
            fetch_ghosts([](detail::LocalDomain& d) -> PdfField& { return d.field; });
            parallel([&](std::size_t p) {
                auto& d = dom[p];
                partial[p] = v == Variant::os_nt ? step_os_nt(d.field, d.spare, d.lattice, opts.params)
                                                 : step_os_nt_ria(d.field, d.spare, d.lattice, opts.params);
                std::swap(d.field, d.spare);
            });
        } else if (s % 2 == 0) {
            parallel([&](std::size_t p) { partial[p] = step_aa_even(dom[p].field, dom[p].lattice, opts.params); });
        } else {
            fetch_ghosts([](detail::LocalDomain& d) -> PdfField& { return d.field; });
            parallel([&](std::size_t p) {
                auto& d = dom[p];
                switch (v) {
                case Variant::aa: partial[p] = step_aa_odd(d.field, d.lattice, opts.params); break;
                case Variant::aa_r: partial[p] = step_aa_odd_ria(d.field, d.lattice, opts.params); break;
                default:
                    partial[p] = step_aa_odd_batched(d.field, d.lattice, opts.params, opts.vector_width);
                    break;
                }
            });
            return_ghosts();
        }
        auto& bucket = s % 2 == 0 ? out.counters.even : out.counters.odd;
        for (const auto& c : partial)
            bucket += c;
        out.exchanged_bytes.push_back(moved);
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // Gather the owned slots into the global layout.
    out.field = PdfField(global.layout(), storage_for(v));
    out.field.set_parity(aa ? static_cast<int>(opts.steps % 2) : 0);
    for (std::size_t p = 0; p < P; ++p) {
        const auto& d = dom[p];
        const std::size_t n = pm.size(p);
        for (int i = 0; i < D3Q19::q; ++i)
            for (std::size_t ln = 0; ln < n; ++ln)
                out.field.at(i, d.first + ln) = d.field.at(i, ln);
    }
    if (opts.steps > 0)
        check_stable(out.field, out.lattice, opts.steps);
    return out;
}

} // namespace slbm
