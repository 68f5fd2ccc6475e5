#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slbm/enumeration.hpp"
#include "slbm/error.hpp"
#include "slbm/lattice_model.hpp"
#include "slbm/sparse_lattice.hpp"
#include "slbm/trt.hpp"
#include "slbm/variant.hpp"
#include "slbm/worker_pool.hpp"

namespace slbm {

/// Bytes per PDF (double precision).
inline constexpr std::size_t pdf_bytes = 8;

/// Memory operations issued by a kernel, counted in elements.
struct TrafficCounters {
    std::uint64_t pdf_loads = 0;
    std::uint64_t pdf_stores = 0;
    std::uint64_t index_loads = 0;
    std::uint64_t block_loads = 0;
    std::uint64_t node_updates = 0;
    /// Node updates done on the batched (vectorizable) path.
    std::uint64_t batched_nodes = 0;

    TrafficCounters& operator+=(const TrafficCounters& o) {
        pdf_loads += o.pdf_loads;
        pdf_stores += o.pdf_stores;
        index_loads += o.index_loads;
        block_loads += o.block_loads;
        node_updates += o.node_updates;
        batched_nodes += o.batched_nodes;
        return *this;
    }
    friend bool operator==(const TrafficCounters&, const TrafficCounters&) = default;

    [[nodiscard]] std::uint64_t bytes() const {
        return (pdf_loads + pdf_stores) * pdf_bytes + (index_loads + block_loads) * index_bytes;
    }
};

/// Counters split by time-step parity (step 0 is even).
struct RunCounters {
    TrafficCounters even;
    TrafficCounters odd;

    [[nodiscard]] TrafficCounters total() const {
        TrafficCounters t = even;
        t += odd;
        return t;
    }
    friend bool operator==(const RunCounters&, const RunCounters&) = default;
};

//---------------------------------------------------------------------------//
// PDF field
//---------------------------------------------------------------------------//

/// two_grid: values are post-collision PDFs at their origin node, read by the
///           next step through the pull adjacency.
/// in_place: AA single grid; at parity 0 slot i of node n holds the
///           pre-collision f_i(n), at parity 1 the post-collision values sit
///           at the local node in reflected slots.
enum class Storage { two_grid, in_place };

class PdfField {
  public:
    PdfField() = default;
    PdfField(FieldLayout layout, Storage storage) : layout_(layout), storage_(storage), values_(layout.size(), 0.0) {}

    [[nodiscard]] const FieldLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] Storage storage() const noexcept { return storage_; }
    [[nodiscard]] int parity() const noexcept { return parity_; }
    void set_parity(int p) noexcept { parity_ = p & 1; }

    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double* data() noexcept { return values_.data(); }
    [[nodiscard]] const double* data() const noexcept { return values_.data(); }

    [[nodiscard]] double& at(int slot, std::size_t node) { return values_[layout_.slot_offset(slot) + node]; }
    [[nodiscard]] double at(int slot, std::size_t node) const { return values_[layout_.slot_offset(slot) + node]; }

  private:
    FieldLayout layout_{};
    Storage storage_ = Storage::two_grid;
    std::vector<double> values_;
    int parity_ = 0;
};

inline Storage storage_for(Variant v) { return is_aa(v) ? Storage::in_place : Storage::two_grid; }
inline Convention convention_for(Variant v) { return is_aa(v) ? Convention::aa : Convention::pull; }

namespace detail {

inline void require_layout(const PdfField& f, const SparseLattice& lat) {
    if (!(f.layout() == lat.layout()))
        throw ShapeError("PDF field layout does not match the lattice");
}

inline void require_convention(const SparseLattice& lat, Convention c) {
    if (lat.convention() != c)
        throw StateError(c == Convention::pull ? "kernel needs a pull-convention lattice"
                                               : "kernel needs an AA-convention lattice");
}

/// Contiguous node ranges of roughly equal size.
inline std::size_t range_begin(std::size_t n, std::size_t parts, std::size_t k) { return n * k / parts; }

/// Run index where worker k of `parts` starts, balanced by node count.
inline std::size_t run_split(const BlockVector& bv, std::size_t parts, std::size_t k) {
    const std::size_t target = range_begin(bv.node_count(), parts, k);
    return static_cast<std::size_t>(std::lower_bound(bv.offsets.begin(), bv.offsets.end() - 1, target) -
                                    bv.offsets.begin());
}

template <class Body>
TrafficCounters parallel_ranges(WorkerPool* pool, std::size_t n, Body body) {
    const std::size_t parts = pool ? std::min<std::size_t>(pool->size(), std::max<std::size_t>(n, 1)) : 1;
    std::vector<TrafficCounters> partial(parts);
    auto task = [&](std::size_t k) { body(k, parts, partial[k]); };
    if (pool)
        pool->for_each(parts, task);
    else
        task(0);
    TrafficCounters sum;
    for (const auto& c : partial)
        sum += c;
    return sum;
}

inline void count_nodes(TrafficCounters& c, std::size_t nodes, bool indirect) {
    c.pdf_loads += D3Q19::q * nodes;
    c.pdf_stores += D3Q19::q * nodes;
    c.node_updates += nodes;
    if (indirect)
        c.index_loads += link_count * nodes;
}

//---------------------------------------------------------------------------//
// Range kernels. `adj` entries are flat indices into the field arrays.
//---------------------------------------------------------------------------//

inline void os_nt_nodes(const double* src, double* dst, const AdjacencyList& adj, const TrtCoefficients& k,
                        std::size_t begin, std::size_t end, TrafficCounters& c) {
    const std::size_t stride = adj.layout().stride();
    for (std::size_t n = begin; n < end; ++n) {
        double f[D3Q19::q][1];
        const auto row = adj.row(n);
        f[0][0] = src[n];
        for (int i = 1; i < D3Q19::q; ++i)
            f[i][0] = src[row[static_cast<std::size_t>(i - 1)]];
        collide_lanes<1>(f, k);
        for (int i = 0; i < D3Q19::q; ++i)
            dst[static_cast<std::size_t>(i) * stride + n] = f[i][0];
    }
    count_nodes(c, end - begin, true);
}

inline void os_nt_runs(const double* src, double* dst, const AdjacencyList& adj, const BlockVector& bv,
                       const TrtCoefficients& k, std::size_t run_begin, std::size_t run_end, TrafficCounters& c) {
    const std::size_t stride = adj.layout().stride();
    std::uint32_t idx[D3Q19::q];
    for (std::size_t r = run_begin; r < run_end; ++r) {
        const std::size_t first = bv.offsets[r];
        const std::size_t len = bv.runs[r];
        const auto row = adj.row(first);
        idx[0] = static_cast<std::uint32_t>(first);
        for (int i = 1; i < D3Q19::q; ++i)
            idx[i] = row[static_cast<std::size_t>(i - 1)];
        for (std::size_t j = 0; j < len; ++j) {
            double f[D3Q19::q][1];
            for (int i = 0; i < D3Q19::q; ++i)
                f[i][0] = src[idx[i] + j];
            collide_lanes<1>(f, k);
            for (int i = 0; i < D3Q19::q; ++i)
                dst[static_cast<std::size_t>(i) * stride + first + j] = f[i][0];
        }
        count_nodes(c, len, false);
        c.index_loads += link_count;
        c.block_loads += 1;
    }
}

inline void aa_even_nodes(double* a, std::size_t stride, const TrtCoefficients& k, std::size_t begin,
                          std::size_t end, TrafficCounters& c) {
    for (std::size_t n = begin; n < end; ++n) {
        double f[D3Q19::q][1];
        for (int i = 0; i < D3Q19::q; ++i)
            f[i][0] = a[static_cast<std::size_t>(i) * stride + n];
        collide_lanes<1>(f, k);
        for (int i = 0; i < D3Q19::q; ++i)
            a[static_cast<std::size_t>(D3Q19::opposite[static_cast<std::size_t>(i)]) * stride + n] = f[i][0];
    }
    count_nodes(c, end - begin, false);
}

inline void aa_odd_nodes(double* a, const AdjacencyList& adj, const TrtCoefficients& k, std::size_t begin,
                         std::size_t end, TrafficCounters& c) {
    for (std::size_t n = begin; n < end; ++n) {
        double f[D3Q19::q][1];
        std::uint32_t idx[D3Q19::q];
        const auto row = adj.row(n);
        idx[0] = static_cast<std::uint32_t>(n);
        for (int i = 1; i < D3Q19::q; ++i)
            idx[i] = row[static_cast<std::size_t>(i - 1)];
        for (int i = 0; i < D3Q19::q; ++i)
            f[i][0] = a[idx[i]];
        collide_lanes<1>(f, k);
        for (int i = 0; i < D3Q19::q; ++i)
            a[idx[D3Q19::opposite[static_cast<std::size_t>(i)]]] = f[i][0];
    }
    count_nodes(c, end - begin, true);
}

/// Odd AA step over whole runs. Full groups of V nodes inside a run use
/// unit-stride batched loads and stores; leftovers take the scalar path.
template <int V>
void aa_odd_runs(double* a, const AdjacencyList& adj, const BlockVector& bv, const TrtCoefficients& k,
                 std::size_t run_begin, std::size_t run_end, TrafficCounters& c) {
    std::uint32_t idx[D3Q19::q];
    for (std::size_t r = run_begin; r < run_end; ++r) {
        const std::size_t first = bv.offsets[r];
        const std::size_t len = bv.runs[r];
        const auto row = adj.row(first);
        idx[0] = static_cast<std::uint32_t>(first);
        for (int i = 1; i < D3Q19::q; ++i)
            idx[i] = row[static_cast<std::size_t>(i - 1)];

        const std::size_t batched = V > 1 ? (len / V) * V : 0;
        for (std::size_t j = 0; j < batched; j += V) {
            double f[D3Q19::q][V];
            for (int i = 0; i < D3Q19::q; ++i) {
                const double* in = a + idx[i] + j;
                for (int l = 0; l < V; ++l)
                    f[i][l] = in[l];
            }
            collide_lanes<V>(f, k);
            for (int i = 0; i < D3Q19::q; ++i) {
                double* out = a + idx[D3Q19::opposite[static_cast<std::size_t>(i)]] + j;
                for (int l = 0; l < V; ++l)
                    out[l] = f[i][l];
            }
        }
        for (std::size_t j = batched; j < len; ++j) {
            double f[D3Q19::q][1];
            for (int i = 0; i < D3Q19::q; ++i)
                f[i][0] = a[idx[i] + j];
            collide_lanes<1>(f, k);
            for (int i = 0; i < D3Q19::q; ++i)
                a[idx[D3Q19::opposite[static_cast<std::size_t>(i)]] + j] = f[i][0];
        }
        count_nodes(c, len, false);
        c.index_loads += link_count;
        c.block_loads += 1;
        c.batched_nodes += batched;
    }
}

} // namespace detail

//---------------------------------------------------------------------------//
// Single steps
//---------------------------------------------------------------------------//

/// Two-grid pull step: gather 18 PDFs through the adjacency list, collide,
/// store all 19 directly at the local node of `dst`.
inline TrafficCounters step_os_nt(const PdfField& src, PdfField& dst, const SparseLattice& lat,
                                  const TrtParams& params, WorkerPool* pool = nullptr) {
    if (&src == &dst)
        throw ShapeError("two-grid step needs distinct source and destination fields");
    detail::require_layout(src, lat);
    detail::require_layout(dst, lat);
    detail::require_convention(lat, Convention::pull);
    const TrtCoefficients k(params);
    const std::size_t n = lat.node_count();
    return detail::parallel_ranges(pool, n, [&](std::size_t w, std::size_t parts, TrafficCounters& c) {
        detail::os_nt_nodes(src.data(), dst.data(), lat.adjacency, k, detail::range_begin(n, parts, w),
                            detail::range_begin(n, parts, w + 1), c);
    });
}

/// Two-grid pull step with reduced indirect addressing: indices are loaded
/// once per run and incremented for the following nodes.
inline TrafficCounters step_os_nt_ria(const PdfField& src, PdfField& dst, const SparseLattice& lat,
                                      const TrtParams& params, WorkerPool* pool = nullptr) {
    if (&src == &dst)
        throw ShapeError("two-grid step needs distinct source and destination fields");
    detail::require_layout(src, lat);
    detail::require_layout(dst, lat);
    detail::require_convention(lat, Convention::pull);
    const TrtCoefficients k(params);
    const auto body = [&](std::size_t w, std::size_t parts, TrafficCounters& c) {
        detail::os_nt_runs(src.data(), dst.data(), lat.adjacency, lat.blocks, k,
                           detail::run_split(lat.blocks, parts, w), detail::run_split(lat.blocks, parts, w + 1), c);
    };
    return detail::parallel_ranges(pool, lat.blocks.run_count(), body);
}

namespace detail {
inline void require_in_place(const PdfField& f, const SparseLattice& lat, int parity) {
    if (f.storage() != Storage::in_place)
        throw StateError("AA step needs an in-place field");
    require_layout(f, lat);
    require_convention(lat, Convention::aa);
    if (f.parity() != parity)
        throw StateError(parity == 0 ? "even AA step applied to a field at odd parity"
                                     : "odd AA step applied to a field at even parity");
}
} // namespace detail

/// Even AA step: node-local read, collide, write to the reflected slots.
inline TrafficCounters step_aa_even(PdfField& field, const SparseLattice& lat, const TrtParams& params,
                                    WorkerPool* pool = nullptr) {
    detail::require_in_place(field, lat, 0);
    const TrtCoefficients k(params);
    const std::size_t n = lat.node_count();
    const std::size_t stride = lat.layout().stride();
    auto c = detail::parallel_ranges(pool, n, [&](std::size_t w, std::size_t parts, TrafficCounters& tc) {
        detail::aa_even_nodes(field.data(), stride, k, detail::range_begin(n, parts, w),
                              detail::range_begin(n, parts, w + 1), tc);
    });
    field.set_parity(1);
    return c;
}

/// Odd AA step: read the 18 parked PDFs through the adjacency list, collide,
/// push the results back through the entries of the opposite directions.
///
/// Every memory location is read and written by exactly one node, so node
/// ranges can be processed concurrently without border handling.
inline TrafficCounters step_aa_odd(PdfField& field, const SparseLattice& lat, const TrtParams& params,
                                   WorkerPool* pool = nullptr) {
    detail::require_in_place(field, lat, 1);
    const TrtCoefficients k(params);
    const std::size_t n = lat.node_count();
    auto c = detail::parallel_ranges(pool, n, [&](std::size_t w, std::size_t parts, TrafficCounters& tc) {
        detail::aa_odd_nodes(field.data(), lat.adjacency, k, detail::range_begin(n, parts, w),
                             detail::range_begin(n, parts, w + 1), tc);
    });
    field.set_parity(0);
    return c;
}

namespace detail {
template <int V>
TrafficCounters aa_odd_runs_step(PdfField& field, const SparseLattice& lat, const TrtCoefficients& k,
                                 WorkerPool* pool) {
    return parallel_ranges(pool, lat.blocks.run_count(), [&](std::size_t w, std::size_t parts, TrafficCounters& c) {
        aa_odd_runs<V>(field.data(), lat.adjacency, lat.blocks, k, run_split(lat.blocks, parts, w),
                       run_split(lat.blocks, parts, w + 1), c);
    });
}
} // namespace detail

/// Odd AA step with reduced indirect addressing, scalar.
inline TrafficCounters step_aa_odd_ria(PdfField& field, const SparseLattice& lat, const TrtParams& params,
                                       WorkerPool* pool = nullptr) {
    detail::require_in_place(field, lat, 1);
    auto c = detail::aa_odd_runs_step<1>(field, lat, TrtCoefficients(params), pool);
    field.set_parity(0);
    return c;
}

/// Odd AA step with reduced indirect addressing and batches of V nodes.
/// V = 1 degenerates to the scalar run kernel.
inline TrafficCounters step_aa_odd_batched(PdfField& field, const SparseLattice& lat, const TrtParams& params,
                                           int vector_width, WorkerPool* pool = nullptr) {
    detail::require_in_place(field, lat, 1);
    const TrtCoefficients k(params);
    TrafficCounters c;
    switch (vector_width) {
    case 1: c = detail::aa_odd_runs_step<1>(field, lat, k, pool); break;
    case 2: c = detail::aa_odd_runs_step<2>(field, lat, k, pool); break;
    case 4: c = detail::aa_odd_runs_step<4>(field, lat, k, pool); break;
    case 8: c = detail::aa_odd_runs_step<8>(field, lat, k, pool); break;
    default: throw InvalidParameter("vector width must be 1, 2, 4 or 8");
    }
    field.set_parity(0);
    return c;
}

//---------------------------------------------------------------------------//
// Initialization and moments
//---------------------------------------------------------------------------//

/// Pre-collision distribution of node n at the field's current time.
inline std::array<double, D3Q19::q> pre_collision(const PdfField& field, const SparseLattice& lat, std::size_t n) {
    std::array<double, D3Q19::q> f{};
    const auto v = field.values();
    const auto& adj = lat.adjacency;
    if (field.storage() == Storage::two_grid) {
        f[0] = v[n];
        for (int i = 1; i < D3Q19::q; ++i)
            f[static_cast<std::size_t>(i)] = v[adj(n, i)];
    } else if (field.parity() == 0) {
        for (int i = 0; i < D3Q19::q; ++i)
            f[static_cast<std::size_t>(i)] = field.at(i, n);
    } else {
        f[0] = v[n];
        for (int i = 1; i < D3Q19::q; ++i)
            f[static_cast<std::size_t>(i)] = v[adj(n, i)];
    }
    return f;
}

/// Converts a two-grid field into the equivalent in-place field at parity 0
/// by streaming it once. `aa_lattice` must be built on the same ordering.
inline PdfField to_in_place(const PdfField& two_grid, const SparseLattice& aa_lattice) {
    if (two_grid.storage() != Storage::two_grid)
        throw StateError("expected a two-grid field");
    detail::require_layout(two_grid, aa_lattice);
    detail::require_convention(aa_lattice, Convention::aa);
    const auto& layout = aa_lattice.layout();
    if (layout.ghosts != 0)
        throw ShapeError("conversion is only defined without ghost slots");
    PdfField out(layout, Storage::in_place);
    const std::size_t stride = layout.stride();
    for (std::size_t n = 0; n < layout.nodes; ++n) {
        out.at(0, n) = two_grid.at(0, n);
        for (int i = 1; i < D3Q19::q; ++i) {
            // The AA entry names (m, opposite(i)) or (n, i); the pull source
            // is the same node in the reflected slot.
            const std::uint32_t e = aa_lattice.adjacency(n, i);
            const std::size_t slot = e / stride;
            const std::size_t node = e % stride;
            out.at(i, n) = two_grid.at(D3Q19::opposite[slot], node);
        }
    }
    return out;
}

/// Field whose pre-collision distribution is the uniform equilibrium.
inline PdfField make_equilibrium_field(const SparseLattice& lat, Storage storage, double rho, const Vec3& u) {
    const auto feq = equilibrium(rho, u);
    PdfField two(lat.layout(), Storage::two_grid);
    for (int i = 0; i < D3Q19::q; ++i)
        std::fill_n(two.data() + lat.layout().slot_offset(i), lat.layout().nodes, feq[static_cast<std::size_t>(i)]);
    if (storage == Storage::two_grid)
        return two;
    return to_in_place(two, lat);
}

struct Moments {
    std::vector<double> rho;
    std::vector<Vec3> u;
};

/// Density and velocity per node (velocity includes half the body force).
inline Moments macroscopic(const PdfField& field, const SparseLattice& lat, const Vec3& body_force = {0, 0, 0}) {
    detail::require_layout(field, lat);
    if (field.storage() == Storage::two_grid)
        detail::require_convention(lat, Convention::pull);
    else
        detail::require_convention(lat, Convention::aa);
    const std::size_t n = lat.node_count();
    Moments m;
    m.rho.resize(n);
    m.u.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto f = pre_collision(field, lat, r);
        double rho = 0.0;
        Vec3 j{0, 0, 0};
        for (std::size_t i = 0; i < D3Q19::q; ++i) {
            rho += f[i];
            for (std::size_t d = 0; d < 3; ++d)
                j[d] += f[i] * D3Q19::c[i][d];
        }
        m.rho[r] = rho;
        for (std::size_t d = 0; d < 3; ++d)
            m.u[r][d] = (j[d] + 0.5 * rho * body_force[d]) / rho;
    }
    return m;
}

/// Total mass: every stored PDF of a fluid node counted once.
inline double total_mass(const PdfField& field) {
    const auto& layout = field.layout();
    double mass = 0.0;
    for (int i = 0; i < D3Q19::q; ++i) {
        const double* s = field.data() + layout.slot_offset(i);
        for (std::size_t n = 0; n < layout.nodes; ++n)
            mass += s[n];
    }
    return mass;
}

//---------------------------------------------------------------------------//
// Time loop
//---------------------------------------------------------------------------//

struct RunOptions {
    Variant variant = Variant::os_nt;
    TrtParams params{};
    std::size_t steps = 0;
    /// Batch width of the aa-rp odd step.
    int vector_width = 4;
    unsigned workers = 1;
    double rho0 = 1.0;
    Vec3 u0{0.0, 0.0, 0.0};
    /// Steps between NaN / negative density scans; 0 scans only at the end.
    std::size_t check_interval = 100;
};

struct RunResult {
    PdfField field;
    RunCounters counters;
    std::size_t steps = 0;
    double seconds = 0.0;
    double mflups = 0.0;
};

/// Throws InstabilityError if a node density is non-finite or not positive.
inline void check_stable(const PdfField& field, const SparseLattice& lat, std::size_t step) {
    for (std::size_t r = 0; r < lat.node_count(); ++r) {
        const auto f = pre_collision(field, lat, r);
        double rho = 0.0;
        for (double fi : f)
            rho += fi;
        if (!std::isfinite(rho) || rho <= 0.0)
            throw InstabilityError("non-finite or non-positive density at node " + std::to_string(r), step);
    }
}

/// Advances a prepared field by `opts.steps` steps of `opts.variant`.
///
/// `field` must match the variant's storage and `lat` its convention. For
/// the AA family an odd step count leaves the field at parity 1.
inline RunResult advance(PdfField field, const SparseLattice& lat, const RunOptions& opts) {
    opts.params.validate();
    const Variant v = opts.variant;
    if (field.storage() != storage_for(v))
        throw StateError("field storage does not match the variant");
    detail::require_convention(lat, convention_for(v));
    if (v == Variant::aa_rp && opts.vector_width != 1 && opts.vector_width != 2 && opts.vector_width != 4 &&
        opts.vector_width != 8)
        throw InvalidParameter("vector width must be 1, 2, 4 or 8");

    std::optional<WorkerPool> pool;
    if (opts.workers > 1)
        pool.emplace(opts.workers);
    WorkerPool* p = pool ? &*pool : nullptr;

    RunResult res;
    PdfField spare;
    if (!is_aa(v))
        spare = PdfField(field.layout(), Storage::two_grid);

    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t s = 0; s < opts.steps; ++s) {
        TrafficCounters c;
        switch (v) {
        case Variant::os_nt:
            c = step_os_nt(field, spare, lat, opts.params, p);
            std::swap(field, spare);
            break;
        case Variant::os_nt_r:
            c = step_os_nt_ria(field, spare, lat, opts.params, p);
            std::swap(field, spare);
            break;
        case Variant::aa:
            c = field.parity() == 0 ? step_aa_even(field, lat, opts.params, p)
                                    : step_aa_odd(field, lat, opts.params, p);
            break;
        case Variant::aa_r:
            c = field.parity() == 0 ? step_aa_even(field, lat, opts.params, p)
                                    : step_aa_odd_ria(field, lat, opts.params, p);
            break;
        case Variant::aa_rp:
            c = field.parity() == 0 ? step_aa_even(field, lat, opts.params, p)
                                    : step_aa_odd_batched(field, lat, opts.params, opts.vector_width, p);
            break;
        }
        (s % 2 == 0 ? res.counters.even : res.counters.odd) += c;
        if (opts.check_interval > 0 && (s + 1) % opts.check_interval == 0)
            check_stable(field, lat, s + 1);
    }
    const auto t1 = std::chrono::steady_clock::now();
    if (opts.steps > 0)
        check_stable(field, lat, opts.steps);

    res.steps = opts.steps;
    res.seconds = std::chrono::duration<double>(t1 - t0).count();
    const double updates = static_cast<double>(lat.node_count()) * static_cast<double>(opts.steps);
    res.mflups = res.seconds > 0.0 ? updates / res.seconds * 1e-6 : 0.0;
    res.field = std::move(field);
    return res;
}

/// Starts from the uniform equilibrium (rho0, u0) and runs `opts.steps` steps.
inline RunResult run(const SparseLattice& lat, const RunOptions& opts) {
    return advance(make_equilibrium_field(lat, storage_for(opts.variant), opts.rho0, opts.u0), lat, opts);
}

struct SimulationResult {
    SparseLattice lattice;
    RunResult result;
};

inline SimulationResult run(const Geometry& g, const Ordering& ordering, const RunOptions& opts) {
    SimulationResult out{build_lattice(g, ordering, convention_for(opts.variant)), {}};
    out.result = run(out.lattice, opts);
    return out;
}

} // namespace slbm
