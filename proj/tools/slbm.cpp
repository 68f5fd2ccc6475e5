// slbm: command-line front end for the sparse-lattice LBM library.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slbm/slbm.hpp"

namespace {

using nlohmann::json;
using namespace slbm;

constexpr int exit_usage = 1;
constexpr int exit_runtime = 2;

/// Bad flag values found after parsing; reported like parse errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class F>
auto as_usage(F&& f) {
    try {
        return f();
    } catch (const InvalidParameter& e) {
        throw UsageError(e.what());
    }
}

json to_json(const TrafficCounters& c) {
    return {{"pdf_loads", c.pdf_loads},       {"pdf_stores", c.pdf_stores},
            {"index_loads", c.index_loads},   {"block_loads", c.block_loads},
            {"node_updates", c.node_updates}, {"batched_nodes", c.batched_nodes},
            {"bytes", c.bytes()}};
}

json to_json(const RiaStats& s) {
    return {{"nodes", s.nodes},
            {"runs", s.runs},
            {"r", s.run_density},
            {"mean_run_length", s.mean_run_length},
            {"vectorizable_fraction", s.vectorizable_fraction}};
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

//---------------------------------------------------------------------------//
// Shared option groups
//---------------------------------------------------------------------------//

struct LatticeArgs {
    std::string geometry;
    std::string order = "ls:1";
    bool renumber = false;
    std::size_t parts = 1;

    void add(CLI::App* app, bool positional_geometry) {
        if (positional_geometry)
            app->add_option("geometry", geometry, "Geometry file")->required();
        else
            app->add_option("--geometry,-g", geometry, "Geometry file")->required();
        app->add_option("--order", order, "Enumeration: ls:B or hilbert")->capture_default_str();
        app->add_flag("--renumber", renumber, "Renumber every partition in plain lexicographic order");
        app->add_option("--parts,-p", parts, "Number of partitions")->capture_default_str()->check(CLI::PositiveNumber);
    }

    struct Built {
        Geometry geometry;
        Ordering ordering;
        PartitionMap partition;
    };

    [[nodiscard]] Built build() const {
        const OrderSpec spec = as_usage([&] { return parse_order(order); });
        Built b{load_geometry(geometry), {}, {}};
        b.ordering = make_ordering(b.geometry, spec);
        if (b.ordering.size() == 0)
            throw Error("geometry has no fluid nodes");
        if (parts > b.ordering.size())
            throw UsageError("--parts exceeds the number of fluid nodes");
        b.partition = make_partition(b.ordering, parts);
        if (renumber)
            b.ordering = renumber_within_chunks(b.ordering, b.partition.bounds);
        return b;
    }
};

//---------------------------------------------------------------------------//
// geometry
//---------------------------------------------------------------------------//

struct GeometryArgs {
    int nx = 0, ny = 0, nz = 0;
    double diameter = 20.0;
    double porosity = 0.44;
    std::uint64_t seed = 42;
    double spacing = FixedBedOptions{}.min_center_distance;
    std::size_t attempts = FixedBedOptions{}.max_attempts;
    std::string output;
};

void add_dims(CLI::App* app, GeometryArgs& a) {
    app->add_option("nx", a.nx, "Nodes in x")->required();
    app->add_option("ny", a.ny, "Nodes in y")->required();
    app->add_option("nz", a.nz, "Nodes in z")->required();
    app->add_option("-o,--output", a.output, "Output geometry file")->required();
}

int write_geometry(const Geometry& g, const std::string& path, json extra) {
    save_geometry(g, path);
    json rep{{"name", g.name()},
             {"dims", {g.dims().nx, g.dims().ny, g.dims().nz}},
             {"fluid_nodes", fluid_count(g)},
             {"output", path}};
    rep.update(extra);
    std::cout << rep.dump(2) << '\n';
    return 0;
}

//---------------------------------------------------------------------------//
// ria-stats
//---------------------------------------------------------------------------//

int cmd_ria_stats(const LatticeArgs& la, int v) {
    const auto b = la.build();
    const auto lat = build_lattice(b.geometry, b.ordering);
    const auto s = as_usage([&] { return ria_stats(lat.blocks, v); });
    json rep = to_json(s);
    rep["geometry"] = b.geometry.name();
    rep["order"] = b.ordering.label();
    rep["v"] = v;
    rep["loop_balance"] = {{"os-nt-r", loop_balance(Variant::os_nt_r, s.run_density).bytes_per_flup},
                           {"aa-r", loop_balance(Variant::aa_r, s.run_density).bytes_per_flup}};
    if (b.partition.parts() > 1)
        rep["mean_run_length_per_part"] = mean_run_length_per_chunk(lat.blocks, b.partition);
    std::cout << rep.dump(2) << '\n';
    return 0;
}

//---------------------------------------------------------------------------//
// run
//---------------------------------------------------------------------------//

struct RunArgs {
    LatticeArgs lattice;
    std::string variant = "aa-rp";
    std::size_t steps = 100;
    double omega = 1.0;
    double magic = default_magic;
    std::vector<double> force{0.0, 0.0, 0.0};
    int v = 4;
    unsigned workers = 1;

    void add(CLI::App* app) {
        lattice.add(app, false);
        app->add_option("--variant", variant, "os-nt, os-nt-r, aa, aa-r or aa-rp")->capture_default_str();
        app->add_option("--steps", steps, "Time steps")->capture_default_str();
        app->add_option("--omega", omega, "Even relaxation rate")->capture_default_str();
        app->add_option("--magic", magic, "TRT magic parameter")->capture_default_str();
        app->add_option("--force", force, "Body force fx fy fz")->expected(3);
        app->add_option("--v", v, "Batch width of aa-rp (1, 2, 4, 8)")->capture_default_str();
        app->add_option("--workers,-w", workers, "Worker threads")
            ->envname("SLBM_WORKERS")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
    }

    [[nodiscard]] RunOptions options() const {
        RunOptions o;
        as_usage([&] {
            o.variant = parse_variant(variant);
            o.params = TrtParams::from_magic(omega, magic, {force[0], force[1], force[2]});
            if (v != 1 && v != 2 && v != 4 && v != 8)
                throw InvalidParameter("--v must be 1, 2, 4 or 8");
            return 0;
        });
        o.steps = steps;
        o.vector_width = v;
        o.workers = workers;
        return o;
    }
};

struct RunReport {
    PdfField field;
    SparseLattice lattice;
    RunCounters counters;
    double seconds = 0.0;
    std::vector<std::size_t> exchanged;
    std::size_t ghost_bytes = 0;
};

RunReport execute(const LatticeArgs::Built& b, const RunOptions& opts) {
    RunReport r;
    if (b.partition.parts() > 1) {
        auto res = run_partitioned(b.geometry, b.ordering, b.partition, opts);
        r.field = std::move(res.field);
        r.lattice = std::move(res.lattice);
        r.counters = res.counters;
        r.seconds = res.seconds;
        r.exchanged = std::move(res.exchanged_bytes);
        r.ghost_bytes = res.comm.total_ghost_bytes;
    } else {
        auto sim = run(b.geometry, b.ordering, opts);
        r.field = std::move(sim.result.field);
        r.lattice = std::move(sim.lattice);
        r.counters = sim.result.counters;
        r.seconds = sim.result.seconds;
    }
    return r;
}

int cmd_run(const RunArgs& a) {
    const RunOptions opts = a.options();
    const auto b = a.lattice.build();
    const auto r = execute(b, opts);

    const auto m = macroscopic(r.field, r.lattice, opts.params.body_force);
    double mass = 0.0, umax = 0.0;
    for (std::size_t n = 0; n < m.rho.size(); ++n) {
        mass += m.rho[n];
        const auto& u = m.u[n];
        umax = std::max(umax, std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]));
    }
    const double mass0 = opts.rho0 * static_cast<double>(b.ordering.size());
    const double updates = static_cast<double>(b.ordering.size()) * static_cast<double>(opts.steps);
    const auto icb = in_cache_loop_balance(r.counters);

    json rep{{"geometry", b.geometry.name()},
             {"order", b.ordering.label()},
             {"variant", std::string(to_string(opts.variant))},
             {"nodes", b.ordering.size()},
             {"steps", opts.steps},
             {"parts", b.partition.parts()},
             {"workers", opts.workers},
             {"omega_even", opts.params.omega_even},
             {"omega_odd", opts.params.omega_odd},
             {"seconds", r.seconds},
             {"mflups", r.seconds > 0 ? updates / r.seconds * 1e-6 : 0.0},
             {"counters", {{"even", to_json(r.counters.even)}, {"odd", to_json(r.counters.odd)}}},
             {"in_cache_loop_balance", {{"even", icb.even}, {"odd", icb.odd}, {"average", icb.average}}},
             {"mass", {{"initial", mass0}, {"final", mass}, {"relative_change", (mass - mass0) / mass0}}},
             {"max_velocity", umax}};
    if (b.partition.parts() > 1) {
        std::size_t total = 0;
        for (auto x : r.exchanged)
            total += x;
        rep["ghost_bytes_per_step"] = r.ghost_bytes;
        rep["exchanged_bytes_total"] = total;
    }
    std::cout << rep.dump(2) << '\n';
    return 0;
}

//---------------------------------------------------------------------------//
// bench
//---------------------------------------------------------------------------//

struct BenchArgs {
    RunArgs run;
    std::vector<std::string> variants;
    unsigned max_workers = 1;
    int repeat = 1;
    std::string format = "csv";
};

int cmd_bench(BenchArgs& a) {
    if (a.variants.empty())
        for (Variant v : all_variants)
            a.variants.emplace_back(to_string(v));
    std::vector<Variant> variants;
    for (const auto& s : a.variants)
        variants.push_back(as_usage([&] { return parse_variant(s); }));
    RunOptions base = a.run.options();
    const auto b = a.run.lattice.build();
    const double updates = static_cast<double>(b.ordering.size()) * static_cast<double>(base.steps);

    json rows = json::array();
    for (Variant v : variants)
        for (unsigned w = 1; w <= a.max_workers; ++w) {
            RunOptions opts = base;
            opts.variant = v;
            opts.workers = w;
            std::vector<double> mflups;
            std::vector<RunCounters> counters;
            for (int k = 0; k < a.repeat; ++k) {
                const auto r = execute(b, opts);
                mflups.push_back(r.seconds > 0 ? updates / r.seconds * 1e-6 : 0.0);
                counters.push_back(r.counters);
            }
            std::sort(mflups.begin(), mflups.end());
            const bool same = std::all_of(counters.begin(), counters.end(),
                                          [&](const RunCounters& c) { return c == counters.front(); });
            const std::size_t n = mflups.size();
            const double median = n % 2 ? mflups[n / 2] : 0.5 * (mflups[n / 2 - 1] + mflups[n / 2]);
            rows.push_back({{"variant", std::string(to_string(v))},
                            {"workers", w},
                            {"repeat", a.repeat},
                            {"min_mflups", mflups.front()},
                            {"median_mflups", median},
                            {"max_mflups", mflups.back()},
                            {"bytes_per_flup", in_cache_loop_balance(counters.front()).average},
                            {"counters_consistent", same}});
        }

    if (a.format == "json") {
        std::cout << json{{"geometry", b.geometry.name()},
                          {"order", b.ordering.label()},
                          {"nodes", b.ordering.size()},
                          {"steps", base.steps},
                          {"parts", b.partition.parts()},
                          {"results", rows}}
                         .dump(2)
                  << '\n';
    } else {
        std::cout << "variant,workers,repeat,min_mflups,median_mflups,max_mflups,bytes_per_flup,counters_consistent\n";
        for (const auto& r : rows)
            std::cout << r["variant"].get<std::string>() << ',' << r["workers"] << ',' << r["repeat"] << ','
                      << fixed(r["min_mflups"], 3) << ',' << fixed(r["median_mflups"], 3) << ','
                      << fixed(r["max_mflups"], 3) << ',' << fixed(r["bytes_per_flup"], 3) << ','
                      << (r["counters_consistent"].get<bool>() ? "true" : "false") << '\n';
    }
    return 0;
}

//---------------------------------------------------------------------------//
// predict
//---------------------------------------------------------------------------//

struct PredictArgs {
    std::string machine;
    std::string variant = "all";
    double r = -1.0;
    std::string geometry;
    std::string order = "ls:1";
    std::string format = "json";
};

int cmd_predict(const PredictArgs& a) {
    std::vector<Variant> variants;
    if (a.variant == "all")
        variants = {Variant::os_nt, Variant::os_nt_r, Variant::aa, Variant::aa_r};
    else
        variants.push_back(as_usage([&] { return parse_variant(a.variant); }));

    const bool need_r = std::any_of(variants.begin(), variants.end(), uses_ria);
    if (a.r >= 0.0 && !a.geometry.empty())
        throw UsageError("--r and --geometry are mutually exclusive");
    double r = a.r;
    std::string r_source = "--r";
    if (!a.geometry.empty()) {
        const auto g = load_geometry(a.geometry);
        const auto spec = as_usage([&] { return parse_order(a.order); });
        const auto lat = build_lattice(g, make_ordering(g, spec));
        r = ria_stats(lat.blocks, 1).run_density;
        r_source = g.name() + " " + a.order;
    }
    if (need_r && r < 0.0)
        throw UsageError("RIA variants need --r or --geometry");
    if (r > 1.0)
        throw UsageError("--r must lie in [0, 1]");

    const auto m = load_machine_model(a.machine);

    json cols = json::array();
    for (Variant v : variants) {
        const auto lb = loop_balance(v, uses_ria(v) ? r : 0.0);
        json perf = json::object();
        for (double f : m.frequencies_ghz)
            perf[fixed(f, 1)] = roofline(m, v, lb.bytes_per_flup, f);
        cols.push_back({{"variant", std::string(to_string(v))},
                        {"pattern", bandwidth_pattern(v)},
                        {"loop_balance", lb.bytes_per_flup},
                        {"bounds", {lb.lower, lb.upper}},
                        {"mflups", perf}});
    }
    json ecm = json::array();
    for (double f : m.frequencies_ghz)
        for (EcmCase c : {EcmCase::even, EcmCase::odd_best, EcmCase::odd_worst}) {
            const auto p = ecm_predict(m, c, f);
            ecm.push_back({{"case", to_string(c)},
                           {"ghz", f},
                           {"binding_port", p.binding_port},
                           {"t_core", p.t_core},
                           {"cachelines", p.cachelines},
                           {"t_l1_l2", p.t_l1_l2},
                           {"t_l2_l3", p.t_l2_l3},
                           {"t_l3_mem", p.t_l3_mem},
                           {"t_data", p.t_data},
                           {"t_total", p.t_total},
                           {"single_core_mflups", p.single_core_mflups},
                           {"saturation_cores", p.saturation_cores},
                           {"scaling_mflups", p.scaling}});
        }

    if (a.format == "json") {
        json rep{{"machine", m.name}, {"roofline", cols}, {"ecm", ecm}};
        if (r >= 0.0)
            rep["r"] = {{"value", r}, {"source", r_source}};
        std::cout << rep.dump(2) << '\n';
    } else if (a.format == "csv") {
        std::cout << "model,variant,case,ghz,loop_balance,mflups,t_total,saturation_cores\n";
        for (const auto& c : cols)
            for (const auto& [f, p] : c["mflups"].items())
                std::cout << "roofline," << c["variant"].get<std::string>() << ",," << f << ','
                          << fixed(c["loop_balance"], 2) << ',' << fixed(p, 1) << ",,\n";
        for (const auto& e : ecm)
            std::cout << "ecm,aa-rp," << e["case"].get<std::string>() << ',' << fixed(e["ghz"], 1) << ",,"
                      << fixed(e["single_core_mflups"], 1) << ',' << fixed(e["t_total"], 1) << ','
                      << e["saturation_cores"] << '\n';
    } else {
        const int w = 10;
        std::cout << "Roofline (" << m.name << ")\n";
        std::cout << std::left << std::setw(26) << "" << std::right;
        for (const auto& c : cols)
            std::cout << std::setw(w) << c["variant"].get<std::string>();
        std::cout << "\n" << std::left << std::setw(26) << "Loop Balance [B/FLUP]" << std::right;
        for (const auto& c : cols)
            std::cout << std::setw(w) << fixed(c["loop_balance"], 0);
        std::cout << '\n';
        for (double f : m.frequencies_ghz) {
            std::cout << std::left << std::setw(26) << ("P @ " + fixed(f, 1) + " GHz [MFLUP/s]") << std::right;
            for (const auto& c : cols)
                std::cout << std::setw(w) << fixed(c["mflups"][fixed(f, 1)], 1);
            std::cout << '\n';
        }
        std::cout << "\nECM (cycles per 8 updates)\n";
        std::cout << std::left << std::setw(10) << "case" << std::right << std::setw(8) << "GHz" << std::setw(10)
                  << "t_core" << std::setw(10) << "t_data" << std::setw(10) << "t_total" << std::setw(12)
                  << "MFLUP/s" << std::setw(12) << "sat.cores" << '\n';
        for (const auto& e : ecm)
            std::cout << std::left << std::setw(10) << e["case"].get<std::string>() << std::right << std::setw(8)
                      << fixed(e["ghz"], 1) << std::setw(10) << fixed(e["t_core"], 1) << std::setw(10)
                      << fixed(e["t_data"], 1) << std::setw(10) << fixed(e["t_total"], 1) << std::setw(12)
                      << fixed(e["single_core_mflups"], 1) << std::setw(12)
                      << e["saturation_cores"].get<unsigned>() << '\n';
        if (r >= 0.0)
            std::cout << "\nrun density r = " << fixed(r, 6) << " (" << r_source << ")\n";
    }
    return 0;
}

//---------------------------------------------------------------------------//
// partition-report
//---------------------------------------------------------------------------//

int cmd_partition_report(const LatticeArgs& la, const std::string& format) {
    const auto b = la.build();
    const auto lat = build_lattice(b.geometry, b.ordering);
    const auto rep = comm_stats(lat, b.partition);
    const auto runs = mean_run_length_per_chunk(lat.blocks, b.partition);

    if (format == "csv") {
        std::cout << "partition,size,ghost_pdfs,ghost_bytes,neighbors,mean_run_length\n";
        for (std::size_t p = 0; p < rep.parts.size(); ++p) {
            const auto& pc = rep.parts[p];
            std::cout << p << ',' << pc.size << ',' << pc.ghost_pdfs_in << ',' << pc.ghost_bytes << ','
                      << pc.neighbors << ',' << fixed(runs[p], 4) << '\n';
        }
        return 0;
    }
    json parts = json::array();
    for (std::size_t p = 0; p < rep.parts.size(); ++p) {
        const auto& pc = rep.parts[p];
        parts.push_back({{"partition", p},
                         {"size", pc.size},
                         {"ghost_pdfs", pc.ghost_pdfs_in},
                         {"ghost_bytes", pc.ghost_bytes},
                         {"neighbors", pc.neighbors},
                         {"mean_run_length", runs[p]}});
    }
    std::cout << json{{"geometry", b.geometry.name()},
                      {"order", b.ordering.label()},
                      {"parts", rep.parts.size()},
                      {"total_ghost_bytes", rep.total_ghost_bytes},
                      {"max_ghost_bytes", rep.max_ghost_bytes},
                      {"mean_ghost_bytes", rep.mean_ghost_bytes},
                      {"max_neighbors", rep.max_neighbors},
                      {"mean_neighbors", rep.mean_neighbors},
                      {"partitions", parts}}
                     .dump(2)
              << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-lattice lattice Boltzmann engine and performance models", "slbm"};
    app.require_subcommand(1);

    GeometryArgs geo;
    auto* geometry = app.add_subcommand("geometry", "Generate a geometry file");
    geometry->require_subcommand(1);
    auto* channel = geometry->add_subcommand("channel", "Empty square channel");
    add_dims(channel, geo);
    auto* bed = geometry->add_subcommand("fixed-bed", "Channel packed with random spheres");
    add_dims(bed, geo);
    bed->add_option("--diameter", geo.diameter, "Sphere diameter in nodes")->capture_default_str();
    bed->add_option("--porosity", geo.porosity, "Target porosity")->capture_default_str();
    bed->add_option("--seed", geo.seed, "Random seed")->capture_default_str();
    bed->add_option("--spacing", geo.spacing, "Minimum center distance in diameters")->capture_default_str();
    bed->add_option("--max-attempts", geo.attempts, "Insertion attempts before giving up")->capture_default_str();

    LatticeArgs ria;
    int ria_v = 4;
    auto* ria_cmd = app.add_subcommand("ria-stats", "Run-length statistics of the adjacency list");
    ria.add(ria_cmd, true);
    ria_cmd->add_option("--v", ria_v, "Vector width")->capture_default_str()->check(CLI::PositiveNumber);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Run a simulation and report counters");
    run_args.add(run_cmd);

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Throughput per variant and worker count");
    bench.run.add(bench_cmd);
    bench_cmd->add_option("--variants", bench.variants, "Variants to measure (default: all)");
    bench_cmd->add_option("--max-workers", bench.max_workers, "Measure 1..k workers")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--repeat", bench.repeat, "Repetitions per point")->capture_default_str()->check(
        CLI::PositiveNumber);
    bench_cmd->add_option("--format", bench.format, "csv or json")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));

    PredictArgs pred;
    auto* pred_cmd = app.add_subcommand("predict", "Roofline and ECM predictions");
    pred_cmd->add_option("--machine,-m", pred.machine, "Machine model JSON")->required();
    pred_cmd->add_option("--variant", pred.variant, "Variant or 'all'")->capture_default_str();
    pred_cmd->add_option("--r", pred.r, "Run density for RIA variants")->check(CLI::Range(0.0, 1.0));
    pred_cmd->add_option("--geometry,-g", pred.geometry, "Take the run density from this geometry");
    pred_cmd->add_option("--order", pred.order, "Enumeration used with --geometry")->capture_default_str();
    pred_cmd->add_option("--format", pred.format, "json, csv or table")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "csv", "table"}));

    LatticeArgs part;
    std::string part_format = "json";
    auto* part_cmd = app.add_subcommand("partition-report", "Per-partition communication statistics");
    part.add(part_cmd, false);
    part_cmd->add_option("--format", part_format, "json or csv")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "csv"}));

    auto usage = [&](const std::string& msg) {
        std::cerr << "slbm: " << msg << "\n\n";
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        if (!sub->get_subcommands().empty())
            sub = sub->get_subcommands().front();
        std::cerr << sub->help();
        return exit_usage;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* sub = &app;
        while (!sub->get_subcommands().empty())
            sub = sub->get_subcommands().front();
        std::cout << sub->help();
        return 0;
    } catch (const CLI::ParseError& e) {
        return usage(e.what());
    }

    try {
        if (channel->parsed())
            return write_geometry(make_channel(geo.nx, geo.ny, geo.nz), geo.output, json::object());
        if (bed->parsed()) {
            FixedBedOptions opts;
            opts.min_center_distance = geo.spacing;
            opts.max_attempts = geo.attempts;
            FixedBedInfo info;
            const auto g = as_usage([&] {
                return make_fixed_bed(geo.nx, geo.ny, geo.nz, geo.diameter, geo.porosity, geo.seed, opts, &info);
            });
            return write_geometry(g, geo.output,
                                  {{"porosity", info.porosity},
                                   {"spheres", info.spheres},
                                   {"attempts", info.attempts},
                                   {"seed", geo.seed},
                                   {"diameter", geo.diameter}});
        }
        if (ria_cmd->parsed())
            return cmd_ria_stats(ria, ria_v);
        if (run_cmd->parsed())
            return cmd_run(run_args);
        if (bench_cmd->parsed())
            return cmd_bench(bench);
        if (pred_cmd->parsed())
            return cmd_predict(pred);
        if (part_cmd->parsed())
            return cmd_partition_report(part, part_format);
    } catch (const UsageError& e) {
        return usage(e.what());
    } catch (const InvalidGeometry& e) {
        // Dimension checks of the generators are argument errors.
        if (geometry->parsed())
            return usage(e.what());
        std::cerr << "slbm: " << e.what() << '\n';
        return exit_runtime;
    } catch (const std::exception& e) {
        std::cerr << "slbm: " << e.what() << '\n';
        return exit_runtime;
    }
    return usage("no subcommand given");
}
