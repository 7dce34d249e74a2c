// pdsort: exact and PDE-based approximate non-dominated sorting.
//
// Subcommands: sort-exact, solve-pde, estimate-density, rank-approx,
// eval-accuracy, experiment (pde-rate | stochastic-rate). Every run writes a
// JSON manifest (resolved config, input digests, timings) next to its primary
// output so results can be reproduced byte for byte.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pdsort/approx_rank.hpp"
#include "pdsort/density.hpp"
#include "pdsort/evaluation.hpp"
#include "pdsort/exact_sort.hpp"
#include "pdsort/grid.hpp"
#include "pdsort/hj_solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pdsort;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a64_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path.string() + " for digesting");
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return hash;
}

std::string digest_string(std::uint64_t hash) {
    char text[32];
    std::snprintf(text, sizeof(text), "fnv1a64:%016llx", static_cast<unsigned long long>(hash));
    return text;
}

class Stopwatch {
public:
    void lap(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        laps_[name] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }
    json to_json() const {
        json j;
        for (const auto& [name, seconds] : laps_) j[name] = seconds;
        return j;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    std::map<std::string, double> laps_;
};

struct GlobalOptions {
    int threads = 0; // 0 = all available
    fs::path output_dir = ".";
    bool verbose = false;

    fs::path resolve(const fs::path& p) const {
        return p.is_absolute() ? p : output_dir / p;
    }
};

void apply_threads(const GlobalOptions& g) {
#ifdef _OPENMP
    if (g.threads > 0) omp_set_num_threads(g.threads);
#else
    (void)g;
#endif
}

// Manifest layout: the "config" and "inputs" sections identify a run; equal
// sections imply byte-identical numeric outputs.
void write_manifest(const GlobalOptions& g, const std::string& command, const json& config,
                    const json& inputs, const json& outputs, const Stopwatch& timer,
                    const fs::path& primary_output) {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config;
    manifest["inputs"] = inputs;
    manifest["outputs"] = outputs;
    manifest["timings_seconds"] = timer.to_json();
    manifest["versions"] = {
        {"pdsort", kVersion},
#if defined(__VERSION__)
        {"compiler", __VERSION__},
#endif
#ifdef _OPENMP
        {"openmp", _OPENMP},
#endif
    };
#ifdef _OPENMP
    manifest["threads"] = g.threads > 0 ? g.threads : omp_get_max_threads();
#else
    manifest["threads"] = 1;
#endif

    fs::path stem = primary_output.filename();
    if (stem.empty()) stem = command;
    fs::path path = g.output_dir / (stem.string() + ".manifest.json");
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write manifest " + path.string());
    out << manifest.dump(2) << '\n';
    if (g.verbose) std::cerr << "manifest: " << path.string() << '\n';
}

json output_entry(const fs::path& path) {
    return json{{"path", path.string()}, {"digest", digest_string(fnv1a64_file(path))}};
}

std::pair<double, double> parse_domain(const std::string& text) {
    const auto sep = text.find("..");
    if (sep == std::string::npos)
        throw CLI::ValidationError("--domain", "expected the form lo..hi");
    try {
        const double lo = std::stod(text.substr(0, sep));
        const double hi = std::stod(text.substr(sep + 2));
        if (!(lo < hi)) throw CLI::ValidationError("--domain", "needs lo < hi");
        return {lo, hi};
    } catch (const std::invalid_argument&) {
        throw CLI::ValidationError("--domain", "expected numbers in lo..hi");
    }
}

GridSpec hypercube_grid(const std::vector<std::int64_t>& nodes, double lo, double hi) {
    if (nodes.empty()) throw CLI::ValidationError("--grid", "needs at least one count");
    for (auto n : nodes) {
        if (n < 3) throw CLI::ValidationError("--grid", "needs at least 3 nodes per axis");
        if (n != nodes.front())
            throw CLI::ValidationError(
                "--grid", "node counts must be equal on a hypercube domain");
    }
    const auto d = static_cast<std::size_t>(nodes.size());
    const double spacing = (hi - lo) / static_cast<double>(nodes.front() - 1);
    return GridSpec::from_shape(std::vector<double>(d, lo),
                                std::vector<std::int64_t>(nodes.begin(), nodes.end()), spacing);
}

NodeSolveConfig parse_node_config(const std::string& method, double tolerance, int dim) {
    NodeSolveConfig cfg;
    cfg.tolerance = tolerance;
    if (method == "auto")
        cfg.method = dim == 2 ? NodeSolveConfig::Method::closed_form_2d
                              : NodeSolveConfig::Method::binary_search;
    else if (method == "closed2d")
        cfg.method = NodeSolveConfig::Method::closed_form_2d;
    else if (method == "bisect")
        cfg.method = NodeSolveConfig::Method::binary_search;
    else if (method == "newton")
        cfg.method = NodeSolveConfig::Method::newton_safeguarded;
    else
        throw CLI::ValidationError("--method", "expected auto|closed2d|bisect|newton");
    return cfg;
}

std::vector<std::int64_t> parse_counts(const std::vector<std::string>& items,
                                       const char* flag) {
    std::vector<std::int64_t> out;
    for (const auto& item : items) {
        try {
            const double v = std::stod(item);
            if (!(v >= 1.0)) throw std::invalid_argument("");
            out.push_back(static_cast<std::int64_t>(std::llround(v)));
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "expected positive counts, got '" + item + "'");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// sort-exact

int run_sort_exact(const GlobalOptions& g, const std::string& input,
                   const std::string& output, const std::string& method) {
    Stopwatch timer;
    const fs::path in_path = input;
    const PointCloud cloud = read_points_csv(in_path);
    timer.lap("load");

    SortMethod m = SortMethod::automatic;
    if (method == "bruteforce")
        m = SortMethod::brute_force;
    else if (method == "fast2d")
        m = SortMethod::fast_2d;
    else if (method != "auto")
        throw CLI::ValidationError("--method", "expected auto|bruteforce|fast2d");

    const DepthVector depths = nondominated_sort(cloud, m);
    timer.lap("sort");

    const fs::path out_path = g.resolve(output);
    write_ranks_csv(depths, out_path, /*integral=*/true);
    timer.lap("write");

    write_manifest(g, "sort-exact",
                   json{{"input", input}, {"output", output}, {"method", method}},
                   json{{"input", output_entry(in_path)}},
                   json{{"depths", output_entry(out_path)}}, timer, output);
    return 0;
}

// ---------------------------------------------------------------------------
// solve-pde

int run_solve_pde(const GlobalOptions& g, const std::string& density_arg,
                  const std::vector<std::string>& grid_items, const std::string& domain,
                  bool domain_given, double tolerance, const std::string& method,
                  const std::string& output, bool residual_report,
                  const std::string& export_csv) {
    Stopwatch timer;
    json inputs = json::object();

    GridField density;
    json density_desc;
    if (density_arg.rfind("builtin:", 0) == 0) {
        const std::string name = density_arg.substr(8);
        const auto counts = parse_counts(grid_items, "--grid");
        if (counts.empty())
            throw CLI::ValidationError("--grid", "required for builtin densities");
        const auto [lo, hi] = parse_domain(domain);
        const GridSpec spec = hypercube_grid(counts, lo, hi);
        const auto analytic = make_analytic_case(name, spec.dim);
        density = density_grid(analytic, spec);
        density_desc = {{"builtin", name}, {"grid", counts}, {"domain", domain}};
    } else if (density_arg.rfind("file:", 0) == 0) {
        if (!grid_items.empty())
            throw CLI::ValidationError("--grid", "grid comes from the density file");
        if (domain_given)
            throw CLI::ValidationError("--domain", "domain comes from the density file");
        const fs::path path = density_arg.substr(5);
        density = load_grid(path);
        for (double v : density.values)
            if (v < 0.0) throw DomainError(path.string() + ": negative density values");
        inputs["density"] = output_entry(path);
        density_desc = {{"file", path.string()}};
    } else {
        throw CLI::ValidationError("--density", "expected builtin:f1..f4 or file:PATH");
    }
    timer.lap("load");

    const NodeSolveConfig cfg = parse_node_config(method, tolerance, density.spec.dim);
    const GridField solution = solve_scheme(density, cfg);
    timer.lap("solve");

    const fs::path out_path = g.resolve(output);
    save_grid(solution, out_path);
    json outputs{{"solution", output_entry(out_path)}};
    if (!export_csv.empty()) {
        const fs::path csv_path = g.resolve(export_csv);
        std::ofstream csv(csv_path);
        if (!csv) throw DomainError("cannot open " + csv_path.string());
        export_grid_csv(solution, csv);
        outputs["csv"] = output_entry(csv_path);
    }
    timer.lap("write");

    json config{{"density", density_desc}, {"tolerance", tolerance},
                {"method", method},        {"output", output},
                {"residual_report", residual_report}};

    if (residual_report) {
        const auto report = scheme_residual(solution, density);
        double density_max = 0.0;
        for (double v : density.values) density_max = std::max(density_max, v);
        json r{{"max_abs_residual", report.max_abs_residual},
               {"location", report.location},
               {"bound", residual_bound(solution.spec, cfg, density_max)}};
        std::cout << r.dump(2) << '\n';
        outputs["residual"] = r;
    }

    write_manifest(g, "solve-pde", config, inputs, outputs, timer, output);
    return 0;
}

// ---------------------------------------------------------------------------
// estimate-density

int run_estimate_density(const GlobalOptions& g, const std::string& input, std::int64_t k,
                         std::uint64_t seed, const std::vector<std::string>& grid_items,
                         const std::string& domain, const std::string& output,
                         const std::string& export_csv) {
    Stopwatch timer;
    const fs::path in_path = input;
    const PointCloud cloud = read_points_csv(in_path);
    timer.lap("load");

    const auto counts = parse_counts(grid_items, "--grid");
    GridSpec spec;
    if (domain.empty()) {
        std::int64_t nodes = 0;
        for (auto n : counts) nodes = std::max(nodes, n);
        spec = auto_fit_grid(cloud, nodes);
    } else {
        const auto [lo, hi] = parse_domain(domain);
        spec = hypercube_grid(counts, lo, hi);
    }

    const PointCloud picked = subsample(cloud, SubsampleSpec{k, seed});
    const GridField estimate = histogram_density(picked, spec);
    timer.lap("estimate");

    const fs::path out_path = g.resolve(output);
    save_grid(estimate, out_path);
    json outputs{{"density", output_entry(out_path)}};
    if (!export_csv.empty()) {
        const fs::path csv_path = g.resolve(export_csv);
        std::ofstream csv(csv_path);
        if (!csv) throw DomainError("cannot open " + csv_path.string());
        export_grid_csv(estimate, csv);
        outputs["csv"] = output_entry(csv_path);
    }
    timer.lap("write");

    write_manifest(g, "estimate-density",
                   json{{"input", input},
                        {"k", k},
                        {"seed", seed},
                        {"grid", counts},
                        {"domain", domain.empty() ? "auto" : domain},
                        {"output", output}},
                   json{{"input", output_entry(in_path)}}, outputs, timer, output);
    return 0;
}

// ---------------------------------------------------------------------------
// rank-approx

int run_rank_approx(const GlobalOptions& g, const std::string& input, std::int64_t k,
                    std::uint64_t seed, const std::vector<std::string>& grid_items,
                    const std::string& domain, const std::string& h_rule,
                    const std::string& method, double tolerance, const std::string& output) {
    Stopwatch timer;
    const fs::path in_path = input;
    const PointCloud cloud = read_points_csv(in_path);
    timer.lap("load");

    const auto counts = parse_counts(grid_items, "--grid");
    RankerConfig cfg;
    if (domain.empty()) {
        std::int64_t nodes = 0;
        for (auto n : counts) nodes = std::max(nodes, n);
        cfg.grid = auto_fit_grid(cloud, nodes);
    } else {
        const auto [lo, hi] = parse_domain(domain);
        cfg.grid = hypercube_grid(counts, lo, hi);
    }
    cfg.k = k;
    cfg.seed = seed;
    cfg.node.tolerance = tolerance;
    if (cfg.grid.dim == 2) cfg.node.method = NodeSolveConfig::Method::closed_form_2d;

    if (h_rule == "equalize")
        cfg.h_rule = RankerConfig::HRule::equalize;
    else if (h_rule != "explicit")
        throw CLI::ValidationError("--h-rule", "expected explicit|equalize");

    DepthVector ranks;
    if (method == "pde")
        ranks = rank_points_pde(cloud, cfg);
    else if (method == "subset")
        ranks = rank_points_subset(cloud, cfg);
    else
        throw CLI::ValidationError("--method", "expected pde|subset");
    timer.lap("rank");

    const fs::path out_path = g.resolve(output);
    write_ranks_csv(ranks, out_path, /*integral=*/false);
    timer.lap("write");

    write_manifest(g, "rank-approx",
                   json{{"input", input},
                        {"k", k},
                        {"seed", seed},
                        {"grid", counts},
                        {"domain", domain.empty() ? "auto" : domain},
                        {"h_rule", h_rule},
                        {"method", method},
                        {"tolerance", tolerance},
                        {"output", output}},
                   json{{"input", output_entry(in_path)}},
                   json{{"ranks", output_entry(out_path)}}, timer, output);
    return 0;
}

// ---------------------------------------------------------------------------
// eval-accuracy

int run_eval_accuracy(const GlobalOptions& g, const std::string& ranks_a_path,
                      const std::string& ranks_b_path, std::int64_t pairs, int reps,
                      std::uint64_t seed, const std::string& report_path) {
    Stopwatch timer;
    const auto a = read_ranks_csv(ranks_a_path);
    const auto b = read_ranks_csv(ranks_b_path);
    timer.lap("load");

    json result{{"n", a.size()}};
    if (pairs > 0) {
        const auto est = accuracy_montecarlo(a, b, pairs, reps, seed);
        result["accuracy_mean"] = est.mean;
        result["accuracy_ci95"] = est.ci95;
        result["rep_estimates"] = est.rep_estimates;
        result["pairs"] = pairs;
        result["reps"] = reps;
        result["seed"] = seed;
    } else {
        if (a.size() > 20000)
            throw DomainError("exact accuracy is quadratic; pass --pairs for n > 20000");
        result["accuracy_exact"] = accuracy_exact(a, b);
    }
    timer.lap("evaluate");

    std::cout << result.dump(2) << '\n';

    json outputs = json::object();
    fs::path primary = "eval-accuracy";
    if (!report_path.empty()) {
        const fs::path out_path = g.resolve(report_path);
        std::ofstream out(out_path);
        if (!out) throw DomainError("cannot open " + out_path.string());
        out << result.dump(2) << '\n';
        outputs["report"] = output_entry(out_path);
        primary = report_path;
    }
    timer.lap("write");

    write_manifest(g, "eval-accuracy",
                   json{{"ranks_a", ranks_a_path},
                        {"ranks_b", ranks_b_path},
                        {"pairs", pairs},
                        {"reps", reps},
                        {"seed", seed}},
                   json{{"ranks_a", output_entry(ranks_a_path)},
                        {"ranks_b", output_entry(ranks_b_path)}},
                   outputs, timer, primary);
    return 0;
}

// ---------------------------------------------------------------------------
// experiment

int run_pde_rate(const GlobalOptions& g, const std::string& case_name, int dim,
                 const std::vector<std::string>& grid_items, double tolerance,
                 const std::string& method, const std::string& report_path) {
    Stopwatch timer;
    const auto sizes = parse_counts(grid_items, "--grids");
    const auto analytic = make_analytic_case(case_name, dim);
    const NodeSolveConfig cfg = parse_node_config(method, tolerance, dim);
    auto report = pde_rate_experiment(analytic, sizes, cfg);
    timer.lap("experiment");

    const std::string text = report_to_json(report);
    std::cout << text << '\n';
    const fs::path out_path = g.resolve(report_path);
    {
        std::ofstream out(out_path);
        if (!out) throw DomainError("cannot open " + out_path.string());
        out << text << '\n';
    }
    timer.lap("write");

    write_manifest(g, "experiment pde-rate",
                   json{{"case", case_name},
                        {"dim", dim},
                        {"grids", sizes},
                        {"tolerance", tolerance},
                        {"method", method},
                        {"report", report_path}},
                   json::object(), json{{"report", output_entry(out_path)}}, timer,
                   report_path);
    return 0;
}

int run_stochastic_rate(const GlobalOptions& g, const std::string& case_name,
                        const std::vector<std::string>& size_items, int reps,
                        std::uint64_t seed, const std::string& report_path) {
    Stopwatch timer;
    const auto sizes = parse_counts(size_items, "--sizes");
    const auto analytic = make_analytic_case(case_name, 2);
    auto report = stochastic_rate_experiment(analytic, sizes, reps, seed);
    timer.lap("experiment");

    const std::string text = report_to_json(report);
    std::cout << text << '\n';
    const fs::path out_path = g.resolve(report_path);
    {
        std::ofstream out(out_path);
        if (!out) throw DomainError("cannot open " + out_path.string());
        out << text << '\n';
    }
    timer.lap("write");

    write_manifest(g, "experiment stochastic-rate",
                   json{{"case", case_name},
                        {"sizes", sizes},
                        {"reps", reps},
                        {"seed", seed},
                        {"report", report_path}},
                   json::object(), json{{"report", output_entry(out_path)}}, timer,
                   report_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and PDE-based approximate non-dominated sorting"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--threads", g.threads, "worker threads (0 = all available)")
        ->envname("PD_THREADS");
    app.add_option("--output-dir", g.output_dir, "directory for outputs and manifests");
    app.add_flag("-v,--verbose", g.verbose, "chatty progress output");

    // sort-exact
    std::string se_input, se_output, se_method = "auto";
    auto* se = app.add_subcommand("sort-exact", "exact non-dominated sorting of a point CSV");
    se->add_option("--input", se_input, "points CSV, one point per line")->required();
    se->add_option("--output", se_output, "depths CSV, one integer per line")->required();
    se->add_option("--method", se_method, "auto|bruteforce|fast2d");

    // solve-pde
    std::string sp_density, sp_domain = "0..1", sp_method = "auto", sp_output, sp_csv;
    std::vector<std::string> sp_grid;
    double sp_tol = 1e-6;
    bool sp_residual = false;
    auto* sp = app.add_subcommand("solve-pde", "solve the upwind scheme for a density");
    sp->add_option("--density", sp_density, "builtin:f1..f4 or file:grid.bin")->required();
    sp->add_option("--grid", sp_grid, "nodes per axis, e.g. 100,100")->delimiter(',');
    sp->add_option("--domain", sp_domain, "hypercube range lo..hi (default 0..1)");
    sp->add_option("--tol", sp_tol, "node-solve absolute tolerance");
    sp->add_option("--method", sp_method, "auto|closed2d|bisect|newton");
    sp->add_option("--output", sp_output, "solution grid container")->required();
    sp->add_flag("--residual-report", sp_residual, "print the re-substitution residual");
    sp->add_option("--export-csv", sp_csv, "also export the solution as CSV");

    // estimate-density
    std::string ed_input, ed_domain, ed_output, ed_csv;
    std::vector<std::string> ed_grid;
    std::int64_t ed_k = 0;
    std::uint64_t ed_seed = 0;
    auto* ed = app.add_subcommand("estimate-density", "histogram density of a subsample");
    ed->add_option("--input", ed_input, "points CSV")->required();
    ed->add_option("--k", ed_k, "subsample size")->required();
    ed->add_option("--seed", ed_seed, "subsample seed");
    ed->add_option("--grid", ed_grid, "nodes per axis")->required()->delimiter(',');
    ed->add_option("--domain", ed_domain, "hypercube range lo..hi (default: fit the cloud)");
    ed->add_option("--output", ed_output, "density grid container")->required();
    ed->add_option("--export-csv", ed_csv, "also export the density as CSV");

    // rank-approx
    std::string ra_input, ra_domain, ra_hrule = "explicit", ra_method = "pde", ra_output;
    std::vector<std::string> ra_grid;
    std::int64_t ra_k = 0;
    std::uint64_t ra_seed = 0;
    double ra_tol = 1e-6;
    auto* ra = app.add_subcommand("rank-approx", "fast approximate non-dominated sorting");
    ra->add_option("--input", ra_input, "points CSV")->required();
    ra->add_option("--k", ra_k, "subsample size")->required();
    ra->add_option("--seed", ra_seed, "subsample seed");
    ra->add_option("--grid", ra_grid, "nodes per axis")->required()->delimiter(',');
    ra->add_option("--domain", ra_domain, "hypercube range lo..hi (default: fit the cloud)");
    ra->add_option("--h-rule", ra_hrule, "explicit|equalize");
    ra->add_option("--method", ra_method, "pde|subset");
    ra->add_option("--tol", ra_tol, "node-solve absolute tolerance");
    ra->add_option("--output", ra_output, "ranks CSV")->required();

    // eval-accuracy
    std::string ea_a, ea_b, ea_report;
    std::int64_t ea_pairs = 0;
    int ea_reps = 10;
    std::uint64_t ea_seed = 0;
    auto* ea = app.add_subcommand("eval-accuracy", "pairwise order agreement of two rankings");
    ea->add_option("--ranks-a", ea_a, "reference ranks CSV")->required();
    ea->add_option("--ranks-b", ea_b, "candidate ranks CSV")->required();
    ea->add_option("--pairs", ea_pairs, "Monte-Carlo pairs per repetition (0 = exact)");
    ea->add_option("--reps", ea_reps, "Monte-Carlo repetitions");
    ea->add_option("--seed", ea_seed, "Monte-Carlo seed");
    ea->add_option("--report", ea_report, "also write the JSON report to a file");

    // experiment
    auto* ex = app.add_subcommand("experiment", "convergence-rate studies");
    ex->require_subcommand(1);

    std::string pr_case = "f3", pr_method = "auto", pr_report;
    std::vector<std::string> pr_grids;
    int pr_dim = 2;
    double pr_tol = 1e-6;
    auto* pr = ex->add_subcommand("pde-rate", "scheme error versus grid spacing");
    pr->add_option("--case", pr_case, "f1|f2|f3|f4");
    pr->add_option("--dim", pr_dim, "dimension (default 2)");
    pr->add_option("--grids", pr_grids, "nodes per axis, increasing")->required()->delimiter(',');
    pr->add_option("--tol", pr_tol, "node-solve absolute tolerance");
    pr->add_option("--method", pr_method, "auto|closed2d|bisect|newton");
    pr->add_option("--report", pr_report, "JSON report path")->required();

    std::string sr_case = "f3", sr_report;
    std::vector<std::string> sr_sizes;
    int sr_reps = 10;
    std::uint64_t sr_seed = 0;
    auto* sr = ex->add_subcommand("stochastic-rate", "sorted-sample error versus sample count");
    sr->add_option("--case", sr_case, "f1|f2|f3|f4");
    sr->add_option("--sizes", sr_sizes, "sample counts, e.g. 1e3,1e4,1e5")->required()->delimiter(',');
    sr->add_option("--reps", sr_reps, "independent repetitions");
    sr->add_option("--seed", sr_seed, "sampling seed");
    sr->add_option("--report", sr_report, "JSON report path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        apply_threads(g);
        if (!fs::exists(g.output_dir)) fs::create_directories(g.output_dir);

        if (se->parsed()) return run_sort_exact(g, se_input, se_output, se_method);
        if (sp->parsed())
            return run_solve_pde(g, sp_density, sp_grid, sp_domain,
                                 sp->count("--domain") > 0, sp_tol, sp_method, sp_output,
                                 sp_residual, sp_csv);
        if (ed->parsed())
            return run_estimate_density(g, ed_input, ed_k, ed_seed, ed_grid, ed_domain,
                                        ed_output, ed_csv);
        if (ra->parsed())
            return run_rank_approx(g, ra_input, ra_k, ra_seed, ra_grid, ra_domain, ra_hrule,
                                   ra_method, ra_tol, ra_output);
        if (ea->parsed())
            return run_eval_accuracy(g, ea_a, ea_b, ea_pairs, ea_reps, ea_seed, ea_report);
        if (ex->parsed()) {
            if (pr->parsed())
                return run_pde_rate(g, pr_case, pr_dim, pr_grids, pr_tol, pr_method, pr_report);
            if (sr->parsed())
                return run_stochastic_rate(g, sr_case, sr_sizes, sr_reps, sr_seed, sr_report);
        }
        std::cerr << "usage error: no subcommand\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
