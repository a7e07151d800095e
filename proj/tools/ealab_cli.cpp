// ealab command-line driver.
//
// Every subcommand writes its files plus manifest.json into --out. Exit codes:
// 0 success, 1 bad input or configuration, 2 internal invariant violation.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "ealab/ealab.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ealab;

namespace {

struct Output {
    fs::path dir;
    std::vector<std::string> files;

    std::ofstream open(const std::string& name) {
        fs::create_directories(dir);
        std::ofstream f(dir / name);
        if (!f) throw ConfigError("cannot write " + (dir / name).string());
        files.push_back(name);
        return f;
    }
};

json config_echo(const ConfigFile& file) {
    json j = json::object();
    for (const auto& [k, v] : file.entries) j[k] = v;
    return j;
}

ConfigFile load_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in);
}

json experiment_json(const ExperimentConfig& c) {
    json j;
    j["side"] = c.side;
    j["betas"] = c.betas;
    j["replicas"] = c.replicas;
    j["chains"] = c.chains;
    j["sweeps"] = c.effective_sweeps();
    j["seed"] = c.seed;
    j["cycle_len_cap"] = c.cycle_len_cap;
    j["forest_decay"] = c.forest_decay;
    j["forest_theta"] = c.forest_theta ? json(*c.forest_theta) : json("auto");
    j["window"] = c.effective_window();
    j["jobs"] = c.jobs;
    return j;
}

void write_manifest(Output& out, const std::string& command, json params, const ConfigFile& cfg, json results = {}) {
    json m;
    m["format_version"] = kFormatVersion;
    m["command"] = command;
    m["parameters"] = std::move(params);
    m["config"] = config_echo(cfg);
    if (!results.is_null()) m["results"] = std::move(results);
    m["outputs"] = out.files;
    fs::create_directories(out.dir);
    std::ofstream f(out.dir / "manifest.json");
    f << m.dump(2) << "\n";
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot " + path);
    return read_snapshot(in);
}

std::optional<double> parse_theta(const std::string& s) {
    if (s.empty() || s == "auto") return std::nullopt;
    return parse_double(s, "theta");
}

// Flags that were given on the command line override the config file.
struct Overrides {
    std::optional<int> side, replicas, chains, sweeps, window, jobs, cycle_len_cap;
    std::vector<double> betas;
    std::optional<std::uint64_t> seed;
    std::optional<double> decay;
    std::string theta;

    void add_to(CLI::App* app, bool experiment) {
        app->add_option("--side", side, "torus side length L");
        app->add_option("--beta", betas, "inverse temperature(s)")->delimiter(',');
        app->add_option("--seed", seed, "master seed");
        app->add_option("--sweeps", sweeps, "burn-in sweeps (default 1000 L)");
        if (!experiment) return;
        app->add_option("--replicas", replicas, "disorder replicas");
        app->add_option("--chains", chains, "chains per replica and beta");
        app->add_option("--window", window, "analysis window side (default L - 2)");
        app->add_option("--jobs", jobs, "worker threads");
        app->add_option("--cycle-len-cap", cycle_len_cap, "census cycle length cap");
        app->add_option("--decay", decay, "forest cycle-rate decay");
        app->add_option("--theta", theta, "forest batch interval, or 'auto'");
    }

    void apply(ExperimentConfig& c) const {
        if (side) c.side = *side;
        if (!betas.empty()) c.betas = betas;
        if (seed) c.seed = *seed;
        if (sweeps) c.sweeps = *sweeps;
        if (replicas) c.replicas = *replicas;
        if (chains) c.chains = *chains;
        if (window) c.window = *window;
        if (jobs) c.jobs = *jobs;
        if (cycle_len_cap) c.cycle_len_cap = *cycle_len_cap;
        if (decay) c.forest_decay = *decay;
        if (!theta.empty()) c.forest_theta = parse_theta(theta);
    }
};

AnimalMode parse_mode(const std::string& m) {
    if (m == "vertex") return AnimalMode::Vertex;
    if (m == "edge") return AnimalMode::Edge;
    if (m == "cycles") return AnimalMode::CyclesThroughOrigin;
    throw ValidationError("unknown mode '" + m + "' (vertex, edge, cycles)");
}

json pipeline_row_json(const PipelineRow& r) {
    json j;
    j["unsatisfied_edges"] = r.unsatisfied_edges;
    j["forest_edges"] = r.forest_edges;
    j["bridge_edges"] = r.bridge_edges;
    j["regions"] = r.regions;
    j["colors"] = r.colors;
    j["encounter_points"] = r.encounter_points;
    j["flip_delta"] = hexfloat(r.flip_delta);
    j["hypothesis"] = r.hypothesis;
    j["decreased"] = r.decreased;
    j["invariants_ok"] = r.invariants_ok;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edwards-Anderson unsatisfied-cluster laboratory"};
    app.require_subcommand(1, 1);
    const auto started = std::chrono::steady_clock::now();

    std::string out_dir;
    std::string config_path;

    // sample
    auto* sample = app.add_subcommand("sample", "equilibrated (couplings, spins) snapshot");
    Overrides sample_ov;
    sample_ov.add_to(sample, false);
    sample->add_option("--config", config_path, "key = value config file");
    sample->add_option("--out", out_dir, "output directory");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "forest, bridges, regions and flip for a snapshot");
    std::string snapshot_path;
    Overrides analyze_ov;
    analyze->add_option("--snapshot", snapshot_path, "snapshot file")->required();
    analyze->add_option("--seed", analyze_ov.seed, "forest seed");
    analyze->add_option("--window", analyze_ov.window, "window side (default L - 2)");
    analyze->add_option("--decay", analyze_ov.decay, "forest cycle-rate decay");
    analyze->add_option("--theta", analyze_ov.theta, "forest batch interval, or 'auto'");
    analyze->add_option("--config", config_path, "key = value config file");
    analyze->add_option("--out", out_dir, "output directory");

    // enumerate
    auto* enumerate = app.add_subcommand("enumerate", "exact lattice-animal or cycle counts");
    std::string mode = "vertex";
    int n_max = 8;
    std::uint64_t enum_seed = 1;
    enumerate->add_option("--mode", mode, "vertex, edge or cycles");
    enumerate->add_option("--max", n_max, "largest size or cycle length");
    enumerate->add_option("--seed", enum_seed, "accepted for uniformity; counts are exact");
    enumerate->add_option("--out", out_dir, "output directory");

    // forest
    auto* forest = app.add_subcommand("forest", "loop-erased spanning forest of an unsatisfied set");
    std::string input_csv;
    double max_intervals = std::numeric_limits<double>::infinity();
    Overrides forest_ov;
    auto* forest_src = forest->add_option_group("source");
    forest_src->add_option("--snapshot", snapshot_path, "snapshot file");
    forest_src->add_option("--input", input_csv, "dual-subgraph CSV");
    forest_src->require_option(1);
    forest->add_option("--seed", forest_ov.seed, "forest seed");
    forest->add_option("--decay", forest_ov.decay, "cycle-rate decay");
    forest->add_option("--theta", forest_ov.theta, "batch interval, or 'auto'");
    forest->add_option("--max-intervals", max_intervals, "stop with an error past this interval");
    forest->add_option("--out", out_dir, "output directory");

    // flip-check
    auto* flip = app.add_subcommand("flip-check", "frequency of fully unsatisfied plaquette cycles vs exp(-2 beta |w|)");
    Overrides flip_ov;
    flip_ov.add_to(flip, false);
    int n_cycles = 20;
    std::size_t trials = 100'000;
    flip->add_option("--cycles", n_cycles, "random plaquette cycles");
    flip->add_option("--trials", trials, "samples (one per sweep)");
    flip->add_option("--config", config_path, "key = value config file");
    flip->add_option("--out", out_dir, "output directory");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "batch experiments over (beta, replica, chain)");
    Overrides pipe_ov;
    pipe_ov.add_to(pipeline, true);
    std::string stage;
    std::optional<int> origin;
    pipeline->add_option("--stage", stage, "full, clusters or census")
        ->check(CLI::IsMember({"full", "clusters", "census"}));
    pipeline->add_option("--origin", origin, "census dual vertex id");
    pipeline->add_option("--config", config_path, "key = value config file");
    pipeline->add_option("--out", out_dir, "output directory");

    // verify
    auto* verify = app.add_subcommand("verify", "built-in property suites");
    bool quick = false;
    std::uint64_t verify_seed = 1;
    verify->add_flag("--quick", quick, "smaller instances");
    verify->add_option("--seed", verify_seed, "suite seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto file = load_config(config_path);
        ExperimentConfig cfg;
        apply_config(file, cfg);
        Output out{out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir), {}};

        if (sample->parsed()) {
            sample_ov.apply(cfg);
            if (cfg.betas.size() != 1) throw ConfigError("sample takes exactly one beta");
            cfg.validate();
            const TorusGeometry g(cfg.side);
            const auto w = sample_couplings(g, disorder_seed(cfg.seed, 0));
            Rng rng(chain_seed(cfg.seed, 0, 0, 0));
            const auto s = equilibrate(w, cfg.betas[0], cfg.effective_sweeps(), rng);
            const auto unsat = unsatisfied_set(w, s);
            {
                auto f = out.open("snapshot.txt");
                write_snapshot(f, Snapshot{w, s, cfg.betas[0]});
            }
            {
                auto f = out.open("unsatisfied.csv");
                write_dual_subgraph_csv(f, unsat);
            }
            json res;
            res["energy"] = hexfloat(torus_hamiltonian(w, s));
            res["unsatisfied_edges"] = unsat.edge_count();
            res["largest_cluster"] = components(unsat).largest_vertices;
            json params;
            params["side"] = cfg.side;
            params["beta"] = cfg.betas[0];
            params["seed"] = cfg.seed;
            params["sweeps"] = cfg.effective_sweeps();
            write_manifest(out, "sample", params, file, res);
        } else if (analyze->parsed()) {
            const auto snap = load_snapshot(snapshot_path);
            cfg.side = snap.couplings.geometry().side();
            analyze_ov.apply(cfg);
            cfg.validate();
            Rng rng(derive_seed(cfg.seed, {4}));
            const auto& w = snap.couplings;
            const auto& s = snap.spins;
            const auto unsat = unsatisfied_set(w, s);
            ForestParams fp;
            fp.decay = cfg.forest_decay;
            fp.theta = cfg.forest_theta;
            const auto f = extract_forest(unsat, fp, rng);
            const BoxGeometry window(cfg.effective_window(), w.geometry(), Coord{1, 1});
            auto dec = decompose_regions(find_bridges(f, window));
            color_regions(dec);
            Rng row_rng(derive_seed(cfg.seed, {4}));
            const auto row = pipeline_on(w, s, cfg, row_rng);
            const auto tree = count_encounter_points(f, window);
            {
                auto o = out.open("unsatisfied.csv");
                write_dual_subgraph_csv(o, unsat);
            }
            {
                auto o = out.open("forest.csv");
                write_dual_subgraph_csv(o, f);
            }
            {
                auto o = out.open("bridges.csv");
                write_dual_subgraph_csv(o, bridge_subgraph(dec));
            }
            {
                auto o = out.open("regions.csv");
                write_region_grid_csv(o, dec, false);
            }
            {
                auto o = out.open("colors.csv");
                write_region_grid_csv(o, dec, true);
            }
            {
                auto o = out.open("pipeline.csv");
                write_pipeline_csv(o, {row});
            }
            {
                auto o = out.open("components.csv");
                o << format_header() << "size,count\n";
                for (const auto& [size, count] : components(unsat).vertex_histogram) o << size << "," << count << "\n";
            }
            json res = pipeline_row_json(row);
            json types = json::object();
            for (const auto& [t, n] : tree.type_counts) types[to_string(t)] = n;
            res["tree_types"] = types;
            json params;
            params["snapshot"] = snapshot_path;
            params["seed"] = cfg.seed;
            params["window"] = cfg.effective_window();
            params["forest_decay"] = cfg.forest_decay;
            params["forest_theta"] = cfg.forest_theta ? json(*cfg.forest_theta) : json("auto");
            write_manifest(out, "analyze", params, file, res);
        } else if (enumerate->parsed()) {
            const auto m = parse_mode(mode);
            const auto table = enumerate_animals(m, n_max);
            {
                auto o = out.open("counts.csv");
                write_count_table_csv(o, table);
            }
            json res;
            if (m != AnimalMode::CyclesThroughOrigin) {
                const auto v = check_animal_bounds(table);
                res["bounds_pass"] = v.pass;
                res["below_2_pow_n"] = v.strict_lower_exceptions;
            }
            json params;
            params["mode"] = to_string(m);
            params["max"] = n_max;
            params["seed"] = enum_seed;
            write_manifest(out, "enumerate", params, file, res);
        } else if (forest->parsed()) {
            forest_ov.apply(cfg);
            DualSubgraph g = [&] {
                if (!snapshot_path.empty()) {
                    const auto snap = load_snapshot(snapshot_path);
                    return unsatisfied_set(snap.couplings, snap.spins);
                }
                std::ifstream in(input_csv);
                if (!in) throw ConfigError("cannot open " + input_csv);
                return read_dual_subgraph_csv(in);
            }();
            ForestParams fp;
            fp.decay = cfg.forest_decay;
            fp.theta = cfg.forest_theta;
            fp.max_intervals = max_intervals;
            Rng rng(derive_seed(cfg.seed, {4}));
            const auto run = extract_forest_run(g, fp, rng);
            {
                auto o = out.open("forest.csv");
                write_dual_subgraph_csv(o, run.forest);
            }
            json res;
            res["input_edges"] = g.edge_count();
            res["forest_edges"] = run.forest.edge_count();
            res["cycles"] = run.system.cycles.size();
            res["theta"] = hexfloat(run.system.theta);
            res["intervals_with_removals"] = run.steps.size();
            json params;
            params["source"] = snapshot_path.empty() ? input_csv : snapshot_path;
            params["seed"] = cfg.seed;
            params["forest_decay"] = cfg.forest_decay;
            params["forest_theta"] = cfg.forest_theta ? json(*cfg.forest_theta) : json("auto");
            write_manifest(out, "forest", params, file, res);
        } else if (flip->parsed()) {
            flip_ov.apply(cfg);
            cfg.validate();
            const TorusGeometry g(cfg.side);
            const auto w = sample_couplings(g, disorder_seed(cfg.seed, 0));
            Rng pick(derive_seed(cfg.seed, {5}));
            const auto cycles = random_plaquette_cycles(g, n_cycles, pick);
            std::vector<std::vector<FlipBoundResult>> per_beta(cfg.betas.size());
            run_work_queue(cfg.betas.size(), cfg.jobs, [&](std::size_t b) {
                Rng rng(chain_seed(cfg.seed, 0, 0, static_cast<int>(b)));
                per_beta[b] = run_flip_bound_check(w, cfg.betas[b], cycles, trials, rng, cfg.effective_sweeps());
            });
            {
                auto o = out.open("flip_bound.csv");
                for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
                    std::stringstream ss;
                    write_flip_bound_csv(ss, cfg.betas[b], per_beta[b]);
                    auto text = ss.str();
                    if (b > 0) text = text.substr(text.find('\n', text.find('\n') + 1) + 1);  // drop repeated header
                    o << text;
                }
            }
            {
                auto o = out.open("flip_tail.csv");
                for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
                    std::stringstream ss;
                    write_flip_tail_csv(ss, cfg.betas[b], per_beta[b]);
                    auto text = ss.str();
                    if (b > 0) text = text.substr(text.find('\n', text.find('\n') + 1) + 1);
                    o << text;
                }
            }
            int failures = 0;
            for (const auto& v : per_beta)
                for (const auto& r : v) failures += !r.pass;
            json res;
            res["cycles_checked"] = per_beta.size() * cycles.size();
            res["failures"] = failures;
            json params = experiment_json(cfg);
            params["cycles"] = n_cycles;
            params["trials"] = trials;
            write_manifest(out, "flip-check", params, file, res);
        } else if (pipeline->parsed()) {
            pipe_ov.apply(cfg);
            if (stage.empty()) stage = file.get("stage").value_or("full");
            if (stage != "full" && stage != "clusters" && stage != "census")
                throw ConfigError("stage must be full, clusters or census");
            if (!origin)
                if (auto o = file.get("origin")) origin = static_cast<int>(parse_int(*o, "origin"));
            cfg.validate();
            json res;
            if (stage == "full") {
                const auto rep = run_pipeline(cfg);
                auto o = out.open("pipeline.csv");
                write_pipeline_csv(o, rep.rows);
                int ok = 0, hyp = 0, dec = 0;
                for (const auto& r : rep.rows) {
                    ok += r.invariants_ok;
                    hyp += r.hypothesis;
                    dec += r.hypothesis && r.decreased;
                }
                res["runs"] = rep.rows.size();
                res["invariants_ok"] = ok;
                res["hypothesis_runs"] = hyp;
                res["hypothesis_decreased"] = dec;
                if (ok != static_cast<int>(rep.rows.size()))
                    throw InvariantViolation("pipeline invariants failed on " +
                                             std::to_string(rep.rows.size() - static_cast<std::size_t>(ok)) + " runs");
            } else if (stage == "clusters") {
                const auto rep = run_cluster_sweep(cfg);
                {
                    auto o = out.open("clusters.csv");
                    write_cluster_rows_csv(o, rep.rows);
                }
                {
                    auto o = out.open("cluster_histogram.csv");
                    write_cluster_histogram_csv(o, rep.rows);
                }
                {
                    auto o = out.open("cluster_summary.csv");
                    o << format_header() << "beta,runs,mean_density,mean_largest_fraction,se_largest_fraction\n";
                    for (const auto& b : rep.by_beta)
                        o << hexfloat(b.beta) << "," << b.runs << "," << hexfloat(b.mean_density) << ","
                          << hexfloat(b.mean_largest_fraction) << "," << hexfloat(b.se_largest_fraction) << "\n";
                }
                res["runs"] = rep.rows.size();
            } else {
                const auto rep = run_unsat_cycle_census(cfg, DualVertexId{origin.value_or(0)}, cfg.cycle_len_cap);
                auto o = out.open("census.csv");
                write_census_csv(o, rep);
                res["lambda2_hat"] = hexfloat(rep.lambda2_hat);
                res["rows"] = rep.rows.size();
            }
            json params = experiment_json(cfg);
            params["stage"] = stage;
            if (stage == "census") params["origin"] = origin.value_or(0);
            write_manifest(out, "pipeline", params, file, res);
        } else if (verify->parsed()) {
            const auto rep = run_verify(quick, verify_seed);
            for (const auto& r : rep.results)
                std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << (r.detail.empty() ? "" : ": " + r.detail) << "\n";
            std::cout << rep.passed() << " passed, " << rep.failed() << " failed\n";
            if (rep.failed() > 0) return 2;
        }
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::cerr << "done in " << secs << " s\n";
    return 0;
}
