#pragma once

// Text formats. Every file starts with "# format-version: 1".
//
// Snapshot:
//   # format-version: 1
//   ealab-snapshot
//   side <L>
//   seed <disorder seed>
//   beta <hexfloat or inf>
//   weights
//   <2 L^2 hexfloat lines, edge id order>
//   spins
//   <L lines of '+'/'-', row y = 0 first>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ealab/analysis.hpp"
#include "ealab/disorder.hpp"
#include "ealab/enumerate.hpp"
#include "ealab/error.hpp"
#include "ealab/experiments.hpp"
#include "ealab/frustration.hpp"
#include "ealab/gibbs.hpp"

namespace ealab {

inline constexpr int kFormatVersion = 1;
inline constexpr int kConfigSchemaVersion = 1;

inline std::string format_header() { return "# format-version: " + std::to_string(kFormatVersion) + "\n"; }

/// Exact round-trip text for a double.
inline std::string hexfloat(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

inline double parse_double(const std::string& text, const std::string& what) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size() || std::isnan(v))
        throw ValidationError("cannot parse " + what + " from '" + text + "'");
    return v;
}

inline long long parse_int(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::logic_error&) {
        throw ValidationError("cannot parse " + what + " from '" + text + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::logic_error&) {
        throw ValidationError("cannot parse " + what + " from '" + text + "'");
    }
}

namespace detail {

inline void expect_header(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "# format-version: 1")
        throw ValidationError("missing or unsupported format-version header");
}

inline std::string next_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(std::string("unexpected end of input reading ") + what);
    return line;
}

inline std::string keyed_value(std::istream& in, const std::string& key) {
    const auto line = next_line(in, key.c_str());
    if (line.rfind(key + " ", 0) != 0) throw ValidationError("expected '" + key + " <value>', got '" + line + "'");
    return line.substr(key.size() + 1);
}

}  // namespace detail

// ---------------------------------------------------------------- snapshots

struct Snapshot {
    Couplings couplings;
    SpinConfig spins;
    double beta = 0.0;
};

inline void write_snapshot(std::ostream& out, const Snapshot& s) {
    const auto& g = s.couplings.geometry();
    out << format_header() << "ealab-snapshot\n"
        << "side " << g.side() << "\n"
        << "seed " << s.couplings.seed() << "\n"
        << "beta " << hexfloat(s.beta) << "\n"
        << "weights\n";
    for (double w : s.couplings.weights()) out << hexfloat(w) << "\n";
    out << "spins\n";
    for (int y = 0; y < g.side(); ++y) {
        for (int x = 0; x < g.side(); ++x) out << (s.spins[g.vertex(x, y)] == 1 ? '+' : '-');
        out << "\n";
    }
}

inline Snapshot read_snapshot(std::istream& in) {
    detail::expect_header(in);
    if (detail::next_line(in, "magic") != "ealab-snapshot") throw ValidationError("not a snapshot file");
    const auto side = parse_int(detail::keyed_value(in, "side"), "side");
    if (side < 3 || side > 4096) throw ValidationError("snapshot side out of range");
    const auto seed = parse_u64(detail::keyed_value(in, "seed"), "seed");
    const double beta = parse_double(detail::keyed_value(in, "beta"), "beta");
    InverseTemperature checked(beta);
    (void)checked;
    const TorusGeometry g(static_cast<int>(side));
    if (detail::next_line(in, "weights") != "weights") throw ValidationError("expected 'weights'");
    std::vector<double> w(static_cast<std::size_t>(g.edge_count()));
    for (auto& x : w) {
        x = parse_double(detail::next_line(in, "weights"), "coupling");
        if (!std::isfinite(x)) throw ValidationError("couplings must be finite");
    }
    if (detail::next_line(in, "spins") != "spins") throw ValidationError("expected 'spins'");
    std::vector<Spin> spins(static_cast<std::size_t>(g.vertex_count()));
    for (int y = 0; y < g.side(); ++y) {
        const auto row = detail::next_line(in, "spins");
        if (static_cast<int>(row.size()) != g.side()) throw ValidationError("spin row has the wrong length");
        for (int x = 0; x < g.side(); ++x) {
            if (row[static_cast<std::size_t>(x)] != '+' && row[static_cast<std::size_t>(x)] != '-')
                throw ValidationError("spin rows may only contain '+' and '-'");
            spins[static_cast<std::size_t>(index_of(g.vertex(x, y)))] = row[static_cast<std::size_t>(x)] == '+' ? 1 : -1;
        }
    }
    return {Couplings(g, std::move(w), seed), SpinConfig(g, std::move(spins)), beta};
}

// ---------------------------------------------------------------- CSV tables

inline void write_dual_subgraph_csv(std::ostream& out, const DualSubgraph& s) {
    out << format_header() << "# side: " << s.geometry().side() << "\ndual_edge\n";
    for (auto d : s.edges()) out << index_of(d) << "\n";
}

inline DualSubgraph read_dual_subgraph_csv(std::istream& in) {
    detail::expect_header(in);
    const auto side_line = detail::next_line(in, "side");
    if (side_line.rfind("# side: ", 0) != 0) throw ValidationError("expected '# side: <L>'");
    const TorusGeometry g(static_cast<int>(parse_int(side_line.substr(8), "side")));
    if (detail::next_line(in, "column header") != "dual_edge") throw ValidationError("expected 'dual_edge' header");
    DualSubgraph s(g);
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        const auto id = parse_int(line, "dual edge id");
        if (id < 0 || id >= g.dual_edge_count()) throw RangeError("dual edge id out of range: " + line);
        s.insert(DualEdgeId{static_cast<std::int32_t>(id)});
    }
    return s;
}

inline void write_count_table_csv(std::ostream& out, const CountTable& t) {
    out << format_header() << "# mode: " << to_string(t.mode) << "\nn,count,lower_bound,upper_bound\n";
    for (const auto& [n, count] : t.counts) {
        UInt128 upper = 1;
        for (int k = 0; k < n; ++k) upper *= kAnimalGrowthBase;
        out << n << "," << count << "," << (std::uint64_t{1} << (n - 1)) << "," << to_decimal(upper) << "\n";
    }
}

/// Region labels as an N x N grid, row y = 0 first.
inline void write_region_grid_csv(std::ostream& out, const BridgeDecomposition& d, bool colors) {
    const auto& box = d.window;
    out << format_header() << "# " << (colors ? "color" : "region") << " grid, side " << box.side() << "\n";
    for (int y = 0; y < box.side(); ++y) {
        for (int x = 0; x < box.side(); ++x) {
            const int r = d.region[static_cast<std::size_t>(index_of(box.vertex(x, y)))];
            out << (x ? "," : "") << (colors ? d.colors[static_cast<std::size_t>(r)] : r);
        }
        out << "\n";
    }
}

inline void write_cluster_rows_csv(std::ostream& out, const std::vector<ClusterRow>& rows) {
    out << format_header()
        << "beta,replica,chain,unsatisfied_density,frustrated_fraction,components,largest_cluster,largest_fraction,"
           "overlap_with_chain0\n";
    for (const auto& r : rows)
        out << hexfloat(r.beta) << "," << r.replica << "," << r.chain << "," << hexfloat(r.unsatisfied_density) << ","
            << hexfloat(r.frustrated_fraction) << "," << r.components << "," << r.largest_cluster << ","
            << hexfloat(r.largest_fraction) << "," << hexfloat(r.overlap_with_chain0) << "\n";
}

inline void write_cluster_histogram_csv(std::ostream& out, const std::vector<ClusterRow>& rows) {
    out << format_header() << "beta,replica,chain,size,count\n";
    for (const auto& r : rows)
        for (const auto& [size, count] : r.histogram)
            out << hexfloat(r.beta) << "," << r.replica << "," << r.chain << "," << size << "," << count << "\n";
}

inline void write_census_csv(std::ostream& out, const CensusReport& rep) {
    out << format_header() << "beta,replica,chain,length,cycles,unsatisfied,shape_curve\n";
    for (const auto& r : rep.rows)
        out << hexfloat(r.beta) << "," << r.replica << "," << r.chain << "," << r.length << "," << r.cycles << ","
            << r.unsatisfied << "," << hexfloat(rep.shape_curve.at(r.length)) << "\n";
}

inline void write_pipeline_csv(std::ostream& out, const std::vector<PipelineRow>& rows) {
    out << format_header()
        << "beta,replica,chain,unsatisfied_edges,forest_edges,cycles,bridge_edges,bridge_weight,boundary_weight,"
           "regions,colors,coloring_proper,encounter_points,encounter_bound,flip_color,flip_delta,recomputed_delta,"
           "five_color_bound,hypothesis,decreased,invariants_ok\n";
    for (const auto& r : rows)
        out << hexfloat(r.beta) << "," << r.replica << "," << r.chain << "," << r.unsatisfied_edges << ","
            << r.forest_edges << "," << r.cycles_erased << "," << r.bridge_edges << "," << hexfloat(r.bridge_weight)
            << "," << hexfloat(r.boundary_weight) << "," << r.regions << "," << r.colors << "," << r.coloring_proper
            << "," << r.encounter_points << "," << r.encounter_bound << "," << r.flip_color << ","
            << hexfloat(r.flip_delta) << "," << hexfloat(r.recomputed_delta) << "," << hexfloat(r.five_color_bound)
            << "," << r.hypothesis << "," << r.decreased << "," << r.invariants_ok << "\n";
}

inline void write_flip_bound_csv(std::ostream& out, double beta, const std::vector<FlipBoundResult>& rs) {
    out << format_header() << "beta,cycle,abs_weight,trials,hits,frequency,bound,standard_error,pass\n";
    for (std::size_t k = 0; k < rs.size(); ++k) {
        const auto& r = rs[k];
        out << hexfloat(beta) << "," << k << "," << hexfloat(r.abs_weight) << "," << r.trials << "," << r.hits << ","
            << hexfloat(r.frequency) << "," << hexfloat(r.bound) << "," << hexfloat(r.standard_error) << "," << r.pass
            << "\n";
    }
}

inline void write_flip_tail_csv(std::ostream& out, double beta, const std::vector<FlipBoundResult>& rs) {
    out << format_header() << "beta,cycle,c,frequency,bound\n";
    for (std::size_t k = 0; k < rs.size(); ++k)
        for (const auto& t : rs[k].tail)
            out << hexfloat(beta) << "," << k << "," << hexfloat(t.c) << "," << hexfloat(t.frequency) << ","
                << hexfloat(t.bound) << "\n";
}

// ---------------------------------------------------------------- config

/// Parsed key = value file. `entries` keeps the raw text in file order.
struct ConfigFile {
    std::vector<std::pair<std::string, std::string>> entries;

    std::optional<std::string> get(const std::string& key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return v;
        return std::nullopt;
    }
};

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "schema_version", "side",        "betas",        "replicas",     "chains", "sweeps",
        "seed",           "output_dir",  "cycle_len_cap", "forest_decay", "forest_theta",
        "window",         "jobs",        "stage",        "origin"};
    return keys;
}

/// Lines of `key = value`; '#' starts a comment. Unknown or repeated keys
/// and a schema_version other than 1 are errors.
inline ConfigFile parse_config(std::istream& in) {
    ConfigFile cfg;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto& known = config_keys();
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (cfg.get(key)) throw ConfigError("config key '" + key + "' repeated");
        cfg.entries.emplace_back(key, value);
    }
    if (auto v = cfg.get("schema_version"); v && *v != std::to_string(kConfigSchemaVersion))
        throw ConfigError("unsupported config schema_version " + *v);
    return cfg;
}

inline std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ConfigError("empty entry in " + what);
        try {
            out.push_back(parse_double(item.substr(b, e - b + 1), what));
        } catch (const ValidationError& err) {
            throw ConfigError(err.what());
        }
    }
    return out;
}

/// Applies the experiment keys of `file` onto `cfg`.
inline void apply_config(const ConfigFile& file, ExperimentConfig& cfg) {
    auto as_int = [](const std::string& v, const std::string& k) {
        try {
            const auto x = parse_int(v, k);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) throw ConfigError(k + " out of range");
            return static_cast<int>(x);
        } catch (const ValidationError& e) {
            throw ConfigError(e.what());
        }
    };
    auto as_double = [](const std::string& v, const std::string& k) {
        try {
            return parse_double(v, k);
        } catch (const ValidationError& e) {
            throw ConfigError(e.what());
        }
    };
    for (const auto& [k, v] : file.entries) {
        if (k == "side") cfg.side = as_int(v, k);
        else if (k == "betas") cfg.betas = parse_double_list(v, k);
        else if (k == "replicas") cfg.replicas = as_int(v, k);
        else if (k == "chains") cfg.chains = as_int(v, k);
        else if (k == "sweeps") cfg.sweeps = as_int(v, k);
        else if (k == "seed") {
            try {
                cfg.seed = parse_u64(v, k);
            } catch (const ValidationError& e) {
                throw ConfigError(e.what());
            }
        } else if (k == "output_dir") cfg.output_dir = v;
        else if (k == "cycle_len_cap") cfg.cycle_len_cap = as_int(v, k);
        else if (k == "forest_decay") cfg.forest_decay = as_double(v, k);
        else if (k == "forest_theta")
            cfg.forest_theta = v == "auto" ? std::nullopt : std::optional<double>(as_double(v, k));
        else if (k == "window") cfg.window = as_int(v, k);
        else if (k == "jobs") cfg.jobs = as_int(v, k);
    }
}

}  // namespace ealab
