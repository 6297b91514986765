// sweep.hpp: Sweep configuration, parallel evaluation over a coupling grid,
// CSV serialization, method-vs-exact error tables and resonance reports.

#pragma once

#include "resonancekit/closed_form.hpp"
#include "resonancekit/fock.hpp"
#include "resonancekit/methods.hpp"
#include "resonancekit/spectrum.hpp"
#include "resonancekit/transforms.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

namespace resonancekit {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct SweepConfig {
    double omega{1.0};
    double omega0{1.0};
    double g_min{0.0};
    double g_max{1.5};
    int g_steps{151};
    int n_max{60};
    int n_levels{12};
    std::vector<Method> methods{Method::exact, Method::jc, Method::strong_rt};
    double tol_deg{1e-8};
    double tol_active{1e-10};
    std::string output_path{"spectrum.csv"};

    std::vector<double> grid() const {
        std::vector<double> g;
        if (g_steps == 1) {
            g.push_back(g_min);
            return g;
        }
        for (int i = 0; i < g_steps; ++i) {
            g.push_back(g_min + (g_max - g_min) * i / (g_steps - 1));
        }
        return g;
    }

    TruncationConfig truncation() const { return TruncationConfig{n_max, 0}; }

    void validate() const {
        if (!(omega > 0.0) || !std::isfinite(omega)) {
            throw ConfigError("omega", "must be > 0");
        }
        if (!(omega0 >= 0.0) || !std::isfinite(omega0)) {
            throw ConfigError("omega0", "must be >= 0");
        }
        if (!(g_min >= 0.0) || !std::isfinite(g_min)) {
            throw ConfigError("g_min", "must be >= 0");
        }
        if (!(g_max >= g_min) || !std::isfinite(g_max)) {
            throw ConfigError("g_max", "must be >= g_min");
        }
        if (g_steps < 1) {
            throw ConfigError("g_steps", "must be >= 1");
        }
        if (g_steps > 1 && !(g_max > g_min)) {
            throw ConfigError("g_max", "must exceed g_min when g_steps > 1");
        }
        if (n_max < 3) {
            throw ConfigError("n_max", "must be >= 3");
        }
        if (n_levels < 1) {
            throw ConfigError("n_levels", "must be >= 1");
        }
        if (n_levels > 2 * (n_max + 1) - 2) {
            throw ConfigError("n_levels", "must not exceed 2 (n_max + 1) - 2");
        }
        if (methods.empty()) {
            throw ConfigError("methods", "must name at least one method");
        }
        for (const Method m : methods) {
            if (requires_resonance(m) && omega0 != omega) {
                throw ConfigError("omega0", "method " + to_string(m) + " requires omega0 == omega");
            }
        }
        if (!(tol_deg > 0.0)) {
            throw ConfigError("tol_deg", "must be > 0");
        }
        if (!(tol_active > 0.0)) {
            throw ConfigError("tol_active", "must be > 0");
        }
        if (output_path.empty()) {
            throw ConfigError("output_path", "must not be empty");
        }
    }

    bool has(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string canonical_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "levels") {
        return "n_levels";
    }
    if (key == "out" || key == "output") {
        return "output_path";
    }
    return key;
}

inline double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ConfigError(key, "cannot parse '" + text + "' as a number");
    }
    return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
    int v = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError(key, "cannot parse '" + text + "' as an integer");
    }
    return v;
}

inline std::vector<Method> parse_methods(const std::string& text) {
    std::vector<Method> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        const auto m = parse_method(item);
        if (!m) {
            throw ConfigError("methods", "unknown method '" + item + "'");
        }
        out.push_back(*m);
    }
    return canonical_methods(out);
}

inline void set_key(SweepConfig& c, const std::string& raw_key, const std::string& value) {
    const std::string key = canonical_key(raw_key);
    if (key == "omega") {
        c.omega = parse_double(key, value);
    } else if (key == "omega0") {
        c.omega0 = parse_double(key, value);
    } else if (key == "g_min") {
        c.g_min = parse_double(key, value);
    } else if (key == "g_max") {
        c.g_max = parse_double(key, value);
    } else if (key == "g_steps") {
        c.g_steps = parse_int(key, value);
    } else if (key == "n_max") {
        c.n_max = parse_int(key, value);
    } else if (key == "n_levels") {
        c.n_levels = parse_int(key, value);
    } else if (key == "methods") {
        c.methods = parse_methods(value);
    } else if (key == "tol_deg") {
        c.tol_deg = parse_double(key, value);
    } else if (key == "tol_active") {
        c.tol_active = parse_double(key, value);
    } else if (key == "output_path") {
        c.output_path = value;
    } else {
        throw ConfigError(raw_key, "unknown key");
    }
}

}  // namespace detail

// Flat key=value text ('#' starts a comment), then overrides, then validation.
inline SweepConfig parse_config(const std::string& text, const std::map<std::string, std::string>& overrides = {}) {
    SweepConfig c;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty() || line.front() == '[') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no), "expected key=value");
        }
        detail::set_key(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    for (const auto& [key, value] : overrides) {
        detail::set_key(c, key, value);
    }
    c.validate();
    return c;
}

inline SweepConfig load_config(const std::string& path, const std::map<std::string, std::string>& overrides = {}) {
    std::string text;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("config", "cannot read '" + path + "'");
        }
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    return parse_config(text, overrides);
}

// Worker count from RESONANCEKIT_THREADS, else the hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("RESONANCEKIT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) {
            return static_cast<unsigned>(n);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

struct PointFailure {
    double g{0.0};
    Method method{Method::exact};
    std::string message;
};

struct GridEvaluation {
    std::vector<double> grid;
    std::vector<Method> methods;
    // levels[i][j]: method j at grid point i; empty on failure
    std::vector<std::vector<std::vector<MethodLevel>>> levels;
    std::vector<PointFailure> failures;
};

inline EvaluatorOptions evaluator_options(const SweepConfig& c) {
    EvaluatorOptions o;
    o.tol_deg = c.tol_deg;
    o.tol_active = c.tol_active;
    o.min_levels = c.n_levels;
    return o;
}

inline GridEvaluation evaluate_grid(const SweepConfig& c, unsigned workers = worker_count()) {
    c.validate();
    GridEvaluation out;
    out.grid = c.grid();
    out.methods = canonical_methods(c.methods);
    const MethodEvaluator evaluator(c.omega, c.omega0, c.truncation(), out.methods, evaluator_options(c));
    out.levels.assign(out.grid.size(), std::vector<std::vector<MethodLevel>>(out.methods.size()));
    std::vector<std::vector<std::optional<std::string>>> errors(out.grid.size(),
                                                                std::vector<std::optional<std::string>>(out.methods.size()));
    parallel_for(out.grid.size(), workers, [&](std::size_t i) {
        for (std::size_t j = 0; j < out.methods.size(); ++j) {
            try {
                auto levels = evaluator.evaluate(out.methods[j], out.grid[i]);
                if (levels.size() < static_cast<std::size_t>(c.n_levels)) {
                    throw std::runtime_error("only " + std::to_string(levels.size()) + " levels available");
                }
                out.levels[i][j] = std::move(levels);
            } catch (const std::exception& e) {
                errors[i][j] = e.what();
            }
        }
    });
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        for (std::size_t j = 0; j < out.methods.size(); ++j) {
            if (errors[i][j]) {
                out.failures.push_back({out.grid[i], out.methods[j], *errors[i][j]});
            }
        }
    }
    return out;
}

// Lowest n_levels levels of every successful (g, method), spurious ones flagged.
inline SpectrumTable to_table(const GridEvaluation& ev, int n_levels) {
    SpectrumTable t;
    for (std::size_t i = 0; i < ev.grid.size(); ++i) {
        for (std::size_t j = 0; j < ev.methods.size(); ++j) {
            const auto& levels = ev.levels[i][j];
            if (levels.empty()) {
                continue;
            }
            for (int k = 0; k < n_levels && k < static_cast<int>(levels.size()); ++k) {
                const MethodLevel& l = levels[static_cast<std::size_t>(k)];
                SpectrumRow r;
                r.g = ev.grid[i];
                r.method = to_string(ev.methods[j]);
                r.level = k;
                r.branch = l.branch;
                r.parity = (l.parity == Parity::even || l.parity == Parity::odd) ? l.parity : Parity::none;
                r.energy = l.energy;
                r.spurious = l.spurious;
                t.rows.push_back(std::move(r));
            }
        }
    }
    return t;
}

inline const char* csv_header() { return "g,method,level,branch,parity,energy,spurious"; }

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_csv(const SpectrumTable& t) {
    std::string out = csv_header();
    out += '\n';
    for (const SpectrumRow& r : t.rows) {
        out += format_double(r.g);
        out += ',';
        out += r.method;
        out += ',';
        out += std::to_string(r.level);
        out += ',';
        out += to_string(r.branch);
        out += ',';
        out += to_string(r.parity);
        out += ',';
        out += format_double(r.energy);
        out += ',';
        out += r.spurious ? "true" : "false";
        out += '\n';
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for '" + path + "'");
    }
}

inline SpectrumTable parse_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line) || line != csv_header()) {
        throw std::runtime_error("parse_csv: missing or wrong header");
    }
    SpectrumTable t;
    int line_no = 1;
    while (std::getline(ss, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() != 7) {
            throw std::runtime_error("parse_csv: line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                                     " fields");
        }
        SpectrumRow r;
        r.g = detail::parse_double("g", f[0]);
        r.method = f[1];
        r.level = detail::parse_int("level", f[2]);
        if (f[3] == "+") {
            r.branch = Branch::plus;
        } else if (f[3] == "-") {
            r.branch = Branch::minus;
        } else if (f[3] == "unassigned") {
            r.branch = Branch::unassigned;
        } else {
            throw std::runtime_error("parse_csv: bad branch '" + f[3] + "'");
        }
        if (f[4] == "even") {
            r.parity = Parity::even;
        } else if (f[4] == "odd") {
            r.parity = Parity::odd;
        } else if (f[4] == "n/a") {
            r.parity = Parity::none;
        } else {
            throw std::runtime_error("parse_csv: bad parity '" + f[4] + "'");
        }
        r.energy = detail::parse_double("energy", f[5]);
        if (f[6] == "true") {
            r.spurious = true;
        } else if (f[6] != "false") {
            throw std::runtime_error("parse_csv: bad spurious flag '" + f[6] + "'");
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline SpectrumTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

struct SweepResult {
    SpectrumTable table;
    std::vector<PointFailure> failures;

    bool ok() const noexcept { return failures.empty(); }
};

inline SweepResult run_sweep(const SweepConfig& c, bool write_file = true) {
    const GridEvaluation ev = evaluate_grid(c);
    SweepResult r{to_table(ev, c.n_levels), ev.failures};
    if (write_file) {
        write_text(c.output_path, format_csv(r.table));
    }
    return r;
}

struct LevelErrors {
    double max_error{0.0};
    double sum_error{0.0};
    int compared{0};
};

// Parity-resolved rank matching against the exact spectrum. The lowest
// n_levels non-spurious method levels are split by parity and matched in
// order to the exact levels of the same parity that lie at or below the
// n_levels-th exact level.
inline LevelErrors compare_levels(const std::vector<MethodLevel>& method, const ParitySpectrum& exact, int n_levels) {
    std::vector<double> all(exact.even.data(), exact.even.data() + exact.even.size());
    all.insert(all.end(), exact.odd.data(), exact.odd.data() + exact.odd.size());
    std::sort(all.begin(), all.end());
    if (n_levels < 1 || static_cast<std::size_t>(n_levels) > all.size()) {
        throw std::invalid_argument("compare_levels: n_levels out of range");
    }
    const double threshold = all[static_cast<std::size_t>(n_levels - 1)] + 1e-12;
    std::vector<MethodLevel> kept;
    for (const MethodLevel& l : method) {
        if (!l.spurious) {
            kept.push_back(l);
        }
    }
    sort_levels(kept);
    if (kept.size() > static_cast<std::size_t>(n_levels)) {
        kept.resize(static_cast<std::size_t>(n_levels));
    }
    LevelErrors e;
    for (const Parity p : {Parity::even, Parity::odd}) {
        std::vector<double> a;
        for (const MethodLevel& l : kept) {
            if (l.parity == p) {
                a.push_back(l.energy);
            }
        }
        const RealVector& b = p == Parity::even ? exact.even : exact.odd;
        std::size_t nb = 0;
        while (nb < static_cast<std::size_t>(b.size()) && b(static_cast<Eigen::Index>(nb)) <= threshold) {
            ++nb;
        }
        const std::size_t k = std::min(a.size(), nb);
        for (std::size_t i = 0; i < k; ++i) {
            const double d = std::abs(a[i] - b(static_cast<Eigen::Index>(i)));
            e.max_error = std::max(e.max_error, d);
            e.sum_error += d;
            ++e.compared;
        }
    }
    return e;
}

inline ParitySpectrum parity_spectrum_from_levels(const std::vector<MethodLevel>& levels) {
    std::vector<double> even;
    std::vector<double> odd;
    for (const MethodLevel& l : levels) {
        if (l.parity == Parity::even) {
            even.push_back(l.energy);
        } else if (l.parity == Parity::odd) {
            odd.push_back(l.energy);
        }
    }
    std::sort(even.begin(), even.end());
    std::sort(odd.begin(), odd.end());
    return {Eigen::Map<RealVector>(even.data(), static_cast<Eigen::Index>(even.size())),
            Eigen::Map<RealVector>(odd.data(), static_cast<Eigen::Index>(odd.size()))};
}

struct MethodError {
    Method method{Method::exact};
    double max_error{0.0};
    double mean_error{0.0};
    int compared{0};
    double worst_g{0.0};
};

struct CompareResult {
    SweepResult sweep;
    std::vector<MethodError> errors;
    int levels_compared{0};  // per-point level budget after truncation validation
};

inline std::string errors_path(const std::string& output_path) {
    std::filesystem::path p(output_path);
    const std::string stem = p.stem().string() + "_errors.csv";
    return (p.parent_path() / stem).string();
}

inline std::string format_errors_csv(const std::vector<MethodError>& errors) {
    std::string out = "method,max_error,mean_error,compared,worst_g\n";
    for (const MethodError& e : errors) {
        out += to_string(e.method) + "," + format_double(e.max_error) + "," + format_double(e.mean_error) + "," +
               std::to_string(e.compared) + "," + format_double(e.worst_g) + "\n";
    }
    return out;
}

// Error of every method against the exact baseline over the whole grid.
inline CompareResult compare_methods(const SweepConfig& c, bool write_files = true) {
    if (!c.has(Method::exact)) {
        throw ConfigError("methods", "compare needs the exact baseline in the method list");
    }
    const GridEvaluation ev = evaluate_grid(c);
    CompareResult r;
    r.sweep = SweepResult{to_table(ev, c.n_levels), ev.failures};
    const ModelParams top{c.omega, c.omega0, c.g_max};
    r.levels_compared = std::min(c.n_levels, validate_truncation(top, c.truncation()));
    if (r.levels_compared < 1) {
        throw ConfigError("n_max", "truncation does not validate any level at g_max");
    }
    const auto exact_col = static_cast<std::size_t>(
        std::find(ev.methods.begin(), ev.methods.end(), Method::exact) - ev.methods.begin());
    for (std::size_t j = 0; j < ev.methods.size(); ++j) {
        MethodError me;
        me.method = ev.methods[j];
        double sum = 0.0;
        for (std::size_t i = 0; i < ev.grid.size(); ++i) {
            const auto& exact = ev.levels[i][exact_col];
            const auto& levels = ev.levels[i][j];
            if (exact.empty() || levels.empty()) {
                continue;
            }
            const LevelErrors e = compare_levels(levels, parity_spectrum_from_levels(exact), r.levels_compared);
            if (e.max_error > me.max_error || me.compared == 0) {
                if (e.max_error >= me.max_error) {
                    me.worst_g = ev.grid[i];
                }
            }
            me.max_error = std::max(me.max_error, e.max_error);
            sum += e.sum_error;
            me.compared += e.compared;
        }
        me.mean_error = me.compared > 0 ? sum / me.compared : 0.0;
        r.errors.push_back(me);
    }
    if (write_files) {
        write_text(c.output_path, format_csv(r.sweep.table));
        write_text(errors_path(c.output_path), format_errors_csv(r.errors));
    }
    return r;
}

struct ResonanceRow {
    int n{0};
    bool active{true};
    double g_locus{0.0};
    std::optional<double> nearest_grid;
    std::optional<double> min_gap_g;  // active loci: location of the minimal same-parity gap
    std::optional<double> min_gap;
    double coupling{0.0};             // mute loci: in-cluster coupling of the one-photon perturbation
    std::string note;
};

// Same-parity rank of the (n,+)/(n+2,-) pair at its locus, counted among the
// non-spurious one-photon reference levels strictly below it.
inline int locus_rank(const ResonanceLocus& locus, double omega) {
    const ModelParams p{omega, omega, locus.g};
    const double e_star = omega * locus.n + locus.g * std::sqrt(static_cast<double>(locus.n));
    const Parity cls = dressed_parity(locus.n);
    int rank = 0;
    for (const ClosedFormLevel& l : jc_spectrum(p, locus.n + 4)) {
        if (!l.spurious && l.parity == cls && l.energy < e_star - 1e-9) {
            ++rank;
        }
    }
    return rank;
}

// Same-parity gap between the two exact levels that carry the pair.
inline double locus_gap(const ResonanceLocus& locus, const ParitySpectrum& exact, int rank) {
    const RealVector& v = dressed_parity(locus.n) == Parity::even ? exact.even : exact.odd;
    if (rank + 1 >= v.size()) {
        throw std::runtime_error("locus_gap: spectrum too short");
    }
    return v(rank + 1) - v(rank);
}

struct ResonanceReport {
    std::vector<ResonanceRow> rows;
    double search_halfwidth{0.15};  // units of omega
};

inline ResonanceReport resonance_report(const SweepConfig& c, int n_last = 6) {
    c.validate();
    if (c.omega0 != c.omega) {
        throw ConfigError("omega0", "resonance report requires omega0 == omega");
    }
    ResonanceReport rep;
    const std::vector<double> grid = c.grid();
    const TruncationConfig trunc = c.truncation();
    std::vector<ParitySpectrum> spectra(grid.size());
    parallel_for(grid.size(), worker_count(), [&](std::size_t i) {
        spectra[i] = parity_resolved_spectrum(ModelParams{c.omega, c.omega0, grid[i]}, trunc);
    });
    const double half = rep.search_halfwidth * c.omega;
    for (const ResonanceLocus& locus : resonance_loci(0, n_last, c.omega)) {
        ResonanceRow row;
        row.n = locus.n;
        row.active = locus.active;
        row.g_locus = locus.g;
        if (locus.g < c.g_min || locus.g > c.g_max) {
            row.note = "outside_grid";
            rep.rows.push_back(row);
            continue;
        }
        std::size_t nearest = 0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (std::abs(grid[i] - locus.g) < std::abs(grid[nearest] - locus.g)) {
                nearest = i;
            }
        }
        row.nearest_grid = grid[nearest];
        if (locus.active) {
            const int rank = locus_rank(locus, c.omega);
            std::optional<double> lo;
            std::optional<double> hi;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (std::abs(grid[i] - locus.g) > half) {
                    continue;
                }
                lo = lo.value_or(grid[i]);
                hi = grid[i];
                const double gap = locus_gap(locus, spectra[i], rank);
                if (!row.min_gap || gap < *row.min_gap) {
                    row.min_gap = gap;
                    row.min_gap_g = grid[i];
                }
            }
            // a minimum on the window boundary is not a located avoided crossing
            const bool edge = row.min_gap_g && (*row.min_gap_g == *lo || *row.min_gap_g == *hi);
            row.note = edge ? "active_edge_minimum" : "active";
        } else {
            const TransformedHamiltonian th =
                rt_one_photon(build_rabi(ModelParams{c.omega, c.omega, locus.g}, trunc), trunc);
            const int i = basis_index(locus.lower_photon, Atom::plus);
            const int j = basis_index(locus.upper_photon, Atom::minus);
            row.coupling = j < th.op.rows() ? std::abs(th.op(i, j)) : 0.0;
            row.note = row.coupling < 1e-10 ? "mute" : "mute_nonzero_coupling";
        }
        rep.rows.push_back(row);
    }
    return rep;
}

inline std::string format_resonance_csv(const ResonanceReport& rep) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::string out = "n,kind,g_locus,nearest_grid,min_gap_g,min_gap,offset,coupling,note\n";
    for (const ResonanceRow& r : rep.rows) {
        std::optional<double> offset;
        if (r.min_gap_g) {
            offset = *r.min_gap_g - r.g_locus;
        }
        out += std::to_string(r.n) + "," + (r.active ? "active" : "mute") + "," + format_double(r.g_locus) + "," +
               opt(r.nearest_grid) + "," + opt(r.min_gap_g) + "," + opt(r.min_gap) + "," + opt(offset) + "," +
               format_double(r.coupling) + "," + r.note + "\n";
    }
    return out;
}

}  // namespace resonancekit
