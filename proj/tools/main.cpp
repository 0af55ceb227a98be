// Command-line front door.  Every subcommand parses one configuration
// (JSON config file merged under explicit flags, flags win), runs a single
// library operation, and emits a versioned record: JSON with "schema": 1,
// or CSV with a header row for series-shaped payloads.  Payloads are
// deterministic for a fixed (config, seed); wall time lives outside the
// payload.  Exit codes: 0 ok, 1 violation, 2 parse, 3 budget-partial.
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "formlab/diophantine.hpp"
#include "formlab/errors.hpp"
#include "formlab/flows.hpp"
#include "formlab/form_io.hpp"
#include "formlab/forms.hpp"
#include "formlab/lie.hpp"
#include "formlab/padic.hpp"
#include "formlab/search.hpp"

#ifndef FORMLAB_VERSION
#define FORMLAB_VERSION "0.0.0"
#endif

namespace {

using namespace formlab;
using njson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitParse = 2;
constexpr int kExitPartial = 3;

// usage problems detected after CLI11 parsing (missing conditional options,
// malformed inline values) -- mapped to the parse exit code
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

// ---- numeric annotation -------------------------------------------------
// every numeric leaf in a payload carries its arithmetic mode

njson annotated(const std::string& mode, njson value) {
    njson j;
    j["mode"] = mode;
    j["value"] = std::move(value);
    return j;
}

njson jnum(long long v) { return annotated("exact", v); }
njson jnum(int v) { return jnum(static_cast<long long>(v)); }
njson jnum(double v) { return annotated("float-53", v); }
njson jnum(const Integer& v) { return annotated("exact", v.str()); }

njson jnum(const Scalar& s) {
    if (s.is_exact()) {
        njson j = annotated("exact", s.str());
        j["approx"] = s.to_double();
        return j;
    }
    const long bits = mpfr_get_prec(s.flt().backend().data());
    njson j = annotated("float-" + std::to_string(bits), s.str());
    j["approx"] = s.to_double();
    return j;
}

njson jnum(const Rational& r) { return jnum(Scalar(r)); }

njson jvec(const IntVector& x) { return annotated("exact", njson(x)); }

// ---- parameter parsing --------------------------------------------------

// accepts "sqrt2" for "sqrt(2)" so shells need no parentheses
std::string normalize_sqrt(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size();) {
        if (s.compare(i, 4, "sqrt") == 0 && i + 4 < s.size() &&
            std::isdigit(static_cast<unsigned char>(s[i + 4]))) {
            std::size_t k = i + 4;
            while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k])))
                ++k;
            out += "sqrt(" + s.substr(i + 4, k - i - 4) + ")";
            i = k;
        } else {
            out += s[i++];
        }
    }
    return out;
}

// numeric parameters stay exact: decimal and p/q literals become rationals,
// sqrt expressions go through the scalar grammar
Scalar parse_param(const std::string& text) {
    const std::string t = normalize_sqrt(text);
    if (t.find("sqrt") == std::string::npos)
        return Scalar(rational_from_decimal(t));
    return parse_scalar(t);
}

Rational parse_rational_param(const std::string& text) {
    const Scalar s = parse_param(text);
    if (!s.is_rational())
        throw UsageError("expected a rational value, got '" + text + "'");
    return s.rational();
}

// "lorentz" (diag(1,..,1,-1) of rank n), an inline diag:/mat: spec, or a
// file path in the form text format
QuadraticForm resolve_form(const std::string& spec, int n_hint) {
    if (spec.empty()) throw UsageError("no form given (--form)");
    if (spec == "lorentz") {
        std::vector<Scalar> d(std::size_t(n_hint), Scalar(1));
        d.back() = Scalar(-1);
        return QuadraticForm::diagonal(d);
    }
    if (spec.find(':') != std::string::npos)
        return parse_form_inline(normalize_sqrt(spec));
    std::ifstream in(spec);
    if (!in) throw FormParseError("cannot open form file '" + spec + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_form_text(ss.str());
}

// row-major "a,b;c,d" basis literal
RMatrix parse_basis(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream body(text);
    std::string row;
    while (std::getline(body, row, ';')) {
        std::vector<double> r;
        std::stringstream cells(row);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                r.push_back(std::stod(cell, &used));
                while (used < cell.size() &&
                       std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw UsageError("bad basis entry '" + cell + "'");
            }
        }
        rows.push_back(std::move(r));
    }
    const int n = static_cast<int>(rows.size());
    RMatrix b(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw UsageError("basis rows must form a square matrix");
        for (int j = 0; j < n; ++j) b.at(i, j) = rows[i][j];
    }
    return b;
}

// ---- output plumbing ----------------------------------------------------

void write_artifact(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + path + "'");
    out << text;
}

std::string csv_cell(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
    std::string quoted = "\"";
    for (char c : raw) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string render_csv_value(const njson& v) {
    if (v.is_string()) return csv_cell(v.get<std::string>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return fmt_double(v.get<double>());
    if (v.is_number()) return v.dump();
    if (v.is_array()) {
        std::string joined;
        for (const auto& e : v) {
            if (!joined.empty()) joined += ';';
            joined += e.is_string() ? e.get<std::string>() : e.dump();
        }
        return csv_cell(joined);
    }
    return csv_cell(v.dump());
}

// single-row CSV for scalar payloads: one column per leaf, the arithmetic
// mode carried in the header as name:mode
void flatten_payload(const njson& node, const std::string& prefix,
                     std::vector<std::pair<std::string, std::string>>& cols) {
    if (node.is_object()) {
        if (node.contains("mode") && node.contains("value")) {
            cols.emplace_back(prefix + ":" + node["mode"].get<std::string>(),
                              render_csv_value(node["value"]));
            return;
        }
        for (const auto& [k, v] : node.items())
            flatten_payload(v, prefix.empty() ? k : prefix + "." + k, cols);
        return;
    }
    if (node.is_array()) {
        cols.emplace_back(prefix + ":str", render_csv_value(node));
        return;
    }
    if (node.is_boolean())
        cols.emplace_back(prefix + ":bool", render_csv_value(node));
    else if (node.is_string())
        cols.emplace_back(prefix + ":str", render_csv_value(node));
    else
        cols.emplace_back(prefix + ":exact", render_csv_value(node));
}

std::string single_row_csv(std::uint64_t seed, const njson& payload) {
    std::vector<std::pair<std::string, std::string>> cols;
    cols.emplace_back("seed:exact", std::to_string(seed));
    flatten_payload(payload, "", cols);
    std::string head, row;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) {
            head += ',';
            row += ',';
        }
        head += cols[i].first;
        row += cols[i].second;
    }
    return head + "\n" + row + "\n";
}

struct RunOutput {
    njson config;
    njson payload;
    int exit_code = kExitOk;
    // non-empty: series-shaped CSV replaces the single-row flattening
    std::function<std::string()> csv;
    // printed to stderr in csv mode so summary scalars are not lost
    std::string csv_note;
};

int emit_record(const std::string& command, const RunOutput& run,
                const std::string& format, const std::string& out_path,
                std::uint64_t seed, double wall_ms) {
    if (format == "csv") {
        const std::string table =
            run.csv ? run.csv() : single_row_csv(seed, run.payload);
        write_artifact(out_path, table);
        if (!run.csv_note.empty())
            std::fprintf(stderr, "%s\n", run.csv_note.c_str());
    } else {
        njson rec;
        rec["schema"] = 1;
        rec["tool"] = "formlab";
        rec["version"] = FORMLAB_VERSION;
        rec["command"] = command;
        rec["config"] = run.config;
        rec["payload"] = run.payload;
        rec["wall_ms"] = wall_ms;
        write_artifact(out_path, rec.dump(2) + "\n");
    }
    return run.exit_code;
}

void emit_error(const std::string& command, const std::string& kind,
                const std::string& message) {
    njson rec;
    rec["schema"] = 1;
    rec["tool"] = "formlab";
    rec["version"] = FORMLAB_VERSION;
    rec["command"] = command;
    rec["error"] = {{"type", kind}, {"message", message}};
    std::fprintf(stdout, "%s\n", rec.dump(2).c_str());
    std::fprintf(stderr, "formlab %s: %s: %s\n", command.c_str(), kind.c_str(),
                 message.c_str());
}

// ---- option bundles -----------------------------------------------------

struct CommonOpts {
    std::string form;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 1;
    long long max_radius = SearchBudget{}.max_radius;
    long long max_evals = SearchBudget{}.max_evals;

    SearchBudget budget() const {
        return SearchBudget{max_radius, max_evals, seed};
    }
};

void add_output_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--out", o.out, "output path (default: stdout)");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "random seed, echoed in every artifact")
        ->capture_default_str();
}

void add_budget_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--max-radius", o.max_radius, "largest search shell")
        ->capture_default_str();
    cmd->add_option("--max-evals", o.max_evals, "evaluation budget")
        ->capture_default_str();
}

// ---- subcommand state ---------------------------------------------------

struct ValuesOpts {
    CommonOpts common;
    std::string eps;
    std::string target;
    CLI::Option* target_opt = nullptr;
    bool sign_profile = false;
    long long radius = 32;
    bool allow_zero = false;
};

struct CountOpts {
    CommonOpts common;
    std::string lo = "1";
    std::string hi = "2";
    std::vector<long long> radii{16, 32, 64, 128};
    bool primitive_only = false;
    bool euclidean = false;
};

struct RationalityOpts {
    CommonOpts common;
    std::string denominator_bound = "1000000";
    unsigned bits = kDefaultFloatBits;
};

struct CounterexampleOpts {
    CommonOpts common;
    std::string theta;
    long long box = 10000;
};

struct FlowOpts {
    CommonOpts common;
    std::string mode;
    double T = 100.0;
    double dt = 0.05;
    std::string basis;
    std::string observable = "soft_l1";
    int haar_samples = 0;
    int n = 1;
    int trials = 2000;
};

struct LieOpts {
    CommonOpts common;
    int n = 3;
    int trials = 20;
};

struct SIntegralOpts {
    CommonOpts common;
    std::string padic_form;
    long p = 0;
    int e = 1;
    std::string eps_real;
    std::string eps_padic;
};

// ---- runners ------------------------------------------------------------

njson echo_common(const CommonOpts& o, bool with_budget = true) {
    njson c;
    c["form"] = o.form;
    c["seed"] = o.seed;
    c["format"] = o.format;
    c["out"] = o.out;
    if (with_budget) {
        c["max_radius"] = o.max_radius;
        c["max_evals"] = o.max_evals;
    }
    return c;
}

RunOutput run_values(const ValuesOpts& o) {
    RunOutput run;
    run.config = echo_common(o.common);
    run.config["eps"] = o.eps;
    run.config["target"] = o.target_opt->count() ? njson(o.target) : njson();
    run.config["sign_profile"] = o.sign_profile;
    run.config["radius"] = o.radius;
    run.config["allow_zero"] = o.allow_zero;

    const QuadraticForm f = resolve_form(o.common.form, 3);
    const Scalar eps = parse_param(o.eps);
    njson& p = run.payload;

    if (o.sign_profile) {
        p["kind"] = "sign-profile";
        BandQuery q;
        q.a = Scalar(0);
        q.b = eps;
        q.r = o.radius;
        const BandResult band =
            enumerate_band(f, q, o.common.budget(), 100000);
        std::vector<Scalar> values;
        values.reserve(band.samples.size());
        for (const auto& x : band.samples) values.push_back(f.evaluate(x));
        const auto [plus, minus] = sign_profile(values, eps);
        p["band_count"] = jnum(band.count);
        p["samples_scanned"] = jnum(static_cast<long long>(values.size()));
        p["plus"] = jnum(plus);
        p["minus"] = jnum(minus);
        p["partial"] = band.partial;
        p["evals"] = jnum(band.evals);
        if (band.partial) run.exit_code = kExitPartial;
        return run;
    }

    std::optional<SmallValueHit> hit;
    if (o.target_opt->count()) {
        p["kind"] = "target";
        p["target"] = jnum(parse_param(o.target));
        hit = approx_value(f, parse_param(o.target), eps, o.common.budget());
    } else {
        p["kind"] = "small-value";
        hit = find_small_value(f, eps, o.common.budget(), !o.allow_zero);
    }
    p["eps"] = jnum(eps);
    if (hit) {
        p["status"] = "found";
        p["x"] = jvec(hit->x);
        p["value"] = jnum(hit->value);
        p["radius"] = jnum(hit->radius);
        p["evals"] = jnum(hit->evals);
    } else {
        p["status"] = "none_found";
    }
    return run;
}

RunOutput run_count(const CountOpts& o) {
    RunOutput run;
    run.config = echo_common(o.common);
    run.config["lo"] = o.lo;
    run.config["hi"] = o.hi;
    run.config["radii"] = o.radii;
    run.config["primitive_only"] = o.primitive_only;
    run.config["euclidean"] = o.euclidean;

    const QuadraticForm f = resolve_form(o.common.form, 3);
    const Scalar lo = parse_param(o.lo), hi = parse_param(o.hi);
    if (o.radii.empty()) throw UsageError("--radii needs at least one radius");

    struct Row {
        long long r, count, evals;
        bool partial;
    };
    std::vector<Row> rows;
    bool any_partial = false;
    for (long long r : o.radii) {
        BandQuery q;
        q.a = lo;
        q.b = hi;
        q.r = r;
        q.primitive_only = o.primitive_only;
        q.euclidean = o.euclidean;
        const BandResult b = enumerate_band(f, q, o.common.budget());
        rows.push_back({r, b.count, b.evals, b.partial});
        any_partial = any_partial || b.partial;
    }

    njson& p = run.payload;
    p["band"] = {{"lo", jnum(lo)}, {"hi", jnum(hi)}};
    p["series"] = njson::array();
    const int growth_exp = f.n() - 2;
    double c_floor = 0.0;
    bool c_set = false;
    for (const Row& row : rows) {
        njson e;
        e["r"] = jnum(row.r);
        e["count"] = jnum(row.count);
        e["partial"] = row.partial;
        e["evals"] = jnum(row.evals);
        const double g =
            double(row.count) / std::pow(double(row.r), double(growth_exp));
        e["growth"] = jnum(g);
        if (!c_set || g < c_floor) {
            c_floor = g;
            c_set = true;
        }
        p["series"].push_back(std::move(e));
    }
    p["ratios"] = njson::array();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        njson e;
        e["from_r"] = jnum(rows[i - 1].r);
        e["to_r"] = jnum(rows[i].r);
        e["ratio"] = rows[i - 1].count
                         ? jnum(double(rows[i].count) / double(rows[i - 1].count))
                         : njson();
        p["ratios"].push_back(std::move(e));
    }
    p["growth_floor"] = jnum(c_floor);
    p["partial"] = any_partial;
    if (any_partial) run.exit_code = kExitPartial;

    const std::uint64_t seed = o.common.seed;
    run.csv = [rows, seed] {
        std::string t = "seed:exact,r:exact,count:exact,partial:bool,evals:exact\n";
        for (const Row& row : rows) {
            t += std::to_string(seed) + ',' + std::to_string(row.r) + ',' +
                 std::to_string(row.count) + ',' +
                 (row.partial ? "true" : "false") + ',' +
                 std::to_string(row.evals) + '\n';
        }
        return t;
    };
    return run;
}

RunOutput run_rationality(const RationalityOpts& o) {
    RunOutput run;
    run.config = echo_common(o.common, false);
    run.config["denominator_bound"] = o.denominator_bound;
    run.config["bits"] = o.bits;

    const QuadraticForm f = resolve_form(o.common.form, 3);
    const Integer bound(o.denominator_bound);
    const RationalityResult r =
        rationality_test(f, bound, QuadraticForm::default_tolerance(), o.bits);

    njson& p = run.payload;
    switch (r.verdict) {
        case RationalityResult::Verdict::RationalMultiple:
            p["verdict"] = "rational_multiple";
            break;
        case RationalityResult::Verdict::Irrational:
            p["verdict"] = "irrational";
            break;
        case RationalityResult::Verdict::Undecided:
            p["verdict"] = "undecided";
            break;
    }
    p["scale"] = r.c ? jnum(*r.c) : njson();
    p["normal_form"] = r.normal_form ? njson(emit_form_inline(*r.normal_form))
                                     : njson();
    p["witness"] = r.witness[0] >= 0
                       ? njson(std::vector<int>(r.witness.begin(), r.witness.end()))
                       : njson();
    p["detail"] = r.detail;
    return run;
}

RunOutput run_counterexample(const CounterexampleOpts& o) {
    RunOutput run;
    run.config = echo_common(o.common, false);
    run.config.erase("form");
    run.config["theta"] = o.theta;
    run.config["N"] = o.box;

    const QuadraticIrrational th = make_quadratic_irrational(parse_param(o.theta));
    const CounterexampleScan scan = counterexample_min(th, o.box);

    njson& p = run.payload;
    p["theta"] = jnum(qi_value(th));
    p["box"] = jnum(o.box);
    p["minimum"] = jnum(scan.minimum);
    p["argmin"] = {{"x", jnum(scan.x)}, {"y", jnum(scan.y)}};
    p["lower_bound"] = jnum(scan.bound);
    p["liouville"] = {
        {"minimum", jnum(scan.liouville.minimum)},
        {"convergent",
         {{"p", jnum(scan.liouville.argmin.p)}, {"q", jnum(scan.liouville.argmin.q)}}},
        {"classical_limit", jnum(scan.liouville.classical_limit)},
    };
    return run;
}

njson series_summary(const OrbitSeries& s, double dt) {
    njson out = njson::array();
    for (std::size_t i = 0; i < s.names.size(); ++i) {
        njson e;
        e["name"] = s.names[i];
        e["final_value"] = jnum(s.values[i].back());
        e["time_average"] = jnum(s.running_avg[i].back());
        njson cps = njson::array();
        for (double t = 1.0; t <= s.times.back() + 1e-9; t *= 10.0) {
            const std::size_t k = std::size_t(std::llround(t / dt));
            if (k >= s.times.size()) break;
            njson cp;
            cp["t"] = jnum(s.times[k]);
            cp["running_average"] = jnum(s.running_avg[i][k]);
            cps.push_back(std::move(cp));
        }
        e["checkpoints"] = std::move(cps);
        out.push_back(std::move(e));
    }
    return out;
}

std::function<std::string()> series_csv(const OrbitSeries& s,
                                        std::uint64_t seed) {
    return [s, seed] {
        std::string head = "seed:exact,t:float-53";
        for (const auto& n : s.names)
            head += "," + n + ":float-53," + n + "_avg:float-53";
        std::string t = head + "\n";
        const std::string seed_s = std::to_string(seed);
        for (std::size_t k = 0; k < s.times.size(); ++k) {
            t += seed_s + ',' + fmt_double(s.times[k]);
            for (std::size_t i = 0; i < s.names.size(); ++i)
                t += ',' + fmt_double(s.values[i][k]) + ',' +
                     fmt_double(s.running_avg[i][k]);
            t += '\n';
        }
        return t;
    };
}

RunOutput run_flow(const FlowOpts& o) {
    RunOutput run;
    run.config = echo_common(o.common, false);
    run.config["mode"] = o.mode;
    run.config["T"] = o.T;
    run.config["dt"] = o.dt;
    run.config["basis"] = o.basis.empty() ? "identity" : o.basis;
    run.config["observable"] = o.observable;
    run.config["haar_samples"] = o.haar_samples;
    run.config["n"] = o.n;
    run.config["trials"] = o.trials;
    njson& p = run.payload;
    p["mode"] = o.mode;

    if (o.mode == "eta") {
        const double eta = poly_divergence_eta(o.n, o.trials, o.common.seed);
        const double cheb =
            (1.0 - std::cos(3.14159265358979323846 / (3.0 * o.n))) / 2.0;
        p["n"] = jnum(o.n);
        p["trials"] = jnum(o.trials);
        p["eta"] = jnum(eta);
        p["chebyshev"] = jnum(cheb);
        return run;
    }

    if (o.mode == "so-orbit") {
        const QuadraticForm f = resolve_form(o.common.form, 3);
        const LatticePoint x0 = make_lattice(
            o.basis.empty() ? RMatrix::identity(3) : parse_basis(o.basis));
        const OrbitScan scan = so_orbit_scan(f, x0, o.T, o.dt, o.common.seed);
        p["form"] = emit_form_inline(f);
        p["verdict"] = scan.verdict;
        p["start_l1"] = jnum(scan.start_l1);
        p["min_l1"] = jnum(scan.min_l1);
        p["occupied_bins"] = jnum(scan.occupied_bins);
        p["reachable_bins"] = jnum(scan.reachable_bins);
        p["occupancy"] = jnum(scan.occupancy);
        return run;
    }

    const RMatrix basis =
        o.basis.empty() ? RMatrix::identity(2) : parse_basis(o.basis);
    const LatticePoint x0 = make_lattice(basis);
    OneParamSubgroup group;
    if (o.mode == "horocycle") {
        SMatrix y(x0.n, x0.n);
        y.at(0, 1) = Scalar(1);
        group = unipotent_subgroup(y);
    } else {  // geodesic
        std::vector<double> d(std::size_t(x0.n), 0.0);
        d.front() = -1.0;
        d.back() = 1.0;
        group = diagonal_subgroup(d);
    }
    const OrbitSeries series = flow_orbit(
        x0, group, o.T, o.dt, {length_observable(), soft_length_observable()});
    p["samples"] = jnum(static_cast<long long>(series.times.size()));
    p["observables"] = series_summary(series, o.dt);

    if (o.mode == "geodesic" && o.basis.empty()) {
        // from the square lattice the first minimum contracts exactly like
        // e^{-t} until the corner of the fundamental domain
        double worst = 0.0;
        for (std::size_t k = 0; k < series.times.size(); ++k)
            worst = std::max(worst, std::fabs(series.values[0][k] -
                                              std::exp(-series.times[k])));
        p["max_dev_from_exp"] = jnum(worst);
    }

    if (o.haar_samples > 0) {
        if (o.mode != "horocycle")
            throw PreconditionViolation(
                "equidistribution gaps need a unipotent flow");
        const Observable f =
            o.observable == "l1" ? length_observable() : soft_length_observable();
        const auto haar = haar_sample_sl2(o.haar_samples, o.common.seed);
        const GapReport g = equidistribution_gap(series, haar, f);
        p["gap"] = {
            {"observable", o.observable},
            {"haar_samples", jnum(o.haar_samples)},
            {"time_average", jnum(g.time_average)},
            {"space_average", jnum(g.space_average)},
            {"gap", jnum(g.gap)},
            {"bootstrap_err", jnum(g.bootstrap_err)},
        };
        run.csv_note = "gap=" + fmt_double(g.gap) +
                       " time_average=" + fmt_double(g.time_average) +
                       " space_average=" + fmt_double(g.space_average);
    }
    run.csv = series_csv(series, o.common.seed);
    return run;
}

RunOutput run_lie(const LieOpts& o) {
    RunOutput run;
    run.config = echo_common(o.common, false);
    run.config["n"] = o.n;
    run.config["trials"] = o.trials;

    const QuadraticForm f = resolve_form(
        o.common.form.empty() ? "lorentz" : o.common.form, o.n);
    if (f.n() != o.n)
        throw UsageError("--n disagrees with the rank of --form");

    // construction itself verifies the involution, the eigenspace split,
    // the bracket relations, and k = so(F); it throws on any failure
    const SymmetricPair pair = build_pair(f);
    const bool span_k = verify_step_b(pair);
    const bool killing_ok = verify_orthogonality(pair);

    njson& p = run.payload;
    p["n"] = jnum(o.n);
    p["form"] = emit_form_inline(f);
    p["dim_g"] = jnum(static_cast<long long>(pair.algebra.basis.size()));
    p["dim_k"] = jnum(static_cast<long long>(pair.k_basis.size()));
    p["dim_p"] = jnum(static_cast<long long>(pair.p_basis.size()));
    p["involution_automorphism"] = true;
    p["eigenspace_relations"] = true;
    p["k_equals_so"] = true;
    p["brackets_span_k"] = span_k;
    p["killing_orthogonal"] = killing_ok;

    bool maximal = true;
    if (o.n >= 3) {
        maximal = maximality_check(pair, o.trials, o.common.seed);
        p["maximality"] = {{"checked", true},
                           {"trials", jnum(o.trials)},
                           {"holds", maximal}};
    } else {
        p["maximality"] = {{"checked", false},
                           {"reason", "fixed subalgebra is not semisimple"}};
        const Sl2Report r = counterexample_sl2();
        p["sl2_counterexample"] = {
            {"dim_k", jnum(r.dim_k)},
            {"dim_intermediate", jnum(r.dim_intermediate)},
            {"dim_g", jnum(r.dim_g)},
            {"intermediate_invariant", r.intermediate_invariant},
            {"upper_lower_weights", r.upper_lower_weights},
            {"nil_lines_abelian", r.nil_lines_abelian},
            {"killing_null_on_n", r.killing_null_on_n},
            {"k_from_bracket", r.k_from_bracket},
        };
    }
    if (!span_k || !killing_ok || !maximal) run.exit_code = kExitViolation;
    return run;
}

RunOutput run_sintegral(const SIntegralOpts& o) {
    RunOutput run;
    run.config = echo_common(o.common);
    run.config["padic_form"] =
        o.padic_form.empty() ? o.common.form : o.padic_form;
    run.config["p"] = o.p;
    run.config["e"] = o.e;
    run.config["eps_real"] = o.eps_real;
    run.config["eps_padic"] = o.eps_padic;

    const QuadraticForm f = resolve_form(o.common.form, 3);
    const QuadraticForm fp =
        o.padic_form.empty() ? f : resolve_form(o.padic_form, 3);
    const PadicModel model = padic_model(fp, o.p);
    SIntegerContext ctx;
    ctx.p = o.p;
    ctx.e = o.e;
    ctx.eps_real = parse_param(o.eps_real);
    ctx.eps_padic = parse_rational_param(o.eps_padic);
    const auto hit = s_integer_small_value(f, model, ctx, o.common.budget());

    njson& p = run.payload;
    p["p"] = jnum(static_cast<long long>(o.p));
    p["e"] = jnum(o.e);
    if (hit) {
        p["status"] = "found";
        njson coords = njson::array();
        for (const Rational& c : hit->x) coords.push_back(Scalar(c).str());
        p["x"] = annotated("exact", std::move(coords));
        p["numerator"] = jvec(hit->numerator);
        p["real_abs"] = jnum(hit->real_abs);
        p["padic_abs"] = jnum(hit->padic_abs);
        p["radius"] = jnum(hit->radius);
    } else {
        p["status"] = "none_found";
    }
    return run;
}

// ---- config file merge ----------------------------------------------------

std::string config_token(const std::string& key, const njson& value) {
    std::string v;
    if (value.is_string()) {
        v = value.get<std::string>();
    } else if (value.is_array()) {
        for (const auto& e : value) {
            if (!v.empty()) v += ',';
            v += e.is_string() ? e.get<std::string>() : e.dump();
        }
    } else {
        v = value.dump();  // numbers and booleans
    }
    return "--" + key + "=" + v;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    // the config file is extracted before CLI11 runs so its keys can be
    // turned into tokens that precede the explicit flags (flags win)
    std::string config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                std::fprintf(stderr, "formlab: --config needs a path\n");
                return kExitParse;
            }
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }

    njson config = njson::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "formlab: cannot open config '%s'\n",
                         config_path.c_str());
            return kExitParse;
        }
        try {
            in >> config;
        } catch (const njson::parse_error& e) {
            std::fprintf(stderr, "formlab: bad config JSON: %s\n", e.what());
            return kExitParse;
        }
        if (!config.is_object()) {
            std::fprintf(stderr, "formlab: config must be a JSON object\n");
            return kExitParse;
        }
    }

    CLI::App app{"laboratory for values of indefinite quadratic forms and "
                 "flows on spaces of unimodular lattices"};
    app.set_version_flag("--version", std::string("formlab ") + FORMLAB_VERSION);
    app.require_subcommand(1);
    std::string config_dummy;
    app.add_option("--config", config_dummy,
                   "JSON config file; explicit flags override its keys");

    ValuesOpts values_o;
    CountOpts count_o;
    RationalityOpts rat_o;
    CounterexampleOpts cex_o;
    FlowOpts flow_o;
    LieOpts lie_o;
    SIntegralOpts sint_o;

    const auto take_last = [](CLI::App* cmd) {
        cmd->option_defaults()->multi_option_policy(
            CLI::MultiOptionPolicy::TakeLast);
        return cmd;
    };

    CLI::App* c_values = take_last(app.add_subcommand(
        "values", "witnesses of small nonzero form values at integer points"));
    c_values->add_option("--form", values_o.common.form,
                         "form: inline diag:/mat:, a file path, or lorentz")
        ->required();
    c_values->add_option("--eps", values_o.eps, "smallness threshold")->required();
    values_o.target_opt = c_values->add_option(
        "--target", values_o.target, "approximate this value instead of 0");
    c_values->add_flag("--sign-profile", values_o.sign_profile,
                       "count band hits of each sign over a box sweep");
    c_values->add_option("--radius", values_o.radius,
                         "box radius for --sign-profile")
        ->capture_default_str();
    c_values->add_flag("--allow-zero", values_o.allow_zero,
                       "accept exact zeros as witnesses");
    add_budget_opts(c_values, values_o.common);
    add_output_opts(c_values, values_o.common);

    CLI::App* c_count = take_last(app.add_subcommand(
        "count", "band-count series N(r) over a radius schedule"));
    c_count->add_option("--form", count_o.common.form, "form specification")
        ->required();
    c_count->add_option("--lo", count_o.lo, "band lower end |F| >= lo")
        ->capture_default_str();
    c_count->add_option("--hi", count_o.hi, "band upper end |F| <= hi")
        ->capture_default_str();
    c_count->add_option("--radii", count_o.radii, "comma-separated radii")
        ->delimiter(',')
        ->capture_default_str();
    c_count->add_flag("--primitive-only", count_o.primitive_only,
                      "count primitive points only");
    c_count->add_flag("--euclidean", count_o.euclidean,
                      "restrict to the euclidean ball");
    add_budget_opts(c_count, count_o.common);
    add_output_opts(c_count, count_o.common);

    CLI::App* c_rat = take_last(app.add_subcommand(
        "rationality", "decide whether a form is a multiple of a rational one"));
    c_rat->add_option("--form", rat_o.common.form, "form specification")
        ->required();
    c_rat->add_option("--denominator-bound", rat_o.denominator_bound,
                      "largest denominator for float reconstruction")
        ->capture_default_str();
    c_rat->add_option("--bits", rat_o.bits, "float working precision")
        ->capture_default_str();
    add_output_opts(c_rat, rat_o.common);

    CLI::App* c_cex = take_last(app.add_subcommand(
        "counterexample",
        "exact planar minimum of |y^2 - theta^2 x^2| with Liouville bound"));
    c_cex->add_option("--theta", cex_o.theta, "quadratic irrational, e.g. 1+sqrt2")
        ->required();
    c_cex->add_option("--N", cex_o.box, "box bound max(|x|,|y|) <= N")
        ->capture_default_str();
    add_output_opts(c_cex, cex_o.common);

    CLI::App* c_flow = take_last(app.add_subcommand(
        "flow", "orbits on the space of unimodular lattices"));
    c_flow->add_option("--mode", flow_o.mode, "flow family")
        ->check(CLI::IsMember({"horocycle", "geodesic", "so-orbit", "eta"}))
        ->required();
    c_flow->add_option("--T", flow_o.T, "orbit length")->capture_default_str();
    c_flow->add_option("--dt", flow_o.dt, "sample step")->capture_default_str();
    c_flow->add_option("--basis", flow_o.basis,
                       "start basis, row-major 'a,b;c,d' (default identity)");
    c_flow->add_option("--observable", flow_o.observable,
                       "observable for the equidistribution gap")
        ->check(CLI::IsMember({"l1", "soft_l1"}))
        ->capture_default_str();
    c_flow->add_option("--haar-samples", flow_o.haar_samples,
                       "compare the time average against this many reference "
                       "samples (0 = skip)")
        ->capture_default_str();
    c_flow->add_option("--form", flow_o.common.form,
                       "ternary indefinite form for --mode so-orbit");
    c_flow->add_option("--n", flow_o.n, "polynomial degree for --mode eta")
        ->capture_default_str();
    c_flow->add_option("--trials", flow_o.trials,
                       "random candidates for --mode eta")
        ->capture_default_str();
    add_output_opts(c_flow, flow_o.common);

    CLI::App* c_lie = take_last(app.add_subcommand(
        "lie", "exact symmetric-pair report for sl_n with a form involution"));
    c_lie->add_option("--n", lie_o.n, "matrix size")->capture_default_str();
    c_lie->add_option("--form", lie_o.common.form,
                      "involution form (default lorentz)");
    c_lie->add_option("--trials", lie_o.trials, "maximality witnesses")
        ->capture_default_str();
    add_output_opts(c_lie, lie_o.common);

    CLI::App* c_sint = take_last(app.add_subcommand(
        "sintegral", "small nonzero values at S-integral points p^-e Z^n"));
    c_sint->add_option("--form", sint_o.common.form, "real form")->required();
    c_sint->add_option("--padic-form", sint_o.padic_form,
                       "rational model for the p-adic place (default: --form)");
    c_sint->add_option("--p", sint_o.p, "prime for the p-adic place")
        ->required();
    c_sint->add_option("--e", sint_o.e, "denominator exponent")
        ->capture_default_str();
    c_sint->add_option("--eps-real", sint_o.eps_real, "real smallness bound")
        ->required();
    c_sint->add_option("--eps-padic", sint_o.eps_padic, "p-adic smallness bound")
        ->required();
    add_budget_opts(c_sint, sint_o.common);
    add_output_opts(c_sint, sint_o.common);

    // resolve the command: an explicit subcommand wins over config "command"
    const std::vector<std::string> known = {
        "values", "count",       "rationality", "counterexample",
        "flow",   "lie",         "sintegral"};
    std::string command;
    if (!rest.empty() &&
        std::find(known.begin(), known.end(), rest[0]) != known.end()) {
        command = rest[0];
        rest.erase(rest.begin());
    } else if (config.contains("command")) {
        if (!config["command"].is_string() ||
            std::find(known.begin(), known.end(),
                      config["command"].get<std::string>()) == known.end()) {
            std::fprintf(stderr, "formlab: config key \"command\" must name a "
                                 "subcommand\n");
            return kExitParse;
        }
        command = config["command"].get<std::string>();
    }

    std::vector<std::string> final_args = {"formlab"};
    if (!command.empty()) {
        final_args.push_back(command);
        CLI::App* sub = app.get_subcommand(command);
        for (const auto& [key, value] : config.items()) {
            if (key == "command") continue;
            if (!sub->get_option_no_throw("--" + key)) {
                std::fprintf(stderr,
                             "formlab: unknown config key \"%s\" for %s\n",
                             key.c_str(), command.c_str());
                return kExitParse;
            }
            final_args.push_back(config_token(key, value));
        }
    } else if (!config.empty()) {
        std::fprintf(stderr, "formlab: config without a command\n");
        return kExitParse;
    }
    final_args.insert(final_args.end(), rest.begin(), rest.end());

    std::vector<char*> cargv;
    cargv.reserve(final_args.size());
    for (auto& s : final_args) cargv.push_back(s.data());

    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "formlab: %s\n", e.what());
        return kExitParse;
    }

    std::string format = "json", out_path;
    std::uint64_t seed = 1;
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput run;
    try {
        if (app.got_subcommand(c_values)) {
            format = values_o.common.format;
            out_path = values_o.common.out;
            seed = values_o.common.seed;
            run = run_values(values_o);
        } else if (app.got_subcommand(c_count)) {
            format = count_o.common.format;
            out_path = count_o.common.out;
            seed = count_o.common.seed;
            run = run_count(count_o);
        } else if (app.got_subcommand(c_rat)) {
            format = rat_o.common.format;
            out_path = rat_o.common.out;
            seed = rat_o.common.seed;
            run = run_rationality(rat_o);
        } else if (app.got_subcommand(c_cex)) {
            format = cex_o.common.format;
            out_path = cex_o.common.out;
            seed = cex_o.common.seed;
            run = run_counterexample(cex_o);
        } else if (app.got_subcommand(c_flow)) {
            format = flow_o.common.format;
            out_path = flow_o.common.out;
            seed = flow_o.common.seed;
            run = run_flow(flow_o);
        } else if (app.got_subcommand(c_lie)) {
            format = lie_o.common.format;
            out_path = lie_o.common.out;
            seed = lie_o.common.seed;
            run = run_lie(lie_o);
        } else {
            format = sint_o.common.format;
            out_path = sint_o.common.out;
            seed = sint_o.common.seed;
            run = run_sintegral(sint_o);
        }
    } catch (const UsageError& e) {
        emit_error(command, "usage", e.what());
        return kExitParse;
    } catch (const FormParseError& e) {
        emit_error(command, "parse", e.what());
        return kExitParse;
    } catch (const ViolationError& e) {
        emit_error(command, "violation", e.what());
        return kExitViolation;
    } catch (const Error& e) {
        emit_error(command, "error", e.what());
        return kExitViolation;
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();

    try {
        return emit_record(command, run, format, out_path, seed, wall_ms);
    } catch (const Error& e) {
        std::fprintf(stderr, "formlab: %s\n", e.what());
        return kExitViolation;
    }
}
