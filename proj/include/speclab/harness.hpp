#pragma once

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "filter.hpp"
#include "kernel.hpp"
#include "risk.hpp"
#include "rng.hpp"
#include "target.hpp"
#include "theory.hpp"

namespace speclab {

/// Shortest round-trip decimal representation ("inf", "-inf", "nan" for non-finite values).
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

/// The C_lambda grid of the reference protocol.
inline std::vector<double> default_c_lambda_grid() { return {0.001, 0.01, 0.1, 0.2, 0.4, 0.5, 0.7, 0.8, 1.0, 10.0}; }

/// d = floor(n^{1/gamma}), guarded against binary rounding just below an integer.
inline int dimension_for(long n, double gamma) {
    const double x = std::pow(static_cast<double>(n), 1.0 / gamma);
    double d = std::floor(x);
    if (std::abs(x - (d + 1.0)) < 1e-9 * x) d += 1.0;
    return static_cast<int>(d);
}

/// A full experiment: every (n, rep) job draws fresh anchors and data, decomposes K/n once,
/// and evaluates every (u, filter, C_lambda) combination on that decomposition.
struct ExperimentPlan {
    std::string kernel = "rbf";
    std::vector<std::string> filters{"krr"};
    double gamma = 1.5;
    double s = 1.0;
    std::vector<double> u{0.5};
    std::vector<double> c_lambda = default_c_lambda_grid();
    std::vector<long> n;
    int repetitions = 50;
    int n_test = 1000;
    double sigma = 1.0;
    std::uint64_t seed = 0;
    int jobs = 1;
    double tolerance = 0.3;

    void validate() const {
        parse_kernel(kernel);
        if (filters.empty()) throw std::invalid_argument("plan: filters must be nonempty");
        for (const auto& f : filters) parse_filter(f, 1.0);
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("plan: gamma must be > 0");
        if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("plan: s must be >= 0");
        if (u.empty()) throw std::invalid_argument("plan: u grid must be nonempty");
        for (double x : u)
            if (!(x > 0.0)) throw std::invalid_argument("plan: u must be > 0");
        if (c_lambda.empty()) throw std::invalid_argument("plan: C_lambda grid must be nonempty");
        for (double c : c_lambda)
            if (!(c > 0.0)) throw std::invalid_argument("plan: C_lambda must be > 0");
        if (n.empty()) throw std::invalid_argument("plan: n grid must be nonempty");
        for (long v : n) {
            if (v < 1) throw std::invalid_argument("plan: n must be >= 1");
            if (dimension_for(v, gamma) < 3) throw std::invalid_argument("plan: derived d < 3 for n=" + std::to_string(v));
        }
        if (repetitions < 1) throw std::invalid_argument("plan: repetitions must be >= 1");
        if (n_test < 1) throw std::invalid_argument("plan: n_test must be >= 1");
        if (!(sigma >= 0.0)) throw std::invalid_argument("plan: sigma must be >= 0");
        if (jobs < 1) throw std::invalid_argument("plan: jobs must be >= 1");
        if (!(tolerance > 0.0)) throw std::invalid_argument("plan: tolerance must be > 0");
    }
};

namespace detail {

inline double json_number(const nlohmann::json& j, const char* key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string v = j.get<std::string>();
        if (v == "inf") return std::numeric_limits<double>::infinity();
        return Rational::parse(v).to_double();
    }
    throw std::invalid_argument(std::string("plan: '") + key + "' must be a number");
}

/// A number, a list of numbers, or {"start", "stop", "step"} (inclusive, exact decimal stepping).
inline std::vector<double> json_grid(const nlohmann::json& j, const char* key) {
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& v : j) out.push_back(json_number(v, key));
        return out;
    }
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            if (k != "start" && k != "stop" && k != "step")
                throw std::invalid_argument(std::string("plan: unknown key '") + k + "' in '" + key + "'");
        if (!j.contains("start") || !j.contains("stop") || !j.contains("step"))
            throw std::invalid_argument(std::string("plan: '") + key + "' range needs start, stop, step");
        const Rational a = Rational::from_double(json_number(j["start"], key));
        const Rational b = Rational::from_double(json_number(j["stop"], key));
        const Rational h = Rational::from_double(json_number(j["step"], key));
        if (!(h > Rational(0))) throw std::invalid_argument(std::string("plan: '") + key + "' step must be > 0");
        std::vector<double> out;
        for (Rational x = a; x <= b; x += h) out.push_back(x.to_double());
        return out;
    }
    return {json_number(j, key)};
}

}  // namespace detail

/// Parse a plan from JSON. Unknown keys are rejected.
inline ExperimentPlan parse_plan(const nlohmann::json& j) {
    static const std::set<std::string> known{"kernel", "filters", "gamma",  "s",    "u",    "c_lambda", "n",
                                             "repetitions", "n_test", "sigma", "seed", "jobs", "tolerance"};
    if (!j.is_object()) throw std::invalid_argument("plan: top level must be an object");
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw std::invalid_argument("plan: unknown key '" + k + "'");
    ExperimentPlan p;
    if (j.contains("kernel")) p.kernel = j["kernel"].get<std::string>();
    if (j.contains("filters")) {
        p.filters.clear();
        if (j["filters"].is_string()) p.filters.push_back(j["filters"].get<std::string>());
        else
            for (const auto& f : j["filters"]) p.filters.push_back(f.get<std::string>());
    }
    if (j.contains("gamma")) p.gamma = detail::json_number(j["gamma"], "gamma");
    if (j.contains("s")) p.s = detail::json_number(j["s"], "s");
    if (j.contains("u")) p.u = detail::json_grid(j["u"], "u");
    if (j.contains("c_lambda")) p.c_lambda = detail::json_grid(j["c_lambda"], "c_lambda");
    if (j.contains("n")) {
        p.n.clear();
        for (double v : detail::json_grid(j["n"], "n")) {
            if (v != std::floor(v)) throw std::invalid_argument("plan: n values must be integers");
            p.n.push_back(static_cast<long>(v));
        }
    }
    if (j.contains("repetitions")) p.repetitions = j["repetitions"].get<int>();
    if (j.contains("n_test")) p.n_test = j["n_test"].get<int>();
    if (j.contains("sigma")) p.sigma = detail::json_number(j["sigma"], "sigma");
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("jobs")) p.jobs = j["jobs"].get<int>();
    if (j.contains("tolerance")) p.tolerance = detail::json_number(j["tolerance"], "tolerance");
    p.validate();
    return p;
}

inline ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    return parse_plan(nlohmann::json::parse(in));
}

/// Stable identity of an (kernel, gamma, s, n) cell for seed derivation.
inline std::uint64_t cell_hash(const std::string& kernel, double gamma, double s, long n) {
    std::string key = kernel + "|" + format_double(gamma) + "|" + format_double(s) + "|" + std::to_string(n);
    return fnv1a(key);
}

/// One CSV row of the result table.
struct ResultRow {
    std::string kernel;
    std::string filter;
    double gamma = 0.0, s = 0.0, u = 0.0, c_lambda = 0.0;
    long n = 0;
    int d = 0;
    int rep = 0;
    std::uint64_t seed = 0;
    double excess_risk = std::numeric_limits<double>::quiet_NaN();
    double bias_sq = std::numeric_limits<double>::quiet_NaN();
    double variance = std::numeric_limits<double>::quiet_NaN();
    double mc_stderr = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

inline constexpr const char* kCsvHeader =
    "kernel,filter,gamma,s,u,c_lambda,n,d,rep,seed,excess_risk,bias_sq,variance,mc_stderr,status";

inline std::string to_csv_line(const ResultRow& r) {
    std::string line;
    line.reserve(160);
    line += r.kernel;
    line += ',' + r.filter;
    line += ',' + format_double(r.gamma);
    line += ',' + format_double(r.s);
    line += ',' + format_double(r.u);
    line += ',' + format_double(r.c_lambda);
    line += ',' + std::to_string(r.n);
    line += ',' + std::to_string(r.d);
    line += ',' + std::to_string(r.rep);
    line += ',' + std::to_string(r.seed);
    line += ',' + format_double(r.excess_risk);
    line += ',' + format_double(r.bias_sq);
    line += ',' + format_double(r.variance);
    line += ',' + format_double(r.mc_stderr);
    line += ',' + r.status;
    return line;
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) os << to_csv_line(r) << '\n';
}

namespace detail {
inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}
inline double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("csv: bad number '" + s + "'");
    return v;
}
}  // namespace detail

/// Read a result table written by write_csv.
inline std::vector<ResultRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) throw std::invalid_argument("csv: unexpected header");
    std::vector<ResultRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 15) throw std::invalid_argument("csv: expected 15 fields");
        ResultRow r;
        r.kernel = f[0];
        r.filter = f[1];
        r.gamma = detail::parse_double(f[2]);
        r.s = detail::parse_double(f[3]);
        r.u = detail::parse_double(f[4]);
        r.c_lambda = detail::parse_double(f[5]);
        r.n = std::stol(f[6]);
        r.d = std::stoi(f[7]);
        r.rep = std::stoi(f[8]);
        r.seed = std::stoull(f[9]);
        r.excess_risk = detail::parse_double(f[10]);
        r.bias_sq = detail::parse_double(f[11]);
        r.variance = detail::parse_double(f[12]);
        r.mc_stderr = detail::parse_double(f[13]);
        r.status = f[14];
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Canonical row order: (filter, u, c_lambda, n, rep).
inline void sort_rows(std::vector<ResultRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.kernel, a.filter, a.u, a.c_lambda, a.n, a.rep) <
               std::tie(b.kernel, b.filter, b.u, b.c_lambda, b.n, b.rep);
    });
}

/// Run fn(i) for i in [0, count) on `jobs` threads; every index is claimed exactly once.
/// The first exception (by index) is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(jobs), count));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Seeds of one repetition of one (kernel, gamma, s, n) cell.
struct RepetitionSeeds {
    std::uint64_t root, anchors;
    DatasetStreams data;
};

inline RepetitionSeeds repetition_seeds(std::uint64_t master, std::uint64_t cell, int rep) {
    const auto r = static_cast<std::uint64_t>(rep);
    return {derive_seed(master, cell, r, Substream::root),
            derive_seed(master, cell, r, Substream::anchors),
            {derive_seed(master, cell, r, Substream::train_points), derive_seed(master, cell, r, Substream::noise),
             derive_seed(master, cell, r, Substream::test_points)}};
}

/// Error code recorded in the status column for a failed evaluation.
inline std::string status_code(const std::exception& e) {
    std::string msg = e.what();
    std::string code;
    for (char c : msg) {
        if (c == ':' && code.empty()) continue;
        code += (std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_');
    }
    while (code.find("__") != std::string::npos) code.replace(code.find("__"), 2, "_");
    if (code.size() > 60) code.resize(60);
    return "error:" + code;
}

/// Execute a plan. Rows are returned in a deterministic order that does not depend on `jobs`.
inline std::vector<ResultRow> run_plan(const ExperimentPlan& plan) {
    plan.validate();
    const KernelSpec kernel = parse_kernel(plan.kernel);
    const std::size_t per_job = plan.u.size() * plan.filters.size() * plan.c_lambda.size();
    const std::size_t job_count = plan.n.size() * static_cast<std::size_t>(plan.repetitions);
    std::vector<std::vector<ResultRow>> results(job_count);

    parallel_for(job_count, plan.jobs, [&](std::size_t job) {
        const long n = plan.n[job / static_cast<std::size_t>(plan.repetitions)];
        const int rep = static_cast<int>(job % static_cast<std::size_t>(plan.repetitions));
        const int d = dimension_for(n, plan.gamma);
        const RepetitionSeeds seeds = repetition_seeds(plan.seed, cell_hash(kernel.id(), plan.gamma, plan.s, n), rep);

        std::vector<ResultRow>& out = results[job];
        out.reserve(per_job);
        for (double u : plan.u)
            for (const auto& fid : plan.filters)
                for (double c : plan.c_lambda) {
                    ResultRow r;
                    r.kernel = kernel.id();
                    r.filter = fid;
                    r.gamma = plan.gamma;
                    r.s = plan.s;
                    r.u = u;
                    r.c_lambda = c;
                    r.n = n;
                    r.d = d;
                    r.rep = rep;
                    r.seed = seeds.root;
                    out.push_back(std::move(r));
                }

        std::optional<SpectralRiskEvaluator> eval;
        Dataset ds;
        try {
            RngStream anchor_stream(seeds.anchors);
            const AnchorSet anchors = sample_anchors(d, anchor_stream);
            const RegressionFunction target(kernel, anchors, plan.s, d);
            ds = generate_dataset(target, n, d, plan.sigma, plan.n_test, seeds.data);
            eval.emplace(kernel, ds);
        } catch (const std::exception& e) {
            for (auto& r : out) r.status = status_code(e);
            return;
        }
        for (auto& r : out) {
            try {
                const FilterSpec f = parse_filter(r.filter, regularization(r.c_lambda, r.u, d));
                const RiskEstimate est = eval->evaluate(f);
                r.excess_risk = est.excess_risk;
                r.bias_sq = est.bias_sq;
                r.variance = est.variance;
                r.mc_stderr = est.mc_stderr;
            } catch (const std::exception& e) {
                r.status = status_code(e);
            }
        }
    });

    std::vector<ResultRow> rows;
    rows.reserve(job_count * per_job);
    for (auto& v : results)
        for (auto& r : v) rows.push_back(std::move(r));
    sort_rows(rows);
    return rows;
}

/// Mean over repetitions of one (kernel, filter, u, C_lambda, n) cell.
struct CellSummary {
    std::string kernel, filter;
    double gamma = 0.0, s = 0.0, u = 0.0, c_lambda = 0.0;
    long n = 0;
    int d = 0;
    int count = 0;
    int failures = 0;
    double mean_risk = 0.0;
    double stderr_risk = 0.0;  ///< across-repetition standard error of the mean
    double mean_bias_sq = 0.0;
    double mean_variance = 0.0;
};

inline std::vector<CellSummary> aggregate(std::vector<ResultRow> rows) {
    sort_rows(rows);
    std::vector<CellSummary> out;
    auto same = [](const ResultRow& a, const CellSummary& c) {
        return a.kernel == c.kernel && a.filter == c.filter && a.u == c.u && a.c_lambda == c.c_lambda && a.n == c.n;
    };
    std::vector<double> risks;
    auto flush = [&] {
        if (out.empty()) return;
        CellSummary& c = out.back();
        c.count = static_cast<int>(risks.size());
        if (risks.empty()) return;
        double sum = 0.0;
        for (double r : risks) sum += r;
        c.mean_risk = sum / c.count;
        c.mean_bias_sq /= c.count;
        c.mean_variance /= c.count;
        if (c.count > 1) {
            double ss = 0.0;
            for (double r : risks) ss += (r - c.mean_risk) * (r - c.mean_risk);
            c.stderr_risk = std::sqrt(ss / (c.count - 1.0) / c.count);
        }
    };
    for (const auto& r : rows) {
        if (out.empty() || !same(r, out.back())) {
            flush();
            risks.clear();
            CellSummary c;
            c.kernel = r.kernel;
            c.filter = r.filter;
            c.gamma = r.gamma;
            c.s = r.s;
            c.u = r.u;
            c.c_lambda = r.c_lambda;
            c.n = r.n;
            c.d = r.d;
            out.push_back(c);
        }
        if (r.ok()) {
            risks.push_back(r.excess_risk);
            out.back().mean_bias_sq += r.bias_sq;
            out.back().mean_variance += r.variance;
        } else {
            ++out.back().failures;
        }
    }
    flush();
    return out;
}

/// Least-squares fit of ln(risk) on ln(d).
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double ci68_low = 0.0, ci68_high = 0.0;
    int n_points = 0;
    double c_lambda = std::numeric_limits<double>::quiet_NaN();  ///< the C_lambda the points came from
};

inline SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_slope: need at least 3 points");
    const double m = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [d, risk] : points) {
        if (!(risk > 0.0) || !(d > 0.0)) throw std::invalid_argument("fit_slope: risks and d must be positive");
        sx += std::log(d);
        sy += std::log(risk);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [d, risk] : points) {
        const double x = std::log(d) - mx, y = std::log(risk) - my;
        sxx += x * x;
        sxy += x * y;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_slope: all d equal");
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (const auto& [d, risk] : points) {
        const double e = std::log(risk) - (f.intercept + f.slope * std::log(d));
        sse += e * e;
    }
    f.stderr_slope = std::sqrt(sse / (m - 2.0) / sxx);
    f.ci68_low = f.slope - f.stderr_slope;
    f.ci68_high = f.slope + f.stderr_slope;
    f.n_points = static_cast<int>(points.size());
    return f;
}

/// C_lambda minimizing the mean risk averaged over the n-grid (ties toward the smaller value),
/// among summaries of one (kernel, filter, u).
inline double select_best_clambda(const std::vector<CellSummary>& cells) {
    if (cells.empty()) throw std::invalid_argument("select_best_clambda: empty table");
    std::map<double, std::pair<double, int>> acc;
    for (const auto& c : cells) {
        auto& [sum, k] = acc[c.c_lambda];
        if (c.count == 0) {
            sum = std::numeric_limits<double>::infinity();
        } else {
            sum += c.mean_risk;
        }
        ++k;
    }
    double best = acc.begin()->first;
    double best_val = std::numeric_limits<double>::infinity();
    for (const auto& [c, v] : acc) {  // ascending C_lambda, strict improvement only
        const double mean = v.first / v.second;
        if (mean < best_val) {
            best_val = mean;
            best = c;
        }
    }
    return best;
}

/// Fitted slope next to the theoretical exponent.
struct TheoryComparison {
    SlopeFit fit;
    double theory_zeta = 0.0;
    double gap = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline TheoryComparison compare_to_theory(const SlopeFit& fit, const RateQuery<double>& q, double tolerance) {
    TheoryComparison c;
    c.fit = fit;
    c.theory_zeta = learning_curve_exponent(to_rational(q)).zeta.to_double();
    c.gap = std::abs(fit.slope - c.theory_zeta);
    c.tolerance = tolerance;
    c.pass = c.gap <= tolerance;
    return c;
}

/// Per (filter, u): best C_lambda, its slope fit over the n-grid, and the comparison with theory.
struct SlopeReport {
    std::string kernel, filter;
    double gamma = 0.0, s = 0.0, u = 0.0;
    TheoryComparison comparison;
    std::vector<CellSummary> curve;  ///< the best-C_lambda cells, ascending n
};

inline std::vector<SlopeReport> slope_reports(const std::vector<ResultRow>& rows, double tolerance) {
    const std::vector<CellSummary> cells = aggregate(rows);
    std::map<std::tuple<std::string, std::string, double>, std::vector<CellSummary>> groups;
    for (const auto& c : cells) groups[{c.kernel, c.filter, c.u}].push_back(c);
    std::vector<SlopeReport> out;
    for (const auto& [key, group] : groups) {
        SlopeReport rep;
        rep.kernel = std::get<0>(key);
        rep.filter = std::get<1>(key);
        rep.u = std::get<2>(key);
        rep.gamma = group.front().gamma;
        rep.s = group.front().s;
        const double best = select_best_clambda(group);
        std::vector<std::pair<double, double>> points;
        for (const auto& c : group)
            if (c.c_lambda == best) {
                rep.curve.push_back(c);
                if (c.count > 0) points.emplace_back(static_cast<double>(c.d), c.mean_risk);
            }
        SlopeFit fit = fit_slope(points);
        fit.c_lambda = best;
        const double tau = parse_filter(rep.filter, 1.0).qualification();
        rep.comparison = compare_to_theory(fit, RateQuery<double>{rep.s, rep.gamma, tau, rep.u}, tolerance);
        out.push_back(std::move(rep));
    }
    return out;
}

/// Long-format plot data: per-cell curves (risk vs d) and per-u slopes vs theory.
inline void write_plot_curves(std::ostream& os, const std::vector<CellSummary>& cells) {
    os << "kernel,filter,gamma,s,u,c_lambda,n,d,reps,mean_risk,stderr_risk,mean_bias_sq,mean_variance\n";
    for (const auto& c : cells)
        os << c.kernel << ',' << c.filter << ',' << format_double(c.gamma) << ',' << format_double(c.s) << ','
           << format_double(c.u) << ',' << format_double(c.c_lambda) << ',' << c.n << ',' << c.d << ',' << c.count
           << ',' << format_double(c.mean_risk) << ',' << format_double(c.stderr_risk) << ','
           << format_double(c.mean_bias_sq) << ',' << format_double(c.mean_variance) << '\n';
}

inline void write_plot_slopes(std::ostream& os, const std::vector<SlopeReport>& reports) {
    os << "kernel,filter,gamma,s,u,best_c_lambda,fitted_slope,stderr,ci68_low,ci68_high,theory_zeta,gap,pass\n";
    for (const auto& r : reports) {
        const auto& c = r.comparison;
        os << r.kernel << ',' << r.filter << ',' << format_double(r.gamma) << ',' << format_double(r.s) << ','
           << format_double(r.u) << ',' << format_double(c.fit.c_lambda) << ',' << format_double(c.fit.slope) << ','
           << format_double(c.fit.stderr_slope) << ',' << format_double(c.fit.ci68_low) << ','
           << format_double(c.fit.ci68_high) << ',' << format_double(c.theory_zeta) << ',' << format_double(c.gap)
           << ',' << (c.pass ? "true" : "false") << '\n';
    }
}

}  // namespace speclab
