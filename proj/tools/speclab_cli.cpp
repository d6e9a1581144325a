#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "speclab/speclab.hpp"

using namespace speclab;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::string out;
    std::string plotdata;
};

/// Output sink: the --out file when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw std::runtime_error("cannot open output '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

json exact_json(const std::optional<Rational>& r) { return r ? json(r->str()) : json(nullptr); }
json float_json(const std::optional<Rational>& r) {
    if (!r) return nullptr;
    if (r->is_infinite()) return r->num() > 0 ? "inf" : "-inf";
    return r->to_double();
}

json prediction_json(const RateQuery<Rational>& q, const RatePrediction<Rational>& p) {
    json j;
    j["query"] = {{"s", q.s.str()}, {"gamma", q.gamma.str()}, {"tau", q.tau.str()}, {"u", q.u.str()}};
    j["zeta"] = float_json(p.zeta);
    j["v1"] = float_json(p.v1);
    j["v2"] = float_json(p.v2);
    j["b1"] = float_json(p.b1);
    j["b2"] = float_json(p.b2);
    j["ell_gamma"] = p.ell_gamma;
    j["ell_lambda"] = p.ell_lambda ? json(*p.ell_lambda) : json(nullptr);
    j["ell_tilde"] = p.ell_tilde;
    j["s_tilde"] = float_json(p.s_tilde);
    j["p"] = p.p;
    j["minimax"] = float_json(p.minimax);
    j["Gamma"] = float_json(p.gamma_threshold);
    j["u_prime"] = float_json(p.u_prime);
    j["regime"] = regime_name(p.regime);
    j["benign"] = p.benign;
    j["saturated"] = p.saturated;
    j["sequence_exponent"] = q.u.is_infinite() ? json(nullptr) : float_json(sequence_exponent(q));
    j["exact"] = {{"zeta", exact_json(p.zeta)},       {"v1", exact_json(p.v1)},
                  {"v2", exact_json(p.v2)},           {"b1", exact_json(p.b1)},
                  {"b2", exact_json(p.b2)},           {"minimax", exact_json(p.minimax)},
                  {"Gamma", exact_json(p.gamma_threshold)}, {"u_prime", exact_json(p.u_prime)}};
    j["warnings"] = p.warnings;
    return j;
}

/// "u=a:b:h" -> exact grid a, a+h, ..., <= b.
std::vector<Rational> parse_sweep(const std::string& spec) {
    if (spec.rfind("u=", 0) != 0) throw std::invalid_argument("--sweep expects u=start:stop:step");
    const std::string body = spec.substr(2);
    const auto c1 = body.find(':'), c2 = body.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw std::invalid_argument("--sweep expects u=start:stop:step");
    const Rational a = Rational::parse(body.substr(0, c1));
    const Rational b = Rational::parse(body.substr(c1 + 1, c2 - c1 - 1));
    const Rational h = Rational::parse(body.substr(c2 + 1));
    if (!(h > Rational(0))) throw std::invalid_argument("--sweep step must be > 0");
    std::vector<Rational> out;
    for (Rational u = a; u <= b; u += h)
        if (u > Rational(0)) out.push_back(u);
    return out;
}

std::string str_or_null(const std::optional<Rational>& r) { return r ? format_double(r->to_double()) : ""; }

void apply_globals(ExperimentPlan& plan, const GlobalOptions& g) {
    if (g.seed) plan.seed = *g.seed;
    if (g.jobs) plan.jobs = *g.jobs;
    plan.validate();
}

void emit_plotdata(const std::string& prefix, const std::vector<ResultRow>& rows, double tolerance) {
    if (prefix.empty()) return;
    {
        std::ofstream os(prefix + "_curves.csv", std::ios::binary);
        write_plot_curves(os, aggregate(rows));
    }
    std::ofstream os(prefix + "_slopes.csv", std::ios::binary);
    try {
        write_plot_slopes(os, slope_reports(rows, tolerance));
    } catch (const std::invalid_argument& e) {
        std::cerr << "plotdata: slopes skipped (" << e.what() << ")\n";
    }
}

bool all_ok(const std::vector<ResultRow>& rows) {
    for (const auto& r : rows)
        if (!r.ok()) return false;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral-algorithm learning curves on the sphere: theory exponents, simulations, diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--config", g.config, "JSON experiment plan");
    app.add_option("--seed", g.seed, "Master seed (overrides the plan)");
    app.add_option("--jobs", g.jobs, "Worker threads (overrides the plan)")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output file (default: stdout)");
    app.add_option("--emit-plotdata", g.plotdata, "Prefix for long-format plot data CSVs");

    // rates
    auto* rates = app.add_subcommand("rates", "Closed-form rate exponents for one query, or a zeta(u) sweep");
    std::string r_s, r_gamma, r_tau = "inf", r_u, r_sweep;
    rates->add_option("--s", r_s, "Source smoothness s")->required();
    rates->add_option("--gamma", r_gamma, "Scaling exponent gamma (n ~ d^gamma)")->required();
    rates->add_option("--tau", r_tau, "Filter qualification (1, q, or inf)");
    rates->add_option("--u", r_u, "Regularization exponent u (lambda ~ d^-u), or inf");
    rates->add_option("--sweep", r_sweep, "Sweep u=start:stop:step and emit CSV");

    // curve
    auto* curve = app.add_subcommand("curve", "Simulated risk for one (gamma, s, u) cell");
    ExperimentPlan cplan;
    cplan.repetitions = 5;
    cplan.n = {500};
    std::vector<std::string> c_filters;
    curve->add_option("--kernel", cplan.kernel, "ntk | rbf | powser:a0,a1,...");
    curve->add_option("--filter", c_filters, "krr | gf | it:<q> | gd:<eta> (repeatable)");
    curve->add_option("--gamma", cplan.gamma);
    curve->add_option("--s", cplan.s);
    curve->add_option("--u", cplan.u);
    curve->add_option("--c-lambda", cplan.c_lambda);
    curve->add_option("--n", cplan.n);
    curve->add_option("--reps", cplan.repetitions);
    curve->add_option("--n-test", cplan.n_test);
    curve->add_option("--sigma", cplan.sigma);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a full experiment plan (--config) and write the result CSV");

    // seq
    auto* seq = app.add_subcommand("seq", "Exact sequence-model risk curve over a d-grid");
    std::string q_kernel = "ideal", q_filter = "krr";
    double q_s = 1.0, q_gamma = 1.5, q_u = 0.5, q_c = 1.0, q_sigma = 1.0;
    int q_kmax = 12;
    std::vector<int> q_d{100, 200, 400, 800, 1600, 3200};
    seq->add_option("--kernel", q_kernel, "ideal (mu_k = d^-k) | ntk | rbf | powser:...");
    seq->add_option("--filter", q_filter);
    seq->add_option("--s", q_s);
    seq->add_option("--gamma", q_gamma);
    seq->add_option("--u", q_u);
    seq->add_option("--c-lambda", q_c);
    seq->add_option("--sigma", q_sigma);
    seq->add_option("--k-max", q_kmax);
    seq->add_option("--d", q_d, "Dimensions (n = d^gamma)");

    // diag
    auto* diag = app.add_subcommand("diag", "Kernel-matrix eigenvalue blocks against the per-degree prediction");
    std::string g_kernel = "rbf";
    int g_d = 100, g_ell = 1, g_kmax = 12;
    long g_n = 1000;
    bool g_eigs = false;
    diag->add_option("--kernel", g_kernel);
    diag->add_option("--d", g_d);
    diag->add_option("--n", g_n);
    diag->add_option("--ell", g_ell, "Degree cutoff (bulk = degrees above ell)");
    diag->add_option("--k-max", g_kmax);
    diag->add_flag("--eigenvalues", g_eigs, "Include the full eigenvalue list");

    // slopes
    auto* slopes = app.add_subcommand("slopes", "Best-C_lambda slope fits compared with the theory exponent");
    std::string s_in;
    std::optional<double> s_tol;
    slopes->add_option("--in", s_in, "Existing result CSV (otherwise the --config plan is run)");
    slopes->add_option("--tolerance", s_tol, "Pass band |fitted - zeta|");

    CLI11_PARSE(app, argc, argv);

    try {
        Sink sink(g.out);
        std::ostream& os = sink.stream();

        if (*rates) {
            const Rational s = Rational::parse(r_s), gamma = Rational::parse(r_gamma), tau = Rational::parse(r_tau);
            if (!r_sweep.empty()) {
                os << "u,zeta,v1,v2,b1,b2,sequence_zeta,regime\n";
                for (const Rational& u : parse_sweep(r_sweep)) {
                    const RateQuery<Rational> q{s, gamma, tau, u};
                    const auto p = learning_curve_exponent(q);
                    os << format_double(u.to_double()) << ',' << format_double(p.zeta.to_double()) << ','
                       << format_double(p.v1.to_double()) << ',' << format_double(p.v2.to_double()) << ','
                       << format_double(p.b1.to_double()) << ',' << str_or_null(p.b2) << ','
                       << format_double(sequence_exponent(q).to_double()) << ',' << regime_name(p.regime) << '\n';
                }
            } else {
                if (r_u.empty()) throw std::invalid_argument("rates: --u or --sweep is required");
                const RateQuery<Rational> q{s, gamma, tau, Rational::parse(r_u)};
                os << prediction_json(q, learning_curve_exponent(q)).dump(2) << '\n';
            }
            return 0;
        }

        if (*curve || *sweep) {
            ExperimentPlan plan;
            if (*sweep) {
                if (g.config.empty()) throw std::invalid_argument("sweep: --config is required");
                plan = load_plan(g.config);
            } else {
                plan = cplan;
                if (!c_filters.empty()) plan.filters = c_filters;
            }
            apply_globals(plan, g);
            const auto rows = run_plan(plan);
            write_csv(os, rows);
            emit_plotdata(g.plotdata, rows, plan.tolerance);
            if (*curve) {
                for (const auto& c : aggregate(rows))
                    std::cerr << c.filter << " u=" << format_double(c.u) << " C=" << format_double(c.c_lambda)
                              << " n=" << c.n << " d=" << c.d << " risk=" << format_double(c.mean_risk) << " +- "
                              << format_double(c.stderr_risk) << '\n';
            }
            return all_ok(rows) ? 0 : 1;
        }

        if (*seq) {
            const FilterSpec shape = parse_filter(q_filter, 1.0);
            const RateQuery<Rational> q{Rational::from_double(q_s), Rational::from_double(q_gamma),
                                        Rational::from_double(shape.qualification()), Rational::from_double(q_u)};
            const double zeta = sequence_exponent(q).to_double();
            os << "d,n,lambda,risk,sequence_zeta\n";
            std::vector<std::pair<double, double>> pts;
            const KernelSpec* kp = nullptr;
            std::optional<KernelSpec> kernel;
            if (q_kernel != "ideal") kernel = parse_kernel(q_kernel), kp = &*kernel;
            for (int d : q_d) {
                const EigenStructure es = kp ? eigen_structure(*kp, d, q_kmax) : idealized_eigen_structure(d, q_kmax);
                // Unit [H]^s energy per degree: sum_j f_j^2 = mu_k^s.
                std::vector<double> energy;
                for (double mu : es.mu) energy.push_back(mu > 0.0 ? std::pow(mu, q_s) : 0.0);
                const double n = std::pow(static_cast<double>(d), q_gamma);
                const double lambda = regularization(q_c, q_u, d);
                const double risk = sequence_risk_exact(
                    SequenceModelSpec::from_structure(es, energy, q_sigma, n, shape.with_lambda(lambda)));
                os << d << ',' << format_double(n) << ',' << format_double(lambda) << ',' << format_double(risk) << ','
                   << format_double(zeta) << '\n';
                pts.emplace_back(d, risk);
            }
            if (pts.size() >= 3) {
                const SlopeFit f = fit_slope(pts);
                std::cerr << "fitted slope " << format_double(f.slope) << " (+- " << format_double(f.stderr_slope)
                          << "), sequence exponent " << format_double(zeta) << '\n';
            }
            return 0;
        }

        if (*diag) {
            const KernelSpec kernel = parse_kernel(g_kernel);
            RngStream stream(derive_seed(g.seed.value_or(0), fnv1a("diag"), 0, Substream::train_points));
            const SpherePointSet X = sample_sphere(g_n, g_d, stream);
            const EigenStructure es = eigen_structure(kernel, g_d, g_kmax);
            const SpectralBlockReport r = spectral_block_report(gram(kernel, X), es, g_ell);
            json j;
            j["kernel"] = kernel.id();
            j["d"] = g_d;
            j["n"] = g_n;
            j["ell"] = g_ell;
            j["kappa1"] = r.kappa1;
            j["bulk_mean"] = r.bulk_mean;
            j["bulk_spread"] = r.bulk_spread;
            j["bulk_quantile_spread"] = r.bulk_quantile_spread;
            j["kappa1_rel_error"] = r.kappa1_rel_error;
            j["block_sizes"] = r.block_sizes;
            j["block_mean"] = r.block_mean;
            j["block_predicted"] = r.block_predicted;
            j["gap_ratio"] = r.gap_ratio;
            if (g_eigs) j["eigenvalues"] = r.eigenvalues;
            os << j.dump(2) << '\n';
            return 0;
        }

        if (*slopes) {
            std::vector<ResultRow> rows;
            double tol = 0.3;
            if (!s_in.empty()) {
                std::ifstream in(s_in);
                if (!in) throw std::runtime_error("cannot open '" + s_in + "'");
                rows = read_csv(in);
                if (!g.config.empty()) tol = load_plan(g.config).tolerance;
            } else {
                if (g.config.empty()) throw std::invalid_argument("slopes: --config or --in is required");
                ExperimentPlan plan = load_plan(g.config);
                apply_globals(plan, g);
                rows = run_plan(plan);
                tol = plan.tolerance;
            }
            if (s_tol) tol = *s_tol;
            const auto reports = slope_reports(rows, tol);
            write_plot_slopes(os, reports);
            emit_plotdata(g.plotdata, rows, tol);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
