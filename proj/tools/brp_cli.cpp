// Batch front-end: algebra tables, piecewise-linear lifts, controlled-path
// approximation studies, RDE solves and bundle-metric reports. Exit codes
// encode pass/fail of the numeric thresholds so the binary can drive CI.

#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "brp/goldens.hpp"
#include "brp/io.hpp"

using namespace brp;

namespace {

int infer_labels(const std::vector<std::string>& literals) {
    int labels = 1;
    for (const auto& lit : literals)
        for (std::size_t i = 0; i + 1 < lit.size(); ++i)
            if (lit[i] == '[' && lit[i + 1] >= 'a' && lit[i + 1] <= 'z')
                labels = std::max(labels, lit[i + 1] - 'a' + 1);
    return labels;
}

std::string tensor_string(const TensorSeries& t, int labels) {
    if (t.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : t.terms()) {
        Rational a = c;
        if (first) {
            if (a.sign() < 0) {
                out += "-";
                a = -a;
            }
        } else {
            out += a.sign() < 0 ? " - " : " + ";
            if (a.sign() < 0) a = -a;
        }
        if (!(a == Rational(1))) out += a.to_string() + "*";
        out += to_literal(k.first, labels) + "(x)" + to_literal(k.second, labels);
        first = false;
    }
    return out;
}

std::vector<int> parse_levels(const std::string& spec) {
    auto colon = spec.find(':');
    std::vector<int> levels;
    if (colon == std::string::npos) {
        levels.push_back(std::stoi(spec));
    } else {
        int lo = std::stoi(spec.substr(0, colon));
        int hi = std::stoi(spec.substr(colon + 1));
        for (int k = lo; k <= hi; ++k) levels.push_back(k);
    }
    return levels;
}

std::vector<double> parse_vector(const std::string& spec) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        out.push_back(std::stod(spec.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

int report_golden(const goldens::GoldenReport& r, const std::string& what) {
    if (r.ok()) {
        std::printf("OK: %d %s match\n", r.matched, what.c_str());
        return 0;
    }
    for (const auto& f : r.failures) std::printf("MISMATCH: %s\n", f.c_str());
    return 1;
}

int run_algebra(const std::string& op, std::vector<std::string> args, const std::string& basis_name,
                int labels_opt, int N, bool golden, int cutoff) {
    if (op == "star") {
        if (golden) return report_golden(goldens::check_star_products(), "products");
        if (args.size() != 2) throw CLI::ValidationError("algebra star needs two forest literals");
        int labels = labels_opt > 0 ? labels_opt : infer_labels(args);
        Forest left = parse_forest(args[0]), right = parse_forest(args[1]);
        if (basis_name == "zeta") {
            std::printf("%s\n", goldens::zeta_string(star_zeta(left, right), labels).c_str());
        } else {
            int cut = cutoff > 0 ? cutoff : left.degree() + right.degree();
            std::printf("%s\n", convolution(ForestSeries(left), ForestSeries(right), cut, labels)
                                    .to_string(labels)
                                    .c_str());
        }
        return 0;
    }
    if (op == "coproduct" || op == "reduced") {
        if (args.size() != 1) throw CLI::ValidationError("algebra " + op + " needs one literal");
        int labels = labels_opt > 0 ? labels_opt : infer_labels(args);
        Forest h = parse_forest(args[0]);
        TensorSeries t = op == "coproduct" ? coproduct(h) : reduced_coproduct(h);
        std::printf("%s\n", tensor_string(t, labels).c_str());
        return 0;
    }
    if (op == "antipode" || op == "pi1") {
        if (args.size() != 1) throw CLI::ValidationError("algebra " + op + " needs one literal");
        int labels = labels_opt > 0 ? labels_opt : infer_labels(args);
        Forest h = parse_forest(args[0]);
        ForestSeries s = op == "antipode" ? antipode(h) : primitive_projector(h);
        std::printf("%s\n", s.to_string(labels).c_str());
        return 0;
    }
    if (op == "graft" || op == "top") {
        if (args.size() != 2) throw CLI::ValidationError("algebra " + op + " needs two literals");
        int labels = labels_opt > 0 ? labels_opt : infer_labels(args);
        Forest x = parse_forest(args[0]), y = parse_forest(args[1]);
        ForestSeries s =
            op == "graft" ? grafting(x, y) : natural_growth(ForestSeries(x), ForestSeries(y));
        std::printf("%s\n", s.to_string(labels).c_str());
        return 0;
    }
    if (op == "primitives") {
        int labels = labels_opt > 0 ? labels_opt : 1;
        PrimitiveBasis basis = PrimitiveBasis::build(labels, N);
        if (golden) {
            if (labels != 1 || N < 4)
                throw CLI::ValidationError("golden primitive tables need --labels 1 --N 4");
            auto r = goldens::check_pi1_table();
            auto dims = goldens::check_primitive_dimensions(basis);
            for (const auto& f : dims.failures) r.failures.push_back(f);
            return report_golden(r, "basis vectors");
        }
        for (std::size_t i = 0; i < basis.primitives().size(); ++i)
            std::printf("p%zu (degree %d) = %s\n", i + 1,
                        basis.primitive_degree(static_cast<int>(i)),
                        basis.primitives()[i].to_string(labels).c_str());
        return 0;
    }
    if (op == "topbasis") {
        int labels = labels_opt > 0 ? labels_opt : 1;
        PrimitiveBasis basis = PrimitiveBasis::build(labels, N);
        if (golden) {
            if (labels != 1 || N < 4)
                throw CLI::ValidationError("golden completion tables need --labels 1 --N 4");
            return report_golden(goldens::check_top_completion(basis), "completion vectors");
        }
        for (const TopWord& w : basis.words()) {
            std::string name = "T(";
            for (std::size_t i = 0; i < w.indices.size(); ++i)
                name += (i ? "," : "") + std::string("p") + std::to_string(w.indices[i] + 1);
            name += ")";
            std::printf("%s = %s\n", name.c_str(), w.element.to_string(labels).c_str());
        }
        return 0;
    }
    throw CLI::ValidationError("unknown algebra operation: " + op);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"branched rough paths: algebra tables, lifts, approximation, RDEs, metrics"};
    app.require_subcommand(1);
    int jobs = 1;
    unsigned seed = 1;
    app.add_option("--jobs", jobs, "worker threads for pair sweeps");
    app.add_option("--seed", seed, "seed for randomized sweeps");

    auto* algebra = app.add_subcommand("algebra", "Hopf-algebra computations and golden tables");
    std::string alg_op, basis_name = "zeta";
    std::vector<std::string> alg_args;
    int alg_labels = 0, alg_N = 4, alg_cutoff = 0;
    bool alg_golden = false;
    algebra
        ->add_option("op", alg_op,
                     "star|coproduct|reduced|antipode|pi1|graft|top|primitives|topbasis")
        ->required();
    // forest literals are taken from the remaining arguments: a positional
    // vector would let the parser expand "[...]" as an inline list
    algebra->allow_extras();
    algebra->add_option("--basis", basis_name, "zeta|delta")->check(CLI::IsMember({"zeta", "delta"}));
    algebra->add_option("--labels", alg_labels, "alphabet size (inferred from literals by default)");
    algebra->add_option("--N", alg_N, "maximal degree for basis construction");
    algebra->add_option("--cutoff", alg_cutoff, "truncation degree for delta-basis products");
    algebra->add_flag("--golden", alg_golden, "diff against the embedded tables");

    auto* lift = app.add_subcommand("lift", "lift a piecewise-linear path");
    std::string lift_in, lift_out, lift_compare, lift_out_distance;
    double lift_alpha = 0.0;
    lift->add_option("path", lift_in, "GridPath JSON")->required();
    lift->add_option("--alpha", lift_alpha, "Holder exponent, not 1/n")->required();
    lift->add_option("--out", lift_out, "write the lifted rough path JSON here");
    lift->add_option("--compare", lift_compare, "second rough path JSON for a distance report");
    lift->add_option("--out-distance", lift_out_distance, "CSV for the per-forest distances");

    auto* approx = app.add_subcommand("approx", "dissection approximation and convergence study");
    std::string approx_rp, approx_z, approx_levels = "2:6", approx_out, approx_remainders;
    std::string approx_out_control;
    double approx_beta = 0.0, approx_epsilon = 0.0;
    approx->add_option("roughpath", approx_rp, "rough path JSON")->required();
    approx->add_option("controlled", approx_z, "controlled path JSON (tautological if omitted)");
    approx->add_option("--beta", approx_beta, "target Holder exponent < alpha")->required();
    approx->add_option("--mesh-levels,--levels", approx_levels, "dyadic levels, e.g. 2:6");
    approx->add_option("--epsilon", approx_epsilon,
                       "Holder margin for extracted control data, default (1-N*alpha)/2");
    approx->add_option("--out", approx_out, "convergence CSV");
    approx->add_option("--out-remainders", approx_remainders, "remainder table CSV");
    approx->add_option("--out-control", approx_out_control,
                       "extract control data f with gamma(X,f) = Z and write it here");

    auto* rde = app.add_subcommand("rde", "solve a rough differential equation");
    std::string rde_rp, rde_field, rde_xi = "1.0", rde_out, rde_out_controlled, rde_out_stability;
    bool rde_stability = false;
    rde->add_option("roughpath", rde_rp, "rough path JSON")->required();
    rde->add_option("field", rde_field, "polynomial vector field JSON")->required();
    rde->add_option("--xi", rde_xi, "initial condition, comma separated");
    rde->add_option("--out", rde_out, "solution CSV");
    rde->add_option("--out-controlled", rde_out_controlled, "lifted controlled path JSON");
    rde->add_flag("--stability", rde_stability, "run the initial-condition stability sweep");
    rde->add_option("--out-stability", rde_out_stability, "stability sweep CSV");

    auto* metric = app.add_subcommand("metric", "flat-metric and tube reports");
    std::vector<std::string> metric_points;
    std::string metric_tubes, metric_out;
    std::vector<std::string> metric_rp_distance;
    bool metric_geometric = false;
    metric->add_option("points", metric_points, "alternating base.json fiber.json pairs");
    metric->add_flag("--geometric", metric_geometric,
                     "require base points to be canonical piecewise-linear lifts");
    metric->add_option("--tubes", metric_tubes, "tube spec JSON (array)");
    metric->add_option("--out", metric_out, "metric report CSV");
    metric
        ->add_option("--rp-distance", metric_rp_distance,
                     "two rough path JSONs for a per-forest distance CSV")
        ->expected(2);

    CLI11_PARSE(app, argc, argv);
    NormOptions norm_opts;
    norm_opts.jobs = jobs;

    try {
        if (*algebra) {
            alg_args = algebra->remaining();
            return run_algebra(alg_op, alg_args, basis_name, alg_labels, alg_N, alg_golden,
                               alg_cutoff);
        }

        if (*lift) {
            auto path = io::grid_path_from_json(io::load_json_file(lift_in));
            auto X = BranchedRoughPath::lift_piecewise_linear(path, lift_alpha);
            std::printf("N = %d, grid = %zu, alphabet = %d\n", X.N(), X.grid_size(), X.labels());
            std::printf("chen_defect = %s\n", io::format_double(X.chen_defect()).c_str());
            std::printf("multiplicativity_defect = %s\n",
                        io::format_double(X.multiplicativity_defect()).c_str());
            if (!lift_out.empty()) io::save_json_file(io::to_json(X), lift_out);
            if (!lift_compare.empty()) {
                auto Y = io::rough_path_from_json(io::load_json_file(lift_compare));
                auto report = X.distance_report(Y, norm_opts);
                std::printf("rho_alpha = %s\n", io::format_double(report.max).c_str());
                if (!lift_out_distance.empty())
                    io::write_distance_csv(lift_out_distance, report, X.tables(), X.labels());
            }
            return 0;
        }

        if (*approx) {
            auto X = std::make_shared<BranchedRoughPath>(
                io::rough_path_from_json(io::load_json_file(approx_rp)));
            if (!(approx_beta > 0.0) || approx_beta >= X->alpha()) {
                std::fprintf(stderr, "error: beta must lie in (0, alpha)\n");
                return 2;
            }
            auto levels = parse_levels(approx_levels);
            if (levels.size() < 2) {
                std::fprintf(stderr, "error: insufficient scales for fit\n");
                return 2;
            }
            ControlledPath Z = approx_z.empty()
                                   ? ControlledPath::tautological(X)
                                   : io::controlled_from_json(io::load_json_file(approx_z), X);
            PrimitiveBasis basis = PrimitiveBasis::build(X->labels(), X->N());
            auto report = convergence_study(Z, approx_beta, levels, basis, norm_opts);
            for (std::size_t i = 0; i < report.thetas.size(); ++i)
                std::printf("theta = %-12s error_beta = %s\n",
                            io::format_double(report.thetas[i]).c_str(),
                            io::format_double(report.errors[i]).c_str());
            if (report.fit.exact)
                std::printf("slope = exact (errors at the noise floor)\n");
            else
                std::printf("slope = %s\n", io::format_double(report.fit.slope).c_str());
            if (!approx_out.empty()) io::write_convergence_csv(approx_out, report);
            if (!approx_remainders.empty())
                io::write_remainder_csv(approx_remainders, Z.remainder_table(norm_opts), Z);
            if (!approx_out_control.empty()) {
                double eps = approx_epsilon > 0.0 ? approx_epsilon : default_epsilon(X->alpha());
                io::save_json_file(
                    io::to_json(extract_control_data(Z, basis, eps), X->labels()),
                    approx_out_control);
            }
            double threshold = X->alpha() - approx_beta - 0.1;
            if (!report.fit.exact && report.fit.slope < threshold) {
                std::fprintf(stderr, "FAIL: slope %g below threshold %g\n", report.fit.slope,
                             threshold);
                return 1;
            }
            if (!report.monotone) {
                std::fprintf(stderr, "FAIL: errors are not nonincreasing within 10%%\n");
                return 1;
            }
            return 0;
        }

        if (*rde) {
            auto X = std::make_shared<BranchedRoughPath>(
                io::rough_path_from_json(io::load_json_file(rde_rp)));
            auto field = io::field_from_json(io::load_json_file(rde_field));
            auto xi = parse_vector(rde_xi);
            RDESolver solver(X, field);
            auto sol = solver.solve(xi);
            std::printf("Y(T) =");
            for (double v : sol.Y.back()) std::printf(" %s", io::format_double(v).c_str());
            std::printf("\n");
            if (!rde_out.empty()) io::write_solution_csv(rde_out, sol);
            if (!rde_out_controlled.empty()) {
                if (sol.lifted.size() == 1) {
                    io::save_json_file(io::to_json(sol.lifted[0]), rde_out_controlled);
                } else {
                    io::json coords = io::json::array();
                    for (const auto& cp : sol.lifted) coords.push_back(io::to_json(cp));
                    io::save_json_file(io::json{{"coordinates", coords}}, rde_out_controlled);
                }
            }
            if (rde_stability) {
                std::mt19937_64 rng(seed);
                std::uniform_real_distribution<double> dir(-1.0, 1.0);
                std::vector<std::vector<std::string>> rows;
                std::printf("stability sweep (initial condition):\n");
                for (double scale : {1e-1, 1e-2, 1e-3, 1e-4}) {
                    auto xit = xi;
                    for (double& v : xit) v += scale * dir(rng);
                    auto r = ito_lyons_stability(xi, X, xit, X, field, norm_opts);
                    std::printf("  |dxi| = %-10g ratio = %s\n", scale,
                                r.degenerate ? "degenerate" : io::format_double(r.ratio).c_str());
                    rows.push_back({io::format_double(scale),
                                    r.degenerate ? "degenerate" : io::format_double(r.ratio)});
                }
                if (!rde_out_stability.empty())
                    io::write_csv(rde_out_stability, {"perturbation", "ratio"}, rows);
            }
            return 0;
        }

        if (*metric) {
            if (!metric_rp_distance.empty()) {
                auto A = io::rough_path_from_json(io::load_json_file(metric_rp_distance[0]));
                auto B = io::rough_path_from_json(io::load_json_file(metric_rp_distance[1]));
                auto report = A.distance_report(B, norm_opts);
                std::printf("rho_alpha = %s\n", io::format_double(report.max).c_str());
                if (!metric_out.empty())
                    io::write_distance_csv(metric_out, report, A.tables(), A.labels());
                return 0;
            }
            if (metric_points.size() < 4 || metric_points.size() % 2 != 0) {
                std::fprintf(stderr,
                             "error: need alternating base.json fiber.json pairs (>= 2 points)\n");
                return 2;
            }
            std::vector<BundlePoint> points;
            for (std::size_t i = 0; i < metric_points.size(); i += 2) {
                auto base = std::make_shared<BranchedRoughPath>(
                    io::rough_path_from_json(io::load_json_file(metric_points[i])));
                if (metric_geometric &&
                    (base->chen_defect() > 1e-8 || base->multiplicativity_defect() > 1e-8)) {
                    std::fprintf(stderr, "error: %s is not a canonical lift (geometric mode)\n",
                                 metric_points[i].c_str());
                    return 2;
                }
                points.emplace_back(
                    base, io::controlled_from_json(io::load_json_file(metric_points[i + 1]), base));
            }
            std::vector<TubeSpec> tubes;
            if (!metric_tubes.empty())
                for (const auto& t : io::load_json_file(metric_tubes))
                    tubes.push_back(io::tube_spec_from_json(t));
            PrimitiveBasis basis =
                PrimitiveBasis::build(points[0].base->labels(), points[0].base->N());
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < points.size(); ++i)
                for (std::size_t j = i + 1; j < points.size(); ++j) {
                    double d = flat_distance(points[i], points[j], norm_opts);
                    double ns = tubes.empty() ? 0.0
                                              : truncated_ns_distance(tubes, points[i], points[j],
                                                                      basis, norm_opts);
                    std::printf("pair %zu-%zu: d_flat = %s partial_ns = %s\n", i, j,
                                io::format_double(d).c_str(), io::format_double(ns).c_str());
                    rows.push_back({std::to_string(i) + "-" + std::to_string(j),
                                    io::format_double(d), io::format_double(ns)});
                }
            if (!metric_out.empty())
                io::write_csv(metric_out, {"pair", "d_flat", "partial_ns"}, rows);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
