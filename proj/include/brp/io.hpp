#pragma once

// JSON and CSV interchange. Rough paths and controlled paths are keyed by
// forest literals; rationals travel as "p/q" strings; floating-point values
// are printed with %.17g so files round-trip bit-exactly.

#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "brp/approximation.hpp"
#include "brp/bundle.hpp"
#include "brp/rde.hpp"

namespace brp::io {

using nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

inline void save_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- grid paths

inline json to_json(const GridPath& p) {
    return json{{"times", p.times}, {"values", p.values}};
}

inline GridPath grid_path_from_json(const json& j) {
    GridPath p;
    p.times = j.at("times").get<std::vector<double>>();
    p.values = j.at("values").get<std::vector<std::vector<double>>>();
    p.validate();
    return p;
}

// --------------------------------------------------------------- rough paths

inline json to_json(const BranchedRoughPath& X) {
    const auto& tab = X.tables();
    json values = json::object();
    for (std::size_t f = 1; f < tab.forests.size(); ++f) {
        std::vector<double> series(X.grid_size());
        for (std::size_t i = 0; i < X.grid_size(); ++i) series[i] = X.at(i)[f];
        values[to_literal(tab.forests[f], X.labels())] = series;
    }
    return json{{"alpha", X.alpha()},
                {"N", X.N()},
                {"alphabet", X.labels()},
                {"times", X.times()},
                {"values", values}};
}

inline BranchedRoughPath rough_path_from_json(const json& j) {
    double alpha = j.at("alpha").get<double>();
    int labels = j.at("alphabet").get<int>();
    auto times = j.at("times").get<std::vector<double>>();
    int N = static_cast<int>(std::floor(1.0 / alpha));
    auto tab = algebra_tables(labels, N);
    std::vector<std::vector<double>> vals(times.size(),
                                          std::vector<double>(tab->forests.size(), 0.0));
    for (auto& row : vals) row[0] = 1.0;
    for (const auto& [key, series] : j.at("values").items()) {
        int idx = tab->index(parse_forest(key));
        auto v = series.get<std::vector<double>>();
        if (v.size() != times.size())
            throw std::invalid_argument("rough path JSON: series length mismatch for " + key);
        for (std::size_t i = 0; i < v.size(); ++i) vals[i][idx] = v[i];
    }
    return BranchedRoughPath(alpha, labels, std::move(times), std::move(vals));
}

// ----------------------------------------------------------- controlled paths

inline json to_json(const ControlledPath& Z) {
    const auto& tab = Z.ref().tables();
    json comps = json::object();
    for (int h = 0; h < tab.n_components; ++h) {
        std::vector<double> series(Z.grid_size());
        for (std::size_t i = 0; i < Z.grid_size(); ++i) series[i] = Z.component(i, h);
        comps[to_literal(tab.forests[h], Z.ref().labels())] = series;
    }
    return json{{"alpha", Z.alpha()},
                {"N", Z.N()},
                {"alphabet", Z.ref().labels()},
                {"times", Z.ref().times()},
                {"components", comps}};
}

inline ControlledPath controlled_from_json(const json& j,
                                           std::shared_ptr<const BranchedRoughPath> ref) {
    if (j.at("alphabet").get<int>() != ref->labels() || j.at("N").get<int>() != ref->N() ||
        j.at("times").get<std::vector<double>>() != ref->times())
        throw std::invalid_argument("controlled path JSON does not match the reference grid");
    const auto& tab = ref->tables();
    std::vector<std::vector<double>> comps(ref->grid_size(),
                                           std::vector<double>(tab.n_components, 0.0));
    for (const auto& [key, series] : j.at("components").items()) {
        int idx = tab.index(parse_forest(key));
        if (idx >= tab.n_components)
            throw std::invalid_argument("controlled path JSON: component degree >= N");
        auto v = series.get<std::vector<double>>();
        for (std::size_t i = 0; i < v.size() && i < comps.size(); ++i) comps[i][idx] = v[i];
    }
    return ControlledPath(std::move(ref), std::move(comps));
}

// --------------------------------------------------------------- control data

inline json to_json(const SmoothControlData& f, int labels) {
    json comps = json::object();
    for (int h = 0; h < f.tab->n_components; ++h) {
        std::vector<double> series(f.times.size());
        for (std::size_t i = 0; i < f.times.size(); ++i) series[i] = f.comps[i][h];
        comps[to_literal(f.tab->forests[h], labels)] = series;
    }
    return json{{"epsilon", f.epsilon},
                {"alphabet", f.tab->labels},
                {"N", f.tab->N},
                {"times", f.times},
                {"components", comps}};
}

inline SmoothControlData control_from_json(const json& j) {
    SmoothControlData f;
    f.epsilon = j.at("epsilon").get<double>();
    f.tab = algebra_tables(j.at("alphabet").get<int>(), j.at("N").get<int>());
    f.times = j.at("times").get<std::vector<double>>();
    f.comps.assign(f.times.size(), std::vector<double>(f.tab->n_components, 0.0));
    for (const auto& [key, series] : j.at("components").items()) {
        int idx = f.tab->index(parse_forest(key));
        auto v = series.get<std::vector<double>>();
        for (std::size_t i = 0; i < v.size() && i < f.comps.size(); ++i) f.comps[i][idx] = v[i];
    }
    return f;
}

// --------------------------------------------------------------- vector fields

inline json to_json(const PolyVectorField& F) {
    json fields = json::array();
    for (const auto& per_label : F.fields) {
        json comps = json::array();
        for (const Poly& p : per_label) {
            json monomials = json::array();
            for (const auto& [e, c] : p.terms())
                monomials.push_back(json{{"exp", e}, {"coeff", c.to_string()}});
            comps.push_back(monomials);
        }
        fields.push_back(comps);
    }
    return json{{"noise_dim", F.noise_dim}, {"state_dim", F.state_dim}, {"fields", fields}};
}

inline PolyVectorField field_from_json(const json& j) {
    PolyVectorField F;
    F.noise_dim = j.at("noise_dim").get<int>();
    F.state_dim = j.at("state_dim").get<int>();
    for (const auto& per_label : j.at("fields")) {
        std::vector<Poly> comps;
        for (const auto& mono_list : per_label) {
            Poly p(F.state_dim);
            for (const auto& m : mono_list)
                p.add(m.at("exp").get<std::vector<int>>(),
                      Rational::parse(m.at("coeff").get<std::string>()));
            comps.push_back(std::move(p));
        }
        F.fields.push_back(std::move(comps));
    }
    F.validate();
    return F;
}

// ------------------------------------------------------------------ tube specs

inline json to_json(const TubeSpec& spec, int labels) {
    return json{{"section", to_json(spec.section, labels)},
                {"center", to_json(*spec.center)},
                {"radius", spec.radius},
                {"epsilon", spec.epsilon}};
}

inline TubeSpec tube_spec_from_json(const json& j) {
    TubeSpec spec;
    spec.section = control_from_json(j.at("section"));
    spec.center = std::make_shared<BranchedRoughPath>(rough_path_from_json(j.at("center")));
    spec.radius = j.at("radius").get<double>();
    spec.epsilon = j.at("epsilon").get<double>();
    spec.validate();
    return spec;
}

// ------------------------------------------------------------------------ CSV

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

inline void write_distance_csv(const std::string& path, const RoughPathDistanceReport& report,
                               const AlgebraTables& tab, int labels) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [f, dist] : report.per_forest)
        rows.push_back({to_literal(tab.forests[f], labels), format_double(dist)});
    write_csv(path, {"forest", "holder_distance"}, rows);
}

inline void write_convergence_csv(const std::string& path, const ConvergenceReport& report) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < report.thetas.size(); ++i)
        rows.push_back({format_double(report.thetas[i]), format_double(report.errors[i]),
                        format_double(report.fit.slope)});
    write_csv(path, {"theta", "error_beta", "slope"}, rows);
}

inline void write_rate_csv(const std::string& path, const IntegralRateReport& report) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < report.scales.size(); ++i)
        rows.push_back({format_double(report.scales[i]), format_double(report.defects[i]),
                        report.exact ? "exact" : format_double(report.fit.slope)});
    write_csv(path, {"scale", "defect", "slope"}, rows);
}

inline void write_solution_csv(const std::string& path, const RDESolution& sol) {
    std::vector<std::string> header{"t"};
    for (std::size_t b = 0; b < sol.Y.front().size(); ++b) header.push_back("Y" + std::to_string(b));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        std::vector<std::string> row{format_double(sol.times[i])};
        for (double v : sol.Y[i]) row.push_back(format_double(v));
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

inline void write_remainder_csv(const std::string& path, const RemainderTable& table,
                                const ControlledPath& Z) {
    const auto& tab = Z.ref().tables();
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : table.entries)
        rows.push_back({to_literal(tab.forests[e.component], Z.ref().labels()),
                        format_double(Z.ref().times()[e.s]), format_double(Z.ref().times()[e.t]),
                        format_double(e.value)});
    write_csv(path, {"forest", "s", "t", "value"}, rows);
}

}  // namespace brp::io
