#include "rcnlin/experiments.hpp"

#include "csv_util.hpp"
#include "rcnlin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace rcnlin {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!j.is_object())
        throw InvalidInput(where + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key))
            throw InvalidInput("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_as(const json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput("bad value for '" + key + "' in " + where + ": " + e.what());
    }
}

template <typename T>
void read_if_present(const json& j, const std::string& key, T& out, const std::string& where) {
    if (j.contains(key))
        out = get_as<T>(j, key, where);
}

Spacing parse_spacing(const std::string& s) {
    if (s == "linear")
        return Spacing::Linear;
    if (s == "log")
        return Spacing::Log;
    throw InvalidInput("grid spacing must be 'linear' or 'log', got '" + s + "'");
}

TieRule parse_tie_rule(const std::string& s) {
    if (s == "lowest-index")
        return TieRule::LowestIndex;
    if (s == "report-all")
        return TieRule::ReportAll;
    throw InvalidInput("tie_rule must be 'lowest-index' or 'report-all', got '" + s + "'");
}

MinimizerKind parse_minimizer(const std::string& s) {
    if (s == "closed_form")
        return MinimizerKind::ClosedForm;
    if (s == "pgd")
        return MinimizerKind::Pgd;
    throw InvalidInput("minimizer must be 'closed_form' or 'pgd', got '" + s + "'");
}

DataSource parse_source(const json& j, const std::string& where) {
    reject_unknown_keys(j, {"source", "path", "dim", "atoms"}, where);
    DataSource src;
    read_if_present(j, "source", src.kind, where);
    std::string path;
    read_if_present(j, "path", path, where);
    src.path = path;
    read_if_present(j, "dim", src.dim, where);
    read_if_present(j, "atoms", src.atoms, where);
    static const std::set<std::string> kinds{"counterexample", "csv", "random", "tie"};
    if (!kinds.count(src.kind))
        throw InvalidInput("unknown source '" + src.kind + "' in " + where);
    if (src.kind == "csv" && src.path.empty())
        throw InvalidInput(where + " source 'csv' needs a path");
    return src;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.grid.count < 2)
        throw InvalidInput("grid count must be at least 2");
    if (!(cfg.r > 0.0))
        throw InvalidInput("r must be positive");
    if (!(cfg.eta > 0.0 && cfg.eta < 0.5))
        throw InvalidInput("eta must satisfy 0 < eta < 1/2");
    make_loss(cfg.loss);
}

void require_grid_within(const std::vector<double>& values, double lo, double hi,
                         const std::string& name) {
    for (double v : values) {
        if (!(v > lo && v < hi))
            throw InvalidInput(name + " grid value " + detail::format_double(v) +
                               " lies outside (" + detail::format_double(lo) + ", " +
                               detail::format_double(hi) + ")");
    }
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits = 2) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

} // namespace

std::vector<double> ParameterGrid::values() const {
    if (count < 2)
        throw InvalidInput("grid count must be at least 2");
    if (!(stop > start))
        throw InvalidInput("grid stop must exceed start");
    std::vector<double> v(count);
    const double n = static_cast<double>(count - 1);
    if (spacing == Spacing::Log) {
        if (!(start > 0.0))
            throw InvalidInput("log-spaced grid needs a positive start");
        const double a = std::log(start);
        const double b = std::log(stop);
        for (std::size_t i = 0; i < count; ++i)
            v[i] = std::exp(a + (b - a) * static_cast<double>(i) / n);
    } else {
        for (std::size_t i = 0; i < count; ++i)
            v[i] = start + (stop - start) * static_cast<double>(i) / n;
    }
    v.front() = start;
    v.back() = stop;
    return v;
}

ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    if (experiment == "gamma-sweep") {
        cfg.grid = {0.01, 0.3, 30, Spacing::Linear};
    } else if (experiment == "eta-sweep") {
        cfg.grid = {0.05, 0.45, 9, Spacing::Linear};
    } else if (experiment == "recession-probe") {
        cfg.loss = "logistic";
    }
    return cfg;
}

ExperimentConfig config_from_json(const json& j) {
    const std::string where = "config";
    reject_unknown_keys(j,
                        {"experiment", "grid", "loss", "r", "eta", "gamma", "minimizer", "pgd",
                         "distribution", "sample", "dynamics", "probe", "out_dir", "seed"},
                        where);
    std::string experiment;
    read_if_present(j, "experiment", experiment, where);
    ExperimentConfig cfg = default_config(experiment);

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        reject_unknown_keys(g, {"start", "stop", "count", "spacing"}, "grid");
        read_if_present(g, "start", cfg.grid.start, "grid");
        read_if_present(g, "stop", cfg.grid.stop, "grid");
        read_if_present(g, "count", cfg.grid.count, "grid");
        if (g.contains("spacing"))
            cfg.grid.spacing = parse_spacing(get_as<std::string>(g, "spacing", "grid"));
    }
    read_if_present(j, "loss", cfg.loss, where);
    read_if_present(j, "r", cfg.r, where);
    read_if_present(j, "eta", cfg.eta, where);
    read_if_present(j, "gamma", cfg.gamma, where);
    if (j.contains("minimizer"))
        cfg.minimizer = parse_minimizer(get_as<std::string>(j, "minimizer", where));
    if (j.contains("pgd")) {
        const auto& p = j.at("pgd");
        reject_unknown_keys(p, {"step", "max_iters", "tolerance"}, "pgd");
        if (p.contains("step"))
            cfg.pgd.step = get_as<double>(p, "step", "pgd");
        read_if_present(p, "max_iters", cfg.pgd.max_iters, "pgd");
        read_if_present(p, "tolerance", cfg.pgd.tolerance, "pgd");
    }
    if (j.contains("distribution"))
        cfg.distribution = parse_source(j.at("distribution"), "distribution");
    if (j.contains("sample"))
        cfg.sample = parse_source(j.at("sample"), "sample");
    if (j.contains("dynamics")) {
        const auto& d = j.at("dynamics");
        reject_unknown_keys(d, {"mode", "iterations", "step", "v0", "tie_rule", "unit"}, "dynamics");
        read_if_present(d, "mode", cfg.dynamics.mode, "dynamics");
        if (cfg.dynamics.mode != "gd" && cfg.dynamics.mode != "cd")
            throw InvalidInput("dynamics mode must be 'gd' or 'cd'");
        read_if_present(d, "iterations", cfg.dynamics.iterations, "dynamics");
        read_if_present(d, "step", cfg.dynamics.step, "dynamics");
        read_if_present(d, "v0", cfg.dynamics.v0, "dynamics");
        if (d.contains("tie_rule"))
            cfg.dynamics.tie_rule = parse_tie_rule(get_as<std::string>(d, "tie_rule", "dynamics"));
        read_if_present(d, "unit", cfg.dynamics.unit, "dynamics");
    }
    if (j.contains("probe")) {
        const auto& p = j.at("probe");
        reject_unknown_keys(p, {"x0", "u", "lambdas"}, "probe");
        read_if_present(p, "x0", cfg.probe.x0, "probe");
        read_if_present(p, "u", cfg.probe.u, "probe");
        read_if_present(p, "lambdas", cfg.probe.lambdas, "probe");
    }
    std::string out_dir;
    if (j.contains("out_dir")) {
        read_if_present(j, "out_dir", out_dir, where);
        cfg.out_dir = out_dir;
    }
    read_if_present(j, "seed", cfg.seed, where);
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidInput("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

DiscreteDistribution build_distribution(const ExperimentConfig& cfg) {
    const auto& src = cfg.distribution;
    if (src.kind == "csv")
        return load_distribution_csv(src.path);
    if (src.kind == "random") {
        std::mt19937_64 rng(cfg.seed);
        return random_distribution(rng, src.dim, src.atoms);
    }
    if (src.kind == "tie")
        throw InvalidInput("'tie' is a sample source, not a distribution source");
    return make_counterexample(cfg.gamma);
}

std::vector<LabeledPoint> build_sample(const ExperimentConfig& cfg) {
    const auto& src = cfg.sample;
    if (src.kind == "csv")
        return load_sample_csv(src.path);
    if (src.kind == "tie")
        return {{{2.0, 0.0}, 1}, {{0.0, 2.0}, 1}};
    std::vector<LabeledPoint> sample;
    const DiscreteDistribution dist =
        src.kind == "random"
            ? [&] {
                  std::mt19937_64 rng(cfg.seed);
                  return random_distribution(rng, src.dim, src.atoms);
              }()
            : make_counterexample(cfg.gamma);
    for (const auto& a : dist.atoms())
        sample.push_back(a.point);
    return sample;
}

MinimizerKind resolve_minimizer(const ExperimentConfig& cfg) {
    if (cfg.minimizer)
        return *cfg.minimizer;
    return cfg.loss == "unhinged" ? MinimizerKind::ClosedForm : MinimizerKind::Pgd;
}

double heavy_atom_score(double gamma) {
    const DiscreteDistribution dist = make_counterexample(gamma);
    const Vector m = mean_label_feature(dist);
    return dot(m, dist.atoms()[kCounterexampleHeavyAtom].point.x);
}

double bisect_threshold(double lo, double hi, double tol) {
    double flo = heavy_atom_score(lo);
    const double fhi = heavy_atom_score(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw InvalidInput("bisection interval does not bracket a sign change");
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = heavy_atom_score(mid);
        if (fm == 0.0)
            return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

GammaSweepResult run_gamma_sweep(const ExperimentConfig& cfg) {
    const auto gammas = cfg.grid.values();
    require_grid_within(gammas, 0.0, 1.0, "gamma");
    const auto unhinged = make_loss("unhinged");

    GammaSweepResult res;
    for (double gamma : gammas) {
        const DiscreteDistribution dist = make_counterexample(gamma);
        const FitResult fit = unhinged_minimizer(dist, cfg.r);
        const RobustnessReport rep =
            check_rcn_robustness(dist, unhinged, cfg.r, cfg.eta, MinimizerKind::ClosedForm);
        SweepRecord rec;
        rec.parameter = "gamma";
        rec.value = gamma;
        rec.minimizer = fit.weights.v;
        rec.clean_error = rep.clean_fit_error;
        rec.noisy_fit_error = rep.noisy_fit_error;
        rec.objective = fit.objective;
        rec.robust = rep.robust;
        Vector diff = rep.minimizer_clean.v;
        for (std::size_t k = 0; k < diff.size(); ++k)
            diff[k] -= rep.minimizer_noisy.v[k];
        rec.drift = norm_inf(diff);
        rec.diagnostic = dot(fit.weights.v, dist.atoms()[kCounterexampleHeavyAtom].point.x);
        rec.degenerate = fit.degenerate_centroid;
        res.records.push_back(std::move(rec));
    }

    for (std::size_t i = 0; i + 1 < res.records.size() && !res.threshold; ++i) {
        const double a = *res.records[i].diagnostic;
        const double b = *res.records[i + 1].diagnostic;
        if (a == 0.0)
            res.threshold = res.records[i].value;
        else if ((a < 0.0) != (b < 0.0) || b == 0.0)
            res.threshold = bisect_threshold(res.records[i].value, res.records[i + 1].value);
    }

    if (res.threshold) {
        res.step_pattern_holds = std::all_of(res.records.begin(), res.records.end(), [&](const SweepRecord& r) {
            if (r.value < *res.threshold)
                return r.clean_error == 0.5;
            if (r.value > *res.threshold)
                return r.clean_error == 0.0;
            return true;
        });
    }
    return res;
}

std::vector<SweepRecord> run_eta_sweep(const ExperimentConfig& cfg) {
    const auto etas = cfg.grid.values();
    require_grid_within(etas, 0.0, 0.5, "eta");
    const DiscreteDistribution dist = build_distribution(cfg);
    const PotentialFunction phi = make_loss(cfg.loss);
    const MinimizerKind kind = resolve_minimizer(cfg);

    std::vector<SweepRecord> records;
    for (double eta : etas) {
        const RobustnessReport rep = check_rcn_robustness(dist, phi, cfg.r, eta, kind, cfg.pgd);
        SweepRecord rec;
        rec.parameter = "eta";
        rec.value = eta;
        rec.minimizer = rep.minimizer_noisy.v;
        rec.clean_error = rep.clean_fit_error;
        rec.noisy_fit_error = rep.noisy_fit_error;
        rec.objective = expected_loss(corrupt_rcn(dist, eta), phi, rep.minimizer_noisy.v);
        rec.robust = rep.robust;
        Vector diff = rep.minimizer_clean.v;
        for (std::size_t k = 0; k < diff.size(); ++k)
            diff[k] -= rep.minimizer_noisy.v[k];
        rec.drift = norm_inf(diff);
        rec.degenerate = rep.degenerate_clean || rep.degenerate_noisy;
        records.push_back(std::move(rec));
    }
    return records;
}

DynamicsResult run_dynamics(const ExperimentConfig& cfg) {
    const auto sample = build_sample(cfg);
    const auto& dyn = cfg.dynamics;
    DynamicsResult res;
    if (dyn.mode == "cd") {
        res.cd = cd_unhinged(sample, dyn.iterations, dyn.tie_rule, dyn.unit);
        res.trajectory = res.cd->trajectory;
        const Vector g = label_feature_sum(sample);
        const double best = norm_inf(g);
        for (const auto& v : res.trajectory.iterates) {
            for (std::size_t j : support(v)) {
                if (std::fabs(g[j]) != best)
                    res.support_in_argmax = false;
            }
        }
        return res;
    }
    Vector v0 = dyn.v0;
    if (v0.empty())
        v0.assign(sample.front().x.size(), 0.0);
    res.trajectory = gd_unhinged(sample, v0, dyn.step, dyn.iterations);
    const auto& g = res.trajectory.target;
    for (std::size_t t = 0; t < res.trajectory.iterates.size(); ++t) {
        Vector diff = gd_closed_form(v0, dyn.step, t, g);
        for (std::size_t j = 0; j < diff.size(); ++j)
            diff[j] -= res.trajectory.iterates[t][j];
        res.closed_form_residual = std::fmax(res.closed_form_residual, norm_inf(diff));
    }
    return res;
}

std::vector<LossReportRow> run_loss_report() {
    struct Entry {
        const char* loss;
        const char* reference;
        bool expected;
    };
    static const Entry entries[] = {
        {"exponential", "AdaBoost (Freund & Schapire 1997)", true},
        {"mixed_linear_exponential", "MadaBoost (Domingo & Watanabe 2000)", true},
        {"logistic", "LogitBoost (Friedman, Hastie & Tibshirani 1998)", true},
        {"hinge", "linear hinge (Gentile & Warmuth 1998)", false},
        {"unhinged", "unhinged (van Rooyen, Menon & Williamson 2015)", false},
    };
    std::vector<LossReportRow> rows;
    for (const auto& e : entries) {
        const auto rep = check_def1(make_loss(e.loss));
        LossReportRow row;
        row.loss = e.loss;
        row.reference = e.reference;
        row.expected = e.expected;
        row.satisfies_def1 = rep.passed();
        for (const auto& c : rep.checks) {
            if (!c.pass) {
                row.failing_check = c.name;
                row.witness_z = c.witness_z;
                row.witness_value = c.witness_value;
                break;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    const std::size_t d = records.empty() ? 0 : records.front().minimizer.size();
    out << (records.empty() ? "parameter" : records.front().parameter);
    for (std::size_t j = 0; j < d; ++j)
        out << ",v_" << (j + 1);
    out << ",objective,clean_error,noisy_fit_error,robust,drift,diagnostic,degenerate,stationary\n";
    for (const auto& r : records) {
        out << detail::format_double(r.value);
        for (double x : r.minimizer)
            out << ',' << detail::format_double(x);
        out << ',' << detail::format_double(r.objective) << ',' << detail::format_double(r.clean_error)
            << ',' << detail::format_double(r.noisy_fit_error) << ',' << (r.robust ? 1 : 0) << ','
            << detail::format_double(r.drift) << ','
            << (r.diagnostic ? detail::format_double(*r.diagnostic) : std::string()) << ','
            << (r.degenerate ? 1 : 0) << ',' << (r.stationary ? 1 : 0) << '\n';
    }
}

json sweep_to_json(const std::vector<SweepRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) {
        arr.push_back({{"parameter", r.parameter},
                       {"value", r.value},
                       {"minimizer", r.minimizer},
                       {"objective", r.objective},
                       {"clean_error", r.clean_error},
                       {"noisy_fit_error", r.noisy_fit_error},
                       {"robust", r.robust},
                       {"drift", r.drift},
                       {"diagnostic", r.diagnostic ? json(*r.diagnostic) : json(nullptr)},
                       {"degenerate", r.degenerate},
                       {"stationary", r.stationary}});
    }
    return arr;
}

void write_loss_report(std::ostream& out, const std::vector<LossReportRow>& rows) {
    out << std::left << std::setw(26) << "loss" << std::setw(50) << "reference"
        << "convex potential?\n";
    for (const auto& r : rows) {
        out << std::setw(26) << r.loss << std::setw(50) << r.reference
            << (r.satisfies_def1 ? "Yes" : "No");
        if (!r.satisfies_def1) {
            out << " (" << r.failing_check;
            if (r.witness_z)
                out << " at z=" << detail::format_double(*r.witness_z);
            if (r.witness_value)
                out << ", value " << detail::format_double(*r.witness_value);
            out << ')';
        }
        out << '\n';
    }
}

json loss_report_to_json(const std::vector<LossReportRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"loss", r.loss},
                       {"reference", r.reference},
                       {"satisfies", r.satisfies_def1},
                       {"expected", r.expected},
                       {"failing_check", r.failing_check.empty() ? json(nullptr) : json(r.failing_check)},
                       {"witness_z", r.witness_z ? json(*r.witness_z) : json(nullptr)},
                       {"witness_value", r.witness_value ? json(*r.witness_value) : json(nullptr)}});
    }
    return arr;
}

void write_step_plot_svg(std::ostream& out, const std::vector<double>& xs,
                         const std::vector<double>& ys, const std::string& title,
                         const std::string& xlabel, const std::string& ylabel,
                         std::optional<double> marker) {
    if (xs.size() != ys.size() || xs.empty())
        throw InvalidInput("step plot needs equally sized, nonempty series");
    constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 60;
    const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
    const double xmin = *xmin_it;
    const double xmax = *xmax_it > xmin ? *xmax_it : xmin + 1.0;
    const double ymin = std::fmin(0.0, *ymin_it);
    const double ymax = std::fmax(*ymax_it, ymin + 1e-9) * 1.1;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">"
        << escape_xml(title) << "</text>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    for (double y : {ymin, 0.5 * (ymin + ymax / 1.1), ymax / 1.1}) {
        out << "<text x=\"" << L - 6 << "\" y=\"" << fixed(py(y) + 4) << "\" text-anchor=\"end\" "
               "font-family=\"sans-serif\" font-size=\"11\">"
            << fixed(y, 3) << "</text>\n";
    }
    for (double x : {xmin, 0.5 * (xmin + xmax), xmax}) {
        out << "<text x=\"" << fixed(px(x)) << "\" y=\"" << H - B + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fixed(x, 4) << "</text>\n";
    }
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape_xml(xlabel) << "</text>\n";
    out << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
        << (T + H - B) / 2 << ")\">" << escape_xml(ylabel) << "</text>\n";

    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0)
            out << fixed(px(xs[i])) << ',' << fixed(py(ys[i - 1])) << ' ';
        out << fixed(px(xs[i])) << ',' << fixed(py(ys[i])) << ' ';
    }
    out << "\"/>\n";
    if (marker && *marker >= xmin && *marker <= xmax) {
        out << "<line x1=\"" << fixed(px(*marker)) << "\" y1=\"" << T << "\" x2=\""
            << fixed(px(*marker)) << "\" y2=\"" << H - B
            << "\" stroke=\"#d62728\" stroke-dasharray=\"5,4\"/>\n";
        out << "<text x=\"" << fixed(px(*marker) + 4) << "\" y=\"" << T + 12
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">"
            << detail::format_double(*marker) << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace rcnlin
