#include "rcnlin/distributions.hpp"

#include "csv_util.hpp"
#include "rcnlin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace rcnlin {

namespace {

bool same_point(const LabeledPoint& a, const LabeledPoint& b) {
    return a.y == b.y && a.x == b.x;
}

std::vector<Atom> merge_duplicates(std::vector<Atom> atoms) {
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (auto& a : atoms) {
        auto it = std::find_if(merged.begin(), merged.end(),
                               [&](const Atom& m) { return same_point(m.point, a.point); });
        if (it != merged.end())
            it->weight += a.weight;
        else
            merged.push_back(std::move(a));
    }
    return merged;
}

void check_eta(double eta) {
    if (!(eta > 0.0 && eta < 0.5))
        throw InvalidInput("noise rate must satisfy 0 < eta < 1/2, got " + detail::format_double(eta));
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open '" + path.string() + "'");
    return in;
}

int parse_label(const std::string& field) {
    const double y = detail::parse_double(field);
    if (y != 1.0 && y != -1.0)
        throw InvalidInput("label must be -1 or 1, got '" + field + "'");
    return static_cast<int>(y);
}

} // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) {
    if (atoms.empty())
        throw InvalidInput("distribution needs at least one atom");
    dimension_ = atoms.front().point.x.size();
    if (dimension_ == 0)
        throw InvalidInput("feature dimension must be at least 1");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const auto& a = atoms[i];
        if (a.point.x.size() != dimension_)
            throw InvalidInput("atom " + std::to_string(i) + " has dimension " +
                               std::to_string(a.point.x.size()) + ", expected " +
                               std::to_string(dimension_));
        if (a.point.y != 1 && a.point.y != -1)
            throw InvalidInput("atom " + std::to_string(i) + " has label " +
                               std::to_string(a.point.y) + "; labels must be -1 or +1");
        if (!std::all_of(a.point.x.begin(), a.point.x.end(), [](double v) { return std::isfinite(v); }))
            throw InvalidInput("atom " + std::to_string(i) + " has a non-finite coordinate");
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw InvalidInput("atom " + std::to_string(i) + " has non-positive weight " +
                               detail::format_double(a.weight));
    }
    atoms_ = merge_duplicates(std::move(atoms));
    const double mass = total_mass();
    if (std::fabs(mass - 1.0) > kMassTolerance)
        throw InvalidInput("weights sum to " + detail::format_double(mass) + ", expected 1");
}

double DiscreteDistribution::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_)
        s += a.weight;
    return s;
}

DiscreteDistribution DiscreteDistribution::uniform(std::span<const LabeledPoint> sample) {
    if (sample.empty())
        throw InvalidInput("sample is empty");
    const double w = 1.0 / static_cast<double>(sample.size());
    std::vector<Atom> atoms;
    atoms.reserve(sample.size());
    for (const auto& p : sample)
        atoms.push_back({p, w});
    return DiscreteDistribution(std::move(atoms));
}

DiscreteDistribution corrupt_rcn(const DiscreteDistribution& clean, double eta) {
    check_eta(eta);
    std::vector<Atom> split;
    split.reserve(2 * clean.size());
    for (const auto& a : clean.atoms()) {
        split.push_back({a.point, (1.0 - eta) * a.weight});
        split.push_back({LabeledPoint{a.point.x, -a.point.y}, eta * a.weight});
    }
    return DiscreteDistribution(std::move(split));
}

double l1_margin(const DiscreteDistribution& dist, std::span<const double> w) {
    if (w.size() != dist.dimension())
        throw InvalidInput("separator dimension does not match the distribution");
    const double n1 = norm1(w);
    if (n1 == 0.0)
        throw InvalidInput("separator must be nonzero");
    double m = std::numeric_limits<double>::infinity();
    for (const auto& a : dist.atoms())
        m = std::fmin(m, a.point.y * dot(w, a.point.x) / n1);
    return m;
}

DiscreteDistribution make_counterexample(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw InvalidInput("counterexample parameter must satisfy 0 < gamma < 1, got " +
                           detail::format_double(gamma));
    return DiscreteDistribution({
        {{{1.0, 0.0}, 1}, 0.25},
        {{{gamma, std::sqrt(1.0 - gamma * gamma)}, 1}, 0.25},
        {{{gamma, -2.0 * gamma}, 1}, 0.5},
    });
}

Vector mean_label_feature(const DiscreteDistribution& dist) {
    Vector m(dist.dimension(), 0.0);
    for (const auto& a : dist.atoms()) {
        const double c = a.weight * a.point.y;
        for (std::size_t j = 0; j < m.size(); ++j)
            m[j] += c * a.point.x[j];
    }
    return m;
}

DiscreteDistribution random_distribution(std::mt19937_64& rng, std::size_t dim, std::size_t atoms,
                                         double scale) {
    if (dim == 0 || atoms == 0)
        throw InvalidInput("random distribution needs dim >= 1 and atoms >= 1");
    std::uniform_real_distribution<double> coord(-scale, scale);
    std::uniform_real_distribution<double> mass(0.05, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<Atom> out(atoms);
    double total = 0.0;
    for (auto& a : out) {
        a.point.x.resize(dim);
        for (double& v : a.point.x)
            v = coord(rng);
        a.point.y = coin(rng) ? 1 : -1;
        a.weight = mass(rng);
        total += a.weight;
    }
    for (auto& a : out)
        a.weight /= total;
    return DiscreteDistribution(std::move(out));
}

DiscreteDistribution read_distribution_csv(std::istream& in) {
    std::string line;
    if (!detail::next_csv_line(in, line))
        throw InvalidInput("distribution CSV is empty");
    const auto header = detail::split_csv_line(line);
    if (header.size() < 3 || header[header.size() - 2] != "y" || header.back() != "weight")
        throw InvalidInput("distribution CSV header must be x1,...,xd,y,weight");
    const std::size_t d = header.size() - 2;
    for (std::size_t j = 0; j < d; ++j) {
        if (header[j] != "x" + std::to_string(j + 1))
            throw InvalidInput("unexpected header column '" + header[j] + "'");
    }
    std::vector<Atom> atoms;
    std::size_t row = 1;
    while (detail::next_csv_line(in, line)) {
        ++row;
        const auto f = detail::split_csv_line(line);
        if (f.size() != d + 2)
            throw InvalidInput("row " + std::to_string(row) + " has " + std::to_string(f.size()) +
                               " fields, expected " + std::to_string(d + 2));
        Atom a;
        a.point.x.resize(d);
        for (std::size_t j = 0; j < d; ++j)
            a.point.x[j] = detail::parse_double(f[j]);
        a.point.y = parse_label(f[d]);
        a.weight = detail::parse_double(f[d + 1]);
        atoms.push_back(std::move(a));
    }
    return DiscreteDistribution(std::move(atoms));
}

DiscreteDistribution load_distribution_csv(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    return read_distribution_csv(in);
}

void write_distribution_csv(std::ostream& out, const DiscreteDistribution& dist) {
    for (std::size_t j = 0; j < dist.dimension(); ++j)
        out << 'x' << (j + 1) << ',';
    out << "y,weight\n";
    for (const auto& a : dist.atoms()) {
        for (double v : a.point.x)
            out << detail::format_double(v) << ',';
        out << a.point.y << ',' << detail::format_double(a.weight) << '\n';
    }
}

void save_distribution_csv(const std::filesystem::path& path, const DiscreteDistribution& dist) {
    std::ofstream out(path);
    if (!out)
        throw InvalidInput("cannot write '" + path.string() + "'");
    write_distribution_csv(out, dist);
}

std::vector<LabeledPoint> read_sample_csv(std::istream& in) {
    std::string line;
    if (!detail::next_csv_line(in, line))
        throw InvalidInput("sample CSV is empty");
    const auto header = detail::split_csv_line(line);
    const bool weighted = !header.empty() && header.back() == "weight";
    const std::size_t label_col = weighted ? header.size() - 2 : header.size() - 1;
    if (header.size() < (weighted ? 3u : 2u) || header[label_col] != "y")
        throw InvalidInput("sample CSV header must be x1,...,xd,y[,weight]");
    std::vector<LabeledPoint> sample;
    std::size_t row = 1;
    while (detail::next_csv_line(in, line)) {
        ++row;
        const auto f = detail::split_csv_line(line);
        if (f.size() != header.size())
            throw InvalidInput("row " + std::to_string(row) + " has " + std::to_string(f.size()) +
                               " fields, expected " + std::to_string(header.size()));
        LabeledPoint p;
        p.x.resize(label_col);
        for (std::size_t j = 0; j < label_col; ++j) {
            p.x[j] = detail::parse_double(f[j]);
            if (!std::isfinite(p.x[j]))
                throw InvalidInput("row " + std::to_string(row) + " has a non-finite coordinate");
        }
        p.y = parse_label(f[label_col]);
        sample.push_back(std::move(p));
    }
    if (sample.empty())
        throw InvalidInput("sample CSV has no rows");
    return sample;
}

std::vector<LabeledPoint> load_sample_csv(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    return read_sample_csv(in);
}

} // namespace rcnlin
