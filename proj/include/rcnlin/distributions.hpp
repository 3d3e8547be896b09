#pragma once

#include "rcnlin/vector_ops.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace rcnlin {

struct LabeledPoint {
    Vector x;
    int y = 1; // -1 or +1
};

struct Atom {
    LabeledPoint point;
    double weight = 0.0;
};

/// Finite probability distribution over R^d x {-1, +1}.
///
/// Invariants, enforced by the constructor: every weight is positive, the
/// weights sum to 1 within 1e-12, all points share the dimension d >= 1 and
/// have finite coordinates, labels are +-1, and no (x, y) appears twice.
/// Atoms with bit-identical (x, y) are merged by summing their weights;
/// first-appearance order is kept.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return atoms_.size(); }
    double total_mass() const;

    /// Uniform distribution over the given sample (duplicates merged).
    static DiscreteDistribution uniform(std::span<const LabeledPoint> sample);

private:
    std::vector<Atom> atoms_;
    std::size_t dimension_ = 0;
};

inline constexpr double kMassTolerance = 1e-12;

/// Exact eta-RCN corruption: each atom ((x,y),p) splits into ((x,y),(1-eta)p)
/// and ((x,-y),eta p). Requires 0 < eta < 1/2 (both endpoints rejected).
DiscreteDistribution corrupt_rcn(const DiscreteDistribution& clean, double eta);

/// min over atoms of y (w.x) / ||w||_1. Negative when w misclassifies an atom.
double l1_margin(const DiscreteDistribution& dist, std::span<const double> w);

/// Three-atom distribution, all labels +1:
///   (1, 0) with mass 1/4, (gamma, sqrt(1 - gamma^2)) with mass 1/4,
///   (gamma, -2 gamma) with mass 1/2.
/// Separable with L1 margin gamma via w = (1, 0). Requires 0 < gamma < 1.
DiscreteDistribution make_counterexample(double gamma);

/// Index of the mass-1/2 atom in make_counterexample's output.
inline constexpr std::size_t kCounterexampleHeavyAtom = 2;

/// E[y x] = sum of weight * y * x.
Vector mean_label_feature(const DiscreteDistribution& dist);

/// Random distribution with the given number of atoms in R^dim. Coordinates
/// are uniform in [-scale, scale], labels fair coin flips, weights uniform in
/// [0.05, 1] then normalized.
DiscreteDistribution random_distribution(std::mt19937_64& rng, std::size_t dim,
                                         std::size_t atoms, double scale = 1.0);

// CSV with header x1,...,xd,y,weight. Loading validates the distribution
// invariants; writing uses round-trip precision.
DiscreteDistribution read_distribution_csv(std::istream& in);
DiscreteDistribution load_distribution_csv(const std::filesystem::path& path);
void write_distribution_csv(std::ostream& out, const DiscreteDistribution& dist);
void save_distribution_csv(const std::filesystem::path& path, const DiscreteDistribution& dist);

/// Sample of labeled points from CSV with header x1,...,xd,y and an optional
/// trailing weight column, which is ignored.
std::vector<LabeledPoint> read_sample_csv(std::istream& in);
std::vector<LabeledPoint> load_sample_csv(const std::filesystem::path& path);

} // namespace rcnlin
