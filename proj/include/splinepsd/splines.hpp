#ifndef SPLINEPSD_SPLINES_HPP
#define SPLINEPSD_SPLINES_HPP

#include <span>
#include <vector>

namespace splinepsd {

/// Normalizers below this value mark a B-spline as degenerate (zero-width
/// support). Degenerate densities evaluate to zero.
inline constexpr double kDegenerateTolerance = 1e-12;

/// Clamped, nondecreasing knot sequence on [0, 1].
///
/// Holds k + r + 1 knots t[0..k+r] for a basis of k B-splines of degree r.
/// The first r + 1 knots are 0 and the last r + 1 knots are 1. Basis
/// functions are indexed from 0; basis function i is supported on
/// [t[i], t[i + r + 1]].
class KnotSequence {
public:
    /// Validates the invariants and throws std::invalid_argument on failure.
    KnotSequence(int degree, std::vector<double> knots);

    int degree() const { return degree_; }
    int basis_size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
    std::span<const double> knots() const { return knots_; }
    double operator[](std::size_t i) const { return knots_[i]; }

    /// Index mu of the knot span with t[mu] <= omega < t[mu + 1] and
    /// r <= mu < k. At omega == 1 this is the last nonempty span.
    int find_span(double omega) const;

private:
    int degree_;
    std::vector<double> knots_;
};

/// Builds a clamped knot sequence from k - r internal knot differences.
///
/// The differences are rescaled to sum to exactly one, then accumulated into
/// the internal knots. Throws on negative or empty input, or if every
/// difference is zero.
KnotSequence build_knots(std::span<const double> deltas, int degree);

/// B-spline basis function i (0-based) at omega, by the Cox-de Boor
/// recursion. Zero denominators contribute zero. The last nonempty degree-0
/// interval is closed on the right so the basis covers omega = 1.
double eval_bspline(double omega, int i, const KnotSequence& ks);

/// Analytic integral of basis function i: (t[i+r+1] - t[i]) / (r + 1).
double bspline_integral(int i, const KnotSequence& ks);

/// Nonzero basis values at omega, written to out[0..r], belonging to basis
/// functions span - r .. span. Returns the span index. This is the
/// triangular de Boor evaluation and is what the sampler uses.
int eval_nonzero_basis(double omega, const KnotSequence& ks, std::span<double> out);

/// A knot sequence together with the analytic integrals of its basis.
class BsplineDensityBasis {
public:
    explicit BsplineDensityBasis(KnotSequence ks);

    const KnotSequence& knots() const { return knots_; }
    int size() const { return knots_.basis_size(); }
    int degree() const { return knots_.degree(); }
    std::span<const double> normalizers() const { return normalizers_; }
    bool degenerate(int i) const { return normalizers_[i] <= kDegenerateTolerance; }

private:
    KnotSequence knots_;
    std::vector<double> normalizers_;
};

/// Normalized B-spline density b_i(omega); zero for degenerate splines.
double eval_density(double omega, int i, const BsplineDensityBasis& basis);

/// Moves weight sitting on degenerate splines onto the non-degenerate ones,
/// proportionally to their existing weight (uniformly if they carry none).
/// The total weight is preserved.
std::vector<double> effective_weights(std::span<const double> weights,
                                      const BsplineDensityBasis& basis);

/// Mixture sum_i w_i b_i(omega) after degenerate-weight redistribution.
double eval_mixture(double omega, std::span<const double> weights,
                    const BsplineDensityBasis& basis);

} // namespace splinepsd

#endif // SPLINEPSD_SPLINES_HPP
