#include "splinepsd/splines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace splinepsd {

namespace {

constexpr int kMaxDegree = 15;

void check_index(int i, const KnotSequence& ks) {
    if (i < 0 || i >= ks.basis_size()) {
        throw std::out_of_range("basis index " + std::to_string(i) + " outside [0, " +
                                std::to_string(ks.basis_size()) + ")");
    }
}

void check_omega(double omega) {
    if (!(omega >= 0.0 && omega <= 1.0)) {
        throw std::domain_error("omega outside [0, 1]: " + std::to_string(omega));
    }
}

} // namespace

KnotSequence::KnotSequence(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
    if (degree_ < 0 || degree_ > kMaxDegree) {
        throw std::invalid_argument("degree must lie in [0, " + std::to_string(kMaxDegree) + "]");
    }
    const int k = basis_size();
    if (k < degree_ + 1) {
        throw std::invalid_argument("knot sequence too short for degree " + std::to_string(degree_));
    }
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
        if (!(knots_[i] <= knots_[i + 1])) {
            throw std::invalid_argument("knots must be nondecreasing");
        }
    }
    for (int i = 0; i <= degree_; ++i) {
        if (knots_[i] != 0.0 || knots_[k + i] != 1.0) {
            throw std::invalid_argument("knot sequence must be clamped to [0, 1]");
        }
    }
}

int KnotSequence::find_span(double omega) const {
    const int k = basis_size();
    const auto first = knots_.begin() + degree_;
    const auto last = knots_.begin() + k + 1;
    if (omega >= 1.0) {
        return static_cast<int>(std::lower_bound(first, last, 1.0) - knots_.begin()) - 1;
    }
    return static_cast<int>(std::upper_bound(first, last, omega) - knots_.begin()) - 1;
}

KnotSequence build_knots(std::span<const double> deltas, int degree) {
    if (deltas.empty()) {
        throw std::invalid_argument("at least one knot difference is required");
    }
    double total = 0.0;
    for (double d : deltas) {
        if (!(d >= 0.0)) {
            throw std::invalid_argument("knot differences must be nonnegative");
        }
        total += d;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("knot differences sum to zero");
    }

    const int intervals = static_cast<int>(deltas.size());
    std::vector<double> knots(static_cast<std::size_t>(intervals + 2 * degree + 1));
    std::fill_n(knots.begin(), degree + 1, 0.0);
    double cum = 0.0;
    for (int m = 1; m < intervals; ++m) {
        cum += deltas[m - 1] / total;
        knots[degree + m] = std::min(cum, 1.0);
    }
    std::fill(knots.begin() + degree + intervals, knots.end(), 1.0);
    return KnotSequence(degree, std::move(knots));
}

double eval_bspline(double omega, int i, const KnotSequence& ks) {
    check_index(i, ks);
    check_omega(omega);
    const int r = ks.degree();
    const auto t = ks.knots();
    const int closing = (omega >= 1.0) ? ks.find_span(1.0) : -1;

    // Degree-0 indicators of the r + 1 intervals under basis function i.
    std::array<double, kMaxDegree + 1> b{};
    for (int m = 0; m <= r; ++m) {
        const int idx = i + m;
        const bool inside = (t[idx] <= omega && omega < t[idx + 1]) || idx == closing;
        b[m] = inside ? 1.0 : 0.0;
    }
    // Raise the degree one step at a time; entry m holds B_{i+m, d}.
    for (int d = 1; d <= r; ++d) {
        for (int m = 0; m <= r - d; ++m) {
            const int idx = i + m;
            const double left_den = t[idx + d] - t[idx];
            const double right_den = t[idx + d + 1] - t[idx + 1];
            const double up = left_den != 0.0 ? (omega - t[idx]) / left_den : 0.0;
            const double down = right_den != 0.0 ? (t[idx + d + 1] - omega) / right_den : 0.0;
            b[m] = up * b[m] + down * b[m + 1];
        }
    }
    return b[0];
}

double bspline_integral(int i, const KnotSequence& ks) {
    check_index(i, ks);
    const int r = ks.degree();
    return (ks[i + r + 1] - ks[i]) / (r + 1);
}

int eval_nonzero_basis(double omega, const KnotSequence& ks, std::span<double> out) {
    const int r = ks.degree();
    const auto t = ks.knots();
    const int span = ks.find_span(omega);

    std::array<double, kMaxDegree + 1> left{};
    std::array<double, kMaxDegree + 1> right{};
    out[0] = 1.0;
    for (int j = 1; j <= r; ++j) {
        left[j] = omega - t[span + 1 - j];
        right[j] = t[span + j] - omega;
        double saved = 0.0;
        for (int m = 0; m < j; ++m) {
            const double tmp = out[m] / (right[m + 1] + left[j - m]);
            out[m] = saved + right[m + 1] * tmp;
            saved = left[j - m] * tmp;
        }
        out[j] = saved;
    }
    return span;
}

BsplineDensityBasis::BsplineDensityBasis(KnotSequence ks) : knots_(std::move(ks)) {
    const int k = knots_.basis_size();
    normalizers_.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        normalizers_[i] = bspline_integral(i, knots_);
    }
}

double eval_density(double omega, int i, const BsplineDensityBasis& basis) {
    const double b = eval_bspline(omega, i, basis.knots());
    return basis.degenerate(i) ? 0.0 : b / basis.normalizers()[i];
}

std::vector<double> effective_weights(std::span<const double> weights,
                                      const BsplineDensityBasis& basis) {
    const int k = basis.size();
    if (static_cast<int>(weights.size()) != k) {
        throw std::invalid_argument("weight count does not match basis size");
    }
    double total = 0.0;
    double live = 0.0;
    int live_count = 0;
    for (int i = 0; i < k; ++i) {
        if (weights[i] < 0.0) {
            throw std::invalid_argument("mixture weights must be nonnegative");
        }
        total += weights[i];
        if (!basis.degenerate(i)) {
            live += weights[i];
            ++live_count;
        }
    }
    if (live_count == 0) {
        throw std::logic_error("every B-spline in the basis is degenerate");
    }

    std::vector<double> out(static_cast<std::size_t>(k), 0.0);
    if (total == live) {
        for (int i = 0; i < k; ++i) {
            if (!basis.degenerate(i)) out[i] = weights[i];
        }
    } else if (live > 0.0) {
        const double scale = total / live;
        for (int i = 0; i < k; ++i) {
            if (!basis.degenerate(i)) out[i] = weights[i] * scale;
        }
    } else {
        for (int i = 0; i < k; ++i) {
            if (!basis.degenerate(i)) out[i] = total / live_count;
        }
    }
    return out;
}

double eval_mixture(double omega, std::span<const double> weights,
                    const BsplineDensityBasis& basis) {
    check_omega(omega);
    const auto w = effective_weights(weights, basis);
    const int r = basis.degree();
    std::array<double, kMaxDegree + 1> values{};
    const int span = eval_nonzero_basis(omega, basis.knots(), values);
    const auto norm = basis.normalizers();
    double s = 0.0;
    for (int m = 0; m <= r; ++m) {
        const int i = span - r + m;
        if (w[i] != 0.0) s += w[i] * values[m] / norm[i];
    }
    return s;
}

} // namespace splinepsd
