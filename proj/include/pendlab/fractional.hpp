#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace pendlab {

/// Grünwald–Letnikov binomial weights w_j = (−1)^j·C(α, j), j = 0..n.
///
/// A positive order gives the fractional derivative D^α, a negative order the
/// fractional integral I^|α|. Applying the table to a sample sequence x spaced
/// dt apart yields dt^(−α)·Σ_j w_j·x[last − j].
class GLWeights {
public:
    GLWeights(double order, std::size_t n, double dt);

    double order() const noexcept { return order_; }
    double dt() const noexcept { return dt_; }
    /// dt^(−order), the prefactor of the weighted sum.
    double scale() const noexcept { return scale_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }

private:
    double order_;
    double dt_;
    double scale_;
    std::vector<double> weights_;
};

GLWeights gl_weights(double alpha, std::size_t n, double dt);

/// Bounded window of uniformly spaced samples, most recent last. Pushing past
/// capacity discards the oldest sample, which slides the operator's lower
/// terminal forward (short-memory principle).
class SampleWindow {
public:
    SampleWindow(double dt, std::size_t capacity);

    void push(double x);
    void clear() { samples_.clear(); }
    /// Shrinks or grows capacity; excess oldest samples are dropped.
    void set_capacity(std::size_t capacity);

    double dt() const noexcept { return dt_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    /// j = 0 is the latest sample.
    double back(std::size_t j) const { return samples_[samples_.size() - 1 - j]; }

private:
    double dt_;
    std::size_t capacity_;
    std::deque<double> samples_;
};

/// Weighted GL sum over min(window, table) samples. Throws on empty window or
/// a table built for a different spacing.
double gl_apply(const SampleWindow& window, const GLWeights& table);

/// D^μ over the window, 0 < μ < 1.
double frac_derivative(const SampleWindow& window, double mu);
/// I^λ over the window, 0 < λ < 1.
double frac_integral(const SampleWindow& window, double lambda);

}  // namespace pendlab
