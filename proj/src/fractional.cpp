#include "pendlab/fractional.hpp"

#include <cmath>
#include <stdexcept>

#include "pendlab/errors.hpp"

namespace pendlab {

GLWeights::GLWeights(double order, std::size_t n, double dt)
    : order_(order), dt_(dt), scale_(std::pow(dt, -order)) {
    if (!std::isfinite(order) || order == 0.0) throw std::invalid_argument("GL order must be finite and non-zero");
    if (!(std::isfinite(dt) && dt > 0.0)) throw std::invalid_argument("GL spacing must be > 0");
    weights_.resize(n + 1);
    weights_[0] = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
        weights_[j] = weights_[j - 1] * (1.0 - (order + 1.0) / static_cast<double>(j));
    }
}

GLWeights gl_weights(double alpha, std::size_t n, double dt) { return GLWeights(alpha, n, dt); }

SampleWindow::SampleWindow(double dt, std::size_t capacity) : dt_(dt), capacity_(capacity) {
    if (!(std::isfinite(dt) && dt > 0.0)) throw std::invalid_argument("window spacing must be > 0");
    if (capacity == 0) throw std::invalid_argument("window capacity must be >= 1");
}

void SampleWindow::push(double x) {
    samples_.push_back(x);
    if (samples_.size() > capacity_) samples_.pop_front();
}

void SampleWindow::set_capacity(std::size_t capacity) {
    if (capacity == 0) throw std::invalid_argument("window capacity must be >= 1");
    capacity_ = capacity;
    while (samples_.size() > capacity_) samples_.pop_front();
}

double gl_apply(const SampleWindow& window, const GLWeights& table) {
    if (window.empty()) throw std::invalid_argument("fractional operator on an empty window");
    if (std::abs(window.dt() - table.dt()) > 1e-12 * table.dt()) {
        throw ConfigError("sample spacing does not match the weight table", "dt");
    }
    const auto w = table.weights();
    const std::size_t terms = std::min(window.size(), w.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < terms; ++j) acc += w[j] * window.back(j);
    return table.scale() * acc;
}

namespace {

void require_unit_order(double order, const char* what) {
    if (!(order > 0.0 && order < 1.0)) throw std::invalid_argument(std::string(what) + " order must lie in (0, 1)");
}

}  // namespace

double frac_derivative(const SampleWindow& window, double mu) {
    require_unit_order(mu, "derivative");
    if (window.empty()) throw std::invalid_argument("fractional operator on an empty window");
    return gl_apply(window, GLWeights(mu, window.size() - 1, window.dt()));
}

double frac_integral(const SampleWindow& window, double lambda) {
    require_unit_order(lambda, "integral");
    if (window.empty()) throw std::invalid_argument("fractional operator on an empty window");
    return gl_apply(window, GLWeights(-lambda, window.size() - 1, window.dt()));
}

}  // namespace pendlab
