#include "mcsim/kernels.hpp"

#include <cmath>

namespace mcsim::kernels::scalar {

double sum(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
}

double sum_squares(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

void cosine_series(double amplitude, double theta0, double dtheta,
                   std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = amplitude * std::cos(theta0 + static_cast<double>(i) * dtheta);
    }
}

Projection project(std::span<const double> x, double theta0, double dtheta) {
    Projection p;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double th = theta0 + static_cast<double>(i) * dtheta;
        p.cos_sum += x[i] * std::cos(th);
        p.sin_sum += x[i] * std::sin(th);
    }
    return p;
}

}  // namespace mcsim::kernels::scalar
