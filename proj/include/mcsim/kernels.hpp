#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Arithmetic inner loops used by the waveform analytics. Each kernel has a
// scalar reference implementation and, on x86-64 with AVX2+FMA, a vectorized
// variant. The active backend is chosen once at startup (overridable with the
// MCSIM_KERNELS environment variable or force_backend()); scalar and SIMD
// variants are equivalence-tested against each other in tests/test_kernels.cpp.
namespace mcsim::kernels {

// Result of projecting a series onto one cos/sin pair.
struct Projection {
    double cos_sum = 0.0;
    double sin_sum = 0.0;
};

double sum(std::span<const double> x);
double sum_squares(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

// out[i] = amplitude * cos(theta0 + i*dtheta)
void cosine_series(double amplitude, double theta0, double dtheta,
                   std::size_t n, double* out);

// cos_sum = sum_i x[i]*cos(theta0 + i*dtheta), sin_sum likewise.
Projection project(std::span<const double> x, double theta0, double dtheta);

// Name of the active backend: "scalar" or "avx2".
std::string_view backend();

// Force a backend by name (tests only). Throws std::invalid_argument if the
// name is unknown or the backend is unavailable on this machine.
void force_backend(std::string_view name);

namespace scalar {
double sum(std::span<const double> x);
double sum_squares(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
void cosine_series(double amplitude, double theta0, double dtheta,
                   std::size_t n, double* out);
Projection project(std::span<const double> x, double theta0, double dtheta);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define MCSIM_HAVE_AVX2_BACKEND 1
namespace avx2 {
bool supported();  // runtime CPU check (AVX2 + FMA)
double sum(std::span<const double> x);
double sum_squares(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);
void cosine_series(double amplitude, double theta0, double dtheta,
                   std::size_t n, double* out);
Projection project(std::span<const double> x, double theta0, double dtheta);
}  // namespace avx2
#else
#define MCSIM_HAVE_AVX2_BACKEND 0
#endif

}  // namespace mcsim::kernels
