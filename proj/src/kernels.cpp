#include "mcsim/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mcsim::kernels {

#if MCSIM_HAVE_AVX2_BACKEND
namespace avx2 {
bool supported() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
}  // namespace avx2
#endif

namespace {

struct Vtable {
    double (*sum)(std::span<const double>);
    double (*sum_squares)(std::span<const double>);
    double (*dot)(std::span<const double>, std::span<const double>);
    void (*cosine_series)(double, double, double, std::size_t, double*);
    Projection (*project)(std::span<const double>, double, double);
    std::string_view name;
};

constexpr Vtable kScalar{scalar::sum, scalar::sum_squares, scalar::dot,
                         scalar::cosine_series, scalar::project, "scalar"};

#if MCSIM_HAVE_AVX2_BACKEND
constexpr Vtable kAvx2{avx2::sum, avx2::sum_squares, avx2::dot,
                       avx2::cosine_series, avx2::project, "avx2"};
#endif

const Vtable* pick_default() {
    if (const char* env = std::getenv("MCSIM_KERNELS")) {
        const std::string want = env;
        if (want == "scalar") return &kScalar;
#if MCSIM_HAVE_AVX2_BACKEND
        if (want == "avx2" && avx2::supported()) return &kAvx2;
#endif
        // unknown or unavailable request falls through to autodetect
    }
#if MCSIM_HAVE_AVX2_BACKEND
    if (avx2::supported()) return &kAvx2;
#endif
    return &kScalar;
}

const Vtable*& active() {
    static const Vtable* v = pick_default();
    return v;
}

}  // namespace

double sum(std::span<const double> x) { return active()->sum(x); }
double sum_squares(std::span<const double> x) { return active()->sum_squares(x); }
double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    return active()->dot(a, b);
}
void cosine_series(double amplitude, double theta0, double dtheta,
                   std::size_t n, double* out) {
    active()->cosine_series(amplitude, theta0, dtheta, n, out);
}
Projection project(std::span<const double> x, double theta0, double dtheta) {
    return active()->project(x, theta0, dtheta);
}

std::string_view backend() { return active()->name; }

void force_backend(std::string_view name) {
    if (name == "scalar") {
        active() = &kScalar;
        return;
    }
#if MCSIM_HAVE_AVX2_BACKEND
    if (name == "avx2") {
        if (!avx2::supported())
            throw std::invalid_argument("avx2 backend not supported on this CPU");
        active() = &kAvx2;
        return;
    }
#endif
    throw std::invalid_argument("unknown kernel backend: " + std::string(name));
}

}  // namespace mcsim::kernels
