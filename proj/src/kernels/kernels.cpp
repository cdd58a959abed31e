#include "dyslex/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace dyslex::kernels {

namespace {

struct Ops {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*squared_distance)(const double*, const double*, std::size_t);
};

constexpr Ops kScalarOps{
    detail::dot_scalar, detail::axpy_scalar, detail::sum_scalar,
    detail::sumsq_scalar, detail::squared_distance_scalar,
};

#if defined(DYSLEX_HAVE_AVX2)
constexpr Ops kAvx2Ops{
    detail::dot_avx2, detail::axpy_avx2, detail::sum_avx2,
    detail::sumsq_avx2, detail::squared_distance_avx2,
};
#endif

struct State {
    Backend backend;
    Ops ops;
};

State resolve() {
    Backend want = avx2_available() ? Backend::avx2 : Backend::scalar;
    if (const char* env = std::getenv("DYSLEX_KERNELS")) {
        const std::string s(env);
        if (s == "scalar") want = Backend::scalar;
        else if (s == "avx2" && avx2_available()) want = Backend::avx2;
        // unknown or unusable values fall through to the autodetected backend
    }
#if defined(DYSLEX_HAVE_AVX2)
    if (want == Backend::avx2) return {Backend::avx2, kAvx2Ops};
#endif
    return {Backend::scalar, kScalarOps};
}

State& state() {
    static State s = resolve();
    return s;
}

}  // namespace

bool avx2_available() {
#if defined(DYSLEX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") > 0;
#else
    return false;
#endif
}

Backend active_backend() { return state().backend; }

std::string_view backend_name() {
    return state().backend == Backend::avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
    if (b == Backend::avx2) {
#if defined(DYSLEX_HAVE_AVX2)
        if (!avx2_available()) throw std::invalid_argument("avx2 backend not available on this CPU");
        state() = {Backend::avx2, kAvx2Ops};
        return;
#else
        throw std::invalid_argument("avx2 backend not compiled in");
#endif
    }
    state() = {Backend::scalar, kScalarOps};
}

double dot(const double* a, const double* b, std::size_t n) { return state().ops.dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { state().ops.axpy(alpha, x, y, n); }
double sum(const double* a, std::size_t n) { return state().ops.sum(a, n); }
double sumsq(const double* a, std::size_t n) { return state().ops.sumsq(a, n); }
double squared_distance(const double* a, const double* b, std::size_t n) {
    return state().ops.squared_distance(a, b, n);
}

}  // namespace dyslex::kernels
