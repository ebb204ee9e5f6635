#ifndef SDDEM_LINALG_HPP
#define SDDEM_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sddem {

using Vec = std::vector<double>;

// Dense d x m matrix, row-major.  Diffusion values g(x,y) live here.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

inline double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double norm2_sq(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

// Frobenius norm; the trace norm |A| = sqrt(trace(A^T A)) used throughout.
inline double frobenius(const Mat& m) { return norm2(m.a); }

inline bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace sddem

#endif
