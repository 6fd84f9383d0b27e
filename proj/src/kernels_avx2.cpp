#include <immintrin.h>

#include "kernels_internal.hpp"

namespace ffd::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void sparse_rows_dot3(const std::size_t* row_ptr, const std::uint32_t* cols, const double* vals,
                      std::size_t rows, const double* px, const double* py, const double* pz,
                      double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t k = row_ptr[r];
        const std::size_t end = row_ptr[r + 1];
        __m256d ax = _mm256_setzero_pd(), ay = _mm256_setzero_pd(), az = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
            const __m256d v = _mm256_loadu_pd(vals + k);
            ax = _mm256_fmadd_pd(v, _mm256_i32gather_pd(px, idx, 8), ax);
            ay = _mm256_fmadd_pd(v, _mm256_i32gather_pd(py, idx, 8), ay);
            az = _mm256_fmadd_pd(v, _mm256_i32gather_pd(pz, idx, 8), az);
        }
        double x = hsum(ax), y = hsum(ay), z = hsum(az);
        for (; k < end; ++k) {
            const auto c = cols[k];
            x += vals[k] * px[c];
            y += vals[k] * py[c];
            z += vals[k] * pz[c];
        }
        out[3 * r] = x;
        out[3 * r + 1] = y;
        out[3 * r + 2] = z;
    }
}

void dense_rows_dot3(const double* vals, std::size_t rows, std::size_t width, const double* px,
                     const double* py, const double* pz, double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = vals + r * width;
        __m256d ax = _mm256_setzero_pd(), ay = _mm256_setzero_pd(), az = _mm256_setzero_pd();
        std::size_t k = 0;
        for (; k + 4 <= width; k += 4) {
            const __m256d v = _mm256_loadu_pd(row + k);
            ax = _mm256_fmadd_pd(v, _mm256_loadu_pd(px + k), ax);
            ay = _mm256_fmadd_pd(v, _mm256_loadu_pd(py + k), ay);
            az = _mm256_fmadd_pd(v, _mm256_loadu_pd(pz + k), az);
        }
        double x = hsum(ax), y = hsum(ay), z = hsum(az);
        for (; k < width; ++k) {
            x += row[k] * px[k];
            y += row[k] * py[k];
            z += row[k] * pz[k];
        }
        out[3 * r] = x;
        out[3 * r + 1] = y;
        out[3 * r + 2] = z;
    }
}

// B-spline rows come in runs of degree+1 consecutive columns (the U axis is
// fastest), so most of the update is contiguous 4-wide loads and stores.
void outer_accumulate(double* gram, std::size_t ld, const std::uint32_t* cols, const double* vals,
                      std::size_t nnz, double w) {
    for (std::size_t a = 0; a < nnz; ++a) {
        const double wa = w * vals[a];
        const __m256d vwa = _mm256_set1_pd(wa);
        double* row = gram + std::size_t(cols[a]) * ld;
        std::size_t b = 0;
        while (b < nnz) {
            if (b + 4 <= nnz && cols[b + 3] == cols[b] + 3) {
                double* dst = row + cols[b];
                _mm256_storeu_pd(dst, _mm256_fmadd_pd(vwa, _mm256_loadu_pd(vals + b),
                                                      _mm256_loadu_pd(dst)));
                b += 4;
            } else {
                row[cols[b]] += wa * vals[b];
                ++b;
            }
        }
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{Backend::Avx2, sparse_rows_dot3, dense_rows_dot3,
                                   outer_accumulate, dot, axpy};
    return table;
}

}  // namespace ffd::kernels::detail
