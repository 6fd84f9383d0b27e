#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace ffd::kernels::detail {

namespace {

void sparse_rows_dot3(const std::size_t* row_ptr, const std::uint32_t* cols, const double* vals,
                      std::size_t rows, const double* px, const double* py, const double* pz,
                      double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t k = row_ptr[r];
        const std::size_t end = row_ptr[r + 1];
        float64x2_t ax = vdupq_n_f64(0.0), ay = vdupq_n_f64(0.0), az = vdupq_n_f64(0.0);
        for (; k + 2 <= end; k += 2) {
            const float64x2_t v = vld1q_f64(vals + k);
            const auto c0 = cols[k], c1 = cols[k + 1];
            float64x2_t gx = vsetq_lane_f64(px[c1], vdupq_n_f64(px[c0]), 1);
            float64x2_t gy = vsetq_lane_f64(py[c1], vdupq_n_f64(py[c0]), 1);
            float64x2_t gz = vsetq_lane_f64(pz[c1], vdupq_n_f64(pz[c0]), 1);
            ax = vfmaq_f64(ax, v, gx);
            ay = vfmaq_f64(ay, v, gy);
            az = vfmaq_f64(az, v, gz);
        }
        double x = vaddvq_f64(ax), y = vaddvq_f64(ay), z = vaddvq_f64(az);
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
        float64x2_t ax = vdupq_n_f64(0.0), ay = vdupq_n_f64(0.0), az = vdupq_n_f64(0.0);
        std::size_t k = 0;
        for (; k + 2 <= width; k += 2) {
            const float64x2_t v = vld1q_f64(row + k);
            ax = vfmaq_f64(ax, v, vld1q_f64(px + k));
            ay = vfmaq_f64(ay, v, vld1q_f64(py + k));
            az = vfmaq_f64(az, v, vld1q_f64(pz + k));
        }
        double x = vaddvq_f64(ax), y = vaddvq_f64(ay), z = vaddvq_f64(az);
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

void outer_accumulate(double* gram, std::size_t ld, const std::uint32_t* cols, const double* vals,
                      std::size_t nnz, double w) {
    for (std::size_t a = 0; a < nnz; ++a) {
        const double wa = w * vals[a];
        const float64x2_t vwa = vdupq_n_f64(wa);
        double* row = gram + std::size_t(cols[a]) * ld;
        std::size_t b = 0;
        while (b < nnz) {
            if (b + 2 <= nnz && cols[b + 1] == cols[b] + 1) {
                double* dst = row + cols[b];
                vst1q_f64(dst, vfmaq_f64(vld1q_f64(dst), vwa, vld1q_f64(vals + b)));
                b += 2;
            } else {
                row[cols[b]] += wa * vals[b];
                ++b;
            }
        }
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& neon_table() {
    static const KernelTable table{Backend::Neon, sparse_rows_dot3, dense_rows_dot3,
                                   outer_accumulate, dot, axpy};
    return table;
}

}  // namespace ffd::kernels::detail
