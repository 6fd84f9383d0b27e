#include "ffd/kernels.hpp"

namespace ffd::kernels {

namespace {

void sparse_rows_dot3(const std::size_t* row_ptr, const std::uint32_t* cols, const double* vals,
                      std::size_t rows, const double* px, const double* py, const double* pz,
                      double* out) {
    for (std::size_t r = 0; r < rows; ++r) {
        double x = 0.0, y = 0.0, z = 0.0;
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
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
        double x = 0.0, y = 0.0, z = 0.0;
        for (std::size_t k = 0; k < width; ++k) {
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
        double* row = gram + std::size_t(cols[a]) * ld;
        for (std::size_t b = 0; b < nnz; ++b) row[cols[b]] += wa * vals[b];
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Backend::Scalar, sparse_rows_dot3, dense_rows_dot3,
                                   outer_accumulate, dot, axpy};
    return table;
}

}  // namespace ffd::kernels
