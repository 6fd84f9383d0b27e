#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

// Data-parallel inner loops behind deformation, normal-equation assembly and
// the conjugate-gradient solver. Each backend implements the same table; the
// scalar one is the reference every other variant is tested against.
namespace ffd::kernels {

enum class Backend : std::uint8_t { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

struct KernelTable {
    Backend backend;

    // For each row r < rows: out_xyz[3r+c] = sum_k vals[k] * p_c[cols[k]] over
    // k in [row_ptr[r], row_ptr[r+1]), with p_0/p_1/p_2 = px/py/pz.
    void (*sparse_rows_dot3)(const std::size_t* row_ptr, const std::uint32_t* cols,
                             const double* vals, std::size_t rows, const double* px,
                             const double* py, const double* pz, double* out_xyz);

    // Same with every row dense: vals is rows x width, row-major.
    void (*dense_rows_dot3)(const double* vals, std::size_t rows, std::size_t width,
                            const double* px, const double* py, const double* pz,
                            double* out_xyz);

    // gram[cols[a] * ld + cols[b]] += w * vals[a] * vals[b] for all a, b < nnz.
    void (*outer_accumulate)(double* gram, std::size_t ld, const std::uint32_t* cols,
                             const double* vals, std::size_t nnz, double w);

    double (*dot)(const double* a, const double* b, std::size_t n);

    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the backend was not compiled in or the CPU lacks it.
const KernelTable* table_for(Backend b);

std::vector<Backend> available_backends();

// Best available backend, chosen once. FFD_KERNELS=scalar|avx2|neon in the
// environment pins the choice (falls back to scalar when unavailable).
const KernelTable& active();

}  // namespace ffd::kernels
