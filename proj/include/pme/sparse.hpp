#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace pme {

// Compressed sparse row matrix. Column indices are strictly increasing
// within each row.
struct SparseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_offsets;
    std::vector<int> col_indices;
    std::vector<double> values;

    int nonzeros() const { return static_cast<int>(values.size()); }

    // Entry lookup; absent entries read as zero.
    double at(int i, int j) const {
        const auto first = col_indices.begin() + row_offsets[i];
        const auto last = col_indices.begin() + row_offsets[i + 1];
        const auto it = std::lower_bound(first, last, j);
        if (it == last || *it != j) return 0.0;
        return values[static_cast<std::size_t>(it - col_indices.begin())];
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != cols) {
            throw std::invalid_argument("SparseMatrix::apply: size mismatch");
        }
        std::vector<double> y(rows, 0.0);
        for (int i = 0; i < rows; ++i) {
            double s = 0.0;
            for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
                s += values[k] * x[col_indices[k]];
            }
            y[i] = s;
        }
        return y;
    }
};

struct Triplet {
    int row;
    int col;
    double value;
};

// Builds a CSR matrix from triplets; duplicate entries are summed.
inline SparseMatrix sparse_from_triplets(int rows, int cols, std::vector<Triplet> ts) {
    for (const auto& t : ts) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw std::invalid_argument("sparse_from_triplets: index out of range");
        }
    }
    std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_offsets.assign(rows + 1, 0);
    std::size_t k = 0;
    for (int i = 0; i < rows; ++i) {
        while (k < ts.size() && ts[k].row == i) {
            const int c = ts[k].col;
            double v = 0.0;
            while (k < ts.size() && ts[k].row == i && ts[k].col == c) {
                v += ts[k].value;
                ++k;
            }
            m.col_indices.push_back(c);
            m.values.push_back(v);
        }
        m.row_offsets[i + 1] = static_cast<int>(m.col_indices.size());
    }
    return m;
}

}  // namespace pme
