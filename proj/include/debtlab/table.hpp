#pragma once

#include <optional>
#include <string>
#include <vector>

#include "debtlab/linalg.hpp"

namespace debtlab {

/// Named-column numeric dataset. One designated response column and an
/// optional integer-valued class-label column (labels 1..K stored as reals).
/// Immutable by convention once built; safe to share across threads.
struct Table {
    std::vector<std::string> column_names;
    std::vector<double> values;  // row-major, n_rows x n_cols
    std::size_t n_cols = 0;
    std::size_t response_col = 0;
    std::optional<std::size_t> class_col;

    std::size_t n_rows() const { return n_cols == 0 ? 0 : values.size() / n_cols; }

    double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * n_cols + c]; }
    const double* row_ptr(std::size_t r) const { return values.data() + r * n_cols; }

    std::size_t column_index(const std::string& name) const;  // throws on unknown name
    std::vector<double> column(std::size_t c) const;
    std::vector<double> response() const { return column(response_col); }
    const std::string& response_name() const { return column_names[response_col]; }

    /// Indices of every column that is neither the response nor the class label.
    std::vector<std::size_t> predictor_cols() const;
    std::vector<std::string> predictor_names() const;

    /// Checks the structural invariants; throws std::runtime_error on violation.
    void validate() const;
};

Table load_csv(const std::string& path, const std::string& response,
               const std::optional<std::string>& class_name = std::nullopt);
void write_csv(const Table& t, const std::string& path);

/// Shortest round-trip decimal form ('.' separator, LF-free).
std::string format_double(double v);

Table subset_rows(const Table& t, const std::vector<std::size_t>& idx);

/// Sorted distinct labels of the class column; throws if there is none.
std::vector<double> class_labels(const Table& t);

/// Replaces the class column by one 0/1 indicator column per label
/// ("class_<label>"). Labels must come from the training partition so that
/// train and test tables expand to the same layout; a value outside the label
/// set is an error.
Table expand_class_indicators(const Table& t, const std::vector<double>& labels);

/// Drops the class column entirely.
Table drop_class_column(const Table& t);

enum class ClassEncoding { DropFirst, Indicators };

struct DesignMatrix {
    std::vector<std::string> names;
    Matrix x;
    std::vector<double> y;
    std::vector<double> labels;  // class labels backing the dummy columns (empty if none)
};

/// Numeric design matrix for model fitting. DropFirst emits K-1 dummies
/// (reference level = smallest label); Indicators emits all K.
DesignMatrix design_matrix(const Table& t, ClassEncoding enc);
DesignMatrix design_matrix(const Table& t, ClassEncoding enc, const std::vector<double>& labels);

/// Min-max scaler over predictor columns (response and class left alone).
/// Fit on the training partition, applied to any table with the same layout.
struct ColumnScaler {
    std::vector<std::size_t> cols;
    std::vector<double> lo;
    std::vector<double> hi;

    static ColumnScaler fit(const Table& t);
    Table apply(const Table& t) const;
};

}  // namespace debtlab
