#include "debtlab/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace debtlab {

std::size_t Table::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < column_names.size(); ++i)
        if (column_names[i] == name) return i;
    throw std::runtime_error("unknown column '" + name + "'");
}

std::vector<double> Table::column(std::size_t c) const {
    if (c >= n_cols) throw std::runtime_error("column index out of range");
    std::vector<double> out(n_rows());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = at(r, c);
    return out;
}

std::vector<std::size_t> Table::predictor_cols() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (c == response_col) continue;
        if (class_col && c == *class_col) continue;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> Table::predictor_names() const {
    std::vector<std::string> out;
    for (std::size_t c : predictor_cols()) out.push_back(column_names[c]);
    return out;
}

void Table::validate() const {
    if (n_cols == 0 || column_names.size() != n_cols)
        throw std::runtime_error("table: column names do not match column count");
    if (values.size() % n_cols != 0)
        throw std::runtime_error("table: ragged value storage");
    if (response_col >= n_cols) throw std::runtime_error("table: response column out of range");
    if (class_col) {
        if (*class_col >= n_cols) throw std::runtime_error("table: class column out of range");
        if (*class_col == response_col)
            throw std::runtime_error("table: response and class columns coincide");
    }
    std::set<std::string> seen;
    for (const auto& name : column_names)
        if (!seen.insert(name).second)
            throw std::runtime_error("table: duplicate column name '" + name + "'");
    for (double v : values)
        if (!std::isfinite(v)) throw std::runtime_error("table: non-finite cell");
    if (class_col) {
        for (std::size_t r = 0; r < n_rows(); ++r) {
            double v = at(r, *class_col);
            if (v < 1.0 || v != std::floor(v))
                throw std::runtime_error("table: class labels must be integers >= 1");
        }
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Table load_csv(const std::string& path, const std::string& response,
               const std::optional<std::string>& class_name) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("CSV file '" + path + "' is empty");

    Table t;
    t.column_names = split_line(line);
    t.n_cols = t.column_names.size();

    std::size_t data_row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++data_row;
        auto cells = split_line(line);
        if (cells.size() != t.n_cols)
            throw std::runtime_error("CSV row " + std::to_string(data_row) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(t.n_cols));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string& cell = cells[c];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size())
                throw std::runtime_error("unparseable cell '" + cell + "' at row " +
                                         std::to_string(data_row) + ", column '" +
                                         t.column_names[c] + "'");
            t.values.push_back(v);
        }
    }

    t.response_col = t.column_index(response);  // throws with the unknown name
    if (class_name) t.class_col = t.column_index(*class_name);
    t.validate();
    return t;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

void write_csv(const Table& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write CSV file '" + path + "'");
    for (std::size_t c = 0; c < t.n_cols; ++c) {
        if (c) out << ',';
        out << t.column_names[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        for (std::size_t c = 0; c < t.n_cols; ++c) {
            if (c) out << ',';
            out << format_double(t.at(r, c));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Table subset_rows(const Table& t, const std::vector<std::size_t>& idx) {
    Table out;
    out.column_names = t.column_names;
    out.n_cols = t.n_cols;
    out.response_col = t.response_col;
    out.class_col = t.class_col;
    out.values.reserve(idx.size() * t.n_cols);
    for (std::size_t r : idx) {
        if (r >= t.n_rows()) throw std::runtime_error("subset_rows: index out of range");
        const double* p = t.row_ptr(r);
        out.values.insert(out.values.end(), p, p + t.n_cols);
    }
    return out;
}

std::vector<double> class_labels(const Table& t) {
    if (!t.class_col) throw std::runtime_error("table has no class column");
    std::set<double> labels;
    for (std::size_t r = 0; r < t.n_rows(); ++r) labels.insert(t.at(r, *t.class_col));
    return std::vector<double>(labels.begin(), labels.end());
}

Table expand_class_indicators(const Table& t, const std::vector<double>& labels) {
    if (!t.class_col) throw std::runtime_error("expand_class_indicators: no class column");
    const std::size_t cc = *t.class_col;

    Table out;
    out.n_cols = t.n_cols - 1 + labels.size();
    for (std::size_t c = 0; c < t.n_cols; ++c) {
        if (c == cc) {
            for (double lab : labels)
                out.column_names.push_back("class_" + format_double(lab));
        } else {
            out.column_names.push_back(t.column_names[c]);
        }
    }
    out.response_col = t.response_col < cc ? t.response_col : t.response_col - 1 + labels.size();

    out.values.reserve(t.n_rows() * out.n_cols);
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        for (std::size_t c = 0; c < t.n_cols; ++c) {
            if (c == cc) {
                const double v = t.at(r, c);
                bool found = false;
                for (double lab : labels) {
                    out.values.push_back(v == lab ? 1.0 : 0.0);
                    found = found || v == lab;
                }
                if (!found)
                    throw std::runtime_error("class label " + format_double(v) +
                                             " not present in the training label set");
            } else {
                out.values.push_back(t.at(r, c));
            }
        }
    }
    return out;
}

Table drop_class_column(const Table& t) {
    if (!t.class_col) return t;
    const std::size_t cc = *t.class_col;
    Table out;
    out.n_cols = t.n_cols - 1;
    for (std::size_t c = 0; c < t.n_cols; ++c)
        if (c != cc) out.column_names.push_back(t.column_names[c]);
    out.response_col = t.response_col < cc ? t.response_col : t.response_col - 1;
    out.values.reserve(t.n_rows() * out.n_cols);
    for (std::size_t r = 0; r < t.n_rows(); ++r)
        for (std::size_t c = 0; c < t.n_cols; ++c)
            if (c != cc) out.values.push_back(t.at(r, c));
    return out;
}

DesignMatrix design_matrix(const Table& t, ClassEncoding enc) {
    std::vector<double> labels;
    if (t.class_col) labels = class_labels(t);
    return design_matrix(t, enc, labels);
}

DesignMatrix design_matrix(const Table& t, ClassEncoding enc, const std::vector<double>& labels) {
    if (t.class_col && labels.empty())
        throw std::runtime_error("design_matrix: class column present but label set empty");

    DesignMatrix d;
    d.labels = t.class_col ? labels : std::vector<double>{};
    const std::size_t n_dummies =
        t.class_col ? (enc == ClassEncoding::DropFirst ? labels.size() - 1 : labels.size()) : 0;
    const auto pred = t.predictor_cols();

    for (std::size_t c : pred) d.names.push_back(t.column_names[c]);
    if (t.class_col)
        for (std::size_t k = (enc == ClassEncoding::DropFirst ? 1u : 0u); k < labels.size(); ++k)
            d.names.push_back("class_" + format_double(labels[k]));

    d.x = Matrix(t.n_rows(), pred.size() + n_dummies);
    d.y.resize(t.n_rows());
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        std::size_t j = 0;
        for (std::size_t c : pred) d.x(r, j++) = t.at(r, c);
        if (t.class_col) {
            const double v = t.at(r, *t.class_col);
            bool found = false;
            for (std::size_t k = (enc == ClassEncoding::DropFirst ? 1u : 0u); k < labels.size(); ++k) {
                d.x(r, j++) = (v == labels[k]) ? 1.0 : 0.0;
            }
            for (double lab : labels) found = found || v == lab;
            if (!found)
                throw std::runtime_error("class label " + format_double(v) +
                                         " not present in the training label set");
        }
        d.y[r] = t.at(r, t.response_col);
    }
    return d;
}

ColumnScaler ColumnScaler::fit(const Table& t) {
    ColumnScaler s;
    s.cols = t.predictor_cols();
    for (std::size_t c : s.cols) {
        double lo = t.at(0, c), hi = t.at(0, c);
        for (std::size_t r = 1; r < t.n_rows(); ++r) {
            lo = std::min(lo, t.at(r, c));
            hi = std::max(hi, t.at(r, c));
        }
        s.lo.push_back(lo);
        s.hi.push_back(hi);
    }
    return s;
}

Table ColumnScaler::apply(const Table& t) const {
    Table out = t;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const std::size_t c = cols[k];
        const double span = hi[k] - lo[k];
        for (std::size_t r = 0; r < out.n_rows(); ++r)
            out.at(r, c) = span > 0.0 ? (out.at(r, c) - lo[k]) / span : 0.0;
    }
    return out;
}

}  // namespace debtlab
