#include "debtlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace debtlab {

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (x.size() != a.cols()) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double* row = a.row_ptr(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) acc += row[c] * x[c];
        out[r] = acc;
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row_ptr(k);
            double* orow = out.row_ptr(i);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
    return out;
}

LeastSquares qr_least_squares(Matrix a, std::vector<double> y, double rank_tol) {
    const std::size_t n = a.rows();
    const std::size_t p = a.cols();
    if (y.size() != n) throw std::invalid_argument("qr_least_squares: dimension mismatch");
    if (n < p) throw std::invalid_argument("qr_least_squares: fewer rows than columns");

    // Householder reflections applied in place to A and y.
    for (std::size_t j = 0; j < p; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += a(i, j) * a(i, j);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;  // dead column; flagged by the rank check below
        if (a(j, j) < 0.0) norm = -norm;

        for (std::size_t i = j; i < n; ++i) a(i, j) /= norm;
        a(j, j) += 1.0;

        for (std::size_t k = j + 1; k < p; ++k) {
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += a(i, j) * a(i, k);
            s = -s / a(j, j);
            for (std::size_t i = j; i < n; ++i) a(i, k) += s * a(i, j);
        }
        double s = 0.0;
        for (std::size_t i = j; i < n; ++i) s += a(i, j) * y[i];
        s = -s / a(j, j);
        for (std::size_t i = j; i < n; ++i) y[i] += s * a(i, j);

        a(j, j) = -norm;  // stash R_jj (the reflected diagonal)
    }

    double max_diag = 0.0;
    for (std::size_t j = 0; j < p; ++j) max_diag = std::max(max_diag, std::abs(a(j, j)));
    LeastSquares out;
    for (std::size_t j = 0; j < p; ++j) {
        if (std::abs(a(j, j)) <= rank_tol * max_diag) {
            out.rank_deficient = true;
            out.deficient_col = j;
            return out;
        }
    }

    // Back-substitution on R x = (Q^T y)[0..p)
    out.coef.assign(p, 0.0);
    for (std::size_t jj = p; jj-- > 0;) {
        double s = y[jj];
        for (std::size_t k = jj + 1; k < p; ++k) s -= a(jj, k) * out.coef[k];
        out.coef[jj] = s / a(jj, jj);
    }
    return out;
}

SymEigen jacobi_eigen(Matrix a, double off_tol, int max_sweeps) {
    const std::size_t m = a.rows();
    if (a.cols() != m) throw std::invalid_argument("jacobi_eigen: matrix not square");

    Matrix v(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i) v(i, i) = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    for (int sweep = 0; sweep < max_sweeps && off_norm() >= off_tol; ++sweep) {
        for (std::size_t pcol = 0; pcol + 1 < m; ++pcol) {
            for (std::size_t q = pcol + 1; q < m; ++q) {
                const double apq = a(pcol, q);
                if (apq == 0.0) continue;
                const double app = a(pcol, pcol);
                const double aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t k = 0; k < m; ++k) {
                    const double akp = a(k, pcol);
                    const double akq = a(k, q);
                    a(k, pcol) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double apk = a(pcol, k);
                    const double aqk = a(q, k);
                    a(pcol, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double vkp = v(k, pcol);
                    const double vkq = v(k, q);
                    v(k, pcol) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(m);
    for (std::size_t i = 0; i < m; ++i) diag[i] = a(i, i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t yy) { return diag[x] > diag[yy]; });

    SymEigen out;
    out.values.resize(m);
    out.vectors = Matrix(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        out.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < m; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p outside (0,1)");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};

    const double plow = 0.02425;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty vector");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

}  // namespace debtlab
