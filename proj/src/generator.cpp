#include "debtlab/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "debtlab/rng.hpp"

namespace debtlab {

namespace {

constexpr std::size_t kNumPredictors = 9;
constexpr std::size_t kNumClasses = 8;
constexpr std::size_t kNumFactors = 3;

const char* const kPredictorNames[kNumPredictors] = {
    "x",         "y",          "housingfactor", "financialfactor1", "financialfactor2",
    "Necessity", "Household",  "Excessive",     "Leisure"};

// Loadings of the nine predictors on the three latent factors. Each factor
// drives at least two predictors strongly; row norms stay below 1 so the
// idiosyncratic noise keeps every within-class predictor variance at 1.
constexpr double kLoadings[kNumPredictors][kNumFactors] = {
    {0.30, 0.00, 0.70},   // x
    {0.00, 0.30, 0.75},   // y
    {0.00, 0.60, -0.50},  // housingfactor
    {0.00, 0.85, 0.00},   // financialfactor1
    {0.00, 0.80, 0.00},   // financialfactor2
    {0.85, 0.00, 0.00},   // Necessity
    {0.80, 0.00, 0.00},   // Household
    {0.70, 0.00, 0.00},   // Excessive
    {0.45, 0.35, 0.00},   // Leisure
};

// Class-specific latent means: sign patterns on a cube, class 8 (the
// unclassified group) at the origin.
constexpr double kClassMeanScale = 1.1;
constexpr double kClassLatentMeans[kNumClasses][kNumFactors] = {
    {-1, -1, -1}, {+1, -1, -1}, {+1, +1, +1}, {-1, +1, -1},
    {+1, -1, +1}, {-1, +1, +1}, {-1, -1, +1}, {0, 0, 0},
};

// Response structure: common slopes, class intercepts and class slope
// deviations (the latter two scale with class_gain).
constexpr double kBaseSlopes[kNumPredictors] = {0.40, -0.32, 0.72, 0.96, 0.56,
                                                0.80, 0.48,  0.64, 0.32};
constexpr double kClassIntercepts[kNumClasses] = {-0.55, -0.33, 0.60, -0.14,
                                                  0.68,  0.06,  -0.41, 0.20};
constexpr double kClassSlopeDev[kNumClasses][kNumPredictors] = {
    {0, 0, -0.12, -0.18, 0, -0.09, 0, 0, +0.06},
    {0, 0, +0.09, -0.06, 0, +0.12, 0, 0, -0.09},
    {0, 0, +0.18, +0.21, 0, -0.06, 0, 0, +0.12},
    {0, 0, -0.09, +0.12, 0, +0.06, 0, 0, -0.12},
    {0, 0, +0.15, +0.18, 0, +0.09, 0, 0, 0.00},
    {0, 0, -0.15, +0.09, 0, -0.12, 0, 0, +0.09},
    {0, 0, -0.18, -0.15, 0, +0.06, 0, 0, -0.06},
    {0, 0, 0.00, 0.00, 0, 0.00, 0, 0, 0.00},
};

}  // namespace

Table generate(const GeneratorConfig& config) {
    if (config.n_rows == 0) throw std::invalid_argument("generate: zero rows requested");
    if (config.noise_sd < 0.0 || config.nonlinearity_gain < 0.0)
        throw std::invalid_argument("generate: noise_sd and nonlinearity_gain must be >= 0");
    double wsum = 0.0;
    for (double w : config.class_weights) {
        if (w < 0.0) throw std::invalid_argument("generate: negative class weight");
        wsum += w;
    }
    if (wsum <= 0.0) throw std::invalid_argument("generate: class weights are all zero");
    if (std::abs(wsum - 1.0) > 1e-6)
        throw std::invalid_argument("generate: class weights must sum to 1");

    const std::size_t n = config.n_rows;
    const Rng root(config.seed);

    std::vector<std::size_t> cls(n);
    {
        Rng rng = root.substream("class");
        const std::vector<double> w(config.class_weights.begin(), config.class_weights.end());
        for (std::size_t r = 0; r < n; ++r) cls[r] = rng.weighted(w);
    }

    std::vector<std::array<double, kNumFactors>> latent(n);
    {
        Rng rng = root.substream("latent");
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t a = 0; a < kNumFactors; ++a)
                latent[r][a] = kClassMeanScale * kClassLatentMeans[cls[r]][a] + rng.normal();
    }

    std::vector<std::array<double, kNumPredictors>> pred(n);
    for (std::size_t j = 0; j < kNumPredictors; ++j) {
        Rng rng = root.substream("idiosyncratic").substream(j);
        double load_sq = 0.0;
        for (std::size_t a = 0; a < kNumFactors; ++a) load_sq += kLoadings[j][a] * kLoadings[j][a];
        const double idio_sd = std::sqrt(1.0 - load_sq);
        for (std::size_t r = 0; r < n; ++r) {
            double v = idio_sd * rng.normal();
            for (std::size_t a = 0; a < kNumFactors; ++a) v += kLoadings[j][a] * latent[r][a];
            pred[r][j] = v;
        }
    }

    std::vector<double> udebt(n);
    {
        Rng rng = root.substream("response-noise");
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t k = cls[r];
            double v = config.class_gain * kClassIntercepts[k];
            for (std::size_t j = 0; j < kNumPredictors; ++j)
                v += (kBaseSlopes[j] + config.class_gain * kClassSlopeDev[k][j]) * pred[r][j];
            // smooth nonlinear structure: one product interaction, one squared term
            const auto& p = pred[r];
            v += config.nonlinearity_gain * (0.35 * p[5] * p[3] + 0.25 * p[2] * p[2]);
            v += config.noise_sd * rng.normal();
            udebt[r] = v;
        }
        double lo = udebt[0], hi = udebt[0];
        for (double v : udebt) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double span = hi - lo;
        for (double& v : udebt) v = span > 0.0 ? (v - lo) / span : 0.0;
    }

    Table t;
    for (const char* name : kPredictorNames) t.column_names.push_back(name);
    t.column_names.push_back("class");
    t.column_names.push_back("udebt");
    t.n_cols = kNumPredictors + 2;
    t.class_col = kNumPredictors;
    t.response_col = kNumPredictors + 1;
    t.values.reserve(n * t.n_cols);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < kNumPredictors; ++j) t.values.push_back(pred[r][j]);
        t.values.push_back(static_cast<double>(cls[r] + 1));
        t.values.push_back(udebt[r]);
    }
    t.validate();
    return t;
}

namespace {

struct RawColumn {
    const char* name;
    const char* source;
    double scale;
    bool quantized;
};

// Table-I flavored raw schema: 7 coded demographics from the coordinates,
// 2 observed variables per financial factor, 2-3 spending items per cluster.
constexpr RawColumn kRawSchema[] = {
    {"age", "x", 3.0, true},
    {"empstat", "x", 1.5, true},
    {"ndep", "x", 1.0, true},
    {"mstat", "y", 2.0, true},
    {"hstatus", "y", 1.5, true},
    {"male", "y", 0.8, true},
    {"nadults", "y", 1.2, true},
    {"hvalue", "housingfactor", 1.4, false},
    {"mortdebt", "housingfactor", 0.9, false},
    {"income", "financialfactor1", 1.2, false},
    {"finasset", "financialfactor1", 0.8, false},
    {"carvalue", "financialfactor2", 1.0, false},
    {"networth", "financialfactor2", 0.7, false},
    {"food", "Necessity", 1.3, false},
    {"services", "Necessity", 0.9, false},
    {"clothing", "Necessity", 0.6, false},
    {"housing", "Household", 1.1, false},
    {"sundries", "Household", 0.7, false},
    {"priority", "Excessive", 1.0, false},
    {"other", "Excessive", 0.8, false},
    {"motoring", "Excessive", 0.6, false},
    {"leisure", "Leisure", 1.2, false},
    {"travel", "Leisure", 0.8, false},
};

}  // namespace

Table expand_raw(const Table& t, std::uint64_t seed, const ExpandConfig& cfg) {
    for (const char* name : kPredictorNames)
        if (std::find(t.column_names.begin(), t.column_names.end(), name) ==
            t.column_names.end())
            throw std::runtime_error("expand_raw: missing required column '" +
                                     std::string(name) + "'");

    const std::size_t n = t.n_rows();
    const std::size_t n_raw = std::size(kRawSchema);
    const Rng root(seed);

    Table out;
    for (const RawColumn& rc : kRawSchema) out.column_names.push_back(rc.name);
    if (t.class_col) out.column_names.push_back("class");
    out.column_names.push_back(t.response_name());
    out.n_cols = n_raw + (t.class_col ? 2 : 1);
    if (t.class_col) out.class_col = n_raw;
    out.response_col = out.n_cols - 1;

    // column-major generation, one noise substream per raw column
    Matrix raw(n, n_raw);
    for (std::size_t j = 0; j < n_raw; ++j) {
        const RawColumn& rc = kRawSchema[j];
        const std::size_t src = t.column_index(rc.source);
        Rng rng = root.substream("expand").substream(j);
        for (std::size_t r = 0; r < n; ++r) {
            double v = rc.scale * (t.at(r, src) + cfg.noise_amp * rng.normal());
            if (rc.quantized && cfg.quantize) v = std::round(v);
            raw(r, j) = v;
        }
    }

    out.values.reserve(n * out.n_cols);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < n_raw; ++j) out.values.push_back(raw(r, j));
        if (t.class_col) out.values.push_back(t.at(r, *t.class_col));
        out.values.push_back(t.at(r, t.response_col));
    }
    return out;
}

DatasetVariant variant_from_string(const std::string& s) {
    if (s == "A" || s == "a") return DatasetVariant::A;
    if (s == "B" || s == "b") return DatasetVariant::B;
    if (s == "C" || s == "c") return DatasetVariant::C;
    if (s == "D" || s == "d") return DatasetVariant::D;
    throw std::invalid_argument("unknown dataset variant '" + s + "' (expected A, B, C or D)");
}

char variant_tag(DatasetVariant v) {
    switch (v) {
        case DatasetVariant::A: return 'A';
        case DatasetVariant::B: return 'B';
        case DatasetVariant::C: return 'C';
        case DatasetVariant::D: return 'D';
    }
    return '?';
}

Table make_variant(const Table& t_transformed, DatasetVariant v, std::uint64_t seed,
                   const ExpandConfig& cfg) {
    if (!t_transformed.class_col)
        throw std::runtime_error("make_variant: transformed table must carry a class column");
    switch (v) {
        case DatasetVariant::A: return drop_class_column(expand_raw(t_transformed, seed, cfg));
        case DatasetVariant::B: return drop_class_column(t_transformed);
        case DatasetVariant::C: return expand_raw(t_transformed, seed, cfg);
        case DatasetVariant::D: return t_transformed;
    }
    throw std::invalid_argument("make_variant: unknown variant tag");
}

}  // namespace debtlab
