#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "debtlab/table.hpp"

namespace debtlab {

/// Synthetic debtor-survey generator. Nine predictors are driven by three
/// latent Gaussian factors plus class-specific mean shifts; the response is a
/// class-specific affine function of the predictors plus smooth nonlinear
/// terms and Gaussian noise, min-max scaled to [0, 1].
struct GeneratorConfig {
    std::size_t n_rows = 10000;
    std::uint64_t seed = 0;
    // Default proportional to the reference class sizes
    // (2301, 1440, 1033, 948, 507, 1588, 553, 1630) / 10000.
    std::array<double, 8> class_weights = {0.2301, 0.1440, 0.1033, 0.0948,
                                           0.0507, 0.1588, 0.0553, 0.1630};
    double noise_sd = 0.5;
    double nonlinearity_gain = 1.0;
    /// Scales every class-specific term of the response (intercept and slope
    /// deviations). 0 makes the response class-independent while the
    /// predictors keep their class structure.
    double class_gain = 1.0;
};

/// Columns: x, y, housingfactor, financialfactor1, financialfactor2,
/// Necessity, Household, Excessive, Leisure, class, udebt.
Table generate(const GeneratorConfig& config);

struct ExpandConfig {
    double noise_amp = 0.35;  // per-column observation noise, in source-SD units
    bool quantize = true;     // step-code the demographic columns
};

/// Raw view of a transformed table: every financial factor splits into two
/// noisy observed variables, every spending cluster into two or three
/// spending items, and the two coordinates quantize into categorical-coded
/// demographics. Response and class columns pass through unchanged.
Table expand_raw(const Table& t, std::uint64_t seed, const ExpandConfig& cfg = {});

enum class DatasetVariant { A, B, C, D };

DatasetVariant variant_from_string(const std::string& s);
char variant_tag(DatasetVariant v);

/// A = raw without class, B = transformed without class, C = raw with class,
/// D = transformed with class.
Table make_variant(const Table& t_transformed, DatasetVariant v, std::uint64_t seed,
                   const ExpandConfig& cfg = {});

}  // namespace debtlab
