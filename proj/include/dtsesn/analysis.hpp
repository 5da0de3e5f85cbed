#pragma once

// Structural analyses of a reservoir: the timescale spectrum of the state
// update linearized at the origin, and the trained readout magnitudes
// paired with the leak rates of their neurons.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dtsesn/csv.hpp"
#include "dtsesn/errors.hpp"
#include "dtsesn/linalg.hpp"
#include "dtsesn/reservoir.hpp"

namespace dtsesn {

/// Eigenvalue moduli within this margin of 1 (or above) are reported as
/// non-decaying rather than mapped to a decay time; the margin absorbs the
/// eigensolver's rounding so the unit-spectral-radius mode is classified
/// deterministically.
inline constexpr double kNonDecayingMargin = 1e-12;

/// Decay times of the linearized reservoir modes. Entries align with
/// `moduli` (sorted descending); a disengaged optional marks a
/// non-decaying mode (|lambda| >= 1 within the margin).
struct TimescaleSpectrum {
    std::vector<double> moduli;
    std::vector<std::optional<double>> taus;
    double dt = 1.0;
    double rho = 1.0;
    double alpha_min = 1.0;
    double alpha_max = 1.0;
    int reservoir_size = 0;
    double density = 0.0;

    [[nodiscard]] std::vector<double> finite_taus() const {
        std::vector<double> out;
        out.reserve(taus.size());
        for (const auto& t : taus)
            if (t) out.push_back(*t);
        return out;
    }
    [[nodiscard]] std::size_t non_decaying_count() const {
        return taus.size() - finite_taus().size();
    }
};

/// Jacobian of the state update at the origin (tanh'(0) = 1):
/// J = (I - A) + rho A W. Each eigenvalue modulus |lambda| < 1 maps to the
/// decay time tau = -dt / ln|lambda|; |lambda| = 0 maps to tau = 0.
inline TimescaleSpectrum linearized_timescales(const ReservoirMatrices& m,
                                               const HyperParams& hp) {
    const Eigen::Index n = m.w.rows();
    if (m.alphas.size() != n)
        throw DimensionError("linearized_timescales: leak vector size != reservoir size");
    Matrix jac = hp.rho * (m.alphas.asDiagonal() * m.w);
    jac.diagonal().array() += 1.0 - m.alphas.array();

    TimescaleSpectrum spectrum;
    spectrum.moduli = eigenvalue_moduli(jac);
    spectrum.taus.reserve(spectrum.moduli.size());
    for (double mod : spectrum.moduli) {
        if (mod >= 1.0 - kNonDecayingMargin) {
            spectrum.taus.emplace_back(std::nullopt);
        } else if (mod <= 0.0) {
            spectrum.taus.emplace_back(0.0);
        } else {
            spectrum.taus.emplace_back(-hp.dt / std::log(mod));
        }
    }
    spectrum.dt = hp.dt;
    spectrum.rho = hp.rho;
    spectrum.alpha_min = hp.alpha_min;
    spectrum.alpha_max = hp.alpha_max;
    spectrum.reservoir_size = static_cast<int>(n);
    spectrum.density = hp.density;
    return spectrum;
}

/// Per-neuron leak rate paired with the absolute readout weight feeding
/// each output variable. Only reservoir-state columns of W_out count;
/// input-passthrough and bias columns are excluded.
struct WeightLeakProfile {
    Vector alphas;                           // length N_x
    Matrix abs_weights;                      // N_x rows, one column per output
    std::vector<std::string> output_labels;  // variable names with fast/slow tags
};

inline WeightLeakProfile weight_leak_profile(const TrainedModel& model,
                                             const std::vector<std::string>& output_labels) {
    const Eigen::Index n = model.matrices.w.rows();
    const Eigen::Index n_y = model.w_out.rows();
    if (static_cast<Eigen::Index>(output_labels.size()) != n_y)
        throw DimensionError("weight_leak_profile: label count != output count");
    WeightLeakProfile profile;
    profile.alphas = model.matrices.alphas;
    profile.abs_weights = model.w_out.leftCols(n).cwiseAbs().transpose();
    profile.output_labels = output_labels;
    return profile;
}

struct TimescaleHistogram {
    std::vector<double> edges;        // bin j covers [edges[j], edges[j+1])
    std::vector<std::size_t> counts;  // finite decay times only
    std::size_t non_decaying = 0;     // tallied separately
};

/// Histogram of the finite decay times in log10-spaced bins.
inline TimescaleHistogram timescale_histogram(const TimescaleSpectrum& spectrum,
                                              double bins_per_decade = 10.0) {
    if (!(bins_per_decade > 0.0))
        throw PreconditionError("timescale_histogram: bins_per_decade must be positive");
    std::vector<double> finite;
    for (const auto& t : spectrum.taus)
        if (t && *t > 0.0) finite.push_back(*t);
    if (finite.empty())
        throw Error("timescale_histogram: spectrum has no finite positive decay times");

    const double lo_val = *std::min_element(finite.begin(), finite.end());
    const double hi_val = *std::max_element(finite.begin(), finite.end());
    const double lo = std::floor(std::log10(lo_val) * bins_per_decade) / bins_per_decade;
    const auto bin_of = [&](double v) {
        return static_cast<std::size_t>(
            std::max(0.0, std::floor((std::log10(v) - lo) * bins_per_decade)));
    };
    const std::size_t n_bins = bin_of(hi_val) + 1;

    TimescaleHistogram hist;
    hist.counts.assign(n_bins, 0);
    hist.edges.resize(n_bins + 1);
    for (std::size_t j = 0; j <= n_bins; ++j)
        hist.edges[j] = std::pow(10.0, lo + static_cast<double>(j) / bins_per_decade);
    for (double v : finite) hist.counts[std::min(bin_of(v), n_bins - 1)] += 1;
    hist.non_decaying = spectrum.non_decaying_count();
    return hist;
}

/// CSV: index,modulus,tau_or_marker. Non-decaying modes carry the marker
/// string instead of a number.
inline void write_spectrum_csv(std::ostream& out, const TimescaleSpectrum& spectrum) {
    out << "index,modulus,tau_or_marker\n";
    for (std::size_t i = 0; i < spectrum.moduli.size(); ++i) {
        out << i << ',' << format_double(spectrum.moduli[i]) << ',';
        if (spectrum.taus[i])
            out << format_double(*spectrum.taus[i]);
        else
            out << "non_decaying";
        out << '\n';
    }
}

/// CSV: bin_lo,bin_hi,count for finite bins; the final row is always
/// "inf,inf,<non-decaying count>".
inline void write_histogram_csv(std::ostream& out, const TimescaleHistogram& hist) {
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t j = 0; j < hist.counts.size(); ++j)
        out << format_double(hist.edges[j]) << ',' << format_double(hist.edges[j + 1]) << ','
            << hist.counts[j] << '\n';
    out << "inf,inf," << hist.non_decaying << '\n';
}

/// CSV: neuron,alpha,w_<label>... with one |w| column per output variable.
inline void write_profile_csv(std::ostream& out, const WeightLeakProfile& profile) {
    out << "neuron,alpha";
    for (const auto& label : profile.output_labels) out << ",w_" << label;
    out << '\n';
    for (Eigen::Index i = 0; i < profile.alphas.size(); ++i) {
        out << i << ',' << format_double(profile.alphas[i]);
        for (Eigen::Index j = 0; j < profile.abs_weights.cols(); ++j)
            out << ',' << format_double(profile.abs_weights(i, j));
        out << '\n';
    }
}

}  // namespace dtsesn
