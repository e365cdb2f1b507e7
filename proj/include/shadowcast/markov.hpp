#ifndef SHADOWCAST_MARKOV_HPP
#define SHADOWCAST_MARKOV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "shadowcast/walks.hpp"

namespace shadowcast {

/// Transparent Markov model over labels: initial distribution pi and
/// row-stochastic transition matrix a. The control vector for steering
/// generation.
struct MarkovControl {
    std::uint32_t k = 0;
    std::vector<double> pi;
    std::vector<std::vector<double>> a;
    std::string name;

    /// Rejects negative entries and any row/pi off stochastic by more than
    /// 1e-6; drift within 1e-6 is renormalized in place.
    void validate();
};

struct LabelSequences {
    std::size_t m = 0;
    std::size_t t = 0;
    std::vector<std::uint32_t> labels;  // m x t row-major

    std::uint32_t at(std::size_t i, std::size_t s) const { return labels[i * t + s]; }
};

/// Row r: first label ~ Cat(pi), then label ~ Cat(a[prev]). Per-row RNG
/// streams derived from (seed, row).
LabelSequences sample_label_sequences(const MarkovControl& ctrl, std::size_t count, std::size_t length,
                                      std::uint64_t seed);

/// Laplace-smoothed (pi, a) fit from observed label sequences. Rows of `a`
/// with no observations and alpha == 0 fall back to uniform.
MarkovControl empirical_markov(const LabelSequences& seqs, std::uint32_t k, double alpha = 0.01);
MarkovControl empirical_markov(const WalkBatch& batch, std::uint32_t k, double alpha = 0.01);

/// Named scenario presets for the Enron label convention
/// (0=Legal, 1=Trading, 2=Finance).
MarkovControl preset(const std::string& name);
std::vector<std::string> preset_names();

MarkovControl load_control(const std::string& path);
void save_control(const MarkovControl& ctrl, const std::string& path);

}  // namespace shadowcast

#endif
