#pragma once

// Slow reference implementations used to cross-check the library.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace tta::oracle {

/// Binomial coefficient C(2t-1, t) in exact integer arithmetic.
inline unsigned __int128 multiset_count(std::size_t t) {
    unsigned __int128 r = 1;
    const std::size_t n = 2 * t - 1;
    for (std::size_t i = 1; i <= t; ++i) r = r * (n - t + i) / i;
    return r;
}

inline std::size_t n_bs_exact(std::size_t t) {
    // floor(min(1000, max(100, g / 1000)))
    const unsigned __int128 g = multiset_count(t);
    const unsigned __int128 q = g / 1000;
    if (q >= 1000) return 1000;
    if (q < 100) return 100;
    return static_cast<std::size_t>(q);
}

/// O(n^2) pair counting: P(correct > error) + 0.5 P(tie).
inline double auroc_pairs(const std::vector<double>& s, const std::vector<bool>& correct) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!correct[i]) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (correct[j]) continue;
            ++pairs;
            if (s[i] > s[j]) wins += 1.0;
            else if (s[i] == s[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

/// AURC by direct enumeration of the selective risk at each k.
inline double aurc_direct(const std::vector<bool>& ranked_correct) {
    double total = 0.0;
    for (std::size_t k = 1; k <= ranked_correct.size(); ++k) {
        std::size_t err = 0;
        for (std::size_t i = 0; i < k; ++i) err += ranked_correct[i] ? 0 : 1;
        total += static_cast<double>(err) / static_cast<double>(k);
    }
    return total / static_cast<double>(ranked_correct.size());
}

/// Random non-degenerate correctness vector of length in [2, max_n].
inline std::vector<bool> random_flags(std::mt19937_64& rng, std::size_t max_n) {
    std::uniform_int_distribution<std::size_t> len(2, max_n);
    std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0.05, 0.95)(rng));
    for (;;) {
        std::vector<bool> f(len(rng));
        std::size_t ok = 0;
        for (std::size_t i = 0; i < f.size(); ++i) ok += (f[i] = coin(rng)) ? 1 : 0;
        if (ok != 0 && ok != f.size()) return f;
    }
}

/// Scores quantized to a coarse grid so ties are common.
inline std::vector<double> random_tied_scores(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> level(0, 9);
    std::vector<double> s(n);
    for (double& v : s) v = level(rng) / 10.0;
    return s;
}

}  // namespace tta::oracle
