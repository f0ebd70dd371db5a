// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "aasim/common.hpp"
#include "aasim/gas_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace aasim::stats {

struct StatsSummary {
    size_t n = 0;
    double mean = 0;
    double median = 0;
    double sigma = 0; // sample standard deviation (n-1)
    std::pair<double, double> ci95{0, 0};
    std::optional<double> skewness;
    std::optional<double> excessKurtosis;
};

enum class DeltaMagnitude { Negligible, Small, Medium, Large };

inline std::string_view magnitudeName(DeltaMagnitude m) {
    switch (m) {
        case DeltaMagnitude::Negligible: return "negligible";
        case DeltaMagnitude::Small: return "small";
        case DeltaMagnitude::Medium: return "medium";
        case DeltaMagnitude::Large: return "large";
    }
    return "unknown";
}

// Standard thresholds: |delta| < 0.147 negligible, < 0.33 small,
// < 0.474 medium, otherwise large.
inline DeltaMagnitude classifyDelta(double delta) {
    double a = std::fabs(delta);
    if (a < 0.147) return DeltaMagnitude::Negligible;
    if (a < 0.33) return DeltaMagnitude::Small;
    if (a < 0.474) return DeltaMagnitude::Medium;
    return DeltaMagnitude::Large;
}

struct DeltaResult {
    double delta = 0;
    DeltaMagnitude magnitude = DeltaMagnitude::Negligible;
};

inline double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    size_t n = xs.size();
    if (n % 2 == 1) return xs[n / 2];
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline double sampleSigma(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0;
    double m = mean(xs);
    double acc = 0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

// Percentile bootstrap of the mean. Resample indices come straight off the
// seeded generator (modulo mapping) so identical inputs are bit-reproducible
// across platforms; quantiles are nearest-rank on the sorted resample means.
inline Outcome<std::pair<double, double>> bootstrapCi(const std::vector<double>& sample, size_t b,
                                                      double level, u64 seed) {
    if (sample.empty()) return fail(Err::EmptySample);
    if (b < 1) return fail(Err::EmptySample, "resample count must be >= 1");
    if (!(level > 0 && level < 1)) return fail(Err::EmptySample, "level must be in (0, 1)");
    size_t n = sample.size();
    std::mt19937_64 gen(seed);
    std::vector<double> means;
    means.reserve(b);
    for (size_t i = 0; i < b; ++i) {
        double acc = 0;
        for (size_t j = 0; j < n; ++j) acc += sample[gen() % n];
        means.push_back(acc / static_cast<double>(n));
    }
    std::sort(means.begin(), means.end());
    double tail = (1.0 - level) / 2.0;
    auto nearestRank = [&](double q) {
        size_t rank = static_cast<size_t>(std::ceil(q * static_cast<double>(b)));
        if (rank < 1) rank = 1;
        if (rank > b) rank = b;
        return means[rank - 1];
    };
    return std::make_pair(nearestRank(tail), nearestRank(1.0 - tail));
}

// delta = (#pairs a_i < b_j - #pairs a_i > b_j) / (|a| * |b|); positive means
// the first sample is lower. Ties contribute to neither count.
inline Outcome<DeltaResult> cliffsDelta(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return fail(Err::EmptySample);
    std::int64_t lower = 0, higher = 0;
    for (double x : a) {
        for (double y : b) {
            if (x < y)
                ++lower;
            else if (x > y)
                ++higher;
        }
    }
    double delta = static_cast<double>(lower - higher) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    return DeltaResult{delta, classifyDelta(delta)};
}

struct Moments {
    std::optional<double> skewness;
    std::optional<double> excessKurtosis;
};

// Standardized third and fourth population moments (excess kurtosis is m4/m2^2
// minus 3). Degenerate samples (n < 3 or sigma = 0) report undefined.
inline Moments moments(const std::vector<double>& xs) {
    Moments out;
    if (xs.size() < 3) return out;
    double m = mean(xs);
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : xs) {
        double d = x - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    double n = static_cast<double>(xs.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 <= 0) return out;
    out.skewness = m3 / std::pow(m2, 1.5);
    out.excessKurtosis = m4 / (m2 * m2) - 3.0;
    return out;
}

inline StatsSummary summarizeSample(const std::vector<double>& xs, size_t bootstrapB = 10'000,
                                    double level = 0.95, u64 seed = 42) {
    StatsSummary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    s.mean = mean(xs);
    s.median = median(xs);
    s.sigma = sampleSigma(xs);
    auto ci = bootstrapCi(xs, bootstrapB, level, seed);
    if (ci.ok()) s.ci95 = ci.value();
    Moments mo = moments(xs);
    s.skewness = mo.skewness;
    s.excessKurtosis = mo.excessKurtosis;
    return s;
}

// -----------------------------------------------------------------------------
// Per-campaign summary: one row per system over txGasUsed and actualGasUsed,
// plus the pairwise delta matrix over txGasUsed in sample order.
// -----------------------------------------------------------------------------

struct SummaryRow {
    std::string system;
    StatsSummary txGas;
    StatsSummary actualGas;
};

struct DeltaCell {
    std::string first;
    std::string second;
    DeltaResult result;
};

struct SummaryTable {
    std::vector<SummaryRow> rows;
    std::vector<DeltaCell> deltas; // all ordered pairs, first != second
};

inline std::vector<double> txGasSamples(const std::vector<GasReceipt>& receipts) {
    std::vector<double> out;
    out.reserve(receipts.size());
    for (const auto& r : receipts) out.push_back(static_cast<double>(r.txGasUsed));
    return out;
}

inline std::vector<double> actualGasSamples(const std::vector<GasReceipt>& receipts) {
    std::vector<double> out;
    out.reserve(receipts.size());
    for (const auto& r : receipts) out.push_back(static_cast<double>(r.actualGasUsed));
    return out;
}

inline SummaryTable summarize(const std::vector<std::pair<std::string, std::vector<GasReceipt>>>& campaign,
                              size_t bootstrapB = 10'000, u64 seed = 42) {
    SummaryTable table;
    std::vector<std::pair<std::string, std::vector<double>>> tx;
    for (const auto& [system, receipts] : campaign) {
        if (receipts.empty()) continue;
        SummaryRow row;
        row.system = system;
        auto txs = txGasSamples(receipts);
        row.txGas = summarizeSample(txs, bootstrapB, 0.95, seed);
        row.actualGas = summarizeSample(actualGasSamples(receipts), bootstrapB, 0.95, seed);
        table.rows.push_back(std::move(row));
        tx.emplace_back(system, std::move(txs));
    }
    for (const auto& [nameA, a] : tx) {
        for (const auto& [nameB, b] : tx) {
            if (nameA == nameB) continue;
            auto d = cliffsDelta(a, b);
            if (d.ok()) table.deltas.push_back(DeltaCell{nameA, nameB, d.value()});
        }
    }
    return table;
}

} // namespace aasim::stats
