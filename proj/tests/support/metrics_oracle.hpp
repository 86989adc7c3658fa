#pragma once

#include <cstddef>
#include <vector>

namespace ctopen::testing {

// brute-force metric implementations computed straight from a confusion
// matrix; deliberately independent of the scoring module's code path
struct BruteForceMetrics {
    static double balanced_accuracy(const std::vector<std::vector<long>>& confusion) {
        double sum = 0.0;
        int classes = 0;
        for (std::size_t t = 0; t < confusion.size(); ++t) {
            long row = 0;
            for (long v : confusion[t]) row += v;
            if (row == 0) continue;
            sum += static_cast<double>(confusion[t][t]) / static_cast<double>(row);
            ++classes;
        }
        return classes ? sum / classes : 0.0;
    }

    static double macro_f1(const std::vector<std::vector<long>>& confusion) {
        std::size_t n = confusion.size();
        double sum = 0.0;
        int classes = 0;
        for (std::size_t c = 0; c < n; ++c) {
            long tp = confusion[c][c];
            long truth_total = 0, predicted_total = 0;
            for (std::size_t other = 0; other < n; ++other) {
                truth_total += confusion[c][other];
                predicted_total += confusion[other][c];
            }
            if (truth_total == 0 && predicted_total == 0) continue;
            double precision =
                predicted_total ? static_cast<double>(tp) / predicted_total : 0.0;
            double recall = truth_total ? static_cast<double>(tp) / truth_total : 0.0;
            double f1 = (precision + recall) > 0
                            ? 2 * precision * recall / (precision + recall)
                            : 0.0;
            sum += f1;
            ++classes;
        }
        return classes ? sum / classes : 0.0;
    }
};

}  // namespace ctopen::testing
