#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trgkit/common.hpp"

namespace trgkit {

struct ConfusionMatrix {
    std::vector<std::string> classes;              // sorted union of labels seen
    std::vector<std::vector<uint64_t>> counts;     // rows = true, cols = predicted

    uint64_t total() const;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    uint64_t support = 0;
};

struct MetricReport {
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::map<std::string, ClassMetrics> per_class;
};

ConfusionMatrix confusion(const std::vector<std::string>& preds,
                          const std::vector<std::string>& truths);

// Per-class P/R/F1 with the 0/0 -> 0 convention; macro values are unweighted
// means; accuracy = trace / total.
MetricReport macro_metrics(const ConfusionMatrix& m);

// id-keyed join of {sample_id, label} JSONL files
MetricReport evaluate_files(const std::string& preds_path, const std::string& truths_path);

std::string report_to_json(const MetricReport& r);
std::string report_to_text(const MetricReport& r);

}  // namespace trgkit
