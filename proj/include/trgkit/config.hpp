#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trgkit/align.hpp"
#include "trgkit/instr.hpp"
#include "trgkit/pcap.hpp"

namespace trgkit {

struct OodConfig {
    std::string bias = "none";
    std::string ratio_train = "3:1";
    std::string ratio_test = "3:1";
    int per_class_n = 0;
    double train_fraction = 0.8;
    double holdout_fraction = 0.5;
};

struct FilterConfig {
    std::vector<std::string> protocols;  // empty = all
    uint32_t min_payload_len = 0;
    std::vector<std::string> ip_allowlist;

    FilterSpec to_spec() const;
};

struct PipelineConfig {
    uint64_t seed = 0;
    int64_t gamma_micros = 1000000;          // BURST threshold, 1 s
    int64_t idle_timeout_micros = 64000000;  // flow idle timeout, 64 s
    int64_t window_micros = 0;               // 0 = one graph per capture
    uint32_t rd_max_bytes = 128;
    uint32_t pl_max_packets = 32;
    FilterConfig filter;
    AlignmentConfig align;
    OptimizerConfig optimizer;
    InstrOptions instr;
    OodConfig ood;
};

// Strict parse: unknown or ill-typed keys raise a config error naming the key.
PipelineConfig config_from_json(const std::string& text);
PipelineConfig config_from_file(const std::string& path);
std::string config_to_json(const PipelineConfig& cfg);  // full resolved document

void validate_config(const PipelineConfig& cfg);

}  // namespace trgkit
