#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "trgkit/trg.hpp"

namespace trgkit {

struct PoolItem {
    std::string sample_id;
    std::string klass;
    std::string component;
    std::vector<double> features;
};

struct LabeledPool {
    std::vector<PoolItem> items;

    std::vector<std::string> classes() const;
    std::vector<std::string> components(const std::string& klass) const;
    const PoolItem& by_id(const std::string& id) const;
};

enum class BiasKind { none, proportional, compositional };

const char* bias_kind_name(BiasKind k);
BiasKind bias_kind_parse(const std::string& s);

struct ClassSplit {
    std::string name;
    std::string dominant;                        // proportional only
    std::vector<std::string> train_components;   // compositional only
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    double ni = 0.0;
};

struct DatasetSplit {
    BiasKind bias_kind = BiasKind::none;
    std::string ratio_train;   // "a:b", proportional only
    std::string ratio_test;
    int per_class_n = 0;
    double train_fraction = 0.0;
    double holdout_fraction = 0.0;
    uint64_t seed = 0;
    std::vector<ClassSplit> classes;

    std::vector<std::string> all_train_ids() const;
    std::vector<std::string> all_test_ids() const;
};

// a:b ratio of the dominant component count to the mean minor count
struct Ratio {
    int64_t num = 1;
    int64_t den = 1;

    static Ratio parse(const std::string& text);  // "3", "1:3", "3/1"
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;
};

// Eq.-style Non-I.I.D. index: per-dimension (mean_train - mean_test) divided
// by the population std-dev over the union (floor 1e-12), L2 norm of the
// result.
double ni_index(const std::vector<std::vector<double>>& train_reps,
                const std::vector<std::vector<double>>& test_reps);

// Largest-remainder apportionment of `total` into quotas proportional to
// `weights`; ties broken by position.
std::vector<int64_t> largest_remainder(const std::vector<double>& weights, int64_t total);

DatasetSplit build_random_split(const LabeledPool& pool, double train_fraction, uint64_t seed);

// One dominant component per class (seeded choice); train counts realize
// ratio_train over per_class_n samples, test counts realize ratio_test.
DatasetSplit build_proportional_split(const LabeledPool& pool, const Ratio& ratio_train,
                                      const Ratio& ratio_test, int per_class_n, uint64_t seed);

// Train draws only from a seeded component subset T with
// |T| = clamp(round(train_fraction * N), 1, N-1); test holds out a stratified
// share of every component.
DatasetSplit build_compositional_split(const LabeledPool& pool, double train_fraction,
                                       double holdout_fraction, uint64_t seed);

// (2^N - 2, 2^N - 1) admissible train/test component subsets; (0, 1) for N=1.
std::pair<uint64_t, uint64_t> count_subsets(uint64_t n_components);

using FeatureExtractor = std::function<std::vector<double>(const PoolItem&)>;

// per-class NI over extracted train vs test representations
std::map<std::string, double> ni_report(const LabeledPool& pool, const DatasetSplit& split,
                                        const FeatureExtractor& extractor);

// stored pool features as-is
FeatureExtractor identity_extractor();

// 16-bin packet-length histogram + outbound-byte fraction + log2(1+packets)
std::vector<double> default_flow_features(const Flow& f);
// mean of per-flow default features over the graph's nodes
std::vector<double> graph_feature_vector(const TrafficRelationGraph& g);

std::string pool_item_to_jsonl(const PoolItem& item);
PoolItem pool_item_from_jsonl(const std::string& line);

std::string split_to_json(const DatasetSplit& split);
DatasetSplit split_from_json(const std::string& text);

}  // namespace trgkit
