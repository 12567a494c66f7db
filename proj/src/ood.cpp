#include "trgkit/ood.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"

namespace trgkit {

namespace {

constexpr uint64_t kDominantSalt = 0x7452474b646f6d31ULL;
constexpr uint64_t kCompSetSalt = 0x7452474b636f6d70ULL;
constexpr uint64_t kDrawSalt = 0x7452474b64726177ULL;
constexpr double kSigmaFloor = 1e-12;

// class -> component -> ids, everything name-sorted for determinism
using ClassIndex = std::map<std::string, std::map<std::string, std::vector<std::string>>>;

ClassIndex index_pool(const LabeledPool& pool) {
    ClassIndex idx;
    for (const auto& item : pool.items)
        idx[item.klass][item.component].push_back(item.sample_id);
    for (auto& [klass, comps] : idx)
        for (auto& [comp, ids] : comps) std::sort(ids.begin(), ids.end());
    return idx;
}

std::vector<std::string> shuffled_ids(const std::vector<std::string>& sorted_ids,
                                      uint64_t seed, const std::string& klass,
                                      const std::string& comp) {
    std::vector<std::string> ids = sorted_ids;
    DetRng rng(hash_combine(hash_combine(hash_combine(seed, kDrawSalt), hash_str(klass)),
                            hash_str(comp)));
    rng.shuffle(ids);
    return ids;
}

}  // namespace

std::vector<std::string> LabeledPool::classes() const {
    std::set<std::string> s;
    for (const auto& i : items) s.insert(i.klass);
    return {s.begin(), s.end()};
}

std::vector<std::string> LabeledPool::components(const std::string& klass) const {
    std::set<std::string> s;
    for (const auto& i : items)
        if (i.klass == klass) s.insert(i.component);
    return {s.begin(), s.end()};
}

const PoolItem& LabeledPool::by_id(const std::string& id) const {
    for (const auto& i : items)
        if (i.sample_id == id) return i;
    throw Error(errc::input, "UnknownSample", "no pool item with id " + id);
}

const char* bias_kind_name(BiasKind k) {
    switch (k) {
        case BiasKind::none: return "none";
        case BiasKind::proportional: return "proportional";
        case BiasKind::compositional: return "compositional";
    }
    return "none";
}

BiasKind bias_kind_parse(const std::string& s) {
    if (s == "none") return BiasKind::none;
    if (s == "proportional") return BiasKind::proportional;
    if (s == "compositional") return BiasKind::compositional;
    throw Error(errc::config, "BadBiasKind", "unknown bias kind: " + s);
}

std::vector<std::string> DatasetSplit::all_train_ids() const {
    std::vector<std::string> out;
    for (const auto& c : classes) out.insert(out.end(), c.train_ids.begin(), c.train_ids.end());
    return out;
}

std::vector<std::string> DatasetSplit::all_test_ids() const {
    std::vector<std::string> out;
    for (const auto& c : classes) out.insert(out.end(), c.test_ids.begin(), c.test_ids.end());
    return out;
}

Ratio Ratio::parse(const std::string& text) {
    Ratio r;
    size_t sep = text.find_first_of(":/");
    try {
        if (sep == std::string::npos) {
            r.num = std::stoll(text);
            r.den = 1;
        } else {
            r.num = std::stoll(text.substr(0, sep));
            r.den = std::stoll(text.substr(sep + 1));
        }
    } catch (const std::exception&) {
        throw Error(errc::config, "BadRatio", "unparseable ratio: " + text);
    }
    if (r.num <= 0 || r.den <= 0)
        throw Error(errc::config, "BadRatio", "ratio parts must be positive: " + text);
    return r;
}

std::string Ratio::to_string() const {
    return std::to_string(num) + ":" + std::to_string(den);
}

double ni_index(const std::vector<std::vector<double>>& train_reps,
                const std::vector<std::vector<double>>& test_reps) {
    if (train_reps.empty() || test_reps.empty())
        throw Error(errc::input, "DimMismatch", "both sides need at least one row");
    size_t dim = train_reps[0].size();
    for (const auto& r : train_reps)
        if (r.size() != dim) throw Error(errc::input, "DimMismatch", "ragged train rows");
    for (const auto& r : test_reps)
        if (r.size() != dim) throw Error(errc::input, "DimMismatch", "train/test dims differ");

    double sq = 0.0;
    size_t n_tr = train_reps.size(), n_te = test_reps.size();
    for (size_t d = 0; d < dim; ++d) {
        double mean_tr = 0.0, mean_te = 0.0;
        for (const auto& r : train_reps) mean_tr += r[d];
        for (const auto& r : test_reps) mean_te += r[d];
        mean_tr /= static_cast<double>(n_tr);
        mean_te /= static_cast<double>(n_te);

        double mean_u = 0.0, sq_u = 0.0;
        for (const auto& r : train_reps) mean_u += r[d];
        for (const auto& r : test_reps) mean_u += r[d];
        mean_u /= static_cast<double>(n_tr + n_te);
        for (const auto& r : train_reps) sq_u += (r[d] - mean_u) * (r[d] - mean_u);
        for (const auto& r : test_reps) sq_u += (r[d] - mean_u) * (r[d] - mean_u);
        double sigma = std::sqrt(sq_u / static_cast<double>(n_tr + n_te));
        if (sigma < kSigmaFloor) sigma = kSigmaFloor;

        double z = (mean_tr - mean_te) / sigma;
        sq += z * z;
    }
    return std::sqrt(sq);
}

std::vector<int64_t> largest_remainder(const std::vector<double>& weights, int64_t total) {
    double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (wsum <= 0.0) throw Error(errc::internal, "BadWeights", "weights must sum to > 0");

    std::vector<int64_t> counts(weights.size());
    std::vector<std::pair<double, size_t>> rema;
    int64_t assigned = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
        double quota = static_cast<double>(total) * weights[i] / wsum;
        counts[i] = static_cast<int64_t>(std::floor(quota));
        assigned += counts[i];
        rema.emplace_back(quota - std::floor(quota), i);
    }
    std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        return a.first > b.first;  // ties keep position order
    });
    for (int64_t k = 0; k < total - assigned; ++k) ++counts[rema[static_cast<size_t>(k)].second];
    return counts;
}

namespace {

void fill_ni(const LabeledPool& pool, DatasetSplit& split) {
    std::map<std::string, const PoolItem*> by_id;
    for (const auto& i : pool.items) by_id[i.sample_id] = &i;
    for (auto& c : split.classes) {
        std::vector<std::vector<double>> tr, te;
        for (const auto& id : c.train_ids) tr.push_back(by_id.at(id)->features);
        for (const auto& id : c.test_ids) te.push_back(by_id.at(id)->features);
        c.ni = (tr.empty() || te.empty()) ? 0.0 : ni_index(tr, te);
    }
}

}  // namespace

DatasetSplit build_random_split(const LabeledPool& pool, double train_fraction, uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw Error(errc::config, "BadFraction", "train_fraction must be in (0,1)");
    if (pool.items.empty()) throw Error(errc::input, "EmptyPool", "pool has no items");

    DatasetSplit split;
    split.bias_kind = BiasKind::none;
    split.train_fraction = train_fraction;
    split.seed = seed;

    auto idx = index_pool(pool);
    for (const auto& [klass, comps] : idx) {
        ClassSplit cs;
        cs.name = klass;
        std::vector<std::string> ids;
        for (const auto& [comp, cids] : comps) ids.insert(ids.end(), cids.begin(), cids.end());
        std::sort(ids.begin(), ids.end());
        ids = shuffled_ids(ids, seed, klass, "");
        auto n_train = static_cast<size_t>(
            std::llround(train_fraction * static_cast<double>(ids.size())));
        n_train = std::min(n_train, ids.size());
        cs.train_ids.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
        cs.test_ids.assign(ids.begin() + static_cast<long>(n_train), ids.end());
        std::sort(cs.train_ids.begin(), cs.train_ids.end());
        std::sort(cs.test_ids.begin(), cs.test_ids.end());
        split.classes.push_back(std::move(cs));
    }
    fill_ni(pool, split);
    return split;
}

DatasetSplit build_proportional_split(const LabeledPool& pool, const Ratio& ratio_train,
                                      const Ratio& ratio_test, int per_class_n, uint64_t seed) {
    if (per_class_n <= 0)
        throw Error(errc::config, "BadCount", "per_class_n must be > 0");
    if (pool.items.empty()) throw Error(errc::input, "EmptyPool", "pool has no items");

    DatasetSplit split;
    split.bias_kind = BiasKind::proportional;
    split.ratio_train = ratio_train.to_string();
    split.ratio_test = ratio_test.to_string();
    split.per_class_n = per_class_n;
    split.seed = seed;

    auto idx = index_pool(pool);
    for (const auto& [klass, comps] : idx) {
        size_t k = comps.size();
        if (k < 2)
            throw Error(errc::input, "SingleComponentClass",
                        "class " + klass + " has fewer than 2 components");

        std::vector<std::string> comp_names;
        for (const auto& [comp, ids] : comps) comp_names.push_back(comp);
        size_t dom = static_cast<size_t>(
            DetRng(hash_combine(hash_combine(seed, kDominantSalt), hash_str(klass)))
                .bounded(k));

        ClassSplit cs;
        cs.name = klass;
        cs.dominant = comp_names[dom];

        auto apportion = [&](const Ratio& ratio) {
            std::vector<double> weights(k, static_cast<double>(ratio.den));
            weights[dom] = static_cast<double>(ratio.num);
            return largest_remainder(weights, per_class_n);
        };
        std::vector<int64_t> train_counts = apportion(ratio_train);
        std::vector<int64_t> test_counts = apportion(ratio_test);

        for (size_t ci = 0; ci < k; ++ci) {
            const auto& ids = comps.at(comp_names[ci]);
            int64_t need = train_counts[ci] + test_counts[ci];
            if (static_cast<int64_t>(ids.size()) < need)
                throw Error(errc::input, "InsufficientSamples",
                            "class " + klass + " component " + comp_names[ci] + " has " +
                                std::to_string(ids.size()) + " samples, needs " +
                                std::to_string(need));
            auto drawn = shuffled_ids(ids, seed, klass, comp_names[ci]);
            cs.train_ids.insert(cs.train_ids.end(), drawn.begin(),
                                drawn.begin() + train_counts[ci]);
            cs.test_ids.insert(cs.test_ids.end(), drawn.begin() + train_counts[ci],
                               drawn.begin() + train_counts[ci] + test_counts[ci]);
        }
        std::sort(cs.train_ids.begin(), cs.train_ids.end());
        std::sort(cs.test_ids.begin(), cs.test_ids.end());
        split.classes.push_back(std::move(cs));
    }
    fill_ni(pool, split);
    return split;
}

DatasetSplit build_compositional_split(const LabeledPool& pool, double train_fraction,
                                       double holdout_fraction, uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw Error(errc::config, "BadFraction", "train_fraction must be in (0,1)");
    if (holdout_fraction <= 0.0 || holdout_fraction >= 1.0)
        throw Error(errc::config, "BadFraction", "holdout_fraction must be in (0,1)");
    if (pool.items.empty()) throw Error(errc::input, "EmptyPool", "pool has no items");

    DatasetSplit split;
    split.bias_kind = BiasKind::compositional;
    split.train_fraction = train_fraction;
    split.holdout_fraction = holdout_fraction;
    split.seed = seed;

    auto idx = index_pool(pool);
    for (const auto& [klass, comps] : idx) {
        size_t n = comps.size();
        if (n < 2)
            throw Error(errc::input, "SingleComponentClass",
                        "class " + klass + " has fewer than 2 components");

        auto t_size = static_cast<size_t>(
            std::llround(train_fraction * static_cast<double>(n)));
        t_size = std::max<size_t>(1, std::min(n - 1, t_size));

        std::vector<std::string> comp_names;
        for (const auto& [comp, ids] : comps) comp_names.push_back(comp);
        std::vector<std::string> order = comp_names;
        DetRng rng(hash_combine(hash_combine(seed, kCompSetSalt), hash_str(klass)));
        rng.shuffle(order);
        std::set<std::string> train_set(order.begin(),
                                        order.begin() + static_cast<long>(t_size));

        ClassSplit cs;
        cs.name = klass;
        cs.train_components.assign(train_set.begin(), train_set.end());

        for (const auto& comp : comp_names) {
            auto drawn = shuffled_ids(comps.at(comp), seed, klass, comp);
            auto held = static_cast<size_t>(
                std::llround(holdout_fraction * static_cast<double>(drawn.size())));
            held = std::min(held, drawn.size());
            cs.test_ids.insert(cs.test_ids.end(), drawn.begin(),
                               drawn.begin() + static_cast<long>(held));
            if (train_set.count(comp))
                cs.train_ids.insert(cs.train_ids.end(),
                                    drawn.begin() + static_cast<long>(held), drawn.end());
        }
        std::sort(cs.train_ids.begin(), cs.train_ids.end());
        std::sort(cs.test_ids.begin(), cs.test_ids.end());
        split.classes.push_back(std::move(cs));
    }
    fill_ni(pool, split);
    return split;
}

std::pair<uint64_t, uint64_t> count_subsets(uint64_t n_components) {
    if (n_components < 1)
        throw Error(errc::config, "BadCount", "component count must be >= 1");
    if (n_components > 62)
        throw Error(errc::config, "BadCount", "component count too large for exact counts");
    if (n_components == 1) return {0, 1};
    uint64_t pow2 = 1ULL << n_components;
    return {pow2 - 2, pow2 - 1};
}

std::map<std::string, double> ni_report(const LabeledPool& pool, const DatasetSplit& split,
                                        const FeatureExtractor& extractor) {
    std::map<std::string, const PoolItem*> by_id;
    for (const auto& i : pool.items) by_id[i.sample_id] = &i;

    std::map<std::string, double> out;
    for (const auto& c : split.classes) {
        std::vector<std::vector<double>> tr, te;
        for (const auto& id : c.train_ids) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw Error(errc::input, "UnknownSample", "split references missing id " + id);
            tr.push_back(extractor(*it->second));
        }
        for (const auto& id : c.test_ids) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw Error(errc::input, "UnknownSample", "split references missing id " + id);
            te.push_back(extractor(*it->second));
        }
        out[c.name] = (tr.empty() || te.empty()) ? 0.0 : ni_index(tr, te);
    }
    return out;
}

FeatureExtractor identity_extractor() {
    return [](const PoolItem& item) { return item.features; };
}

std::vector<double> default_flow_features(const Flow& f) {
    std::vector<double> v(18, 0.0);
    double out_bytes = 0.0, total_bytes = 0.0;
    for (int32_t l : f.directed_lengths) {
        double mag = std::abs(static_cast<double>(l));
        int bin = std::min(15, static_cast<int>(std::floor(std::log2(1.0 + mag))));
        v[static_cast<size_t>(bin)] += 1.0;
        total_bytes += mag;
        if (l > 0) out_bytes += mag;
    }
    v[16] = total_bytes > 0.0 ? out_bytes / total_bytes : 0.0;
    v[17] = std::log2(1.0 + static_cast<double>(f.n_packets));
    return v;
}

std::vector<double> graph_feature_vector(const TrafficRelationGraph& g) {
    std::vector<double> mean(18, 0.0);
    if (g.flows.empty()) return mean;
    for (const auto& f : g.flows) {
        auto v = default_flow_features(f);
        for (size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
    }
    for (auto& x : mean) x /= static_cast<double>(g.flows.size());
    return mean;
}

std::string pool_item_to_jsonl(const PoolItem& item) {
    nlohmann::json j;
    j["sample_id"] = item.sample_id;
    j["class"] = item.klass;
    j["component"] = item.component;
    j["features"] = item.features;
    return j.dump();
}

PoolItem pool_item_from_jsonl(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    PoolItem item;
    item.sample_id = j.at("sample_id").get<std::string>();
    item.klass = j.at("class").get<std::string>();
    item.component = j.at("component").get<std::string>();
    item.features = j.at("features").get<std::vector<double>>();
    return item;
}

std::string split_to_json(const DatasetSplit& split) {
    nlohmann::json params;
    switch (split.bias_kind) {
        case BiasKind::none:
            params["train_fraction"] = split.train_fraction;
            break;
        case BiasKind::proportional:
            params["ratio_train"] = split.ratio_train;
            params["ratio_test"] = split.ratio_test;
            params["per_class_n"] = split.per_class_n;
            break;
        case BiasKind::compositional:
            params["train_fraction"] = split.train_fraction;
            params["holdout_fraction"] = split.holdout_fraction;
            break;
    }
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : split.classes) {
        nlohmann::json jc;
        jc["name"] = c.name;
        if (split.bias_kind == BiasKind::proportional) jc["dominant"] = c.dominant;
        if (split.bias_kind == BiasKind::compositional)
            jc["train_components"] = c.train_components;
        jc["train_ids"] = c.train_ids;
        jc["test_ids"] = c.test_ids;
        jc["ni"] = c.ni;
        classes.push_back(std::move(jc));
    }
    nlohmann::json j;
    j["bias_kind"] = bias_kind_name(split.bias_kind);
    j["params"] = params;
    j["seed"] = split.seed;
    j["classes"] = classes;
    return j.dump(2) + "\n";
}

DatasetSplit split_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DatasetSplit split;
    split.bias_kind = bias_kind_parse(j.at("bias_kind").get<std::string>());
    const auto& params = j.at("params");
    split.ratio_train = params.value("ratio_train", std::string());
    split.ratio_test = params.value("ratio_test", std::string());
    split.per_class_n = params.value("per_class_n", 0);
    split.train_fraction = params.value("train_fraction", 0.0);
    split.holdout_fraction = params.value("holdout_fraction", 0.0);
    split.seed = j.at("seed").get<uint64_t>();
    for (const auto& jc : j.at("classes")) {
        ClassSplit c;
        c.name = jc.at("name").get<std::string>();
        c.dominant = jc.value("dominant", std::string());
        if (jc.contains("train_components"))
            c.train_components = jc["train_components"].get<std::vector<std::string>>();
        c.train_ids = jc.at("train_ids").get<std::vector<std::string>>();
        c.test_ids = jc.at("test_ids").get<std::vector<std::string>>();
        c.ni = jc.at("ni").get<double>();
        split.classes.push_back(std::move(c));
    }
    return split;
}

}  // namespace trgkit
