#include "trgkit/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"

namespace trgkit {

uint64_t ConfusionMatrix::total() const {
    uint64_t t = 0;
    for (const auto& row : counts)
        for (uint64_t c : row) t += c;
    return t;
}

ConfusionMatrix confusion(const std::vector<std::string>& preds,
                          const std::vector<std::string>& truths) {
    if (preds.size() != truths.size())
        throw Error(errc::input, "LengthMismatch",
                    std::to_string(preds.size()) + " predictions vs " +
                        std::to_string(truths.size()) + " truths");
    if (preds.empty()) throw Error(errc::input, "Empty", "no predictions to score");

    std::set<std::string> labels(preds.begin(), preds.end());
    labels.insert(truths.begin(), truths.end());

    ConfusionMatrix m;
    m.classes.assign(labels.begin(), labels.end());
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < m.classes.size(); ++i) idx[m.classes[i]] = i;
    m.counts.assign(m.classes.size(), std::vector<uint64_t>(m.classes.size(), 0));
    for (size_t i = 0; i < preds.size(); ++i) ++m.counts[idx[truths[i]]][idx[preds[i]]];
    return m;
}

MetricReport macro_metrics(const ConfusionMatrix& m) {
    if (m.classes.empty()) throw Error(errc::input, "Empty", "empty confusion matrix");
    size_t n = m.classes.size();

    MetricReport rep;
    uint64_t diag = 0, total = 0;
    for (size_t c = 0; c < n; ++c) {
        uint64_t tp = m.counts[c][c];
        uint64_t fp = 0, fn = 0, support = 0;
        for (size_t r = 0; r < n; ++r) {
            if (r != c) fp += m.counts[r][c];
            total += m.counts[c][r];
            support += m.counts[c][r];
            if (r != c) fn += m.counts[c][r];
        }
        diag += tp;

        ClassMetrics cm;
        cm.support = support;
        cm.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        cm.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        cm.f1 = (cm.precision + cm.recall > 0.0)
                    ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall)
                    : 0.0;
        rep.per_class[m.classes[c]] = cm;

        rep.macro_precision += cm.precision;
        rep.macro_recall += cm.recall;
        rep.macro_f1 += cm.f1;
    }
    rep.macro_precision /= static_cast<double>(n);
    rep.macro_recall /= static_cast<double>(n);
    rep.macro_f1 /= static_cast<double>(n);
    rep.accuracy = total ? static_cast<double>(diag) / static_cast<double>(total) : 0.0;
    return rep;
}

namespace {

std::map<std::string, std::string> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::input, "MissingFile", "cannot open " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.is_object() && j.contains("meta") && j.size() == 1) continue;
        std::string id = j.at("sample_id").get<std::string>();
        if (out.count(id))
            throw Error(errc::input, "DuplicateId", "duplicate sample_id " + id + " in " + path);
        out[id] = j.at("label").get<std::string>();
    }
    if (out.empty()) throw Error(errc::input, "Empty", "no records in " + path);
    return out;
}

}  // namespace

MetricReport evaluate_files(const std::string& preds_path, const std::string& truths_path) {
    auto preds = load_labels(preds_path);
    auto truths = load_labels(truths_path);
    for (const auto& [id, label] : truths)
        if (!preds.count(id))
            throw Error(errc::input, "MissingId", "sample_id " + id + " missing from predictions");
    for (const auto& [id, label] : preds)
        if (!truths.count(id))
            throw Error(errc::input, "MissingId", "sample_id " + id + " missing from truths");

    std::vector<std::string> p, t;
    p.reserve(preds.size());
    t.reserve(preds.size());
    for (const auto& [id, label] : truths) {
        p.push_back(preds.at(id));
        t.push_back(label);
    }
    return macro_metrics(confusion(p, t));
}

std::string report_to_json(const MetricReport& r) {
    nlohmann::json per;
    for (const auto& [name, cm] : r.per_class) {
        per[name] = {
            {"precision", cm.precision},
            {"recall", cm.recall},
            {"f1", cm.f1},
            {"support", cm.support},
        };
    }
    nlohmann::json j;
    j["accuracy"] = r.accuracy;
    j["macro_precision"] = r.macro_precision;
    j["macro_recall"] = r.macro_recall;
    j["macro_f1"] = r.macro_f1;
    j["per_class"] = per;
    return j.dump(2) + "\n";
}

std::string report_to_text(const MetricReport& r) {
    char buf[160];
    std::string out;
    out += "class                       precision    recall        f1   support\n";
    for (const auto& [name, cm] : r.per_class) {
        std::snprintf(buf, sizeof(buf), "%-24s %12.4f %9.4f %9.4f %9llu\n", name.c_str(),
                      cm.precision, cm.recall, cm.f1,
                      static_cast<unsigned long long>(cm.support));
        out += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "\naccuracy %.4f  macro-precision %.4f  macro-recall %.4f  macro-f1 %.4f\n",
                  r.accuracy, r.macro_precision, r.macro_recall, r.macro_f1);
    out += buf;
    return out;
}

}  // namespace trgkit
