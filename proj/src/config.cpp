#include "trgkit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "trgkit/ood.hpp"

namespace trgkit {

FilterSpec FilterConfig::to_spec() const {
    FilterSpec spec;
    for (const auto& p : protocols) {
        if (p == "tcp") spec.include_protocols.insert(Protocol::tcp);
        else if (p == "udp") spec.include_protocols.insert(Protocol::udp);
        else throw Error(errc::config, "BadConfig", "filter.protocols: unknown protocol " + p);
    }
    spec.min_payload_len = min_payload_len;
    if (!ip_allowlist.empty()) {
        std::set<IpAddr> allow;
        for (const auto& a : ip_allowlist) allow.insert(IpAddr::parse(a));
        spec.ip_allowlist = std::move(allow);
    }
    return spec;
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& scope) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key()))
            throw Error(errc::config, "UnknownKey",
                        scope.empty() ? it.key() : scope + "." + it.key());
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& scope) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(errc::config, "BadConfig",
                    (scope.empty() ? std::string(key) : scope + "." + key) + " has the wrong type");
    }
}

}  // namespace

PipelineConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(errc::config, "BadConfig", std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(errc::config, "BadConfig", "config must be a JSON object");

    PipelineConfig cfg;
    reject_unknown(j, {"seed", "gamma_micros", "idle_timeout_micros", "window_micros",
                       "rd_max_bytes", "pl_max_packets", "filter", "align", "instr", "ood"},
                   "");
    read(j, "seed", cfg.seed, "");
    read(j, "gamma_micros", cfg.gamma_micros, "");
    read(j, "idle_timeout_micros", cfg.idle_timeout_micros, "");
    read(j, "window_micros", cfg.window_micros, "");
    read(j, "rd_max_bytes", cfg.rd_max_bytes, "");
    read(j, "pl_max_packets", cfg.pl_max_packets, "");

    if (j.contains("filter")) {
        const json& f = j["filter"];
        reject_unknown(f, {"protocols", "min_payload_len", "ip_allowlist"}, "filter");
        read(f, "protocols", cfg.filter.protocols, "filter");
        read(f, "min_payload_len", cfg.filter.min_payload_len, "filter");
        read(f, "ip_allowlist", cfg.filter.ip_allowlist, "filter");
    }
    if (j.contains("align")) {
        const json& a = j["align"];
        reject_unknown(a,
                       {"tau", "lambda_rd", "lambda_pl", "proj_dim", "graph_dim", "rd_dim",
                        "pl_dim", "rounds", "optimizer"},
                       "align");
        read(a, "tau", cfg.align.tau, "align");
        read(a, "lambda_rd", cfg.align.lambda_rd, "align");
        read(a, "lambda_pl", cfg.align.lambda_pl, "align");
        read(a, "proj_dim", cfg.align.proj_dim, "align");
        read(a, "graph_dim", cfg.align.graph_dim, "align");
        read(a, "rd_dim", cfg.align.rd_dim, "align");
        read(a, "pl_dim", cfg.align.pl_dim, "align");
        read(a, "rounds", cfg.align.rounds, "align");
        if (a.contains("optimizer")) {
            const json& o = a["optimizer"];
            reject_unknown(o, {"lr", "epochs", "batch"}, "align.optimizer");
            read(o, "lr", cfg.optimizer.lr, "align.optimizer");
            read(o, "epochs", cfg.optimizer.epochs, "align.optimizer");
            read(o, "batch", cfg.optimizer.batch, "align.optimizer");
        }
    }
    if (j.contains("instr")) {
        const json& i = j["instr"];
        reject_unknown(i, {"h", "fanout", "kind", "rd_preview", "pl_preview"}, "instr");
        read(i, "h", cfg.instr.h, "instr");
        read(i, "fanout", cfg.instr.fanout, "instr");
        read(i, "kind", cfg.instr.kind, "instr");
        read(i, "rd_preview", cfg.instr.rd_preview, "instr");
        read(i, "pl_preview", cfg.instr.pl_preview, "instr");
    }
    if (j.contains("ood")) {
        const json& o = j["ood"];
        reject_unknown(o,
                       {"bias", "ratio_train", "ratio_test", "per_class_n", "train_fraction",
                        "holdout_fraction"},
                       "ood");
        read(o, "bias", cfg.ood.bias, "ood");
        read(o, "ratio_train", cfg.ood.ratio_train, "ood");
        read(o, "ratio_test", cfg.ood.ratio_test, "ood");
        read(o, "per_class_n", cfg.ood.per_class_n, "ood");
        read(o, "train_fraction", cfg.ood.train_fraction, "ood");
        read(o, "holdout_fraction", cfg.ood.holdout_fraction, "ood");
    }
    validate_config(cfg);
    return cfg;
}

PipelineConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::config, "MissingFile", "cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

std::string config_to_json(const PipelineConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["gamma_micros"] = cfg.gamma_micros;
    j["idle_timeout_micros"] = cfg.idle_timeout_micros;
    j["window_micros"] = cfg.window_micros;
    j["rd_max_bytes"] = cfg.rd_max_bytes;
    j["pl_max_packets"] = cfg.pl_max_packets;
    j["filter"] = {
        {"protocols", cfg.filter.protocols},
        {"min_payload_len", cfg.filter.min_payload_len},
        {"ip_allowlist", cfg.filter.ip_allowlist},
    };
    j["align"] = {
        {"tau", cfg.align.tau},
        {"lambda_rd", cfg.align.lambda_rd},
        {"lambda_pl", cfg.align.lambda_pl},
        {"proj_dim", cfg.align.proj_dim},
        {"graph_dim", cfg.align.graph_dim},
        {"rd_dim", cfg.align.rd_dim},
        {"pl_dim", cfg.align.pl_dim},
        {"rounds", cfg.align.rounds},
        {"optimizer",
         {{"lr", cfg.optimizer.lr}, {"epochs", cfg.optimizer.epochs}, {"batch", cfg.optimizer.batch}}},
    };
    j["instr"] = {
        {"h", cfg.instr.h},
        {"fanout", cfg.instr.fanout},
        {"kind", cfg.instr.kind},
        {"rd_preview", cfg.instr.rd_preview},
        {"pl_preview", cfg.instr.pl_preview},
    };
    j["ood"] = {
        {"bias", cfg.ood.bias},
        {"ratio_train", cfg.ood.ratio_train},
        {"ratio_test", cfg.ood.ratio_test},
        {"per_class_n", cfg.ood.per_class_n},
        {"train_fraction", cfg.ood.train_fraction},
        {"holdout_fraction", cfg.ood.holdout_fraction},
    };
    return j.dump();
}

void validate_config(const PipelineConfig& cfg) {
    auto fail = [](const std::string& key, const std::string& why) {
        throw Error(errc::config, "BadConfig", key + ": " + why);
    };
    if (cfg.gamma_micros <= 0) fail("gamma_micros", "must be > 0");
    if (cfg.idle_timeout_micros <= 0) fail("idle_timeout_micros", "must be > 0");
    if (cfg.window_micros < 0) fail("window_micros", "must be >= 0");
    if (cfg.rd_max_bytes == 0 || cfg.rd_max_bytes % 2 != 0)
        fail("rd_max_bytes", "must be even and > 0");
    if (cfg.pl_max_packets == 0) fail("pl_max_packets", "must be > 0");
    if (cfg.align.proj_dim < 1) fail("align.proj_dim", "must be >= 1");
    if (cfg.align.graph_dim < 1) fail("align.graph_dim", "must be >= 1");
    if (cfg.align.rd_dim < 1) fail("align.rd_dim", "must be >= 1");
    if (cfg.align.pl_dim < 2 || cfg.align.pl_dim % 2 != 0)
        fail("align.pl_dim", "must be even and >= 2");
    if (cfg.align.rounds < 0) fail("align.rounds", "must be >= 0");
    if (cfg.align.lambda_rd < 0 || cfg.align.lambda_pl < 0 ||
        cfg.align.lambda_rd + cfg.align.lambda_pl <= 0)
        fail("align.lambda_rd/lambda_pl", "must be >= 0 with positive sum");
    if (cfg.optimizer.lr < 0) fail("align.optimizer.lr", "must be >= 0");
    if (cfg.optimizer.epochs < 1) fail("align.optimizer.epochs", "must be >= 1");
    if (cfg.optimizer.batch < 1) fail("align.optimizer.batch", "must be >= 1");
    if (cfg.instr.h < 0) fail("instr.h", "must be >= 0");
    if (cfg.instr.fanout < 1) fail("instr.fanout", "must be >= 1");
    if (cfg.instr.kind != "graph_matching" && cfg.instr.kind != "traffic_task" &&
        cfg.instr.kind != "both")
        fail("instr.kind", "must be graph_matching, traffic_task or both");
    if (cfg.instr.rd_preview < 0) fail("instr.rd_preview", "must be >= 0");
    if (cfg.instr.pl_preview < 0) fail("instr.pl_preview", "must be >= 0");
    if (cfg.ood.bias != "none" && cfg.ood.bias != "proportional" &&
        cfg.ood.bias != "compositional")
        fail("ood.bias", "must be none, proportional or compositional");
    if (cfg.ood.per_class_n < 0) fail("ood.per_class_n", "must be >= 0");
    if (cfg.ood.train_fraction <= 0.0 || cfg.ood.train_fraction >= 1.0)
        fail("ood.train_fraction", "must be in (0,1)");
    if (cfg.ood.holdout_fraction <= 0.0 || cfg.ood.holdout_fraction >= 1.0)
        fail("ood.holdout_fraction", "must be in (0,1)");
    Ratio::parse(cfg.ood.ratio_train);
    Ratio::parse(cfg.ood.ratio_test);
}

}  // namespace trgkit
