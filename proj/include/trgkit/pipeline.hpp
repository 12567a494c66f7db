#pragma once

#include <map>
#include <string>
#include <vector>

#include "trgkit/config.hpp"
#include "trgkit/ood.hpp"

namespace trgkit {

// Parses every pcap, applies the filter, assembles flows per file, extracts
// features, merges and assigns ids in start-time order.
FlowSet flows_from_pcaps(const std::vector<std::string>& paths, const PipelineConfig& cfg,
                         const std::map<std::string, std::string>& label_by_source = {},
                         const std::string& default_label = "");

// JSONL with a leading {"meta": ...} line when meta_json is non-empty.
void save_flows_jsonl(const FlowSet& fs, const std::string& path, const std::string& meta_json);
FlowSet load_flows_jsonl(const std::string& path);

void dump_packets_jsonl(const std::vector<std::string>& pcap_paths, const PipelineConfig& cfg,
                        const std::string& out_path, const std::string& meta_json);

std::vector<TrafficRelationGraph> graphs_from_flows(FlowSet fs, const PipelineConfig& cfg);

// {"meta":..., "graphs":[{gamma_micros, nodes, bursts, edges}, ...]}
void save_graphs_json(const std::vector<TrafficRelationGraph>& graphs, const std::string& path,
                      const std::string& meta_json);
std::vector<TrafficRelationGraph> load_graphs_json(const std::string& path);
std::string graph_to_json(const TrafficRelationGraph& g);  // one TRG document

LabeledPool load_pool_jsonl(const std::string& path);
void save_pool_jsonl(const LabeledPool& pool, const std::string& path,
                     const std::string& meta_json);

// Mapping file: JSON array of {"path","class","component"}; one pool item per
// flow, features from the default extractor.
LabeledPool pool_from_pcap_map(const std::string& map_path, const PipelineConfig& cfg);

DatasetSplit build_split(const LabeledPool& pool, const PipelineConfig& cfg);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace trgkit
