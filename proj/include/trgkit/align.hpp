#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "trgkit/trg.hpp"

namespace trgkit {

using EmbeddingMatrix = Eigen::MatrixXd;

enum class FeatureDim : int { rd = 0, pl = 1 };

struct AlignmentConfig {
    double tau = 0.0;        // similarity scale is exp(tau)
    double lambda_rd = 1.0;  // per-dimension loss weights
    double lambda_pl = 1.0;
    int proj_dim = 32;
    int graph_dim = 64;  // d_H
    int rd_dim = 64;     // d_N for the datagram-token dimension
    int pl_dim = 32;     // d_N for the packet-length dimension (even, >= 2)
    int rounds = 2;      // neighbor-aggregation rounds in the graph encoder
};

struct OptimizerConfig {
    double lr = 2e-3;
    int epochs = 3;
    int batch = 2;
};

// Affine pair (g^1, g^2) for one feature dimension.
struct DimProjector {
    Eigen::MatrixXd w1;  // proj_dim x graph_dim
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;  // proj_dim x feature_dim
    Eigen::VectorXd b2;
};

struct ProjectorParams {
    AlignmentConfig cfg;
    DimProjector rd, pl;
    Eigen::MatrixXd head_w;            // n_classes x proj_dim
    Eigen::VectorXd head_b;
    std::vector<std::string> classes;  // head output order

    const DimProjector& dim(FeatureDim d) const { return d == FeatureDim::rd ? rd : pl; }
    DimProjector& dim(FeatureDim d) { return d == FeatureDim::rd ? rd : pl; }
};

ProjectorParams init_params(const AlignmentConfig& cfg, uint64_t seed);

// Row-wise L2 normalization; zero rows pass through unchanged.
Eigen::MatrixXd row_normalize(const Eigen::MatrixXd& m);

// Frozen deterministic encoders. Node features are hashed into graph_dim
// dims, then `rounds` iterations of h <- (h + mean of neighbor h) / 2.
EmbeddingMatrix encode_graph(const TrafficRelationGraph& g, int rounds, int dim);
EmbeddingMatrix node_feature_embedding(const TrafficRelationGraph& g, int dim);
EmbeddingMatrix mean_aggregate(const EmbeddingMatrix& x,
                               const std::vector<std::vector<uint32_t>>& neighbors,
                               int rounds);

EmbeddingMatrix encode_flows(const std::vector<Flow>& flows, FeatureDim dim, int out_dim);

// Im_i = (g_i^1(norm(H)) . g_i^2(norm(N))^T) * exp(tau)
Eigen::MatrixXd similarity_matrix(const EmbeddingMatrix& H, const EmbeddingMatrix& N,
                                  const DimProjector& proj, double tau);

// sum_i lambda_i/2 * (CE(S_i, y) + CE(S_i^T, y)) with y = row index.
double alignment_loss(const std::vector<Eigen::MatrixXd>& sims,
                      const std::vector<double>& lambdas);

struct AlignGradients {
    DimProjector rd, pl;
    double loss = 0.0;
};

// Analytic gradient of alignment_loss w.r.t. projector weights; encoders are
// frozen and receive none.
AlignGradients loss_gradient(const ProjectorParams& params, const EmbeddingMatrix& H,
                             const EmbeddingMatrix& n_rd, const EmbeddingMatrix& n_pl);

struct TrainResult {
    ProjectorParams params;
    std::vector<double> align_trace;  // per-epoch mean alignment loss
    std::vector<double> task_trace;   // per-epoch mean task CE (when head trained)
};

// Stage 1: mini-batch gradient descent on the alignment loss over node
// batches of each graph. Deterministic given seed.
TrainResult train_projector(const std::vector<TrafficRelationGraph>& graphs,
                            const AlignmentConfig& cfg, const OptimizerConfig& opt,
                            uint64_t seed);

// Stage 2: fits the task head (and the inherited RD graph projector) on
// labeled graphs with softmax cross-entropy.
void train_task_head(ProjectorParams& params,
                     const std::vector<TrafficRelationGraph>& graphs,
                     const OptimizerConfig& opt, uint64_t seed,
                     std::vector<double>* trace = nullptr);

struct Classification {
    std::string label;
    std::vector<double> scores;  // softmax over params.classes order
};

// label = argmax head(mean over nodes of g_rd^1(norm(encode_graph(g))))
Classification surrogate_classify(const ProjectorParams& params,
                                  const TrafficRelationGraph& g);

// Checkpoint document; loading then saving reproduces the bytes exactly.
std::string params_to_json(const ProjectorParams& params, uint64_t seed,
                           const std::vector<double>& align_trace,
                           const std::vector<double>& task_trace);
struct Checkpoint {
    ProjectorParams params;
    uint64_t seed = 0;
    std::vector<double> align_trace;
    std::vector<double> task_trace;
};
Checkpoint params_from_json(const std::string& text);

}  // namespace trgkit
