#include "trgkit/align.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace trgkit {

namespace {

// Fixed encoder seeds; the encoders are frozen by contract.
constexpr uint64_t kGraphTokenSalt = 0x7452474b74474e53ULL;
constexpr uint64_t kGraphLenSalt = 0x7452474b744c454eULL;
constexpr uint64_t kRdBagSalt = 0x7452474b5244424cULL;
constexpr uint64_t kTrainSalt = 0x7452474b7e545246ULL;
constexpr uint64_t kHeadSalt = 0x7452474b68656164ULL;

void hash_into(Eigen::MatrixXd& m, Eigen::Index row, uint64_t salt, uint64_t key) {
    uint64_t h = hash_combine(salt, key);
    auto idx = static_cast<Eigen::Index>(h % static_cast<uint64_t>(m.cols()));
    m(row, idx) += (h >> 63) ? -1.0 : 1.0;
}

int length_bin(int32_t len, int bins) {
    double mag = std::abs(static_cast<double>(len));
    int b = static_cast<int>(std::floor(std::log2(1.0 + mag)));
    return std::min(b, bins - 1);
}

double softmax_ce_rows(const Eigen::MatrixXd& s) {
    const Eigen::Index n = s.rows();
    double total = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        double m = s.row(r).maxCoeff();
        double lse = m + std::log((s.row(r).array() - m).exp().sum());
        total += lse - s(r, r);
    }
    return total / static_cast<double>(n);
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& s) {
    Eigen::MatrixXd out(s.rows(), s.cols());
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
        double m = s.row(r).maxCoeff();
        Eigen::ArrayXd e = (s.row(r).array() - m).exp();
        out.row(r) = (e / e.sum()).matrix();
    }
    return out;
}

Eigen::MatrixXd uniform_matrix(DetRng& rng, Eigen::Index rows, Eigen::Index cols) {
    double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.real(-bound, bound);
    return m;
}

Eigen::VectorXd uniform_vector(DetRng& rng, Eigen::Index n, Eigen::Index fan_in) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.real(-bound, bound);
    return v;
}

// affine projection of row-normalized input: rows of a * w^T + b^T
Eigen::MatrixXd project(const Eigen::MatrixXd& a, const Eigen::MatrixXd& w,
                        const Eigen::VectorXd& b) {
    return (a * w.transpose()).rowwise() + b.transpose();
}

struct DimGrad {
    Eigen::MatrixXd dw1, dw2;
    Eigen::VectorXd db1, db2;
};

// Gradient of lambda/2 * (CE(S,y) + CE(S^T,y)) through one dimension.
double dim_loss_and_grad(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const DimProjector& proj, double tau, double lambda,
                         DimGrad& grad) {
    const double scale = std::exp(tau);
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd p1 = project(a, proj.w1, proj.b1);
    Eigen::MatrixXd p2 = project(b, proj.w2, proj.b2);
    Eigen::MatrixXd s = scale * (p1 * p2.transpose());

    double loss = 0.5 * lambda * (softmax_ce_rows(s) + softmax_ce_rows(s.transpose()));

    Eigen::MatrixXd gs = softmax_rows(s) + softmax_rows(s.transpose()).transpose();
    gs.diagonal().array() -= 2.0;
    gs *= 0.5 * lambda / static_cast<double>(n);

    Eigen::MatrixXd gp1 = scale * (gs * p2);
    Eigen::MatrixXd gp2 = scale * (gs.transpose() * p1);
    grad.dw1 = gp1.transpose() * a;
    grad.db1 = gp1.colwise().sum().transpose();
    grad.dw2 = gp2.transpose() * b;
    grad.db2 = gp2.colwise().sum().transpose();
    return loss;
}

void sgd_step(DimProjector& p, const DimProjector& g, double lr) {
    p.w1 -= lr * g.w1;
    p.b1 -= lr * g.b1;
    p.w2 -= lr * g.w2;
    p.b2 -= lr * g.b2;
}

}  // namespace

ProjectorParams init_params(const AlignmentConfig& cfg, uint64_t seed) {
    if (cfg.proj_dim < 1 || cfg.graph_dim < 1 || cfg.rd_dim < 1 || cfg.pl_dim < 2 ||
        cfg.pl_dim % 2 != 0)
        throw Error(errc::config, "BadDims",
                    "proj/graph/rd dims must be >= 1 and pl_dim even >= 2");
    if (cfg.lambda_rd < 0 || cfg.lambda_pl < 0 || cfg.lambda_rd + cfg.lambda_pl <= 0)
        throw Error(errc::config, "BadLambda", "lambda weights must be >= 0 with positive sum");

    DetRng rng(mix64(seed ^ 0x70726f6a696e6974ULL));
    ProjectorParams p;
    p.cfg = cfg;
    for (FeatureDim d : {FeatureDim::rd, FeatureDim::pl}) {
        int feat = d == FeatureDim::rd ? cfg.rd_dim : cfg.pl_dim;
        DimProjector& dp = p.dim(d);
        dp.w1 = uniform_matrix(rng, cfg.proj_dim, cfg.graph_dim);
        dp.b1 = uniform_vector(rng, cfg.proj_dim, cfg.graph_dim);
        dp.w2 = uniform_matrix(rng, cfg.proj_dim, feat);
        dp.b2 = uniform_vector(rng, cfg.proj_dim, feat);
    }
    p.head_w.resize(0, cfg.proj_dim);
    p.head_b.resize(0);
    return p;
}

Eigen::MatrixXd row_normalize(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out = m;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        double norm = m.row(r).norm();
        if (norm > 0.0) out.row(r) /= norm;
    }
    return out;
}

EmbeddingMatrix node_feature_embedding(const TrafficRelationGraph& g, int dim) {
    if (g.flows.empty()) throw Error(errc::input, "EmptyGraph", "graph has no nodes");
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.flows.size()), dim);
    for (size_t i = 0; i < g.flows.size(); ++i) {
        auto r = static_cast<Eigen::Index>(i);
        for (uint16_t t : g.flows[i].datagram_tokens) hash_into(x, r, kGraphTokenSalt, t);
        for (int32_t l : g.flows[i].directed_lengths)
            hash_into(x, r, kGraphLenSalt, static_cast<uint64_t>(static_cast<int64_t>(l)));
    }
    return x;
}

EmbeddingMatrix mean_aggregate(const EmbeddingMatrix& x,
                               const std::vector<std::vector<uint32_t>>& neighbors,
                               int rounds) {
    Eigen::MatrixXd h = x;
    for (int r = 0; r < rounds; ++r) {
        Eigen::MatrixXd next = h;
        for (size_t i = 0; i < neighbors.size(); ++i) {
            if (neighbors[i].empty()) continue;
            Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(h.cols());
            for (uint32_t j : neighbors[i]) mean += h.row(j);
            mean /= static_cast<double>(neighbors[i].size());
            next.row(static_cast<Eigen::Index>(i)) =
                0.5 * (h.row(static_cast<Eigen::Index>(i)) + mean);
        }
        h = std::move(next);
    }
    return h;
}

EmbeddingMatrix encode_graph(const TrafficRelationGraph& g, int rounds, int dim) {
    if (rounds < 0) throw Error(errc::config, "BadRounds", "rounds must be >= 0");
    return mean_aggregate(node_feature_embedding(g, dim), g.neighbor_lists(), rounds);
}

EmbeddingMatrix encode_flows(const std::vector<Flow>& flows, FeatureDim dim, int out_dim) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(flows.size()), out_dim);
    for (size_t i = 0; i < flows.size(); ++i) {
        auto r = static_cast<Eigen::Index>(i);
        if (dim == FeatureDim::rd) {
            for (uint16_t t : flows[i].datagram_tokens) hash_into(x, r, kRdBagSalt, t);
        } else {
            int bins = out_dim / 2;
            for (int32_t l : flows[i].directed_lengths) {
                int idx = length_bin(l, bins) + (l < 0 ? bins : 0);
                x(r, idx) += 1.0;
            }
        }
    }
    return x;
}

Eigen::MatrixXd similarity_matrix(const EmbeddingMatrix& H, const EmbeddingMatrix& N,
                                  const DimProjector& proj, double tau) {
    if (H.rows() != N.rows())
        throw Error(errc::input, "ShapeMismatch",
                    "H has " + std::to_string(H.rows()) + " rows, N has " +
                        std::to_string(N.rows()));
    Eigen::MatrixXd p1 = project(row_normalize(H), proj.w1, proj.b1);
    Eigen::MatrixXd p2 = project(row_normalize(N), proj.w2, proj.b2);
    return std::exp(tau) * (p1 * p2.transpose());
}

double alignment_loss(const std::vector<Eigen::MatrixXd>& sims,
                      const std::vector<double>& lambdas) {
    if (sims.size() != lambdas.size())
        throw Error(errc::input, "ShapeMismatch", "one lambda per similarity matrix");
    double loss = 0.0;
    for (size_t i = 0; i < sims.size(); ++i) {
        const auto& s = sims[i];
        if (s.rows() != s.cols())
            throw Error(errc::input, "ShapeMismatch", "similarity matrix must be square");
        if (!sims.empty() && s.rows() != sims[0].rows())
            throw Error(errc::input, "ShapeMismatch", "similarity matrices differ in size");
        loss += 0.5 * lambdas[i] * (softmax_ce_rows(s) + softmax_ce_rows(s.transpose()));
    }
    return loss;
}

AlignGradients loss_gradient(const ProjectorParams& params, const EmbeddingMatrix& H,
                             const EmbeddingMatrix& n_rd, const EmbeddingMatrix& n_pl) {
    Eigen::MatrixXd a = row_normalize(H);
    AlignGradients g;
    DimGrad grd, gpl;
    g.loss = dim_loss_and_grad(a, row_normalize(n_rd), params.rd, params.cfg.tau,
                               params.cfg.lambda_rd, grd);
    g.loss += dim_loss_and_grad(a, row_normalize(n_pl), params.pl, params.cfg.tau,
                                params.cfg.lambda_pl, gpl);
    g.rd = DimProjector{grd.dw1, grd.db1, grd.dw2, grd.db2};
    g.pl = DimProjector{gpl.dw1, gpl.db1, gpl.dw2, gpl.db2};
    return g;
}

namespace {

struct GraphEncoding {
    Eigen::MatrixXd a;     // row-normalized graph encoding
    Eigen::MatrixXd n_rd;  // raw flow encodings (normalized per batch)
    Eigen::MatrixXd n_pl;
};

GraphEncoding encode_for_training(const TrafficRelationGraph& g, const AlignmentConfig& cfg) {
    GraphEncoding e;
    e.a = encode_graph(g, cfg.rounds, cfg.graph_dim);
    e.n_rd = encode_flows(g.flows, FeatureDim::rd, cfg.rd_dim);
    e.n_pl = encode_flows(g.flows, FeatureDim::pl, cfg.pl_dim);
    return e;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<uint32_t>& idx,
                          size_t begin, size_t end) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(end - begin), m.cols());
    for (size_t i = begin; i < end; ++i)
        out.row(static_cast<Eigen::Index>(i - begin)) = m.row(idx[i]);
    return out;
}

}  // namespace

TrainResult train_projector(const std::vector<TrafficRelationGraph>& graphs,
                            const AlignmentConfig& cfg, const OptimizerConfig& opt,
                            uint64_t seed) {
    if (graphs.empty())
        throw Error(errc::input, "Degenerate", "no graphs to train on");
    if (opt.epochs < 1 || opt.batch < 1)
        throw Error(errc::config, "BadOptimizer", "epochs and batch must be >= 1");

    bool usable = opt.batch >= 2 &&
                  std::any_of(graphs.begin(), graphs.end(),
                              [](const TrafficRelationGraph& g) { return g.node_count() >= 2; });
    if (!usable)
        throw Error(errc::input, "Degenerate",
                    "every batch would hold a single node; contrastive loss needs n >= 2");

    std::vector<GraphEncoding> enc;
    enc.reserve(graphs.size());
    for (const auto& g : graphs) enc.push_back(encode_for_training(g, cfg));

    TrainResult res;
    res.params = init_params(cfg, seed);
    DetRng rng(hash_combine(seed, kTrainSalt));

    std::vector<uint32_t> graph_order(graphs.size());
    std::iota(graph_order.begin(), graph_order.end(), 0u);

    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        rng.shuffle(graph_order);
        double loss_sum = 0.0;
        size_t n_batches = 0;
        for (uint32_t gi : graph_order) {
            const auto& e = enc[gi];
            auto n = static_cast<uint32_t>(e.a.rows());
            std::vector<uint32_t> order(n);
            std::iota(order.begin(), order.end(), 0u);
            rng.shuffle(order);
            for (size_t b = 0; b < order.size(); b += opt.batch) {
                size_t end = std::min(order.size(), b + static_cast<size_t>(opt.batch));
                if (end - b < 2) continue;  // singleton batches carry no signal
                Eigen::MatrixXd hb = take_rows(e.a, order, b, end);
                Eigen::MatrixXd rb = take_rows(e.n_rd, order, b, end);
                Eigen::MatrixXd pb = take_rows(e.n_pl, order, b, end);
                AlignGradients g = loss_gradient(res.params, hb, rb, pb);
                sgd_step(res.params.rd, g.rd, opt.lr);
                sgd_step(res.params.pl, g.pl, opt.lr);
                loss_sum += g.loss;
                ++n_batches;
            }
        }
        if (n_batches == 0)
            throw Error(errc::input, "Degenerate", "no trainable batches this epoch");
        res.align_trace.push_back(loss_sum / static_cast<double>(n_batches));
    }
    return res;
}

namespace {

Eigen::VectorXd graph_mean_encoding(const TrafficRelationGraph& g, const AlignmentConfig& cfg) {
    Eigen::MatrixXd a = row_normalize(encode_graph(g, cfg.rounds, cfg.graph_dim));
    return a.colwise().mean().transpose();
}

}  // namespace

void train_task_head(ProjectorParams& params,
                     const std::vector<TrafficRelationGraph>& graphs,
                     const OptimizerConfig& opt, uint64_t seed,
                     std::vector<double>* trace) {
    struct Sample {
        Eigen::VectorXd a_mean;  // mean row of norm(H); z = w1 * a_mean + b1
        int cls = 0;
    };
    std::vector<std::string> classes;
    std::vector<std::pair<size_t, std::string>> labeled;
    for (size_t i = 0; i < graphs.size(); ++i) {
        std::string l = graphs[i].label();
        if (!l.empty()) {
            labeled.emplace_back(i, l);
            classes.push_back(l);
        }
    }
    if (labeled.empty())
        throw Error(errc::input, "NoLabels", "task training needs labeled graphs");
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    std::vector<Sample> samples;
    samples.reserve(labeled.size());
    for (const auto& [gi, label] : labeled) {
        Sample s;
        s.a_mean = graph_mean_encoding(graphs[gi], params.cfg);
        s.cls = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), label) -
                                 classes.begin());
        samples.push_back(std::move(s));
    }

    params.classes = classes;
    DetRng rng(hash_combine(seed, kHeadSalt));
    auto c = static_cast<Eigen::Index>(classes.size());
    params.head_w = uniform_matrix(rng, c, params.cfg.proj_dim);
    params.head_b = uniform_vector(rng, c, params.cfg.proj_dim);

    std::vector<uint32_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0u);

    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        size_t n_batches = 0;
        for (size_t b = 0; b < order.size(); b += opt.batch) {
            size_t end = std::min(order.size(), b + static_cast<size_t>(opt.batch));
            double inv = 1.0 / static_cast<double>(end - b);
            Eigen::MatrixXd dhw = Eigen::MatrixXd::Zero(params.head_w.rows(), params.head_w.cols());
            Eigen::VectorXd dhb = Eigen::VectorXd::Zero(params.head_b.size());
            Eigen::MatrixXd dw1 = Eigen::MatrixXd::Zero(params.rd.w1.rows(), params.rd.w1.cols());
            Eigen::VectorXd db1 = Eigen::VectorXd::Zero(params.rd.b1.size());
            double batch_loss = 0.0;
            for (size_t k = b; k < end; ++k) {
                const Sample& s = samples[order[k]];
                Eigen::VectorXd z = params.rd.w1 * s.a_mean + params.rd.b1;
                Eigen::VectorXd logits = params.head_w * z + params.head_b;
                double m = logits.maxCoeff();
                Eigen::ArrayXd e = (logits.array() - m).exp();
                double lse = m + std::log(e.sum());
                batch_loss += lse - logits(s.cls);
                Eigen::VectorXd dlogits = (e / e.sum()).matrix();
                dlogits(s.cls) -= 1.0;
                dhw += inv * (dlogits * z.transpose());
                dhb += inv * dlogits;
                Eigen::VectorXd dz = params.head_w.transpose() * dlogits;
                dw1 += inv * (dz * s.a_mean.transpose());
                db1 += inv * dz;
            }
            params.head_w -= opt.lr * dhw;
            params.head_b -= opt.lr * dhb;
            params.rd.w1 -= opt.lr * dw1;
            params.rd.b1 -= opt.lr * db1;
            loss_sum += batch_loss * inv;
            ++n_batches;
        }
        if (trace) trace->push_back(loss_sum / static_cast<double>(n_batches));
    }
}

Classification surrogate_classify(const ProjectorParams& params,
                                  const TrafficRelationGraph& g) {
    if (g.flows.empty()) throw Error(errc::input, "EmptyGraph", "cannot classify an empty graph");
    if (params.classes.empty())
        throw Error(errc::config, "MissingHead", "params carry no trained task head");

    Eigen::VectorXd a_mean = graph_mean_encoding(g, params.cfg);
    Eigen::VectorXd z = params.rd.w1 * a_mean + params.rd.b1;
    Eigen::VectorXd logits = params.head_w * z + params.head_b;
    double m = logits.maxCoeff();
    Eigen::ArrayXd e = (logits.array() - m).exp();
    Eigen::VectorXd probs = (e / e.sum()).matrix();

    Classification out;
    int best = 0;
    for (int i = 1; i < probs.size(); ++i)
        if (probs(i) > probs(best)) best = i;
    out.label = params.classes[static_cast<size_t>(best)];
    out.scores.assign(probs.data(), probs.data() + probs.size());
    return out;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
    return flat;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
    auto flat = j.get<std::vector<double>>();
    if (flat.size() != static_cast<size_t>(rows * cols))
        throw Error(errc::input, "BadCheckpoint", "weight array size mismatch");
    Eigen::MatrixXd m(rows, cols);
    size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[k++];
    return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, Eigen::Index n) {
    auto flat = j.get<std::vector<double>>();
    if (flat.size() != static_cast<size_t>(n))
        throw Error(errc::input, "BadCheckpoint", "bias array size mismatch");
    return Eigen::Map<const Eigen::VectorXd>(flat.data(), n);
}

}  // namespace

std::string params_to_json(const ProjectorParams& params, uint64_t seed,
                           const std::vector<double>& align_trace,
                           const std::vector<double>& task_trace) {
    const AlignmentConfig& c = params.cfg;
    nlohmann::json j;
    j["config"] = {
        {"tau", c.tau},           {"lambda_rd", c.lambda_rd}, {"lambda_pl", c.lambda_pl},
        {"proj_dim", c.proj_dim}, {"graph_dim", c.graph_dim}, {"rd_dim", c.rd_dim},
        {"pl_dim", c.pl_dim},     {"rounds", c.rounds},
    };
    j["projectors"] = {
        {"rd",
         {{"w1", matrix_to_json(params.rd.w1)},
          {"b1", vector_to_json(params.rd.b1)},
          {"w2", matrix_to_json(params.rd.w2)},
          {"b2", vector_to_json(params.rd.b2)}}},
        {"pl",
         {{"w1", matrix_to_json(params.pl.w1)},
          {"b1", vector_to_json(params.pl.b1)},
          {"w2", matrix_to_json(params.pl.w2)},
          {"b2", vector_to_json(params.pl.b2)}}},
    };
    j["head"] = {{"w", matrix_to_json(params.head_w)}, {"b", vector_to_json(params.head_b)}};
    j["classes"] = params.classes;
    j["seed"] = seed;
    j["epochs"] = align_trace.size();
    j["align_trace"] = align_trace;
    j["task_trace"] = task_trace;
    return j.dump(2) + "\n";
}

Checkpoint params_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Checkpoint ck;
    const auto& c = j.at("config");
    ck.params.cfg.tau = c.at("tau").get<double>();
    ck.params.cfg.lambda_rd = c.at("lambda_rd").get<double>();
    ck.params.cfg.lambda_pl = c.at("lambda_pl").get<double>();
    ck.params.cfg.proj_dim = c.at("proj_dim").get<int>();
    ck.params.cfg.graph_dim = c.at("graph_dim").get<int>();
    ck.params.cfg.rd_dim = c.at("rd_dim").get<int>();
    ck.params.cfg.pl_dim = c.at("pl_dim").get<int>();
    ck.params.cfg.rounds = c.at("rounds").get<int>();

    auto p = static_cast<Eigen::Index>(ck.params.cfg.proj_dim);
    auto dh = static_cast<Eigen::Index>(ck.params.cfg.graph_dim);
    const auto& pj = j.at("projectors");
    for (FeatureDim d : {FeatureDim::rd, FeatureDim::pl}) {
        const auto& src = pj.at(d == FeatureDim::rd ? "rd" : "pl");
        auto dn = static_cast<Eigen::Index>(d == FeatureDim::rd ? ck.params.cfg.rd_dim
                                                                : ck.params.cfg.pl_dim);
        DimProjector& dp = ck.params.dim(d);
        dp.w1 = matrix_from_json(src.at("w1"), p, dh);
        dp.b1 = vector_from_json(src.at("b1"), p);
        dp.w2 = matrix_from_json(src.at("w2"), p, dn);
        dp.b2 = vector_from_json(src.at("b2"), p);
    }
    ck.params.classes = j.at("classes").get<std::vector<std::string>>();
    auto nc = static_cast<Eigen::Index>(ck.params.classes.size());
    ck.params.head_w = matrix_from_json(j.at("head").at("w"), nc, p);
    ck.params.head_b = vector_from_json(j.at("head").at("b"), nc);
    ck.seed = j.at("seed").get<uint64_t>();
    ck.align_trace = j.at("align_trace").get<std::vector<double>>();
    ck.task_trace = j.at("task_trace").get<std::vector<double>>();
    return ck;
}

}  // namespace trgkit
