#include "hypersona/hgnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypersona {

DegreeData degrees(const Hypergraph& graph) {
    graph.validate();
    DegreeData deg;
    deg.d_v.assign(static_cast<std::size_t>(graph.num_nodes), 0.0);
    deg.d_e.assign(graph.edges.size(), 0.0);
    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
        for (int u : graph.edges[k].members) {
            deg.d_e[k] += graph.node_weights[static_cast<std::size_t>(u)];
            deg.d_v[static_cast<std::size_t>(u)] += graph.edge_weights[k];
        }
    }
    return deg;
}

PropagationOperator::PropagationOperator(int num_nodes, std::vector<std::vector<int>> edge_members,
                                         std::vector<double> node_scale,
                                         std::vector<double> edge_scale)
    : num_nodes_(num_nodes),
      edge_members_(std::move(edge_members)),
      node_scale_(std::move(node_scale)),
      edge_scale_(std::move(edge_scale)) {
    node_edges_.assign(static_cast<std::size_t>(num_nodes_), {});
    for (std::size_t k = 0; k < edge_members_.size(); ++k)
        for (int u : edge_members_[k]) node_edges_[static_cast<std::size_t>(u)].push_back(static_cast<int>(k));
}

Matrix PropagationOperator::apply(const Matrix& x) const {
    if (static_cast<int>(x.rows()) != num_nodes_)
        throw InvalidArgument("propagation apply: row count != num_nodes");
    const std::size_t d = x.cols();

    // Node -> hyperedge aggregation with the left diagonal scaling folded in.
    Matrix edge_sum(edge_members_.size(), d);
    for (std::size_t k = 0; k < edge_members_.size(); ++k) {
        double* erow = edge_sum.row(k);
        for (int u : edge_members_[k]) {
            const double s = node_scale_[static_cast<std::size_t>(u)];
            if (s == 0.0) continue;
            const double* xrow = x.row(static_cast<std::size_t>(u));
            for (std::size_t j = 0; j < d; ++j) erow[j] += s * xrow[j];
        }
        const double es = edge_scale_[k];
        for (std::size_t j = 0; j < d; ++j) erow[j] *= es;
    }

    // Hyperedge -> node aggregation with the right diagonal scaling.
    Matrix out(static_cast<std::size_t>(num_nodes_), d);
    for (int u = 0; u < num_nodes_; ++u) {
        const double s = node_scale_[static_cast<std::size_t>(u)];
        if (s == 0.0) continue;
        double* orow = out.row(static_cast<std::size_t>(u));
        for (int k : node_edges_[static_cast<std::size_t>(u)]) {
            const double* erow = edge_sum.row(static_cast<std::size_t>(k));
            for (std::size_t j = 0; j < d; ++j) orow[j] += s * erow[j];
        }
    }
    return out;
}

Matrix PropagationOperator::dense() const {
    Matrix eye(static_cast<std::size_t>(num_nodes_), static_cast<std::size_t>(num_nodes_));
    for (int i = 0; i < num_nodes_; ++i) eye(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = 1.0;
    return apply(eye);
}

Matrix PropagationOperator::laplacian_dense() const {
    Matrix lap = dense();
    for (std::size_t i = 0; i < lap.rows(); ++i)
        for (std::size_t j = 0; j < lap.cols(); ++j) lap(i, j) = (i == j ? 1.0 : 0.0) - lap(i, j);
    return lap;
}

PropagationOperator propagation_operator(const Hypergraph& graph) {
    const DegreeData deg = degrees(graph);
    std::vector<double> node_scale(static_cast<std::size_t>(graph.num_nodes), 0.0);
    for (int u = 0; u < graph.num_nodes; ++u) {
        const double dv = deg.d_v[static_cast<std::size_t>(u)];
        // Pseudo-inverse convention: isolated nodes get a zero scaling.
        if (dv > 0.0)
            node_scale[static_cast<std::size_t>(u)] =
                graph.node_weights[static_cast<std::size_t>(u)] / std::sqrt(dv);
    }
    std::vector<double> edge_scale(graph.edges.size(), 0.0);
    std::vector<std::vector<int>> members(graph.edges.size());
    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
        edge_scale[k] = graph.edge_weights[k] / deg.d_e[k];
        members[k] = graph.edges[k].members;
    }
    return PropagationOperator(graph.num_nodes, std::move(members), std::move(node_scale),
                               std::move(edge_scale));
}

BatchNormState BatchNormState::identity(std::size_t dim) {
    BatchNormState bn;
    bn.scale.assign(dim, 1.0);
    bn.shift.assign(dim, 0.0);
    bn.running_mean.assign(dim, 0.0);
    bn.running_var.assign(dim, 1.0);
    return bn;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw InvalidArgument("train config: learning_rate must be > 0");
    if (weight_decay < 0.0) throw InvalidArgument("train config: weight_decay must be >= 0");
    if (max_epochs < 0) throw InvalidArgument("train config: max_epochs must be >= 0");
    if (layers < 1) throw InvalidArgument("train config: layers must be >= 1");
    if (hidden_dim < 1) throw InvalidArgument("train config: hidden_dim must be >= 1");
    if (focal_gamma < 0.0) throw InvalidArgument("train config: focal gamma must be >= 0");
    if (!(bn_momentum > 0.0) || bn_momentum >= 1.0)
        throw InvalidArgument("train config: bn_momentum must be in (0, 1)");
    if (patience < 0) throw InvalidArgument("train config: patience must be >= 0");
}

namespace {

Matrix uniform_fan_in(std::size_t rows, std::size_t cols, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-bound, bound);
    return m;
}

}  // namespace

ModelParams init_params(std::size_t input_dim, int num_classes, const TrainConfig& config) {
    config.validate();
    if (input_dim == 0) throw InvalidArgument("init_params: input dimension must be >= 1");
    if (num_classes < 2) throw InvalidArgument("init_params: need at least 2 classes");

    Rng rng(config.seed);
    ModelParams params;
    std::size_t d_in = input_dim;
    const auto hidden = static_cast<std::size_t>(config.hidden_dim);
    for (int l = 0; l < config.layers; ++l) {
        LayerParams layer;
        layer.theta = uniform_fan_in(d_in, hidden, rng);
        layer.bn = BatchNormState::identity(hidden);
        if (d_in != hidden) layer.skip_proj = uniform_fan_in(d_in, hidden, rng);
        params.layers.push_back(std::move(layer));
        d_in = hidden;
    }
    params.head_weight = uniform_fan_in(hidden, static_cast<std::size_t>(num_classes), rng);
    params.head_bias.assign(static_cast<std::size_t>(num_classes), 0.0);
    return params;
}

std::pair<Matrix, Matrix> layer_forward(const PropagationOperator& op, const Matrix& x_in,
                                        LayerParams& params, Activation activation,
                                        bool batch_norm, double bn_momentum, bool training,
                                        bool update_running_stats, LayerCache* cache) {
    const std::size_t n = x_in.rows();
    const std::size_t d_out = params.theta.cols();
    if (x_in.cols() != params.theta.rows())
        throw InvalidArgument("layer_forward: input dim " + std::to_string(x_in.cols()) +
                              " != theta rows " + std::to_string(params.theta.rows()));

    Matrix aggregated = op.apply(x_in);
    Matrix z = matmul(aggregated, params.theta);

    Matrix pre_relu = z;
    Matrix xhat;
    std::vector<double> batch_mean, batch_inv_std;
    if (batch_norm) {
        xhat = Matrix(n, d_out);
        batch_mean.assign(d_out, 0.0);
        batch_inv_std.assign(d_out, 0.0);
        if (training) {
            // Batch statistics over the node dimension (population variance).
            std::vector<double> var(d_out, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d_out; ++j) batch_mean[j] += z(i, j);
            for (std::size_t j = 0; j < d_out; ++j) batch_mean[j] /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d_out; ++j) {
                    const double c = z(i, j) - batch_mean[j];
                    var[j] += c * c;
                }
            for (std::size_t j = 0; j < d_out; ++j) {
                var[j] /= static_cast<double>(n);
                batch_inv_std[j] = 1.0 / std::sqrt(var[j] + params.bn.eps);
            }
            if (update_running_stats) {
                for (std::size_t j = 0; j < d_out; ++j) {
                    params.bn.running_mean[j] =
                        bn_momentum * params.bn.running_mean[j] + (1.0 - bn_momentum) * batch_mean[j];
                    params.bn.running_var[j] =
                        bn_momentum * params.bn.running_var[j] + (1.0 - bn_momentum) * var[j];
                }
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d_out; ++j) {
                    xhat(i, j) = (z(i, j) - batch_mean[j]) * batch_inv_std[j];
                    pre_relu(i, j) = params.bn.scale[j] * xhat(i, j) + params.bn.shift[j];
                }
        } else {
            for (std::size_t j = 0; j < d_out; ++j)
                batch_inv_std[j] = 1.0 / std::sqrt(params.bn.running_var[j] + params.bn.eps);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d_out; ++j) {
                    xhat(i, j) = (z(i, j) - params.bn.running_mean[j]) * batch_inv_std[j];
                    pre_relu(i, j) = params.bn.scale[j] * xhat(i, j) + params.bn.shift[j];
                }
        }
    }

    // ReLU(BatchNorm(Z)) + skip(X_in)
    Matrix pre_sigma(n, d_out);
    if (params.skip_proj.has_value()) {
        pre_sigma = matmul(x_in, *params.skip_proj);
    } else {
        if (x_in.cols() != d_out)
            throw InvalidArgument("layer_forward: identity skip needs matching dims");
        pre_sigma = x_in;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d_out; ++j) pre_sigma(i, j) += std::max(0.0, pre_relu(i, j));

    Matrix x_out = pre_sigma;
    if (activation == Activation::RELU)
        for (double& v : x_out.data()) v = std::max(0.0, v);

    if (cache) {
        cache->x_in = x_in;
        cache->aggregated = std::move(aggregated);
        cache->z = z;
        cache->xhat = std::move(xhat);
        cache->pre_relu = std::move(pre_relu);
        cache->pre_sigma = std::move(pre_sigma);
        cache->batch_mean = std::move(batch_mean);
        cache->batch_inv_std = std::move(batch_inv_std);
    }
    return {std::move(z), std::move(x_out)};
}

namespace {

Matrix softmax_rows(const Matrix& logits) {
    Matrix probs(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < logits.cols(); ++j) mx = std::max(mx, logits(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            probs(i, j) = std::exp(logits(i, j) - mx);
            sum += probs(i, j);
        }
        for (std::size_t j = 0; j < logits.cols(); ++j) probs(i, j) /= sum;
    }
    return probs;
}

}  // namespace

Matrix forward(const PropagationOperator& op, const FeatureMatrix& x0, ModelParams& params,
               const TrainConfig& config, bool training, bool update_running_stats,
               ForwardCache* cache) {
    if (static_cast<int>(x0.rows()) != op.num_nodes())
        throw InvalidArgument("forward: feature rows != graph nodes");
    if (cache) cache->layers.resize(params.layers.size());

    Matrix x = x0;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        LayerCache* lc = cache ? &cache->layers[l] : nullptr;
        auto [z, x_out] = layer_forward(op, x, params.layers[l], config.activation,
                                        config.batch_norm, config.bn_momentum, training,
                                        update_running_stats, lc);
        (void)z;
        x = std::move(x_out);
        if (!x.all_finite())
            throw Error("forward: non-finite values after layer " + std::to_string(l));
    }

    Matrix logits = matmul(x, params.head_weight);
    for (std::size_t i = 0; i < logits.rows(); ++i)
        for (std::size_t j = 0; j < logits.cols(); ++j) logits(i, j) += params.head_bias[j];
    if (!logits.all_finite()) throw Error("forward: non-finite values in classifier head");

    Matrix probs = softmax_rows(logits);
    if (cache) {
        cache->features_out = std::move(x);
        cache->probs = probs;
    }
    return probs;
}

FocalLossResult focal_loss(const Matrix& probs, const std::vector<int>& labels,
                           const std::vector<double>& class_weights, double gamma) {
    if (gamma < 0.0) throw InvalidArgument("focal_loss: gamma must be >= 0");
    const std::size_t m = probs.rows();
    const std::size_t p = probs.cols();
    if (labels.size() != m) throw InvalidArgument("focal_loss: label count != probability rows");
    if (class_weights.size() != p)
        throw InvalidArgument("focal_loss: class weight count != number of classes");
    if (m == 0) throw InvalidArgument("focal_loss: no labeled rows");

    constexpr double kLogClamp = 1e-12;
    FocalLossResult result;
    result.dscores = Matrix(m, p);
    const double inv_m = 1.0 / static_cast<double>(m);

    for (std::size_t i = 0; i < m; ++i) {
        const int t = labels[i];
        if (t < 0 || static_cast<std::size_t>(t) >= p)
            throw InvalidArgument("focal_loss: label out of range at row " + std::to_string(i));
        const double w = class_weights[static_cast<std::size_t>(t)];
        const double pt = probs(i, static_cast<std::size_t>(t));
        const double log_pt = std::log(std::max(pt, kLogClamp));
        const double one_minus = 1.0 - pt;
        const double focal = gamma == 0.0 ? 1.0 : std::pow(std::max(one_minus, 0.0), gamma);
        result.loss += -w * focal * log_pt;

        // d loss_i / d p_t through both the focal factor and the clamped log.
        double d_focal = 0.0;
        if (gamma > 0.0 && one_minus > 0.0)
            d_focal = -gamma * std::pow(one_minus, gamma - 1.0) * log_pt;
        const double d_log = focal * (pt > kLogClamp ? 1.0 / pt : 0.0);
        const double dldp = -w * (d_focal + d_log);

        // Chain through the softmax Jacobian: dp_t/dz_j = p_t (delta_tj - p_j).
        const double* prow = probs.row(i);
        double* grow = result.dscores.row(i);
        for (std::size_t j = 0; j < p; ++j)
            grow[j] = inv_m * dldp * pt * ((static_cast<std::size_t>(t) == j ? 1.0 : 0.0) - prow[j]);
    }
    result.loss *= inv_m;
    return result;
}

std::vector<double> class_weights(const std::vector<int>& train_labels, int num_classes) {
    if (train_labels.empty()) throw InvalidArgument("class_weights: empty training labels");
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (int label : train_labels) {
        if (label < 0 || label >= num_classes)
            throw InvalidArgument("class_weights: label out of range");
        counts[static_cast<std::size_t>(label)] += 1;
    }
    const double n = static_cast<double>(train_labels.size());
    std::vector<double> weights(static_cast<std::size_t>(num_classes), 0.0);
    for (int c = 0; c < num_classes; ++c)
        weights[static_cast<std::size_t>(c)] =
            n / (static_cast<double>(num_classes) * std::max(counts[static_cast<std::size_t>(c)], 1));
    return weights;
}

int argmax_row(const Matrix& m, std::size_t row) {
    int best = 0;
    double best_v = m(row, 0);
    for (std::size_t j = 1; j < m.cols(); ++j)
        if (m(row, j) > best_v) {
            best_v = m(row, j);
            best = static_cast<int>(j);
        }
    return best;
}

double accuracy_on(const Matrix& probs, const std::vector<int>& labels,
                   const std::vector<int>& ids) {
    if (ids.empty()) return 0.0;
    int correct = 0;
    for (int id : ids)
        if (argmax_row(probs, static_cast<std::size_t>(id)) == labels[static_cast<std::size_t>(id)])
            ++correct;
    return static_cast<double>(correct) / static_cast<double>(ids.size());
}

namespace {

// Gradients share the ModelParams layout; running BN stats stay unused.
ModelParams zeros_like(const ModelParams& params) {
    ModelParams g;
    for (const auto& layer : params.layers) {
        LayerParams gl;
        gl.theta = Matrix(layer.theta.rows(), layer.theta.cols());
        gl.bn = BatchNormState::identity(layer.bn.scale.size());
        std::fill(gl.bn.scale.begin(), gl.bn.scale.end(), 0.0);
        if (layer.skip_proj)
            gl.skip_proj = Matrix(layer.skip_proj->rows(), layer.skip_proj->cols());
        g.layers.push_back(std::move(gl));
    }
    g.head_weight = Matrix(params.head_weight.rows(), params.head_weight.cols());
    g.head_bias.assign(params.head_bias.size(), 0.0);
    return g;
}

// Flat list of the trainable coordinates (BN running stats excluded).
struct ParamView {
    std::vector<std::pair<double*, std::size_t>> segments;
    std::size_t total = 0;

    void add(double* p, std::size_t len) {
        segments.emplace_back(p, len);
        total += len;
    }

    double& coord(std::size_t flat) {
        for (auto& [p, len] : segments) {
            if (flat < len) return p[flat];
            flat -= len;
        }
        throw InvalidArgument("parameter index out of range");
    }
};

ParamView view_of(ModelParams& params) {
    ParamView v;
    for (auto& layer : params.layers) {
        v.add(layer.theta.data().data(), layer.theta.data().size());
        v.add(layer.bn.scale.data(), layer.bn.scale.size());
        v.add(layer.bn.shift.data(), layer.bn.shift.size());
        if (layer.skip_proj) v.add(layer.skip_proj->data().data(), layer.skip_proj->data().size());
    }
    v.add(params.head_weight.data().data(), params.head_weight.data().size());
    v.add(params.head_bias.data(), params.head_bias.size());
    return v;
}

ModelParams backward(const PropagationOperator& op, const ModelParams& params,
                     const TrainConfig& config, const ForwardCache& cache,
                     const Matrix& dlogits) {
    ModelParams grads = zeros_like(params);

    // Classifier head.
    grads.head_weight = matmul_at_b(cache.features_out, dlogits);
    for (std::size_t i = 0; i < dlogits.rows(); ++i)
        for (std::size_t j = 0; j < dlogits.cols(); ++j) grads.head_bias[j] += dlogits(i, j);
    Matrix dx = matmul_a_bt(dlogits, params.head_weight);

    for (int l = static_cast<int>(params.layers.size()) - 1; l >= 0; --l) {
        const LayerCache& lc = cache.layers[static_cast<std::size_t>(l)];
        const LayerParams& lp = params.layers[static_cast<std::size_t>(l)];
        LayerParams& gl = grads.layers[static_cast<std::size_t>(l)];
        const std::size_t n = lc.pre_sigma.rows();
        const std::size_t d_out = lc.pre_sigma.cols();

        // sigma
        Matrix ds = dx;
        if (config.activation == Activation::RELU)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d_out; ++j)
                    if (lc.pre_sigma(i, j) <= 0.0) ds(i, j) = 0.0;

        // skip path
        Matrix dx_in;
        if (lp.skip_proj) {
            *gl.skip_proj = matmul_at_b(lc.x_in, ds);
            dx_in = matmul_a_bt(ds, *lp.skip_proj);
        } else {
            dx_in = ds;
        }

        // inner ReLU
        Matrix db = ds;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d_out; ++j)
                if (lc.pre_relu(i, j) <= 0.0) db(i, j) = 0.0;

        // batch norm (training statistics)
        Matrix dz;
        if (config.batch_norm) {
            std::vector<double> sum_dxhat(d_out, 0.0), sum_dxhat_xhat(d_out, 0.0);
            Matrix dxhat(n, d_out);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d_out; ++j) {
                    gl.bn.scale[j] += db(i, j) * lc.xhat(i, j);
                    gl.bn.shift[j] += db(i, j);
                    dxhat(i, j) = db(i, j) * lp.bn.scale[j];
                    sum_dxhat[j] += dxhat(i, j);
                    sum_dxhat_xhat[j] += dxhat(i, j) * lc.xhat(i, j);
                }
            dz = Matrix(n, d_out);
            const double inv_n = 1.0 / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d_out; ++j)
                    dz(i, j) = lc.batch_inv_std[j] * inv_n *
                               (static_cast<double>(n) * dxhat(i, j) - sum_dxhat[j] -
                                lc.xhat(i, j) * sum_dxhat_xhat[j]);
        } else {
            dz = std::move(db);
        }

        // Z = (P X) Theta
        gl.theta = matmul_at_b(lc.aggregated, dz);
        Matrix d_agg = matmul_a_bt(dz, lp.theta);
        add_inplace(dx_in, op.apply(d_agg));  // P is symmetric
        dx = std::move(dx_in);
    }
    return grads;
}

struct AdamState {
    ModelParams m;
    ModelParams v;
    int t = 0;
};

void adam_step(ModelParams& params, ModelParams& grads, AdamState& state,
               const TrainConfig& config) {
    state.t += 1;
    ParamView pv = view_of(params);
    ParamView gv = view_of(grads);
    ParamView mv = view_of(state.m);
    ParamView vv = view_of(state.v);
    const double bc1 = 1.0 - std::pow(config.adam_beta1, state.t);
    const double bc2 = 1.0 - std::pow(config.adam_beta2, state.t);
    for (std::size_t seg = 0; seg < pv.segments.size(); ++seg) {
        auto [p, len] = pv.segments[seg];
        double* g = gv.segments[seg].first;
        double* m = mv.segments[seg].first;
        double* v = vv.segments[seg].first;
        for (std::size_t i = 0; i < len; ++i) {
            const double grad = g[i] + config.weight_decay * p[i];
            m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * grad;
            v[i] = config.adam_beta2 * v[i] + (1.0 - config.adam_beta2) * grad * grad;
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_eps);
        }
    }
}

// Loss restricted to `ids` with the given weights; used by train and grad_check.
double labeled_loss(const Matrix& probs, const std::vector<int>& labels,
                    const std::vector<int>& ids, const std::vector<double>& weights,
                    double gamma, Matrix* dscores) {
    Matrix sub(ids.size(), probs.cols());
    std::vector<int> sub_labels(ids.size());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const auto id = static_cast<std::size_t>(ids[r]);
        for (std::size_t j = 0; j < probs.cols(); ++j) sub(r, j) = probs(id, j);
        sub_labels[r] = labels[id];
    }
    FocalLossResult fl = focal_loss(sub, sub_labels, weights, gamma);
    if (dscores) *dscores = std::move(fl.dscores);
    return fl.loss;
}

Matrix scatter_rows(const Matrix& dscores, const std::vector<int>& ids, std::size_t n) {
    Matrix out(n, dscores.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const auto id = static_cast<std::size_t>(ids[r]);
        for (std::size_t j = 0; j < dscores.cols(); ++j) out(id, j) = dscores(r, j);
    }
    return out;
}

}  // namespace

TrainResult train(const PropagationOperator& op, const FeatureMatrix& x0,
                  const std::vector<int>& labels, int num_classes,
                  const std::vector<int>& train_ids, const std::vector<int>& val_ids,
                  const TrainConfig& config) {
    config.validate();
    if (train_ids.empty()) throw InvalidArgument("train: empty training split");
    if (labels.size() != x0.rows()) throw InvalidArgument("train: label count != node count");
    for (int id : train_ids)
        if (id < 0 || static_cast<std::size_t>(id) >= labels.size() || labels[static_cast<std::size_t>(id)] < 0)
            throw InvalidArgument("train: training id without a label");

    std::vector<int> train_labels;
    train_labels.reserve(train_ids.size());
    for (int id : train_ids) train_labels.push_back(labels[static_cast<std::size_t>(id)]);
    std::vector<double> weights =
        config.class_weighting ? class_weights(train_labels, num_classes)
                               : std::vector<double>(static_cast<std::size_t>(num_classes), 1.0);

    TrainResult result;
    result.params = init_params(x0.cols(), num_classes, config);
    if (config.max_epochs == 0) return result;

    AdamState adam;
    adam.m = zeros_like(result.params);
    adam.v = zeros_like(result.params);

    ModelParams params = result.params;
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        ForwardCache cache;
        Matrix probs = forward(op, x0, params, config, /*training=*/true,
                               /*update_running_stats=*/true, &cache);
        Matrix dscores;
        const double loss =
            labeled_loss(probs, labels, train_ids, weights, config.focal_gamma, &dscores);
        if (!std::isfinite(loss))
            throw Error("train: non-finite loss at epoch " + std::to_string(epoch));

        Matrix dlogits = scatter_rows(dscores, train_ids, x0.rows());
        ModelParams grads = backward(op, params, config, cache, dlogits);
        adam_step(params, grads, adam, config);

        Matrix eval_probs = forward(op, x0, params, config, /*training=*/false);
        const double val_acc = accuracy_on(eval_probs, labels, val_ids);
        result.history.push_back({epoch, loss, val_acc});

        if (val_acc > result.best_val_accuracy || result.best_epoch < 0) {
            result.best_val_accuracy = val_acc;
            result.best_epoch = epoch;
            result.params = params;
        } else {
            // Ties refresh the checkpoint: with a small validation split the
            // accuracy plateaus early while the model is still settling, and
            // the most recent equally-good model generalizes better. Patience
            // counts epochs since the last strict improvement either way.
            if (val_acc == result.best_val_accuracy) result.params = params;
            if (config.patience > 0 && epoch - result.best_epoch >= config.patience) break;
        }
    }
    return result;
}

double grad_check(const PropagationOperator& op, const FeatureMatrix& x0,
                  const std::vector<int>& labels, const std::vector<int>& labeled_ids,
                  int num_classes, const TrainConfig& config, double epsilon, int min_samples) {
    if (epsilon <= 0.0) throw InvalidArgument("grad_check: epsilon must be > 0");
    if (labeled_ids.empty()) throw InvalidArgument("grad_check: no labeled ids");
    config.validate();

    const std::vector<double> weights(static_cast<std::size_t>(num_classes), 1.0);
    ModelParams params = init_params(x0.cols(), num_classes, config);

    // Analytic gradient. Running statistics stay frozen so repeated forward
    // passes see the identical function.
    ForwardCache cache;
    Matrix probs = forward(op, x0, params, config, /*training=*/true,
                           /*update_running_stats=*/false, &cache);
    Matrix dscores;
    labeled_loss(probs, labels, labeled_ids, weights, config.focal_gamma, &dscores);
    Matrix dlogits = scatter_rows(dscores, labeled_ids, x0.rows());
    ModelParams grads = backward(op, params, config, cache, dlogits);

    ParamView pv = view_of(params);
    ParamView gv = view_of(grads);

    auto loss_at = [&]() {
        Matrix p = forward(op, x0, params, config, /*training=*/true,
                           /*update_running_stats=*/false);
        return labeled_loss(p, labels, labeled_ids, weights, config.focal_gamma, nullptr);
    };

    Rng rng(config.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
    const std::size_t total = pv.total;
    const std::size_t samples = std::min<std::size_t>(total, static_cast<std::size_t>(min_samples));
    std::vector<std::size_t> indices(total);
    for (std::size_t i = 0; i < total; ++i) indices[i] = i;
    rng.shuffle(indices);

    double max_rel = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t idx = indices[s];
        double& coord = pv.coord(idx);
        const double saved = coord;
        coord = saved + epsilon;
        const double loss_hi = loss_at();
        coord = saved - epsilon;
        const double loss_lo = loss_at();
        coord = saved;
        const double fd = (loss_hi - loss_lo) / (2.0 * epsilon);
        const double analytic = gv.coord(idx);
        const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-4});
        max_rel = std::max(max_rel, std::abs(fd - analytic) / denom);
    }
    return max_rel;
}

}  // namespace hypersona
