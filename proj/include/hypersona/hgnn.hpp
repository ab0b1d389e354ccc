#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypersona/matrix.hpp"
#include "hypersona/rng.hpp"
#include "hypersona/types.hpp"

namespace hypersona {

// Node and hyperedge degrees:
//   d_e[k] = sum_u U[u] * H[u,k]     (> 0 for every kept hyperedge)
//   d_v[u] = sum_k W[k] * H[u,k]     (0 for nodes in no hyperedge)
struct DegreeData {
    std::vector<double> d_v;
    std::vector<double> d_e;
};

DegreeData degrees(const Hypergraph& graph);

// The symmetric node-to-hyperedge-to-node diffusion matrix
//   P = D_v^{-1/2} U H W D_e^{-1} H^T U D_v^{-1/2}
// stored in factored form. Isolated nodes (d_v = 0) take the pseudo-inverse
// convention: their D_v^{-1/2} entry is 0, so their row and column vanish.
// The hypergraph Laplacian I - P is available as a derived dense view.
class PropagationOperator {
public:
    PropagationOperator() = default;
    PropagationOperator(int num_nodes, std::vector<std::vector<int>> edge_members,
                        std::vector<double> node_scale, std::vector<double> edge_scale);

    int num_nodes() const { return num_nodes_; }

    // P * X, using the factored form; cost is O(nnz(H) * cols).
    Matrix apply(const Matrix& x) const;

    // Dense N x N realization; intended for small graphs and tests.
    Matrix dense() const;

    // I - dense().
    Matrix laplacian_dense() const;

private:
    int num_nodes_ = 0;
    std::vector<std::vector<int>> edge_members_;   // sorted node ids per edge
    std::vector<std::vector<int>> node_edges_;     // incident edge ids per node
    std::vector<double> node_scale_;               // U_u / sqrt(d_v_u), 0 when d_v = 0
    std::vector<double> edge_scale_;               // W_k / d_e_k
};

PropagationOperator propagation_operator(const Hypergraph& graph);

enum class Activation { RELU, IDENTITY };

// Per-feature batch normalization over the node dimension.
struct BatchNormState {
    std::vector<double> scale;
    std::vector<double> shift;
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double eps = 1e-5;

    static BatchNormState identity(std::size_t dim);
};

struct LayerParams {
    Matrix theta;                      // d_in x d_out
    BatchNormState bn;
    std::optional<Matrix> skip_proj;   // d_in x d_out, present iff d_in != d_out
};

struct ModelParams {
    std::vector<LayerParams> layers;
    Matrix head_weight;                // hidden x P
    std::vector<double> head_bias;     // P

    std::size_t input_dim() const { return layers.front().theta.rows(); }
    std::size_t output_dim() const { return head_weight.cols(); }
};

struct TrainConfig {
    double learning_rate = 0.001;
    double weight_decay = 5e-4;
    int max_epochs = 500;
    int layers = 2;
    int hidden_dim = 128;
    double focal_gamma = 2.0;
    std::uint64_t seed = 0;
    double bn_momentum = 0.9;
    int patience = 100;                       // epochs without val improvement before stopping
    Activation activation = Activation::RELU; // sigma in the skip update
    bool batch_norm = true;
    bool class_weighting = true;              // inverse-frequency class weights in the loss
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const;
};

// Seeded uniform fan-in initialization; BN starts as the identity transform.
ModelParams init_params(std::size_t input_dim, int num_classes, const TrainConfig& config);

// Intermediate values one layer keeps for backpropagation.
struct LayerCache {
    Matrix x_in;
    Matrix aggregated;  // P * x_in
    Matrix z;           // aggregated * theta
    Matrix xhat;        // normalized z (batch statistics)
    Matrix pre_relu;    // post-BN
    Matrix pre_sigma;   // ReLU(post-BN) + skip(x_in)
    std::vector<double> batch_mean;
    std::vector<double> batch_inv_std;
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    Matrix features_out;  // X^L
    Matrix probs;
};

// One skip-connected hypergraph layer:
//   Z = P * X_in * theta
//   X_out = sigma(ReLU(BatchNorm(Z)) + skip(X_in))
// Training mode normalizes with batch statistics and (when
// `update_running_stats`) folds them into the running estimates; evaluation
// mode uses the running estimates. Returns (Z, X_out).
std::pair<Matrix, Matrix> layer_forward(const PropagationOperator& op, const Matrix& x_in,
                                        LayerParams& params, Activation activation,
                                        bool batch_norm, double bn_momentum, bool training,
                                        bool update_running_stats = true,
                                        LayerCache* cache = nullptr);

// Full forward pass: L stacked layers, linear classifier head, row softmax.
Matrix forward(const PropagationOperator& op, const FeatureMatrix& x0, ModelParams& params,
               const TrainConfig& config, bool training, bool update_running_stats = true,
               ForwardCache* cache = nullptr);

// Class-weighted focal loss over labeled rows.
//   loss = -(1/M) sum_i w_{t_i} (1 - p_{i,t_i})^gamma log(max(p_{i,t_i}, 1e-12))
// `dscores` is the analytic gradient with respect to the pre-softmax scores.
struct FocalLossResult {
    double loss = 0.0;
    Matrix dscores;
};

FocalLossResult focal_loss(const Matrix& probs, const std::vector<int>& labels,
                           const std::vector<double>& class_weights, double gamma);

// w_c = N_train / (P * max(n_c, 1)) over the training-split labels.
std::vector<double> class_weights(const std::vector<int>& train_labels, int num_classes);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainResult {
    ModelParams params;        // checkpoint with the best validation accuracy
    std::vector<EpochStats> history;
    int best_epoch = -1;
    double best_val_accuracy = 0.0;
};

// Transductive full-batch training: forward over all nodes, focal loss on the
// training rows only, Adam with L2 weight decay added to the gradients.
// `labels[v]` is the class of node v or -1 when unobserved.
TrainResult train(const PropagationOperator& op, const FeatureMatrix& x0,
                  const std::vector<int>& labels, int num_classes,
                  const std::vector<int>& train_ids, const std::vector<int>& val_ids,
                  const TrainConfig& config);

// Compares the analytic gradient against central finite differences on at
// least `min_samples` randomly chosen parameters; returns the max relative
// error. Intended for small fixtures.
double grad_check(const PropagationOperator& op, const FeatureMatrix& x0,
                  const std::vector<int>& labels, const std::vector<int>& labeled_ids,
                  int num_classes, const TrainConfig& config, double epsilon = 1e-5,
                  int min_samples = 100);

// Argmax with ties resolved toward the lowest class index.
int argmax_row(const Matrix& m, std::size_t row);

double accuracy_on(const Matrix& probs, const std::vector<int>& labels,
                   const std::vector<int>& ids);

}  // namespace hypersona
