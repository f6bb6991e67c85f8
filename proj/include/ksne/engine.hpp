#ifndef KSNE_ENGINE_HPP
#define KSNE_ENGINE_HPP

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <vector>

#include "ksne/init.hpp"
#include "ksne/kernels.hpp"
#include "ksne/matrix.hpp"

namespace ksne {

/// Floor applied to q_ij inside the KL logarithm.
inline constexpr double q_floor = 1e-12;

struct OptimizerParams {
    double learning_rate = 200.0;
    double momentum_early = 0.5;
    double momentum_late = 0.8;
    std::size_t momentum_switch_iter = 250;
    std::size_t max_iters = 2000;
    std::size_t checkpoint_every = 100;
    double early_exaggeration_factor = 1.0;
    std::size_t early_exaggeration_iters = 250;
    bool adaptive_gains = false;
};

void validate(const OptimizerParams& params);

struct Checkpoint {
    std::size_t iteration = 0;
    Embedding embedding;
    double kl = 0.0;
};

struct Trajectory {
    std::vector<Checkpoint> checkpoints;
};

/// Student-t affinities q_ij = w_ij / sum_{k != l} w_kl, w_ij = 1 / (1 + ||y_i - y_j||^2).
JointDistribution low_dim_affinities(const Embedding& y);

/// sum_{i != j} p_ij ln(p_ij / max(q_ij, 1e-12)); zero p terms contribute nothing.
double kl_divergence(const JointDistribution& p, const JointDistribution& q);

/// KL(P || Q(Y)) without materializing Q.
double kl_divergence(const JointDistribution& p, const Embedding& y);

/**
 * dKL/dY = 4 sum_j (s * p_ij - q_ij)(y_i - y_j) / (1 + ||y_i - y_j||^2),
 * with s the exaggeration factor applied to P (1 for the plain gradient).
 */
Matrix gradient(const JointDistribution& p, const Embedding& y, double p_scale = 1.0);

/// Receives each checkpoint as soon as it is recorded.
using CheckpointObserver = std::function<void(const Checkpoint&)>;

/**
 * Momentum gradient descent on KL(P || Q).
 *
 * V <- momentum * V - learning_rate * (gains .* grad); Y <- Y + V; Y is
 * re-centered after every step. Momentum switches from early to late once
 * `momentum_switch_iter` steps are done, and P is scaled by the exaggeration
 * factor for the first `early_exaggeration_iters` steps. Checkpoints (with KL
 * against the unscaled P) land every `checkpoint_every` steps and at the last
 * step. A non-finite coordinate raises Error(divergence) naming the step.
 */
Trajectory run_tsne(const JointDistribution& p, const Embedding& init, const OptimizerParams& params,
                    const CheckpointObserver& observer = {});

/**
 * Bounded blocking hand-off between the optimizer and a consumer thread.
 * push() blocks while the queue is full; pop() returns nullopt after close()
 * once drained.
 */
class CheckpointQueue {
public:
    explicit CheckpointQueue(std::size_t capacity);

    void push(Checkpoint checkpoint);
    std::optional<Checkpoint> pop();
    void close();

private:
    std::size_t capacity_;
    bool closed_ = false;
    std::deque<Checkpoint> items_;
    std::mutex lock_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
};

}  // namespace ksne

#endif
