#include "ksne/engine.hpp"

#include <cmath>
#include <numeric>

#include "ksne/error.hpp"
#include "ksne/parallel.hpp"

namespace ksne {

void validate(const OptimizerParams& params) {
    require(params.learning_rate >= 0.0 && std::isfinite(params.learning_rate), "learning rate must be >= 0");
    require(params.momentum_early >= 0.0 && params.momentum_early < 1.0, "momentum_early must be in [0,1)");
    require(params.momentum_late >= 0.0 && params.momentum_late < 1.0, "momentum_late must be in [0,1)");
    require(params.max_iters >= 1, "max_iters must be at least 1");
    require(params.checkpoint_every >= 1, "checkpoint_every must be at least 1");
    require(params.early_exaggeration_factor >= 1.0, "exaggeration factor must be >= 1");
}

namespace {

inline double student_weight(const Matrix& y, std::size_t i, std::size_t j) {
    const double dx = y(i, 0) - y(j, 0);
    const double dy = y(i, 1) - y(j, 1);
    return 1.0 / (1.0 + dx * dx + dy * dy);
}

// sum_{i != j} w_ij, with per-row partial sums reduced in row order.
double weight_total(const Matrix& y) {
    const std::size_t n = y.rows();
    std::vector<double> row_sums(n, 0.0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    s += student_weight(y, i, j);
                }
            }
            row_sums[i] = s;
        }
    }, 8);
    return std::accumulate(row_sums.begin(), row_sums.end(), 0.0);
}

void require_shapes(const JointDistribution& p, const Embedding& y) {
    require(p.values.rows() == p.values.cols(), "P must be square");
    require(y.coords.cols() == 2, "embedding must be N x 2");
    require(p.size() == y.size(), "P has " + std::to_string(p.size()) + " rows but the embedding has " +
                                      std::to_string(y.size()));
}

}  // namespace

JointDistribution low_dim_affinities(const Embedding& y) {
    const std::size_t n = y.size();
    require(n >= 2, "low-dimensional affinities need N >= 2");
    const double inv_total = 1.0 / weight_total(y.coords);
    JointDistribution q{Matrix(n, n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = student_weight(y.coords, i, j) * inv_total;
            q.values(i, j) = v;
            q.values(j, i) = v;
        }
    }
    return q;
}

double kl_divergence(const JointDistribution& p, const JointDistribution& q) {
    const std::size_t n = p.size();
    require(p.values.cols() == n && q.values.rows() == n && q.values.cols() == n,
            "KL divergence needs matching square matrices");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double pij = p(i, j);
            if (j != i && pij > 0.0) {
                total += pij * std::log(pij / std::max(q(i, j), q_floor));
            }
        }
    }
    return total;
}

double kl_divergence(const JointDistribution& p, const Embedding& y) {
    require_shapes(p, y);
    const std::size_t n = p.size();
    const double inv_total = 1.0 / weight_total(y.coords);
    std::vector<double> row_terms(n, 0.0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double pij = p(i, j);
                if (j != i && pij > 0.0) {
                    const double qij = student_weight(y.coords, i, j) * inv_total;
                    s += pij * std::log(pij / std::max(qij, q_floor));
                }
            }
            row_terms[i] = s;
        }
    }, 8);
    return std::accumulate(row_terms.begin(), row_terms.end(), 0.0);
}

Matrix gradient(const JointDistribution& p, const Embedding& y, double p_scale) {
    require_shapes(p, y);
    const std::size_t n = p.size();
    const double inv_total = 1.0 / weight_total(y.coords);
    Matrix grad(n, 2, 0.0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double gx = 0.0;
            double gy = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) {
                    continue;
                }
                const double w = student_weight(y.coords, i, j);
                const double force = (p_scale * p(i, j) - w * inv_total) * w;
                gx += force * (y.coords(i, 0) - y.coords(j, 0));
                gy += force * (y.coords(i, 1) - y.coords(j, 1));
            }
            grad(i, 0) = 4.0 * gx;
            grad(i, 1) = 4.0 * gy;
        }
    }, 8);
    return grad;
}

Trajectory run_tsne(const JointDistribution& p, const Embedding& init, const OptimizerParams& params,
                    const CheckpointObserver& observer) {
    validate(params);
    validate(init);
    require_shapes(p, init);
    const std::size_t n = p.size();
    require(n >= 2, "t-SNE needs at least two points");

    Embedding y{init.coords, Provenance::optimizer};
    Matrix velocity(n, 2, 0.0);
    Matrix gains(n, 2, 1.0);
    Trajectory trajectory;

    for (std::size_t iter = 1; iter <= params.max_iters; ++iter) {
        const bool exaggerating = params.early_exaggeration_factor > 1.0 && iter <= params.early_exaggeration_iters;
        const double scale = exaggerating ? params.early_exaggeration_factor : 1.0;
        const double momentum = iter <= params.momentum_switch_iter ? params.momentum_early : params.momentum_late;
        const Matrix grad = gradient(p, y, scale);

        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < 2; ++c) {
                double& gain = gains(i, c);
                if (params.adaptive_gains) {
                    const bool same_sign = (grad(i, c) > 0.0) == (velocity(i, c) > 0.0);
                    gain = same_sign ? std::max(gain * 0.8, 0.01) : gain + 0.2;
                }
                velocity(i, c) = momentum * velocity(i, c) - params.learning_rate * gain * grad(i, c);
                y.coords(i, c) += velocity(i, c);
            }
        }

        double mean_x = 0.0;
        double mean_y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean_x += y.coords(i, 0);
            mean_y += y.coords(i, 1);
        }
        mean_x /= static_cast<double>(n);
        mean_y /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y.coords(i, 0) -= mean_x;
            y.coords(i, 1) -= mean_y;
            if (!std::isfinite(y.coords(i, 0)) || !std::isfinite(y.coords(i, 1))) {
                fail(ErrorKind::divergence, "embedding diverged at iteration " + std::to_string(iter) +
                                                "; try a lower learning rate");
            }
        }

        if (iter % params.checkpoint_every == 0 || iter == params.max_iters) {
            Checkpoint checkpoint{iter, y, kl_divergence(p, y)};
            if (!std::isfinite(checkpoint.kl)) {
                fail(ErrorKind::divergence, "KL divergence is not finite at iteration " + std::to_string(iter));
            }
            if (observer) {
                observer(checkpoint);
            }
            trajectory.checkpoints.push_back(std::move(checkpoint));
        }
    }
    return trajectory;
}

CheckpointQueue::CheckpointQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

void CheckpointQueue::push(Checkpoint checkpoint) {
    std::unique_lock<std::mutex> guard(lock_);
    not_full_.wait(guard, [&] { return items_.size() < capacity_ || closed_; });
    if (closed_) {
        return;
    }
    items_.push_back(std::move(checkpoint));
    not_empty_.notify_one();
}

std::optional<Checkpoint> CheckpointQueue::pop() {
    std::unique_lock<std::mutex> guard(lock_);
    not_empty_.wait(guard, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) {
        return std::nullopt;
    }
    Checkpoint front = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return front;
}

void CheckpointQueue::close() {
    std::lock_guard<std::mutex> guard(lock_);
    closed_ = true;
    not_full_.notify_all();
    not_empty_.notify_all();
}

}  // namespace ksne
