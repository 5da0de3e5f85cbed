#pragma once

// Echo state network with diverse timescales (DTS-ESN): a reservoir of
// leaky-integrator neurons whose leak rates are drawn log-uniformly from
// [alpha_min, alpha_max], fixed random input/recurrent/feedback weights,
// and a ridge-trained linear readout. Setting alpha_min = alpha_max gives
// the constant-leak LI-ESN as a special case.
//
// State update, with A = diag(alpha_1..alpha_N):
//   h(t)      = rho W x(t) + gamma W_in u(t+dt) + zeta W_fb y(t)
//   x(t+dt)   = (I - A) x(t) + A tanh(h(t))
// Readout:
//   y(t+dt)   = W_out [x(t+dt); u(t+dt); 1]   (state_input_bias)
//   y(t+dt)   = W_out x(t+dt)                 (state_only)
//
// W is stored with unit spectral radius; rho scales it at multiply time so
// a sweep over rho reuses one realization. Leak rates map to continuous
// time constants c_i via alpha_i = dt / c_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

#include "dtsesn/errors.hpp"
#include "dtsesn/linalg.hpp"
#include "dtsesn/rng.hpp"

namespace dtsesn {

enum class ReadoutMode { state_input_bias, state_only };

struct HyperParams {
    int reservoir_size = 200;  // N_x
    double density = 0.1;      // fraction of nonzero recurrent weights
    double rho = 1.0;          // recurrent gain (spectral-radius scale)
    double gamma = 1.0;        // input gain
    double zeta = 0.0;         // feedback gain
    double beta = 1e-3;        // ridge regularization
    double alpha_min = 1.0;    // leak-rate lower bound
    double alpha_max = 1.0;    // leak-rate upper bound
    double dt = 1.0;
    ReadoutMode readout = ReadoutMode::state_input_bias;
    std::uint64_t seed = 1;
};

inline void validate_hyper(const HyperParams& hp) {
    if (hp.reservoir_size < 1) throw PreconditionError("reservoir_size must be >= 1");
    if (!(hp.density > 0.0 && hp.density <= 1.0))
        throw PreconditionError("density must be in (0, 1]");
    if (!(hp.rho >= 0.0)) throw PreconditionError("rho must be >= 0");
    if (!(hp.beta >= 0.0)) throw PreconditionError("beta must be >= 0");
    if (!(hp.alpha_min > 0.0 && hp.alpha_min <= hp.alpha_max && hp.alpha_max <= 1.0))
        throw PreconditionError("leak-rate bounds must satisfy 0 < alpha_min <= alpha_max <= 1");
    if (!(hp.dt > 0.0)) throw PreconditionError("dt must be positive");
}

/// Fixed random weights of one reservoir realization.
struct ReservoirMatrices {
    Matrix w;       // N_x x N_x recurrent weights, unit spectral radius
    Matrix w_in;    // N_x x N_u
    Matrix w_fb;    // N_x x N_y
    Vector alphas;  // per-neuron leak rates
};

struct TrainedModel {
    ReservoirMatrices matrices;
    HyperParams hyper;
    Matrix w_out;  // N_y x (N_x + N_u + 1) or N_y x N_x, by readout mode
};

/// Leak rates with log10(alpha) i.i.d. uniform on [log10 min, log10 max].
/// A degenerate interval yields exactly alpha_min for every neuron and
/// consumes no generator output.
inline Vector sample_leak_rates(int n, double alpha_min, double alpha_max, Rng& rng) {
    if (!(alpha_min > 0.0) || !(alpha_min <= alpha_max))
        throw PreconditionError("sample_leak_rates: need 0 < alpha_min <= alpha_max");
    Vector alphas(n);
    if (alpha_min == alpha_max) {
        alphas.setConstant(alpha_min);
        return alphas;
    }
    const double lo = std::log10(alpha_min);
    const double hi = std::log10(alpha_max);
    for (int i = 0; i < n; ++i) {
        const double a = std::pow(10.0, rng.uniform(lo, hi));
        alphas[i] = std::clamp(a, alpha_min, alpha_max);
    }
    return alphas;
}

/// Sample one reservoir realization from hp.seed. Draw order is fixed:
/// recurrent matrix, input matrix, feedback matrix, leak rates. Each
/// recurrent entry is nonzero with probability hp.density, nonzero values
/// uniform on [-1, 1]; the matrix is then rescaled to unit spectral radius.
inline ReservoirMatrices init_reservoir(const HyperParams& hp, int n_in, int n_out) {
    validate_hyper(hp);
    if (n_in < 1 || n_out < 1)
        throw PreconditionError("init_reservoir: input and output dimensions must be >= 1");
    Rng rng(hp.seed);
    const int n = hp.reservoir_size;

    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (rng.uniform01() < hp.density) w(i, j) = rng.symmetric();

    const double sr = spectral_radius(w);
    if (!(sr > 1e-12))
        throw DegenerateMatrixError(
            "sampled recurrent matrix has zero spectral radius; use another seed");
    w /= sr;

    Matrix w_in(n, n_in);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n_in; ++j) w_in(i, j) = rng.symmetric();
    Matrix w_fb(n, n_out);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n_out; ++j) w_fb(i, j) = rng.symmetric();

    Vector alphas = sample_leak_rates(n, hp.alpha_min, hp.alpha_max, rng);
    return {std::move(w), std::move(w_in), std::move(w_fb), std::move(alphas)};
}

/// One state update consuming the next input and the previous output.
inline Vector update_state(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& u_next,
                           const Eigen::Ref<const Vector>& y_prev, const ReservoirMatrices& m,
                           const HyperParams& hp) {
    if (x.size() != m.w.rows())
        throw DimensionError("update_state: state size " + std::to_string(x.size()) +
                             " != reservoir size " + std::to_string(m.w.rows()));
    if (u_next.size() != m.w_in.cols())
        throw DimensionError("update_state: input size " + std::to_string(u_next.size()) +
                             " != " + std::to_string(m.w_in.cols()));
    if (y_prev.size() != m.w_fb.cols())
        throw DimensionError("update_state: feedback size " + std::to_string(y_prev.size()) +
                             " != " + std::to_string(m.w_fb.cols()));
    if (!x.allFinite() || !u_next.allFinite() || !y_prev.allFinite())
        throw PreconditionError("update_state: non-finite input");

    Vector h = hp.rho * (m.w * x);
    if (hp.gamma != 0.0) h.noalias() += hp.gamma * (m.w_in * u_next);
    if (hp.zeta != 0.0) h.noalias() += hp.zeta * (m.w_fb * y_prev);
    return ((1.0 - m.alphas.array()) * x.array() + m.alphas.array() * h.array().tanh()).matrix();
}

/// Teacher-forced drive. Step k consumes inputs.row(k) as u(t+dt) and
/// teacher_outputs.row(k) as y(t); the returned matrix holds the state at
/// every step with x0 as row 0 (rows = inputs.rows() + 1).
inline Matrix drive_open_loop(const ReservoirMatrices& m, const HyperParams& hp,
                              const Eigen::Ref<const Matrix>& inputs,
                              const Eigen::Ref<const Matrix>& teacher_outputs,
                              const Eigen::Ref<const Vector>& x0) {
    if (inputs.rows() != teacher_outputs.rows())
        throw DimensionError("drive_open_loop: input and teacher lengths differ");
    const Eigen::Index steps = inputs.rows();
    Matrix states(steps + 1, m.w.rows());
    Vector x = x0;
    states.row(0) = x;
    for (Eigen::Index k = 0; k < steps; ++k) {
        x = update_state(x, inputs.row(k).transpose(), teacher_outputs.row(k).transpose(), m, hp);
        states.row(k + 1) = x;
    }
    return states;
}

/// Ridge-train the readout on aligned rows. For state_input_bias the design
/// row is [x; u; 1] and `extras` must supply the input rows; for state_only
/// it is just the state. Regularization covers every column uniformly,
/// including bias and input passthrough.
inline Matrix train_readout(const Eigen::Ref<const Matrix>& states, const Matrix* extras,
                            const Eigen::Ref<const Matrix>& targets, const HyperParams& hp) {
    if (states.rows() != targets.rows())
        throw DimensionError("train_readout: state and target lengths differ");
    if (hp.readout == ReadoutMode::state_only) {
        return ridge_solve(states, targets, hp.beta);
    }
    if (extras == nullptr)
        throw PreconditionError("train_readout: state_input_bias readout needs input rows");
    if (extras->rows() != states.rows())
        throw DimensionError("train_readout: extra input rows misaligned");
    Matrix design(states.rows(), states.cols() + extras->cols() + 1);
    design << states, *extras, Matrix::Ones(states.rows(), 1);
    return ridge_solve(design, targets, hp.beta);
}

/// Open-loop prediction with ground-truth inputs: each step emits
/// y = W_out [x; u; 1]. With a nonzero feedback gain the model's own
/// previous output is fed back; y0 seeds that channel for the first step.
inline Matrix predict_open_loop(const TrainedModel& model, const Eigen::Ref<const Matrix>& inputs,
                                const Eigen::Ref<const Vector>& x0,
                                const Eigen::Ref<const Vector>& y0) {
    if (model.hyper.readout != ReadoutMode::state_input_bias)
        throw PreconditionError("predict_open_loop: model readout is not state_input_bias");
    const Eigen::Index n = model.matrices.w.rows();
    const Eigen::Index n_u = model.matrices.w_in.cols();
    if (model.w_out.cols() != n + n_u + 1)
        throw DimensionError("predict_open_loop: readout width " +
                             std::to_string(model.w_out.cols()) + " != " +
                             std::to_string(n + n_u + 1));
    const Eigen::Index steps = inputs.rows();
    Matrix preds(steps, model.w_out.rows());
    Vector x = x0;
    Vector y = y0;
    Vector z(n + n_u + 1);
    for (Eigen::Index k = 0; k < steps; ++k) {
        x = update_state(x, inputs.row(k).transpose(), y, model.matrices, model.hyper);
        z << x, inputs.row(k).transpose(), 1.0;
        y = model.w_out * z;
        preds.row(k) = y;
    }
    return preds;
}

inline Matrix predict_open_loop(const TrainedModel& model, const Eigen::Ref<const Matrix>& inputs,
                                const Eigen::Ref<const Vector>& x0) {
    return predict_open_loop(model, inputs, x0, Vector::Zero(model.matrices.w_fb.cols()));
}

struct ClosedLoopResult {
    Matrix predictions;  // one output per row; fewer than `horizon` rows if diverged
    bool diverged = false;
    std::size_t steps_completed = 0;
};

/// Autonomous generation. The reservoir is first teacher-forced through
/// `warmup` from a zero state (both channels receive the previous warmup
/// row), then for `horizon` steps the previous output is fed into both the
/// input and feedback channels while y = W_out x is emitted. Outputs whose
/// magnitude exceeds `magnitude_cap` stop the run and set the divergence
/// marker; rows up to and including the offending one are kept. With
/// `feedback_only` the input channel receives zeros during generation
/// instead of the previous output.
inline ClosedLoopResult run_closed_loop(const TrainedModel& model,
                                        const Eigen::Ref<const Matrix>& warmup,
                                        std::size_t horizon, double magnitude_cap = 1e6,
                                        bool feedback_only = false) {
    if (model.hyper.readout != ReadoutMode::state_only)
        throw PreconditionError("run_closed_loop: model readout is not state_only");
    if (horizon < 1) throw PreconditionError("run_closed_loop: horizon must be >= 1");
    if (warmup.rows() < 1) throw PreconditionError("run_closed_loop: empty warmup");
    const Eigen::Index n = model.matrices.w.rows();
    if (model.w_out.cols() != n)
        throw DimensionError("run_closed_loop: readout width != reservoir size");
    if (!(magnitude_cap > 0.0))
        throw PreconditionError("run_closed_loop: magnitude cap must be positive");

    Vector x = Vector::Zero(n);
    for (Eigen::Index k = 1; k < warmup.rows(); ++k)
        x = update_state(x, warmup.row(k - 1).transpose(), warmup.row(k - 1).transpose(),
                         model.matrices, model.hyper);

    ClosedLoopResult result;
    result.predictions.resize(static_cast<Eigen::Index>(horizon), model.w_out.rows());
    Vector y = model.w_out * x;
    const Vector zero_u = Vector::Zero(model.matrices.w_in.cols());
    for (std::size_t h = 0; h < horizon; ++h) {
        x = update_state(x, feedback_only ? zero_u : y, y, model.matrices, model.hyper);
        y = model.w_out * x;
        result.predictions.row(static_cast<Eigen::Index>(h)) = y;
        result.steps_completed = h + 1;
        if (!y.allFinite() || y.cwiseAbs().maxCoeff() > magnitude_cap) {
            result.diverged = true;
            break;
        }
    }
    result.predictions.conservativeResize(static_cast<Eigen::Index>(result.steps_completed),
                                          Eigen::NoChange);
    return result;
}

}  // namespace dtsesn
