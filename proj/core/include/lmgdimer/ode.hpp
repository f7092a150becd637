// ode.hpp: adaptive Dormand-Prince 5(4) stepper with a 4th-order dense output.
//
// The state type is any Eigen column vector (fixed or dynamic size, real or
// complex). The right-hand side is called as rhs(t, y, dydt).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Core>

namespace lmgdimer::ode {

struct Options {
    double rtol{1e-9};
    double atol{1e-9};
    double h_init{0.0};  // 0 picks a starting step from the local scales
    double h_max{0.0};   // 0 means unbounded
    long max_steps{200'000'000};
};

enum class Status { ok, step_underflow, too_many_steps, non_finite };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::ok: return "ok";
    case Status::step_underflow: return "step_underflow";
    case Status::too_many_steps: return "too_many_steps";
    case Status::non_finite: return "non_finite";
    }
    return "unknown";
}

template <class Vec, class Rhs>
class DormandPrince {
public:
    DormandPrince(Rhs rhs, Options opts) : rhs_(std::move(rhs)), opts_(opts) {}

    void reset(double t, const Vec& y)
    {
        t_ = t;
        y_ = y;
        rhs_(t_, y_, k1_);
        h_ = opts_.h_init;
        steps_ = 0;
        rejected_ = 0;
    }

    /// Replaces the current state, keeping the step size estimate.
    void set_state(const Vec& y)
    {
        y_ = y;
        rhs_(t_, y_, k1_);
    }

    void enable_dense(bool on) { dense_ = on; }

    /// Takes one accepted step that never passes t_limit.
    Status step(double t_limit)
    {
        if (steps_ >= opts_.max_steps) return Status::too_many_steps;
        const double span = t_limit - t_;
        if (span <= 0.0) return Status::ok;
        if (h_ <= 0.0) h_ = initial_step(span);
        if (opts_.h_max > 0.0) h_ = std::min(h_, opts_.h_max);

        int non_finite_in_a_row = 0;
        for (;;) {
            const bool last = h_ >= span * (1.0 - 1e-12);
            const double h = last ? span : h_;
            const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(1.0, std::abs(t_));
            if (h < h_floor) return Status::step_underflow;

            attempt(h);
            const double err = error_norm();
            if (!std::isfinite(err)) {
                if (++non_finite_in_a_row > 50) return Status::non_finite;
                h_ = 0.1 * h;
                ++rejected_;
                continue;
            }
            if (err <= 1.0) {
                const double fac = err == 0.0 ? kMaxFactor
                                              : std::clamp(kSafety * std::pow(err, -0.2),
                                                           kMinFactor, kMaxFactor);
                if (dense_) build_dense(h);
                t_prev_ = t_;
                y_prev_ = y_;
                t_ = last ? t_limit : t_ + h;
                y_ = y_new_;
                k1_ = k7_;
                h_prev_ = h;
                // Keep the step requested before a clipped final step.
                if (!last || fac < 1.0) h_ = h * fac;
                ++steps_;
                return Status::ok;
            }
            h_ = h * std::max(kMinFactor, kSafety * std::pow(err, -0.2));
            ++rejected_;
        }
    }

    double t() const { return t_; }
    const Vec& y() const { return y_; }
    const Vec& dydt() const { return k1_; }
    double t_prev() const { return t_prev_; }
    const Vec& y_prev() const { return y_prev_; }
    /// Derivative at the start of the last accepted step.
    const Vec& dydt_prev() const { return k1_prev_; }
    double step_size() const { return h_; }
    long steps() const { return steps_; }
    long rejected() const { return rejected_; }

    /// Interpolates inside the last accepted step (requires enable_dense).
    Vec dense(double t) const
    {
        const double theta = (t - t_prev_) / h_prev_;
        const double theta1 = 1.0 - theta;
        return rc1_ + theta * (rc2_ + theta1 * (rc3_ + theta * (rc4_ + theta1 * rc5_)));
    }

    Rhs& rhs() { return rhs_; }

private:
    static constexpr double kSafety = 0.9;
    static constexpr double kMinFactor = 0.2;
    static constexpr double kMaxFactor = 10.0;

    void attempt(double h)
    {
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                         a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                         a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                         a75 = -2187.0 / 6784, a76 = 11.0 / 84;

        tmp_ = y_ + h * a21 * k1_;
        rhs_(t_ + c2 * h, tmp_, k2_);
        tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
        rhs_(t_ + c3 * h, tmp_, k3_);
        tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
        rhs_(t_ + c4 * h, tmp_, k4_);
        tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
        rhs_(t_ + c5 * h, tmp_, k5_);
        tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
        rhs_(t_ + h, tmp_, k6_);
        y_new_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
        rhs_(t_ + h, y_new_, k7_);

        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                         e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    }

    double error_norm() const
    {
        const auto scale = opts_.atol + opts_.rtol * y_.cwiseAbs().array().max(
                                                         y_new_.cwiseAbs().array());
        return std::sqrt((err_.cwiseAbs().array() / scale).square().mean());
    }

    void build_dense(double h)
    {
        constexpr double d1 = -12715105075.0 / 11282082432.0;
        constexpr double d3 = 87487479700.0 / 32700410799.0;
        constexpr double d4 = -10690763975.0 / 1880347072.0;
        constexpr double d5 = 701980252875.0 / 199316789632.0;
        constexpr double d6 = -1453857185.0 / 822651844.0;
        constexpr double d7 = 69997945.0 / 29380423.0;
        const Vec ydiff = y_new_ - y_;
        const Vec bspl = h * k1_ - ydiff;
        rc1_ = y_;
        rc2_ = ydiff;
        rc3_ = bspl;
        rc4_ = ydiff - h * k7_ - bspl;
        rc5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
        k1_prev_ = k1_;
    }

    double initial_step(double span)
    {
        const auto scale = (opts_.atol + opts_.rtol * y_.cwiseAbs().array()).eval();
        const double d0 = std::sqrt((y_.cwiseAbs().array() / scale).square().mean());
        const double d1 = std::sqrt((k1_.cwiseAbs().array() / scale).square().mean());
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, span);
        tmp_ = y_ + h0 * k1_;
        rhs_(t_ + h0, tmp_, k2_);
        const double d2 =
            std::sqrt(((k2_ - k1_).cwiseAbs().array() / scale).square().mean()) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
        return std::min({100.0 * h0, h1, span});
    }

    Rhs rhs_;
    Options opts_;
    bool dense_{false};
    double t_{0.0}, t_prev_{0.0}, h_{0.0}, h_prev_{0.0};
    long steps_{0}, rejected_{0};
    Vec y_, y_prev_, y_new_, tmp_, err_;
    Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, k1_prev_;
    Vec rc1_, rc2_, rc3_, rc4_, rc5_;
};

template <class Vec, class Rhs>
DormandPrince<Vec, Rhs> make_stepper(Rhs rhs, Options opts)
{
    return DormandPrince<Vec, Rhs>(std::move(rhs), opts);
}

/// Drives the stepper to t_end, calling observer(stepper) after every
/// accepted step; the observer returns false to stop early.
template <class Stepper, class Observer>
Status advance(Stepper& stepper, double t_end, Observer&& observer)
{
    while (stepper.t() < t_end) {
        const Status st = stepper.step(t_end);
        if (st != Status::ok) return st;
        if (!observer(stepper)) return Status::ok;
    }
    return Status::ok;
}

template <class Stepper>
Status advance(Stepper& stepper, double t_end)
{
    return advance(stepper, t_end, [](const Stepper&) { return true; });
}

}  // namespace lmgdimer::ode
