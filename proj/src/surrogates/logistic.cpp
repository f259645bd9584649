#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "surrscope/core/error.hpp"
#include "surrscope/surrogates/surrogate.hpp"

namespace surrscope {

namespace {

// log(1 + e^t) without overflow.
inline double softplus(double t) noexcept
{
    return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

inline double sigmoid(double t) noexcept
{
    if (t >= 0.0) {
        return 1.0 / (1.0 + std::exp(-t));
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

std::vector<double> normalized_weights(const TrainingView& data)
{
    const std::size_t n = data.y.size();
    std::vector<double> w(n, 1.0);
    if (!data.weights.empty()) {
        if (data.weights.size() != n) {
            throw InvalidArgument("logistic: one weight per sample required");
        }
        std::copy(data.weights.begin(), data.weights.end(), w.begin());
        for (double v : w) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw InvalidArgument("logistic: weights must be positive and finite");
            }
        }
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) {
        v /= total;
    }
    return w;
}

void check_view(const TrainingView& data)
{
    if (data.y.size() == 0) {
        throw InvalidArgument("logistic: empty training set");
    }
    if (data.X.rows() != data.y.size()) {
        throw DimensionMismatch("logistic: X rows and label count differ");
    }
}

/// The problem in standardized coordinates: columns centered and scaled by
/// their weighted mean and standard deviation. For the unpenalized loss this
/// is an exact reparametrization that only improves conditioning; penalties
/// are carried as per-coordinate weights so that standardize=false still
/// penalizes coefficients in original units.
class StandardizedProblem {
public:
    StandardizedProblem(const TrainingView& data, std::vector<double> weights)
        : n_(data.y.size()), d_(data.X.cols()), omega_(std::move(weights)), y_(n_), mean_(d_, 0.0),
          scale_(d_, 1.0), active_(d_, false), Z_(n_ * d_, 0.0), margins_(n_, 0.0)
    {
        for (std::size_t i = 0; i < n_; ++i) {
            y_[i] = static_cast<double>(data.y[i]);
        }
        for (std::size_t j = 0; j < d_; ++j) {
            double m = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                m += omega_[i] * data.X.at(i, j);
            }
            double v = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                const double c = data.X.at(i, j) - m;
                v += omega_[i] * c * c;
            }
            const double s = std::sqrt(v);
            mean_[j] = m;
            // A column that does not vary carries no information for the fit.
            active_[j] = s > 1e-14 * std::max(1.0, std::abs(m));
            scale_[j] = active_[j] ? s : 1.0;
            if (active_[j]) {
                for (std::size_t i = 0; i < n_; ++i) {
                    Z_[i * d_ + j] = (data.X.at(i, j) - m) / s;
                }
            }
        }
    }

    std::size_t dim() const noexcept { return d_; }
    bool active(std::size_t j) const noexcept { return active_[j]; }
    double scale(std::size_t j) const noexcept { return scale_[j]; }

    /// Smooth part at theta = (v, b); caches margins for gradient().
    double loss(const std::vector<double>& theta)
    {
        // Neumaier summation: near the optimum the solvers compare losses that
        // differ in the last few bits.
        double f = 0.0;
        double comp = 0.0;
        const double b = theta[d_];
        for (std::size_t i = 0; i < n_; ++i) {
            double t = b;
            const double* z = Z_.data() + i * d_;
            for (std::size_t j = 0; j < d_; ++j) {
                t += z[j] * theta[j];
            }
            margins_[i] = t;
            const double term = omega_[i] * (softplus(t) - y_[i] * t);
            const double sum = f + term;
            comp += std::abs(f) >= std::abs(term) ? (f - sum) + term : (term - sum) + f;
            f = sum;
        }
        return f + comp;
    }

    /// Gradient at the theta last passed to loss().
    void gradient(std::vector<double>& g) const
    {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const double r = omega_[i] * (sigmoid(margins_[i]) - y_[i]);
            const double* z = Z_.data() + i * d_;
            for (std::size_t j = 0; j < d_; ++j) {
                g[j] += r * z[j];
            }
            g[d_] += r;
        }
        for (std::size_t j = 0; j < d_; ++j) {
            if (!active_[j]) {
                g[j] = 0.0;
            }
        }
    }

    /// Hessian at the theta last passed to loss(), (d + 1) x (d + 1) row-major.
    /// Rows of inactive coordinates are left as the identity.
    void hessian(std::vector<double>& H) const
    {
        const std::size_t m = d_ + 1;
        std::fill(H.begin(), H.end(), 0.0);
        std::vector<double> z(m, 1.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const double p = sigmoid(margins_[i]);
            const double c = omega_[i] * p * (1.0 - p);
            std::copy_n(Z_.data() + i * d_, d_, z.begin());
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = 0; b <= a; ++b) {
                    H[a * m + b] += c * z[a] * z[b];
                }
            }
        }
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < a; ++b) {
                H[b * m + a] = H[a * m + b];
            }
        }
        for (std::size_t j = 0; j < d_; ++j) {
            if (!active_[j]) {
                for (std::size_t k = 0; k < m; ++k) {
                    H[j * m + k] = 0.0;
                    H[k * m + j] = 0.0;
                }
                H[j * m + j] = 1.0;
            }
        }
    }

    std::vector<double> to_standard(const LinearSurrogate& s) const
    {
        std::vector<double> theta(d_ + 1, 0.0);
        double b = s.intercept;
        for (std::size_t j = 0; j < d_; ++j) {
            if (active_[j]) {
                theta[j] = s.coefficients[j] * scale_[j];
            }
            b += s.coefficients[j] * mean_[j];
        }
        theta[d_] = b;
        return theta;
    }

    void to_original(const std::vector<double>& theta, LinearSurrogate& out) const
    {
        out.coefficients.assign(d_, 0.0);
        double b = theta[d_];
        for (std::size_t j = 0; j < d_; ++j) {
            if (active_[j]) {
                out.coefficients[j] = theta[j] / scale_[j];
                b -= out.coefficients[j] * mean_[j];
            }
        }
        out.intercept = b;
    }

private:
    std::size_t n_;
    std::size_t d_;
    std::vector<double> omega_;
    std::vector<double> y_;
    std::vector<double> mean_;
    std::vector<double> scale_;
    std::vector<bool> active_;
    std::vector<double> Z_;
    std::vector<double> margins_;
};

std::optional<LinearSurrogate> degenerate_model(const TrainingView& data, std::optional<double> C)
{
    const auto labels = data.y.values();
    if (std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) != labels.end()) {
        return std::nullopt;
    }
    LinearSurrogate s;
    s.coefficients.assign(data.X.cols(), 0.0);
    s.intercept = labels.front() == 1 ? 1.0 : -1.0;
    s.C = C;
    s.degenerate = true;
    s.converged = true;
    return s;
}

/// Solves (H + mu I) x = rhs by Cholesky in place; false if not positive definite.
bool cholesky_solve(std::vector<double> H, std::size_t m, double mu, std::vector<double>& x)
{
    for (std::size_t a = 0; a < m; ++a) {
        H[a * m + a] += mu;
    }
    for (std::size_t j = 0; j < m; ++j) {
        double diag = H[j * m + j];
        for (std::size_t k = 0; k < j; ++k) {
            diag -= H[j * m + k] * H[j * m + k];
        }
        if (!(diag > 0.0)) {
            return false;
        }
        diag = std::sqrt(diag);
        H[j * m + j] = diag;
        for (std::size_t i = j + 1; i < m; ++i) {
            double v = H[i * m + j];
            for (std::size_t k = 0; k < j; ++k) {
                v -= H[i * m + k] * H[j * m + k];
            }
            H[i * m + j] = v / diag;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        double v = x[i];
        for (std::size_t k = 0; k < i; ++k) {
            v -= H[i * m + k] * x[k];
        }
        x[i] = v / H[i * m + i];
    }
    for (std::size_t i = m; i-- > 0;) {
        double v = x[i];
        for (std::size_t k = i + 1; k < m; ++k) {
            v -= H[k * m + i] * x[k];
        }
        x[i] = v / H[i * m + i];
    }
    return true;
}

/// Iterate state shared by both solvers. `objective` is loss + sum_j
/// lin[j] * theta[j], which equals loss + penalty while every free
/// coordinate keeps the sign of lin[j].
struct Iterate {
    std::vector<double> theta;
    std::vector<double> grad;
    double loss = 0.0;
    double objective = 0.0;
};

double linear_term(const std::vector<double>& lin, const std::vector<double>& theta)
{
    double p = 0.0;
    for (std::size_t j = 0; j < lin.size(); ++j) {
        p += lin[j] * theta[j];
    }
    return p;
}

/// Damped Newton with an Armijo line search on loss + lin.theta over the
/// coordinates in `free` (the intercept is always free). A step that would
/// move a free coordinate with lin != 0 across zero is cut short at the
/// crossing and the method stops there. Steps never increase the computed
/// objective. Returns true when the free-coordinate gradient reaches tol.
bool newton(StandardizedProblem& problem, Iterate& it, const std::vector<bool>& free, const std::vector<double>& lin,
            double tol, std::size_t max_iter, std::size_t& iterations, SolverTrace* trace)
{
    const std::size_t d = problem.dim();
    const std::size_t m = d + 1;
    std::vector<double> H(m * m);
    std::vector<double> G(m);
    std::vector<double> dir(m);
    std::vector<double> trial(m);
    std::vector<double> trial_grad(m);
    const auto reduced_gradient = [&] {
        double worst = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            const bool on = a == d || free[a];
            G[a] = on ? it.grad[a] + (a < d ? lin[a] : 0.0) : 0.0;
            worst = std::max(worst, std::abs(G[a]));
        }
        return worst;
    };

    // Converged once the gradient is below tol and the last Newton step moved
    // no coordinate by more than tol; the second condition tightens the
    // answer on badly conditioned (near-separable) problems.
    double last_step = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < max_iter; ++k) {
        const double gnorm = reduced_gradient();
        if (gnorm <= tol && last_step <= tol) {
            return true;
        }
        problem.hessian(H);
        for (std::size_t j = 0; j < d; ++j) {
            if (!free[j]) {
                for (std::size_t c = 0; c < m; ++c) {
                    H[j * m + c] = 0.0;
                    H[c * m + j] = 0.0;
                }
                H[j * m + j] = 1.0;
            }
        }
        double hmax = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            hmax = std::max(hmax, H[a * m + a]);
        }
        double mu = 1e-12 * hmax;
        for (;;) {
            for (std::size_t a = 0; a < m; ++a) {
                dir[a] = -G[a];
            }
            if (cholesky_solve(H, m, mu, dir) || mu > 1e300) {
                break;
            }
            mu = std::max(mu * 10.0, 1e-300);
        }
        double slope = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            slope += G[a] * dir[a];
        }
        if (!(slope < 0.0)) {
            return gnorm <= tol;
        }
        double t_max = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (free[j] && lin[j] != 0.0 && dir[j] != 0.0 && (dir[j] > 0.0) != (lin[j] > 0.0)) {
                t_max = std::min(t_max, std::abs(it.theta[j] / dir[j]));
            }
        }
        const bool crossing = t_max < 1.0;
        const bool tiny = -slope <= 1e-10 * std::max(1.0, std::abs(it.objective));
        bool accepted = false;
        double loss_trial = 0.0;
        double obj_trial = 0.0;
        for (double t = t_max; t > 1e-20; t *= 0.5) {
            bool moved = false;
            for (std::size_t a = 0; a < m; ++a) {
                trial[a] = it.theta[a] + t * dir[a];
                moved = moved || trial[a] != it.theta[a];
            }
            if (crossing && t == t_max) {
                for (std::size_t j = 0; j < d; ++j) {
                    if (free[j] && lin[j] != 0.0 && (trial[j] > 0.0) != (lin[j] > 0.0)) {
                        trial[j] = 0.0;
                    }
                }
            }
            if (!moved) {
                break;
            }
            loss_trial = problem.loss(trial);
            obj_trial = loss_trial + linear_term(lin, trial);
            if (obj_trial <= it.objective + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            if (tiny) {
                // The decrease is below the resolution of the objective, so
                // the step is judged by the gradient instead. The true
                // objective still falls; the recorded one is kept from
                // rising on rounding.
                problem.gradient(trial_grad);
                double worst = 0.0;
                for (std::size_t a = 0; a < m; ++a) {
                    if (a == d || free[a]) {
                        worst = std::max(worst, std::abs(trial_grad[a] + (a < d ? lin[a] : 0.0)));
                    }
                }
                accepted = worst < gnorm;
                obj_trial = std::min(obj_trial, it.objective);
                break;
            }
        }
        if (!accepted) {
            problem.loss(it.theta);
            return gnorm <= tol;
        }
        last_step = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            last_step = std::max(last_step, std::abs(dir[a]));
        }
        it.theta.swap(trial);
        it.loss = loss_trial;
        it.objective = obj_trial;
        problem.gradient(it.grad);
        ++iterations;
        if (trace) {
            trace->objective.push_back(it.objective);
        }
        if (crossing) {
            return reduced_gradient() <= tol;
        }
    }
    return reduced_gradient() <= tol;
}

LinearSurrogate finish(const StandardizedProblem& problem, const Iterate& it, std::optional<double> C,
                       std::size_t iterations, bool converged)
{
    LinearSurrogate out;
    problem.to_original(it.theta, out);
    out.C = C;
    out.iterations = iterations;
    out.objective = it.objective;
    out.converged = converged;
    for (double w : out.coefficients) {
        if (!std::isfinite(w)) {
            throw Error("logistic solver produced non-finite coefficients");
        }
    }
    return out;
}

/// Unpenalized maximum likelihood. The problem has at most a few dozen
/// coordinates, so forming the Hessian is cheap, and near-separable
/// neighbourhoods (where gradient steps crawl) converge in tens of iterations.
LinearSurrogate solve_newton(StandardizedProblem& problem, const FitConfig& cfg, SolverTrace* trace)
{
    const std::size_t d = problem.dim();
    Iterate it{std::vector<double>(d + 1, 0.0), std::vector<double>(d + 1), 0.0, 0.0};
    it.loss = problem.loss(it.theta);
    it.objective = it.loss;
    problem.gradient(it.grad);
    if (trace) {
        trace->objective.assign(1, it.objective);
    }
    std::vector<bool> free(d);
    for (std::size_t j = 0; j < d; ++j) {
        free[j] = problem.active(j);
    }
    std::size_t iterations = 0;
    const bool converged = newton(problem, it, free, std::vector<double>(d, 0.0), cfg.tol, cfg.max_iter,
                                  iterations, trace);
    return finish(problem, it, std::nullopt, iterations, converged);
}

/// Proximal gradient with backtracking on
///   loss(theta) + sum_j penalty[j] * |theta_j|     (intercept unpenalized).
/// The trial step grows by 2x after every accepted step. Once the support
/// and signs stop changing, a Newton solve restricted to the support
/// finishes the job to full precision.
LinearSurrogate solve_l1(StandardizedProblem& problem, const std::vector<double>& penalty, std::vector<double> theta,
                         const FitConfig& cfg, SolverTrace* trace)
{
    const std::size_t d = problem.dim();
    const auto penalty_value = [&](const std::vector<double>& th) {
        double p = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            p += penalty[j] * std::abs(th[j]);
        }
        return p;
    };
    const auto optimality = [&](const std::vector<double>& th, const std::vector<double>& g) {
        double worst = std::abs(g[d]);
        for (std::size_t j = 0; j < d; ++j) {
            if (!problem.active(j)) {
                continue;
            }
            double r = 0.0;
            if (th[j] != 0.0) {
                r = std::abs(g[j] + penalty[j] * (th[j] > 0.0 ? 1.0 : -1.0));
            } else {
                r = std::max(0.0, std::abs(g[j]) - penalty[j]);
            }
            worst = std::max(worst, r);
        }
        return worst;
    };
    const auto sign_pattern = [&](const std::vector<double>& th) {
        std::vector<int> s(d);
        for (std::size_t j = 0; j < d; ++j) {
            s[j] = (th[j] > 0.0) - (th[j] < 0.0);
        }
        return s;
    };

    for (std::size_t j = 0; j < d; ++j) {
        if (!problem.active(j)) {
            theta[j] = 0.0;
        }
    }
    Iterate it{std::move(theta), std::vector<double>(d + 1), 0.0, 0.0};
    it.loss = problem.loss(it.theta);
    problem.gradient(it.grad);
    it.objective = it.loss + penalty_value(it.theta);
    if (trace) {
        trace->objective.assign(1, it.objective);
    }

    // Lipschitz bound of the standardized logistic loss: 0.25 * (d + 1).
    double step = 4.0 / static_cast<double>(d + 1);
    std::vector<double> trial(d + 1);
    std::vector<int> signs = sign_pattern(it.theta);
    std::vector<int> polished;
    std::size_t iter = 0;
    bool converged = false;
    while (iter < cfg.max_iter) {
        if (optimality(it.theta, it.grad) <= cfg.tol) {
            converged = true;
            break;
        }
        step = std::min(step * 2.0, 1e15);
        bool accepted = false;
        double loss_trial = 0.0;
        double obj_trial = 0.0;
        while (step > 1e-20) {
            double lin = 0.0;
            double quad = 0.0;
            for (std::size_t j = 0; j <= d; ++j) {
                double v = it.theta[j] - step * it.grad[j];
                if (j < d) {
                    v = problem.active(j) ? soft_threshold(v, step * penalty[j]) : 0.0;
                }
                trial[j] = v;
                const double delta = v - it.theta[j];
                lin += it.grad[j] * delta;
                quad += delta * delta;
            }
            if (quad == 0.0) {
                break;
            }
            loss_trial = problem.loss(trial);
            if (loss_trial <= it.loss + lin + quad / (2.0 * step)) {
                obj_trial = loss_trial + penalty_value(trial);
                accepted = obj_trial <= it.objective;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // The iterate no longer moves representably.
            problem.loss(it.theta);
            break;
        }
        it.theta.swap(trial);
        it.loss = loss_trial;
        it.objective = obj_trial;
        problem.gradient(it.grad);
        ++iter;
        if (trace) {
            trace->objective.push_back(it.objective);
        }

        auto now = sign_pattern(it.theta);
        if (now == signs && now != polished) {
            polished = now;
            std::vector<bool> free(d);
            std::vector<double> lin(d, 0.0);
            for (std::size_t j = 0; j < d; ++j) {
                free[j] = problem.active(j) && now[j] != 0;
                lin[j] = free[j] ? penalty[j] * now[j] : 0.0;
            }
            // Recompute the objective in the linear-term form so that both
            // phases compare identically rounded values.
            const double obj = it.loss + linear_term(lin, it.theta);
            if (obj == it.objective) {
                newton(problem, it, free, lin, cfg.tol, cfg.max_iter - iter, iter, trace);
                now = sign_pattern(it.theta);
            }
        }
        signs = std::move(now);
    }
    if (!converged) {
        converged = optimality(it.theta, it.grad) <= cfg.tol;
    }
    return finish(problem, it, cfg.C, iter, converged);
}

} // namespace

double soft_threshold(double w, double threshold) noexcept
{
    if (w > threshold) {
        return w - threshold;
    }
    if (w < -threshold) {
        return w + threshold;
    }
    return 0.0;
}

LogisticLoss logistic_loss(const TrainingView& data, std::span<const double> coefficients, double intercept)
{
    check_view(data);
    if (coefficients.size() != data.X.cols()) {
        throw DimensionMismatch("logistic_loss: coefficient count differs from feature count");
    }
    const auto omega = normalized_weights(data);
    LogisticLoss out;
    out.grad_coefficients.assign(coefficients.size(), 0.0);
    for (std::size_t i = 0; i < data.y.size(); ++i) {
        const auto x = data.X.row(i);
        double t = intercept;
        for (std::size_t j = 0; j < x.size(); ++j) {
            t += coefficients[j] * x[j];
        }
        const double y = static_cast<double>(data.y[i]);
        out.value += omega[i] * (softplus(t) - y * t);
        const double r = omega[i] * (sigmoid(t) - y);
        for (std::size_t j = 0; j < x.size(); ++j) {
            out.grad_coefficients[j] += r * x[j];
        }
        out.grad_intercept += r;
    }
    return out;
}

LinearSurrogate fit_logistic(const TrainingView& data, const FitConfig& cfg, SolverTrace* trace)
{
    cfg.validate();
    check_view(data);
    if (cfg.family != Family::logistic) {
        throw InvalidArgument("fit_logistic: config family must be logistic");
    }
    auto omega = normalized_weights(data);
    if (auto constant = degenerate_model(data, std::nullopt)) {
        if (trace) {
            trace->objective.clear();
        }
        return *constant;
    }
    StandardizedProblem problem(data, std::move(omega));
    return solve_newton(problem, cfg, trace);
}

LinearSurrogate fit_logistic_l1(const TrainingView& data, const FitConfig& cfg, const LinearSurrogate* warm_start,
                                SolverTrace* trace)
{
    cfg.validate();
    check_view(data);
    if (cfg.family != Family::logistic_l1) {
        throw InvalidArgument("fit_logistic_l1: config family must be logistic_l1");
    }
    const double C = *cfg.C;
    auto omega = normalized_weights(data);
    if (auto constant = degenerate_model(data, C)) {
        if (trace) {
            trace->objective.clear();
        }
        return *constant;
    }
    StandardizedProblem problem(data, std::move(omega));
    const std::size_t d = problem.dim();
    std::vector<double> penalty(d, 1.0 / C);
    if (!cfg.effective_standardize()) {
        // (1/C)|w_j| = (1/C)|v_j| / s_j in standardized coordinates.
        for (std::size_t j = 0; j < d; ++j) {
            penalty[j] = 1.0 / (C * problem.scale(j));
        }
    }
    std::vector<double> theta(d + 1, 0.0);
    if (warm_start && !warm_start->degenerate) {
        if (warm_start->coefficients.size() != d) {
            throw DimensionMismatch("fit_logistic_l1: warm start has the wrong dimension");
        }
        theta = problem.to_standard(*warm_start);
    }
    return solve_l1(problem, penalty, std::move(theta), cfg, trace);
}

LinearSurrogate fit_logistic(const Neighbourhood& N, const FitConfig& cfg, SolverTrace* trace)
{
    return fit_logistic(TrainingView::of(N), cfg, trace);
}

LinearSurrogate fit_logistic_l1(const Neighbourhood& N, const FitConfig& cfg, const LinearSurrogate* warm_start,
                                SolverTrace* trace)
{
    return fit_logistic_l1(TrainingView::of(N), cfg, warm_start, trace);
}

} // namespace surrscope
