#include <bit>
#include <cmath>

#include "surrscope/analysis/analysis.hpp"
#include "surrscope/core/error.hpp"
#include "surrscope/core/rng.hpp"
#include "surrscope/sampling/sampling.hpp"

namespace surrscope {

namespace {

std::uint64_t radius_key(double radius) noexcept
{
    // -0.0 and 0.0 name the same ball.
    return std::bit_cast<std::uint64_t>(radius == 0.0 ? 0.0 : radius);
}

} // namespace

void SpecDefaults::validate() const
{
    if (n_samples == 0) {
        throw InvalidArgument("n_samples must be positive");
    }
    if (eval_samples == 0) {
        throw InvalidArgument("eval_samples must be positive");
    }
    if (kernel_width && !(*kernel_width > 0.0 && std::isfinite(*kernel_width))) {
        throw InvalidArgument("kernel_width must be positive");
    }
    if (eval_kind == EvalKind::meshgrid) {
        throw InvalidArgument("local analyses evaluate on train_neighbourhood or fresh_neighbourhood");
    }
}

RngSeed local_train_seed(RngSeed base, double radius) noexcept
{
    return derive_seed(base, "local.train", radius_key(radius));
}

RngSeed local_eval_seed(RngSeed base, double radius) noexcept
{
    return derive_seed(base, "local.eval", radius_key(radius));
}

RngSeed bootstrap_replicate_seed(RngSeed base, double radius, std::size_t b) noexcept
{
    return derive_seed(derive_seed(base, "bootstrap.radius", radius_key(radius)), "replicate", b);
}

LocalFit fit_local(const BlackBox& bb, const Instance& x, double radius, const FitConfig& fit,
                   const SpecDefaults& defaults, RngSeed seed, const ExecPolicy& exec)
{
    fit.validate();
    defaults.validate();
    const NeighbourhoodSpec spec(x, radius, defaults.n_samples, local_train_seed(seed, radius), defaults.kernel_width);
    const auto N = build_neighbourhood(spec, bb, exec);

    LocalFit out;
    out.radius = radius;
    out.surrogate = fit_surrogate(N, fit);
    out.complexity = complexity(out.surrogate);
    out.degenerate = is_degenerate(out.surrogate);
    out.train_positive = N.labels().count_positive();
    out.train_size = N.size();
    if (defaults.eval_kind == EvalKind::train_neighbourhood) {
        out.fidelity = fidelity_from_labels(N.labels(), surrogate_predict(out.surrogate, N.points()),
                                            EvalKind::train_neighbourhood);
    } else {
        const auto X_eval = fresh_eval_set(spec, local_eval_seed(seed, radius), defaults.eval_samples, exec);
        out.fidelity = evaluate(out.surrogate, bb, X_eval, EvalKind::fresh_neighbourhood);
    }
    return out;
}

} // namespace surrscope
