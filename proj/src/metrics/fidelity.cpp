#include "surrscope/metrics/fidelity.hpp"

#include "surrscope/core/error.hpp"
#include "surrscope/core/rng.hpp"
#include "surrscope/sampling/sampling.hpp"

namespace surrscope {

std::string to_string(EvalKind k)
{
    switch (k) {
    case EvalKind::train_neighbourhood:
        return "train_neighbourhood";
    case EvalKind::fresh_neighbourhood:
        return "fresh_neighbourhood";
    case EvalKind::meshgrid:
        return "meshgrid";
    }
    return "unknown";
}

EvalKind eval_kind_from_string(const std::string& name)
{
    if (name == "train_neighbourhood") {
        return EvalKind::train_neighbourhood;
    }
    if (name == "fresh_neighbourhood") {
        return EvalKind::fresh_neighbourhood;
    }
    if (name == "meshgrid") {
        return EvalKind::meshgrid;
    }
    throw InvalidArgument("unknown eval kind '" + name + "'");
}

FidelityReport fidelity_from_labels(const BinaryLabels& truth, const BinaryLabels& predicted, EvalKind kind)
{
    if (truth.empty()) {
        throw InvalidArgument("evaluate: empty evaluation set");
    }
    if (truth.size() != predicted.size()) {
        throw DimensionMismatch("evaluate: label vectors differ in length");
    }
    FidelityReport r;
    r.eval_kind = kind;
    r.n_eval = truth.size();
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] == 1;
        const bool p = predicted[i] == 1;
        if (t) {
            ++(p ? r.counts.tp : r.counts.fn);
        } else {
            ++(p ? r.counts.fp : r.counts.tn);
        }
    }
    const auto& c = r.counts;
    r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(r.n_eval);
    if (c.tp + c.fn > 0) {
        r.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    if (c.tn + c.fp > 0) {
        r.tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    }
    return r;
}

FidelityReport evaluate(const Surrogate& s, const BlackBox& bb, const FeatureMatrix& X_eval, EvalKind kind)
{
    if (X_eval.rows() == 0) {
        throw InvalidArgument("evaluate: empty evaluation set");
    }
    const auto truth = bb.predict(X_eval);
    const auto predicted = surrogate_predict(s, X_eval);
    return fidelity_from_labels(truth, predicted, kind);
}

FeatureMatrix fresh_eval_set(const NeighbourhoodSpec& spec, RngSeed eval_seed, std::size_t size,
                             const ExecPolicy& exec)
{
    const auto eval_spec = spec.with_seed(derive_seed(eval_seed, "fresh_eval")).with_size(size);
    return sample_ball(eval_spec, exec);
}

} // namespace surrscope
