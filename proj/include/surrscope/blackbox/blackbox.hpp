#pragma once

#include <memory>
#include <string>

#include "surrscope/core/types.hpp"

namespace surrscope {

/// The opaque classifier being explained. Callers can query hard labels and
/// nothing else.
class BlackBox {
public:
    virtual ~BlackBox() = default;

    virtual std::size_t input_dim() const noexcept = 0;

    /// Labels for every row of X. Deterministic, and row-wise: permuting the
    /// rows of X permutes the labels the same way.
    BinaryLabels predict(const FeatureMatrix& X) const;

    virtual std::string kind() const = 0;

protected:
    /// X has already been checked against input_dim() and is non-empty.
    virtual BinaryLabels predict_rows(const FeatureMatrix& X) const = 0;
};

using BlackBoxRef = std::shared_ptr<const BlackBox>;

/// A black-box that answers the same label everywhere.
class ConstantBlackBox final : public BlackBox {
public:
    ConstantBlackBox(std::size_t dim, std::uint8_t label);

    std::size_t input_dim() const noexcept override { return dim_; }
    std::string kind() const override { return "constant"; }

protected:
    BinaryLabels predict_rows(const FeatureMatrix& X) const override;

private:
    std::size_t dim_;
    std::uint8_t label_;
};

} // namespace surrscope
