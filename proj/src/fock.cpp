#include "nrpb/fock.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

#include "nrpb/error.hpp"

namespace nrpb {

namespace {

void require_mode_dim(int dim)
{
    if (dim < 2) {
        throw Error(ErrorCode::InvalidDimension,
                    "mode dimension must be >= 2, got " + std::to_string(dim));
    }
}

void require_same_space(const Operator& lhs, const Operator& rhs, const char* what)
{
    if (!(lhs.space() == rhs.space())) {
        throw Error(ErrorCode::InvalidOperands,
                    std::string(what) + ": operands live on different spaces");
    }
}

} // namespace

CompositeSpace::CompositeSpace(std::vector<int> mode_dims)
    : dims_(std::move(mode_dims))
{
    if (dims_.empty()) {
        throw Error(ErrorCode::InvalidDimension, "composite space needs at least one mode");
    }
    for (int d : dims_) {
        require_mode_dim(d);
        total_ *= d;
    }
}

int CompositeSpace::index_of(const std::vector<int>& occupations) const
{
    if (occupations.size() != dims_.size()) {
        throw Error(ErrorCode::InvalidDimension, "occupation list does not match mode count");
    }
    int idx = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (occupations[k] < 0 || occupations[k] >= dims_[k]) {
            throw Error(ErrorCode::InvalidDimension, "occupation outside truncation");
        }
        idx = idx * dims_[k] + occupations[k];
    }
    return idx;
}

Operator::Operator(CompositeSpace space, CMatrix data)
    : space_(std::move(space)), data_(std::move(data))
{
    const auto n = space_.total_dim();
    if (data_.rows() != n || data_.cols() != n) {
        throw Error(ErrorCode::InvalidDimension,
                    "operator matrix is " + std::to_string(data_.rows()) + "x" +
                        std::to_string(data_.cols()) + ", space dimension is " +
                        std::to_string(n));
    }
}

Operator Operator::identity(const CompositeSpace& space)
{
    return {space, CMatrix::Identity(space.total_dim(), space.total_dim())};
}

Operator Operator::zero(const CompositeSpace& space)
{
    return {space, CMatrix::Zero(space.total_dim(), space.total_dim())};
}

Operator& Operator::operator+=(const Operator& other)
{
    require_same_space(*this, other, "operator+");
    data_ += other.data_;
    return *this;
}

Operator& Operator::operator-=(const Operator& other)
{
    require_same_space(*this, other, "operator-");
    data_ -= other.data_;
    return *this;
}

Operator& Operator::operator*=(Complex s)
{
    data_ *= s;
    return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs)
{
    require_same_space(lhs, rhs, "operator*");
    return {lhs.space(), lhs.data() * rhs.data()};
}

Operator annihilation(int dim)
{
    require_mode_dim(dim);
    CMatrix m = CMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        m(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return {CompositeSpace::single(dim), std::move(m)};
}

Operator number(int dim)
{
    require_mode_dim(dim);
    CMatrix m = CMatrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) {
        m(n, n) = static_cast<double>(n);
    }
    return {CompositeSpace::single(dim), std::move(m)};
}

Operator adjoint(const Operator& op)
{
    return {op.space(), op.data().adjoint()};
}

Operator tensor(const Operator& lhs, const Operator& rhs)
{
    std::vector<int> dims = lhs.space().mode_dims();
    const auto& tail = rhs.space().mode_dims();
    dims.insert(dims.end(), tail.begin(), tail.end());
    CMatrix product = Eigen::kroneckerProduct(lhs.data(), rhs.data()).eval();
    return {CompositeSpace(std::move(dims)), std::move(product)};
}

Operator embed(const Operator& op, int mode_index, const CompositeSpace& space)
{
    if (mode_index < 0 || mode_index >= space.num_modes()) {
        throw Error(ErrorCode::InvalidEmbedding,
                    "mode index " + std::to_string(mode_index) + " out of range");
    }
    if (op.space().num_modes() != 1 || op.dim() != space.mode_dim(mode_index)) {
        throw Error(ErrorCode::InvalidEmbedding,
                    "operator dimension " + std::to_string(op.dim()) +
                        " does not match mode " + std::to_string(mode_index));
    }
    const auto& dims = space.mode_dims();
    auto factor = [&](int k) {
        return k == mode_index ? op : Operator::identity(CompositeSpace::single(dims[k]));
    };
    Operator result = factor(0);
    for (int k = 1; k < space.num_modes(); ++k) {
        result = tensor(result, factor(k));
    }
    return result;
}

Complex trace(const Operator& op)
{
    return op.data().trace();
}

Operator commutator(const Operator& lhs, const Operator& rhs)
{
    return lhs * rhs - rhs * lhs;
}

} // namespace nrpb
