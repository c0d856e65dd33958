#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nrpb {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Ordered list of per-mode Fock truncations. Mode order for the
/// three-cavity system is (a, b, c).
class CompositeSpace {
public:
    CompositeSpace() = default;
    explicit CompositeSpace(std::vector<int> mode_dims);

    static CompositeSpace single(int dim) { return CompositeSpace({dim}); }

    const std::vector<int>& mode_dims() const noexcept { return dims_; }
    int num_modes() const noexcept { return static_cast<int>(dims_.size()); }
    int mode_dim(int k) const { return dims_.at(static_cast<std::size_t>(k)); }
    int total_dim() const noexcept { return total_; }

    /// Flat basis index of the product state |n_0, n_1, ...>; the last mode
    /// varies fastest, matching the Kronecker block convention.
    int index_of(const std::vector<int>& occupations) const;

    friend bool operator==(const CompositeSpace&, const CompositeSpace&) = default;

private:
    std::vector<int> dims_;
    int total_ = 1;
};

/// Dense operator on a composite space.
class Operator {
public:
    Operator(CompositeSpace space, CMatrix data);

    static Operator identity(const CompositeSpace& space);
    static Operator zero(const CompositeSpace& space);

    const CompositeSpace& space() const noexcept { return space_; }
    const CMatrix& data() const noexcept { return data_; }
    int dim() const noexcept { return space_.total_dim(); }

    Complex operator()(int row, int col) const { return data_(row, col); }

    Operator& operator+=(const Operator& other);
    Operator& operator-=(const Operator& other);
    Operator& operator*=(Complex s);

    friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
    friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
    friend Operator operator*(Operator lhs, Complex s) { return lhs *= s; }
    friend Operator operator*(Complex s, Operator rhs) { return rhs *= s; }
    friend Operator operator*(const Operator& lhs, const Operator& rhs);

private:
    CompositeSpace space_;
    CMatrix data_;
};

/// Truncated bosonic lowering operator, <m-1|a|m> = sqrt(m).
Operator annihilation(int dim);
/// diag(0, 1, ..., dim-1)
Operator number(int dim);

Operator adjoint(const Operator& op);

/// Kronecker product; (A x B)[i*dB + k, j*dB + l] = A[i,j] * B[k,l].
Operator tensor(const Operator& lhs, const Operator& rhs);

/// Lift a single-mode operator onto mode `mode_index` of `space`.
Operator embed(const Operator& op, int mode_index, const CompositeSpace& space);

Complex trace(const Operator& op);
Operator commutator(const Operator& lhs, const Operator& rhs);

} // namespace nrpb
