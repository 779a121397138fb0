#include "entangle/state_ops.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace entangle {

namespace {

// Local dimension product of a party list.
std::size_t dim_of(const SystemShape& shape, const std::vector<int>& parties) {
    std::size_t d = 1;
    for (int p : parties) d *= static_cast<std::size_t>(shape.dim(p));
    return d;
}

// Reshapes the amplitude vector into a (kept x traced) matrix. Rows index the
// kept parties' digits, columns the traced parties' digits, both in ascending
// party order with the first party most significant.
Eigen::MatrixXcd reshape_bipartite(const PureState& state, const PartySubset& keep) {
    const SystemShape& shape = state.shape();
    const int n = shape.num_parties();
    const std::vector<int> kp = keep.parties();
    const std::vector<int> tp = keep.complement().parties();
    const std::size_t dk = dim_of(shape, kp);
    const std::size_t dt = dim_of(shape, tp);

    // Row/column contribution of each party's digit.
    std::vector<std::size_t> sub_stride(static_cast<std::size_t>(n), 0);
    std::vector<bool> kept(static_cast<std::size_t>(n), false);
    {
        std::size_t s = 1;
        for (auto it = kp.rbegin(); it != kp.rend(); ++it) {
            sub_stride[static_cast<std::size_t>(*it)] = s;
            kept[static_cast<std::size_t>(*it)] = true;
            s *= static_cast<std::size_t>(shape.dim(*it));
        }
        s = 1;
        for (auto it = tp.rbegin(); it != tp.rend(); ++it) {
            sub_stride[static_cast<std::size_t>(*it)] = s;
            s *= static_cast<std::size_t>(shape.dim(*it));
        }
    }

    Eigen::MatrixXcd a(dk, dt);
    const std::size_t total = shape.total_dim();
    for (std::size_t x = 0; x < total; ++x) {
        std::size_t row = 0, col = 0;
        for (int p = 0; p < n; ++p) {
            const std::size_t contrib =
                static_cast<std::size_t>(shape.digit(x, p)) * sub_stride[static_cast<std::size_t>(p)];
            if (kept[static_cast<std::size_t>(p)])
                row += contrib;
            else
                col += contrib;
        }
        a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
            state.amplitude(x);
    }
    return a;
}

// Picks the cheaper side of the (subset, complement) bipartition.
PartySubset smaller_side(const PureState& state, const PartySubset& subset) {
    const PartySubset comp = subset.complement();
    const std::size_t ds = dim_of(state.shape(), subset.parties());
    const std::size_t dc = dim_of(state.shape(), comp.parties());
    return ds <= dc ? subset : comp;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw EigenFailureError("Hermitian eigenvalue computation did not converge");
    return es.eigenvalues();
}

// Eigenvalues of the reduced density operator of `side` (not necessarily the
// requested subset; for pure states both sides share the nonzero spectrum).
Eigen::VectorXd reduced_spectrum(const PureState& state, const PartySubset& side) {
    Eigen::MatrixXcd a = reshape_bipartite(state, side);
    return hermitian_eigenvalues(a * a.adjoint());
}

RankInfo rank_from_spectrum(const Eigen::VectorXd& ev, const Tolerances& tol) {
    RankInfo info;
    info.lambda_max = ev(ev.size() - 1);
    const double threshold = tol.rank_eps * info.lambda_max;
    info.rank = 0;
    double best_logdist = std::numeric_limits<double>::infinity();
    info.nearest_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double lambda = ev(i);
        if (lambda > threshold) ++info.rank;
        if (lambda > 0.0) {
            const double ratio = lambda / threshold;
            const double logdist = std::abs(std::log10(ratio));
            if (logdist < best_logdist) {
                best_logdist = logdist;
                info.nearest_ratio = ratio;
            }
        }
    }
    if (info.rank < 1) info.rank = 1;
    info.ambiguous = best_logdist < 1.0;
    return info;
}

}  // namespace

PureState normalize(SystemShape shape, Eigen::VectorXcd amplitudes) {
    if (static_cast<std::size_t>(amplitudes.size()) != shape.total_dim())
        throw DimensionMismatchError("amplitude vector length does not match the shape");
    const double n = amplitudes.norm();
    if (n < 1e-12) throw ZeroStateError("state amplitudes have (near-)zero norm");
    amplitudes /= n;
    return PureState(std::move(shape), std::move(amplitudes));
}

PureState tensor_product(const PureState& a, const PureState& b, const Limits& limits) {
    std::vector<int> dims = a.shape().dims();
    const std::vector<int>& bd = b.shape().dims();
    dims.insert(dims.end(), bd.begin(), bd.end());
    SystemShape shape(std::move(dims), limits);  // throws SizeLimitError when too big

    const std::size_t da = a.dim();
    const std::size_t db = b.dim();
    Eigen::VectorXcd out(static_cast<Eigen::Index>(da * db));
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < db; ++j)
            out(static_cast<Eigen::Index>(i * db + j)) = a.amplitude(i) * b.amplitude(j);
    return PureState(std::move(shape), std::move(out));
}

DensityMatrix partial_trace(const PureState& state, const PartySubset& keep) {
    if (keep.num_parties() != state.num_parties())
        throw DimensionMismatchError("subset refers to a different party count");
    if (keep.is_empty()) throw EmptySubsetError("cannot retain an empty party subset");
    if (keep.is_full()) {
        const Eigen::VectorXcd& v = state.amplitudes();
        return DensityMatrix(keep, v * v.adjoint());
    }
    Eigen::MatrixXcd a = reshape_bipartite(state, keep);
    return DensityMatrix(keep, a * a.adjoint());
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(rho.matrix());
    double s = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        double lambda = ev(i);
        if (lambda < -1e-6 || lambda > 1.0 + 1e-6)
            throw InvariantError("density matrix eigenvalue outside [0,1] beyond tolerance");
        lambda = std::clamp(lambda, 0.0, 1.0);
        if (lambda > 0.0) s -= lambda * std::log2(lambda);
    }
    return s;
}

double subset_entropy(const PureState& state, const PartySubset& subset) {
    if (subset.num_parties() != state.num_parties())
        throw DimensionMismatchError("subset refers to a different party count");
    if (!subset.is_nontrivial())
        throw TrivialSubsetError("subset entropy needs a nonempty, proper subset");
    return von_neumann_entropy(partial_trace(state, smaller_side(state, subset)));
}

int subset_rank(const PureState& state, const PartySubset& subset, const Tolerances& tol) {
    return subset_rank_info(state, subset, tol).rank;
}

RankInfo subset_rank_info(const PureState& state, const PartySubset& subset, const Tolerances& tol) {
    if (subset.num_parties() != state.num_parties())
        throw DimensionMismatchError("subset refers to a different party count");
    if (subset.is_empty()) throw EmptySubsetError("rank of an empty subset is undefined");
    tol.validate();
    if (subset.is_full()) {
        // |psi><psi| of a unit vector: single eigenvalue 1.
        return RankInfo{1, 1.0, std::numeric_limits<double>::infinity(), false};
    }
    return rank_from_spectrum(reduced_spectrum(state, smaller_side(state, subset)), tol);
}

PureState reduced_pure_state(const PureState& state, const PartySubset& keep, const Tolerances& tol) {
    if (keep.num_parties() != state.num_parties())
        throw DimensionMismatchError("subset refers to a different party count");
    if (keep.is_empty()) throw EmptySubsetError("cannot extract an empty party subset");
    tol.validate();
    if (keep.is_full()) return state;

    const std::vector<int> kp = keep.parties();
    std::vector<int> kept_dims;
    kept_dims.reserve(kp.size());
    for (int p : kp) kept_dims.push_back(state.shape().dim(p));
    SystemShape kept_shape(std::move(kept_dims));

    const Eigen::MatrixXcd a = reshape_bipartite(state, keep);
    const bool keep_side_smaller = a.rows() <= a.cols();
    const Eigen::MatrixXcd gram = keep_side_smaller
                                      ? Eigen::MatrixXcd(a * a.adjoint())
                                      : Eigen::MatrixXcd(a.adjoint() * a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
    if (es.info() != Eigen::Success)
        throw EigenFailureError("Hermitian eigenvalue computation did not converge");

    const RankInfo info = rank_from_spectrum(es.eigenvalues(), tol);
    if (info.rank > 1)
        throw NotSeparableError("subset is entangled with its complement (reduced rank " +
                                std::to_string(info.rank) + ")");

    const Eigen::Index top = es.eigenvalues().size() - 1;
    Eigen::VectorXcd v;
    if (keep_side_smaller) {
        v = es.eigenvectors().col(top);
    } else {
        v = a * es.eigenvectors().col(top);
        v /= v.norm();
    }
    return PureState(std::move(kept_shape), std::move(v));
}

PureState permute_parties(const PureState& state, const std::vector<int>& source_party) {
    const SystemShape& shape = state.shape();
    const int n = shape.num_parties();
    if (static_cast<int>(source_party.size()) != n)
        throw DimensionMismatchError("permutation length does not match party count");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int p : source_party) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
            throw DimensionMismatchError("source_party is not a permutation");
        seen[static_cast<std::size_t>(p)] = true;
    }

    std::vector<int> out_dims(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        out_dims[static_cast<std::size_t>(j)] = shape.dim(source_party[static_cast<std::size_t>(j)]);
    SystemShape out_shape(std::move(out_dims));

    const std::size_t total = shape.total_dim();
    Eigen::VectorXcd out(static_cast<Eigen::Index>(total));
    for (std::size_t x = 0; x < total; ++x) {
        std::size_t src = 0;
        for (int j = 0; j < n; ++j) {
            const int g = out_shape.digit(x, j);
            src += static_cast<std::size_t>(g) * shape.stride(source_party[static_cast<std::size_t>(j)]);
        }
        out(static_cast<Eigen::Index>(x)) = state.amplitude(src);
    }
    return PureState(std::move(out_shape), std::move(out));
}

Complex inner_product(const PureState& a, const PureState& b) {
    if (!(a.shape() == b.shape()))
        throw DimensionMismatchError("inner product needs matching shapes");
    return a.amplitudes().dot(b.amplitudes());
}

double fidelity(const PureState& a, const PureState& b) {
    return std::abs(inner_product(a, b));
}

std::vector<double> subset_entropy_table(const PureState& state, int threads) {
    const int n = state.num_parties();
    if (n < 2) return {};
    const std::uint64_t count = (std::uint64_t{1} << n) - 2;
    std::vector<double> out(count);

    auto fill = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t idx = lo; idx < hi; ++idx)
            out[idx] = subset_entropy(state, PartySubset(idx + 1, n));
    };

    if (threads <= 1 || count < 64) {
        fill(0, count);
        return out;
    }

    const std::uint64_t workers = std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::uint64_t chunk = (count + workers - 1) / workers;
    for (std::uint64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                fill(w * chunk, std::min(count, (w + 1) * chunk));
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace entangle
