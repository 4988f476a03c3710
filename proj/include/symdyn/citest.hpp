#ifndef SYMDYN_CITEST_HPP
#define SYMDYN_CITEST_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "symdyn/rng.hpp"
#include "symdyn/stats.hpp"

namespace symdyn {

/**
 * Outcome of a conditional independence test. `statistic` is in the test's
 * own units (correlation, nats, ...); `dependent` is p_value < alpha at the
 * level the caller supplied.
 */
struct CiResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool dependent = false;
};

/**
 * Partial correlation test. Both variables are residualized on the
 * conditioning columns by OLS (with intercept), the residual correlation r
 * is converted to t = r * sqrt(dof / (1 - r^2)) with dof = T - |Z| - 2, and
 * the p-value is two-sided Student t.
 */
inline CiResult parcorr_test(const std::vector<double>& x,
                             const std::vector<double>& y,
                             const Eigen::MatrixXd& Z, double alpha = 0.01) {
    const Eigen::Index T = static_cast<Eigen::Index>(x.size());
    if (static_cast<Eigen::Index>(y.size()) != T || (Z.cols() > 0 && Z.rows() != T))
        throw DataError("parcorr_test: length mismatch");
    const double dof = static_cast<double>(T) - static_cast<double>(Z.cols()) - 2.0;
    if (dof < 1.0) throw DataError("parcorr_test: too few samples");

    Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), T);
    Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), T);
    Eigen::VectorXd rx = ols_residuals(xv, Z);
    Eigen::VectorXd ry = ols_residuals(yv, Z);

    const double denom = std::sqrt(rx.squaredNorm() * ry.squaredNorm());
    double r = denom == 0.0 ? 0.0 : rx.dot(ry) / denom;
    r = std::clamp(r, -1.0, 1.0);

    CiResult res;
    res.statistic = r;
    if (std::abs(r) >= 1.0) {
        res.p_value = 0.0;
    } else {
        const double t = r * std::sqrt(dof / (1.0 - r * r));
        res.p_value = t_test_pvalue(t, dof);
    }
    res.dependent = res.p_value < alpha;
    return res;
}

struct CmiParams {
    int k = 4;
    int n_perm = 200;
    int k_perm = 5;
    std::uint64_t seed = 0;
};

namespace detail {

/**
 * Shared state for kNN CMI evaluation on fixed data: per-axis Chebyshev
 * distance matrices for x, y and the z block (all z columns collapsed into
 * one max-distance matrix), plus a digamma table. Permuting x only permutes
 * indices into the x matrix, so replicates reuse all distances.
 */
class CmiWorkspace {
  public:
    CmiWorkspace(const std::vector<double>& x, const std::vector<double>& y,
                 const Eigen::MatrixXd& Z, int k)
        : T_(static_cast<int>(x.size())), k_(k) {
        if (static_cast<int>(y.size()) != T_ || (Z.cols() > 0 && Z.rows() != T_))
            throw DataError("cmi: length mismatch");
        if (T_ < k + 2) throw DataError("cmi: too few samples for k neighbors");
        dx_ = pair_distances(x);
        dy_ = pair_distances(y);
        dz_.assign(static_cast<std::size_t>(T_) * T_, 0.0);
        for (Eigen::Index c = 0; c < Z.cols(); ++c) {
            for (int i = 0; i < T_; ++i) {
                const double zi = Z(i, c);
                double* row = dz_.data() + static_cast<std::size_t>(i) * T_;
                for (int j = 0; j < T_; ++j) {
                    const double d = std::abs(zi - Z(j, c));
                    if (d > row[j]) row[j] = d;
                }
            }
        }
        psi_ = digamma_table(static_cast<std::size_t>(T_) + 1);
        identity_.resize(T_);
        std::iota(identity_.begin(), identity_.end(), 0);
    }

    int length() const { return T_; }
    const std::vector<double>& z_distances() const { return dz_; }

    double estimate() const { return estimate(identity_); }

    /// CMI estimate with x values rearranged so position i holds x[perm[i]].
    double estimate(const std::vector<int>& perm) const {
        const int T = T_;
        double acc = 0.0;
        std::vector<double> knn(k_);
        for (int i = 0; i < T; ++i) {
            const double* rx = dx_.data() + static_cast<std::size_t>(perm[i]) * T;
            const double* ry = dy_.data() + static_cast<std::size_t>(i) * T;
            const double* rz = dz_.data() + static_cast<std::size_t>(i) * T;
            int filled = 0;
            for (int j = 0; j < T; ++j) {
                if (j == i) continue;
                double d = rx[perm[j]];
                if (ry[j] > d) d = ry[j];
                if (rz[j] > d) d = rz[j];
                if (filled < k_) {
                    knn[filled++] = d;
                    if (filled == k_) std::make_heap(knn.begin(), knn.end());
                } else if (d < knn.front()) {
                    std::pop_heap(knn.begin(), knn.end());
                    knn.back() = d;
                    std::push_heap(knn.begin(), knn.end());
                }
            }
            const double eps = knn.front();
            int nz = 0, nxz = 0, nyz = 0;
            for (int j = 0; j < T; ++j) {
                if (j == i) continue;
                if (rz[j] < eps) {
                    ++nz;
                    if (rx[perm[j]] < eps) ++nxz;
                    if (ry[j] < eps) ++nyz;
                }
            }
            acc += psi_[nxz + 1] + psi_[nyz + 1] - psi_[nz + 1];
        }
        return psi_[k_] - acc / static_cast<double>(T);
    }

  private:
    std::vector<double> pair_distances(const std::vector<double>& v) const {
        std::vector<double> d(static_cast<std::size_t>(T_) * T_);
        for (int i = 0; i < T_; ++i) {
            const double vi = v[i];
            double* row = d.data() + static_cast<std::size_t>(i) * T_;
            for (int j = 0; j < T_; ++j) row[j] = std::abs(vi - v[j]);
        }
        return d;
    }

    int T_;
    int k_;
    std::vector<double> dx_, dy_, dz_;
    std::vector<double> psi_;
    std::vector<int> identity_;
};

/// Uniform jitter of amplitude 1e-10 * SD breaks distance ties; a constant
/// column falls back to an absolute 1e-10 amplitude so points stay distinct.
inline std::vector<double> jittered(const std::vector<double>& v, Rng& rng) {
    double sd = v.size() > 1 ? stddev(v) : 0.0;
    const double amp = 1e-10 * (sd > 0.0 ? sd : 1.0);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] + amp * rng.uniform();
    return out;
}

inline Eigen::MatrixXd jittered(const Eigen::MatrixXd& Z, Rng& rng) {
    Eigen::MatrixXd out = Z;
    for (Eigen::Index c = 0; c < Z.cols(); ++c) {
        std::vector<double> col(Z.rows());
        for (Eigen::Index r = 0; r < Z.rows(); ++r) col[r] = Z(r, c);
        auto j = jittered(col, rng);
        for (Eigen::Index r = 0; r < Z.rows(); ++r) out(r, c) = j[r];
    }
    return out;
}

/// k_perm nearest z-neighbors per point (self included), ties broken by
/// index so the lists are reproducible.
inline std::vector<std::vector<int>> z_neighbor_lists(
    const std::vector<double>& dz, int T, int k_perm) {
    const int k = std::min(k_perm, T);
    std::vector<std::vector<int>> nbrs(T);
    std::vector<int> idx(T);
    for (int i = 0; i < T; ++i) {
        const double* row = dz.data() + static_cast<std::size_t>(i) * T;
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                          [&](int a, int b) {
                              if (row[a] != row[b]) return row[a] < row[b];
                              return a < b;
                          });
        nbrs[i].assign(idx.begin(), idx.begin() + k);
    }
    return nbrs;
}

/**
 * One local-permutation draw: indices are visited in random order and each
 * position takes an unused x value from its k_perm nearest z-neighbors;
 * positions whose neighbor values are all taken get the remaining values in
 * shuffled order. The result is a bijection that roughly preserves the
 * x-z relationship, which keeps the null conditional.
 */
inline std::vector<int> local_permutation(
    const std::vector<std::vector<int>>& nbrs, int T, Rng& rng) {
    std::vector<int> order(T);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<int> perm(T, -1);
    std::vector<char> used(T, 0);
    std::vector<int> deferred;
    std::vector<int> cands;
    for (int i : order) {
        cands = nbrs[i];
        rng.shuffle(cands);
        int chosen = -1;
        for (int c : cands) {
            if (!used[c]) {
                chosen = c;
                break;
            }
        }
        if (chosen >= 0) {
            perm[i] = chosen;
            used[chosen] = 1;
        } else {
            deferred.push_back(i);
        }
    }
    if (!deferred.empty()) {
        std::vector<int> leftovers;
        for (int j = 0; j < T; ++j)
            if (!used[j]) leftovers.push_back(j);
        rng.shuffle(leftovers);
        for (std::size_t d = 0; d < deferred.size(); ++d)
            perm[deferred[d]] = leftovers[d];
    }
    return perm;
}

}  // namespace detail

/**
 * kNN conditional mutual information I(x; y | z) in nats, after the
 * Frenzel-Pompe construction: with eps_i the Chebyshev distance to the k-th
 * nearest neighbor in the joint space and n_xz, n_yz, n_z the strict-ball
 * neighbor counts in the marginal spaces,
 *
 *   CMI = psi(k) - < psi(n_xz+1) + psi(n_yz+1) - psi(n_z+1) >.
 *
 * With no conditioning columns n_z saturates at T-1 and this reduces to the
 * KSG mutual information estimator. Inputs are de-tied with a deterministic
 * jitter; the two marginal roles are canonicalized first so that swapping x
 * and y returns the identical value.
 */
inline double cmi_knn_estimate(const std::vector<double>& x,
                               const std::vector<double>& y,
                               const Eigen::MatrixXd& Z, int k = 4) {
    const std::vector<double>* a = &x;
    const std::vector<double>* b = &y;
    if (std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end()))
        std::swap(a, b);
    Rng rng(0x5d7a9c3b21f0e681ULL);
    auto aj = detail::jittered(*a, rng);
    auto bj = detail::jittered(*b, rng);
    Eigen::MatrixXd zj = detail::jittered(Z, rng);
    detail::CmiWorkspace ws(aj, bj, zj, k);
    return ws.estimate();
}

/**
 * Permutation test of conditional independence built on cmi_knn_estimate.
 * Replicates shuffle x within nearest z-neighborhoods (full shuffles when z
 * is empty); the p-value is (1 + #replicates >= observed) / (n_perm + 1), so
 * its granularity is 1/(n_perm+1). Deterministic given params.seed.
 */
inline CiResult cmi_knn_test(const std::vector<double>& x,
                             const std::vector<double>& y,
                             const Eigen::MatrixXd& Z,
                             const CmiParams& params = CmiParams{},
                             double alpha = 0.01) {
    Rng base(params.seed);
    Rng jit = base.derive("jitter");
    auto xj = detail::jittered(x, jit);
    auto yj = detail::jittered(y, jit);
    Eigen::MatrixXd zj = detail::jittered(Z, jit);
    detail::CmiWorkspace ws(xj, yj, zj, params.k);
    const int T = ws.length();

    const double observed = ws.estimate();
    std::vector<std::vector<int>> nbrs;
    const bool local = Z.cols() > 0;
    if (local)
        nbrs = detail::z_neighbor_lists(ws.z_distances(), T, params.k_perm);

    int count_ge = 0;
    std::vector<int> perm(T);
    for (int r = 0; r < params.n_perm; ++r) {
        Rng rng = base.derive("perm", static_cast<std::uint64_t>(r));
        if (local) {
            perm = detail::local_permutation(nbrs, T, rng);
        } else {
            std::iota(perm.begin(), perm.end(), 0);
            rng.shuffle(perm);
        }
        if (ws.estimate(perm) >= observed) ++count_ge;
    }

    CiResult res;
    res.statistic = observed;
    res.p_value = static_cast<double>(1 + count_ge) /
                  static_cast<double>(params.n_perm + 1);
    res.dependent = res.p_value < alpha;
    return res;
}

struct TeParams {
    int bins = 8;
    int n_surrogate = 200;
    std::uint64_t seed = 0;
};

namespace detail {

/// Equal-frequency discretization. Returns bin codes in [0, bins); heavy
/// ties can leave bins empty, which the caller checks.
inline std::vector<int> equal_frequency_bins(const std::vector<double>& v,
                                             int bins) {
    const int T = static_cast<int>(v.size());
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    for (int b = 1; b < bins; ++b)
        edges.push_back(sorted[static_cast<std::size_t>(b) * T / bins]);
    std::vector<int> codes(T);
    for (int t = 0; t < T; ++t) {
        int c = static_cast<int>(
            std::upper_bound(edges.begin(), edges.end(), v[t]) - edges.begin());
        codes[t] = c;
    }
    return codes;
}

inline int populated_bin_count(const std::vector<int>& codes, int bins) {
    std::vector<char> seen(bins, 0);
    for (int c : codes) seen[c] = 1;
    int n = 0;
    for (char s : seen) n += s;
    return n;
}

/// Plug-in estimate of I(a; b | c) from discrete triples.
inline double discrete_cmi(const std::vector<int>& a, const std::vector<int>& b,
                           const std::vector<int>& c, int bins) {
    const int n = static_cast<int>(a.size());
    const int B2 = bins * bins;
    std::vector<int> n_abc(bins * B2, 0), n_ac(B2, 0), n_bc(B2, 0), n_c(bins, 0);
    for (int t = 0; t < n; ++t) {
        ++n_abc[(a[t] * bins + b[t]) * bins + c[t]];
        ++n_ac[a[t] * bins + c[t]];
        ++n_bc[b[t] * bins + c[t]];
        ++n_c[c[t]];
    }
    double te = 0.0;
    for (int ia = 0; ia < bins; ++ia)
        for (int ib = 0; ib < bins; ++ib)
            for (int ic = 0; ic < bins; ++ic) {
                const int cnt = n_abc[(ia * bins + ib) * bins + ic];
                if (cnt == 0) continue;
                const double num = static_cast<double>(cnt) * n_c[ic];
                const double den = static_cast<double>(n_ac[ia * bins + ic]) *
                                   n_bc[ib * bins + ic];
                te += cnt * std::log(num / den);
            }
    return te / static_cast<double>(n);
}

}  // namespace detail

/**
 * Transfer entropy from source to target at the given lag,
 * TE = I(target_t ; source_{t-lag} | target_{t-1}), estimated by plug-in
 * entropies over equal-frequency bins. Significance comes from circular
 * shifts of the source by a random offset in [1, T-1]; the p-value has
 * granularity 1/(n_surrogate+1).
 */
inline CiResult transfer_entropy(const std::vector<double>& source,
                                 const std::vector<double>& target, int lag,
                                 const TeParams& params = TeParams{},
                                 double alpha = 0.01) {
    const int T = static_cast<int>(source.size());
    if (static_cast<int>(target.size()) != T)
        throw DataError("transfer_entropy: length mismatch");
    if (lag < 1) throw ConfigError("transfer_entropy: lag must be >= 1");
    const int t0 = std::max(lag, 1);
    if (T - t0 < 8) throw DataError("transfer_entropy: series too short");

    auto src = detail::equal_frequency_bins(source, params.bins);
    auto tgt = detail::equal_frequency_bins(target, params.bins);
    if (detail::populated_bin_count(src, params.bins) < 3)
        throw DataError("fewer than 3 populated bins in source marginal");
    if (detail::populated_bin_count(tgt, params.bins) < 3)
        throw DataError("fewer than 3 populated bins in target marginal");

    const int n = T - t0;
    std::vector<int> a(n), b(n), c(n);
    for (int t = t0; t < T; ++t) {
        a[t - t0] = tgt[t];
        b[t - t0] = src[t - lag];
        c[t - t0] = tgt[t - 1];
    }
    const double observed = detail::discrete_cmi(a, b, c, params.bins);

    Rng rng(params.seed);
    int count_ge = 0;
    std::vector<int> bs(n);
    for (int r = 0; r < params.n_surrogate; ++r) {
        const int offset =
            1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(T - 1)));
        for (int t = t0; t < T; ++t)
            bs[t - t0] = src[(t - lag + offset) % T];
        if (detail::discrete_cmi(a, bs, c, params.bins) >= observed) ++count_ge;
    }

    CiResult res;
    res.statistic = observed;
    res.p_value = static_cast<double>(1 + count_ge) /
                  static_cast<double>(params.n_surrogate + 1);
    res.dependent = res.p_value < alpha;
    return res;
}

}  // namespace symdyn

#endif  // SYMDYN_CITEST_HPP
