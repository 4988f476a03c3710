#ifndef SYMDYN_COMPLEXITY_HPP
#define SYMDYN_COMPLEXITY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "symdyn/errors.hpp"
#include "symdyn/stats.hpp"

namespace symdyn {

/// Sign changes of the mean-centered series; exact zeros inherit the
/// previous sign, so plateaus crossing the mean count once.
inline int zero_crossings(const std::vector<double>& x) {
    if (x.size() < 2) throw DataError("zero_crossings: need at least 2 samples");
    const double mu = mean(x);
    int count = 0, prev = 0;
    for (double v : x) {
        const double c = v - mu;
        int s = (c > 0.0) - (c < 0.0);
        if (s == 0) s = prev;
        if (prev != 0 && s != 0 && s != prev) ++count;
        if (s != 0) prev = s;
    }
    return count;
}

namespace detail {

/// Ordinal pattern of one window: positions sorted by value, ties by index.
inline std::vector<int> ordinal_pattern(const std::vector<double>& x, int start,
                                        int m, int delay) {
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return x[start + a * delay] < x[start + b * delay];
    });
    return idx;
}

}  // namespace detail

inline double permutation_entropy(const std::vector<double>& x, int m, int delay) {
    if (m < 2) throw ConfigError("permutation_entropy: order must be >= 2");
    if (delay < 1) throw ConfigError("permutation_entropy: delay must be >= 1");
    const int T = static_cast<int>(x.size());
    if (T < m * delay + 1)
        throw DataError("permutation_entropy: series too short");

    const int n_windows = T - (m - 1) * delay;
    std::map<std::vector<int>, long long> counts;
    for (int t = 0; t < n_windows; ++t)
        ++counts[detail::ordinal_pattern(x, t, m, delay)];

    double h = 0.0;
    for (const auto& [pattern, c] : counts) {
        const double p = static_cast<double>(c) / n_windows;
        h -= p * std::log(p);
    }
    double max_h = 0.0;
    for (int k = 2; k <= m; ++k) max_h += std::log(k);
    return h / max_h;
}

enum class EntropyKind { Approximate, Sample };

namespace detail {

inline double template_chebyshev(const std::vector<double>& x, int i, int j,
                                 int m) {
    double d = 0.0;
    for (int c = 0; c < m; ++c) d = std::max(d, std::abs(x[i + c] - x[j + c]));
    return d;
}

}  // namespace detail

/**
 * Approximate or sample entropy with Chebyshev template matching and
 * tolerance r * SD(x). Sample entropy excludes self-matches; when no m+1
 * templates match, the largest resolvable value log(T-m) + log(T-m-1) -
 * log 2 stands in so downstream consumers never see infinities.
 */
inline double regularity_entropy(const std::vector<double>& x, EntropyKind kind,
                                 int m, double r) {
    if (r <= 0.0) throw ConfigError("regularity_entropy: tolerance must be > 0");
    if (m < 1) throw ConfigError("regularity_entropy: m must be >= 1");
    const int T = static_cast<int>(x.size());
    if (T < m + 2) throw DataError("regularity_entropy: series too short");
    const double tol = r * stddev(x);

    if (kind == EntropyKind::Approximate) {
        auto phi = [&](int mm) {
            const int n = T - mm + 1;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                int matches = 0;
                for (int j = 0; j < n; ++j)
                    if (detail::template_chebyshev(x, i, j, mm) <= tol) ++matches;
                acc += std::log(static_cast<double>(matches) / n);
            }
            return acc / n;
        };
        return phi(m) - phi(m + 1);
    }

    // Sample entropy: B counts length-m matches, A length-m+1 matches, over
    // the same T-m template start positions, unordered pairs.
    const int n = T - m;
    long long A = 0, B = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (detail::template_chebyshev(x, i, j, m) <= tol) {
                ++B;
                if (std::abs(x[i + m] - x[j + m]) <= tol) ++A;
            }
        }
    if (A == 0 || B == 0)
        return std::log(static_cast<double>(T - m)) +
               std::log(static_cast<double>(T - m - 1)) - std::log(2.0);
    return -std::log(static_cast<double>(A) / static_cast<double>(B));
}

enum class ScalingKind { HurstRs, Dfa };

namespace detail {

inline double fit_slope(const std::vector<double>& lx,
                        const std::vector<double>& ly) {
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw NumericalError("slope fit is degenerate");
    return (n * sxy - sx * sy) / denom;
}

inline double rs_statistic(const std::vector<double>& x, int from, int w) {
    double mu = 0.0;
    for (int i = 0; i < w; ++i) mu += x[from + i];
    mu /= w;
    double z = 0.0, zmin = 0.0, zmax = 0.0, ss = 0.0;
    for (int i = 0; i < w; ++i) {
        const double dev = x[from + i] - mu;
        z += dev;
        zmin = std::min(zmin, z);
        zmax = std::max(zmax, z);
        ss += dev * dev;
    }
    const double s = std::sqrt(ss / w);
    if (s == 0.0) return -1.0;  // caller skips flat chunks
    return (zmax - zmin) / s;
}

}  // namespace detail

/**
 * Hurst exponent from rescaled-range analysis over dyadic window sizes
 * 4, 8, ... up to T/2, or DFA-1: slope of log fluctuation vs log window
 * over about twenty log-spaced sizes in [4, T/4] with linear detrending.
 */
inline double scaling_exponent(const std::vector<double>& x, ScalingKind kind) {
    const int T = static_cast<int>(x.size());

    if (kind == ScalingKind::HurstRs) {
        std::vector<int> sizes;
        for (int w = 4; w <= T / 2; w *= 2) sizes.push_back(w);
        if (sizes.size() < 4)
            throw DataError("scaling_exponent: fewer than 4 window sizes");
        std::vector<double> lx, ly;
        for (int w : sizes) {
            double acc = 0.0;
            int used = 0;
            for (int from = 0; from + w <= T; from += w) {
                const double rs = detail::rs_statistic(x, from, w);
                if (rs >= 0.0) {
                    acc += rs;
                    ++used;
                }
            }
            if (used == 0) continue;
            lx.push_back(std::log(static_cast<double>(w)));
            ly.push_back(std::log(acc / used));
        }
        if (lx.size() < 4)
            throw DataError("scaling_exponent: fewer than 4 window sizes");
        return detail::fit_slope(lx, ly);
    }

    // DFA: integrate the centered series, then measure detrended
    // fluctuations per window size.
    const double mu = mean(x);
    std::vector<double> profile(T);
    double run = 0.0;
    for (int t = 0; t < T; ++t) {
        run += x[t] - mu;
        profile[t] = run;
    }
    std::vector<int> sizes;
    {
        const double lo = std::log(4.0), hi = std::log(T / 4.0);
        for (int k = 0; k < 20; ++k) {
            const int w = static_cast<int>(
                std::lround(std::exp(lo + (hi - lo) * k / 19.0)));
            if (sizes.empty() || w > sizes.back()) sizes.push_back(w);
        }
    }
    if (sizes.size() < 4)
        throw DataError("scaling_exponent: fewer than 4 window sizes");

    std::vector<double> lx, ly;
    for (int w : sizes) {
        double ss = 0.0;
        long long count = 0;
        for (int from = 0; from + w <= T; from += w) {
            // Least-squares line over the segment.
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (int i = 0; i < w; ++i) {
                sx += i;
                sy += profile[from + i];
                sxx += static_cast<double>(i) * i;
                sxy += i * profile[from + i];
            }
            const double denom = w * sxx - sx * sx;
            const double slope = (w * sxy - sx * sy) / denom;
            const double icept = (sy - slope * sx) / w;
            for (int i = 0; i < w; ++i) {
                const double res = profile[from + i] - (icept + slope * i);
                ss += res * res;
            }
            count += w;
        }
        lx.push_back(std::log(static_cast<double>(w)));
        ly.push_back(0.5 * std::log(ss / count));
    }
    return detail::fit_slope(lx, ly);
}

enum class FractalKind { Higuchi, Petrosian, Correlation };

namespace detail {

inline std::vector<double> chebyshev_pair_distances(const std::vector<double>& x,
                                                    int m, int delay) {
    const int T = static_cast<int>(x.size());
    const int n = T - (m - 1) * delay;
    if (n < 2) throw DataError("embedding leaves fewer than 2 points");
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double dist = 0.0;
            for (int c = 0; c < m; ++c)
                dist = std::max(dist,
                                std::abs(x[i + c * delay] - x[j + c * delay]));
            d.push_back(dist);
        }
    return d;
}

}  // namespace detail

/**
 * Fractal dimension of a scalar series. Higuchi uses curve lengths at scales
 * k = 1..k_max; Petrosian is the closed form over sign changes of the first
 * differences; correlation follows Grassberger-Procaccia on the delay
 * embedding, reading the slope of log C vs log eps along quantiles of the
 * pairwise-distance distribution (5th to 50th percentile).
 */
inline double fractal_dimension(const std::vector<double>& x, FractalKind kind,
                                int m = 2, int delay = 1, int k_max = 8) {
    const int T = static_cast<int>(x.size());

    if (kind == FractalKind::Higuchi) {
        if (T < 16) throw DataError("fractal_dimension: series too short");
        if (k_max < 2) throw ConfigError("fractal_dimension: k_max must be >= 2");
        std::vector<double> lx, ly;
        for (int k = 1; k <= k_max; ++k) {
            double lk = 0.0;
            int used = 0;
            for (int m0 = 0; m0 < k; ++m0) {
                const int M = (T - 1 - m0) / k;
                if (M < 1) continue;
                double len = 0.0;
                for (int i = 1; i <= M; ++i)
                    len += std::abs(x[m0 + i * k] - x[m0 + (i - 1) * k]);
                lk += len * (T - 1) / (static_cast<double>(M) * k * k);
                ++used;
            }
            if (used == 0) continue;
            lx.push_back(std::log(1.0 / k));
            ly.push_back(std::log(lk / used));
        }
        return detail::fit_slope(lx, ly);
    }

    if (kind == FractalKind::Petrosian) {
        if (T < 16) throw DataError("fractal_dimension: series too short");
        int n_delta = 0, prev = 0;
        for (int t = 1; t < T; ++t) {
            const double d = x[t] - x[t - 1];
            int s = (d > 0.0) - (d < 0.0);
            if (s == 0) s = prev;
            if (prev != 0 && s != 0 && s != prev) ++n_delta;
            if (s != 0) prev = s;
        }
        const double n = static_cast<double>(T);
        return std::log10(n) /
               (std::log10(n) + std::log10(n / (n + 0.4 * n_delta)));
    }

    if (T < 100) throw DataError("fractal_dimension: series too short");
    auto dists = detail::chebyshev_pair_distances(x, m, delay);
    std::sort(dists.begin(), dists.end());
    while (!dists.empty() && dists.front() == 0.0)
        dists.erase(dists.begin());
    if (dists.size() < 16 || dists.front() == dists.back())
        throw DataError("fractal_dimension: degenerate embedding");

    // C at the f-quantile of the distance distribution is f itself, so the
    // correlation integral curve can be read off the sorted distances.
    std::vector<double> lx, ly;
    const double lo = std::log(0.05), hi = std::log(0.5);
    for (int k = 0; k < 8; ++k) {
        const double f = std::exp(lo + (hi - lo) * k / 7.0);
        const std::size_t at = std::min(
            dists.size() - 1,
            static_cast<std::size_t>(f * static_cast<double>(dists.size())));
        const double eps = dists[at];
        if (eps <= 0.0) continue;
        if (!lx.empty() && std::log(eps) == lx.back()) continue;
        lx.push_back(std::log(eps));
        ly.push_back(std::log(f));
    }
    if (lx.size() < 3) throw DataError("fractal_dimension: degenerate embedding");
    return detail::fit_slope(lx, ly);
}

/// Radius for recurrence plots: either a fixed distance or a fraction of the
/// largest pairwise distance in the embedded cloud.
struct RadiusPolicy {
    double fixed_value = -1.0;
    double fraction = -1.0;

    static RadiusPolicy fixed(double eps) {
        RadiusPolicy p;
        p.fixed_value = eps;
        return p;
    }
    static RadiusPolicy of_max_distance(double q) {
        RadiusPolicy p;
        p.fraction = q;
        return p;
    }
};

struct RecurrencePlot {
    int n = 0;
    int m = 1;
    int delay = 1;
    double radius = 0.0;
    bool cross = false;
    std::vector<char> points;  // row-major n x n

    bool at(int i, int j) const { return points[static_cast<std::size_t>(i) * n + j] != 0; }
};

namespace detail {

inline RecurrencePlot build_rp(const std::vector<double>& x,
                               const std::vector<double>& y, bool cross, int m,
                               int delay, const RadiusPolicy& policy) {
    if (m < 1) throw ConfigError("recurrence plot: m must be >= 1");
    if (delay < 1) throw ConfigError("recurrence plot: delay must be >= 1");
    const int span = (m - 1) * delay;
    if (static_cast<int>(x.size()) < span + 2 ||
        static_cast<int>(y.size()) < span + 2)
        throw DataError("recurrence plot: series too short for embedding");
    if (cross && x.size() != y.size())
        throw DataError("recurrence plot: cross series lengths differ");

    const int n = static_cast<int>(x.size()) - span;
    auto dist = [&](int i, int j) {
        double d = 0.0;
        for (int c = 0; c < m; ++c)
            d = std::max(d, std::abs(x[i + c * delay] - y[j + c * delay]));
        return d;
    };

    double eps = policy.fixed_value;
    if (policy.fraction > 0.0) {
        double dmax = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = cross ? 0 : i + 1; j < n; ++j)
                dmax = std::max(dmax, dist(i, j));
        eps = policy.fraction * dmax;
    }
    if (eps <= 0.0) throw DataError("recurrence plot: radius must be > 0");

    RecurrencePlot rp;
    rp.n = n;
    rp.m = m;
    rp.delay = delay;
    rp.radius = eps;
    rp.cross = cross;
    rp.points.assign(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (dist(i, j) <= eps)
                rp.points[static_cast<std::size_t>(i) * n + j] = 1;
    return rp;
}

}  // namespace detail

inline RecurrencePlot recurrence_plot(const std::vector<double>& x, int m,
                                      int delay, const RadiusPolicy& policy) {
    return detail::build_rp(x, x, false, m, delay, policy);
}

/// Cross-recurrence of two equally long series. Identical inputs collapse to
/// the auto plot so cross(x, x) and auto(x) agree in every downstream use.
inline RecurrencePlot cross_recurrence_plot(const std::vector<double>& x,
                                            const std::vector<double>& y, int m,
                                            int delay,
                                            const RadiusPolicy& policy) {
    if (x == y) return detail::build_rp(x, x, false, m, delay, policy);
    return detail::build_rp(x, y, true, m, delay, policy);
}

struct RQAResult {
    double rr = 0.0;
    double det = 0.0;
    double lam = 0.0;
    double tt = 0.0;
    double l_max = 0.0;
    double v_max = 0.0;
    double div = 0.0;
    double entr_diag = 0.0;
    double l_mean = 0.0;
    double v_mean = 0.0;
};

/**
 * Line-based recurrence quantification. Auto plots exclude the main diagonal
 * from the recurrence rate and from diagonal-line scans (the identity line
 * carries no information there); vertical scans always use full columns.
 * Without qualifying lines det/lam/tt and the means are 0; l_max = 0 makes
 * div fall back to the plot size as a finite stand-in for 1/l_max.
 */
inline RQAResult rqa(const RecurrencePlot& rp, int l_min = 2, int v_min = 2) {
    if (rp.n == 0) throw DataError("rqa: empty plot");
    if (l_min < 1 || v_min < 1) throw ConfigError("rqa: line minima must be >= 1");
    const int n = rp.n;

    long long ones = 0;
    for (char p : rp.points) ones += p;
    RQAResult r;
    if (rp.cross) {
        r.rr = static_cast<double>(ones) / (static_cast<double>(n) * n);
    } else {
        r.rr = n > 1 ? static_cast<double>(ones - n) /
                           (static_cast<double>(n) * n - n)
                     : 0.0;
    }

    // Diagonal lines: offset range skips 0 for auto plots.
    std::map<int, long long> diag_hist;
    long long diag_points = 0;
    for (int offset = -(n - 1); offset <= n - 1; ++offset) {
        if (!rp.cross && offset == 0) continue;
        int run = 0;
        const int i0 = std::max(0, -offset);
        const int len = n - std::abs(offset);
        for (int k = 0; k <= len; ++k) {
            const bool on = k < len && rp.at(i0 + k, i0 + k + offset);
            if (on) {
                ++run;
                ++diag_points;
            } else if (run > 0) {
                ++diag_hist[run];
                run = 0;
            }
        }
    }
    std::map<int, long long> vert_hist;
    long long vert_points = 0;
    for (int j = 0; j < n; ++j) {
        int run = 0;
        for (int i = 0; i <= n; ++i) {
            const bool on = i < n && rp.at(i, j);
            if (on) {
                ++run;
                ++vert_points;
            } else if (run > 0) {
                ++vert_hist[run];
                run = 0;
            }
        }
    }

    auto line_stats = [](const std::map<int, long long>& hist, int min_len,
                         long long total_points, double& frac, double& mean_len,
                         double& max_len) {
        long long qual_points = 0, qual_lines = 0;
        max_len = 0.0;
        for (const auto& [len, count] : hist) {
            max_len = std::max(max_len, static_cast<double>(len));
            if (len >= min_len) {
                qual_points += static_cast<long long>(len) * count;
                qual_lines += count;
            }
        }
        frac = total_points > 0
                   ? static_cast<double>(qual_points) / total_points
                   : 0.0;
        mean_len = qual_lines > 0
                       ? static_cast<double>(qual_points) / qual_lines
                       : 0.0;
    };

    line_stats(diag_hist, l_min, diag_points, r.det, r.l_mean, r.l_max);
    line_stats(vert_hist, v_min, vert_points, r.lam, r.v_mean, r.v_max);
    r.tt = r.v_mean;
    r.div = r.l_max > 0.0 ? 1.0 / r.l_max : static_cast<double>(n);

    long long entr_lines = 0;
    for (const auto& [len, count] : diag_hist)
        if (len >= l_min) entr_lines += count;
    if (entr_lines > 0) {
        for (const auto& [len, count] : diag_hist) {
            if (len < l_min) continue;
            const double p = static_cast<double>(count) / entr_lines;
            r.entr_diag -= p * std::log(p);
        }
    }
    return r;
}

}  // namespace symdyn

#endif  // SYMDYN_COMPLEXITY_HPP
