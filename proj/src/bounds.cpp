#include "llpauc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "llpauc/metrics.hpp"

namespace llpauc {

namespace {

void check_sizes(std::size_t k, std::size_t n_pos, std::size_t n_neg) {
    if (k == 0) throw std::invalid_argument("K must be positive");
    if (n_pos <= k || n_neg <= k)
        throw std::invalid_argument("bounds require n+ > K and n- > K");
}

// n+ n- v is a pair count for any metric value an estimator can produce;
// snap it back to that integer when floating-point error moved it slightly.
double pair_mass(double v, std::size_t n_pos, std::size_t n_neg) {
    if (!std::isfinite(v) || v < 0.0) throw std::domain_error("metric value must be finite and >= 0");
    const double x = static_cast<double>(n_pos) * static_cast<double>(n_neg) * v;
    const double r = std::round(x);
    return std::abs(x - r) <= 1e-9 * std::max(1.0, x) ? r : x;
}

double checked_sqrt(double radicand, const char* what) {
    if (radicand < 0.0)
        throw std::domain_error(std::string("infeasible metric value for these sizes (") + what +
                                " radicand " + std::to_string(radicand) + ")");
    return std::sqrt(radicand);
}

constexpr double kSlack = 1e-12;

}  // namespace

double g_lower(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg) {
    check_sizes(k, n_pos, n_neg);
    const double kk = static_cast<double>(k);
    return kk - checked_sqrt(kk * kk - pair_mass(v, n_pos, n_neg), "LLPAUC");
}

double g_higher(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg) {
    check_sizes(k, n_pos, n_neg);
    const double kk = static_cast<double>(k);
    const double m = pair_mass(v, n_pos, n_neg);
    checked_sqrt(kk * kk - m, "LLPAUC");
    return std::sqrt(m);
}

double h_lower(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg) {
    check_sizes(k, n_pos, n_neg);
    const double s = static_cast<double>(n_pos + k);
    return (s - checked_sqrt(s * s - 4.0 * pair_mass(v, n_pos, n_neg), "OPAUC")) / 2.0;
}

double h_higher(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg) {
    check_sizes(k, n_pos, n_neg);
    const double s = static_cast<double>(n_pos + k);
    const double m = pair_mass(v, n_pos, n_neg);
    checked_sqrt(s * s - 4.0 * m, "OPAUC");
    if (m > static_cast<double>(n_pos) * static_cast<double>(k))
        throw std::domain_error("infeasible OPAUC value: exceeds K/n-");
    return std::sqrt(m);
}

BoundPair recall_bounds_llpauc(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg) {
    const double n = static_cast<double>(n_pos);
    return {std::floor(g_lower(v, k, n_pos, n_neg)) / n, std::ceil(g_higher(v, k, n_pos, n_neg)) / n};
}

BoundPair precision_bounds_llpauc(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg) {
    const double kk = static_cast<double>(k);
    return {std::floor(g_lower(v, k, n_pos, n_neg)) / kk, std::ceil(g_higher(v, k, n_pos, n_neg)) / kk};
}

BoundPair recall_bounds_opauc(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg) {
    const double n = static_cast<double>(n_pos);
    return {std::floor(h_lower(v, k, n_pos, n_neg)) / n, std::ceil(h_higher(v, k, n_pos, n_neg)) / n};
}

BoundPair precision_bounds_opauc(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg) {
    const double kk = static_cast<double>(k);
    return {std::floor(h_lower(v, k, n_pos, n_neg)) / kk, std::ceil(h_higher(v, k, n_pos, n_neg)) / kk};
}

std::uint64_t arrangement_count(std::size_t n_pos, std::size_t n_neg) {
    // C(n_pos + n_neg, n_pos), saturating just past the enumeration guard.
    const std::size_t r = std::min(n_pos, n_neg);
    const std::size_t n = n_pos + n_neg;
    long double c = 1.0L;
    for (std::size_t i = 1; i <= r; ++i) {
        c = c * static_cast<long double>(n - r + i) / static_cast<long double>(i);
        if (c > static_cast<long double>(kMaxArrangements) * 1000.0L) return kMaxArrangements * 1000;
    }
    return static_cast<std::uint64_t>(std::llround(c));
}

VerificationReport verify_bounds_exhaustive(std::size_t n_pos, std::size_t n_neg, std::size_t k,
                                            const BoundFunctions& fns) {
    check_sizes(k, n_pos, n_neg);
    if (arrangement_count(n_pos, n_neg) > kMaxArrangements)
        throw std::length_error("enumeration guard exceeded: more than " +
                                std::to_string(kMaxArrangements) + " arrangements");

    VerificationReport rep;
    rep.n_pos = n_pos;
    rep.n_neg = n_neg;
    rep.k = k;

    const std::size_t n = n_pos + n_neg;
    const double kk = static_cast<double>(k);
    const PartialAucParams rates{kk / static_cast<double>(n_pos), kk / static_cast<double>(n_neg)};

    // Sorted ascending so next_permutation walks every arrangement once.
    // Index 0 is the top rank.
    std::vector<std::uint8_t> labels(n, 0);
    std::fill(labels.begin() + static_cast<std::ptrdiff_t>(n_neg), labels.end(), 1);

    LabeledScores s;
    s.pos.reserve(n_pos);
    s.neg.reserve(n_neg);
    do {
        ++rep.arrangements;
        s.pos.clear();
        s.neg.clear();
        for (std::size_t r = 0; r < n; ++r) {
            const double score = 1.0 - static_cast<double>(r) / static_cast<double>(n);
            (labels[r] ? s.pos : s.neg).push_back(score);
        }
        const double ll = llpauc(s, rates);
        const double op = opauc(s, rates.beta);
        const auto top = topk_metrics(s, k);

        const double gl = fns.lower_llpauc(ll, k, n_pos, n_neg);
        const double gh = fns.upper_llpauc(ll, k, n_pos, n_neg);
        const double hl = fns.lower_opauc(op, k, n_pos, n_neg);
        const double hh = fns.upper_opauc(op, k, n_pos, n_neg);
        const double hits = static_cast<double>(top.hits);

        bool bad = false;
        if (std::floor(gl) > hits || hits > std::ceil(gh)) {
            ++rep.recall_violations;
            bad = true;
        }
        if (std::floor(gl) / kk > top.precision + kSlack || top.precision > std::ceil(gh) / kk + kSlack) {
            ++rep.precision_violations;
            bad = true;
        }
        if (hl > gl + kSlack || gh > hh + kSlack) {
            ++rep.tightness_violations;
            bad = true;
        }
        if (std::floor(hl) > std::floor(gl) || std::ceil(gh) > std::ceil(hh)) ++rep.rounded_tightness_violations;
        if (op < ll) {
            ++rep.order_violations;
            bad = true;
        }
        if (bad && !rep.first_violation) {
            std::string ranked;
            for (auto l : labels) ranked.push_back(l ? '+' : '-');
            rep.first_violation = ranked;
        }
    } while (std::next_permutation(labels.begin(), labels.end()));
    return rep;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson: need at least two points");
    auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
    };
    if (constant(x) || constant(y)) return std::nullopt;

    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("log_grid: need 0 < lo <= hi");
    if (n == 0) throw std::invalid_argument("log_grid: need at least one point");
    if (n == 1) return {hi};
    std::vector<double> g(n);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

void CorrelationConfig::resolve() {
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("simulate: n_pos and n_neg must be positive");
    if (k == 0 || k >= n_pos) throw std::invalid_argument("simulate: requires 0 < K < n_pos");
    if (k > n_pos + n_neg) throw std::invalid_argument("simulate: K exceeds item count");
    if (n_samples < 2) throw std::invalid_argument("simulate: need at least two samples");
    if (alphas.empty()) alphas = log_grid(1.0 / static_cast<double>(n_pos), 1.0, 11);
    if (betas.empty()) betas = log_grid(1.0 / static_cast<double>(n_neg), 1.0, 11);
    for (double a : alphas)
        if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("simulate: alpha outside (0,1]");
    for (double b : betas)
        if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument("simulate: beta outside (0,1]");
}

std::optional<std::pair<std::size_t, std::size_t>> CorrelationGrid::argmax() const {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    double best_v = 0.0;
    for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
        for (std::size_t ib = 0; ib < betas.size(); ++ib) {
            const auto& c = at(ia, ib);
            if (c && (!best || *c > best_v)) {
                best = {ia, ib};
                best_v = *c;
            }
        }
    }
    return best;
}

SampleMetrics simulate_sample(const CorrelationConfig& cfg, std::size_t index) {
    const std::size_t n = cfg.n_pos + cfg.n_neg;
    SampleMetrics out;
    out.ranked_labels.assign(n, 0);
    std::fill(out.ranked_labels.begin(), out.ranked_labels.begin() + static_cast<std::ptrdiff_t>(cfg.n_pos), 1);
    Rng rng(derive_seed(cfg.seed, index));
    shuffle_in_place(out.ranked_labels.begin(), out.ranked_labels.end(), rng);

    // pos_above[j]: positives ranked above the j-th highest negative.
    std::vector<std::size_t> pos_above;
    pos_above.reserve(cfg.n_neg);
    std::size_t seen_pos = 0, hits = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (out.ranked_labels[r]) {
            ++seen_pos;
            if (r < cfg.k) ++hits;
        } else {
            pos_above.push_back(seen_pos);
        }
    }
    out.recall = static_cast<double>(hits) / static_cast<double>(cfg.n_pos);

    const double denom = static_cast<double>(cfg.n_pos) * static_cast<double>(cfg.n_neg);
    out.llpauc.resize(cfg.alphas.size() * cfg.betas.size());
    std::vector<std::size_t> neg_heads(cfg.betas.size());
    for (std::size_t ib = 0; ib < cfg.betas.size(); ++ib) neg_heads[ib] = head_count(cfg.n_neg, cfg.betas[ib]);
    std::vector<std::uint64_t> prefix(cfg.n_neg + 1);
    for (std::size_t ia = 0; ia < cfg.alphas.size(); ++ia) {
        const std::size_t kp = head_count(cfg.n_pos, cfg.alphas[ia]);
        prefix[0] = 0;
        for (std::size_t j = 0; j < cfg.n_neg; ++j) prefix[j + 1] = prefix[j] + std::min(pos_above[j], kp);
        for (std::size_t ib = 0; ib < cfg.betas.size(); ++ib)
            out.llpauc[ia * cfg.betas.size() + ib] = static_cast<double>(prefix[neg_heads[ib]]) / denom;
    }
    return out;
}

CorrelationGrid simulate_correlation(CorrelationConfig cfg, Exec exec) {
    cfg.resolve();
    const std::size_t cells = cfg.alphas.size() * cfg.betas.size();
    const std::size_t ns = cfg.n_samples;

    // values[cell * ns + sample]
    std::vector<double> values(cells * ns);
    std::vector<double> recalls(ns);
    const auto n_signed = static_cast<std::ptrdiff_t>(ns);

#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::ptrdiff_t si = 0; si < n_signed; ++si) {
        const auto s = static_cast<std::size_t>(si);
        const auto m = simulate_sample(cfg, s);
        recalls[s] = m.recall;
        for (std::size_t c = 0; c < cells; ++c) values[c * ns + s] = m.llpauc[c];
    }

    CorrelationGrid g;
    g.alphas = cfg.alphas;
    g.betas = cfg.betas;
    g.k = cfg.k;
    g.n_pos = cfg.n_pos;
    g.n_neg = cfg.n_neg;
    g.n_samples = ns;
    g.seed = cfg.seed;
    g.corr.resize(cells);
    const auto c_signed = static_cast<std::ptrdiff_t>(cells);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::ptrdiff_t ci = 0; ci < c_signed; ++ci) {
        const auto c = static_cast<std::size_t>(ci);
        g.corr[c] = pearson(std::span<const double>(values).subspan(c * ns, ns), recalls);
    }
    return g;
}

}  // namespace llpauc
