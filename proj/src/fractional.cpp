#include "volres/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "volres/errors.hpp"
#include "volres/quadrature.hpp"
#include "volres/specfun.hpp"

namespace volres {

namespace {

// Profile representation: Chebyshev-Lobatto panels on [0, kWMax] in w = log(1 + x/y).
constexpr double kWMax = 40.0;
constexpr int kPanels = 20;
constexpr int kPts = 16;
constexpr double kWidth = kWMax / kPanels;

const std::vector<double>& cheb_nodes() {
    static const std::vector<double> xi = [] {
        std::vector<double> v(kPts);
        for (int k = 0; k < kPts; ++k) v[k] = -std::cos(std::numbers::pi * k / (kPts - 1));
        return v;
    }();
    return xi;
}

double bary_weight(int k) {
    const double s = (k % 2 == 0) ? 1.0 : -1.0;
    return (k == 0 || k == kPts - 1) ? 0.5 * s : s;
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void FractionalResolventParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("fractional: alpha must be positive");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("fractional: beta must be >= 0");
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("fractional: p must be >= 1");
    if (!(alpha_p() > 0.0)) throw ConfigError("fractional: (alpha - 1) p + 1 must be positive");
    if (!(beta_p() < alpha_p())) throw ConfigError("fractional: need beta + 1 - 1/p < alpha");
}

double FractionalResolventParams::c_hat(int n) const {
    const double a = alpha_p(), b = beta_p();
    if (b == 0.0) return 1.0;
    double lc = 0.0;
    for (int i = 1; i < n; ++i) lc += ln_gamma((a - b) * i) - ln_gamma((a - b) * i + b);
    return std::exp(lc);
}

int FractionalResolventParams::n_gamma() const {
    const double d = alpha_p() - beta_p();
    return std::max(1, static_cast<int>(std::ceil(gamma_min_point().x_gamma / d)));
}

double FractionalResolventParams::c_hat_max() const {
    const int ng = n_gamma();
    double best = 0.0;
    for (int i = 1; i <= ng; ++i) best = std::max(best, c_hat(i));
    return best;
}

FractionalFamily::FractionalFamily(std::vector<double> alpha, std::vector<double> beta, std::vector<double> log_weight,
                                   std::size_t budget, int rule_layers)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), logw_(std::move(log_weight)), budget_(budget),
      layers_(rule_layers) {
    if (alpha_.empty() || alpha_.size() != beta_.size())
        throw ConfigError("fractional family: alpha and beta must be nonempty and of equal length");
    if (logw_.empty()) logw_.assign(alpha_.size(), 0.0);
    if (logw_.size() != alpha_.size()) throw ConfigError("fractional family: one weight per part required");
    if (budget_ < 1 || layers_ < 4) throw ConfigError("fractional family: invalid budget or rule size");
    double amin = std::numeric_limits<double>::infinity(), bmax = 0.0;
    for (std::size_t j = 0; j < alpha_.size(); ++j) {
        if (!(alpha_[j] > 0.0) || !std::isfinite(alpha_[j])) throw ConfigError("fractional family: alpha must be > 0");
        if (!(beta_[j] >= 0.0) || !std::isfinite(beta_[j])) throw ConfigError("fractional family: beta must be >= 0");
        amin = std::min(amin, alpha_[j]);
        bmax = std::max(bmax, beta_[j]);
        if (beta_[j] != 0.0) beta_zero_ = false;
    }
    if (!(bmax < amin)) throw ConfigError("fractional family: need max beta < min alpha");

    const auto& xi = cheb_nodes();
    wnodes_.resize(kPanels * kPts);
    for (int p = 0; p < kPanels; ++p)
        for (int k = 0; k < kPts; ++k) wnodes_[p * kPts + k] = p * kWidth + 0.5 * kWidth * (xi[k] + 1.0);

    std::vector<Node> first;
    for (std::size_t j = 0; j < alpha_.size(); ++j) {
        Node nd;
        nd.A = alpha_[j];
        nd.D = alpha_[j] - beta_[j] - 1.0;
        nd.E = 0.0;
        nd.beta1 = beta_[j];
        nd.log_c = logw_[j];
        nd.trivial = true;
        first.push_back(std::move(nd));
    }
    levels_.push_back(std::move(first));
}

FractionalFamily FractionalFamily::for_power(const FractionalResolventParams& params) {
    params.validate();
    return FractionalFamily({params.alpha_p()}, {params.beta_p()});
}

std::size_t FractionalFamily::components(int n) const {
    if (n < 1) throw ConfigError("fractional family: n must be >= 1");
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) {
        if (count > budget_ / alpha_.size() + 1) throw NumericalFailure("fractional family: component budget exceeded");
        count *= alpha_.size();
    }
    if (count > budget_) throw NumericalFailure("fractional family: component budget exceeded");
    return count;
}

std::vector<int> FractionalFamily::multi_index(int n, std::size_t index) const {
    std::vector<int> digits(n);
    for (int i = n - 1; i >= 0; --i) {
        digits[i] = static_cast<int>(index % alpha_.size()) + 1;
        index /= alpha_.size();
    }
    return digits;
}

double FractionalFamily::profile(const Node& node, double w) const {
    if (node.trivial) return 1.0;
    if (w >= kWMax) return node.g.back();
    if (w < 0.0) w = 0.0;
    const int p = std::min(kPanels - 1, static_cast<int>(w / kWidth));
    const double xi = 2.0 * (w - p * kWidth) / kWidth - 1.0;
    const auto& xs = cheb_nodes();
    const double* g = node.g.data() + p * kPts;
    double num = 0.0, den = 0.0;
    for (int k = 0; k < kPts; ++k) {
        const double d = xi - xs[k];
        if (d == 0.0) return g[k];
        const double c = bary_weight(k) / d;
        num += c * g[k];
        den += c;
    }
    return num / den;
}

FractionalFamily::Node FractionalFamily::extend(const Node& prev, std::size_t j) const {
    const double a_new = alpha_[j], b_new = beta_[j];
    Node nd;
    nd.A = prev.A + a_new;
    nd.D = prev.D + a_new - b_new;
    nd.E = prev.E + b_new;
    nd.beta1 = prev.beta1;
    nd.log_c = prev.log_c + logw_[j] + ln_gamma(a_new) + ln_gamma(prev.A) - ln_gamma(nd.A);
    nd.trivial = (nd.E == 0.0);
    if (nd.trivial) return nd;

    // g_{n+1}(w) = B(A, a')^{-1} int l^(A-E'-1) (1-l)^(a'-1)
    //              (l (1+u) / (1 + l u))^E' g_n(log(1 + l u)) dl
    const double gamma = prev.A - nd.E;
    const Rule rule = singular_rule(gamma, a_new, layers_, 12);
    const double inv_beta = std::exp(-ln_beta(prev.A, a_new));
    nd.g.resize(wnodes_.size());
    for (std::size_t k = 0; k < wnodes_.size(); ++k) {
        const double w = wnodes_[k];
        const double u = std::expm1(w);
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double l = rule.x[q];
            const double wl = std::log1p(l * u);
            // log(l (1+u) / (1 + l u)) = log l + w - wl
            const double lr = std::log(l) + w - wl;
            acc += rule.w[q] * std::exp(nd.E * lr) * profile(prev, wl);
        }
        nd.g[k] = acc * inv_beta;
    }
    return nd;
}

void FractionalFamily::ensure_level(int n) {
    if (n < 1) throw ConfigError("fractional family: n must be >= 1");
    components(n);
    while (static_cast<int>(levels_.size()) < n) {
        const auto& last = levels_.back();
        std::vector<Node> next;
        next.reserve(last.size() * alpha_.size());
        for (const Node& prev : last)
            for (std::size_t j = 0; j < alpha_.size(); ++j) next.push_back(extend(prev, j));
        levels_.push_back(std::move(next));
    }
}

double FractionalFamily::eval_node(const Node& node, double x, double y) const {
    if (!(x >= 0.0) || !(y >= 0.0) || std::isnan(x) || std::isnan(y))
        throw std::domain_error("fractional family: arguments must be >= 0");
    const double inf = std::numeric_limits<double>::infinity();
    if (x == 0.0) {
        // f ~ c x^(A-1) y^(-sum beta) as x -> 0
        if (node.A < 1.0) return inf;
        if (node.A > 1.0) return 0.0;
        if (y == 0.0) return (node.D + 1.0 - node.A) < 0.0 ? inf : 0.0;
        return std::exp(node.log_c + (node.D + 1.0 - node.A) * std::log(y)) * profile(node, 0.0);
    }
    if (y == 0.0) {
        // f ~ c g(inf) x^(D + beta1) y^(-beta1) as y -> 0
        if (node.beta1 > 0.0) return inf;
        return std::exp(node.log_c + node.D * std::log(x)) * profile(node, kWMax);
    }
    if (std::isinf(x) || std::isinf(y)) throw std::domain_error("fractional family: arguments must be finite");
    const double lx = std::log(x), ly = std::log(y);
    const double w = std::log(x + y) - ly;
    const double lf = node.D * ly + (node.A - 1.0) * (lx - ly) - node.E * w + node.log_c;
    const double g = profile(node, w);
    if (lf > 709.0) return inf;
    return std::exp(lf) * g;
}

double FractionalFamily::component(int n, std::size_t index, double x, double y) {
    ensure_level(n);
    const auto& lvl = levels_[n - 1];
    if (index >= lvl.size()) throw ConfigError("fractional family: component index out of range");
    return eval_node(lvl[index], x, y);
}

double FractionalFamily::total(int n, double x, double y) {
    if (n < 1) throw ConfigError("fractional family: n must be >= 1");
    if (beta_zero_ && alpha_.size() > 1) {
        // multinomial closed form: sum over counts i with |i| = n of
        // n!/prod i_m! prod Gamma(alpha_m)^i_m x^(<i,alpha>-1) / Gamma(<i,alpha>)
        if (!(x >= 0.0)) throw std::domain_error("fractional family: arguments must be >= 0");
        const std::size_t N = alpha_.size();
        std::vector<int> cnt(N, 0);
        double sum = 0.0;
        const double lx = x > 0.0 ? std::log(x) : kNegInf;
        std::function<void(std::size_t, int)> rec = [&](std::size_t m, int left) {
            if (m + 1 == N) {
                cnt[m] = left;
                double A = 0.0, lc = std::lgamma(n + 1.0);
                for (std::size_t q = 0; q < N; ++q) {
                    A += cnt[q] * alpha_[q];
                    lc += cnt[q] * (ln_gamma(alpha_[q]) + logw_[q]) - std::lgamma(cnt[q] + 1.0);
                }
                lc -= ln_gamma(A);
                if (x == 0.0) {
                    if (A < 1.0) sum = std::numeric_limits<double>::infinity();
                    else if (A == 1.0) sum += std::exp(lc);
                    return;
                }
                sum += std::exp(std::min(lc + (A - 1.0) * lx, 709.5));
                return;
            }
            for (int c = 0; c <= left; ++c) {
                cnt[m] = c;
                rec(m + 1, left - c);
            }
        };
        rec(0, n);
        return sum;
    }
    ensure_level(n);
    double sum = 0.0;
    for (const Node& nd : levels_[n - 1]) sum += eval_node(nd, x, y);
    return sum;
}

double FractionalFamily::node_integral(const Node& node) const {
    // int_0^1 l^(-beta1) (1-l)^(A-1) g(log 1/l) dl, times c
    const double lb = ln_beta(1.0 - node.beta1, node.A);
    if (node.trivial) return std::exp(node.log_c + lb);
    const Rule rule = singular_rule(1.0 - node.beta1, node.A, layers_, 12);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) acc += rule.w[q] * profile(node, -std::log(rule.x[q]));
    return std::exp(node.log_c) * acc;
}

double FractionalFamily::lower_set_integral(int n, double T) {
    if (!(T >= 0.0)) throw std::domain_error("fractional family: T must be >= 0");
    for (double b : beta_)
        if (!(b < 1.0)) return std::numeric_limits<double>::infinity();
    ensure_level(n);
    double sum = 0.0;
    for (const Node& nd : levels_[n - 1]) {
        if (T == 0.0) continue;
        sum += node_integral(nd) * std::exp((nd.D + 1.0) * std::log(T));
    }
    return sum;
}

double fractional_f(const FractionalResolventParams& params, int n, double x, double y) {
    params.validate();
    if (n < 1) throw ConfigError("fractional_f: n must be >= 1");
    if (params.beta_p() == 0.0) {
        // Gamma(a)^n / Gamma(n a) x^(n a - 1)
        const double a = params.alpha_p();
        if (!(x >= 0.0)) throw std::domain_error("fractional_f: x must be >= 0");
        const double e = n * a - 1.0;
        const double lc = n * ln_gamma(a) - ln_gamma(n * a);
        if (x == 0.0) return e < 0.0 ? std::numeric_limits<double>::infinity() : (e == 0.0 ? std::exp(lc) : 0.0);
        return std::exp(std::min(lc + e * std::log(x), 709.5));
    }
    FractionalFamily fam = FractionalFamily::for_power(params);
    return fam.component(n, 0, x, y);
}

double log_fractional_f_bound(const FractionalResolventParams& params, int n, double x, double y) {
    params.validate();
    if (n < 1) throw ConfigError("fractional_f_bound: n must be >= 1");
    const double a = params.alpha_p(), b = params.beta_p(), d = a - b;
    const double lc = std::log(params.c_hat(n)) + n * ln_gamma(a) - ln_gamma(d * n + b);
    const double ex = d * n + b - 1.0;
    double r = lc;
    if (ex != 0.0) r += ex * std::log(x);
    if (b != 0.0) r -= b * std::log(y);
    return r;
}

double fractional_f_bound(const FractionalResolventParams& params, int n, double x, double y) {
    if (!(x >= 0.0) || !(y >= 0.0)) throw std::domain_error("fractional_f_bound: arguments must be >= 0");
    const double lb = log_fractional_f_bound(params, n, x, y);
    if (std::isnan(lb)) return std::numeric_limits<double>::infinity();
    if (lb > 709.0) return std::numeric_limits<double>::infinity();
    return std::exp(lb);
}

}  // namespace volres
