#include "nearsir/degree_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nearsir/errors.hpp"

namespace nearsir {

namespace {

std::int64_t sum_counts(const std::vector<std::int64_t>& v) {
    std::int64_t s = 0;
    for (auto c : v) s += c;
    return s;
}

std::int64_t weighted_sum(const std::vector<std::int64_t>& v) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < v.size(); ++k) s += static_cast<std::int64_t>(k) * v[k];
    return s;
}

int top_degree(const std::vector<std::int64_t>& v) {
    for (int k = static_cast<int>(v.size()) - 1; k >= 0; --k)
        if (v[k] > 0) return k;
    return 0;
}

} // namespace

std::int64_t DegreeConfiguration::count_susceptible() const { return sum_counts(n_s); }
std::int64_t DegreeConfiguration::count_infective() const { return sum_counts(n_i); }
std::int64_t DegreeConfiguration::count_recovered() const { return sum_counts(n_r); }

std::int64_t DegreeConfiguration::count_vertices() const {
    return count_susceptible() + count_infective() + count_recovered();
}

std::int64_t DegreeConfiguration::total_degree() const {
    return weighted_sum(n_s) + weighted_sum(n_i) + weighted_sum(n_r);
}

std::int64_t DegreeConfiguration::x_i0() const { return weighted_sum(n_i); }

int DegreeConfiguration::max_degree() const {
    return std::max({top_degree(n_s), top_degree(n_i), top_degree(n_r)});
}

int DegreeConfiguration::max_susceptible_degree() const { return top_degree(n_s); }
int DegreeConfiguration::max_infective_degree() const { return top_degree(n_i); }

void DegreeConfiguration::validate() const {
    for (const auto* v : {&n_s, &n_i, &n_r})
        for (auto c : *v)
            if (c < 0) throw Error(Errc::BadConfig, "negative degree count");
    if (count_vertices() < 1) throw Error(Errc::BadConfig, "configuration has no vertices");
    if (!(beta > 0)) throw Error(Errc::BadConfig, "beta must be positive");
    if (rho < 0) throw Error(Errc::BadConfig, "rho must be nonnegative");
    if (total_degree() % 2 != 0)
        throw Error(Errc::OddTotalDegree, "total degree is odd; no pairing exists");
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::NuZero: return "NuZero";
        case Regime::NuFinite: return "NuFinite";
        case Regime::NuInfinite: return "NuInfinite";
    }
    return "?";
}

MomentSummary compute_moments(const DegreeConfiguration& config) {
    MomentSummary m;
    const double n_s = static_cast<double>(config.count_susceptible());
    const double n = static_cast<double>(config.count_vertices());
    if (n_s > 0) {
        double w1 = 0, w2 = 0, w3 = 0, wc = 0;
        for (std::size_t ks = 0; ks < config.n_s.size(); ++ks) {
            const double k = static_cast<double>(ks);
            const double c = static_cast<double>(config.n_s[ks]);
            w1 += k * c;
            w2 += k * (k - 1) * c;
            w3 += k * (k - 1) * (k - 2) * c;
            wc += k * k * k * c;
        }
        m.lambda = w1 / n_s;
        m.lambda2 = w2 / n_s;
        m.lambda3 = w3 / n_s;
        m.third_moment_bound = wc / n_s;
    }
    if (n > 0) m.mean_total_degree = static_cast<double>(config.total_degree()) / n;
    return m;
}

double compute_r0(const DegreeConfiguration& config) {
    const std::int64_t total = config.total_degree();
    if (total == 0) throw Error(Errc::ZeroTotalDegree, "no half-edges at all");
    double biased = 0;
    for (std::size_t ks = 0; ks < config.n_s.size(); ++ks) {
        const double k = static_cast<double>(ks);
        biased += (k - 1) * k * static_cast<double>(config.n_s[ks]);
    }
    const double pi = config.beta / (config.rho + config.beta);
    return pi * biased / static_cast<double>(total);
}

double compute_alpha(const DegreeConfiguration& config) {
    const std::int64_t n_s = config.count_susceptible();
    if (n_s == 0) throw Error(Errc::NoSusceptibles, "alpha needs a susceptible population");
    double biased = 0;
    for (std::size_t ks = 0; ks < config.n_s.size(); ++ks) {
        const double k = static_cast<double>(ks);
        biased += k * (k - 1) * static_cast<double>(config.n_s[ks]);
    }
    const double ratio = static_cast<double>(config.total_degree()) / static_cast<double>(n_s);
    return -(1.0 + config.rho / config.beta) * ratio + biased / static_cast<double>(n_s);
}

double CriticalityReport::f(double t) const {
    const double l3 = moments.lambda3;
    if (regime == Regime::NuInfinite) return 1.0 - 0.5 * l3 * t * t;
    return nu + t - 0.5 * l3 * t * t;
}

CriticalityReport compute_criticality(const DegreeConfiguration& config,
                                      const RegimeThresholds& thresholds) {
    CriticalityReport rep;
    rep.thresholds = thresholds;
    rep.moments = compute_moments(config);
    rep.r0 = compute_r0(config);
    rep.alpha = compute_alpha(config);
    if (!(rep.alpha > 0)) throw Error(Errc::Subcritical, "alpha <= 0: not above the critical window");
    if (rep.moments.lambda2 <= 0 || rep.moments.lambda3 <= 0)
        throw Error(Errc::DegenerateMoments, "lambda2 and lambda3 must be positive");

    rep.pi = config.beta / (config.beta + config.rho);

    const double n_s = static_cast<double>(config.count_susceptible());
    const double n = static_cast<double>(config.count_vertices());
    const double x_i0 = static_cast<double>(config.x_i0());
    rep.nu = x_i0 / (n_s * rep.alpha * rep.alpha);

    if (rep.nu < thresholds.nu_zero_max) rep.regime = Regime::NuZero;
    else if (rep.nu > thresholds.nu_infinite_min) rep.regime = Regime::NuInfinite;
    else rep.regime = Regime::NuFinite;

    rep.alpha_bar = rep.regime == Regime::NuInfinite ? std::sqrt(x_i0 / n) : rep.alpha;

    const double l = rep.moments.lambda;
    const double l2 = rep.moments.lambda2;
    const double l3 = rep.moments.lambda3;
    // closed-form positive root of the drift quadratic
    rep.xi = rep.regime == Regime::NuInfinite
                 ? std::sqrt(2.0 / l3)
                 : (1.0 + std::sqrt(1.0 + 2.0 * rep.nu * l3)) / l3;

    rep.sigma2 = 2.0 * l * l3 / (l2 * (l2 + l));

    double recovered_half_edges = 0;
    for (std::size_t kr = 0; kr < config.n_r.size(); ++kr)
        recovered_half_edges += static_cast<double>(kr) * static_cast<double>(config.n_r[kr]);
    rep.kappa = (l2 + l + recovered_half_edges / n_s) / (l2 * l3);

    return rep;
}

FinalSizePrediction predict_final_size(const CriticalityReport& report,
                                       const DegreeConfiguration& config) {
    FinalSizePrediction out;
    const double n_s = static_cast<double>(config.count_susceptible());
    const double x_i0 = static_cast<double>(config.x_i0());
    const double l = report.moments.lambda;
    const double l3 = report.moments.lambda3;
    switch (report.regime) {
        case Regime::NuZero:
            out.predicted_size = 2.0 * l / l3 * n_s * report.alpha;
            break;
        case Regime::NuFinite:
            out.predicted_size = l * report.xi * n_s * report.alpha;
            break;
        case Regime::NuInfinite:
            out.predicted_size = std::sqrt(2.0) * l * std::sqrt(n_s * x_i0) / std::sqrt(l3);
            break;
    }
    out.degree_profile.assign(config.n_s.size(), 0.0);
    if (l > 0 && n_s > 0) {
        for (std::size_t k = 0; k < config.n_s.size(); ++k) {
            const double pk = static_cast<double>(config.n_s[k]) / n_s;
            out.degree_profile[k] = static_cast<double>(k) * pk / l;
        }
    }
    return out;
}

namespace {

//! Adaptive interval-halving Simpson quadrature; plain recursion on the
//! standard five-point error estimate.
struct SimpsonQuad {
    double (*fn)(double, const void*);
    const void* ctx;
    int evals = 0;
    static constexpr int kMaxEvals = 200000;

    double eval(double x) {
        if (++evals > kMaxEvals)
            throw Error(Errc::QuadratureFailure, "quadrature did not converge");
        return fn(x, ctx);
    }

    double run(double a, double b, double tol) {
        const double fa = eval(a), fb = eval(b), fm = eval(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return refine(a, b, fa, fm, fb, whole, tol, 60);
    }

    double refine(double a, double b, double fa, double fm, double fb, double whole,
                  double tol, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = eval(0.5 * (a + m));
        const double rm = eval(0.5 * (m + b));
        const double left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
        const double err = left + right - whole;
        if (std::abs(err) <= 15.0 * tol || depth == 0)
            return left + right + err / 15.0;
        return refine(a, m, fa, lm, fm, left, 0.5 * tol, depth - 1) +
               refine(m, b, fm, rm, fb, right, 0.5 * tol, depth - 1);
    }
};

struct PsiIntegrand {
    double coeff;    // k * alpha * kappa / pi
    double exponent; // beta / rho
    double center;   // rho / (beta + rho)
};

double psi_integrand(double x, const void* ctx) {
    const auto& p = *static_cast<const PsiIntegrand*>(ctx);
    // x^(beta/rho) through logs so a huge exponent degrades gracefully to the
    // rho -> 0 limit (power underflows to 0 on (0,1)) instead of overflowing
    double xp;
    if (x <= 0.0) xp = 0.0;
    else if (x >= 1.0) xp = 1.0;
    else xp = std::exp(p.exponent * std::log(x));
    return std::exp(p.coeff * (xp - p.center));
}

} // namespace

double psi_n(int k, const CriticalityReport& report, const DegreeConfiguration& config) {
    if (k <= 0) return 0.0;
    if (config.rho == 0.0) return 0.0;
    PsiIntegrand ctx;
    ctx.coeff = static_cast<double>(k) * report.alpha * report.kappa / report.pi;
    ctx.exponent = config.beta / config.rho;
    ctx.center = config.rho / (config.beta + config.rho);
    SimpsonQuad quad{psi_integrand, &ctx};
    const double integral = quad.run(0.0, 1.0, 1e-10);
    return std::log(integral);
}

double predict_small_outbreak_probability(const CriticalityReport& report,
                                          const DegreeConfiguration& config,
                                          bool corrected) {
    double exponent = -report.kappa * report.alpha * static_cast<double>(config.x_i0());
    if (corrected && config.rho > 0) {
        for (std::size_t k = 0; k < config.n_i.size(); ++k)
            if (config.n_i[k] > 0)
                exponent += static_cast<double>(config.n_i[k]) *
                            psi_n(static_cast<int>(k), report, config);
    }
    return std::clamp(std::exp(exponent), 0.0, 1.0);
}

std::vector<Diagnostic> validate_assumptions(const DegreeConfiguration& config) {
    using Level = Diagnostic::Level;
    std::vector<Diagnostic> out;
    const auto m = compute_moments(config);
    const double n = static_cast<double>(config.count_vertices());
    const double n_s = static_cast<double>(config.count_susceptible());
    const double x_i0 = static_cast<double>(config.x_i0());

    // D2: uniform third-moment control. The top susceptible degree class must
    // not dominate the third moment (tail-driven moments break every constant).
    {
        double top_share = 0.0;
        const int kmax = config.max_susceptible_degree();
        if (m.third_moment_bound > 0 && n_s > 0) {
            const double top = std::pow(static_cast<double>(kmax), 3.0) *
                               static_cast<double>(config.n_s[kmax]) / n_s;
            top_share = top / m.third_moment_bound;
        }
        out.push_back({"D2_third_moment_top_share", top_share,
                       top_share <= 0.2 ? Level::Pass : Level::Warn,
                       "share of sum k^3 n_Sk contributed by the largest degree"});
    }
    // D3: second moment over all vertices stays O(1); guards simple-graph
    // rejection odds and multi-edge density.
    {
        double second = 0.0;
        auto add = [&](const std::vector<std::int64_t>& v) {
            for (std::size_t k = 0; k < v.size(); ++k)
                second += static_cast<double>(k) * static_cast<double>(k) *
                          static_cast<double>(v[k]);
        };
        add(config.n_s);
        add(config.n_i);
        add(config.n_r);
        second /= n;
        out.push_back({"D3_second_moment", second, second <= 30.0 ? Level::Pass : Level::Warn,
                       "sum k^2 n_k / n"});
    }
    // D4: strictly above the critical window: alpha > 0 and n_S alpha^3 large.
    {
        double alpha = 0.0;
        bool have_alpha = n_s > 0;
        if (have_alpha) alpha = compute_alpha(config);
        const bool pos = have_alpha && alpha > 0;
        out.push_back({"D4_alpha_positive", alpha, pos ? Level::Pass : Level::Fail,
                       "criticality measure must be > 0"});
        const double window = pos ? n_s * alpha * alpha * alpha : 0.0;
        out.push_back({"D4_ns_alpha_cubed", window,
                       window >= 10.0 ? Level::Pass : Level::Warn,
                       "distance above the critical window; >= 10 is comfortable"});
    }
    // D5: initial infection pressure small relative to n, and no single seed
    // carrying most of it.
    {
        const double frac = x_i0 / n;
        out.push_back({"D5_xi0_over_n", frac, frac <= 0.1 ? Level::Pass : Level::Warn,
                       "initially infective half-edges per vertex"});
        double dmax_share = 0.0;
        if (x_i0 > 0) dmax_share = static_cast<double>(config.max_infective_degree()) / x_i0;
        out.push_back({"D5_seed_degree_share", dmax_share,
                       dmax_share <= 0.2 ? Level::Pass : Level::Warn,
                       "largest seed degree over X_I0"});
    }
    // D6: some susceptible mass at degree >= 3, otherwise no giant is possible.
    {
        std::int64_t heavy = 0;
        for (std::size_t k = 3; k < config.n_s.size(); ++k) heavy += config.n_s[k];
        out.push_back({"D6_degree3_mass", static_cast<double>(heavy),
                       heavy > 0 ? Level::Pass : Level::Fail,
                       "susceptible vertices of degree >= 3"});
    }
    // D7: susceptibles are a non-vanishing share of the population.
    {
        const double share = n > 0 ? n_s / n : 0.0;
        out.push_back({"D7_susceptible_share", share,
                       share >= 0.1 ? Level::Pass : Level::Warn, "n_S / n"});
    }
    // degree ceilings the proofs assume: d_Smax = o(n_S^{1/3}), d_Imax = o(X_I0)
    {
        const double cap = n_s > 0 ? std::cbrt(n_s) : 0.0;
        const double ratio = cap > 0 ? config.max_susceptible_degree() / cap : 0.0;
        out.push_back({"dSmax_over_ns_cuberoot", ratio,
                       ratio <= 2.0 ? Level::Pass : Level::Warn,
                       "largest susceptible degree relative to n_S^(1/3)"});
    }
    return out;
}

} // namespace nearsir
