#include "gcm/kernel_scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gcm {

namespace {

// Power tables shared by the z-equation and the error formula. Summation is
// in ascending i for reproducibility.
struct PowerTables {
    std::vector<double> ipow_b;       // i^b
    std::vector<double> ipow_neg_a;   // i^-a

    PowerTables(double a, double b, std::int64_t m) {
        ipow_b.resize(static_cast<std::size_t>(m));
        ipow_neg_a.resize(static_cast<std::size_t>(m));
        for (std::int64_t i = 1; i <= m; ++i) {
            const double x = static_cast<double>(i);
            ipow_b[static_cast<std::size_t>(i - 1)] = std::pow(x, b);
            ipow_neg_a[static_cast<std::size_t>(i - 1)] = std::pow(x, -a);
        }
    }
};

double z_equation_rhs(const PowerTables& tables, double lambda, double n, double z) {
    const double zn = z / n;
    double s = 0.0;
    for (double ib : tables.ipow_b) s += 1.0 / (1.0 + zn * ib);
    return lambda + zn * s;
}

double bisect_z(const PowerTables& tables, double lambda, double n) {
    // RHS - lambda < sum i^-b, so [lambda, lambda + sum i^-b] brackets the root.
    double zeta_b = 0.0;
    for (double ib : tables.ipow_b) zeta_b += 1.0 / ib;
    double lo = lambda;
    double hi = lambda + zeta_b;
    if (!(z_equation_rhs(tables, lambda, n, hi) - hi <= 0.0))
        throw NoBracket("solve_z: upper bracket failed");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid - z_equation_rhs(tables, lambda, n, mid) > 0.0)
            hi = mid;
        else
            lo = mid;
        if (hi - lo < 1e-15 * hi) break;
    }
    const double z = 0.5 * (lo + hi);
    if (std::abs(z - z_equation_rhs(tables, lambda, n, z)) > 1e-12 * std::max(1.0, z))
        throw RootFindingFailed("solve_z: residual above tolerance");
    return z;
}

double eval_eps_g(const PowerTables& tables, double n, double z) {
    double num = 0.0;
    double den_sum = 0.0;
    const double nz = n / z;
    const std::size_t m = tables.ipow_b.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double inv_ib = 1.0 / tables.ipow_b[i];  // i^-b
        const double g = 1.0 + nz * inv_ib;
        num += tables.ipow_neg_a[i] / (g * g);
        den_sum += inv_ib * inv_ib / (g * g);
    }
    const double den = 1.0 - (n / (z * z)) * den_sum;
    if (!(den > 0.0))
        throw DenominatorNonPositive("generalization_error_powerlaw: denominator <= 0");
    return num / den;
}

}  // namespace

std::int64_t PowerLawSpec::effective_cutoff() const {
    if (cutoff > 0) return cutoff;
    std::int64_t max_n = 0;
    for (std::int64_t n : n_values) max_n = std::max(max_n, n);
    return std::max<std::int64_t>(1000000, 100 * max_n);
}

void PowerLawSpec::validate() const {
    if (!(a > 1.0)) throw std::invalid_argument("PowerLawSpec: a must be > 1");
    if (!(b > 1.0)) throw std::invalid_argument("PowerLawSpec: b must be > 1 (summability)");
    if (!(lambda > 0.0)) throw std::invalid_argument("PowerLawSpec: lambda must be > 0");
    for (std::int64_t n : n_values)
        if (n < 1) throw std::invalid_argument("PowerLawSpec: n values must be positive");
    if (cutoff > 0)
        for (std::int64_t n : n_values)
            if (cutoff < n) throw std::invalid_argument("PowerLawSpec: cutoff must be >= max n");
}

double solve_z(const PowerLawSpec& spec, std::int64_t n) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("solve_z: n must be positive");
    PowerTables tables(spec.a, spec.b, spec.effective_cutoff());
    return bisect_z(tables, spec.lambda, static_cast<double>(n));
}

double generalization_error_powerlaw(const PowerLawSpec& spec, std::int64_t n, double z) {
    spec.validate();
    if (!(z >= spec.lambda)) throw std::invalid_argument("generalization_error_powerlaw: z < lambda");
    PowerTables tables(spec.a, spec.b, spec.effective_cutoff());
    return eval_eps_g(tables, static_cast<double>(n), z);
}

double powerlaw_tail_bound(const PowerLawSpec& spec) {
    const double m = static_cast<double>(spec.effective_cutoff());
    return std::pow(m, 1.0 - spec.a) / (spec.a - 1.0);
}

const char* to_string(ScalingRegime r) {
    switch (r) {
        case ScalingRegime::EffectiveRegularization: return "effective_regularization";
        case ScalingRegime::LambdaDominated: return "lambda_dominated";
        case ScalingRegime::Crossover: return "crossover";
    }
    return "?";
}

ScalingRegime classify_regime(const PowerLawSpec& spec, std::int64_t n) {
    const double threshold = std::pow(spec.lambda, -1.0 / (spec.b - 1.0));
    if (static_cast<double>(n) < threshold / 10.0) return ScalingRegime::EffectiveRegularization;
    if (static_cast<double>(n) > threshold * 10.0) return ScalingRegime::LambdaDominated;
    return ScalingRegime::Crossover;
}

std::vector<PowerLawPoint> powerlaw_curve(const PowerLawSpec& spec) {
    spec.validate();
    if (spec.n_values.empty()) throw std::invalid_argument("powerlaw_curve: empty n grid");
    PowerTables tables(spec.a, spec.b, spec.effective_cutoff());
    std::vector<PowerLawPoint> points;
    points.reserve(spec.n_values.size());
    for (std::int64_t n : spec.n_values) {
        PowerLawPoint pt;
        pt.n = n;
        pt.z = bisect_z(tables, spec.lambda, static_cast<double>(n));
        pt.eps_g = eval_eps_g(tables, static_cast<double>(n), pt.z);
        pt.regime = classify_regime(spec, n);
        points.push_back(pt);
    }
    return points;
}

double fit_loglog_slope(const std::vector<double>& n_values,
                        const std::vector<double>& e_values) {
    if (n_values.size() != e_values.size())
        throw DimensionMismatch("fit_loglog_slope: length mismatch");
    if (n_values.size() < 4)
        throw std::invalid_argument("fit_loglog_slope: need at least 4 points");
    // Exclude the two extreme points; the scalings are asymptotic statements.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const std::size_t count = n_values.size() - 2;
    for (std::size_t i = 1; i + 1 < n_values.size(); ++i) {
        const double x = std::log(n_values[i]);
        const double y = std::log(e_values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double c = static_cast<double>(count);
    return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

LearningCurve finite_d_kernel_curve(const SpectralModel& model, double lambda,
                                    std::vector<std::int64_t> n_values) {
    model.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("finite_d_kernel_curve: lambda must be > 0");
    if (n_values.empty()) throw std::invalid_argument("finite_d_kernel_curve: empty n grid");
    std::sort(n_values.begin(), n_values.end());

    const Index d = model.d();
    const double dd = static_cast<double>(d);
    const double trace = model.eigenvalues.sum();

    LearningCurve curve;
    curve.sweep_variable = "n";
    for (std::int64_t n64 : n_values) {
        const double n = static_cast<double>(n64);
        const double alpha = n / dd;

        auto rhs = [&](double z) {
            double s = 0.0;
            for (Index i = 0; i < d; ++i) {
                const double w = model.eigenvalues(i);
                if (w == 0.0) continue;
                s += w / (z / alpha + w);
            }
            return lambda + (z / n) * s;
        };
        double lo = lambda;
        double hi = lambda + trace / dd + 1.0;
        if (!(rhs(hi) - hi <= 0.0)) throw NoBracket("finite_d_kernel_curve: bracket failed");
        int iters = 0;
        for (; iters < 200; ++iters) {
            const double mid = 0.5 * (lo + hi);
            if (mid - rhs(mid) > 0.0)
                hi = mid;
            else
                lo = mid;
            if (hi - lo < 1e-16 * hi) break;
        }
        const double z = 0.5 * (lo + hi);

        // eps_g = [ (z^2 d / n^2) sum theta~_i / (z d/n + w_i)^2 ] /
        //         [ 1 - (1/n) sum w_i^2 / (z d/n + w_i)^2 ],  theta~_i = t_i^2 / w_i.
        const double zdn = z * dd / n;
        double num = 0.0, den_sum = 0.0;
        for (Index i = 0; i < d; ++i) {
            const double w = model.eigenvalues(i);
            const double t2 = model.teacher_projection(i) * model.teacher_projection(i);
            const double g = zdn + w;
            if (w > 0.0) num += (t2 / w) / (g * g);
            den_sum += w * w / (g * g);
        }
        const double den = 1.0 - den_sum / n;
        if (!(den > 0.0)) throw DenominatorNonPositive("finite_d_kernel_curve: denominator <= 0");
        const double eps_g = (z * z * dd / (n * n)) * num / den;

        // Recover the overlaps: z = lambda (1 + V), V^ = m^ = alpha lambda / z.
        const double v = z / lambda - 1.0;
        const double v_hat = alpha * lambda / z;
        double sm = 0.0;
        for (Index i = 0; i < d; ++i) {
            const double w = model.eigenvalues(i);
            const double t2 = model.teacher_projection(i) * model.teacher_projection(i);
            if (w == 0.0 && t2 == 0.0) continue;
            sm += t2 / (lambda + v_hat * w);
        }
        const double m = v_hat * sm / dd;
        LearningCurveRow row;
        row.x = n;
        row.e_gen = eps_g;
        row.e_train = eps_g * lambda * lambda / (z * z);  // = eps_g / (1+V)^2
        row.v = v;
        row.q = eps_g - model.rho + 2.0 * m;
        row.m = m;
        row.converged = true;
        row.iterations = iters;
        curve.rows.push_back(row);
    }
    return curve;
}

}  // namespace gcm
