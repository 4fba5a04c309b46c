#include "bhtlab/rates.hpp"

#include <algorithm>
#include <cmath>

namespace bht {

namespace {

void check_ladder(const std::vector<double>& eps, std::size_t min_len) {
    if (eps.size() < min_len)
        throw ParamError("ladder too short");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0))
            throw ParamError("ladder entries must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1]))
            throw ParamError("ladder must be strictly decreasing");
    }
}

} // namespace

RateFit fit_rate(const std::vector<double>& eps_ladder,
                 const std::vector<double>& values) {
    check_ladder(eps_ladder, 4);
    if (values.size() != eps_ladder.size())
        throw ParamError("fit_rate: ladder/value length mismatch");

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = std::fabs(values[i]);
        if (v <= kRateFloor)
            continue; // converged; excluded
        lx.push_back(std::log(eps_ladder[i]));
        ly.push_back(std::log(v));
    }

    RateFit fit;
    fit.points_used = static_cast<int>(lx.size());
    if (lx.size() < 2) {
        fit.degenerate = true;
        return fit;
    }

    const auto n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::fabs(det) < 1e-30) {
        fit.degenerate = true;
        return fit;
    }
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;

    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double pred = fit.intercept + fit.slope * lx[i];
        ss_res += (ly[i] - pred) * (ly[i] - pred);
        ss_tot += (ly[i] - ymean) * (ly[i] - ymean);
    }
    fit.r_squared = ss_tot < 1e-30 ? (ss_res < 1e-30 ? 1.0 : 0.0)
                                   : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    return fit;
}

Extrapolation extrapolate(const std::vector<double>& eps_ladder,
                          const std::vector<double>& values) {
    check_ladder(eps_ladder, 5);
    if (values.size() != eps_ladder.size())
        throw ParamError("extrapolate: ladder/value length mismatch");

    // Weighted normal equations for {1, e, e^2}, scaled by the largest eps
    // for conditioning.
    const double s = eps_ladder.front();
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double rhs[3] = {0, 0, 0};
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
        const double e = eps_ladder[i] / s;
        const double w = 1.0 / (e * e * e);
        const double basis[3] = {1.0, e, e * e};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c)
                m[r][c] += w * basis[r] * basis[c];
            rhs[r] += w * basis[r] * values[i];
        }
    }

    // Gaussian elimination with partial pivoting on the 3x3 system.
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[idx[r]][col]) > std::fabs(m[idx[piv]][col]))
                piv = r;
        std::swap(idx[col], idx[piv]);
        const double d = m[idx[col]][col];
        if (std::fabs(d) < 1e-300)
            throw ParamError("extrapolate: singular normal equations");
        for (int r = col + 1; r < 3; ++r) {
            const double factor = m[idx[r]][col] / d;
            for (int c = col; c < 3; ++c)
                m[idx[r]][c] -= factor * m[idx[col]][c];
            rhs[idx[r]] -= factor * rhs[idx[col]];
        }
    }
    double coef[3];
    for (int r = 2; r >= 0; --r) {
        double acc = rhs[idx[r]];
        for (int c = r + 1; c < 3; ++c)
            acc -= m[idx[r]][c] * coef[c];
        coef[r] = acc / m[idx[r]][r];
    }

    Extrapolation ex;
    ex.limit = coef[0];
    ex.a1 = coef[1] / s;
    ex.a2 = coef[2] / (s * s);

    double max_resid = 0.0;
    std::vector<double> steps;
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
        const double e = eps_ladder[i];
        const double pred = ex.limit + ex.a1 * e + ex.a2 * e * e;
        max_resid = std::max(max_resid, std::fabs(values[i] - pred));
        if (i > 0)
            steps.push_back(std::fabs(values[i] - values[i - 1]));
    }
    ex.misfit = max_resid;

    std::sort(steps.begin(), steps.end());
    const double median_step = steps[steps.size() / 2];
    double scale = 0.0;
    for (double v : values)
        scale = std::max(scale, std::fabs(v));
    if (median_step > 0.0)
        ex.reliable = ex.misfit <= 10.0 * median_step;
    else
        ex.reliable = ex.misfit <= 1e-12 * std::max(scale, 1.0);
    return ex;
}

std::vector<double> default_eps_ladder(int count) {
    if (count < 1)
        throw ParamError("default_eps_ladder: count must be >= 1");
    std::vector<double> ladder(count);
    double e = 0.1;
    for (int i = 0; i < count; ++i) {
        ladder[i] = e;
        e *= 0.5;
    }
    return ladder;
}

} // namespace bht
