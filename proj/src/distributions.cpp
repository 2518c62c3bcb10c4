#include "mobility/distributions.hpp"

#include "mobility/types.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mobility {

namespace {

constexpr int kMaxIter = 500;
const double kEps = std::numeric_limits<double>::epsilon();
const double kFpMin = std::numeric_limits<double>::min() / kEps;

[[noreturn]] void bad_domain(const char* fn) {
    throw ValidationError(std::string(fn) + ": argument out of domain");
}

// P(a,x) by its power series; converges fast for x < a+1.
double gamma_series(double a, double x) {
    double gln = std::lgamma(a);
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < kMaxIter; ++i) {
        ++ap;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) {
            return sum * std::exp(-x + a * std::log(x) - gln);
        }
    }
    throw ValidationError("gamma_p: series failed to converge");
}

// Q(a,x) by modified-Lentz continued fraction; for x >= a+1.
double gamma_cf(double a, double x) {
    double gln = std::lgamma(a);
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps) {
            return std::exp(-x + a * std::log(x) - gln) * h;
        }
    }
    throw ValidationError("gamma_q: continued fraction failed to converge");
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= kEps) return h;
    }
    throw ValidationError("beta_i: continued fraction failed to converge");
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) bad_domain("gamma_p");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) bad_domain("gamma_q");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_series(a, x) : gamma_cf(a, x);
}

double beta_i(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0) || !(x <= 1.0)) bad_domain("beta_i");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double chi2_sf(double x2, double df) {
    if (!(df > 0.0) || !(x2 >= 0.0)) bad_domain("chi2_sf");
    return gamma_q(0.5 * df, 0.5 * x2);
}

double f_sf(double f, double df1, double df2) {
    if (!(df1 > 0.0) || !(df2 > 0.0) || !(f >= 0.0)) bad_domain("f_sf");
    // P(F >= f) = I_x(df2/2, df1/2) with x = df2/(df2 + df1 f).
    return beta_i(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f));
}

double t_sf_two_sided(double t, double nu) {
    if (!(nu > 0.0) || std::isnan(t)) bad_domain("t_sf_two_sided");
    if (std::isinf(t)) return 0.0;
    return beta_i(0.5 * nu, 0.5, nu / (nu + t * t));
}

}  // namespace mobility
