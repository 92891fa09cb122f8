#include "ksl/error.hpp"
#include "ksl/scattering.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace ksl {

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt_pi = std::sqrt(pi);

struct Rule1d {
    std::vector<double> x, w;
};

// Gauss-Legendre nodes on [-1, 1].
Rule1d gauss_legendre(int count) {
    Rule1d r;
    const auto pos = boost::math::legendre_p_zeros<double>(count);
    for (double z : pos) {
        const double d = boost::math::legendre_p_prime(count, z);
        const double w = 2.0 / ((1 - z * z) * d * d);
        r.x.push_back(z);
        r.w.push_back(w);
        if (z != 0.0) {
            r.x.push_back(-z);
            r.w.push_back(w);
        }
    }
    return r;
}

const Rule1d& cached_gl(int count) {
    static thread_local std::map<int, Rule1d> cache;
    auto it = cache.find(count);
    if (it == cache.end()) it = cache.emplace(count, gauss_legendre(count)).first;
    return it->second;
}

struct Direction {
    double e[3];
    double w;
};

// Full direction set on S^{n-1} for the Omega integrand (uniform on S^1; GL polar x uniform
// azimuth on S^2).
std::vector<Direction> omega_directions(int n, int level) {
    std::vector<Direction> out;
    if (n == 2) {
        const int K = 256 * level;
        for (int k = 0; k < K; ++k) {
            const double th = 2 * pi * k / K;
            out.push_back({{std::cos(th), std::sin(th), 0}, 2 * pi / K});
        }
        return out;
    }
    const int P = 48 * level, A = 96 * level;
    const Rule1d& gl = cached_gl(P);
    for (std::size_t p = 0; p < gl.x.size(); ++p) {
        const double mu = gl.x[p], st = std::sqrt(std::max(0.0, 1 - mu * mu));
        for (int k = 0; k < A; ++k) {
            const double ph = 2 * pi * k / A;
            out.push_back({{st * std::cos(ph), st * std::sin(ph), mu}, gl.w[p] * 2 * pi / A});
        }
    }
    return out;
}

const std::vector<Direction>& cached_directions(int n, int level) {
    static thread_local std::map<std::pair<int, int>, std::vector<Direction>> cache;
    auto key = std::make_pair(n, level);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, omega_directions(n, level)).first;
    return it->second;
}

// int_0^inf r^{n-1} e^{-(r-b)^2} dr.
double radial_closed(int n, double b) {
    const double g = std::exp(-b * b), t = 0.5 * sqrt_pi * std::erfc(-b);
    return n == 2 ? 0.5 * g + b * t : 0.5 * b * g + (b * b + 0.5) * t;
}

// int_0^inf r^{n-1} e^{-(r-b)^2} erfc(z r + c) dr for z > 0.
double radial_tail(int n, double b, double z, double c, int level) {
    const double lo = std::max(0.0, b - 9.0);
    const double hi = std::min(b + 9.0, (6.5 - c) / z);
    if (!(hi > lo)) return 0.0;
    const double piece = std::min(1.0, 1.0 / z);
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / piece)));
    const Rule1d& gl = cached_gl(8 * level);
    const double h = (hi - lo) / pieces;
    double acc = 0;
    for (int p = 0; p < pieces; ++p) {
        const double a = lo + p * h;
        for (std::size_t q = 0; q < gl.x.size(); ++q) {
            const double r = a + 0.5 * h * (gl.x[q] + 1);
            const double rn = n == 2 ? r : r * r;
            acc += 0.5 * h * gl.w[q] * rn * std::exp(-(r - b) * (r - b)) * std::erfc(z * r + c);
        }
    }
    return acc;
}

double dotn(const double* a, const double* b, int n) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

struct SearchPoint {
    double rho, v, phi, value;
};

void point_vectors(int n, const SearchPoint& p, double* x, double* xi) {
    for (int a = 0; a < 3; ++a) x[a] = xi[a] = 0;
    (void)n;
    x[0] = p.rho;
    xi[0] = p.v * std::cos(p.phi);
    xi[1] = p.v * std::sin(p.phi);
}

// Grid search over the symmetry-reduced parameters x = (rho, 0..), xi = v (cos phi, sin phi, 0..),
// followed by a pattern search from the best few grid points.
SearchPoint search_sup(int n, double rho_max, double v_max, double z, int level) {
    const int nr = n == 2 ? 13 : 7, nv = n == 2 ? 21 : 11, np = n == 2 ? 13 : 7;
    auto eval = [&](SearchPoint& p) {
        double x[3], xi[3];
        point_vectors(n, p, x, xi);
        p.value = omega_integrand(n, x, xi, z, level);
    };
    std::vector<SearchPoint> pts;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nv; ++j)
            for (int k = 0; k < np; ++k) {
                if (j == 0 && k > 0) continue;
                SearchPoint p{rho_max * i / (nr - 1), v_max * j / (nv - 1), pi * k / (np - 1), 0};
                eval(p);
                pts.push_back(p);
            }
    std::sort(pts.begin(), pts.end(), [](const SearchPoint& a, const SearchPoint& b) { return a.value > b.value; });
    SearchPoint best = pts.front();
    const double steps0[3] = {rho_max / (nr - 1) / 2, v_max / (nv - 1) / 2, pi / (np - 1) / 2};
    const double lo[3] = {0, 0, 0}, hi[3] = {rho_max, v_max, pi};
    for (std::size_t start = 0; start < std::min<std::size_t>(3, pts.size()); ++start) {
        SearchPoint cur = pts[start];
        double step[3] = {steps0[0], steps0[1], steps0[2]};
        for (int iter = 0; iter < 60; ++iter) {
            bool moved = false;
            for (int d = 0; d < 3; ++d) {
                for (int sgn : {1, -1}) {
                    SearchPoint t = cur;
                    double* c = d == 0 ? &t.rho : d == 1 ? &t.v : &t.phi;
                    *c = std::clamp(*c + sgn * step[d], lo[d], hi[d]);
                    eval(t);
                    if (t.value > cur.value) {
                        cur = t;
                        moved = true;
                    }
                }
            }
            if (!moved) {
                for (double& s : step) s *= 0.5;
                if (step[1] < 1e-3) break;
            }
        }
        if (cur.value > best.value) best = cur;
    }
    return best;
}

OmegaResult omega_search(int n, double rho_max, double z, double envelope, const OmegaConfig& cfg) {
    if (n != 2 && n != 3) fail(ErrorKind::unsupported, "Omega is implemented for n = 2 and n = 3");
    if (!(z >= 0)) fail(ErrorKind::argument, "omega_tail needs z >= 0");
    const SearchPoint best = search_sup(n, rho_max, cfg.xi_max, z, cfg.level);
    OmegaResult r;
    point_vectors(n, best, r.x_arg.data(), r.xi_arg.data());
    r.grid_max = best.value;
    r.refined = omega_integrand(n, r.x_arg.data(), r.xi_arg.data(), z, cfg.level + 1);
    r.envelope = envelope;
    if (std::abs(r.refined - r.grid_max) > 1e-3 * std::max(r.grid_max, 1e-300)) {
        std::ostringstream os;
        os.precision(17);
        os << "Omega quadrature did not converge: level " << cfg.level << " gives " << r.grid_max << ", level "
           << cfg.level + 1 << " gives " << r.refined;
        fail(ErrorKind::convergence, os.str());
    }
    r.value = std::max(r.grid_max, r.envelope);
    return r;
}

}  // namespace

double omega_integrand(int n, const double* x, const double* xi, double z, int level) {
    if (n != 2 && n != 3) fail(ErrorKind::unsupported, "Omega is implemented for n = 2 and n = 3");
    const double x2 = dotn(x, x, n), v2 = dotn(xi, xi, n);
    double acc = 0;
    for (const Direction& d : cached_directions(n, level)) {
        const double xn = dotn(x, d.e, n), b = dotn(xi, d.e, n);
        const double perp = std::max(0.0, x2 - xn * xn) + std::max(0.0, v2 - b * b);
        if (perp > 700) continue;
        const double radial = z == 0.0 ? radial_closed(n, b) * std::erfc(xn) : radial_tail(n, b, z, xn, level);
        acc += d.w * std::exp(-perp) * 0.5 * sqrt_pi * radial;
    }
    return acc;
}

double omega_gaussian_bound(int n) { return sqrt_pi * std::pow(pi, 0.5 * n); }

double sphere_measure(int n) { return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n); }

OmegaResult omega(int n, const OmegaConfig& cfg) {
    const double env = std::pow(pi, 0.5 * n) * 0.5 * sqrt_pi * std::erfc(-cfg.x_max);
    return omega_search(n, cfg.x_max, 0.0, env, cfg);
}

OmegaResult omega_tail(double R, double z, int n, const OmegaConfig& cfg) {
    if (!(R > 0)) fail(ErrorKind::argument, "omega_tail needs R > 0");
    // For z > 0 the integrand vanishes as |xi| grows, so the sup is attained inside the search box.
    const double env = z == 0.0 ? std::pow(pi, 0.5 * n) * 0.5 * sqrt_pi * std::erfc(-R) : 0.0;
    return omega_search(n, R, z, env, cfg);
}

double omega_tail_bound(double R, double z, int n, bool ball_volume) {
    if (!(z > 1)) fail(ErrorKind::argument, "the Omega_D(z) bound needs z > 1");
    const double lz = std::log(z);
    const double V = ball_volume ? std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n + 1) : sphere_measure(n);
    const double first = std::pow(pi, 0.5 * n) * 0.5 * sqrt_pi * std::erfc(z / lz - R);
    const double second = V / std::pow(lz, n) * 0.5 * sqrt_pi * std::erfc(-R);
    return first + second;
}

GainLossIntegrals frame_gain_loss(const FrameSpec& frame, const double* x, const double* xi,
                                  const RadiusConfig& cfg, double T) {
    const int n = frame.n;
    const double la = std::log(frame.amplitude);
    auto log_lambda = [&](const double* y, const double* v, double t) {
        double r2 = 0, v2 = 0;
        for (int a = 0; a < n; ++a) {
            const double d = y[a] - t * v[a];
            r2 += d * d;
            v2 += v[a] * v[a];
        }
        return la - r2 - v2;
    };
    const SphereRule rule = sphere_rule(n, cfg.angular_nodes);
    const Rule1d& gl = cached_gl(cfg.gl_nodes);
    const double lx0 = log_lambda(x, xi, 0.0);

    // Orthonormal frames with the direction first.
    struct Basis {
        double e[3][3];
        double w;
    };
    std::vector<Basis> bases;
    for (std::size_t k = 0; k < rule.count(); ++k) {
        Basis b{};
        b.w = rule.weights[k];
        for (int a = 0; a < n; ++a) b.e[0][a] = rule.dirs[k * n + a];
        if (n == 2) {
            b.e[1][0] = -b.e[0][1];
            b.e[1][1] = b.e[0][0];
        } else {
            const double* e = b.e[0];
            double t[3] = {0, 0, 0};
            int m = 0;
            for (int a = 1; a < 3; ++a)
                if (std::abs(e[a]) < std::abs(e[m])) m = a;
            t[m] = 1;
            double c[3] = {e[1] * t[2] - e[2] * t[1], e[2] * t[0] - e[0] * t[2], e[0] * t[1] - e[1] * t[0]};
            const double cn = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
            for (int a = 0; a < 3; ++a) b.e[1][a] = c[a] / cn;
            const double* f = b.e[1];
            b.e[2][0] = e[1] * f[2] - e[2] * f[1];
            b.e[2][1] = e[2] * f[0] - e[0] * f[2];
            b.e[2][2] = e[0] * f[1] - e[1] * f[0];
        }
        bases.push_back(b);
    }

    std::map<double, std::pair<double, double>> memo;
    auto at_time = [&](double s) -> std::pair<double, double> {
        auto it = memo.find(s);
        if (it != memo.end()) return it->second;
        double X[3] = {0, 0, 0}, m[3] = {0, 0, 0};
        for (int a = 0; a < n; ++a) {
            X[a] = x[a] + s * xi[a];
            m[a] = s * X[a] / (1 + s * s);
        }
        const double sig = 1.0 / std::sqrt(2 * (1 + s * s));
        const double lxs = log_lambda(X, xi, s);
        double gain = 0, loss = 0;
        for (const Basis& b : bases) {
            const double ma = dotn(m, b.e[0], n), kink = dotn(xi, b.e[0], n);
            double mb[2] = {dotn(m, b.e[1], n), n == 3 ? dotn(m, b.e[2], n) : 0.0};
            double parts[2][2] = {{ma - 7 * sig, std::min(kink, ma + 7 * sig)},
                                  {std::max(kink, ma - 7 * sig), ma + 7 * sig}};
            double g_dir = 0, l_dir = 0;
            for (auto& part : parts) {
                if (!(part[1] > part[0])) continue;
                const double ha = 0.5 * (part[1] - part[0]);
                for (std::size_t i = 0; i < gl.x.size(); ++i) {
                    const double al = part[0] + ha * (gl.x[i] + 1);
                    const double wa = ha * gl.w[i];
                    const int nb = n == 2 ? 1 : static_cast<int>(gl.x.size());
                    for (std::size_t j = 0; j < gl.x.size(); ++j) {
                        for (int q = 0; q < nb; ++q) {
                            const double b1 = mb[0] + 7 * sig * gl.x[j];
                            const double b2 = n == 3 ? mb[1] + 7 * sig * gl.x[q] : 0.0;
                            const double w = wa * 7 * sig * gl.w[j] * (n == 3 ? 7 * sig * gl.w[q] : 1.0);
                            double xs[3], xp[3], xsp[3];
                            for (int a = 0; a < n; ++a) xs[a] = al * b.e[0][a] + b1 * b.e[1][a] + b2 * b.e[2][a];
                            double p = 0;
                            for (int a = 0; a < n; ++a) p += b.e[0][a] * (xi[a] - xs[a]);
                            for (int a = 0; a < n; ++a) {
                                xp[a] = xi[a] - p * b.e[0][a];
                                xsp[a] = xs[a] + p * b.e[0][a];
                            }
                            const double ap = std::abs(p);
                            l_dir += w * ap * std::exp(log_lambda(X, xs, s) + lxs - lx0);
                            g_dir += w * ap * std::exp(log_lambda(X, xp, s) + log_lambda(X, xsp, s) - lx0);
                        }
                    }
                }
            }
            gain += b.w * g_dir;
            loss += b.w * l_dir;
        }
        return memo[s] = {gain, loss};
    };

    // Breakpoints around the time of closest approach, where the integrand concentrates.
    std::vector<double> cuts{0.0, T};
    const double v2 = dotn(xi, xi, n);
    if (v2 > 0) {
        const double s0 = std::clamp(-dotn(x, xi, n) / v2, 0.0, T);
        const double w = 1.0 / std::max(1.0, std::sqrt(v2));
        cuts.push_back(s0);
        for (double k = 1; k <= 64; k *= 2) {
            cuts.push_back(std::clamp(s0 - k * w, 0.0, T));
            cuts.push_back(std::clamp(s0 + k * w, 0.0, T));
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    GainLossIntegrals out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        out.gain += GK::integrate([&](double s) { return at_time(s).first; }, cuts[i], cuts[i + 1], 8, 1e-9);
        out.loss += GK::integrate([&](double s) { return at_time(s).second; }, cuts[i], cuts[i + 1], 8, 1e-9);
    }
    out.tail_bound = sphere_measure(n) * frame.amplitude * omega_integrand(n, x, xi, T, 1);
    return out;
}

RadiusResult isotropic_radius(const FrameSpec& frame, double omega_value, const RadiusConfig& cfg) {
    if (frame.kind != FrameSpec::Kind::maxwellian || frame.x_width != 1.0 || frame.xi_width != 1.0)
        fail(ErrorKind::unsupported, "direct isotropic radius needs the Maxwellian frame with unit widths");
    if (frame.n != 2 && frame.n != 3) fail(ErrorKind::unsupported, "isotropic radius needs n = 2 or n = 3");
    if (!(frame.amplitude > 0)) fail(ErrorKind::argument, "frame amplitude must be > 0");
    if (!(omega_value > 0)) fail(ErrorKind::argument, "omega must be > 0");
    const int n = frame.n;
    std::vector<std::pair<Vec, Vec>> pts;
    const double rhos[] = {0, 1.5, 3, 6}, speeds[] = {1, 2, 4, 8};
    const int nphi = 5;
    for (double rho : rhos) {
        pts.push_back({{rho, 0, 0}, {0, 0, 0}});
        for (double v : speeds)
            for (int k = 0; k < nphi; ++k) {
                const double ph = pi * k / (nphi - 1);
                pts.push_back({{rho, 0, 0}, {v * std::cos(ph), v * std::sin(ph), 0}});
            }
    }
    for (double V : {20.0, 40.0, 80.0, 160.0, 320.0, 640.0}) pts.push_back({{6, 0, 0}, {-V, 0, 0}});

    RadiusResult res;
    res.omega = omega_value;
    res.points = pts.size();
    double T = cfg.T;
    for (int attempt = 0; attempt < 5; ++attempt, T *= 2) {
        double gs = 0, ls = 0, tail = 0;
        for (auto& [x, xi] : pts) {
            const GainLossIntegrals r = frame_gain_loss(frame, x.data(), xi.data(), cfg, T);
            gs = std::max(gs, r.gain);
            ls = std::max(ls, r.loss);
            tail = std::max(tail, r.tail_bound);
        }
        const double ratio = tail / std::min(gs, ls);
        if (ratio <= cfg.tail_fraction) {
            res.gain_sup = gs;
            res.loss_sup = ls;
            res.T = T;
            res.tail_ratio = ratio;
            res.alpha = 1.0 / (2.0 * (gs + ls));
            res.alpha_lower = 1.0 / (4.0 * sphere_measure(n) * omega_value * frame.amplitude);
            return res;
        }
    }
    fail(ErrorKind::convergence, "isotropic radius: time-truncation tail above " +
                                     std::to_string(cfg.tail_fraction) + " of the integral; increase T");
}

}  // namespace ksl
