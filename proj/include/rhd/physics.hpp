#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "rhd/linalg.hpp"

namespace rhd {

struct GasModel {
    double gamma = 5.0 / 3.0; // adiabatic index, in (1, 2]
};

struct UnphysicalState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rest-mass density, velocity (units of c) and pressure.
template <std::size_t Dim>
struct Prim {
    double rho = 1.0;
    Vec<Dim> v{};
    double p = 1.0;

    bool admissible() const
    {
        return rho > 0.0 && p > 0.0 && dot(v, v) < 1.0 && std::isfinite(rho) &&
               std::isfinite(p);
    }
};

/// Lab-frame mass density D, momentum density m and energy density E.
template <std::size_t Dim>
struct Cons {
    double D = 0.0;
    Vec<Dim> m{};
    double E = 0.0;
};

template <std::size_t Dim>
using State = Vec<Dim + 2>; // (D, m_1..m_d, E) packed as a flat vector

template <std::size_t Dim>
inline State<Dim> pack(const Cons<Dim>& c)
{
    State<Dim> u;
    u[0] = c.D;
    for (int i = 0; i < Dim; ++i) u[1 + i] = c.m[i];
    u[Dim + 1] = c.E;
    return u;
}

template <std::size_t Dim>
inline Cons<Dim> unpack(const State<Dim>& u)
{
    Cons<Dim> c;
    c.D = u[0];
    for (int i = 0; i < Dim; ++i) c.m[i] = u[1 + i];
    c.E = u[Dim + 1];
    return c;
}

template <std::size_t Dim>
inline double lorentz_factor(const Prim<Dim>& w)
{
    return 1.0 / std::sqrt(1.0 - dot(w.v, w.v));
}

/// Specific enthalpy h = 1 + e + p/rho for the ideal-gas closure.
template <std::size_t Dim>
inline double enthalpy(const Prim<Dim>& w, const GasModel& gas)
{
    return 1.0 + gas.gamma / (gas.gamma - 1.0) * w.p / w.rho;
}

/// Thermodynamic entropy s = ln(p / rho^Gamma).
template <std::size_t Dim>
inline double thermo_entropy(const Prim<Dim>& w, const GasModel& gas)
{
    return std::log(w.p) - gas.gamma * std::log(w.rho);
}

template <std::size_t Dim>
inline Cons<Dim> prim_to_cons(const Prim<Dim>& w, const GasModel& gas)
{
    const double v2 = dot(w.v, w.v);
    if (v2 >= 1.0) throw std::domain_error("prim_to_cons: |v| >= 1");
    const double W = 1.0 / std::sqrt(1.0 - v2);
    const double h = enthalpy(w, gas);
    Cons<Dim> c;
    c.D = w.rho * W;
    const double rhw2 = w.rho * h * W * W;
    for (int i = 0; i < Dim; ++i) c.m[i] = rhw2 * w.v[i];
    c.E = rhw2 - w.p;
    return c;
}

/// Point flux F_k(U) in physical direction k.
template <std::size_t Dim>
inline State<Dim> point_flux(const Prim<Dim>& w, const GasModel& gas, int k)
{
    const Cons<Dim> c = prim_to_cons(w, gas);
    State<Dim> f;
    f[0] = c.D * w.v[k];
    for (int i = 0; i < Dim; ++i) f[1 + i] = c.m[i] * w.v[k];
    f[1 + k] += w.p;
    f[Dim + 1] = c.m[k];
    return f;
}

namespace detail {

// Pressure residual of E + p = D W + Gamma/(Gamma-1) p W^2 recast as
// f(p) = p - (Gamma-1) rho e, with v = m/(E+p). Negative below the root,
// positive above it for admissible (D, m, E).
inline double pressure_residual(double p, double D, double m2, double E, double gamma,
                                double* dfdp = nullptr)
{
    const double Ep = E + p;
    const double u = 1.0 - m2 / (Ep * Ep); // 1 - |v|^2
    const double su = std::sqrt(u);
    const double f = p - (gamma - 1.0) * (Ep * u - p - D * su);
    if (dfdp) {
        const double du = 2.0 * m2 / (Ep * Ep * Ep);
        *dfdp = 1.0 - (gamma - 1.0) * (u + Ep * du - 1.0 - 0.5 * D * du / su);
    }
    return f;
}

} // namespace detail

/// Recover primitives from conserved variables. Safeguarded Newton on the
/// pressure with an analytic derivative, bracketed and falling back to
/// bisection when a step leaves the bracket. A pressure guess inside the
/// bracket (e.g. the previous value of the same cell) shortens the search.
template <std::size_t Dim>
inline Prim<Dim> cons_to_prim(const Cons<Dim>& c, const GasModel& gas,
                              double p_guess = 0.0)
{
    const double m2 = dot(c.m, c.m);
    const double mabs = std::sqrt(m2);
    const double q = c.E - std::sqrt(c.D * c.D + m2);
    if (!(c.D > 0.0) || !(c.E > mabs) || !(q > 0.0))
        throw UnphysicalState("cons_to_prim: inadmissible conserved state (D=" +
                              std::to_string(c.D) + ", |m|=" + std::to_string(mabs) +
                              ", E=" + std::to_string(c.E) + ")");

    const double eps = 1e-13;
    double lo = std::max(1e-300, mabs - c.E + eps * c.E);
    double hi = std::max(c.E, 2.0 * lo);
    while (detail::pressure_residual(hi, c.D, m2, c.E, gas.gamma) <= 0.0) hi *= 2.0;

    // Initial guess: caller-provided value or ideal-gas estimate, clamped
    // into the bracket.
    double p = (p_guess > lo && p_guess < hi)
                   ? p_guess
                   : std::clamp((gas.gamma - 1.0) * q, lo, hi);
    const int max_newton = 50;
    int it = 0;
    for (; it < max_newton; ++it) {
        double df;
        const double f = detail::pressure_residual(p, c.D, m2, c.E, gas.gamma, &df);
        if (f > 0.0)
            hi = p;
        else
            lo = p;
        const double step = f / df;
        double pn = p - step;
        if (!(pn > lo && pn < hi)) pn = 0.5 * (lo + hi);
        if (std::abs(pn - p) <= 1e-14 * (std::abs(pn) + 1e-300)) {
            p = pn;
            break;
        }
        p = pn;
    }
    if (it == max_newton) {
        // Bisection to full precision.
        for (int b = 0; b < 200 && (hi - lo) > 1e-15 * hi; ++b) {
            const double mid = 0.5 * (lo + hi);
            if (detail::pressure_residual(mid, c.D, m2, c.E, gas.gamma) > 0.0)
                hi = mid;
            else
                lo = mid;
        }
        p = 0.5 * (lo + hi);
    }

    Prim<Dim> w;
    const double Ep = c.E + p;
    for (int i = 0; i < Dim; ++i) w.v[i] = c.m[i] / Ep;
    const double v2 = dot(w.v, w.v);
    if (v2 >= 1.0) throw UnphysicalState("cons_to_prim: recovered |v| >= 1");
    const double W = 1.0 / std::sqrt(1.0 - v2);
    w.rho = c.D / W;
    w.p = p;
    return w;
}

/// Entropy function, flux, variables and conjugate potentials.
template <std::size_t Dim>
struct EntropyBundle {
    double eta;       // entropy function -rho W s / (Gamma - 1)
    Vec<Dim> q;       // entropy flux eta * v
    State<Dim> V;     // entropy variables d eta / d U
    double phi;       // potential V^T U - eta = rho W
    Vec<Dim> psi;     // potential flux V^T F_k - q_k = rho W v_k
};

template <std::size_t Dim>
inline EntropyBundle<Dim> entropy_bundle(const Prim<Dim>& w, const GasModel& gas)
{
    const double G = gas.gamma;
    const double W = lorentz_factor(w);
    const double s = thermo_entropy(w, gas);
    EntropyBundle<Dim> b;
    b.eta = -w.rho * W * s / (G - 1.0);
    for (int i = 0; i < Dim; ++i) b.q[i] = b.eta * w.v[i];
    b.V[0] = (G - s) / (G - 1.0) + w.rho / w.p;
    for (int i = 0; i < Dim; ++i) b.V[1 + i] = w.rho * W * w.v[i] / w.p;
    b.V[Dim + 1] = -w.rho * W / w.p;
    b.phi = w.rho * W;
    for (int i = 0; i < Dim; ++i) b.psi[i] = w.rho * W * w.v[i];
    return b;
}

/// Ideal-gas relativistic sound speed, c_s^2 = Gamma p / (rho h).
template <std::size_t Dim>
inline double sound_speed(const Prim<Dim>& w, const GasModel& gas)
{
    return std::sqrt(gas.gamma * w.p / (w.rho * enthalpy(w, gas)));
}

/// Eigenvalues of the x1-direction flux Jacobian, sorted ascending:
/// (lambda-, v1, ..., v1, lambda+). All magnitudes are below 1.
template <std::size_t Dim>
inline State<Dim> eigenvalues(const Prim<Dim>& w, const GasModel& gas)
{
    const double cs = sound_speed(w, gas);
    const double cs2 = cs * cs;
    const double v1 = w.v[0];
    const double v2 = dot(w.v, w.v);
    const double W = lorentz_factor(w);
    const double rad = 1.0 - v1 * v1 - (v2 - v1 * v1) * cs2;
    if (rad < 0.0) throw std::domain_error("eigenvalues: negative radicand");
    const double den = 1.0 - v2 * cs2;
    const double a = v1 * (1.0 - cs2);
    const double b = cs / W * std::sqrt(rad);
    State<Dim> lam;
    lam[0] = (a - b) / den;
    for (int i = 1; i <= Dim; ++i) lam[i] = v1;
    lam[Dim + 1] = (a + b) / den;
    return lam;
}

} // namespace rhd
