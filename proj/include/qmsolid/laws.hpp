#pragma once

/// \file laws.hpp
/// Per-model solid laws. Each law maps a node's solid state to its modified
/// Thiele modulus and maps the node's cumulative gas exposure E (the time
/// integral of a) to its solid state through the model's closed form.

#include <cmath>
#include <concepts>
#include <limits>
#include <variant>

#include "core.hpp"
#include "numerics.hpp"

namespace qmsolid {

/// log(b) floor; b never drops below exp(-700).
inline constexpr double min_log_solid = -700.0;

template <class L>
concept SolidLaw = requires(const L& law, double solid, double exposure) {
    { law.modulus(solid, exposure) } -> std::convertible_to<double>;
    { law.solid(exposure) } -> std::convertible_to<double>;
    { law.exhaustion_exposure() } -> std::convertible_to<double>;
    { law.relaxation(solid) } -> std::convertible_to<double>;
    { law.film_coefficient(solid) } -> std::convertible_to<double>;
    { law.plugged(solid) } -> std::convertible_to<bool>;
};

namespace detail {

struct LawBase
{
    double psi = 0.0;
    double thiele = 0.0;
    double inv_sh = 0.0;

    double exhaustion_exposure() const { return std::numeric_limits<double>::infinity(); }
    double relaxation(double) const { return psi * thiele * thiele; }
    double film_coefficient(double) const { return inv_sh; }
    bool plugged(double) const { return false; }
};

} // namespace detail

/// First-order volume reaction: b = exp(-E), M = phi sqrt(b).
struct VolumeFirstOrderLaw : detail::LawBase
{
    double modulus(double b, double) const { return thiele * std::sqrt(b); }
    double solid(double E) const { return std::exp(std::max(-E, min_log_solid)); }
};

/// Half-order volume reaction: sqrt(b) = 1 - E/2, exhausted at E = 2.
struct VolumeHalfOrderLaw : detail::LawBase
{
    HalfOrderModulus variant = HalfOrderModulus::Standard;

    double modulus(double b, double) const
    {
        return variant == HalfOrderModulus::Standard ? thiele * std::sqrt(b) : thiele * std::sqrt(std::sqrt(b));
    }
    double solid(double E) const
    {
        const double s = std::max(0.0, 1.0 - 0.5 * E);
        return s * s;
    }
    double exhaustion_exposure() const { return 2.0; }
};

/// Simple grain model: r* = 1 - E, M = sigma r*^((F_g - 1)/2).
struct GrainSimpleLaw : detail::LawBase
{
    int fg = 3;

    double modulus(double r, double) const
    {
        switch (fg) {
        case 1: return r > 0.0 ? thiele : 0.0;
        case 2: return thiele * std::sqrt(r);
        default: return thiele * r;
        }
    }
    double solid(double E) const { return std::max(0.0, 1.0 - E); }
    double exhaustion_exposure() const { return 1.0; }
};

/// Grain model with product-layer resistance (spherical grains):
/// r + 3 s r^2 - 2 s r^3 = 1 + s - E, with s = sigma_g^2.
struct GrainProductLayerLaw : detail::LawBase
{
    double sg2 = 0.0;

    double modulus(double r, double) const
    {
        return thiele * r / std::sqrt(1.0 + 6.0 * sg2 * (r - r * r));
    }
    double solid(double E) const
    {
        const double rhs = 1.0 + sg2 - E;
        if (rhs >= 1.0 + sg2)
            return 1.0;
        if (rhs <= 0.0)
            return 0.0;
        if (sg2 == 0.0)
            return rhs;
        return num::bisect([&](double r) { return r + 3.0 * sg2 * r * r - 2.0 * sg2 * r * r * r - rhs; }, 0.0, 1.0,
                           1e-14);
    }
    double exhaustion_exposure() const { return 1.0 + sg2; }
};

/// Grain model with structural change (spherical grains and pellet). The
/// grain outer radius r** = (Z + (1 - Z) r^3)^(1/3) grows or shrinks as the
/// product forms and changes the porosity, which scales the pore diffusivity
/// by delta = (eps/eps0)^2.
struct GrainModifiedLaw : detail::LawBase
{
    double sg2 = 0.0;
    double z = 1.0;
    double eps0 = 0.5;

    double outer_radius(double r) const { return std::cbrt(z + (1.0 - z) * r * r * r); }

    double porosity_ratio(double r) const
    {
        return 1.0 - ((1.0 - eps0) / eps0) * (z - 1.0) * (1.0 - r * r * r);
    }
    double porosity(double r) const { return eps0 * porosity_ratio(r); }
    double diffusivity_ratio(double r) const
    {
        const double q = porosity_ratio(r);
        return q * q;
    }
    bool plugged(double r) const { return porosity_ratio(r) <= 0.0; }

    double resistance(double r) const
    {
        return 1.0 + 6.0 * sg2 * (r - r * r / outer_radius(r));
    }
    double modulus(double r, double) const
    {
        if (plugged(r))
            return 0.0;
        return thiele * r / std::sqrt(resistance(r) * diffusivity_ratio(r));
    }

    // F(r) - F(1) where dF/dr = resistance(r). Written with expm1/log1p so
    // it stays accurate as Z -> 1, where the direct (Z - 1)^-1 form cancels.
    double shifted_integral(double r) const
    {
        const double c = 1.0 - r * r * r;
        const double w = (z - 1.0) * c;
        const double h = std::abs(w) < 1e-12 ? 2.0 / 3.0 - w / 9.0 : std::expm1((2.0 / 3.0) * std::log1p(w)) / w;
        return (r - 1.0) + 3.0 * sg2 * (r * r - 1.0) + 3.0 * sg2 * c * h;
    }
    double solid(double E) const
    {
        if (E <= 0.0)
            return 1.0;
        if (E >= exhaustion_exposure())
            return 0.0;
        return num::bisect([&](double r) { return shifted_integral(r) + E; }, 0.0, 1.0, 1e-14);
    }
    double exhaustion_exposure() const { return -shifted_integral(0.0); }
    double relaxation(double r) const
    {
        const double d = plugged(r) ? 0.0 : diffusivity_ratio(r);
        return d > 0.0 ? psi * thiele * thiele / d : std::numeric_limits<double>::infinity();
    }
};

/// Random pore model. With u = ln b and s = sqrt(1 - Psi u), the rate
/// -db/dtheta = a b s / (1 - beta Z u/(s + 1)) integrates to
/// G(u) = 2u/(s + 1) - beta Z u^2/(s + 1)^2 = -E.
struct RandomPoreLaw : detail::LawBase
{
    double structural_psi = 0.0;
    double beta = 0.0;
    double z = 1.0;
    double eps0 = 0.5;

    double surface_factor(double u) const { return std::sqrt(1.0 - structural_psi * u); }
    double layer_factor(double u) const
    {
        return 1.0 - beta * z * u / (surface_factor(u) + 1.0);
    }
    double porosity_ratio(double b) const { return 1.0 - (z - 1.0) * (1.0 - eps0) * (1.0 - b) / eps0; }
    double diffusivity_ratio(double b) const
    {
        const double q = porosity_ratio(b);
        return q * q;
    }
    bool plugged(double b) const { return porosity_ratio(b) <= 0.0; }

    double modulus(double b, double) const
    {
        if (plugged(b))
            return 0.0;
        const double u = std::log(std::max(b, std::exp(min_log_solid)));
        return thiele * std::sqrt(b * surface_factor(u) / (layer_factor(u) * diffusivity_ratio(b)));
    }
    double integral(double u) const
    {
        const double s1 = surface_factor(u) + 1.0;
        return 2.0 * u / s1 - beta * z * u * u / (s1 * s1);
    }
    double solid(double E) const
    {
        if (E <= 0.0)
            return 1.0;
        if (beta == 0.0) {
            // s = 1 + Psi E / 2 and u = (1 - s^2)/Psi = -E (1 + Psi E / 4)
            const double u = -E * (1.0 + 0.25 * structural_psi * E);
            return std::exp(std::max(u, min_log_solid));
        }
        if (integral(min_log_solid) >= -E)
            return std::exp(min_log_solid);
        const double u = num::bisect([&](double v) { return integral(v) + E; }, min_log_solid, 0.0, 1e-13);
        return std::exp(u);
    }
    double film_coefficient(double b) const { return inv_sh * (plugged(b) ? 0.0 : diffusivity_ratio(b)); }
};

/// Nucleation (Avrami) kinetics with f(b) = (-ln b)^(1/n): b = exp(-E^n),
/// M^2 = 2 F_p sigma_N^2 n b E^(n-1).
struct NucleationLaw : detail::LawBase
{
    int order = 1;
    int fp = 3;

    double modulus(double b, double E) const
    {
        const double g = order == 1 ? 1.0 : std::pow(std::max(E, 0.0), order - 1);
        return thiele * std::sqrt(2.0 * fp * order * b * g);
    }
    double solid(double E) const
    {
        const double x = order == 1 ? E : std::pow(std::max(E, 0.0), order);
        return std::exp(std::max(-x, min_log_solid));
    }
};

using AnyLaw = std::variant<VolumeFirstOrderLaw, VolumeHalfOrderLaw, GrainSimpleLaw, GrainProductLayerLaw,
                            GrainModifiedLaw, RandomPoreLaw, NucleationLaw>;

/// Law for every single-gas model kind. Simultaneous has its own stepper.
inline AnyLaw make_law(const ModelParams& p)
{
    auto base = [&](auto law) {
        law.psi = p.accumulation_psi;
        law.thiele = p.thiele;
        law.inv_sh = inverse_sherwood(p.surface);
        return law;
    };
    switch (p.kind) {
    case ModelKind::VolumeFirstOrder: return base(VolumeFirstOrderLaw{});
    case ModelKind::VolumeHalfOrder: {
        auto l = base(VolumeHalfOrderLaw{});
        l.variant = p.half_order_modulus;
        return l;
    }
    case ModelKind::GrainSimple: {
        auto l = base(GrainSimpleLaw{});
        l.fg = p.grain.shape_factor();
        return l;
    }
    case ModelKind::GrainProductLayer: {
        auto l = base(GrainProductLayerLaw{});
        l.sg2 = p.grain_thiele_sq;
        return l;
    }
    case ModelKind::GrainModified: {
        auto l = base(GrainModifiedLaw{});
        l.sg2 = p.grain_thiele_sq;
        l.z = p.z_ratio;
        l.eps0 = p.porosity0;
        return l;
    }
    case ModelKind::RandomPore: {
        auto l = base(RandomPoreLaw{});
        l.structural_psi = p.structural_psi;
        l.beta = p.beta_rpm;
        l.z = p.z_ratio;
        l.eps0 = p.porosity0;
        return l;
    }
    case ModelKind::Nucleation: {
        auto l = base(NucleationLaw{});
        l.order = p.nucleation_order;
        l.fp = p.pellet.shape_factor();
        return l;
    }
    case ModelKind::Simultaneous: break;
    }
    throw ConfigError("the simultaneous model has no single-gas solid law", "kind");
}

} // namespace qmsolid
