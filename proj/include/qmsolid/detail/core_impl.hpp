#pragma once

// Validation and construction of ModelParams from key-value input.

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>

namespace qmsolid {

namespace detail {

inline double parse_real(const RawConfig& raw, std::string_view key, double fallback)
{
    auto it = raw.find(key);
    if (it == raw.end())
        return fallback;
    const std::string& s = it->second;
    if (s == "inf" || s == "+inf" || s == "infinity")
        return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    while (end && *end == ' ')
        ++end;
    if (s.empty() || end == s.c_str() || *end != '\0' || errno == ERANGE || std::isnan(v))
        throw ConfigError("key '" + std::string(key) + "': not a number: '" + s + "'", std::string(key));
    return v;
}

inline int parse_int(const RawConfig& raw, std::string_view key, int fallback)
{
    const double v = parse_real(raw, key, fallback);
    if (v != std::floor(v) || std::abs(v) > 1e6)
        throw ConfigError("key '" + std::string(key) + "': expected an integer", std::string(key));
    return static_cast<int>(v);
}

inline void require_nonnegative(double v, const char* key)
{
    if (!(v >= 0.0) || std::isinf(v))
        throw ConfigError(std::string("key '") + key + "' must be a finite nonnegative number", key);
}

} // namespace detail

inline void validate(const ModelParams& p)
{
    using K = ModelKind;
    detail::require_nonnegative(p.thiele, "thiele");
    detail::require_nonnegative(p.accumulation_psi, "psi");
    detail::require_nonnegative(p.grain_thiele_sq, "sigma_g_sq");
    detail::require_nonnegative(p.structural_psi, "structural_psi");
    detail::require_nonnegative(p.beta_rpm, "beta");
    detail::require_nonnegative(p.thiele_a, "thiele_a");
    detail::require_nonnegative(p.thiele_c, "thiele_c");
    if (!(p.z_ratio > 0.0) || std::isinf(p.z_ratio))
        throw ConfigError("key 'z' must be positive", "z");
    if (!(p.porosity0 > 0.0 && p.porosity0 < 1.0))
        throw ConfigError("key 'porosity0' must lie in (0, 1)", "porosity0");
    if (auto* f = std::get_if<FilmResistance>(&p.surface); f && !(f->sherwood > 0.0))
        throw ConfigError("key 'sherwood' must be positive or inf", "sherwood");

    const K k = p.kind;
    const bool grain_layer = k == K::GrainProductLayer || k == K::GrainModified;

    if (k == K::VolumeFirstOrder && p.solid_order != 1.0)
        throw ConfigError("VolumeFirstOrder requires solid_order = 1", "solid_order");
    if (k == K::VolumeHalfOrder && p.solid_order != 0.5)
        throw ConfigError("VolumeHalfOrder requires solid_order = 0.5", "solid_order");
    if (k != K::VolumeFirstOrder && k != K::VolumeHalfOrder && p.solid_order != 1.0)
        throw ConfigError("solid_order applies only to the volume models", "solid_order");

    // Irrelevant fields must sit at their neutral values.
    if (!grain_layer && p.grain_thiele_sq != 0.0)
        throw ConfigError("sigma_g_sq applies only to the product-layer and modified grain models", "sigma_g_sq");
    if (k != K::RandomPore && p.beta_rpm != 0.0)
        throw ConfigError("beta applies only to the random pore model", "beta");
    if (k != K::RandomPore && p.structural_psi != 0.0)
        throw ConfigError("structural_psi applies only to the random pore model", "structural_psi");
    if (k != K::RandomPore && k != K::GrainModified && p.z_ratio != 1.0)
        throw ConfigError("z applies only to the random pore and modified grain models", "z");
    if (k != K::Nucleation && p.nucleation_order != 1)
        throw ConfigError("nucleation_order applies only to the nucleation model", "nucleation_order");
    if (k == K::Nucleation && p.nucleation_order != 1 && p.nucleation_order != 3)
        throw ConfigError("nucleation_order must be 1 or 3", "nucleation_order");
    if (k != K::Simultaneous && (p.thiele_a != 0.0 || p.thiele_c != 0.0 || p.psi_ab != 1.0))
        throw ConfigError("psi_ab, thiele_a and thiele_c apply only to the simultaneous model", "psi_ab");

    if (grain_layer && !p.pellet.is_sphere())
        throw ConfigError("product-layer and modified grain models need a spherical pellet (fp = 3)", "fp");
    if (grain_layer && p.grain.shape_factor() != 3)
        throw ConfigError("product-layer and modified grain models need spherical grains (fg = 3)", "fg");
    if ((k == K::RandomPore || k == K::Simultaneous) && !p.pellet.is_sphere())
        throw ConfigError(std::string(to_string(k)) + " needs a spherical pellet (fp = 3)", "fp");
    if (k != K::GrainSimple && !grain_layer && p.grain.shape_factor() != 3)
        throw ConfigError("fg applies only to the grain models", "fg");

    if (!is_dirichlet(p.surface)) {
        const bool allowed = p.quasi_steady() && ((k == K::GrainSimple && p.pellet.is_sphere()) || k == K::RandomPore);
        if (!allowed)
            throw ConfigError("finite sherwood is supported only for the quasi-steady spherical simple grain "
                              "and random pore models",
                              "sherwood");
    }
    if (k == K::Simultaneous) {
        if (!(p.psi_ab >= 0.0 && p.psi_ab <= 1.0))
            throw ConfigError("psi_ab must lie in [0, 1]", "psi_ab");
        if (!p.quasi_steady())
            throw ConfigError("the simultaneous model is quasi-steady only (psi = 0)", "psi");
    }
    if (k == K::RandomPore && !p.quasi_steady() && p.beta_rpm != 0.0)
        throw ConfigError("the unsteady random pore model needs beta = 0", "beta");
    if (k != K::VolumeHalfOrder && p.half_order_modulus != HalfOrderModulus::Standard)
        throw ConfigError("half_order_modulus applies only to VolumeHalfOrder", "half_order_modulus");
}

inline ModelParams build_model(const RawConfig& raw)
{
    static const std::set<std::string, std::less<>> known = {
        "kind",   "thiele",    "psi",      "sigma_g_sq",       "structural_psi",   "beta",
        "z",      "porosity0", "sherwood", "solid_order",      "nucleation_order", "psi_ab",
        "thiele_a", "thiele_c", "fp",      "fg",               "half_order_modulus"};
    for (const auto& [key, value] : raw)
        if (!known.contains(key))
            throw ConfigError("unknown model key '" + key + "'", key);

    ModelParams p;
    auto kit = raw.find("kind");
    if (kit != raw.end()) {
        auto k = parse_model_kind(kit->second);
        if (!k)
            throw ConfigError("unknown model kind '" + kit->second + "'", "kind");
        p.kind = *k;
    }

    // Shape and number parsing first, so that malformed values are reported
    // even when a required key is also missing.
    p.pellet = PelletGeometry(detail::parse_int(raw, "fp", 3));
    p.grain = GrainGeometry(detail::parse_int(raw, "fg", 3));
    p.thiele = detail::parse_real(raw, "thiele", 0.0);
    p.accumulation_psi = detail::parse_real(raw, "psi", 0.0);
    p.grain_thiele_sq = detail::parse_real(raw, "sigma_g_sq", 0.0);
    p.structural_psi = detail::parse_real(raw, "structural_psi", 0.0);
    p.beta_rpm = detail::parse_real(raw, "beta", 0.0);
    p.z_ratio = detail::parse_real(raw, "z", 1.0);
    p.porosity0 = detail::parse_real(raw, "porosity0", 0.5);
    const double sh = detail::parse_real(raw, "sherwood", std::numeric_limits<double>::infinity());
    if (std::isinf(sh) && sh > 0.0)
        p.surface = Dirichlet{};
    else
        p.surface = FilmResistance{sh};
    const double default_order = p.kind == ModelKind::VolumeHalfOrder ? 0.5 : 1.0;
    p.solid_order = detail::parse_real(raw, "solid_order", default_order);
    p.nucleation_order = detail::parse_int(raw, "nucleation_order", 1);
    p.psi_ab = detail::parse_real(raw, "psi_ab", 1.0);
    p.thiele_a = detail::parse_real(raw, "thiele_a", 0.0);
    p.thiele_c = detail::parse_real(raw, "thiele_c", 0.0);
    if (auto it = raw.find("half_order_modulus"); it != raw.end()) {
        if (it->second == "standard")
            p.half_order_modulus = HalfOrderModulus::Standard;
        else if (it->second == "linearized")
            p.half_order_modulus = HalfOrderModulus::Linearized;
        else
            throw ConfigError("half_order_modulus must be 'standard' or 'linearized'", "half_order_modulus");
    }

    if (kit == raw.end())
        throw ConfigError("missing required key 'kind'", "kind");
    if (p.kind == ModelKind::Simultaneous) {
        for (const char* key : {"thiele_a", "thiele_c", "psi_ab"})
            if (!raw.contains(key))
                throw ConfigError(std::string("missing required key '") + key + "'", key);
        p.thiele = p.thiele_a;
    }
    else if (!raw.contains("thiele")) {
        throw ConfigError("missing required key 'thiele'", "thiele");
    }
    validate(p);
    return p;
}

inline ScaledModel dimensionless_groups_from_dimensional(const RawConfig& d)
{
    auto get = [&](const char* key) {
        if (!d.contains(key))
            throw ConfigError(std::string("missing required quantity '") + key + "'", key);
        const double v = detail::parse_real(d, key, 0.0);
        if (!(v > 0.0) || std::isinf(v))
            throw ConfigError(std::string("quantity '") + key + "' must be strictly positive", key);
        return v;
    };
    auto get_or = [&](const char* key, double fallback) { return d.contains(key) ? get(key) : fallback; };

    auto kit = d.find("kind");
    if (kit == d.end())
        throw ConfigError("missing required key 'kind'", "kind");
    auto kind = parse_model_kind(kit->second);
    if (!kind)
        throw ConfigError("unknown model kind '" + kit->second + "'", "kind");

    // Dimensionless pass-through keys.
    RawConfig model;
    model["kind"] = kit->second;
    for (const char* key : {"fp", "fg", "structural_psi", "z", "sherwood", "nucleation_order", "half_order_modulus",
                            "beta", "sigma_g_sq"})
        if (auto it = d.find(key); it != d.end())
            model[key] = it->second;

    const double R = get("R");
    const double nu_b = get_or("nu_B", 1.0);
    ScaledModel out;
    double thiele = 0.0;
    auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };

    switch (*kind) {
    case ModelKind::VolumeFirstOrder:
    case ModelKind::VolumeHalfOrder: {
        const double n = *kind == ModelKind::VolumeHalfOrder ? 0.5 : 1.0;
        const double kv = get("k_v"), cb0 = get("C_B0"), de0 = get("D_e0");
        thiele = R * std::sqrt(kv * std::pow(cb0, n) / de0);
        if (d.contains("C_Ab"))
            out.theta_per_second = nu_b * kv * get("C_Ab") * std::pow(cb0, n - 1.0);
        break;
    }
    case ModelKind::GrainSimple:
    case ModelKind::GrainProductLayer:
    case ModelKind::GrainModified: {
        const double fg = detail::parse_int(d, "fg", 3);
        const double ks = get("k_s"), eps0 = get("porosity0"), de0 = get("D_e0"), rg0 = get("r_g0");
        thiele = R * std::sqrt(fg * ks * (1.0 - eps0) / (de0 * rg0));
        if (*kind != ModelKind::GrainSimple && d.contains("D_p")) {
            if (d.contains("sigma_g_sq"))
                throw ConfigError("give either D_p or sigma_g_sq, not both", "sigma_g_sq");
            model["sigma_g_sq"] = fmt(ks * rg0 / (2.0 * fg * get("D_p")));
        }
        if (*kind == ModelKind::GrainModified)
            model["porosity0"] = fmt(eps0);
        if (d.contains("C_Ab"))
            out.theta_per_second = nu_b * ks * get("C_Ab") * get("M_B") / (get("rho_B") * rg0);
        break;
    }
    case ModelKind::RandomPore: {
        const double ks = get("k_s"), s0 = get("S_0"), de0 = get("D_e0"), eps0 = get("porosity0");
        thiele = R * std::sqrt(ks * s0 / (nu_b * de0));
        model["porosity0"] = fmt(eps0);
        if (d.contains("D_p")) {
            if (d.contains("beta"))
                throw ConfigError("give either D_p or beta, not both", "beta");
            model["beta"] = fmt(2.0 * ks * (1.0 - eps0) / (nu_b * get("D_p") * s0));
        }
        if (d.contains("C_Ab"))
            out.theta_per_second = ks * s0 * get("C_Ab") / (get("C_B0") * (1.0 - eps0));
        break;
    }
    case ModelKind::Nucleation: {
        const double fp = detail::parse_int(d, "fp", 3);
        const double kv = get("k_v"), eps0 = get("porosity0");
        thiele = R * std::sqrt(kv * get("rho_B") * (1.0 - eps0) / (2.0 * fp * get("D_e0") * get("M_B")));
        if (d.contains("C_Ab"))
            out.theta_per_second = nu_b * kv * get("C_Ab");
        break;
    }
    case ModelKind::Simultaneous:
        throw ConfigError("the simultaneous model has no dimensional parameterisation; give dimensionless groups",
                          "kind");
    }
    model["thiele"] = fmt(thiele);

    double psi = 0.0;
    if (d.contains("C_Ab") && d.contains("C_B0")) {
        const double eps = get("porosity0");
        psi = eps * get("C_Ab") / ((1.0 - eps) * get("C_B0"));
    }
    out.accumulation_psi = psi;
    if (auto it = d.find("gas_accumulation"); it != d.end() && it->second == "true")
        model["psi"] = fmt(psi);
    out.params = build_model(model);
    return out;
}

} // namespace qmsolid
