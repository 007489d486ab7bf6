#pragma once

/// \file core.hpp
/// Domain types shared by every solver: geometries, model parameters, the
/// radial grid and the per-pellet state.

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qmsolid {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Invalid user input. `key()` names the offending configuration key when one
/// is known, so front ends can anchor the message to a file line.
class ConfigError : public std::runtime_error
{
public:
    explicit ConfigError(const std::string& what, std::string key = {})
        : std::runtime_error(what), key_(std::move(key))
    {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A numerical procedure could not deliver a result (non-monotone bracket,
/// singular system, oracle non-convergence).
class SolverError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

/// Pellet shape factor F_p. Only slab (1) and sphere (3) are supported.
class PelletGeometry
{
public:
    constexpr PelletGeometry() = default;

    explicit PelletGeometry(int shape_factor)
        : fp_(shape_factor)
    {
        if (shape_factor != 1 && shape_factor != 3)
            throw ConfigError("unsupported pellet shape F_p=" + std::to_string(shape_factor) +
                                  " (only slab F_p=1 and sphere F_p=3 are supported)",
                              "fp");
    }

    static PelletGeometry slab() { return PelletGeometry(1); }
    static PelletGeometry sphere() { return PelletGeometry(3); }

    constexpr int shape_factor() const noexcept { return fp_; }
    constexpr bool is_sphere() const noexcept { return fp_ == 3; }
    constexpr bool is_slab() const noexcept { return fp_ == 1; }

    friend constexpr bool operator==(PelletGeometry, PelletGeometry) = default;

private:
    int fp_ = 3;
};

/// Grain shape factor F_g in {1, 2, 3}.
class GrainGeometry
{
public:
    constexpr GrainGeometry() = default;

    explicit GrainGeometry(int shape_factor)
        : fg_(shape_factor)
    {
        if (shape_factor < 1 || shape_factor > 3)
            throw ConfigError("unsupported grain shape F_g=" + std::to_string(shape_factor), "fg");
    }

    constexpr int shape_factor() const noexcept { return fg_; }

    friend constexpr bool operator==(GrainGeometry, GrainGeometry) = default;

private:
    int fg_ = 3;
};

/// Surface condition of the gas equation. `Dirichlet` is a = 1 at the
/// surface (sh = +inf); `FilmResistance` is the Robin flux condition
/// da/dy = sh (1 - a).
struct Dirichlet
{
    friend constexpr bool operator==(Dirichlet, Dirichlet) = default;
};

struct FilmResistance
{
    double sherwood = 1.0;
    friend constexpr bool operator==(FilmResistance, FilmResistance) = default;
};

using SurfaceCondition = std::variant<Dirichlet, FilmResistance>;

inline bool is_dirichlet(const SurfaceCondition& s) { return std::holds_alternative<Dirichlet>(s); }

/// 1/sh, zero for a Dirichlet surface.
inline double inverse_sherwood(const SurfaceCondition& s)
{
    if (auto* f = std::get_if<FilmResistance>(&s))
        return 1.0 / f->sherwood;
    return 0.0;
}

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

enum class ModelKind
{
    VolumeFirstOrder,
    VolumeHalfOrder,
    GrainSimple,
    GrainProductLayer,
    GrainModified,
    RandomPore,
    Nucleation,
    Simultaneous
};

inline constexpr ModelKind all_model_kinds[] = {
    ModelKind::VolumeFirstOrder, ModelKind::VolumeHalfOrder,   ModelKind::GrainSimple,
    ModelKind::GrainProductLayer, ModelKind::GrainModified,    ModelKind::RandomPore,
    ModelKind::Nucleation,        ModelKind::Simultaneous};

inline std::string_view to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::VolumeFirstOrder: return "VolumeFirstOrder";
    case ModelKind::VolumeHalfOrder: return "VolumeHalfOrder";
    case ModelKind::GrainSimple: return "GrainSimple";
    case ModelKind::GrainProductLayer: return "GrainProductLayer";
    case ModelKind::GrainModified: return "GrainModified";
    case ModelKind::RandomPore: return "RandomPore";
    case ModelKind::Nucleation: return "Nucleation";
    case ModelKind::Simultaneous: return "Simultaneous";
    }
    return "?";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view name)
{
    for (auto k : all_model_kinds)
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

/// Modulus law of the half-order volume model. `Standard` uses
/// M = phi_v b^(1/2); `Linearized` uses M = phi_v b^(1/4), the modulus of the
/// rate a b^(1/2) linearised in a.
enum class HalfOrderModulus
{
    Standard,
    Linearized
};

/// Dimensionless groups of one model instance. Irrelevant fields sit at
/// their neutral defaults (sigma_g^2 = 0, beta = 0, Z = 1, Dirichlet surface).
struct ModelParams
{
    ModelKind kind = ModelKind::VolumeFirstOrder;

    /// phi_v, sigma, phi_r or sigma_N depending on `kind`.
    double thiele = 1.0;
    /// Accumulation parameter psi; zero selects the quasi-steady gas balance.
    double accumulation_psi = 0.0;
    double grain_thiele_sq = 0.0;
    /// Random pore structural parameter (capital Psi).
    double structural_psi = 0.0;
    double beta_rpm = 0.0;
    /// Molar-volume ratio, Z for the random pore model and Z_v for the
    /// modified grain model.
    double z_ratio = 1.0;
    double porosity0 = 0.5;
    SurfaceCondition surface = Dirichlet{};
    double solid_order = 1.0;
    int nucleation_order = 1;
    double psi_ab = 1.0;
    double thiele_a = 0.0;
    double thiele_c = 0.0;
    PelletGeometry pellet = PelletGeometry::sphere();
    GrainGeometry grain{};
    HalfOrderModulus half_order_modulus = HalfOrderModulus::Standard;

    bool quasi_steady() const noexcept { return accumulation_psi == 0.0; }
    double psi_cb() const noexcept { return 1.0 - psi_ab; }

    /// Gas relaxation time constant psi * (base modulus)^2 of the unsteady
    /// gas balance.
    double relaxation() const noexcept { return accumulation_psi * thiele * thiele; }
};

/// Throws ConfigError when `p` violates the constraints of its model kind.
inline void validate(const ModelParams& p);

using RawConfig = std::map<std::string, std::string, std::less<>>;

inline ModelParams build_model(const RawConfig& raw);

/// Model parameters together with the factor converting physical time to
/// the model's dimensionless time (theta = theta_per_second * t).
struct ScaledModel
{
    ModelParams params;
    double theta_per_second = 0.0;
    /// Accumulation parameter computed from the porosity and the gas/solid
    /// concentration ratio. It is copied into `params` only when the input
    /// sets `gas_accumulation = true`; otherwise the run is quasi-steady.
    double accumulation_psi = 0.0;
};

inline ScaledModel dimensionless_groups_from_dimensional(const RawConfig& dimensional);

// ---------------------------------------------------------------------------
// Grid and state
// ---------------------------------------------------------------------------

/// Uniform radial grid on [0, 1] with an odd node count (Simpson compatible).
class SpatialGrid
{
public:
    static constexpr std::size_t default_nodes = 201;
    static constexpr std::size_t min_nodes = 101;

    explicit SpatialGrid(std::size_t n = default_nodes)
    {
        if (n < min_nodes || n % 2 == 0)
            throw ConfigError("grid node count must be odd and >= " + std::to_string(min_nodes) +
                                  ", got " + std::to_string(n),
                              "n");
        h_ = 1.0 / static_cast<double>(n - 1);
        y_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            y_[i] = static_cast<double>(i) * h_;
        y_.back() = 1.0;
    }

    std::size_t size() const noexcept { return y_.size(); }
    double spacing() const noexcept { return h_; }
    double operator[](std::size_t i) const noexcept { return y_[i]; }
    std::span<const double> nodes() const noexcept { return y_; }

private:
    std::vector<double> y_;
    double h_ = 0.0;
};

enum class Stage
{
    First,
    Second
};

/// Per-pellet state. `solid` holds b (volume, random pore, nucleation,
/// simultaneous) or r* (grain models); `exposure` is the cumulative gas
/// exposure integral of a over time at each node, from which `solid`
/// follows through the model's closed-form law. `solid_a` holds b_A for the
/// simultaneous model and is empty otherwise.
struct PelletState
{
    SpatialGrid grid{};
    double theta = 0.0;
    std::vector<double> solid;
    std::vector<double> exposure;
    std::vector<double> solid_a;
    Stage stage = Stage::First;
    double y_m = 1.0;
    double theta_c = std::numeric_limits<double>::quiet_NaN();
};

/// Gas concentration per node. For the simultaneous model `values` is psi_A
/// and `second` is psi_C.
struct GasProfile
{
    std::vector<double> values;
    std::vector<double> second;
};

// ---------------------------------------------------------------------------
// Packed bed
// ---------------------------------------------------------------------------

/// Dimensionless groups of an isothermal packed bed fed with a constant
/// inlet concentration (g = 1).
struct BedParams
{
    double peclet = 1.0;
    /// Consumption coupling between bulk gas and pellet surface.
    double beta = 0.0;
    /// Pellet Thiele modulus.
    double phi = 1.0;
    double biot = 1.0;
    double length = 1.0;
    /// Number of axial segments with a frozen pellet-surface concentration.
    std::size_t segments = 64;

    void check() const
    {
        auto pos = [](double v, const char* key) {
            if (!(v > 0.0) || std::isinf(v))
                throw ConfigError(std::string("bed key '") + key + "' must be positive", key);
        };
        pos(peclet, "peclet");
        pos(phi, "phi");
        pos(biot, "biot");
        pos(length, "length");
        if (!(beta >= 0.0) || std::isinf(beta))
            throw ConfigError("bed key 'beta' must be nonnegative", "beta");
        if (segments < 1)
            throw ConfigError("bed key 'segments' must be >= 1", "segments");
    }
};

} // namespace qmsolid

#include "detail/core_impl.hpp"
