//! Numerical thresholds shared by the library, the CLI and the test suites.
//!
//! Every pass/fail decision in the crate reads one of these constants. The
//! CLI can override a subset by name (`--tol name=value`); see
//! [`Tolerances`].

use serde::Serialize;

/// Residual allowed in `gᵀQg = Q` for a matrix to count as a group element.
pub const GROUP_FORM: f64 = 1e-10;

/// Residual allowed in `AᵀQ + QA = 0` for a Lie algebra element.
pub const ALGEBRA_FORM: f64 = 1e-10;

/// Null-cone residual for a unit-normalized ray.
pub const NULL_RAY: f64 = 1e-12;

/// A unit-normalized ray is at infinity when `|ξ_d + ξ_{d+1}|` falls below this.
pub const AT_INFINITY: f64 = 1e-10;

/// Matrix identities built from exact products of elementary elements.
pub const GROUP_IDENTITY: f64 = 1e-9;

/// Periodicity of the conformal energy flow.
pub const ENERGY_PERIOD: f64 = 1e-8;

/// Ray action compared pointwise (relative).
pub const ACTION_RELATIVE: f64 = 1e-9;

/// Commutator witnesses and transitivity maps.
pub const WITNESS: f64 = 1e-8;

/// Flow matrices compared against each other (modulo sign).
pub const FLOW_MATRIX: f64 = 1e-8;

/// Closed-form flow maps versus matrix exponentials, pointwise relative.
pub const FLOW_POINTWISE: f64 = 1e-8;

/// One-parameter group law of closed-form flows.
pub const FLOW_GROUP_LAW: f64 = 1e-9;

/// Smallest principal angle between K and iK for K to count as standard.
pub const ANGLE_FLOOR: f64 = 1e-6;

/// Relative singular-value cutoff for the rank of a spanning set.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Tomita operator identities (S², J², JΔJ = Δ⁻¹, KMS symmetry).
pub const MODULAR_IDENTITY: f64 = 1e-6;

/// Principal-angle tolerance for subspace identities (SK = K, JK = K′, ...).
pub const MODULAR_ANGLE: f64 = 1e-6;

/// Biduality `(K′)′ = K`.
pub const BIDUALITY_ANGLE: f64 = 1e-8;

/// Group law of the modular flow.
pub const MODULAR_GROUP_LAW: f64 = 1e-8;

/// S fixes the generators of K.
pub const S_FIXES_K: f64 = 1e-7;

/// Smallest K/iK angle kept when the lattice interval subspaces are reduced to
/// their resolved part. Larger than [`ANGLE_FLOOR`] so that the resulting
/// modular data satisfy [`MODULAR_IDENTITY`] at L = 256.
pub const LATTICE_RESOLUTION_FLOOR: f64 = 1e-4;

/// `𝒥² = −1` on the retained lattice modes.
pub const COMPLEX_STRUCTURE: f64 = 1e-10;

/// Exact lattice symmetries (whole-site rotations).
pub const LATTICE_SYMMETRY: f64 = 1e-10;

/// Group law of the lattice Möbius flow on smooth test vectors at L = 256.
pub const LATTICE_FLOW_GROUP_LAW: f64 = 1e-3;

/// Relative slack applied to calibrated ceilings from the fixtures file.
pub const CEILING_SLACK: f64 = 0.2;

/// Closed form of the one-particle partition sum.
pub const ENERGY_TRACE: f64 = 1e-12;

/// Default half-width of the sampling box for unbounded regions.
pub const DEFAULT_SAMPLE_BOX: f64 = 10.0;

/// Named tolerances that the CLI may override.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub group_identity: f64,
    pub energy_period: f64,
    pub flow_matrix: f64,
    pub flow_group_law: f64,
    pub modular_identity: f64,
    pub modular_angle: f64,
    pub angle_floor: f64,
    pub ceiling_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            group_identity: GROUP_IDENTITY,
            energy_period: ENERGY_PERIOD,
            flow_matrix: FLOW_MATRIX,
            flow_group_law: FLOW_GROUP_LAW,
            modular_identity: MODULAR_IDENTITY,
            modular_angle: MODULAR_ANGLE,
            angle_floor: ANGLE_FLOOR,
            ceiling_slack: CEILING_SLACK,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 8] = [
        "group_identity",
        "energy_period",
        "flow_matrix",
        "flow_group_law",
        "modular_identity",
        "modular_angle",
        "angle_floor",
        "ceiling_slack",
    ];

    /// Sets a tolerance by name. Returns false for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "group_identity" => &mut self.group_identity,
            "energy_period" => &mut self.energy_period,
            "flow_matrix" => &mut self.flow_matrix,
            "flow_group_law" => &mut self.flow_group_law,
            "modular_identity" => &mut self.modular_identity,
            "modular_angle" => &mut self.modular_angle,
            "angle_floor" => &mut self.angle_floor,
            "ceiling_slack" => &mut self.ceiling_slack,
            _ => return false,
        };
        *slot = value;
        true
    }
}
