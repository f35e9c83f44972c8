//! Twisted D-series and the contour identity relating the q-series
//! F(z) = Σ c_f(n)e(nz) at z and at −1/(Nz).
//!
//! The rectangle enclosing "all simple zeros" in the identity cannot exist for
//! a genuine newform, so it is replaced throughout by the residues of Δ_f at
//! the certified zeros with |Im ρ| ≤ T. The identity then holds up to the
//! residue tail above height T, which is what [`identity::main_identity_residual`]
//! measures.

pub mod additive;
pub mod bounds;
pub mod expansions;
pub mod identity;
pub mod phi;
pub mod point;

pub use additive::{
    additive_twist, d_additive_via_characters, mult_twist_d, mult_twist_d_series, SeriesKind,
    TwistValue,
};
pub use point::{TruncationSpec, UpperHalfPoint};
