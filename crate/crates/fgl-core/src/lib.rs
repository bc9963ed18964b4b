//! Exact arithmetic for truncated multivariate formal group laws over
//! ℓ-adic coefficient rings.
//!
//! The crate provides, bottom up:
//!
//! * coefficient rings `Z/ℓ^N` with valuation tracking ([`ring`]),
//! * prime fields `F_ℓ` and their quadratic extensions ([`fp`]),
//! * Newton polygons with exact rational slopes ([`newton`]),
//! * univariate polynomials over `F_ℓ`, resultants and discriminants
//!   ([`upoly`]),
//! * sparse truncated multivariate power series ([`series`]),
//! * formal group laws of dimension 1 and 2 with multiplication-by-m,
//!   symmetry, r-exponent and height computations ([`fgl`]),
//! * multivariate Hensel lifting over `Z/ℓ^N` ([`hensel`]),
//! * structural tameness certificates for symmetric height-4 laws and
//!   their ℓ⁴-perturbations ([`certify`]),
//! * the explicit supersingular genus-2 curve families ([`curve`]).
//!
//! Everything is `no_std` + `alloc`: there is no IO here. Serialization
//! and the command-line surface live in the companion `fgl-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod certify;
pub mod curve;
pub mod fgl;
pub mod fp;
pub mod hensel;
pub mod newton;
pub mod rat;
pub mod ring;
pub mod rng;
pub mod series;
pub mod upoly;

pub use certify::{
    certify_perturbed, certify_symmetric, lemma_shape_check, HypothesisCheck, LemmaKind,
    LemmaShapeReport, TameCertificate, TheoremCited, Verdict,
};
pub use curve::{
    deuring_poly, find_quadratic_factor, is_supersingular, supersingular_base_curve, two_torsion,
    validate_curve, BaseCurve, DeuringFactor, HyperellipticSextic,
};
pub use fgl::{FormalGroupLaw, MulByM};
pub use newton::NewtonPolygon;
pub use rat::Rat;
pub use ring::{PadicCoeff, Ring, Val};
pub use series::TruncatedSeries;
