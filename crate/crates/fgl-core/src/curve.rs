//! The explicit supersingular genus-2 families.
//!
//! Everything is anchored on the palindromic elliptic model
//! `y² = x³ + b·x² + b·x + 1` with `b = (1-a)/a` for the canonical
//! quadratic factor `x² - x + a` of the degree-(ℓ-1)/2 supersingularity
//! polynomial. The bielliptic sextic `y² = x⁶ + b·x⁴ + b·x² + 1` and
//! its congruence-constrained lifts inherit supersingularity, symmetry
//! and the r = 2 profile, which is what the certificates record.
//!
//! Supersingularity is decided by exhaustive point counting (`a_ℓ = 0`)
//! so the polynomial criterion and the count cross-validate each other.

use crate::certify::{HypothesisCheck, TameCertificate, TheoremCited, Verdict};
use crate::fgl::WeierstrassModel;
use crate::fp::{legendre, sqrt_in_fp2, Fp2Element, FpElement};
use crate::rat::Rat;
use crate::ring::{is_prime, Ring, RingError};
use crate::upoly::{PolyError, UPoly};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Largest prime accepted by the exhaustive point-count oracle.
pub const POINT_COUNT_ELL_BOUND: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveError {
    NotAnOddPrime(u64),
    /// The prime 3 admits no symmetric supersingular model.
    EllTooSmall(u64),
    EllTooLarge(u64),
    SingularCurve,
    OffsetNotDivisible { index: usize, needed_power: u32 },
    AsymmetryTooLarge { index: usize },
    BadReduction,
    PrecisionTooSmall { needed: u32, got: u32 },
    /// The canonical quadratic factor search failed; existence is a
    /// theorem, so this signals an implementation bug.
    DeuringFactorMissing(u64),
    Ring(RingError),
    Poly(PolyError),
}

impl fmt::Display for CurveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveError::NotAnOddPrime(l) => write!(f, "{l} is not an odd prime"),
            CurveError::EllTooSmall(l) => write!(f, "ell = {l} is excluded (need ell > 3)"),
            CurveError::EllTooLarge(l) => {
                write!(f, "ell = {l} exceeds the point-count bound {POINT_COUNT_ELL_BOUND}")
            }
            CurveError::SingularCurve => write!(f, "singular curve"),
            CurveError::OffsetNotDivisible {
                index,
                needed_power,
            } => write!(f, "offset {index} is not divisible by ell^{needed_power}"),
            CurveError::AsymmetryTooLarge { index } => {
                write!(f, "asymmetry offset {index} is not divisible by ell^4")
            }
            CurveError::BadReduction => write!(f, "sextic discriminant is not a unit mod ell"),
            CurveError::PrecisionTooSmall { needed, got } => {
                write!(f, "precision {got} too small, need {needed}")
            }
            CurveError::DeuringFactorMissing(l) => write!(
                f,
                "no quadratic factor x^2-x+a found at ell = {l}: implementation bug"
            ),
            CurveError::Ring(e) => write!(f, "{e}"),
            CurveError::Poly(e) => write!(f, "{e}"),
        }
    }
}

impl From<RingError> for CurveError {
    fn from(e: RingError) -> Self {
        CurveError::Ring(e)
    }
}

impl From<PolyError> for CurveError {
    fn from(e: PolyError) -> Self {
        CurveError::Poly(e)
    }
}

fn require_odd_prime(ell: u64) -> Result<(), CurveError> {
    if ell < 3 || !is_prime(ell) {
        return Err(CurveError::NotAnOddPrime(ell));
    }
    Ok(())
}

/// `H_ℓ(x) = Σ_k C((ℓ-1)/2, k)² x^k` over `F_ℓ`: the polynomial whose
/// roots are the supersingular Legendre parameters.
pub fn deuring_poly(ell: u64) -> Result<UPoly, CurveError> {
    require_odd_prime(ell)?;
    let m = (ell - 1) / 2;
    let mut coeffs: Vec<i128> = Vec::with_capacity(m as usize + 1);
    let mut c = FpElement::new(ell, 1).expect("validated prime");
    coeffs.push(1);
    for k in 1..=m {
        // C(m, k) = C(m, k-1)·(m-k+1)/k, everything below ell
        let num = FpElement::new(ell, (m - k + 1) as i128).expect("prime");
        let den = FpElement::new(ell, k as i128).expect("prime");
        c = c.mul(&num).mul(&den.inv().expect("k < ell"));
        coeffs.push((c.mul(&c).value()) as i128);
    }
    Ok(UPoly::new(ell, &coeffs)?)
}

/// The canonical quadratic factor `x² - x + a` of the supersingularity
/// polynomial: the smallest `a ∈ {1, …, ℓ-1}` that divides it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeuringFactor {
    pub ell: u64,
    pub a: u64,
}

pub fn find_quadratic_factor(ell: u64) -> Result<DeuringFactor, CurveError> {
    require_odd_prime(ell)?;
    if ell <= 3 {
        return Err(CurveError::EllTooSmall(ell));
    }
    let h = deuring_poly(ell)?;
    for a in 1..ell {
        let q = UPoly::new(ell, &[a as i128, -1, 1])?;
        if q.divides(&h) {
            // H_ell is squarefree, so the factor cannot have a double
            // root; anything else is a bug worth failing loudly on
            let disc_q = FpElement::new(ell, 1 - 4 * a as i128)?;
            if disc_q.is_zero() {
                return Err(CurveError::DeuringFactorMissing(ell));
            }
            return Ok(DeuringFactor { ell, a });
        }
    }
    Err(CurveError::DeuringFactorMissing(ell))
}

/// Exhaustive point count of a Weierstrass model over `F_ℓ` (odd ℓ):
/// complete the square and scan the Legendre symbol.
pub fn point_count(ell: u64, model: &WeierstrassModel) -> Result<u64, CurveError> {
    require_odd_prime(ell)?;
    if ell > POINT_COUNT_ELL_BOUND {
        return Err(CurveError::EllTooLarge(ell));
    }
    let fp = Ring::residue_field(ell)?;
    let b2 = fp.reduce_i128(self_b2(model));
    let b4 = fp.reduce_i128(self_b4(model));
    let b6 = fp.reduce_i128(self_b6(model));
    // quadratic-residue table
    let mut is_square = vec![false; ell as usize];
    for x in 0..ell {
        is_square[((x * x) % ell) as usize] = true;
    }
    let mut count = 1u64; // the point at infinity
    for x in 0..ell {
        let x = x as u128;
        // g(x) = 4x³ + b2·x² + 2·b4·x + b6
        let g = fp.add(
            fp.add(
                fp.mul(4, fp.mul(x, fp.mul(x, x))),
                fp.mul(b2, fp.mul(x, x)),
            ),
            fp.add(fp.mul(2, fp.mul(b4, x)), b6),
        );
        if g == 0 {
            count += 1;
        } else if is_square[g as usize] {
            count += 2;
        }
    }
    Ok(count)
}

fn self_b2(m: &WeierstrassModel) -> i128 {
    m.a1 * m.a1 + 4 * m.a2
}

fn self_b4(m: &WeierstrassModel) -> i128 {
    2 * m.a4 + m.a1 * m.a3
}

fn self_b6(m: &WeierstrassModel) -> i128 {
    m.a3 * m.a3 + 4 * m.a6
}

/// Trace-zero test by exhaustive count: supersingular iff
/// `#E(F_ℓ) = ℓ + 1`. Valid for ℓ ≥ 5.
pub fn is_supersingular(ell: u64, model: &WeierstrassModel) -> Result<bool, CurveError> {
    require_odd_prime(ell)?;
    if ell < 5 {
        return Err(CurveError::EllTooSmall(ell));
    }
    let fp = Ring::residue_field(ell)?;
    if model.is_singular(fp) {
        return Err(CurveError::SingularCurve);
    }
    Ok(point_count(ell, model)? == ell + 1)
}

/// Which closed form of the Legendre parameter matched `H_ℓ(λ) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaWitness {
    /// `(1 + √(1-4a))/2`, the form this artifact validates and uses.
    pub lambda: Fp2Element,
    pub in_base_field: bool,
    pub half_sum_form_vanishes: bool,
    /// `1/2 + √(1-4a)`: recorded for comparison; does not generally
    /// vanish.
    pub literal_form_vanishes: bool,
}

/// The base elliptic model `y² = x³ + b·x² + b·x + 1` with
/// `b = (1-a)/a`, together with its proof data: nonzero cubic
/// discriminant, a verified supersingular Legendre parameter, and the
/// point-count confirmation `a_ℓ = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseCurve {
    pub ell: u64,
    pub factor: DeuringFactor,
    pub b: u64,
    pub delta_g: FpElement,
    pub lambda: LambdaWitness,
    pub point_count: u64,
    pub trace: i64,
}

impl BaseCurve {
    pub fn model(&self) -> WeierstrassModel {
        WeierstrassModel::b_form(self.b as i128)
    }
}

pub fn supersingular_base_curve(ell: u64) -> Result<BaseCurve, CurveError> {
    let factor = find_quadratic_factor(ell)?;
    let a = FpElement::new(ell, factor.a as i128)?;
    let one = FpElement::new(ell, 1)?;
    let b = one.sub(&a).mul(&a.inv().expect("a nonzero"));
    // cubic discriminant, via the resultant route
    let g = UPoly::new(ell, &[1, b.value() as i128, b.value() as i128, 1])?;
    let delta_g = g.discriminant(3)?;
    if delta_g.is_zero() {
        return Err(CurveError::SingularCurve);
    }
    // Legendre parameter: λ = (1 + √(1-4a))/2 is a root of x²-x+a,
    // hence of the supersingularity polynomial; the literal reading
    // 1/2 + √(1-4a) is evaluated alongside for the record
    let h = deuring_poly(ell)?;
    let disc = one.sub(&a.mul(&FpElement::new(ell, 4)?));
    let s = sqrt_in_fp2(&disc);
    let two_inv = Fp2Element::new(ell, FpElement::new(ell, 2)?.inv()?.value() as i128, 0)?;
    let one2 = Fp2Element::new(ell, 1, 0)?;
    let lambda = one2.add(&s).mul(&two_inv);
    let literal = two_inv.add(&s);
    let half_vanishes = h.eval_fp2(&lambda).is_zero();
    let literal_vanishes = h.eval_fp2(&literal).is_zero();
    if !half_vanishes {
        return Err(CurveError::DeuringFactorMissing(ell));
    }
    let model = WeierstrassModel::b_form(b.value() as i128);
    let count = point_count(ell, &model)?;
    let trace = ell as i64 + 1 - count as i64;
    Ok(BaseCurve {
        ell,
        factor,
        b: b.value(),
        delta_g,
        lambda: LambdaWitness {
            lambda,
            in_base_field: lambda.in_base_field(),
            half_sum_form_vanishes: half_vanishes,
            literal_form_vanishes: literal_vanishes,
        },
        point_count: count,
        trace,
    })
}

/// The four 2-torsion points of `y² = x³ + b·x² + b·x + 1`: the origin,
/// `P1 = (-1, 0)`, and `P2, P3 = ((1-b ± √(b²-2b-3))/2, 0)`, with
/// coordinates in `F_ℓ` or `F_ℓ²` as the discriminant decides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoTorsion {
    pub ell: u64,
    pub b: u64,
    pub x1: FpElement,
    pub x2: Fp2Element,
    pub x3: Fp2Element,
    pub rational: bool,
}

pub fn two_torsion(ell: u64, b: i128) -> Result<TwoTorsion, CurveError> {
    require_odd_prime(ell)?;
    let fp = Ring::residue_field(ell)?;
    let model = WeierstrassModel::b_form(b);
    if model.is_singular(fp) {
        return Err(CurveError::SingularCurve);
    }
    let b = FpElement::new(ell, b)?;
    let one = FpElement::new(ell, 1)?;
    let x1 = one.neg();
    // roots of x² + (b-1)x + 1, discriminant b² - 2b - 3
    let disc = b.mul(&b).sub(&b.add(&b)).sub(&FpElement::new(ell, 3)?);
    let s = sqrt_in_fp2(&disc);
    let two_inv = Fp2Element::new(ell, FpElement::new(ell, 2)?.inv()?.value() as i128, 0)?;
    let shift = Fp2Element::from_base(&one.sub(&b));
    let x2 = shift.add(&s).mul(&two_inv);
    let x3 = shift.sub(&s).mul(&two_inv);
    // both are roots of the cubic
    for x in [&x2, &x3] {
        let v = eval_cubic_fp2(ell, b.value(), x)?;
        if !v.is_zero() {
            return Err(CurveError::DeuringFactorMissing(ell));
        }
    }
    Ok(TwoTorsion {
        ell,
        b: b.value(),
        x1,
        x2,
        x3,
        rational: legendre(ell, disc.value()) >= 0,
    })
}

fn eval_cubic_fp2(ell: u64, b: u64, x: &Fp2Element) -> Result<Fp2Element, CurveError> {
    let bb = Fp2Element::new(ell, b as i128, 0)?;
    let one = Fp2Element::new(ell, 1, 0)?;
    let x2 = x.mul(x);
    let x3 = x2.mul(x);
    Ok(x3.add(&bb.mul(&x2)).add(&bb.mul(x)).add(&one))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutomorphismBranch {
    /// Generic j: only `±1`, which act trivially on 2-torsion.
    OrderTwo,
    /// j = 0 (b = 0): the scalings `x ↦ ωx` fix `x = -1` only for
    /// ω = 1.
    JZeroEnumeration,
    /// j = 1728 (b = -3/2): the extra automorphisms fix the root
    /// `-b/3 ≠ -1` and move `P1`.
    J1728Enumeration,
}

/// Preconditions for gluing the product surface along the graph of the
/// swap `ψ: P2 ↔ P3`:
///
/// 1. ψ commutes with Frobenius (the swapped points are conjugate or
///    both rational),
/// 2. ψ does not extend to an automorphism of the curve,
/// 3. when the curve is supersingular, the r = 2 profile transports
///    along the resulting separable degree-4 isogeny.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueReport {
    pub ell: u64,
    pub b: u64,
    pub branch: AutomorphismBranch,
    pub checks: Vec<HypothesisCheck>,
    pub supersingular: bool,
    pub r_stamp: Option<String>,
}

impl GlueReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn glue_preconditions(ell: u64, b: i128) -> Result<GlueReport, CurveError> {
    let torsion = two_torsion(ell, b)?;
    let fp = Ring::residue_field(ell)?;
    let bv = torsion.b;
    let mut checks = Vec::new();

    // Galois compatibility: Frobenius either fixes both swapped points
    // or exchanges them; either way it commutes with the swap
    let fr2 = torsion.x2.frobenius();
    let fr3 = torsion.x3.frobenius();
    let compatible = (fr2 == torsion.x2 && fr3 == torsion.x3)
        || (fr2 == torsion.x3 && fr3 == torsion.x2);
    checks.push(if compatible {
        HypothesisCheck {
            name: String::from("swap commutes with Frobenius"),
            anchor: "glue.galois-compatibility",
            pass: true,
            witness: if torsion.rational {
                String::from("both swapped points are rational")
            } else {
                String::from("swapped points are Frobenius conjugates")
            },
        }
    } else {
        HypothesisCheck {
            name: String::from("swap commutes with Frobenius"),
            anchor: "glue.galois-compatibility",
            pass: false,
            witness: String::from("Frobenius does not preserve the swapped pair"),
        }
    });

    // the swap must not extend to an automorphism of the curve
    let minus_one = fp.reduce_i128(-1);
    let j_zero = bv == 0;
    let j_1728 = fp.reduce_i128(2 * bv as i128 + 3) == 0; // b = -3/2
    let (branch, auto_check) = if !j_zero && !j_1728 {
        (
            AutomorphismBranch::OrderTwo,
            HypothesisCheck {
                name: String::from("swap is not induced by an automorphism"),
                anchor: "glue.automorphism-exclusion",
                pass: true,
                witness: String::from(
                    "automorphism group has order 2 and acts trivially on 2-torsion",
                ),
            },
        )
    } else if j_zero {
        // x ↦ ωx with ω³ = 1: such a map equals the swap only if it
        // fixes x = -1, forcing ω = 1 and the identity permutation
        let mut excluded = true;
        for omega in cube_roots_of_unity(ell)? {
            let is_one = omega == Fp2Element::new(ell, 1, 0)?;
            let fixes_p1 = omega.neg() == Fp2Element::new(ell, -1, 0)?;
            if !is_one && fixes_p1 {
                excluded = false;
            }
        }
        (
            AutomorphismBranch::JZeroEnumeration,
            HypothesisCheck {
                name: String::from("swap is not induced by an automorphism"),
                anchor: "glue.automorphism-exclusion",
                pass: excluded,
                witness: String::from(
                    "scalings by nontrivial cube roots of unity move x = -1; the identity is not the swap",
                ),
            },
        )
    } else {
        // j = 1728: the extra automorphisms fix the distinguished root
        // -b/3 and swap the remaining two, so they move P1 = (-1, 0)
        let distinguished = fp.reduce_i128(-(bv as i128)).wrapping_mul(1); // -b
        let three_inv = FpElement::new(ell, 3)?.inv()?;
        let dist = FpElement::new(ell, distinguished as i128)?.mul(&three_inv);
        let dist_f2 = Fp2Element::from_base(&dist);
        let is_root = eval_cubic_fp2(ell, bv, &dist_f2)?.is_zero();
        let differs_from_p1 = dist.value() != minus_one as u64;
        (
            AutomorphismBranch::J1728Enumeration,
            HypothesisCheck {
                name: String::from("swap is not induced by an automorphism"),
                anchor: "glue.automorphism-exclusion",
                pass: is_root && differs_from_p1,
                witness: format!(
                    "order-4 automorphisms fix the root x = {} and move x = -1",
                    dist.value()
                ),
            },
        )
    };
    checks.push(auto_check);

    let supersingular = is_supersingular(ell, &WeierstrassModel::b_form(bv as i128))?;
    let r_stamp = if supersingular && checks.iter().all(|c| c.pass) {
        Some(String::from(
            "r = 2 transported along the separable degree-4 isogeny from the product surface",
        ))
    } else {
        None
    };
    Ok(GlueReport {
        ell,
        b: bv,
        branch,
        checks,
        supersingular,
        r_stamp,
    })
}

fn cube_roots_of_unity(ell: u64) -> Result<Vec<Fp2Element>, CurveError> {
    // roots of t² + t + 1 in F_ℓ², plus 1
    let minus_three = FpElement::new(ell, -3)?;
    let s = sqrt_in_fp2(&minus_three);
    let two_inv = Fp2Element::new(ell, FpElement::new(ell, 2)?.inv()?.value() as i128, 0)?;
    let minus_one = Fp2Element::new(ell, -1, 0)?;
    let w1 = minus_one.add(&s).mul(&two_inv);
    let w2 = minus_one.sub(&s).mul(&two_inv);
    Ok(vec![Fp2Element::new(ell, 1, 0)?, w1, w2])
}

/// A genus-2 sextic `y² = f_6 x⁶ + … + f_0` over `Z/ℓ^N` with unit
/// discriminant mod ℓ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperellipticSextic {
    ring: Ring,
    coeffs: [u128; 7],
}

impl HyperellipticSextic {
    pub fn new(ring: Ring, coeffs: [i128; 7]) -> Result<Self, CurveError> {
        let reduced: Vec<u128> = coeffs.iter().map(|&c| ring.reduce_i128(c)).collect();
        let sextic = HyperellipticSextic {
            ring,
            coeffs: [
                reduced[0], reduced[1], reduced[2], reduced[3], reduced[4], reduced[5], reduced[6],
            ],
        };
        if !sextic.good_reduction()? {
            return Err(CurveError::BadReduction);
        }
        Ok(sextic)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn ell(&self) -> u64 {
        self.ring.ell()
    }

    /// Coefficients `f_0 … f_6`, canonical residues.
    pub fn coeffs(&self) -> &[u128; 7] {
        &self.coeffs
    }

    fn reduced_poly(&self) -> Result<UPoly, CurveError> {
        let ell = self.ring.ell();
        let fp = Ring::residue_field(ell)?;
        let c: Vec<i128> = self.coeffs.iter().map(|&x| fp.reduce_u128(x) as i128).collect();
        Ok(UPoly::new(ell, &c)?)
    }

    pub fn good_reduction(&self) -> Result<bool, CurveError> {
        let p = self.reduced_poly()?;
        if p.degree() != Some(6) {
            return Ok(false);
        }
        Ok(!p.discriminant(6)?.is_zero())
    }

    pub fn label(&self) -> String {
        format!(
            "sextic(ell={}; f0..f6 = [{}])",
            self.ring.ell(),
            self.coeffs
                .iter()
                .map(|c| format!("{c}"))
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

fn divisible_by(x: i128, p: u64, k: u32) -> bool {
    let mut m: i128 = 1;
    for _ in 0..k {
        m *= p as i128;
    }
    x % m == 0
}

/// The symmetric family: `f0 = 1 + d0, f1 = d1, f2 = (1-a)/a + d2,
/// f3 = d3` with every offset in `(ℓ)`, completed palindromically.
pub fn family_primera(
    ell: u64,
    offsets: [i128; 4],
    prec: u32,
) -> Result<(HyperellipticSextic, TameCertificate), CurveError> {
    require_odd_prime(ell)?;
    if ell <= 3 {
        return Err(CurveError::EllTooSmall(ell));
    }
    if prec < 5 {
        return Err(CurveError::PrecisionTooSmall {
            needed: 5,
            got: prec,
        });
    }
    for (i, &d) in offsets.iter().enumerate() {
        if !divisible_by(d, ell, 1) {
            return Err(CurveError::OffsetNotDivisible {
                index: i,
                needed_power: 1,
            });
        }
    }
    let base = supersingular_base_curve(ell)?;
    let b = base.b as i128;
    let ring = Ring::new(ell, prec)?;
    let f = [
        1 + offsets[0],
        offsets[1],
        b + offsets[2],
        offsets[3],
        b + offsets[2],
        offsets[1],
        1 + offsets[0],
    ];
    let sextic = HyperellipticSextic::new(ring, f)?;
    let cert = certify_sextic(&sextic, false)?;
    Ok((sextic, cert))
}

/// The relaxed family: keep the top half of a symmetric base curve
/// (optionally shifted within its mod-ℓ classes by `free ∈ (ℓ)³`), and
/// set the bottom half `f_0 = f_6 - e_60`, `f_1 = f_5 - e_51`,
/// `f_2 = f_4 - e_42` with every asymmetry offset in `(ℓ⁴)`.
pub fn family_main(
    base: &HyperellipticSextic,
    asym: [i128; 3],
    free: [i128; 3],
) -> Result<(HyperellipticSextic, TameCertificate), CurveError> {
    let ell = base.ell();
    let ring = base.ring();
    if ring.prec() < 5 {
        return Err(CurveError::PrecisionTooSmall {
            needed: 5,
            got: ring.prec(),
        });
    }
    for (i, &e) in asym.iter().enumerate() {
        if !divisible_by(e, ell, 4) {
            return Err(CurveError::AsymmetryTooLarge { index: i });
        }
    }
    for (i, &g) in free.iter().enumerate() {
        if !divisible_by(g, ell, 1) {
            return Err(CurveError::OffsetNotDivisible {
                index: i,
                needed_power: 1,
            });
        }
    }
    let c = base.coeffs();
    let f6 = ring.add(c[6], ring.reduce_i128(free[0]));
    let f5 = ring.add(c[5], ring.reduce_i128(free[1]));
    let f4 = ring.add(c[4], ring.reduce_i128(free[2]));
    let f3 = c[3];
    let f0 = ring.sub(f6, ring.reduce_i128(asym[0]));
    let f1 = ring.sub(f5, ring.reduce_i128(asym[1]));
    let f2 = ring.sub(f4, ring.reduce_i128(asym[2]));
    let sextic = HyperellipticSextic {
        ring,
        coeffs: [f0, f1, f2, f3, f4, f5, f6],
    };
    if !sextic.good_reduction()? {
        return Err(CurveError::BadReduction);
    }
    let cert = certify_sextic(&sextic, true)?;
    Ok((sextic, cert))
}

/// The full decision procedure on arbitrary integer coefficients:
/// good reduction, Deuring parameter from `f_4`, the point-count
/// oracle, the mod-ℓ congruence layer, the mod-ℓ⁴ symmetry layer, and
/// the gluing preconditions. Never fails structurally: the answer is
/// the certificate.
pub fn validate_curve(
    ell: u64,
    coeffs: [i128; 7],
    prec: u32,
) -> Result<TameCertificate, CurveError> {
    require_odd_prime(ell)?;
    if ell <= 3 {
        return Err(CurveError::EllTooSmall(ell));
    }
    if prec < 5 {
        return Err(CurveError::PrecisionTooSmall {
            needed: 5,
            got: prec,
        });
    }
    let ring = Ring::new(ell, prec)?;
    let reduced: Vec<u128> = coeffs.iter().map(|&c| ring.reduce_i128(c)).collect();
    let sextic = HyperellipticSextic {
        ring,
        coeffs: [
            reduced[0], reduced[1], reduced[2], reduced[3], reduced[4], reduced[5], reduced[6],
        ],
    };
    certify_sextic(&sextic, true)
}

/// Shared certificate chain for sextics. `relaxed` switches the trail
/// to the perturbed-family theorem (the symmetric family is the
/// special case with exact palindromy).
fn certify_sextic(
    sextic: &HyperellipticSextic,
    relaxed: bool,
) -> Result<TameCertificate, CurveError> {
    let ell = sextic.ell();
    let ring = sextic.ring();
    let fp = Ring::residue_field(ell)?;
    let c = sextic.coeffs();
    let trail = if relaxed {
        vec![
            TheoremCited::SymmetricFamilyTameness,
            TheoremCited::PerturbationTransfer,
            TheoremCited::PerturbedFamilyTameness,
        ]
    } else {
        vec![TheoremCited::SymmetricFamilyTameness]
    };
    let mut cert = TameCertificate {
        subject: sextic.label(),
        ell,
        alpha: Some(crate::certify::alpha_for(ell)),
        checklist: Vec::new(),
        verdict: Verdict::Refused,
        trail,
    };
    let fail =
        |cert: &mut TameCertificate, name: &str, anchor: &'static str, witness: String| {
            cert.checklist.push(HypothesisCheck {
                name: String::from(name),
                anchor,
                pass: false,
                witness,
            });
        };

    // 1. good reduction
    if sextic.good_reduction()? {
        cert.checklist.push(HypothesisCheck {
            name: String::from("good reduction"),
            anchor: "curve.good-reduction",
            pass: true,
            witness: String::from("sextic discriminant is a unit mod ell"),
        });
    } else {
        fail(
            &mut cert,
            "good reduction",
            "curve.good-reduction",
            String::from("sextic discriminant vanishes mod ell (or degree drops)"),
        );
        return Ok(finish(cert));
    }

    // 2. Deuring parameter from f4 (and f6 = 1)
    let f6_bar = fp.reduce_u128(c[6]);
    let b_bar = fp.reduce_u128(c[4]);
    if f6_bar != 1 {
        fail(
            &mut cert,
            "Deuring factor",
            "curve.deuring-factor",
            format!("f6 = {f6_bar} != 1 mod ell"),
        );
        return Ok(finish(cert));
    }
    let b_plus_1 = fp.add(b_bar, 1);
    if b_plus_1 == 0 {
        fail(
            &mut cert,
            "Deuring factor",
            "curve.deuring-factor",
            String::from("f4 = -1 mod ell admits no quadratic-factor parameter"),
        );
        return Ok(finish(cert));
    }
    let a = fp.inv(b_plus_1)?;
    let h = deuring_poly(ell)?;
    let q = UPoly::new(ell, &[a as i128, -1, 1])?;
    if q.divides(&h) {
        cert.checklist.push(HypothesisCheck {
            name: String::from("Deuring factor"),
            anchor: "curve.deuring-factor",
            pass: true,
            witness: format!("x^2 - x + {a} divides the supersingularity polynomial"),
        });
    } else {
        fail(
            &mut cert,
            "Deuring factor",
            "curve.deuring-factor",
            format!("x^2 - x + {a} does not divide the supersingularity polynomial"),
        );
        return Ok(finish(cert));
    }

    // 3. point-count oracle on the base elliptic model
    let model = WeierstrassModel::b_form(b_bar as i128);
    let count = point_count(ell, &model)?;
    if count == ell + 1 {
        cert.checklist.push(HypothesisCheck {
            name: String::from("supersingularity oracle"),
            anchor: "curve.point-count",
            pass: true,
            witness: format!("#E(F_{ell}) = {count}, trace 0"),
        });
    } else {
        fail(
            &mut cert,
            "supersingularity oracle",
            "curve.point-count",
            format!("#E(F_{ell}) = {count} != {}", ell + 1),
        );
        return Ok(finish(cert));
    }

    // 4. mod-ℓ congruence layer on the top coefficients
    let congruences = [
        ("f6 - 1 in (ell)", fp.sub(fp.reduce_u128(c[6]), 1)),
        ("f5 in (ell)", fp.reduce_u128(c[5])),
        (
            "f4 - (1-a)/a in (ell)",
            fp.sub(fp.reduce_u128(c[4]), b_bar),
        ),
        ("f3 in (ell)", fp.reduce_u128(c[3])),
    ];
    for (name, residue) in congruences {
        if residue != 0 {
            fail(
                &mut cert,
                "mod-ell congruences",
                "curve.mod-ell-congruences",
                format!("{name} fails (residue {residue})"),
            );
            return Ok(finish(cert));
        }
    }
    cert.checklist.push(HypothesisCheck {
        name: String::from("mod-ell congruences"),
        anchor: "curve.mod-ell-congruences",
        pass: true,
        witness: String::from("f6 - 1, f5, f4 - (1-a)/a, f3 all in (ell)"),
    });

    // 5. mod-ℓ⁴ symmetry layer
    let ell4 = ring.pow_ell(4);
    let pairs = [
        ("f6 - f0", ring.sub(c[6], c[0])),
        ("f5 - f1", ring.sub(c[5], c[1])),
        ("f4 - f2", ring.sub(c[4], c[2])),
    ];
    for (name, diff) in pairs {
        if diff % ell4 != 0 {
            fail(
                &mut cert,
                "mod-ell^4 symmetry congruences",
                "curve.mod-ell4-symmetry",
                format!("{name} has valuation {} < 4", ring.val(diff)),
            );
            return Ok(finish(cert));
        }
    }
    cert.checklist.push(HypothesisCheck {
        name: String::from("mod-ell^4 symmetry congruences"),
        anchor: "curve.mod-ell4-symmetry",
        pass: true,
        witness: String::from("f6 - f0, f5 - f1, f4 - f2 all in (ell^4)"),
    });

    // 6. gluing preconditions on the base model
    let glue = glue_preconditions(ell, b_bar as i128)?;
    if glue.all_pass() {
        cert.checklist.push(HypothesisCheck {
            name: String::from("glue preconditions"),
            anchor: "glue.preconditions",
            pass: true,
            witness: glue
                .r_stamp
                .clone()
                .unwrap_or_else(|| String::from("swap is Galois-compatible and non-automorphic")),
        });
    } else {
        let first = glue.checks.iter().find(|x| !x.pass).expect("failing check");
        fail(
            &mut cert,
            "glue preconditions",
            "glue.preconditions",
            format!("{}: {}", first.name, first.witness),
        );
        return Ok(finish(cert));
    }

    Ok(finish(cert))
}

fn finish(cert: TameCertificate) -> TameCertificate {
    // reuse the invariant enforcement from the certify module
    let all_pass = cert.checklist.iter().all(|c| c.pass);
    TameCertificate {
        alpha: if all_pass { cert.alpha } else { None },
        verdict: if all_pass {
            Verdict::CertifiedTame
        } else {
            Verdict::Refused
        },
        ..cert
    }
}

/// α for a certified curve: `1/(ℓ²-1)`.
pub fn alpha_for_curve(ell: u64) -> Rat {
    crate::certify::alpha_for(ell)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deuring_known_polynomials() {
        // C(2,k)^2 = 1, 4, 1 and C(3,k)^2 = 1, 9, 9, 1
        assert_eq!(deuring_poly(5).unwrap(), UPoly::new(5, &[1, 4, 1]).unwrap());
        assert_eq!(
            deuring_poly(7).unwrap(),
            UPoly::new(7, &[1, 2, 2, 1]).unwrap()
        );
        assert_eq!(deuring_poly(3).unwrap(), UPoly::new(3, &[1, 1]).unwrap());
    }

    #[test]
    fn quadratic_factor_known_answers() {
        assert_eq!(find_quadratic_factor(5).unwrap().a, 1);
        assert_eq!(find_quadratic_factor(7).unwrap().a, 5);
        assert_eq!(find_quadratic_factor(3), Err(CurveError::EllTooSmall(3)));
    }

    fn primes_to_97() -> Vec<u64> {
        vec![5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]
    }

    #[test]
    fn factor_exists_and_base_curve_supersingular_up_to_97() {
        for ell in primes_to_97() {
            let base = supersingular_base_curve(ell).unwrap();
            assert_eq!(base.point_count, ell + 1, "ell = {ell}");
            assert_eq!(base.trace, 0);
            assert!(!base.delta_g.is_zero());
            assert!(base.lambda.half_sum_form_vanishes);
            // closed form of the cubic discriminant: -(4a-1)^3/a^4
            let a = FpElement::new(ell, base.factor.a as i128).unwrap();
            let closed = a
                .mul(&FpElement::new(ell, 4).unwrap())
                .sub(&FpElement::new(ell, 1).unwrap())
                .pow(3)
                .neg()
                .mul(&a.pow(4).inv().unwrap());
            assert_eq!(base.delta_g, closed, "ell = {ell}");
        }
    }

    #[test]
    fn base_curve_known_answers() {
        let b5 = supersingular_base_curve(5).unwrap();
        assert_eq!((b5.factor.a, b5.b), (1, 0));
        assert_eq!(b5.point_count, 6);
        let b7 = supersingular_base_curve(7).unwrap();
        assert_eq!((b7.factor.a, b7.b), (5, 2));
        assert_eq!(b7.point_count, 8);
        // λ = 2 satisfies H_7(2) = 0; the literal 1/2 + sqrt form does not
        assert!(b7.lambda.in_base_field);
        assert_eq!(b7.lambda.lambda.base_part().value(), 2);
        assert!(!b7.lambda.literal_form_vanishes);
        let h7 = deuring_poly(7).unwrap();
        assert!(h7.eval(&FpElement::new(7, 2).unwrap()).is_zero());
    }

    #[test]
    fn supersingularity_oracle_matches_examples() {
        assert!(is_supersingular(5, &WeierstrassModel::b_form(0)).unwrap());
        assert!(!is_supersingular(5, &WeierstrassModel::new([0, 0, 0, 1, 1])).unwrap());
        assert!(is_supersingular(7, &WeierstrassModel::b_form(2)).unwrap());
        assert_eq!(
            is_supersingular(5, &WeierstrassModel::b_form(3)),
            Err(CurveError::SingularCurve)
        );
    }

    #[test]
    fn deuring_criterion_matches_point_count_oracle() {
        // H_ell(λ) roots versus trace zero across small primes: both
        // supersingularity tests agree on the Legendre family
        for ell in [5u64, 7, 11, 13, 17, 19, 23] {
            let h = deuring_poly(ell).unwrap();
            for lam in 2..ell {
                // y² = x(x-1)(x-λ): a1..a6 = (0, -(1+λ), 0, λ, 0)
                let model = WeierstrassModel::new([0, -(1 + lam as i128), 0, lam as i128, 0]);
                let fp = Ring::residue_field(ell).unwrap();
                if model.is_singular(fp) {
                    continue;
                }
                let ss = is_supersingular(ell, &model).unwrap();
                let crit = h.eval(&FpElement::new(ell, lam as i128).unwrap()).is_zero();
                assert_eq!(ss, crit, "ell={ell} lambda={lam}");
            }
        }
    }

    #[test]
    fn two_torsion_known_answers() {
        // (ell, b) = (7, 2): x-coordinates {-1, 4, 2}
        let t = two_torsion(7, 2).unwrap();
        assert_eq!(t.x1.value(), 6);
        assert!(t.rational);
        let mut got = vec![
            t.x2.base_part().value(),
            t.x3.base_part().value(),
        ];
        got.sort_unstable();
        assert_eq!(got, vec![2, 4]);
        // (ell, b) = (5, 0): discriminant -3 = 2 is a non-residue
        let t5 = two_torsion(5, 0).unwrap();
        assert!(!t5.rational);
        assert!(!t5.x2.in_base_field());
        assert!(!t5.x3.in_base_field());
        // singular values rejected
        assert_eq!(two_torsion(7, 3), Err(CurveError::SingularCurve));
        assert_eq!(two_torsion(7, -1), Err(CurveError::SingularCurve));
    }

    #[test]
    fn two_torsion_x_coordinates_are_cubic_roots() {
        for ell in [5u64, 7, 11, 13] {
            for b in 0..ell {
                match two_torsion(ell, b as i128) {
                    Err(CurveError::SingularCurve) => {
                        // exactly b = 3 and b = -1 mod ell
                        let fp = Ring::residue_field(ell).unwrap();
                        assert!(
                            fp.reduce_i128(b as i128 - 3) == 0
                                || fp.reduce_i128(b as i128 + 1) == 0,
                            "ell={ell} b={b}"
                        );
                    }
                    Ok(t) => {
                        // x1 is a root too
                        let x1 = Fp2Element::from_base(&t.x1);
                        assert!(eval_cubic_fp2(ell, t.b, &x1).unwrap().is_zero());
                    }
                    Err(e) => panic!("unexpected {e}"),
                }
            }
        }
    }

    #[test]
    fn glue_branches() {
        // (7, 2) has j = 1728: c6 = -64·8 + 288·4 - 864 = -224 ≡ 0 mod 7,
        // so the exclusion runs through the explicit enumeration — and
        // passes, since the extra automorphisms fix the root x = 4 and
        // move x = -1
        let g = glue_preconditions(7, 2).unwrap();
        assert!(g.all_pass());
        assert_eq!(g.branch, AutomorphismBranch::J1728Enumeration);
        assert!(g.supersingular);
        assert!(g.r_stamp.is_some());
        // generic order-2 branch at (7, 1): j is neither 0 nor 1728
        let gen = glue_preconditions(7, 1).unwrap();
        assert!(gen.all_pass());
        assert_eq!(gen.branch, AutomorphismBranch::OrderTwo);
        // j = 0 branch at (5, 0)
        let g0 = glue_preconditions(5, 0).unwrap();
        assert!(g0.all_pass());
        assert_eq!(g0.branch, AutomorphismBranch::JZeroEnumeration);
        assert!(g0.supersingular);
        // j = 1728 branch: b = -3/2; at ell = 11 that is b = 4
        let fp11 = Ring::residue_field(11).unwrap();
        let b1728 = fp11.reduce_i128(-3) as i128 * fp11.inv(2).unwrap() as i128;
        let g17 = glue_preconditions(11, b1728).unwrap();
        assert_eq!(g17.branch, AutomorphismBranch::J1728Enumeration);
        assert!(g17.checks.iter().all(|c| c.pass));
        // singular input
        assert_eq!(glue_preconditions(7, 3), Err(CurveError::SingularCurve));
    }

    #[test]
    fn family_primera_known_vectors() {
        // ell = 5, offsets (5, 5, 10, 10): y² = 6x⁶+5x⁵+10x⁴+10x³+10x²+5x+6
        let (sextic, cert) = family_primera(5, [5, 5, 10, 10], 24).unwrap();
        assert_eq!(
            sextic.coeffs()[..4],
            [6u128, 5, 10, 10][..]
        );
        assert_eq!(sextic.coeffs()[4], 10);
        assert_eq!(sextic.coeffs()[5], 5);
        assert_eq!(sextic.coeffs()[6], 6);
        assert_eq!(cert.verdict, Verdict::CertifiedTame, "{:#?}", cert.checklist);
        assert_eq!(cert.alpha, Some(Rat::new(1, 24)));
        // ell = 7, zero offsets: y² = x⁶+2x⁴+2x²+1
        let (s7, c7) = family_primera(7, [0, 0, 0, 0], 24).unwrap();
        assert_eq!(s7.coeffs(), &[1, 0, 2, 0, 2, 0, 1]);
        assert_eq!(c7.verdict, Verdict::CertifiedTame);
        // non-divisible offset
        assert_eq!(
            family_primera(5, [1, 0, 0, 0], 24),
            Err(CurveError::OffsetNotDivisible {
                index: 0,
                needed_power: 1
            })
        );
    }

    #[test]
    fn family_primera_reduces_to_bielliptic_model() {
        let mut rng = crate::rng::SplitMix64::new(1234);
        for ell in [5u64, 7, 11, 13] {
            let base = supersingular_base_curve(ell).unwrap();
            for _ in 0..100 {
                let d = |r: &mut crate::rng::SplitMix64| {
                    (ell as i128) * (r.below(100) as i128 - 50)
                };
                let offs = [d(&mut rng), d(&mut rng), d(&mut rng), d(&mut rng)];
                match family_primera(ell, offs, 12) {
                    Ok((sextic, cert)) => {
                        assert_eq!(cert.verdict, Verdict::CertifiedTame);
                        let fp = Ring::residue_field(ell).unwrap();
                        let red: Vec<u128> =
                            sextic.coeffs().iter().map(|&c| fp.reduce_u128(c)).collect();
                        assert_eq!(
                            red,
                            vec![1, 0, base.b as u128, 0, base.b as u128, 0, 1],
                            "ell={ell}"
                        );
                    }
                    Err(CurveError::BadReduction) => {
                        // adversarial offsets may destroy good reduction;
                        // reported, not repaired
                    }
                    Err(e) => panic!("unexpected {e}"),
                }
            }
        }
    }

    #[test]
    fn family_main_vectors() {
        let (base, _) = family_primera(5, [5, 5, 10, 10], 24).unwrap();
        // asym = (625, 0, -1250): f0 = 6 - 625, f2 = 10 + 1250
        let (sextic, cert) = family_main(&base, [625, 0, -1250], [0, 0, 0]).unwrap();
        let ring = sextic.ring();
        assert_eq!(sextic.coeffs()[0], ring.reduce_i128(6 - 625));
        assert_eq!(sextic.coeffs()[1], 5);
        assert_eq!(sextic.coeffs()[2], ring.reduce_i128(10 + 1250));
        assert_eq!(sextic.coeffs()[6], 6);
        assert_eq!(cert.verdict, Verdict::CertifiedTame);
        let diff = ring.sub(sextic.coeffs()[6], sextic.coeffs()[0]);
        assert_eq!(diff, 625);
        // ell^3 asymmetry is rejected at the threshold
        assert_eq!(
            family_main(&base, [125, 0, 0], [0, 0, 0]),
            Err(CurveError::AsymmetryTooLarge { index: 0 })
        );
        // zero asymmetry reproduces the base
        let (same, cert2) = family_main(&base, [0, 0, 0], [0, 0, 0]).unwrap();
        assert_eq!(same.coeffs(), base.coeffs());
        assert_eq!(cert2.verdict, Verdict::CertifiedTame);
    }

    #[test]
    fn validate_curve_examples() {
        // the symmetric base curve itself
        let c = validate_curve(7, [1, 0, 2, 0, 2, 0, 1], 24).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedTame, "{:#?}", c.checklist);
        // f3 = 1 breaks the mod-ell layer
        let c2 = validate_curve(5, [1, 0, 0, 1, 0, 0, 1], 24).unwrap();
        assert_eq!(c2.verdict, Verdict::Refused);
        let fail = c2.first_failure().unwrap();
        assert_eq!(fail.name, "mod-ell congruences");
        assert!(fail.witness.contains("f3"), "{fail:?}");
        // x^6 + 1 at ell = 5: a = 1 passes the whole chain
        let c3 = validate_curve(5, [1, 0, 0, 0, 0, 0, 1], 24).unwrap();
        assert_eq!(c3.verdict, Verdict::CertifiedTame, "{:#?}", c3.checklist);
    }

    #[test]
    fn validate_roundtrip_family_main() {
        let (base, _) = family_primera(7, [7, 14, 0, 21], 24).unwrap();
        let l4 = 7i128.pow(4);
        let (sextic, cert) = family_main(&base, [2 * l4, -l4, 3 * l4], [7, 0, 14]).unwrap();
        assert_eq!(cert.verdict, Verdict::CertifiedTame);
        let coeffs: Vec<i128> = sextic.coeffs().iter().map(|&c| c as i128).collect();
        let c2 = validate_curve(
            7,
            [
                coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5], coeffs[6],
            ],
            24,
        )
        .unwrap();
        assert_eq!(c2.verdict, Verdict::CertifiedTame);
    }

    #[test]
    fn sextic_rejects_bad_reduction() {
        let ring = Ring::new(5, 8).unwrap();
        // x^6 + 2x^3 + 1 = (x^3+1)^2 has discriminant 0
        assert_eq!(
            HyperellipticSextic::new(ring, [1, 0, 0, 2, 0, 0, 1]),
            Err(CurveError::BadReduction)
        );
    }
}
