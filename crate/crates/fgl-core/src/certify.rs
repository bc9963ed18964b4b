//! Structural tameness certificates.
//!
//! The certifier never touches torsion points or Galois groups: it
//! verifies the hypotheses of the valuation-profile theorem on the
//! multiplication-by-ℓ series — symmetry, height 4, r-exponent 2, the
//! unit condition `ℓ ∤ a² - b²` on the degree-ℓ² matrix, and the two
//! pair-series shape lemmas — and issues a verdict with the uniform
//! minimal valuation `α = 1/(ℓ²-1)`. A second entry point transfers a
//! certificate to any law whose `[ℓ]` agrees with the certified one
//! modulo `ℓ⁴`.

use crate::fgl::{FglError, FormalGroupLaw, Height, MulByM, Provenance};
use crate::rat::Rat;
use crate::ring::{RingError, Val};
use crate::series::{Mono, SeriesError, TruncatedSeries};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyError {
    CapTooSmall { needed: u16, got: u16 },
    CapMismatch { left: u16, right: u16 },
    /// Divisibility checks need at least two ℓ-adic digits.
    PrecisionTooSmall { needed: u32, got: u32 },
    RingMismatch,
    DimMismatch { expected: u8, got: u8 },
    BaseNotCertified,
    /// Generic 4-variable multiplication maps are only computed for
    /// small primes; larger ones must arrive as products.
    EllTooLargeForGenericPath { ell: u64, bound: u64 },
    Fgl(FglError),
    Series(SeriesError),
    Ring(RingError),
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::CapTooSmall { needed, got } => {
                write!(f, "cap {got} too small, need {needed}")
            }
            CertifyError::CapMismatch { left, right } => {
                write!(f, "caps differ: {left} vs {right}")
            }
            CertifyError::PrecisionTooSmall { needed, got } => {
                write!(f, "precision {got} too small, need {needed}")
            }
            CertifyError::RingMismatch => write!(f, "ring mismatch"),
            CertifyError::DimMismatch { expected, got } => {
                write!(f, "expected dimension {expected}, got {got}")
            }
            CertifyError::BaseNotCertified => {
                write!(f, "base certificate is not CERTIFIED_TAME")
            }
            CertifyError::EllTooLargeForGenericPath { ell, bound } => {
                write!(f, "ell = {ell} exceeds the generic-path bound {bound}")
            }
            CertifyError::Fgl(e) => write!(f, "{e}"),
            CertifyError::Series(e) => write!(f, "{e}"),
            CertifyError::Ring(e) => write!(f, "{e}"),
        }
    }
}

impl From<FglError> for CertifyError {
    fn from(e: FglError) -> Self {
        CertifyError::Fgl(e)
    }
}

impl From<SeriesError> for CertifyError {
    fn from(e: SeriesError) -> Self {
        CertifyError::Series(e)
    }
}

impl From<RingError> for CertifyError {
    fn from(e: RingError) -> Self {
        CertifyError::Ring(e)
    }
}

/// Results cited in a certificate trail, named by what they assert.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremCited {
    /// Symmetric, height 4, r = 2 forces every nonzero ℓ-torsion point
    /// to have minimal coordinate valuation exactly `1/(ℓ²-1)`.
    CoordinateValuationProfile,
    /// The uniform minimal-valuation property forces the wild inertia
    /// group to act trivially on the ℓ-torsion.
    UniformValuationTameness,
    /// The two combined for symmetric two-dimensional laws.
    SymmetricSurfaceTameness,
    /// `ℓ⁴`-perturbations inherit the valuation profile via the unique
    /// lifting of torsion systems.
    PerturbationTransfer,
    /// The palindromic sextic family with mod-ℓ congruence conditions is
    /// tamely ramified.
    SymmetricFamilyTameness,
    /// The relaxed family with mod-ℓ⁴ symmetry congruences is tamely
    /// ramified.
    PerturbedFamilyTameness,
}

impl TheoremCited {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremCited::CoordinateValuationProfile => "coordinate-valuation-profile",
            TheoremCited::UniformValuationTameness => "uniform-valuation-tameness",
            TheoremCited::SymmetricSurfaceTameness => "symmetric-surface-tameness",
            TheoremCited::PerturbationTransfer => "perturbation-transfer",
            TheoremCited::SymmetricFamilyTameness => "symmetric-family-tameness",
            TheoremCited::PerturbedFamilyTameness => "perturbed-family-tameness",
        }
    }
}

impl fmt::Display for TheoremCited {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CertifiedTame,
    Refused,
    Error,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CertifiedTame => "CERTIFIED_TAME",
            Verdict::Refused => "REFUSED",
            Verdict::Error => "ERROR",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One verified hypothesis: a stable anchor id, a pass flag and a
/// witness (offending monomial, measured value, …).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisCheck {
    pub name: String,
    pub anchor: &'static str,
    pub pass: bool,
    pub witness: String,
}

impl HypothesisCheck {
    fn passed(name: &str, anchor: &'static str, witness: String) -> Self {
        HypothesisCheck {
            name: String::from(name),
            anchor,
            pass: true,
            witness,
        }
    }

    fn failed(name: &str, anchor: &'static str, witness: String) -> Self {
        HypothesisCheck {
            name: String::from(name),
            anchor,
            pass: false,
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TameCertificate {
    pub subject: String,
    pub ell: u64,
    /// Present exactly when the verdict is CERTIFIED_TAME; always
    /// `1/(ℓ²-1)` in the supported flows.
    pub alpha: Option<Rat>,
    pub checklist: Vec<HypothesisCheck>,
    pub verdict: Verdict,
    pub trail: Vec<TheoremCited>,
}

impl TameCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedTame
    }

    pub fn first_failure(&self) -> Option<&HypothesisCheck> {
        self.checklist.iter().find(|c| !c.pass)
    }

    fn finish(mut self) -> Self {
        let all_pass = self.checklist.iter().all(|c| c.pass);
        if self.verdict != Verdict::Error {
            self.verdict = if all_pass {
                Verdict::CertifiedTame
            } else {
                Verdict::Refused
            };
        }
        if self.verdict != Verdict::CertifiedTame {
            self.alpha = None;
        }
        self
    }
}

pub fn alpha_for(ell: u64) -> Rat {
    Rat::new(1, (ell * ell - 1) as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaKind {
    /// `f(Z2, Z1) = -f(Z1, Z2)`, linear part `ℓ(Z1 - Z2)`, unit
    /// coefficients `a, -a` at the pure `ℓ^r`-th powers.
    Antisymmetric,
    /// `f(Z2, Z1) = f(Z1, Z2)`, linear part `ℓ(Z1 + Z2)`, unit
    /// coefficients `a, a` at the pure `ℓ^r`-th powers.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaShapeReport {
    pub kind: LemmaKind,
    pub r: u32,
    pub checks: Vec<HypothesisCheck>,
    /// `1/(ℓ^r - 1)`, emitted only when every check passes.
    pub beta: Option<Rat>,
}

impl LemmaShapeReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Verify the exact shape hypotheses of the pair-valuation lemmas on a
/// two-variable series over `Z/ℓ^N`:
///
/// * the (anti)symmetry identity,
/// * linear part exactly `ℓ·(Z1 ∓ Z2)`,
/// * every coefficient of total degree in `[2, ℓ^r)` divisible by ℓ,
///   and every *mixed* coefficient of total degree exactly `ℓ^r`
///   divisible by ℓ (the pure powers carry the unit),
/// * a unit `a` at `Z1^(ℓ^r)` with `∓a` at `Z2^(ℓ^r)`.
///
/// On success the report carries the lemma conclusion
/// `β = 1/(ℓ^r - 1)`. This is a hypothesis checker; it never solves
/// for roots.
pub fn lemma_shape_check(
    f: &TruncatedSeries,
    kind: LemmaKind,
    r: u32,
) -> Result<LemmaShapeReport, CertifyError> {
    if f.nvars() != 2 {
        return Err(CertifyError::DimMismatch {
            expected: 2,
            got: f.nvars(),
        });
    }
    let ring = f.ring();
    if ring.prec() < 2 {
        return Err(CertifyError::PrecisionTooSmall {
            needed: 2,
            got: ring.prec(),
        });
    }
    let ell = ring.ell();
    let lr = (ell as u128).pow(r);
    if lr > u16::MAX as u128 || f.cap() < lr as u16 {
        return Err(CertifyError::CapTooSmall {
            needed: if lr > u16::MAX as u128 {
                u16::MAX
            } else {
                lr as u16
            },
            got: f.cap(),
        });
    }
    let lr = lr as u16;
    let mut checks: Vec<HypothesisCheck> = Vec::new();

    // (anti)symmetry identity
    let swapped = f.relabel(&[1, 0], 2)?;
    let target = match kind {
        LemmaKind::Antisymmetric => f.neg(),
        LemmaKind::Symmetric => f.clone(),
    };
    let (sym_name, sym_expect) = match kind {
        LemmaKind::Antisymmetric => ("antisymmetry identity", "f(Z2,Z1) = -f(Z1,Z2)"),
        LemmaKind::Symmetric => ("symmetry identity", "f(Z2,Z1) = f(Z1,Z2)"),
    };
    if swapped == target {
        checks.push(HypothesisCheck::passed(
            sym_name,
            "lemma.pair-shape.symmetry",
            String::from(sym_expect),
        ));
    } else {
        let d = swapped.sub(&target)?;
        let (m, _) = d.leading().expect("difference nonzero");
        checks.push(HypothesisCheck::failed(
            sym_name,
            "lemma.pair-shape.symmetry",
            format!("violated at {}", d.render_monomial(&m)),
        ));
    }

    // linear part ℓ·(Z1 ∓ Z2), exactly
    let ell_res = ring.reduce_u128(ell as u128);
    let want_z2 = match kind {
        LemmaKind::Antisymmetric => ring.neg(ell_res),
        LemmaKind::Symmetric => ell_res,
    };
    let c1 = f.coeff(&Mono::var(0)?);
    let c2 = f.coeff(&Mono::var(1)?);
    if c1 == ell_res && c2 == want_z2 {
        checks.push(HypothesisCheck::passed(
            "linear part",
            "lemma.pair-shape.linear",
            match kind {
                LemmaKind::Antisymmetric => String::from("ell·(Z1 - Z2)"),
                LemmaKind::Symmetric => String::from("ell·(Z1 + Z2)"),
            },
        ));
    } else {
        checks.push(HypothesisCheck::failed(
            "linear part",
            "lemma.pair-shape.linear",
            format!("coefficients ({c1}, {c2}) differ from (ell, ∓ell)"),
        ));
    }

    // ℓ-divisibility below degree ℓ^r, and of the mixed degree-ℓ^r
    // terms (the lemma proof only needs the pure powers to be units)
    let pure1 = Mono::from_exps(&[lr, 0])?;
    let pure2 = Mono::from_exps(&[0, lr])?;
    let mut div_fail: Option<String> = None;
    for (m, c) in f.iter() {
        let d = m.degree();
        // everything of total degree in [2, ℓ^r] except the two pure
        // powers must be divisible by ℓ
        if d < 2 || d > lr || *m == pure1 || *m == pure2 {
            continue;
        }
        if !ring.val(*c).is_at_least(1) {
            div_fail = Some(format!("{} has unit coefficient", f.render_monomial(m)));
            break;
        }
    }
    match div_fail {
        None => checks.push(HypothesisCheck::passed(
            "ell-divisibility of middle terms",
            "lemma.pair-shape.divisibility",
            format!("all terms of degree in [2, {lr}) and mixed degree-{lr} terms lie in (ell)"),
        )),
        Some(w) => checks.push(HypothesisCheck::failed(
            "ell-divisibility of middle terms",
            "lemma.pair-shape.divisibility",
            w,
        )),
    }

    // unit coefficient a at Z1^(ℓ^r), matching ∓a at Z2^(ℓ^r)
    let a = f.coeff(&pure1);
    let b = f.coeff(&pure2);
    let want_b = match kind {
        LemmaKind::Antisymmetric => ring.neg(a),
        LemmaKind::Symmetric => a,
    };
    let a_unit = matches!(ring.val(a), Val::Exact(0));
    if a_unit && b == want_b {
        checks.push(HypothesisCheck::passed(
            "unit pure-power coefficient",
            "lemma.pair-shape.unit",
            format!("a = {a} at Z1^{lr}"),
        ));
    } else {
        checks.push(HypothesisCheck::failed(
            "unit pure-power coefficient",
            "lemma.pair-shape.unit",
            format!("a = {a}, coefficient at Z2^{lr} = {b}"),
        ));
    }

    let all = checks.iter().all(|c| c.pass);
    Ok(LemmaShapeReport {
        kind,
        r,
        checks,
        beta: if all {
            Some(Rat::new(1, ((ell as i64).pow(r)) - 1))
        } else {
            None
        },
    })
}

/// Bound above which the generic 4-variable `[ℓ]` recursion is refused
/// (product laws shortcut through their factors instead).
pub const GENERIC_PATH_ELL_BOUND: u64 = 7;
pub const PRODUCT_PATH_ELL_BOUND: u64 = 13;

fn is_product(law: &FormalGroupLaw) -> bool {
    matches!(law.provenance(), Provenance::Product(_, _))
}

/// Structural certification of a symmetric two-dimensional law over
/// `Z/ℓ^N`.
///
/// Checklist, in order: axioms, symmetry, nonzero reduction of `[ℓ]`,
/// r-exponent 2, height 4, `ℓ ∤ a² - b²` for the degree-ℓ²
/// coefficients, and the two pair-series shape lemmas applied to
/// `[ℓ]_1 - [ℓ]_2` and `[ℓ]_1 + [ℓ]_2`. Full pass yields
/// CERTIFIED_TAME with `α = 1/(ℓ²-1)`.
pub fn certify_symmetric(law: &FormalGroupLaw) -> Result<TameCertificate, CertifyError> {
    let ring = law.ring();
    let ell = ring.ell();
    if law.dim() != 2 {
        return Err(CertifyError::DimMismatch {
            expected: 2,
            got: law.dim(),
        });
    }
    if ring.prec() < 2 {
        return Err(CertifyError::PrecisionTooSmall {
            needed: 2,
            got: ring.prec(),
        });
    }
    let needed = (ell * ell + 2) as u16;
    if law.cap() < needed {
        return Err(CertifyError::CapTooSmall {
            needed,
            got: law.cap(),
        });
    }
    let bound = if is_product(law) {
        PRODUCT_PATH_ELL_BOUND
    } else {
        GENERIC_PATH_ELL_BOUND
    };
    if ell > bound {
        return Err(CertifyError::EllTooLargeForGenericPath { ell, bound });
    }

    let mut cert = TameCertificate {
        subject: law.provenance().label(),
        ell,
        alpha: Some(alpha_for(ell)),
        checklist: Vec::new(),
        verdict: Verdict::Refused,
        trail: alloc::vec![
            TheoremCited::CoordinateValuationProfile,
            TheoremCited::SymmetricSurfaceTameness,
            TheoremCited::UniformValuationTameness,
        ],
    };

    // 1. axioms
    let axioms = law.check_axioms()?;
    if axioms.all_pass() {
        cert.checklist.push(HypothesisCheck::passed(
            "formal group law axioms",
            "fgl.axioms",
            String::from("unit, linear term, commutativity, associativity"),
        ));
    } else {
        let (name, out) = axioms.first_failure().expect("some axiom failed");
        cert.checklist.push(HypothesisCheck::failed(
            "formal group law axioms",
            "fgl.axioms",
            format!("{name} fails at {}", out.witness.clone().unwrap_or_default()),
        ));
        return Ok(cert.finish());
    }

    // 2. symmetry
    if law.is_symmetric()? {
        cert.checklist.push(HypothesisCheck::passed(
            "symmetric law",
            "fgl.symmetry",
            String::from("F2(X2,X1,Y2,Y1) = F1(X1,X2,Y1,Y2)"),
        ));
    } else {
        cert.checklist.push(HypothesisCheck::failed(
            "symmetric law",
            "fgl.symmetry",
            String::from("coordinate swap does not map F1 onto F2"),
        ));
        return Ok(cert.finish());
    }

    // 3. [ℓ] and its reduction
    let mul = law.mul_by_m(ell)?;
    let reduced = mul.reduce_mod_ell();
    if reduced.maps.iter().all(|s| s.is_zero()) {
        cert.checklist.push(HypothesisCheck::failed(
            "nonzero reduction of [ell]",
            "fgl.mul-ell-reduction",
            String::from("[ell] vanishes mod ell"),
        ));
        return Ok(cert.finish());
    }
    cert.checklist.push(HypothesisCheck::passed(
        "nonzero reduction of [ell]",
        "fgl.mul-ell-reduction",
        String::from("[ell] mod ell is nonzero"),
    ));

    // 4. r-exponent = 2
    match crate::fgl::r_exponent(&reduced.maps) {
        Ok(profile) => {
            if profile.r == 2 {
                cert.checklist.push(HypothesisCheck::passed(
                    "r-exponent equals 2",
                    "fgl.r-exponent",
                    format!("u = {} at {}", profile.u, profile.witness),
                ));
            } else {
                cert.checklist.push(HypothesisCheck::failed(
                    "r-exponent equals 2",
                    "fgl.r-exponent",
                    format!("r = {} (u = {})", profile.r, profile.u),
                ));
                return Ok(cert.finish());
            }
        }
        Err(e) => {
            cert.checklist.push(HypothesisCheck::failed(
                "r-exponent equals 2",
                "fgl.r-exponent",
                format!("{e}"),
            ));
            cert.verdict = Verdict::Error;
            return Ok(cert.finish());
        }
    }

    // 5. height = 4
    match crate::fgl::height_from_reduced_mul(&reduced.maps) {
        Ok(Height::Finite(4)) => {
            cert.checklist.push(HypothesisCheck::passed(
                "height equals 4",
                "fgl.height",
                String::from("staircase dimension ell^4"),
            ));
        }
        Ok(h) => {
            cert.checklist.push(HypothesisCheck::failed(
                "height equals 4",
                "fgl.height",
                format!("height = {h}"),
            ));
            return Ok(cert.finish());
        }
        Err(e) => {
            cert.checklist.push(HypothesisCheck::failed(
                "height equals 4",
                "fgl.height",
                format!("{e}"),
            ));
            cert.verdict = Verdict::Error;
            return Ok(cert.finish());
        }
    }

    // 6. ℓ ∤ a² - b² for the degree-ℓ² coefficients of [ℓ]_1
    let l2 = (ell * ell) as u16;
    let a = mul.maps[0].coeff_of_exps(&[l2, 0]);
    let b = mul.maps[0].coeff_of_exps(&[0, l2]);
    let a_minus_b = ring.sub(a, b);
    let a_plus_b = ring.add(a, b);
    let ok = matches!(ring.val(a_minus_b), Val::Exact(0))
        && matches!(ring.val(a_plus_b), Val::Exact(0));
    if ok {
        cert.checklist.push(HypothesisCheck::passed(
            "unit a^2 - b^2 at degree ell^2",
            "fgl.degree-matrix-units",
            format!("a = {a}, b = {b}"),
        ));
    } else {
        cert.checklist.push(HypothesisCheck::failed(
            "unit a^2 - b^2 at degree ell^2",
            "fgl.degree-matrix-units",
            format!("a = {a}, b = {b}: ell divides a-b or a+b"),
        ));
        return Ok(cert.finish());
    }

    // 7./8. the two lemma shapes on [ℓ]_1 ∓ [ℓ]_2
    let diff = mul.maps[0].sub(&mul.maps[1])?;
    let rep_diff = lemma_shape_check(&diff, LemmaKind::Antisymmetric, 2)?;
    push_lemma(&mut cert, "pair difference shape", &rep_diff);
    if !rep_diff.all_pass() {
        return Ok(cert.finish());
    }
    let sum = mul.maps[0].add(&mul.maps[1])?;
    let rep_sum = lemma_shape_check(&sum, LemmaKind::Symmetric, 2)?;
    push_lemma(&mut cert, "pair sum shape", &rep_sum);
    if !rep_sum.all_pass() {
        return Ok(cert.finish());
    }

    Ok(cert.finish())
}

fn push_lemma(cert: &mut TameCertificate, name: &str, rep: &LemmaShapeReport) {
    if rep.all_pass() {
        cert.checklist.push(HypothesisCheck::passed(
            name,
            "lemma.pair-shape",
            format!(
                "all shape checks pass; beta = {}",
                rep.beta.expect("beta present on pass")
            ),
        ));
    } else {
        let first = rep
            .checks
            .iter()
            .find(|c| !c.pass)
            .expect("some check failed");
        cert.checklist.push(HypothesisCheck::failed(
            name,
            "lemma.pair-shape",
            format!("{}: {}", first.name, first.witness),
        ));
    }
}

/// Transfer a certificate to a perturbed law.
///
/// The gate compares the `[ℓ]` series: every coefficient of
/// `[ℓ]_i - [ℓ]'_i` must lie in `(ℓ⁴)`. The theorem's condition is on
/// the law coefficients and propagates to `[ℓ]`, so the law-level
/// difference is also measured and recorded in the witness text, while
/// the `[ℓ]`-level congruence gates the verdict. The perturbed law must
/// itself satisfy the axioms.
pub fn certify_perturbed(
    base_cert: &TameCertificate,
    base_law: &FormalGroupLaw,
    new_law: &FormalGroupLaw,
) -> Result<TameCertificate, CertifyError> {
    if !base_cert.is_certified() {
        return Err(CertifyError::BaseNotCertified);
    }
    if base_law.cap() != new_law.cap() {
        return Err(CertifyError::CapMismatch {
            left: base_law.cap(),
            right: new_law.cap(),
        });
    }
    if base_law.ring() != new_law.ring() {
        return Err(CertifyError::RingMismatch);
    }
    if base_law.dim() != new_law.dim() {
        return Err(CertifyError::DimMismatch {
            expected: base_law.dim(),
            got: new_law.dim(),
        });
    }
    let ring = base_law.ring();
    let ell = ring.ell();
    if ring.prec() < 5 {
        return Err(CertifyError::PrecisionTooSmall {
            needed: 5,
            got: ring.prec(),
        });
    }

    let mut trail = base_cert.trail.clone();
    if !trail.contains(&TheoremCited::PerturbationTransfer) {
        trail.push(TheoremCited::PerturbationTransfer);
    }
    let mut cert = TameCertificate {
        subject: format!(
            "{} perturbed from {}",
            new_law.provenance().label(),
            base_cert.subject
        ),
        ell,
        alpha: base_cert.alpha,
        checklist: Vec::new(),
        verdict: Verdict::Refused,
        trail,
    };

    // axioms of the perturbed law
    let axioms = new_law.check_axioms()?;
    if axioms.all_pass() {
        cert.checklist.push(HypothesisCheck::passed(
            "perturbed law axioms",
            "fgl.axioms",
            String::from("unit, linear term, commutativity, associativity"),
        ));
    } else {
        let (name, out) = axioms.first_failure().expect("some axiom failed");
        cert.checklist.push(HypothesisCheck::failed(
            "perturbed law axioms",
            "fgl.axioms",
            format!("{name} fails at {}", out.witness.clone().unwrap_or_default()),
        ));
        return Ok(cert.finish());
    }

    // informational: law-level coefficient difference
    let mut law_val = Val::AtLeast(ring.prec());
    for (a, b) in base_law.coords().iter().zip(new_law.coords()) {
        let d = a.sub(b)?;
        if let Val::Exact(v) = d.min_val() {
            law_val = match law_val {
                Val::Exact(cur) => Val::Exact(cur.min(v)),
                Val::AtLeast(_) => Val::Exact(v),
            };
        }
    }

    // gating: [ℓ]-level congruence modulo ℓ⁴
    let base_mul = base_law.mul_by_m(ell)?;
    let new_mul = new_law.mul_by_m(ell)?;
    let mut offender: Option<(String, Val)> = None;
    let mut mul_val = Val::AtLeast(ring.prec());
    for (a, b) in base_mul.maps.iter().zip(new_mul.maps.iter()) {
        let d = a.sub(b)?;
        for (m, c) in d.iter() {
            let v = ring.val(*c);
            if let Val::Exact(e) = v {
                mul_val = match mul_val {
                    Val::Exact(cur) => Val::Exact(cur.min(e)),
                    Val::AtLeast(_) => Val::Exact(e),
                };
                if e < 4 && offender.is_none() {
                    offender = Some((d.render_monomial(m), v));
                }
            }
        }
    }
    match offender {
        None => cert.checklist.push(HypothesisCheck::passed(
            "mul-map ell^4 congruence (via propagated coefficient condition)",
            "perturb.ell4-congruence",
            format!(
                "[ell] difference valuation {mul_val}; law-level difference valuation {law_val}"
            ),
        )),
        Some((mono, v)) => {
            cert.checklist.push(HypothesisCheck::failed(
                "mul-map ell^4 congruence (via propagated coefficient condition)",
                "perturb.ell4-congruence",
                format!("coefficient of {mono} has valuation {v} < 4"),
            ));
            return Ok(cert.finish());
        }
    }

    Ok(cert.finish())
}

/// Convenience: the `[ℓ]` maps of a certified subject, reduced mod ℓ.
pub fn reduced_mul_maps(law: &FormalGroupLaw) -> Result<MulByM, CertifyError> {
    Ok(law.mul_by_m(law.ring().ell())?.reduce_mod_ell())
}
