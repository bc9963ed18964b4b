//! Multivariate Hensel lifting over `Z/ℓ^N`.
//!
//! Given a system of `n` series in `n` variables and an approximate
//! root `a` with entries of positive valuation, the lift refines `a`
//! to a root `b` with `b ≡ a mod e·𝔪`, where `e` is the Jacobian
//! determinant at `a`. The hypothesis gate is
//! `f(a) ≡ 0 mod e²·𝔪`, i.e. `v(f_i(a)) > 2·v(e)`; rejecting inputs
//! outside it is the caller's signal, not a crash.
//!
//! The iteration is plain Newton with an exact adjugate solve; a step
//! is accepted only if the residual valuation strictly increases, with
//! a hard cap of 64 iterations.

use crate::ring::{PadicCoeff, Ring, RingError, Val};
use crate::series::{SeriesError, TruncatedSeries};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub const MAX_ITERATIONS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HenselError {
    /// A precondition of the lifting theorem fails; the offending
    /// condition is spelled out.
    HypothesisViolated(String),
    /// The residual valuation stopped increasing before reaching the
    /// working precision.
    PrecisionExhausted { iterations: u32, best_val: u32 },
    ShapeMismatch(String),
    Series(SeriesError),
    Ring(RingError),
}

impl fmt::Display for HenselError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HenselError::HypothesisViolated(s) => write!(f, "hypothesis violated: {s}"),
            HenselError::PrecisionExhausted {
                iterations,
                best_val,
            } => write!(
                f,
                "no progress after {iterations} iterations (best residual valuation {best_val})"
            ),
            HenselError::ShapeMismatch(s) => write!(f, "{s}"),
            HenselError::Series(e) => write!(f, "{e}"),
            HenselError::Ring(e) => write!(f, "{e}"),
        }
    }
}

impl From<SeriesError> for HenselError {
    fn from(e: SeriesError) -> Self {
        HenselError::Series(e)
    }
}

impl From<RingError> for HenselError {
    fn from(e: RingError) -> Self {
        HenselError::Ring(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenselLift {
    /// The refined root, carried at precision `N - v(e)` (the digits
    /// the theorem actually determines).
    pub root: Vec<PadicCoeff>,
    pub iterations: u32,
    /// Valuation of the residual at the returned root, evaluated at the
    /// full working precision.
    pub residual_val: Vec<Val>,
    pub jacobian_val: u32,
}

fn jacobian(system: &[TruncatedSeries]) -> Result<Vec<Vec<TruncatedSeries>>, HenselError> {
    let n = system.len();
    let mut rows = Vec::with_capacity(n);
    for f in system {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(f.derivative(j)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn det_n(ring: Ring, m: &[Vec<u128>]) -> u128 {
    match m.len() {
        1 => m[0][0],
        2 => ring.sub(ring.mul(m[0][0], m[1][1]), ring.mul(m[0][1], m[1][0])),
        n => {
            // Laplace expansion along the first row; n stays tiny here
            let mut acc = 0u128;
            for j in 0..n {
                if m[0][j] == 0 {
                    continue;
                }
                let minor: Vec<Vec<u128>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let term = ring.mul(m[0][j], det_n(ring, &minor));
                acc = if j % 2 == 0 {
                    ring.add(acc, term)
                } else {
                    ring.sub(acc, term)
                };
            }
            acc
        }
    }
}

fn adjugate(ring: Ring, m: &[Vec<u128>]) -> Vec<Vec<u128>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1u128]];
    }
    let mut adj = vec![vec![0u128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<u128>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| m[r][c])
                        .collect::<Vec<_>>()
                })
                .collect();
            let cof = det_n(ring, &minor);
            // adj[j][i] = (-1)^(i+j) * minor(i, j)
            adj[j][i] = if (i + j) % 2 == 0 {
                cof
            } else {
                ring.neg(cof)
            };
        }
    }
    adj
}

fn eval_vec(system: &[TruncatedSeries], point: &[u128]) -> Result<Vec<u128>, HenselError> {
    system
        .iter()
        .map(|f| f.eval(point).map_err(HenselError::from))
        .collect()
}

fn min_val(ring: Ring, v: &[u128]) -> Val {
    let mut best: Option<u32> = None;
    for &x in v {
        if let Val::Exact(e) = ring.val(x) {
            best = Some(best.map_or(e, |b| b.min(e)));
        }
    }
    match best {
        Some(b) => Val::Exact(b),
        None => Val::AtLeast(ring.prec()),
    }
}

/// One Newton pass: solve `J(b)·δ = f(b)` exactly through the adjugate
/// and return `b - δ`. Fails if the solve is not exactly divisible.
fn newton_step(
    ring: Ring,
    system: &[TruncatedSeries],
    jac: &[Vec<TruncatedSeries>],
    b: &[u128],
    residual: &[u128],
) -> Result<Vec<u128>, HenselError> {
    let n = system.len();
    let mut jm = vec![vec![0u128; n]; n];
    for i in 0..n {
        for j in 0..n {
            jm[i][j] = jac[i][j].eval(b)?;
        }
    }
    let det = det_n(ring, &jm);
    let v_det = match ring.val(det) {
        Val::Exact(v) => v,
        Val::AtLeast(_) => {
            return Err(HenselError::HypothesisViolated(String::from(
                "Jacobian determinant vanishes at the iterate",
            )))
        }
    };
    let adj = adjugate(ring, &jm);
    let unit = ring.div_pow_ell(det, v_det)?;
    let unit_inv = ring.inv(unit)?;
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = 0u128;
        for j in 0..n {
            acc = ring.add(acc, ring.mul(adj[i][j], residual[j]));
        }
        // delta_i = (adj·r)_i / det, exact by the valuation hypotheses
        let shifted = ring.div_pow_ell(acc, v_det).map_err(|_| {
            HenselError::HypothesisViolated(format!(
                "adjugate solve not divisible by ell^{v_det} in coordinate {}",
                i + 1
            ))
        })?;
        let delta = ring.mul(shifted, unit_inv);
        next.push(ring.sub(b[i], delta));
    }
    Ok(next)
}

/// Determinant of the Jacobian matrix of the system at a point.
pub fn jacobian_det_at(system: &[TruncatedSeries], point: &[u128]) -> Result<u128, HenselError> {
    let ring = system
        .first()
        .map(|s| s.ring())
        .ok_or_else(|| HenselError::ShapeMismatch(String::from("empty system")))?;
    let n = system.len();
    let jac = jacobian(system)?;
    let mut jm = vec![vec![0u128; n]; n];
    for i in 0..n {
        for j in 0..n {
            jm[i][j] = jac[i][j].eval(point)?;
        }
    }
    Ok(det_n(ring, &jm))
}

/// The bare Newton iteration from `start`, no hypothesis gate. Used for
/// the uniqueness trials, which start anywhere inside the `e·𝔪` ball.
///
/// Terminates on a zero residual or on a stationary step: the adjugate
/// solve divides by `ℓ^v(det)`, so the iterate is only determined
/// modulo `ℓ^(N - v(det))` and the residual saturates once that floor
/// is reached.
pub fn newton_iterate(
    system: &[TruncatedSeries],
    start: &[u128],
) -> Result<(Vec<u128>, u32), HenselError> {
    let ring = system
        .first()
        .map(|s| s.ring())
        .ok_or_else(|| HenselError::ShapeMismatch(String::from("empty system")))?;
    let jac = jacobian(system)?;
    let mut b: Vec<u128> = start.iter().map(|&x| ring.reduce_u128(x)).collect();
    let mut prev: Option<u32> = None;
    let mut it = 0u32;
    loop {
        let residual = eval_vec(system, &b)?;
        let v = match min_val(ring, &residual) {
            Val::AtLeast(_) => return Ok((b, it)),
            Val::Exact(v) => v,
        };
        if let Some(p) = prev {
            if v <= p {
                return Err(HenselError::PrecisionExhausted {
                    iterations: it,
                    best_val: v.max(p),
                });
            }
        }
        if it >= MAX_ITERATIONS {
            return Err(HenselError::PrecisionExhausted {
                iterations: it,
                best_val: v,
            });
        }
        let next = newton_step(ring, system, &jac, &b, &residual)?;
        if next == b {
            // stationary at the division floor; the root is as exact
            // as the working precision allows
            return Ok((b, it));
        }
        prev = Some(v);
        b = next;
        it += 1;
    }
}

/// Gated lift: verifies the theorem hypotheses at `a`, then iterates.
///
/// * every `a_i` has positive valuation,
/// * `v(det J(a)) = v(e)` exactly,
/// * `v(f_i(a)) > 2·v(e)` for all `i`.
///
/// The returned root is truncated to precision `N - v(e)` and satisfies
/// `b ≡ a mod e·𝔪` (checked).
pub fn hensel_lift(
    system: &[TruncatedSeries],
    start: &[PadicCoeff],
    e: &PadicCoeff,
) -> Result<HenselLift, HenselError> {
    let n = system.len();
    if n == 0 || start.len() != n {
        return Err(HenselError::ShapeMismatch(format!(
            "system of {n} equations with {} start coordinates",
            start.len()
        )));
    }
    let ring = system[0].ring();
    for f in system {
        if f.ring() != ring {
            return Err(HenselError::Ring(RingError::RingMismatch));
        }
        if f.nvars() as usize != n {
            return Err(HenselError::ShapeMismatch(format!(
                "series in {} variables inside a {n}-dimensional system",
                f.nvars()
            )));
        }
    }
    for (i, c) in start.iter().enumerate() {
        if c.ring() != ring {
            return Err(HenselError::Ring(RingError::RingMismatch));
        }
        if !c.val().is_at_least(1) {
            return Err(HenselError::HypothesisViolated(format!(
                "start coordinate {} is not in the maximal ideal",
                i + 1
            )));
        }
    }
    if e.ring() != ring {
        return Err(HenselError::Ring(RingError::RingMismatch));
    }
    let v_e = match e.val() {
        Val::Exact(v) => v,
        Val::AtLeast(_) => {
            return Err(HenselError::HypothesisViolated(String::from(
                "e vanishes at the working precision",
            )))
        }
    };

    let a: Vec<u128> = start.iter().map(|c| c.residue()).collect();
    let jac = jacobian(system)?;
    let mut jm = vec![vec![0u128; n]; n];
    for i in 0..n {
        for j in 0..n {
            jm[i][j] = jac[i][j].eval(&a)?;
        }
    }
    let det = det_n(ring, &jm);
    match ring.val(det) {
        Val::Exact(v) if v == v_e => {}
        v => {
            return Err(HenselError::HypothesisViolated(format!(
                "Jacobian determinant at a has valuation {v}, expected exactly {v_e}"
            )))
        }
    }
    let f_at_a = eval_vec(system, &a)?;
    for (i, &r) in f_at_a.iter().enumerate() {
        if !ring.val(r).is_at_least(2 * v_e + 1) {
            return Err(HenselError::HypothesisViolated(format!(
                "v(f_{}(a)) = {} is not greater than 2·v(e) = {}",
                i + 1,
                ring.val(r),
                2 * v_e
            )));
        }
    }

    let (b, iterations) = newton_iterate(system, &a)?;

    // the refinement stays inside the e·𝔪 ball
    for i in 0..n {
        let diff = ring.sub(b[i], a[i]);
        if !ring.val(diff).is_at_least(v_e + 1) {
            return Err(HenselError::HypothesisViolated(format!(
                "refined root left the e·m ball in coordinate {} (valuation {})",
                i + 1,
                ring.val(diff)
            )));
        }
    }

    // report the root at the precision the theorem determines
    let out_prec = ring.prec().saturating_sub(v_e).max(1);
    let out_ring = ring.with_prec(out_prec)?;
    let root: Vec<PadicCoeff> = b
        .iter()
        .map(|&x| out_ring.coeff_u128(out_ring.reduce_u128(x)))
        .collect();
    // residual at the canonical lift of the truncated root
    let lifted: Vec<u128> = root.iter().map(|c| c.residue()).collect();
    let res = eval_vec(system, &lifted)?;
    let residual_val = res.iter().map(|&x| ring.val(x)).collect();
    Ok(HenselLift {
        root,
        iterations,
        residual_val,
        jacobian_val: v_e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn worked_system(ring: Ring) -> Vec<TruncatedSeries> {
        // (5x - 5^5 + x^7, 5y - 5^6 + y^7)
        let mut f1 = TruncatedSeries::zero(ring, 2, 8);
        f1.set_exps(&[1, 0], 5).unwrap();
        f1.set_exps(&[0, 0], -(5i128.pow(5))).unwrap();
        f1.set_exps(&[7, 0], 1).unwrap();
        let mut f2 = TruncatedSeries::zero(ring, 2, 8);
        f2.set_exps(&[0, 1], 5).unwrap();
        f2.set_exps(&[0, 0], -(5i128.pow(6))).unwrap();
        f2.set_exps(&[0, 7], 1).unwrap();
        vec![f1, f2]
    }

    #[test]
    fn worked_example_lifts() {
        let ring = Ring::new(5, 24).unwrap();
        let sys = worked_system(ring);
        let start = vec![ring.coeff(0), ring.coeff(0)];
        let e = ring.coeff(25);
        let lift = hensel_lift(&sys, &start, &e).unwrap();
        assert_eq!(lift.jacobian_val, 2);
        assert_eq!(lift.root[0].ring().prec(), 22);
        // b = (5^4, 5^5) modulo 5^10 and beyond
        assert_eq!(lift.root[0].residue(), 5u128.pow(4));
        assert_eq!(lift.root[1].residue(), 5u128.pow(5));
        assert_eq!(lift.root[0].val(), Val::Exact(4));
        assert_eq!(lift.root[1].val(), Val::Exact(5));
        for v in &lift.residual_val {
            assert!(v.is_at_least(20), "residual {v}");
        }
    }

    #[test]
    fn uniqueness_from_perturbed_starts() {
        let ring = Ring::new(5, 24).unwrap();
        let sys = worked_system(ring);
        let base = hensel_lift(&sys, &[ring.coeff(0), ring.coeff(0)], &ring.coeff(25)).unwrap();
        let mut rng = SplitMix64::new(7);
        for _ in 0..10 {
            // start inside the e·m ball: offset by e·ell·(random)
            let t1 = rng.below(5u64.pow(10)) as u128;
            let t2 = rng.below(5u64.pow(10)) as u128;
            let start = vec![ring.mul(125, t1), ring.mul(125, t2)];
            let (b, _) = newton_iterate(&sys, &start).unwrap();
            let out = ring.with_prec(22).unwrap();
            assert_eq!(out.reduce_u128(b[0]), base.root[0].residue());
            assert_eq!(out.reduce_u128(b[1]), base.root[1].residue());
        }
    }

    #[test]
    fn linear_system_solves_exactly() {
        // (5x - 5^6, 5y - 5^7): v(f(a)) = (6, 7) > 2·v(e) = 4
        let ring = Ring::new(5, 24).unwrap();
        let mut f1 = TruncatedSeries::zero(ring, 2, 4);
        f1.set_exps(&[1, 0], 5).unwrap();
        f1.set_exps(&[0, 0], -(5i128.pow(6))).unwrap();
        let mut f2 = TruncatedSeries::zero(ring, 2, 4);
        f2.set_exps(&[0, 1], 5).unwrap();
        f2.set_exps(&[0, 0], -(5i128.pow(7))).unwrap();
        let lift = hensel_lift(
            &[f1, f2],
            &[ring.coeff(0), ring.coeff(0)],
            &ring.coeff(25),
        )
        .unwrap();
        assert_eq!(lift.root[0].residue(), 5u128.pow(5));
        assert_eq!(lift.root[1].residue(), 5u128.pow(6));
        for v in &lift.residual_val {
            assert_eq!(*v, Val::AtLeast(24));
        }
    }

    #[test]
    fn boundary_hypothesis_rejected() {
        // v(f_1(a)) = 2 = 2·v(e) with e = 5: not strictly greater
        let ring = Ring::new(5, 24).unwrap();
        let mut f1 = TruncatedSeries::zero(ring, 2, 4);
        f1.set_exps(&[1, 0], 5).unwrap();
        f1.set_exps(&[0, 0], -25).unwrap();
        f1.set_exps(&[2, 0], 1).unwrap();
        let mut f2 = TruncatedSeries::zero(ring, 2, 4);
        f2.set_exps(&[0, 1], 1).unwrap();
        f2.set_exps(&[0, 0], -125).unwrap();
        // J = diag(5 + 2x, 1) at a = 0: det = 5, v(e) = 1
        let got = hensel_lift(
            &[f1, f2],
            &[ring.coeff(0), ring.coeff(0)],
            &ring.coeff(5),
        );
        assert!(
            matches!(got, Err(HenselError::HypothesisViolated(_))),
            "{got:?}"
        );
    }

    #[test]
    fn jacobian_valuation_mismatch_rejected() {
        let ring = Ring::new(5, 24).unwrap();
        let sys = worked_system(ring);
        // claim e = 5 while det J(0) = 25
        let got = hensel_lift(&sys, &[ring.coeff(0), ring.coeff(0)], &ring.coeff(5));
        assert!(matches!(got, Err(HenselError::HypothesisViolated(_))));
    }

    #[test]
    fn start_outside_maximal_ideal_rejected() {
        let ring = Ring::new(5, 24).unwrap();
        let sys = worked_system(ring);
        let got = hensel_lift(&sys, &[ring.coeff(1), ring.coeff(0)], &ring.coeff(25));
        assert!(matches!(got, Err(HenselError::HypothesisViolated(_))));
    }

    #[test]
    fn residual_is_fixed_point_quality() {
        // substituting the returned root leaves residual valuation
        // >= working precision - v(e)
        let ring = Ring::new(5, 20).unwrap();
        let sys = worked_system(ring);
        let lift = hensel_lift(&sys, &[ring.coeff(0), ring.coeff(0)], &ring.coeff(25)).unwrap();
        for v in &lift.residual_val {
            assert!(v.is_at_least(20 - lift.jacobian_val));
        }
    }
}
