//! `--law` specifier parsing and construction.
//!
//! Supported forms:
//!   additive | multiplicative
//!   elliptic-supersingular          (canonical base curve at ell)
//!   elliptic-ordinary               (the control curve y² = x³+x+1)
//!   elliptic:b=<int>                (palindromic model)
//!   elliptic:a=<a1>,<a2>,<a3>,<a4>,<a6>
//!   product-supersingular           (E x E of the base curve)
//!   product:b1=<int>,b2=<int>
//!   conjugate-supersingular:seed=<u64>  (seeded unit-linear conjugate)

use fgl_core::curve::supersingular_base_curve;
use fgl_core::fgl::{default_cap, FormalGroupLaw, WeierstrassModel};
use fgl_core::ring::Ring;
use fgl_core::rng::SplitMix64;
use fgl_core::series::TruncatedSeries;

pub fn build_law(descriptor: &str, ell: u64, prec: u32, cap: Option<u16>) -> Result<FormalGroupLaw, String> {
    let ring = Ring::new(ell, prec).map_err(|e| e.to_string())?;
    let cap1 = cap.unwrap_or_else(|| default_cap(ell, 1));
    let cap2 = cap.unwrap_or_else(|| default_cap(ell, 2));
    let max = fgl_core::series::MAX_CAP;
    if cap1 > max || cap2 > max {
        return Err(format!(
            "cap {} exceeds the supported bound {max}; pass --cap or use a smaller ell",
            cap1.max(cap2)
        ));
    }
    let err = |e: fgl_core::fgl::FglError| e.to_string();
    match descriptor {
        "additive" => FormalGroupLaw::additive(ring, cap1).map_err(err),
        "multiplicative" => FormalGroupLaw::multiplicative(ring, cap1).map_err(err),
        "elliptic-supersingular" => {
            let base = supersingular_base_curve(ell).map_err(|e| e.to_string())?;
            FormalGroupLaw::elliptic(ring, base.model(), cap1).map_err(err)
        }
        "elliptic-ordinary" => {
            FormalGroupLaw::elliptic(ring, WeierstrassModel::new([0, 0, 0, 1, 1]), cap1).map_err(err)
        }
        "product-supersingular" => {
            let base = supersingular_base_curve(ell).map_err(|e| e.to_string())?;
            let e = FormalGroupLaw::elliptic(ring, base.model(), cap2).map_err(err)?;
            FormalGroupLaw::product(&e, &e).map_err(err)
        }
        other => {
            if let Some(rest) = other.strip_prefix("elliptic:b=") {
                let b: i128 = rest.parse().map_err(|_| format!("bad b value {rest}"))?;
                return FormalGroupLaw::elliptic(ring, WeierstrassModel::b_form(b), cap1)
                    .map_err(err);
            }
            if let Some(rest) = other.strip_prefix("elliptic:a=") {
                let parts: Vec<i128> = rest
                    .split(',')
                    .map(|p| p.trim().parse().map_err(|_| format!("bad coefficient {p}")))
                    .collect::<Result<_, _>>()?;
                if parts.len() != 5 {
                    return Err(String::from("elliptic:a= needs a1,a2,a3,a4,a6"));
                }
                let model =
                    WeierstrassModel::new([parts[0], parts[1], parts[2], parts[3], parts[4]]);
                return FormalGroupLaw::elliptic(ring, model, cap1).map_err(err);
            }
            if let Some(rest) = other.strip_prefix("product:") {
                let mut b1: Option<i128> = None;
                let mut b2: Option<i128> = None;
                for part in rest.split(',') {
                    if let Some(v) = part.strip_prefix("b1=") {
                        b1 = Some(v.parse().map_err(|_| format!("bad b1 {v}"))?);
                    } else if let Some(v) = part.strip_prefix("b2=") {
                        b2 = Some(v.parse().map_err(|_| format!("bad b2 {v}"))?);
                    } else {
                        return Err(format!("unknown product parameter {part}"));
                    }
                }
                let (b1, b2) = (
                    b1.ok_or("product: missing b1")?,
                    b2.ok_or("product: missing b2")?,
                );
                let e1 = FormalGroupLaw::elliptic(ring, WeierstrassModel::b_form(b1), cap2)
                    .map_err(err)?;
                let e2 = FormalGroupLaw::elliptic(ring, WeierstrassModel::b_form(b2), cap2)
                    .map_err(err)?;
                return FormalGroupLaw::product(&e1, &e2).map_err(err);
            }
            if let Some(rest) = other.strip_prefix("conjugate-supersingular:seed=") {
                let seed: u64 = rest.parse().map_err(|_| format!("bad seed {rest}"))?;
                let base = supersingular_base_curve(ell).map_err(|e| e.to_string())?;
                let e = FormalGroupLaw::elliptic(ring, base.model(), cap2).map_err(err)?;
                let law = FormalGroupLaw::product(&e, &e).map_err(err)?;
                let t = random_unit_linear(ring, cap2, seed)?;
                return law.conjugate(&t).map_err(err);
            }
            Err(format!("unknown law specifier '{other}'"))
        }
    }
}

/// Seeded random linear change of coordinates with unit determinant.
pub fn random_unit_linear(
    ring: Ring,
    cap: u16,
    seed: u64,
) -> Result<Vec<TruncatedSeries>, String> {
    let ell = ring.ell();
    let mut rng = SplitMix64::new(seed);
    loop {
        let e: Vec<u64> = (0..4).map(|_| rng.below(ell)).collect();
        let det = (e[0] as i128 * e[3] as i128 - e[1] as i128 * e[2] as i128).rem_euclid(ell as i128);
        if det == 0 {
            continue;
        }
        let mut t1 = TruncatedSeries::zero(ring, 2, cap);
        t1.set_exps(&[1, 0], e[0] as i128).map_err(|x| x.to_string())?;
        t1.set_exps(&[0, 1], e[1] as i128).map_err(|x| x.to_string())?;
        let mut t2 = TruncatedSeries::zero(ring, 2, cap);
        t2.set_exps(&[1, 0], e[2] as i128).map_err(|x| x.to_string())?;
        t2.set_exps(&[0, 1], e[3] as i128).map_err(|x| x.to_string())?;
        return Ok(vec![t1, t2]);
    }
}
