//! Univariate polynomials over `F_ℓ`: ring operations, Euclidean
//! division, gcd, resultants and discriminants. Coefficients ascending,
//! no trailing zeros.

use crate::fp::{Fp2Element, FpElement};
use crate::ring::RingError;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    DegreeMismatch,
    Ring(RingError),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::DegreeMismatch => write!(f, "leading coefficient vanishes in the ring"),
            PolyError::Ring(e) => write!(f, "{e}"),
        }
    }
}

impl From<RingError> for PolyError {
    fn from(e: RingError) -> Self {
        PolyError::Ring(e)
    }
}

/// A polynomial over `F_ℓ`, coefficients ascending by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly {
    ell: u64,
    coeffs: Vec<u64>,
}

impl UPoly {
    pub fn new(ell: u64, coeffs: &[i128]) -> Result<Self, RingError> {
        let _probe = FpElement::new(ell, 0)?;
        let m = ell as i128;
        let mut c: Vec<u64> = coeffs.iter().map(|&x| (((x % m) + m) % m) as u64).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        Ok(UPoly { ell, coeffs: c })
    }

    pub fn zero(ell: u64) -> Self {
        UPoly {
            ell,
            coeffs: vec![],
        }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<u64> {
        self.coeffs.last().copied()
    }

    fn fp(&self, v: u64) -> FpElement {
        FpElement::new(self.ell, v as i128).expect("validated prime")
    }

    fn normalized(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        self
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut c = vec![0u64; n];
        for (i, slot) in c.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = o.coeffs.get(i).copied().unwrap_or(0);
            *slot = (a + b) % self.ell;
        }
        UPoly {
            ell: self.ell,
            coeffs: c,
        }
        .normalized()
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut c = vec![0u64; n];
        for (i, slot) in c.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = o.coeffs.get(i).copied().unwrap_or(0);
            *slot = (a + self.ell - b) % self.ell;
        }
        UPoly {
            ell: self.ell,
            coeffs: c,
        }
        .normalized()
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero(self.ell);
        }
        let mut c = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                let prod = (a as u128 * b as u128) % self.ell as u128;
                c[i + j] = ((c[i + j] as u128 + prod) % self.ell as u128) as u64;
            }
        }
        UPoly {
            ell: self.ell,
            coeffs: c,
        }
        .normalized()
    }

    pub fn scale(&self, k: u64) -> UPoly {
        let k = k % self.ell;
        let c = self
            .coeffs
            .iter()
            .map(|&a| ((a as u128 * k as u128) % self.ell as u128) as u64)
            .collect();
        UPoly {
            ell: self.ell,
            coeffs: c,
        }
        .normalized()
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lc_inv = self.fp(d.leading().unwrap()).inv().expect("field").value();
        let mut r = self.clone();
        let mut q = vec![0u64; self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let factor =
                ((r.leading().unwrap() as u128 * lc_inv as u128) % self.ell as u128) as u64;
            q[rd - dd] = factor;
            // r -= factor * x^(rd-dd) * d
            for (j, &dc) in d.coeffs.iter().enumerate() {
                let sub = (factor as u128 * dc as u128) % self.ell as u128;
                let idx = rd - dd + j;
                r.coeffs[idx] =
                    ((r.coeffs[idx] as u128 + self.ell as u128 - sub) % self.ell as u128) as u64;
            }
            r = r.normalized();
        }
        (
            UPoly {
                ell: self.ell,
                coeffs: q,
            }
            .normalized(),
            r,
        )
    }

    pub fn divides(&self, other: &UPoly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if let Some(lc) = a.leading() {
            let inv = self.fp(lc).inv().expect("field").value();
            a = a.scale(inv);
        }
        a
    }

    pub fn derivative(&self) -> UPoly {
        if self.coeffs.len() <= 1 {
            return UPoly::zero(self.ell);
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| ((a as u128 * (i as u128 % self.ell as u128)) % self.ell as u128) as u64)
            .collect();
        UPoly {
            ell: self.ell,
            coeffs: c,
        }
        .normalized()
    }

    pub fn eval(&self, x: &FpElement) -> FpElement {
        let mut acc = FpElement::new(self.ell, 0).expect("validated prime");
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&self.fp(c));
        }
        acc
    }

    pub fn eval_fp2(&self, x: &Fp2Element) -> Fp2Element {
        let mut acc = Fp2Element::new(self.ell, 0, 0).expect("validated prime");
        for &c in self.coeffs.iter().rev() {
            acc = acc
                .mul(x)
                .add(&Fp2Element::new(self.ell, c as i128, 0).expect("validated prime"));
        }
        acc
    }

    /// Resultant of `self` and `other` via the Euclidean remainder
    /// sequence.
    pub fn resultant(&self, other: &UPoly) -> FpElement {
        let zero = FpElement::new(self.ell, 0).expect("validated prime");
        let one = FpElement::new(self.ell, 1).expect("validated prime");
        fn go(f: &UPoly, g: &UPoly, zero: FpElement, one: FpElement) -> FpElement {
            let ell = f.ell;
            let df = match f.degree() {
                None => return zero,
                Some(d) => d,
            };
            let dg = match g.degree() {
                None => return zero,
                Some(d) => d,
            };
            if dg == 0 {
                return FpElement::new(ell, g.coeffs[0] as i128).unwrap().pow(df as u64);
            }
            let r = f.div_rem(g).1;
            let lc_g = FpElement::new(ell, g.leading().unwrap() as i128).unwrap();
            let dr = r.degree();
            let sign = if (df * dg) % 2 == 1 { true } else { false };
            let inner = match dr {
                None => return zero,
                Some(_) => go(g, &r, zero, one),
            };
            let exp = (df - dr.unwrap()) as u64;
            let mut out = lc_g.pow(exp).mul(&inner);
            if sign {
                out = out.neg();
            }
            out
        }
        go(self, other, zero, one)
    }

    /// Discriminant of a polynomial of the declared degree.
    /// `disc = (-1)^(d(d-1)/2) · res(f, f') / lc(f)`.
    pub fn discriminant(&self, declared_degree: usize) -> Result<FpElement, PolyError> {
        if self.degree() != Some(declared_degree) {
            return Err(PolyError::DegreeMismatch);
        }
        let d = declared_degree;
        let res = self.resultant(&self.derivative());
        let lc = FpElement::new(self.ell, self.leading().unwrap() as i128)?;
        let mut out = res.mul(&lc.inv()?);
        if (d * (d - 1) / 2) % 2 == 1 {
            out = out.neg();
        }
        Ok(out)
    }
}

/// Discriminant entry point with the degree contract made explicit:
/// coefficients ascending, declared degree 3 or 6.
pub fn poly_discriminant(ell: u64, coeffs: &[i128], degree: usize) -> Result<FpElement, PolyError> {
    let p = UPoly::new(ell, coeffs)?;
    p.discriminant(degree)
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        Ok(())
    }
}
