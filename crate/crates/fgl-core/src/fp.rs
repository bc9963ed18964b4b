//! Prime fields `F_ℓ` and their quadratic extensions
//! `F_ℓ² = F_ℓ(√n)` for the smallest positive non-residue `n`.
//!
//! Square roots are deterministic: of the two roots the one with the
//! smaller canonical representative in `[0, ℓ)` is returned.

use crate::ring::{is_prime, RingError};
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpElement {
    ell: u64,
    value: u64,
}

impl FpElement {
    pub fn new(ell: u64, value: i128) -> Result<Self, RingError> {
        if ell < 3 || !is_prime(ell) {
            return Err(RingError::NotAnOddPrime(ell));
        }
        Ok(Self::reduce(ell, value))
    }

    fn reduce(ell: u64, value: i128) -> FpElement {
        let m = ell as i128;
        let r = ((value % m) + m) % m;
        FpElement {
            ell,
            value: r as u64,
        }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, o: &FpElement) -> FpElement {
        FpElement::reduce(self.ell, self.value as i128 + o.value as i128)
    }

    pub fn sub(&self, o: &FpElement) -> FpElement {
        FpElement::reduce(self.ell, self.value as i128 - o.value as i128)
    }

    pub fn mul(&self, o: &FpElement) -> FpElement {
        FpElement::reduce(self.ell, self.value as i128 * o.value as i128)
    }

    pub fn neg(&self) -> FpElement {
        FpElement::reduce(self.ell, -(self.value as i128))
    }

    pub fn pow(&self, mut e: u64) -> FpElement {
        let mut base = *self;
        let mut acc = FpElement {
            ell: self.ell,
            value: 1 % self.ell,
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<FpElement, RingError> {
        if self.value == 0 {
            return Err(RingError::NotAUnit);
        }
        Ok(self.pow(self.ell - 2))
    }
}

impl fmt::Display for FpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Legendre symbol of `a` modulo the odd prime `ell`: 1, -1, or 0.
pub fn legendre(ell: u64, a: u64) -> i32 {
    let a = a % ell;
    if a == 0 {
        return 0;
    }
    let e = FpElement { ell, value: a }.pow((ell - 1) / 2);
    if e.value == 1 {
        1
    } else {
        -1
    }
}

/// The smallest positive quadratic non-residue modulo `ell`, which tags
/// the quadratic extension deterministically.
pub fn smallest_nonresidue(ell: u64) -> u64 {
    (2..ell)
        .find(|&n| legendre(ell, n) == -1)
        .expect("every odd prime has a non-residue")
}

/// Deterministic square root in `F_ℓ` (Tonelli-Shanks). `None` when `a`
/// is a non-residue.
pub fn sqrt_in_field(a: &FpElement) -> Option<FpElement> {
    let ell = a.ell;
    if a.value == 0 {
        return Some(*a);
    }
    if legendre(ell, a.value) != 1 {
        return None;
    }
    let root = if ell % 4 == 3 {
        a.pow((ell + 1) / 4)
    } else {
        tonelli_shanks(a)
    };
    let other = root.neg();
    Some(if root.value <= other.value { root } else { other })
}

fn tonelli_shanks(a: &FpElement) -> FpElement {
    let ell = a.ell;
    let s = (ell - 1).trailing_zeros() as u64;
    let q = (ell - 1) >> s;
    let z = FpElement {
        ell,
        value: smallest_nonresidue(ell),
    };
    let mut m = s;
    let mut c = z.pow(q);
    let mut t = a.pow(q);
    let mut r = a.pow((q + 1) / 2);
    while t.value != 1 {
        let mut i = 0u64;
        let mut t2 = t;
        while t2.value != 1 {
            t2 = t2.mul(&t2);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = b.mul(&b);
        }
        m = i;
        c = b.mul(&b);
        t = t.mul(&c);
        r = r.mul(&b);
    }
    r
}

/// `a + b·√n` in `F_ℓ² = F_ℓ[t]/(t² - n)` with `n` the smallest
/// non-residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp2Element {
    ell: u64,
    nonres: u64,
    a: FpElement,
    b: FpElement,
}

impl Fp2Element {
    pub fn new(ell: u64, a: i128, b: i128) -> Result<Self, RingError> {
        let a = FpElement::new(ell, a)?;
        let b = FpElement::new(ell, b)?;
        Ok(Fp2Element {
            ell,
            nonres: smallest_nonresidue(ell),
            a,
            b,
        })
    }

    pub fn from_base(x: &FpElement) -> Self {
        Fp2Element {
            ell: x.ell,
            nonres: smallest_nonresidue(x.ell),
            a: *x,
            b: FpElement {
                ell: x.ell,
                value: 0,
            },
        }
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn nonresidue(&self) -> u64 {
        self.nonres
    }

    pub fn base_part(&self) -> FpElement {
        self.a
    }

    pub fn ext_part(&self) -> FpElement {
        self.b
    }

    pub fn in_base_field(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Fp2Element) -> Fp2Element {
        Fp2Element {
            a: self.a.add(&o.a),
            b: self.b.add(&o.b),
            ..*self
        }
    }

    pub fn sub(&self, o: &Fp2Element) -> Fp2Element {
        Fp2Element {
            a: self.a.sub(&o.a),
            b: self.b.sub(&o.b),
            ..*self
        }
    }

    pub fn mul(&self, o: &Fp2Element) -> Fp2Element {
        // (a + b√n)(c + d√n) = (ac + n·bd) + (ad + bc)√n
        let n = FpElement {
            ell: self.ell,
            value: self.nonres,
        };
        let ac = self.a.mul(&o.a);
        let bd = self.b.mul(&o.b);
        let ad = self.a.mul(&o.b);
        let bc = self.b.mul(&o.a);
        Fp2Element {
            a: ac.add(&n.mul(&bd)),
            b: ad.add(&bc),
            ..*self
        }
    }

    pub fn neg(&self) -> Fp2Element {
        Fp2Element {
            a: self.a.neg(),
            b: self.b.neg(),
            ..*self
        }
    }

    pub fn inv(&self) -> Result<Fp2Element, RingError> {
        // (a + b√n)^-1 = (a - b√n)/(a² - n·b²)
        let n = FpElement {
            ell: self.ell,
            value: self.nonres,
        };
        let norm = self.a.mul(&self.a).sub(&n.mul(&self.b).mul(&self.b));
        let ninv = norm.inv()?;
        Ok(Fp2Element {
            a: self.a.mul(&ninv),
            b: self.b.neg().mul(&ninv),
            ..*self
        })
    }

    /// The ℓ-power Frobenius, i.e. conjugation `b ↦ -b`.
    pub fn frobenius(&self) -> Fp2Element {
        Fp2Element {
            a: self.a,
            b: self.b.neg(),
            ..*self
        }
    }
}

impl fmt::Display for Fp2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.nonres)
        }
    }
}

/// Square root of a base-field element inside `F_ℓ²`. Always exists:
/// either `a` is a residue (root in `F_ℓ`) or `a/n` is (root `s·√n`).
pub fn sqrt_in_fp2(a: &FpElement) -> Fp2Element {
    if let Some(r) = sqrt_in_field(a) {
        return Fp2Element::from_base(&r);
    }
    let n = FpElement {
        ell: a.ell,
        value: smallest_nonresidue(a.ell),
    };
    let quotient = a.mul(&n.inv().expect("nonresidue is a unit"));
    let s = sqrt_in_field(&quotient).expect("a/n is a residue when a is not");
    Fp2Element {
        ell: a.ell,
        nonres: n.value,
        a: FpElement {
            ell: a.ell,
            value: 0,
        },
        b: s,
    }
}
