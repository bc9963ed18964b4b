//! Coefficient rings `Z/ℓ^N` with precision-aware valuations.
//!
//! Every series coefficient in this crate lives in `Z/ℓ^N` for an odd
//! prime `ℓ > 2` and a positive precision `N`. The residue field `F_ℓ`
//! is the special case `N = 1`. Residues are kept reduced in
//! `[0, ℓ^N)`; a residue of zero has valuation "at least N", never a
//! definite number, so truncation is never mistaken for an exact zero.

use alloc::string::String;
use core::fmt;

/// Default working precision: large enough for the `ℓ⁴` congruence
/// layers plus Hensel iterations with margin.
pub const DEFAULT_PRECISION: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingError {
    NotAnOddPrime(u64),
    ZeroPrecision,
    ModulusOverflow { ell: u64, prec: u32 },
    RingMismatch,
    NotAUnit,
    ValuationTooSmall { needed: u32 },
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::NotAnOddPrime(l) => write!(f, "{l} is not an odd prime > 2"),
            RingError::ZeroPrecision => write!(f, "precision must be positive"),
            RingError::ModulusOverflow { ell, prec } => {
                write!(f, "{ell}^{prec} does not fit in the 128-bit carrier")
            }
            RingError::RingMismatch => write!(f, "operands live in different rings"),
            RingError::NotAUnit => write!(f, "element is not a unit"),
            RingError::ValuationTooSmall { needed } => {
                write!(f, "element is not divisible by ell^{needed}")
            }
        }
    }
}

/// Deterministic primality check, exact for all `u64` inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // Miller-Rabin with a base set proven sufficient for u64.
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'base: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    acc
}

/// The ring `Z/ℓ^prec` for an odd prime `ℓ`. `prec = 1` is the residue
/// field `F_ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ring {
    ell: u64,
    prec: u32,
    modulus: u128,
}

impl Ring {
    pub fn new(ell: u64, prec: u32) -> Result<Self, RingError> {
        if ell <= 2 || !is_prime(ell) {
            return Err(RingError::NotAnOddPrime(ell));
        }
        if prec == 0 {
            return Err(RingError::ZeroPrecision);
        }
        let mut modulus: u128 = 1;
        for _ in 0..prec {
            modulus = modulus
                .checked_mul(ell as u128)
                .ok_or(RingError::ModulusOverflow { ell, prec })?;
        }
        Ok(Ring { ell, prec, modulus })
    }

    /// The residue field `F_ℓ`.
    pub fn residue_field(ell: u64) -> Result<Self, RingError> {
        Ring::new(ell, 1)
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn is_field(&self) -> bool {
        self.prec == 1
    }

    /// Same prime, precision 1.
    pub fn reduced(&self) -> Ring {
        Ring::new(self.ell, 1).expect("prime already validated")
    }

    /// Same prime, different precision.
    pub fn with_prec(&self, prec: u32) -> Result<Ring, RingError> {
        Ring::new(self.ell, prec)
    }

    pub fn reduce_i128(&self, x: i128) -> u128 {
        let m = self.modulus as i128;
        // modulus <= 2^127 so the arithmetic below cannot overflow
        let r = x % m;
        if r < 0 {
            (r + m) as u128
        } else {
            r as u128
        }
    }

    pub fn reduce_u128(&self, x: u128) -> u128 {
        x % self.modulus
    }

    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b; // both < modulus <= 2^127, no overflow
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + (self.modulus - b)
        }
    }

    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    pub fn mul(&self, a: u128, b: u128) -> u128 {
        match a.checked_mul(b) {
            Some(p) => p % self.modulus,
            None => mul_mod_u128(a, b, self.modulus),
        }
    }

    pub fn pow(&self, mut b: u128, mut e: u64) -> u128 {
        let mut acc = 1u128 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit (valuation zero) element.
    pub fn inv(&self, a: u128) -> Result<u128, RingError> {
        if a == 0 || a % self.ell as u128 == 0 {
            return Err(RingError::NotAUnit);
        }
        // extended Euclid on signed 128-bit; all intermediates are
        // bounded by the modulus < 2^127
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_i128(t0))
    }

    /// ℓ-adic valuation of a residue: `Exact(v)` with `v < prec` for a
    /// nonzero residue, `AtLeast(prec)` for zero.
    pub fn val(&self, a: u128) -> Val {
        if a == 0 {
            return Val::AtLeast(self.prec);
        }
        let ell = self.ell as u128;
        let mut v = 0;
        let mut x = a;
        while x % ell == 0 {
            x /= ell;
            v += 1;
        }
        Val::Exact(v)
    }

    /// Exact division by `ℓ^k`. The result is only determined modulo
    /// `ℓ^(prec-k)`; the canonical representative is returned and the
    /// caller is responsible for tracking the reduced precision.
    pub fn div_pow_ell(&self, a: u128, k: u32) -> Result<u128, RingError> {
        if k == 0 {
            return Ok(a);
        }
        let d = self.pow_ell(k);
        if a % d != 0 {
            return Err(RingError::ValuationTooSmall { needed: k });
        }
        Ok(a / d)
    }

    pub fn pow_ell(&self, k: u32) -> u128 {
        let mut p = 1u128;
        for _ in 0..k {
            p *= self.ell as u128;
        }
        p
    }

    pub fn coeff(&self, x: i128) -> PadicCoeff {
        PadicCoeff {
            ring: *self,
            residue: self.reduce_i128(x),
        }
    }

    pub fn coeff_u128(&self, x: u128) -> PadicCoeff {
        PadicCoeff {
            ring: *self,
            residue: self.reduce_u128(x),
        }
    }

    pub fn label(&self) -> String {
        use alloc::format;
        if self.is_field() {
            format!("F_{}", self.ell)
        } else {
            format!("Z/{}^{}", self.ell, self.prec)
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Overflow-safe `a*b mod m` for `m < 2^127` via binary splitting.
/// Only reached when the operand product exceeds 128 bits, which never
/// happens for moduli below 2^64.
fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let (mut a, mut b) = if a < b { (b, a) } else { (a, b) };
    a %= m;
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc += a;
            if acc >= m {
                acc -= m;
            }
        }
        b >>= 1;
        if b > 0 {
            a += a;
            if a >= m {
                a -= m;
            }
        }
    }
    acc
}

/// A valuation that may exceed the working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Val {
    Exact(u32),
    /// The residue is zero: the valuation is at least the stated
    /// precision ("⊥" in reports). It is never reported as equal to it.
    AtLeast(u32),
}

impl Val {
    pub fn exact(&self) -> Option<u32> {
        match self {
            Val::Exact(v) => Some(*v),
            Val::AtLeast(_) => None,
        }
    }

    pub fn is_at_least(&self, k: u32) -> bool {
        match self {
            Val::Exact(v) => *v >= k,
            Val::AtLeast(n) => *n >= k,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Exact(v) => write!(f, "{v}"),
            Val::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

/// An element of `Z/ℓ^N` carrying its ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicCoeff {
    ring: Ring,
    residue: u128,
}

impl PadicCoeff {
    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn residue(&self) -> u128 {
        self.residue
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn val(&self) -> Val {
        self.ring.val(self.residue)
    }

    pub fn add(&self, other: &PadicCoeff) -> Result<PadicCoeff, RingError> {
        self.same_ring(other)?;
        Ok(PadicCoeff {
            ring: self.ring,
            residue: self.ring.add(self.residue, other.residue),
        })
    }

    pub fn sub(&self, other: &PadicCoeff) -> Result<PadicCoeff, RingError> {
        self.same_ring(other)?;
        Ok(PadicCoeff {
            ring: self.ring,
            residue: self.ring.sub(self.residue, other.residue),
        })
    }

    pub fn mul(&self, other: &PadicCoeff) -> Result<PadicCoeff, RingError> {
        self.same_ring(other)?;
        Ok(PadicCoeff {
            ring: self.ring,
            residue: self.ring.mul(self.residue, other.residue),
        })
    }

    pub fn neg(&self) -> PadicCoeff {
        PadicCoeff {
            ring: self.ring,
            residue: self.ring.neg(self.residue),
        }
    }

    pub fn inv(&self) -> Result<PadicCoeff, RingError> {
        Ok(PadicCoeff {
            ring: self.ring,
            residue: self.ring.inv(self.residue)?,
        })
    }

    /// Divide by `ℓ^k`, lowering the carried precision accordingly.
    pub fn div_pow_ell(&self, k: u32) -> Result<PadicCoeff, RingError> {
        if k >= self.ring.prec() {
            return Err(RingError::ValuationTooSmall { needed: k });
        }
        let q = self.ring.div_pow_ell(self.residue, k)?;
        let ring = self.ring.with_prec(self.ring.prec() - k)?;
        Ok(PadicCoeff {
            ring,
            residue: ring.reduce_u128(q),
        })
    }

    /// Canonical reduction into a lower precision.
    pub fn truncate(&self, prec: u32) -> Result<PadicCoeff, RingError> {
        let ring = self.ring.with_prec(prec)?;
        Ok(PadicCoeff {
            ring,
            residue: ring.reduce_u128(self.residue),
        })
    }

    fn same_ring(&self, other: &PadicCoeff) -> Result<(), RingError> {
        if self.ring != other.ring {
            return Err(RingError::RingMismatch);
        }
        Ok(())
    }
}

impl fmt::Display for PadicCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.ring.ell, self.ring.prec)
    }
}
