//! Sparse truncated multivariate power series over `Z/ℓ^N`.
//!
//! A series holds a map from exponent vectors (total degree ≤ cap) to
//! nonzero coefficients. Arithmetic never produces terms beyond the
//! cap: they are discarded by contract, and the cap is carried so
//! consumers know exactly what is certified.
//!
//! Monomials are ordered graded-lexicographically with `Z1 < Z2 < …`:
//! lower total degree first; within a degree, a larger exponent on the
//! earlier variable sorts first. Iteration over a series is always in
//! this order, smallest monomial first, which doubles as the local
//! leading-term order for standard-basis style eliminations.

use crate::ring::{Ring, RingError, Val};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub const MAX_VARS: usize = 8;

/// Per-variable exponents are stored in one byte, so total degree (and
/// with it every cap) is bounded by 255. Large enough for the supported
/// primes: the widest default cap is ℓ² + ℓ = 182 at ℓ = 13.
pub const MAX_CAP: u16 = 255;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    RingMismatch,
    VarArityMismatch { expected: u8, got: u8 },
    NonzeroConstantTerm,
    VarOutOfRange,
    ExponentOverflow,
    NotAUnitSeries,
    NotDivisible,
    Ring(RingError),
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::RingMismatch => write!(f, "series live in different rings"),
            SeriesError::VarArityMismatch { expected, got } => {
                write!(f, "expected {expected} variables, got {got}")
            }
            SeriesError::NonzeroConstantTerm => {
                write!(f, "substitution argument has a nonzero constant term")
            }
            SeriesError::VarOutOfRange => write!(f, "variable index out of range"),
            SeriesError::ExponentOverflow => write!(f, "exponent exceeds the 255 carrier bound"),
            SeriesError::NotAUnitSeries => write!(f, "constant term is not a unit"),
            SeriesError::NotDivisible => write!(f, "exponents are not divisible as requested"),
            SeriesError::Ring(e) => write!(f, "{e}"),
        }
    }
}

impl From<RingError> for SeriesError {
    fn from(e: RingError) -> Self {
        SeriesError::Ring(e)
    }
}

/// Exponent vector packed for graded-lex ordering: total degree in the
/// high bits, then per-variable complements so that a larger exponent
/// on an earlier variable compares smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(u128);

impl Mono {
    pub fn from_exps(exps: &[u16]) -> Result<Mono, SeriesError> {
        if exps.len() > MAX_VARS {
            return Err(SeriesError::VarOutOfRange);
        }
        let mut deg: u32 = 0;
        let mut low: u64 = 0;
        for (i, &e) in exps.iter().enumerate() {
            if e > 255 {
                return Err(SeriesError::ExponentOverflow);
            }
            deg += e as u32;
            low |= ((255 - e) as u64) << (8 * (MAX_VARS - 1 - i));
        }
        for i in exps.len()..MAX_VARS {
            low |= 255u64 << (8 * (MAX_VARS - 1 - i));
        }
        if deg > u16::MAX as u32 {
            return Err(SeriesError::ExponentOverflow);
        }
        Ok(Mono(((deg as u128) << 64) | low as u128))
    }

    pub fn one() -> Mono {
        Mono::from_exps(&[]).expect("empty exponent vector")
    }

    pub fn var(i: usize) -> Result<Mono, SeriesError> {
        if i >= MAX_VARS {
            return Err(SeriesError::VarOutOfRange);
        }
        let mut e = [0u16; MAX_VARS];
        e[i] = 1;
        Mono::from_exps(&e)
    }

    pub fn degree(&self) -> u16 {
        ((self.0 >> 64) & 0xFFFF) as u16
    }

    pub fn exp(&self, i: usize) -> u16 {
        debug_assert!(i < MAX_VARS);
        let byte = ((self.0 as u64) >> (8 * (MAX_VARS - 1 - i))) & 0xFF;
        255 - byte as u16
    }

    pub fn exps(&self, nvars: u8) -> Vec<u16> {
        (0..nvars as usize).map(|i| self.exp(i)).collect()
    }

    pub fn try_mul(&self, other: &Mono) -> Result<Mono, SeriesError> {
        let mut e = [0u16; MAX_VARS];
        for (i, slot) in e.iter_mut().enumerate() {
            let s = self.exp(i) + other.exp(i);
            if s > 255 {
                return Err(SeriesError::ExponentOverflow);
            }
            *slot = s;
        }
        Mono::from_exps(&e)
    }

    /// Quotient monomial, if `other` divides `self` componentwise.
    pub fn try_div(&self, other: &Mono) -> Option<Mono> {
        let mut e = [0u16; MAX_VARS];
        for (i, slot) in e.iter_mut().enumerate() {
            let (a, b) = (self.exp(i), other.exp(i));
            if b > a {
                return None;
            }
            *slot = a - b;
        }
        Some(Mono::from_exps(&e).expect("componentwise difference fits"))
    }

    fn render(&self, nvars: u8) -> String {
        use alloc::format;
        if self.degree() == 0 {
            return String::from("1");
        }
        let mut out = String::new();
        for i in 0..nvars as usize {
            let e = self.exp(i);
            if e == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push('*');
            }
            if e == 1 {
                out += &format!("Z{}", i + 1);
            } else {
                out += &format!("Z{}^{}", i + 1, e);
            }
        }
        out
    }
}

/// Sparse truncated power series: exponent vector → nonzero
/// coefficient, total degree capped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ring: Ring,
    nvars: u8,
    cap: u16,
    terms: alloc::collections::BTreeMap<Mono, u128>,
}

impl TruncatedSeries {
    pub fn zero(ring: Ring, nvars: u8, cap: u16) -> TruncatedSeries {
        assert!(nvars as usize <= MAX_VARS, "at most {MAX_VARS} variables");
        assert!(
            cap <= MAX_CAP,
            "total-degree cap limited to {MAX_CAP} by the exponent carrier"
        );
        TruncatedSeries {
            ring,
            nvars,
            cap,
            terms: alloc::collections::BTreeMap::new(),
        }
    }

    pub fn constant(ring: Ring, nvars: u8, cap: u16, c: i128) -> TruncatedSeries {
        let mut s = TruncatedSeries::zero(ring, nvars, cap);
        s.set(Mono::one(), ring.reduce_i128(c));
        s
    }

    /// The bare variable `Z_{i+1}`.
    pub fn var(ring: Ring, nvars: u8, cap: u16, i: usize) -> Result<TruncatedSeries, SeriesError> {
        if i >= nvars as usize {
            return Err(SeriesError::VarOutOfRange);
        }
        let mut s = TruncatedSeries::zero(ring, nvars, cap);
        if cap >= 1 {
            s.set(Mono::var(i)?, 1);
        }
        Ok(s)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn nvars(&self) -> u8 {
        self.nvars
    }

    pub fn cap(&self) -> u16 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lex order, smallest monomial first.
    pub fn iter(&self) -> impl Iterator<Item = (&Mono, &u128)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> u128 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn coeff_of_exps(&self, exps: &[u16]) -> u128 {
        match Mono::from_exps(exps) {
            Ok(m) => self.coeff(&m),
            Err(_) => 0,
        }
    }

    /// Smallest monomial (the local leading term) with its coefficient.
    pub fn leading(&self) -> Option<(Mono, u128)> {
        self.terms.iter().next().map(|(m, c)| (*m, *c))
    }

    pub fn constant_term(&self) -> u128 {
        self.coeff(&Mono::one())
    }

    /// Lowest total degree among stored terms.
    pub fn min_degree(&self) -> Option<u16> {
        self.leading().map(|(m, _)| m.degree())
    }

    pub fn set(&mut self, m: Mono, value: u128) {
        let v = self.ring.reduce_u128(value);
        if m.degree() > self.cap {
            return;
        }
        if v == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    pub fn add_assign_term(&mut self, m: Mono, value: u128) {
        if m.degree() > self.cap {
            return;
        }
        let cur = self.coeff(&m);
        self.set(m, self.ring.add(cur, self.ring.reduce_u128(value)));
    }

    pub fn set_exps(&mut self, exps: &[u16], value: i128) -> Result<(), SeriesError> {
        let m = Mono::from_exps(exps)?;
        self.set(m, self.ring.reduce_i128(value));
        Ok(())
    }

    fn check_compat(&self, o: &TruncatedSeries) -> Result<(), SeriesError> {
        if self.ring != o.ring {
            return Err(SeriesError::RingMismatch);
        }
        if self.nvars != o.nvars {
            return Err(SeriesError::VarArityMismatch {
                expected: self.nvars,
                got: o.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, o: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.check_compat(o)?;
        let cap = self.cap.min(o.cap);
        let mut out = TruncatedSeries::zero(self.ring, self.nvars, cap);
        out.terms = self.terms.clone();
        out.terms.retain(|m, _| m.degree() <= cap);
        for (m, c) in o.terms.iter() {
            if m.degree() <= cap {
                out.add_assign_term(*m, *c);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, o: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> TruncatedSeries {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.ring.neg(*c);
        }
        out
    }

    pub fn scale(&self, k: i128) -> TruncatedSeries {
        let k = self.ring.reduce_i128(k);
        let mut out = TruncatedSeries::zero(self.ring, self.nvars, self.cap);
        for (m, c) in self.terms.iter() {
            out.set(*m, self.ring.mul(*c, k));
        }
        out
    }

    pub fn mul(&self, o: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        self.check_compat(o)?;
        let cap = self.cap.min(o.cap);
        let mut acc = DenseAcc::new(self.ring, self.nvars, cap);
        let (small, big) = if self.terms.len() <= o.terms.len() {
            (self, o)
        } else {
            (o, self)
        };
        for (ma, ca) in small.terms.iter() {
            let da = ma.degree();
            if da > cap {
                continue;
            }
            for (mb, cb) in big.terms.iter() {
                if da + mb.degree() > cap {
                    break; // graded order: all further terms are bigger
                }
                let m = ma.try_mul(mb).expect("degree bounded by cap");
                acc.add(&m, self.ring.mul(*ca, *cb));
            }
        }
        Ok(acc.into_series())
    }

    /// Multiply by a single term.
    pub fn mul_term(&self, m: &Mono, c: u128) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.ring, self.nvars, self.cap);
        if c == 0 {
            return out;
        }
        for (ma, ca) in self.terms.iter() {
            if ma.degree() + m.degree() > self.cap {
                break;
            }
            let prod = ma.try_mul(m).expect("degree bounded by cap");
            out.set(prod, self.ring.mul(*ca, c));
        }
        out
    }

    pub fn truncate(&self, cap: u16) -> TruncatedSeries {
        let mut out = self.clone();
        out.cap = cap.min(self.cap);
        out.terms.retain(|m, _| m.degree() <= out.cap);
        out
    }

    /// Coefficientwise reduction into `F_ℓ`; cap preserved.
    pub fn reduce_mod_ell(&self) -> TruncatedSeries {
        let target = self.ring.reduced();
        self.map_ring(target)
    }

    /// Canonical coefficient map into another precision of the same
    /// prime (reduction, or lift by the canonical representative).
    pub fn map_ring(&self, target: Ring) -> TruncatedSeries {
        assert_eq!(target.ell(), self.ring.ell(), "same prime required");
        let mut out = TruncatedSeries::zero(target, self.nvars, self.cap);
        for (m, c) in self.terms.iter() {
            out.set(*m, target.reduce_u128(*c));
        }
        out
    }

    /// Exact substitution: `self` in `m` variables composed with `m`
    /// argument series in a common variable set, all without constant
    /// term. The result cap is the minimum of all caps involved.
    pub fn substitute(&self, args: &[TruncatedSeries]) -> Result<TruncatedSeries, SeriesError> {
        if args.len() != self.nvars as usize {
            return Err(SeriesError::VarArityMismatch {
                expected: self.nvars,
                got: args.len() as u8,
            });
        }
        let out_vars = match args.first() {
            None => return Ok(TruncatedSeries::constant(self.ring, 0, self.cap, self.constant_term() as i128)),
            Some(a) => a.nvars,
        };
        let mut cap = self.cap;
        for a in args {
            if a.ring != self.ring {
                return Err(SeriesError::RingMismatch);
            }
            if a.nvars != out_vars {
                return Err(SeriesError::VarArityMismatch {
                    expected: out_vars,
                    got: a.nvars,
                });
            }
            if a.constant_term() != 0 {
                return Err(SeriesError::NonzeroConstantTerm);
            }
            cap = cap.min(a.cap);
        }

        // Identity arguments (a bare variable with coefficient 1) are
        // relabelings; only genuine series go through power tables.
        let mut identity_map: Vec<Option<usize>> = Vec::with_capacity(args.len());
        let mut general_idx: Vec<usize> = Vec::new();
        for a in args {
            if let Some(j) = a.as_identity() {
                identity_map.push(Some(j));
            } else {
                identity_map.push(None);
                general_idx.push(identity_map.len() - 1);
            }
        }

        // Group the monomials of self by their exponents on the general
        // arguments; the identity part becomes a polynomial in the
        // output variables.
        let mut groups: alloc::collections::BTreeMap<Mono, TruncatedSeries> =
            alloc::collections::BTreeMap::new();
        let mut max_exp = vec![0u16; args.len()];
        for (m, c) in self.terms.iter() {
            if m.degree() > cap {
                continue;
            }
            let mut gen_exps = [0u16; MAX_VARS];
            let mut id_exps = [0u16; MAX_VARS];
            for i in 0..self.nvars as usize {
                let e = m.exp(i);
                match identity_map[i] {
                    Some(j) => id_exps[j] += e,
                    None => {
                        let slot = general_idx.iter().position(|&g| g == i).unwrap();
                        gen_exps[slot] = e;
                        max_exp[i] = max_exp[i].max(e);
                    }
                }
            }
            let gkey = Mono::from_exps(&gen_exps)?;
            let iexp = Mono::from_exps(&id_exps[..out_vars as usize])?;
            groups
                .entry(gkey)
                .or_insert_with(|| TruncatedSeries::zero(self.ring, out_vars, cap))
                .add_assign_term(iexp, *c);
        }

        // Power tables for the general arguments.
        let mut tables: Vec<Vec<TruncatedSeries>> = Vec::new();
        for &i in &general_idx {
            let a = args[i].truncate(cap);
            let mut powers = vec![TruncatedSeries::constant(self.ring, out_vars, cap, 1)];
            for k in 1..=max_exp[i] {
                let next = powers[(k - 1) as usize].mul(&a)?;
                if next.is_zero() {
                    // all higher powers vanish beneath the cap too
                    powers.push(next);
                    break;
                }
                powers.push(next);
            }
            tables.push(powers);
        }

        let mut acc = DenseAcc::new(self.ring, out_vars, cap);
        for (gkey, poly) in groups.iter() {
            // product of the general argument powers for this group
            let mut prod: Option<TruncatedSeries> = None;
            let mut vanished = false;
            for (slot, _) in general_idx.iter().enumerate() {
                let e = gkey.exp(slot);
                if e == 0 {
                    continue;
                }
                let table = &tables[slot];
                if (e as usize) >= table.len() {
                    vanished = true; // power collapsed below the cap
                    break;
                }
                let p = &table[e as usize];
                if p.is_zero() {
                    vanished = true;
                    break;
                }
                prod = Some(match prod {
                    None => p.clone(),
                    Some(q) => q.mul(p)?,
                });
            }
            if vanished {
                continue;
            }
            match prod {
                None => {
                    for (m, c) in poly.terms.iter() {
                        acc.add(m, *c);
                    }
                }
                Some(p) => {
                    for (mp, cp) in poly.terms.iter() {
                        for (mq, cq) in p.terms.iter() {
                            if mp.degree() + mq.degree() > cap {
                                break;
                            }
                            let m = mp.try_mul(mq).expect("bounded");
                            acc.add(&m, self.ring.mul(*cp, *cq));
                        }
                    }
                }
            }
        }
        Ok(acc.into_series())
    }

    /// `Some(j)` when the series is exactly the variable `Z_{j+1}`.
    fn as_identity(&self) -> Option<usize> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        if *c != 1 || m.degree() != 1 {
            return None;
        }
        (0..self.nvars as usize).find(|&i| m.exp(i) == 1)
    }

    /// Change the cap without losing the ring/arity; terms above the
    /// new cap are dropped.
    pub fn with_cap(&self, cap: u16) -> TruncatedSeries {
        let mut out = self.clone();
        out.cap = cap;
        out.terms.retain(|m, _| m.degree() <= cap);
        out
    }

    /// Inverse of a series with unit constant term, by Newton iteration
    /// with degree doubling: if `f·h ≡ 1` through total degree `k`, then
    /// `h·(2 - f·h)` matches through degree `2k + 1`.
    pub fn inv_unit(&self) -> Result<TruncatedSeries, SeriesError> {
        let c0 = self.constant_term();
        let c0_inv = self.ring.inv(c0).map_err(|_| SeriesError::NotAUnitSeries)?;
        let mut h = TruncatedSeries::zero(self.ring, self.nvars, 0);
        h.set(Mono::one(), c0_inv);
        let mut good: u16 = 0;
        while good < self.cap {
            good = (2 * good + 1).min(self.cap);
            let f_t = self.with_cap(good);
            let h_t = h.with_cap(good);
            let fh = f_t.mul(&h_t)?;
            let two_minus = TruncatedSeries::constant(self.ring, self.nvars, good, 2).sub(&fh)?;
            h = h_t.mul(&two_minus)?;
        }
        Ok(h.with_cap(self.cap))
    }

    /// Divide every exponent vector componentwise by `k`; fails unless
    /// all stored exponents are divisible. Cap scales down accordingly.
    pub fn divide_exponents(&self, k: u16) -> Result<TruncatedSeries, SeriesError> {
        assert!(k > 0);
        let mut out = TruncatedSeries::zero(self.ring, self.nvars, self.cap / k);
        for (m, c) in self.terms.iter() {
            let mut e = [0u16; MAX_VARS];
            for (i, slot) in e.iter_mut().enumerate() {
                let x = m.exp(i);
                if x % k != 0 {
                    return Err(SeriesError::NotDivisible);
                }
                *slot = x / k;
            }
            out.set(Mono::from_exps(&e)?, *c);
        }
        Ok(out)
    }

    /// Relabel variables: `map[i]` is the output index of input
    /// variable `i`. Output arity `out_vars`.
    pub fn relabel(&self, map: &[usize], out_vars: u8) -> Result<TruncatedSeries, SeriesError> {
        if map.len() != self.nvars as usize {
            return Err(SeriesError::VarArityMismatch {
                expected: self.nvars,
                got: map.len() as u8,
            });
        }
        let mut out = TruncatedSeries::zero(self.ring, out_vars, self.cap);
        for (m, c) in self.terms.iter() {
            let mut e = [0u16; MAX_VARS];
            for (i, &j) in map.iter().enumerate() {
                if j >= out_vars as usize {
                    return Err(SeriesError::VarOutOfRange);
                }
                e[j] += m.exp(i);
            }
            out.add_assign_term(Mono::from_exps(&e[..out_vars as usize])?, *c);
        }
        Ok(out)
    }

    /// Set selected variables to zero (drop every term using them).
    pub fn kill_vars(&self, vars: &[usize]) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.ring, self.nvars, self.cap);
        'term: for (m, c) in self.terms.iter() {
            for &v in vars {
                if m.exp(v) > 0 {
                    continue 'term;
                }
            }
            out.set(*m, *c);
        }
        out
    }

    /// Evaluate at a point with coordinates of positive valuation.
    pub fn eval(&self, point: &[u128]) -> Result<u128, SeriesError> {
        if point.len() != self.nvars as usize {
            return Err(SeriesError::VarArityMismatch {
                expected: self.nvars,
                got: point.len() as u8,
            });
        }
        // power tables per coordinate
        let mut tables: Vec<Vec<u128>> = Vec::with_capacity(point.len());
        for &x in point {
            let mut t = vec![1u128];
            for k in 1..=self.cap as usize {
                let prev = t[k - 1];
                t.push(self.ring.mul(prev, self.ring.reduce_u128(x)));
            }
            tables.push(t);
        }
        let mut acc = 0u128;
        for (m, c) in self.terms.iter() {
            let mut term = *c;
            for (i, table) in tables.iter().enumerate() {
                let e = m.exp(i) as usize;
                if e > 0 {
                    term = self.ring.mul(term, table[e]);
                }
            }
            acc = self.ring.add(acc, term);
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Result<TruncatedSeries, SeriesError> {
        if i >= self.nvars as usize {
            return Err(SeriesError::VarOutOfRange);
        }
        let mut out = TruncatedSeries::zero(self.ring, self.nvars, self.cap);
        for (m, c) in self.terms.iter() {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let mut exps = [0u16; MAX_VARS];
            for (j, slot) in exps.iter_mut().enumerate() {
                *slot = m.exp(j);
            }
            exps[i] -= 1;
            let dm = Mono::from_exps(&exps)?;
            out.add_assign_term(dm, self.ring.mul(*c, e as u128));
        }
        Ok(out)
    }

    /// Minimum coefficient valuation across all terms (`AtLeast(prec)`
    /// for the zero series).
    pub fn min_val(&self) -> Val {
        let mut best: Option<u32> = None;
        for c in self.terms.values() {
            if let Val::Exact(v) = self.ring.val(*c) {
                best = Some(best.map_or(v, |b| b.min(v)));
                if v == 0 {
                    break;
                }
            }
        }
        match best {
            Some(v) => Val::Exact(v),
            None => Val::AtLeast(self.ring.prec()),
        }
    }

    pub fn render(&self) -> String {
        use alloc::format;
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                out += " + ";
            }
            if m.degree() == 0 {
                out += &format!("{c}");
            } else if *c == 1 {
                out += &m.render(self.nvars);
            } else {
                out += &format!("{c}*{}", m.render(self.nvars));
            }
        }
        out
    }

    pub fn render_monomial(&self, m: &Mono) -> String {
        m.render(self.nvars)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Accumulator for products: a flat box-indexed buffer when the
/// exponent box is small, otherwise a plain map. Bounds every product
/// to the cap before touching memory.
enum AccRepr {
    Box {
        stride: usize,
        data: Vec<u128>,
        touched: Vec<u32>,
    },
    Map(alloc::collections::BTreeMap<Mono, u128>),
}

pub struct DenseAcc {
    ring: Ring,
    nvars: u8,
    cap: u16,
    repr: AccRepr,
}

const BOX_LIMIT: usize = 4_000_000;

impl DenseAcc {
    pub fn new(ring: Ring, nvars: u8, cap: u16) -> DenseAcc {
        let stride = cap as usize + 1;
        let size = stride.checked_pow(nvars as u32).unwrap_or(usize::MAX);
        let repr = if nvars >= 1 && size <= BOX_LIMIT {
            AccRepr::Box {
                stride,
                data: vec![0u128; size],
                touched: Vec::new(),
            }
        } else {
            AccRepr::Map(alloc::collections::BTreeMap::new())
        };
        DenseAcc {
            ring,
            nvars,
            cap,
            repr,
        }
    }

    #[inline]
    pub fn add(&mut self, m: &Mono, c: u128) {
        if c == 0 || m.degree() > self.cap {
            return;
        }
        match &mut self.repr {
            AccRepr::Box {
                stride,
                data,
                touched,
            } => {
                let stride = *stride;
                let mut idx = 0usize;
                for i in 0..self.nvars as usize {
                    idx = idx * stride + m.exp(i) as usize;
                }
                if data[idx] == 0 {
                    touched.push(idx as u32);
                }
                data[idx] = self.ring.add(data[idx], c);
            }
            AccRepr::Map(map) => {
                let entry = map.entry(*m).or_insert(0);
                *entry = self.ring.add(*entry, c);
            }
        }
    }

    pub fn into_series(self) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.ring, self.nvars, self.cap);
        match self.repr {
            AccRepr::Box {
                stride,
                data,
                mut touched,
            } => {
                touched.sort_unstable();
                touched.dedup();
                let mut exps = [0u16; MAX_VARS];
                for idx in touched {
                    let c = data[idx as usize];
                    if c == 0 {
                        continue;
                    }
                    let mut rest = idx as usize;
                    for i in (0..self.nvars as usize).rev() {
                        exps[i] = (rest % stride) as u16;
                        rest /= stride;
                    }
                    let m = Mono::from_exps(&exps[..self.nvars as usize])
                        .expect("exponents below cap");
                    out.set(m, c);
                }
            }
            AccRepr::Map(map) => {
                for (m, c) in map {
                    out.set(m, c);
                }
            }
        }
        out
    }
}
