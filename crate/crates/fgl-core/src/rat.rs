//! Small exact rationals for Newton-polygon slopes and valuation
//! reports. Numerators and denominators stay tiny (degrees times
//! precisions), so `i64` carriers with `i128` cross-multiplication are
//! ample.

use core::cmp::Ordering;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i64,
    den: i64, // > 0
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rat {
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Rat {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn integer(n: i64) -> Rat {
        Rat { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn neg(&self) -> Rat {
        Rat {
            num: -self.num,
            den: self.den,
        }
    }

    pub fn add(&self, o: &Rat) -> Rat {
        Rat::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    pub fn sub(&self, o: &Rat) -> Rat {
        Rat::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }

    pub fn mul(&self, o: &Rat) -> Rat {
        Rat::new(self.num * o.num, self.den * o.den)
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_sign_and_gcd() {
        assert_eq!(Rat::new(2, -4), Rat::new(-1, 2));
        assert_eq!(Rat::new(0, -7), Rat::integer(0));
        assert_eq!(Rat::new(24, 24), Rat::integer(1));
    }

    #[test]
    fn ordering_is_exact() {
        assert!(Rat::new(-1, 24) > Rat::new(-1, 23));
        assert!(Rat::new(1, 3) < Rat::new(2, 5));
        assert_eq!(Rat::new(3, 9), Rat::new(1, 3));
    }

    #[test]
    fn arithmetic() {
        let a = Rat::new(1, 24);
        assert_eq!(a.add(&a), Rat::new(1, 12));
        assert_eq!(a.sub(&a), Rat::integer(0));
        assert_eq!(a.mul(&Rat::integer(24)), Rat::integer(1));
    }
}
