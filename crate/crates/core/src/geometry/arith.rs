//! Integer helpers: factorization, the line-counting function psi, units.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZcapError};

/// Largest supported modulus. Products of two residues then fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

/// One prime-power factor `p^mu` of a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u32,
    pub mu: u32,
}

impl PrimePower {
    pub fn value(&self) -> u32 {
        self.p.pow(self.mu)
    }
}

/// Prime factorization of a modulus `n`, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    n: u32,
    factors: Vec<PrimePower>,
}

impl Factorization {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    /// `Some((p, r))` when `n = p^r` with `r >= 1`.
    pub fn as_prime_power(&self) -> Option<PrimePower> {
        match self.factors.as_slice() {
            [single] => Some(*single),
            _ => None,
        }
    }

    pub fn is_prime(&self) -> bool {
        matches!(self.factors.as_slice(), [PrimePower { mu: 1, .. }])
    }

    /// Smallest prime divisor, `None` for `n = 1`.
    pub fn smallest_prime(&self) -> Option<u32> {
        self.factors.first().map(|f| f.p)
    }
}

/// Trial-division factorization.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(ZcapError::ZeroModulus);
    }
    if n > MAX_MODULUS {
        return Err(ZcapError::ModulusTooLarge(n));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut mu = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                mu += 1;
            }
            factors.push(PrimePower { p: p as u32, mu });
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push(PrimePower { p: rest as u32, mu: 1 });
    }
    Ok(Factorization { n: n as u32, factors })
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `psi(p^r) = (p + 1) p^(r - 1)`, extended multiplicatively; `psi(1) = 1`.
///
/// `psi(n^2)` counts the lines of the plane over `Z_n` and `psi(n)` the lines
/// through one point.
pub fn psi(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(ZcapError::ZeroModulus);
    }
    // m may be a square of a supported modulus, so factor without the modulus cap.
    let mut rest = m;
    let mut value = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut pr = 1u64;
            while rest.is_multiple_of(p) {
                rest /= p;
                pr *= p;
            }
            value *= (p + 1) * (pr / p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        value *= rest + 1;
    }
    Ok(value)
}

/// Units of `Z_n` in increasing order.
pub fn units(n: u32) -> Vec<u32> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&k| gcd(k as u64, n as u64) == 1).collect()
}

/// Exponent of the largest power of `p` dividing `x`, capped at `cap` (`x = 0` gives `cap`).
pub(crate) fn p_valuation(x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut k = 0;
    let mut x = x;
    while k < cap && x.is_multiple_of(p) {
        x /= p;
        k += 1;
    }
    k
}

pub(crate) fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(n as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_small() {
        let f = factorize(12).unwrap();
        assert_eq!(f.factors(), &[PrimePower { p: 2, mu: 2 }, PrimePower { p: 3, mu: 1 }]);
        let f = factorize(625).unwrap();
        assert_eq!(f.factors(), &[PrimePower { p: 5, mu: 4 }]);
        assert!(factorize(1).unwrap().factors().is_empty());
        assert!(matches!(factorize(0), Err(ZcapError::ZeroModulus)));
        assert!(matches!(factorize(MAX_MODULUS + 1), Err(ZcapError::ModulusTooLarge(_))));
    }

    #[test]
    fn factorization_product_matches() {
        for n in 1..2000u64 {
            let f = factorize(n).unwrap();
            let prod: u64 = f.factors().iter().map(|pp| pp.value() as u64).product();
            assert_eq!(prod, n);
            assert!(f.factors().windows(2).all(|w| w[0].p < w[1].p));
        }
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(1).unwrap(), 1);
        assert_eq!(psi(25).unwrap(), 30);
        assert_eq!(psi(4).unwrap(), 6);
        assert_eq!(psi(144).unwrap(), 288);
        assert_eq!(psi(12).unwrap(), 24);
        assert!(psi(0).is_err());
        for n in 1..=100u64 {
            assert!(psi(n * n).unwrap() >= n * n);
        }
    }

    #[test]
    fn psi_is_multiplicative() {
        for a in 1..=1000u64 {
            for b in (1..=1000u64).step_by(7) {
                if gcd(a, b) == 1 {
                    assert_eq!(psi(a * b).unwrap(), psi(a).unwrap() * psi(b).unwrap());
                }
            }
        }
    }

    #[test]
    fn inverse_and_units() {
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 6), None);
        assert_eq!(units(12), vec![1, 5, 7, 11]);
    }
}
