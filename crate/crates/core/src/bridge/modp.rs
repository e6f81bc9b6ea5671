//! Arithmetic modulo word-sized primes, CRT and rational reconstruction.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::coeff::Q;

/// Prime field with elements kept in Montgomery form (`a R mod p`, `R = 2^64`).
/// `value` and the `from_*` constructors convert at the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    pub p: u64,
    /// `-p^{-1} mod 2^64`
    nprime: u64,
    /// `R^2 mod p`
    r2: u64,
    pub one: u64,
}

impl Field {
    pub fn new(p: u64) -> Self {
        assert!(p % 2 == 1 && p < 1 << 62, "modulus must be odd and below 2^62");
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u64;
        let r2 = ((r as u128 * r as u128) % p as u128) as u64;
        let mut f = Field { p, nprime: inv.wrapping_neg(), r2, one: 0 };
        f.one = r;
        f
    }

    #[inline]
    fn redc(self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.nprime);
        let u = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = self.one;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    /// Element for the ordinary residue `x < p`.
    pub fn from_u64(self, x: u64) -> u64 {
        self.mul(x % self.p, self.r2)
    }

    /// Ordinary residue of an element.
    pub fn value(self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub fn from_i64(self, a: i64) -> u64 {
        self.from_u64(a.rem_euclid(self.p as i64) as u64)
    }

    pub fn from_bigint(self, a: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let r = a.mod_floor(&m);
        let (_, digits) = r.to_u64_digits();
        self.from_u64(digits.first().copied().unwrap_or(0))
    }

    /// `None` when the denominator vanishes modulo `p`.
    pub fn from_q(self, x: &Q) -> Option<u64> {
        let d = self.from_bigint(x.denom());
        if d == 0 {
            return None;
        }
        Some(self.mul(self.from_bigint(x.numer()), self.inv(d)))
    }

    /// `a += c * b` on dense vectors.
    #[inline]
    pub fn axpy(self, a: &mut [u64], c: u64, b: &[u64]) {
        if c == 0 {
            return;
        }
        for (x, &y) in a.iter_mut().zip(b) {
            if y != 0 {
                *x = self.add(*x, self.mul(c, y));
            }
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let f = Field::new(n);
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let minus_one = f.neg(f.one);
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = f.pow(f.from_u64(a), d);
        if x == f.one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = f.mul(x, x);
            if x == minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `count` largest primes below `2^62`.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = (1u64 << 62) - 1;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

/// Combine residues `r_i mod p_i` into a residue modulo the product.
pub fn crt(residues: &[u64], moduli: &[u64]) -> (BigInt, BigInt) {
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for (&ri, &pi) in residues.iter().zip(moduli) {
        let f = Field::new(pi);
        // r' = r + m * ((ri - r) / m mod pi)
        let rm = f.from_bigint(&r);
        let mm = f.from_bigint(&m);
        let t = f.mul(f.sub(f.from_u64(ri), rm), f.inv(mm));
        r += &m * BigInt::from(f.value(t));
        m *= BigInt::from(pi);
    }
    (r, m)
}

/// Wang's rational reconstruction: `n/d ≡ a (mod m)` with `|n|, d <= sqrt(m/2)`.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<Q> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let (qt, r2) = r0.div_rem(&r1);
        let t2 = &t0 - &qt * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if r1.gcd(&t1) != BigInt::one() {
        return None;
    }
    let (n, d) = if t1.sign() == Sign::Minus { (-r1, -t1) } else { (r1, t1) };
    Some(Q::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q;

    #[test]
    fn reconstruct_small_fractions() {
        let ps = primes(2);
        for x in [q(3, 2), q(-67, 120), q(0, 1), q(-89, 210), q(12960, 1)] {
            let rs: Vec<u64> = ps
                .iter()
                .map(|&p| {
                    let f = Field::new(p);
                    f.value(f.from_q(&x).unwrap())
                })
                .collect();
            let (a, m) = crt(&rs, &ps);
            assert_eq!(rational_reconstruct(&a, &m), Some(x));
        }
    }

    #[test]
    fn field_inverse() {
        let f = Field::new(primes(1)[0]);
        for a in [1u64, 2, 12345, f.p - 1] {
            let x = f.from_u64(a);
            assert_eq!(f.value(f.mul(x, f.inv(x))), 1);
            assert_eq!(f.value(x), a);
        }
        assert_eq!(f.value(f.from_i64(-1)), f.p - 1);
        assert!(is_prime(f.p));
        assert!(!is_prime(91) && is_prime(97));
    }
}
