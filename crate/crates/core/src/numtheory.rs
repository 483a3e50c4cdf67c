//! Exact integer arithmetic shared by every other module: a linear
//! least-prime-factor sieve, the Mobius function, divisor counts, the
//! Kronecker symbol, and unit-square residue sets.
//!
//! The sieve is built once at startup (bound chosen from the largest
//! coefficient index needed) and is immutable afterwards, so it can be
//! shared freely across worker threads. Everything here is integer-exact;
//! no floating point enters any of these routines.

use crate::error::{Error, Result};

/// Linear sieve storing the least prime factor of every integer up to `bound`.
///
/// Construction is O(bound); factorisations, Mobius values and divisor
/// counts are then O(log n) per query.
pub struct PrimeSieve {
    bound: u64,
    /// least_prime_factor[n] = smallest prime dividing n, for 2 <= n <= bound.
    /// Entries 0 and 1 are unused (set to 0).
    least_prime_factor: Vec<u32>,
    primes: Vec<u32>,
}

impl PrimeSieve {
    /// Build the sieve for all integers up to `bound` (inclusive).
    pub fn new(bound: u64) -> Self {
        assert!(bound >= 2, "sieve bound must be at least 2");
        assert!(
            bound <= u32::MAX as u64,
            "sieve bound {bound} exceeds the desk-scale limit"
        );
        let n = bound as usize;
        let mut lpf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::with_capacity(n / ((64 - n.leading_zeros()) as usize + 1));
        for i in 2..=n {
            if lpf[i] == 0 {
                lpf[i] = i as u32;
                primes.push(i as u32);
            }
            let li = lpf[i] as usize;
            for &p in &primes {
                let p = p as usize;
                if p > li || p * i > n {
                    break;
                }
                lpf[p * i] = p as u32;
            }
        }
        PrimeSieve {
            bound,
            least_prime_factor: lpf,
            primes,
        }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// All primes up to the sieve bound, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    #[inline]
    pub fn least_prime_factor(&self, n: u64) -> u32 {
        debug_assert!(n >= 2 && n <= self.bound);
        self.least_prime_factor[n as usize]
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.bound && self.least_prime_factor[n as usize] as u64 == n
    }

    fn check_range(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.bound {
            return Err(Error::Range(format!(
                "argument {n} outside sieve range 1..={}",
                self.bound
            )));
        }
        Ok(())
    }

    /// Factor `n` into (prime, exponent) pairs, ascending primes.
    pub fn factor(&self, mut n: u64) -> Result<Vec<(u64, u32)>> {
        self.check_range(n)?;
        let mut out = Vec::new();
        while n > 1 {
            let p = self.least_prime_factor[n as usize] as u64;
            let mut e = 0u32;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        Ok(out)
    }

    /// Mobius function mu(n). Computed on demand from the sieve rather than
    /// tabulated; memory belongs to the coefficient table.
    pub fn mobius(&self, mut n: u64) -> Result<i32> {
        self.check_range(n)?;
        let mut k = 0u32;
        while n > 1 {
            let p = self.least_prime_factor[n as usize] as u64;
            n /= p;
            if n.is_multiple_of(p) {
                return Ok(0);
            }
            k += 1;
        }
        Ok(if k.is_multiple_of(2) { 1 } else { -1 })
    }

    /// Number of distinct prime divisors omega(n).
    pub fn omega(&self, mut n: u64) -> Result<u32> {
        self.check_range(n)?;
        let mut k = 0u32;
        while n > 1 {
            let p = self.least_prime_factor[n as usize] as u64;
            while n.is_multiple_of(p) {
                n /= p;
            }
            k += 1;
        }
        Ok(k)
    }

    /// Divisor count d(n).
    pub fn divisor_count(&self, n: u64) -> Result<u64> {
        Ok(self
            .factor(n)?
            .into_iter()
            .map(|(_, e)| e as u64 + 1)
            .product())
    }

    /// True iff n is squarefree.
    pub fn is_squarefree(&self, n: u64) -> Result<bool> {
        Ok(self.mobius(n)? != 0)
    }
}

/// Kronecker symbol (a/n) for arbitrary integers, extended to n >= 0.
///
/// Total function: never panics, returns a value in {-1, 0, 1}. Follows the
/// classical reciprocity reduction (Cohen, *A Course in Computational
/// Algebraic Number Theory*, Algorithm 1.4.10), with the factor-of-two and
/// sign cases handled explicitly.
pub fn kronecker(a: i64, n: u64) -> i32 {
    kronecker_signed(a as i128, n as i128)
}

/// Kronecker symbol over full signed arguments, used internally and by tests.
pub fn kronecker_signed(mut a: i128, mut b: i128) -> i32 {
    if b == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    // (a/2) table indexed by a mod 8: nonzero only for odd a.
    const TAB2: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];
    let mut v = 0u32;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    let mut k = if v.is_multiple_of(2) {
        1
    } else {
        TAB2[a.rem_euclid(8) as usize]
    };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    // Invariant from here on: b odd, b > 0. The symbol (a/b) is then
    // b-periodic in a, so reduce a into [0, b) once and run the ordinary
    // Jacobi reduction with quadratic reciprocity.
    a = a.rem_euclid(b);
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let mut v = 0u32;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            k *= TAB2[(b % 8) as usize];
        }
        if a % 4 == 3 && b % 4 == 3 {
            k = -k;
        }
        let t = b % a;
        b = a;
        a = t;
    }
}

/// The set { nu^2 mod q : gcd(nu, q) = 1 }, ascending.
///
/// For q = 1 everything is congruent to 0, so the result is {0}.
pub fn unit_squares_mod(q: u64) -> Vec<u64> {
    assert!(q >= 1);
    let mut seen = vec![false; q as usize];
    for nu in 0..q {
        if gcd(nu, q) == 1 {
            seen[((nu * nu) % q) as usize] = true;
        }
    }
    (0..q).filter(|&r| seen[r as usize]).collect()
}

/// Euclidean gcd on u64.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// Modular exponentiation with u128 intermediates.
pub fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % modulus as u128) as u64;
        }
        base = (base as u128 * base as u128 % modulus as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Integer square root of a u64 (floor).
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    // float sqrt can be off by one in either direction at this scale
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= n) {
        x += 1;
    }
    x
}

/// Returns Some(sqrt) iff n is a perfect square.
#[inline]
pub fn perfect_sqrt(n: u64) -> Option<u64> {
    // quick mod-64 square filter before the isqrt
    const SQ64: u64 = {
        let mut mask = 0u64;
        let mut i = 0u64;
        while i < 64 {
            mask |= 1 << ((i * i) % 64);
            i += 1;
        }
        mask
    };
    if SQ64 & (1 << (n % 64)) == 0 {
        return None;
    }
    let r = isqrt(n);
    if r * r == n {
        Some(r)
    } else {
        None
    }
}
