//! Heegner discriminants and representation counts.
//!
//! The working set consists of the odd fundamental discriminants d < 0 that
//! are congruent to a square of a unit mod 4N. Membership is decided by the
//! residue-set test for every N, even or odd; the quadratic-character
//! detection identity (valid for odd N) is kept as a tested cross-check
//! only. Representation counts r_d and r'_d are computed by direct lattice
//! enumeration over |v| <= 2 sqrt(n/|d|), never tabulated.

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::numtheory::{gcd, kronecker, perfect_sqrt, unit_squares_mod, PrimeSieve};
use std::f64::consts::PI;

/// The unit squares mod 4N, with a square-root witness for each class.
#[derive(Debug, Clone)]
pub struct ResidueSet {
    conductor: u64,
    modulus: u64, // 4N
    /// membership bitmap indexed by residue mod 4N
    member: Vec<bool>,
    /// ascending list of residues
    residues: Vec<u64>,
    /// witness[r] = smallest nu with nu^2 = r (mod 4N), gcd(nu, 4N) = 1
    witness: Vec<u64>,
}

impl ResidueSet {
    pub fn new(conductor: u64) -> Self {
        let modulus = 4 * conductor;
        let residues = unit_squares_mod(modulus);
        let mut member = vec![false; modulus as usize];
        let mut witness = vec![0u64; modulus as usize];
        for r in &residues {
            member[*r as usize] = true;
        }
        for nu in (0..modulus).rev() {
            if gcd(nu, modulus) == 1 {
                witness[((nu * nu) % modulus) as usize] = nu;
            }
        }
        ResidueSet {
            conductor,
            modulus,
            member,
            residues,
            witness,
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn cardinality(&self) -> u64 {
        self.residues.len() as u64
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// The 4N-periodic congruence test: does d < 0 lie in D' ?
    #[inline]
    pub fn contains(&self, d: i64) -> bool {
        debug_assert!(d < 0);
        self.member[d.rem_euclid(self.modulus as i64) as usize]
    }

    /// Witness nu with nu^2 = d (mod 4N), for d in D'.
    pub fn witness_for(&self, d: i64) -> u64 {
        self.witness[d.rem_euclid(self.modulus as i64) as usize]
    }
}

/// One Heegner discriminant with its congruence witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeegnerDiscriminant {
    pub d: i64,
    pub witness_nu: u64,
}

/// All d in D with |d| <= Y, ascending in |d|.
#[derive(Debug, Clone)]
pub struct HeegnerSet {
    pub conductor: u64,
    pub y: u64,
    pub discriminants: Vec<HeegnerDiscriminant>,
}

/// Enumerate D: odd fundamental d < 0 with d = nu^2 mod 4N, (nu, 4N) = 1,
/// |d| <= Y. Membership is the residue-set test plus a squarefree test via
/// the sieve (|d| <= Y must be within the sieve bound).
pub fn enumerate_d(residues: &ResidueSet, sieve: &PrimeSieve, y: u64) -> Result<HeegnerSet> {
    if y > sieve.bound() {
        return Err(Error::Range(format!(
            "enumerate_d: Y={y} exceeds sieve bound {}",
            sieve.bound()
        )));
    }
    let mut out = Vec::new();
    // members are odd and = 1 mod 4, so |d| = 3 mod 4
    let mut abs_d = 3u64;
    while abs_d <= y {
        let d = -(abs_d as i64);
        if residues.contains(d) && sieve.is_squarefree(abs_d)? {
            out.push(HeegnerDiscriminant {
                d,
                witness_nu: residues.witness_for(d),
            });
        }
        abs_d += 4;
    }
    Ok(HeegnerSet {
        conductor: residues.conductor(),
        y,
        discriminants: out,
    })
}

/// The density constant c_N as printed in the closed formula:
/// c_N = 3/(pi^2 N) * prod_{p | 2N} (1 - p^-2)^-1 * card(ResidueSet).
pub fn density_constant(residues: &ResidueSet) -> f64 {
    let n = residues.conductor();
    let mut prod = 1.0f64;
    let mut m = 2 * n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            prod /= 1.0 - 1.0 / (p as f64 * p as f64);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        prod /= 1.0 - 1.0 / (m as f64 * m as f64);
    }
    3.0 / (PI * PI * n as f64) * prod * residues.cardinality() as f64
}

/// chi_d(m) = Kronecker symbol (d/m) for a negative discriminant d = 1 mod 4.
#[inline]
pub fn chi_d(d: i64, m: u64) -> i32 {
    debug_assert!(d < 0 && d.rem_euclid(4) == 1);
    kronecker(d, m)
}

/// r'_d(n) = #{(u, v) : u >= 0, v != 0, u^2 + |d| v^2 = 4n}.
pub fn r_prime(d: i64, n: u64) -> u64 {
    debug_assert!(d < 0);
    let abs_d = d.unsigned_abs();
    let four_n = 4 * n;
    let mut count = 0u64;
    let mut v = 1u64;
    while abs_d * v * v <= four_n {
        let t = four_n - abs_d * v * v;
        if perfect_sqrt(t).is_some() {
            count += 2; // (u, v) and (u, -v)
        }
        v += 1;
    }
    count
}

/// r_d(n) = number of principal ideals of norm n in Q(sqrt(d)) for
/// fundamental d < -4: half the full lattice count of u^2 + |d| v^2 = 4n.
/// The count is always even, so the result is an integer.
///
/// d = -3 carries extra units; callers weight those terms by 1/3 (`unit_u`).
pub fn r_ideal(d: i64, n: u64) -> u64 {
    let c = lattice_count(d, n);
    debug_assert!(c.is_multiple_of(2));
    c / 2
}

/// #{(u, v) in Z^2 : u^2 + |d| v^2 = 4n}.
fn lattice_count(d: i64, n: u64) -> u64 {
    debug_assert!(d < 0);
    let abs_d = d.unsigned_abs();
    let four_n = 4 * n;
    let mut count = 0u64;
    // v = 0 stratum
    if let Some(u) = perfect_sqrt(four_n) {
        count += if u == 0 { 1 } else { 2 };
    }
    let mut v = 1u64;
    while abs_d * v * v <= four_n {
        let t = four_n - abs_d * v * v;
        match perfect_sqrt(t) {
            Some(0) => count += 2, // (0, +/-v)
            Some(_) => count += 4, // (+/-u, +/-v)
            None => {}
        }
        v += 1;
    }
    count
}

/// Half the number of roots of unity in Q(sqrt(d)): 3 for d = -3, else 1
/// on odd fundamental discriminants.
#[inline]
pub fn unit_u(d: i64) -> u64 {
    if d == -3 {
        3
    } else {
        1
    }
}

/// Check the empirical density of D against a reference constant:
/// returns (count, ratio count/Y).
pub fn empirical_density(set: &HeegnerSet) -> (usize, f64) {
    let count = set.discriminants.len();
    (count, count as f64 / set.y as f64)
}

/// The quadratic-character detection identity for odd N:
/// (1/2^(omega(N)+1)) sum_{chi mod 4} sum_{psi mod N, psi^2 = 1} chi(d) psi(d)
/// equals 1 iff d is in D', else 0. Exposed for the cross-check test.
pub fn detection_identity(sieve: &PrimeSieve, conductor: u64, d: i64) -> Result<f64> {
    assert!(conductor % 2 == 1, "detection identity assumes odd N");
    assert!(d < 0);
    // every character mod N vanishes on non-units
    if gcd(d.unsigned_abs(), conductor) != 1 {
        return Ok(0.0);
    }
    let primes: Vec<u64> = sieve
        .factor(conductor)?
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    let omega = primes.len() as u32;
    // chi mod 4: trivial and the odd character (-4/.)
    let d4 = d.rem_euclid(4);
    let chi_values = [
        if d4 % 2 == 1 { 1.0 } else { 0.0 },
        match d4 {
            1 => 1.0,
            3 => -1.0,
            _ => 0.0,
        },
    ];
    // psi: products of Legendre symbols over subsets of the primes of N
    let mut acc = KahanSum::new();
    for mask in 0u32..(1 << omega) {
        let mut psi = 1.0f64;
        for (i, &p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                psi *= kronecker(d, p) as f64;
            }
        }
        for &chi in &chi_values {
            acc.add(chi * psi);
        }
    }
    Ok(acc.value() / 2f64.powi(omega as i32 + 1))
}
