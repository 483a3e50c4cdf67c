//! Elliptic curve data: integral Weierstrass models, Fourier coefficients
//! a_n of the associated newform, period lattice volume, and the
//! symmetric-square L-machinery.
//!
//! Coefficients come from naive point counting at each prime (modularity
//! supplies a_p = p + 1 - #E(F_p)) followed by the Hecke recurrences; the
//! point counting is deliberately the simplest possible oracle-grade
//! enumeration, vectorised only through a quadratic-residue bitmap and
//! finite differences of the cubic.

mod periods;
mod points;
mod sym2;

pub use periods::{periods, PeriodData};
pub use sym2::{
    correction_product, l_product, l_product_derivative, sym2_value, BadFactor, LProductValue,
    Sym2Params, Sym2Table, Sym2Value,
};

use crate::error::{Error, Result};
use crate::numtheory::PrimeSieve;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// An elliptic curve over Q in integral Weierstrass form with squarefree
/// conductor. The conductor and (optional) modular degree are external
/// inputs; both are cross-checked but never computed here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveData {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    pub conductor: u64,
    pub modular_degree: Option<u64>,
    pub label: String,
}

/// JSON document describing a curve, per the external interface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveFile {
    pub label: String,
    pub a_invariants: [i64; 5],
    pub conductor: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modular_degree: Option<u64>,
}

impl CurveData {
    pub fn new(
        a: [i64; 5],
        conductor: u64,
        modular_degree: Option<u64>,
        label: &str,
    ) -> Result<Self> {
        let curve = CurveData {
            a1: a[0],
            a2: a[1],
            a3: a[2],
            a4: a[3],
            a6: a[4],
            conductor,
            modular_degree,
            label: label.to_string(),
        };
        if curve.discriminant() == 0 {
            return Err(Error::InconsistentModel(format!(
                "curve {label} has zero discriminant"
            )));
        }
        if !squarefree_by_trial(conductor) {
            return Err(Error::InconsistentModel(format!(
                "conductor {conductor} is not squarefree"
            )));
        }
        Ok(curve)
    }

    pub fn from_file(file: &CurveFile) -> Result<Self> {
        Self::new(
            file.a_invariants,
            file.conductor,
            file.modular_degree,
            &file.label,
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: CurveFile = serde_json::from_str(s)?;
        Self::from_file(&file)
    }

    pub fn from_json_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Built-in test curves, addressable by label.
    pub fn builtin(label: &str) -> Option<Self> {
        let (a, n, deg) = match label {
            "11a1" => ([0, -1, 1, -10, -20], 11, Some(1)),
            "14a1" => ([1, 0, 1, 4, -6], 14, None),
            "15a1" => ([1, 1, 1, -10, -10], 15, None),
            "17a1" => ([1, -1, 1, -1, -14], 17, None),
            "37a1" => ([0, 0, 1, -1, 0], 37, Some(2)),
            _ => return None,
        };
        Some(Self::new(a, n, deg, label).expect("built-in curves are valid"))
    }

    pub fn builtin_labels() -> &'static [&'static str] {
        &["11a1", "14a1", "15a1", "17a1", "37a1"]
    }

    /// Standard b-invariants.
    pub fn b_invariants(&self) -> (i128, i128, i128, i128) {
        let (a1, a2, a3, a4, a6) = (
            self.a1 as i128,
            self.a2 as i128,
            self.a3 as i128,
            self.a4 as i128,
            self.a6 as i128,
        );
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        (b2, b4, b6, b8)
    }

    pub fn discriminant(&self) -> i128 {
        let (b2, b4, b6, b8) = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    /// a_p for a single prime. See `points` for the counting conventions.
    pub fn a_p(&self, p: u64) -> Result<i64> {
        points::a_p(self, p)
    }
}

fn squarefree_by_trial(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// Exact Fourier coefficients a_1..a_{n_max} of the newform attached to a
/// curve, built from point counts via the Hecke recurrences.
pub struct CoefficientTable {
    n_max: u64,
    a: Vec<i64>, // a[n] for 0 <= n <= n_max; a[0] unused
}

impl CoefficientTable {
    /// Build the table. `sieve` must cover `n_max`.
    ///
    /// Point counting parallelises over primes; the recurrence fill is a
    /// linear sequential pass.
    pub fn build(curve: &CurveData, sieve: &PrimeSieve, n_max: u64) -> Result<Self> {
        if n_max > sieve.bound() {
            return Err(Error::Range(format!(
                "n_max {n_max} exceeds sieve bound {}",
                sieve.bound()
            )));
        }
        let primes: Vec<u32> = sieve
            .primes()
            .iter()
            .copied()
            .take_while(|&p| p as u64 <= n_max)
            .collect();
        // a_p in parallel; chunked so every worker reuses one scratch bitmap.
        let ap: Vec<i64> = primes
            .par_chunks(256)
            .map(|chunk| {
                let mut scratch = points::Scratch::new();
                chunk
                    .iter()
                    .map(|&p| points::a_p_with_scratch(curve, p as u64, &mut scratch))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<Vec<i64>>>>()?
            .into_iter()
            .flatten()
            .collect();

        let mut a = vec![0i64; n_max as usize + 1];
        if n_max >= 1 {
            a[1] = 1;
        }
        for (i, &p) in primes.iter().enumerate() {
            a[p as usize] = ap[i];
        }
        let n_conductor = curve.conductor;
        for n in 2..=n_max {
            let p = sieve.least_prime_factor(n) as u64;
            if p == n {
                continue; // prime, already filled
            }
            let m = n / p;
            let value = if !m.is_multiple_of(p) {
                // gcd(p, m) = 1: multiplicativity
                mul_checked(a[p as usize], a[m as usize], n)?
            } else if n_conductor.is_multiple_of(p) {
                // p | N: a_{p^k} = a_p^k
                mul_checked(a[p as usize], a[m as usize], n)?
            } else {
                // a_{p^{k}} = a_p a_{p^{k-1}} - p a_{p^{k-2}}, propagated
                // through the coprime part
                let t1 = mul_checked(a[p as usize], a[m as usize], n)?;
                let t2 = mul_checked(p as i64, a[(m / p) as usize], n)?;
                t1.checked_sub(t2)
                    .ok_or_else(|| Error::Overflow(format!("a_{n}")))?
            };
            a[n as usize] = value;
        }
        Ok(CoefficientTable { n_max, a })
    }

    #[inline]
    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    #[inline]
    pub fn a(&self, n: u64) -> i64 {
        debug_assert!(n >= 1 && n <= self.n_max);
        self.a[n as usize]
    }

    pub fn require(&self, n: u64) -> Result<()> {
        if n > self.n_max {
            return Err(Error::CoefficientShortfall {
                needed: n,
                have: self.n_max,
            });
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.a
    }
}

fn mul_checked(x: i64, y: i64, n: u64) -> Result<i64> {
    x.checked_mul(y)
        .ok_or_else(|| Error::Overflow(format!("a_{n} product")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve_11a1() -> CurveData {
        CurveData::builtin("11a1").unwrap()
    }

    #[test]
    fn discriminant_11a1() {
        // 11a1 has discriminant -11^5
        assert_eq!(curve_11a1().discriminant(), -(11i128.pow(5)));
    }

    #[test]
    fn rejects_singular_model() {
        // y^2 = x^3 has discriminant 0
        assert!(CurveData::new([0, 0, 0, 0, 0], 11, None, "cusp").is_err());
    }

    #[test]
    fn rejects_non_squarefree_conductor() {
        assert!(CurveData::new([0, -1, 1, -10, -20], 44, None, "bad").is_err());
    }

    #[test]
    fn json_roundtrip() {
        let text =
            r#"{"label":"11a1","a_invariants":[0,-1,1,-10,-20],"conductor":11,"modular_degree":1}"#;
        let curve = CurveData::from_json_str(text).unwrap();
        assert_eq!(curve, curve_11a1());
        let no_deg = r#"{"label":"x","a_invariants":[0,0,1,-1,0],"conductor":37}"#;
        let curve = CurveData::from_json_str(no_deg).unwrap();
        assert_eq!(curve.modular_degree, None);
    }

    #[test]
    fn ap_known_values_11a1() {
        let curve = curve_11a1();
        assert_eq!(curve.a_p(2).unwrap(), -2);
        assert_eq!(curve.a_p(3).unwrap(), -1);
        assert_eq!(curve.a_p(11).unwrap(), 1); // split multiplicative
    }

    /// Brute-force oracle: count points by the defining equation, all
    /// residues, no quadratic-character shortcut.
    fn ap_oracle(curve: &CurveData, p: u64) -> i64 {
        let pm = p as i64;
        let mut count = 1i64; // point at infinity
        for x in 0..pm {
            for y in 0..pm {
                let lhs = y * y + curve.a1 * x * y + curve.a3 * y;
                let rhs = x * x * x + curve.a2 * x * x + curve.a4 * x + curve.a6;
                if (lhs - rhs).rem_euclid(pm) == 0 {
                    count += 1;
                }
            }
        }
        p as i64 + 1 - count
    }

    #[test]
    fn ap_matches_bruteforce_oracle_good_primes() {
        let sieve = PrimeSieve::new(200);
        for label in CurveData::builtin_labels() {
            let curve = CurveData::builtin(label).unwrap();
            for &p in sieve.primes() {
                let p = p as u64;
                if curve.conductor.is_multiple_of(p) {
                    continue;
                }
                assert_eq!(curve.a_p(p).unwrap(), ap_oracle(&curve, p), "{label} p={p}");
            }
        }
    }

    #[test]
    fn ap_multiplicative_primes_are_units() {
        for label in CurveData::builtin_labels() {
            let curve = CurveData::builtin(label).unwrap();
            let mut n = curve.conductor;
            let mut p = 2u64;
            while p * p <= n {
                if n.is_multiple_of(p) {
                    let ap = curve.a_p(p).unwrap();
                    assert!(ap == 1 || ap == -1, "{label} p={p} a_p={ap}");
                    while n.is_multiple_of(p) {
                        n /= p;
                    }
                }
                p += 1;
            }
            if n > 1 {
                let ap = curve.a_p(n).unwrap();
                assert!(ap == 1 || ap == -1, "{label} p={n} a_p={ap}");
            }
        }
    }

    #[test]
    fn ap_rejects_inconsistent_model() {
        // Rescaled 11a1 (u = 2): discriminant gains 2^12, conductor stays 11,
        // so p = 2 divides the discriminant but not the conductor.
        let curve = CurveData::new([0, -4, 8, -160, -1280], 11, None, "11a1-rescaled").unwrap();
        assert!(matches!(curve.a_p(2), Err(Error::InconsistentModel(_))));
        // the model is still fine at other primes
        assert!(curve.a_p(3).is_ok());
    }

    #[test]
    fn coefficient_table_known_values_11a1() {
        let sieve = PrimeSieve::new(1000);
        let table = CoefficientTable::build(&curve_11a1(), &sieve, 1000).unwrap();
        assert_eq!(table.a(1), 1);
        assert_eq!(table.a(4), 2); // a_2^2 - 2
        assert_eq!(table.a(6), 2); // a_2 a_3
                                   // first coefficients of the level-11 newform
        let expect = [1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4, 4, -1, -4];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(table.a(i as u64 + 1), e, "a_{}", i + 1);
        }
    }

    #[test]
    fn coefficient_table_invariants_exhaustive() {
        let n_max = 10_000u64;
        let sieve = PrimeSieve::new(n_max);
        for label in ["11a1", "14a1", "37a1"] {
            let curve = CurveData::builtin(label).unwrap();
            let table = CoefficientTable::build(&curve, &sieve, n_max).unwrap();
            for m in 1..=n_max {
                for n in 1..=(n_max / m) {
                    if crate::numtheory::gcd(m, n) == 1 {
                        assert_eq!(
                            table.a(m * n),
                            table.a(m) * table.a(n),
                            "{label}: multiplicativity at ({m},{n})"
                        );
                    }
                }
            }
            // Hecke recurrence at prime powers
            for &p in sieve.primes() {
                let p = p as u64;
                let mut pk = p * p;
                while pk <= n_max {
                    let k1 = pk / p;
                    let k2 = pk / (p * p);
                    if curve.conductor.is_multiple_of(p) {
                        assert_eq!(table.a(pk), table.a(p) * table.a(k1), "{label} p^k={pk}");
                    } else {
                        assert_eq!(
                            table.a(pk),
                            table.a(p) * table.a(k1) - p as i64 * table.a(k2),
                            "{label} p^k={pk}"
                        );
                    }
                    pk *= p;
                }
            }
            // Deligne bound, sharp form |a_n| <= d(n) sqrt(n)
            for n in 1..=n_max {
                let bound = sieve.divisor_count(n).unwrap() as f64 * (n as f64).sqrt();
                assert!(
                    (table.a(n).abs() as f64) <= bound + 1e-9,
                    "{label}: Deligne bound at n={n}: |{}| > {bound}",
                    table.a(n)
                );
            }
        }
    }

    #[test]
    fn ap_consistent_with_ap_squared() {
        // a_p recovered from a_{p^2} + p = a_p^2 for the first 20 good primes
        let sieve = PrimeSieve::new(60_000);
        let curve = curve_11a1();
        let table = CoefficientTable::build(&curve, &sieve, 60_000).unwrap();
        let mut checked = 0;
        for &p in sieve.primes() {
            let p = p as u64;
            if curve.conductor.is_multiple_of(p) || p * p > 60_000 {
                continue;
            }
            let ap = table.a(p);
            assert_eq!(table.a(p * p) + p as i64, ap * ap, "p={p}");
            checked += 1;
            if checked >= 20 {
                break;
            }
        }
        assert_eq!(checked, 20);
    }

    #[test]
    fn coefficient_table_requires_sieve_coverage() {
        let sieve = PrimeSieve::new(100);
        assert!(CoefficientTable::build(&curve_11a1(), &sieve, 200).is_err());
        let table = CoefficientTable::build(&curve_11a1(), &sieve, 100).unwrap();
        assert!(table.require(100).is_ok());
        assert!(matches!(
            table.require(101),
            Err(Error::CoefficientShortfall { .. })
        ));
    }
}
