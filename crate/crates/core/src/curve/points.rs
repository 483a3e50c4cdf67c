//! Naive point counting over F_p.
//!
//! For good odd p the count uses the completed square: the number of y with
//! y^2 + (a1 x + a3) y = f(x) is 1 + chi(rhs(x)) where
//! rhs(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 and chi is the quadratic character
//! mod p. The cubic is walked with finite differences (three modular
//! additions per x) against a precomputed square bitmap, so the whole count
//! is O(p) additions with no multiplications in the hot loop.
//!
//! For p dividing the (squarefree) conductor the reduction is multiplicative
//! and a_p is read off the nonsingular count: #E_ns(F_p) = p - a_p, so
//! a_p = +1 for split and -1 for nonsplit reduction. Anything else means the
//! model and conductor disagree.

use super::CurveData;
use crate::error::{Error, Result};

/// Reusable scratch bitmap for the quadratic-residue table.
pub struct Scratch {
    bits: Vec<u64>,
}

impl Scratch {
    pub fn new() -> Self {
        Scratch { bits: Vec::new() }
    }

    fn prepare(&mut self, p: u64) -> &mut [u64] {
        let words = (p as usize).div_ceil(64);
        self.bits.clear();
        self.bits.resize(words, 0);
        &mut self.bits
    }
}

impl Default for Scratch {
    fn default() -> Self {
        Self::new()
    }
}

pub fn a_p(curve: &CurveData, p: u64) -> Result<i64> {
    let mut scratch = Scratch::new();
    a_p_with_scratch(curve, p, &mut scratch)
}

pub fn a_p_with_scratch(curve: &CurveData, p: u64, scratch: &mut Scratch) -> Result<i64> {
    assert!(p >= 2, "a_p needs a prime");
    if curve.conductor.is_multiple_of(p) {
        return a_p_multiplicative(curve, p);
    }
    if curve.discriminant().rem_euclid(p as i128) == 0 {
        return Err(Error::InconsistentModel(format!(
            "{}: prime {p} divides the discriminant but not the conductor (non-minimal model?)",
            curve.label
        )));
    }
    let ap = if p == 2 {
        (p as i64) + 1 - brute_count(curve, p)
    } else {
        -char_sum(curve, p, scratch)
    };
    debug_assert!(
        (ap as f64).abs() <= 2.0 * (p as f64).sqrt() + 1e-9,
        "Hasse bound violated at p={p}: a_p={ap}"
    );
    Ok(ap)
}

/// Sum of chi(rhs(x)) over x in F_p, p odd, good reduction.
fn char_sum(curve: &CurveData, p: u64, scratch: &mut Scratch) -> i64 {
    let bits = scratch.prepare(p);
    // square bitmap: t^2 mod p for t = 0..=(p-1)/2, built incrementally
    let mut s = 0u64;
    let mut inc = 1u64;
    for _ in 0..=(p - 1) / 2 {
        bits[(s / 64) as usize] |= 1u64 << (s % 64);
        s += inc;
        if s >= p {
            s -= p;
        }
        inc += 2;
        if inc >= p {
            inc -= p;
        }
    }
    let (b2, b4, b6, _) = curve.b_invariants();
    let rhs = |x: u64| -> u64 {
        let x = x as i128;
        let v = 4 * x * x * x + b2 * x * x + 2 * b4 * x + b6;
        v.rem_euclid(p as i128) as u64
    };
    // finite differences of the cubic: rhs(x+1) = rhs(x) + d1, d1 += d2, d2 += d3
    let mut v = rhs(0);
    let mut d1 = (rhs(1) + p - v) % p;
    let mut d2 = (rhs(2) + 2 * p - 2 * rhs(1)) % p;
    d2 = (d2 + v) % p;
    let d3 = 24 % p;
    let mut acc: i64 = 0;
    for _ in 0..p {
        if v == 0 {
            // chi(0) = 0
        } else if bits[(v / 64) as usize] >> (v % 64) & 1 == 1 {
            acc += 1;
        } else {
            acc -= 1;
        }
        v += d1;
        if v >= p {
            v -= p;
        }
        d1 += d2;
        if d1 >= p {
            d1 -= p;
        }
        d2 += d3;
        if d2 >= p {
            d2 -= p;
        }
    }
    acc
}

/// Full affine count plus infinity, by direct enumeration. Only used at p = 2.
fn brute_count(curve: &CurveData, p: u64) -> i64 {
    let pm = p as i64;
    let mut count = 1i64;
    for x in 0..pm {
        for y in 0..pm {
            if eval_weierstrass(curve, x, y, pm) == 0 {
                count += 1;
            }
        }
    }
    count
}

#[inline]
fn eval_weierstrass(curve: &CurveData, x: i64, y: i64, p: i64) -> i64 {
    let lhs = y * y + curve.a1 * x * y + curve.a3 * y;
    let rhs = x * x * x + curve.a2 * x * x + curve.a4 * x + curve.a6;
    (lhs - rhs).rem_euclid(p)
}

/// a_p at a prime of multiplicative reduction, via the nonsingular count.
fn a_p_multiplicative(curve: &CurveData, p: u64) -> Result<i64> {
    let affine = if p == 2 {
        brute_count(curve, 2) - 1
    } else {
        let mut scratch = Scratch::new();
        p as i64 + char_sum(curve, p, &mut scratch)
    };
    let singular = count_singular_points(curve, p);
    if singular != 1 {
        return Err(Error::InconsistentModel(format!(
            "{}: expected exactly one singular point mod {p}, found {singular}",
            curve.label
        )));
    }
    let e_ns = affine - singular as i64 + 1;
    let ap = p as i64 - e_ns;
    if ap == 1 || ap == -1 {
        Ok(ap)
    } else {
        Err(Error::InconsistentModel(format!(
            "{}: reduction at {p} is not multiplicative (#E_ns = {e_ns})",
            curve.label
        )))
    }
}

/// Number of singular points of the reduced curve mod p: solutions of
/// F = dF/dx = dF/dy = 0.
fn count_singular_points(curve: &CurveData, p: u64) -> u64 {
    let pm = p as i64;
    let mut found = 0u64;
    for x in 0..pm {
        for y in 0..pm {
            if eval_weierstrass(curve, x, y, pm) != 0 {
                continue;
            }
            // dF/dy = 2y + a1 x + a3, dF/dx = a1 y - 3x^2 - 2 a2 x - a4
            let fy = (2 * y + curve.a1 * x + curve.a3).rem_euclid(pm);
            let fx = (curve.a1 * y - 3 * x * x - 2 * curve.a2 * x - curve.a4).rem_euclid(pm);
            if fy == 0 && fx == 0 {
                found += 1;
            }
        }
    }
    found
}
