//! The coefficient rings (Z/pⁿ)[G] for finite abelian G.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest group order accepted; tables are quadratic in it.
pub const MAX_GROUP_ORDER: usize = 1 << 12;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::Integer::gcd(&a, &b)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// p-adic valuation of a residue mod pⁿ (n for zero).
pub fn valuation(mut a: u64, p: u64, n: u32) -> u32 {
    if a == 0 {
        return n;
    }
    let mut v = 0;
    while a.is_multiple_of(p) {
        a /= p;
        v += 1;
    }
    v.min(n)
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(mut a: u64, p: u64) -> u32 {
    assert!(a != 0);
    let mut v = 0;
    while a.is_multiple_of(p) {
        a /= p;
        v += 1;
    }
    v
}

pub fn reduce_signed(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// The Teichmüller lift of `a` mod pⁿ: x ≡ a mod p with x^(p−1) = 1.
pub fn teichmuller(p: u64, n: u32, a: i64) -> Result<u64> {
    let m = p.pow(n);
    let a = reduce_signed(a as i128, m);
    if a.is_multiple_of(p) {
        return invalid(format!("{a} is not a unit mod {p}"));
    }
    let mut x = a;
    loop {
        let y = pow_mod(x, p, m);
        if y == x {
            return Ok(x);
        }
        x = y;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    pub n: u32,
    pub invariant_factors: Vec<u64>,
}

struct RingData {
    p: u64,
    n: u32,
    modulus: u64,
    factors: Vec<u64>,
    order: usize,
    op: Vec<u32>,
    inv: Vec<u32>,
}

/// (Z/pⁿ)[G], with G = Z/d₁ × … × Z/d_k enumerated in mixed radix
/// (last digit fastest).
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}{:?}", self.0.p, self.0.n, self.0.factors)
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.n == other.0.n && self.0.factors == other.0.factors)
    }
}
impl Eq for Ring {}

impl Ring {
    pub fn new(p: u64, n: u32, invariant_factors: &[u64]) -> Result<Ring> {
        if p == 2 || !is_prime(p) {
            return invalid(format!("p = {p} is not an odd prime"));
        }
        if n == 0 {
            return invalid("n must be positive");
        }
        if (n as f64) * (p as f64).log2() > 62.0 {
            return invalid("pⁿ exceeds 2^62");
        }
        let factors: Vec<u64> = invariant_factors
            .iter()
            .copied()
            .filter(|&d| d != 1)
            .collect();
        if factors.contains(&0) {
            return invalid("invariant factors must be positive");
        }
        for w in factors.windows(2) {
            if w[1] % w[0] != 0 {
                return invalid(format!("invariant factors {} ∤ {}", w[0], w[1]));
            }
        }
        let order = factors.iter().try_fold(1usize, |acc, &d| {
            acc.checked_mul(d as usize)
                .filter(|&o| o <= MAX_GROUP_ORDER)
        });
        let Some(order) = order else {
            return invalid(format!("group order exceeds {MAX_GROUP_ORDER}"));
        };
        let digits = |mut i: usize| -> Vec<u64> {
            let mut d = vec![0; factors.len()];
            for k in (0..factors.len()).rev() {
                d[k] = (i % factors[k] as usize) as u64;
                i /= factors[k] as usize;
            }
            d
        };
        let index = |d: &[u64]| -> usize {
            d.iter()
                .zip(&factors)
                .fold(0usize, |acc, (&x, &f)| acc * f as usize + x as usize)
        };
        let all: Vec<Vec<u64>> = (0..order).map(digits).collect();
        let mut op = vec![0u32; order * order];
        let mut inv = vec![0u32; order];
        for i in 0..order {
            let neg: Vec<u64> = all[i]
                .iter()
                .zip(&factors)
                .map(|(&x, &f)| (f - x) % f)
                .collect();
            inv[i] = index(&neg) as u32;
            for j in 0..order {
                let s: Vec<u64> = all[i]
                    .iter()
                    .zip(&all[j])
                    .zip(&factors)
                    .map(|((&x, &y), &f)| (x + y) % f)
                    .collect();
                op[i * order + j] = index(&s) as u32;
            }
        }
        Ok(Ring(Arc::new(RingData {
            p,
            n,
            modulus: p.pow(n),
            factors,
            order,
            op,
            inv,
        })))
    }

    pub fn from_spec(spec: &RingSpec) -> Result<Ring> {
        Ring::new(spec.p, spec.n, &spec.invariant_factors)
    }

    pub fn spec(&self) -> RingSpec {
        RingSpec {
            p: self.p(),
            n: self.n(),
            invariant_factors: self.0.factors.clone(),
        }
    }

    /// Z/pⁿ itself (trivial group).
    pub fn scalars(p: u64, n: u32) -> Result<Ring> {
        Ring::new(p, n, &[])
    }

    /// Same group, coefficients mod p^m instead.
    pub fn with_exponent(&self, m: u32) -> Result<Ring> {
        Ring::new(self.p(), m, &self.0.factors)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn n(&self) -> u32 {
        self.0.n
    }
    pub fn modulus(&self) -> u64 {
        self.0.modulus
    }
    pub fn invariant_factors(&self) -> &[u64] {
        &self.0.factors
    }
    pub fn order(&self) -> usize {
        self.0.order
    }

    /// True iff G is a p-group.
    pub fn is_local(&self) -> bool {
        self.0.factors.iter().all(|&d| {
            let mut d = d;
            while d % self.0.p == 0 {
                d /= self.0.p;
            }
            d == 1
        })
    }

    /// Group rings over Z/pⁿ are Frobenius algebras.
    pub fn is_gorenstein(&self) -> bool {
        true
    }

    pub fn digits(&self, mut i: usize) -> Vec<u64> {
        let f = &self.0.factors;
        let mut d = vec![0; f.len()];
        for k in (0..f.len()).rev() {
            d[k] = (i % f[k] as usize) as u64;
            i /= f[k] as usize;
        }
        d
    }

    pub fn index(&self, digits: &[u64]) -> usize {
        assert_eq!(digits.len(), self.0.factors.len());
        digits
            .iter()
            .zip(&self.0.factors)
            .fold(0usize, |acc, (&x, &f)| acc * f as usize + (x % f) as usize)
    }

    /// Group law on element indices.
    #[inline]
    pub fn op(&self, i: usize, j: usize) -> usize {
        self.0.op[i * self.0.order + j] as usize
    }

    #[inline]
    pub fn inv(&self, i: usize) -> usize {
        self.0.inv[i] as usize
    }

    pub fn pow(&self, g: usize, e: u64) -> usize {
        let mut r = 0;
        for _ in 0..e % self.exponent() {
            r = self.op(r, g);
        }
        r
    }

    pub fn exponent(&self) -> u64 {
        self.0.factors.last().copied().unwrap_or(1)
    }

    /// Index of the k-th standard generator.
    pub fn generator(&self, k: usize) -> usize {
        let mut d = vec![0; self.0.factors.len()];
        d[k] = 1;
        self.index(&d)
    }

    pub fn element_order(&self, g: usize) -> u64 {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.op(x, g);
            k += 1;
        }
        k
    }

    pub fn reduce(&self, a: i128) -> u64 {
        reduce_signed(a, self.modulus())
    }

    pub fn zero(&self) -> GroupRingElement {
        GroupRingElement {
            ring: self.clone(),
            coeffs: vec![0; self.order()],
        }
    }

    pub fn one(&self) -> GroupRingElement {
        self.basis(0)
    }

    pub fn basis(&self, g: usize) -> GroupRingElement {
        let mut e = self.zero();
        e.coeffs[g] = 1 % self.modulus();
        e
    }

    pub fn scalar(&self, c: i128) -> GroupRingElement {
        let mut e = self.zero();
        e.coeffs[0] = self.reduce(c);
        e
    }

    pub fn element(&self, coeffs: Vec<u64>) -> Result<GroupRingElement> {
        if coeffs.len() != self.order() {
            return invalid(format!(
                "expected {} coefficients, got {}",
                self.order(),
                coeffs.len()
            ));
        }
        let m = self.modulus();
        Ok(GroupRingElement {
            ring: self.clone(),
            coeffs: coeffs.into_iter().map(|c| c % m).collect(),
        })
    }

    pub fn element_signed(&self, coeffs: &[i128]) -> Result<GroupRingElement> {
        self.element(coeffs.iter().map(|&c| self.reduce(c)).collect())
    }

    /// The norm element Σ_g g.
    pub fn norm_element(&self) -> GroupRingElement {
        self.element(vec![1; self.order()]).unwrap()
    }

    /// Roots of unity of order dividing p−1 via Teichmüller lifts.
    pub fn teichmuller(&self, a: i64) -> Result<u64> {
        teichmuller(self.p(), self.n(), a)
    }

    /// e_χ = |Δ|⁻¹ Σ_{σ∈Δ} χ(σ)σ⁻¹ for a subgroup Δ (listed with χ values).
    pub fn idempotent(&self, delta: &[usize], chi: &[u64]) -> Result<GroupRingElement> {
        if delta.len() != chi.len() || delta.is_empty() {
            return invalid("subgroup and character tables differ in length");
        }
        let pos = |g: usize| delta.iter().position(|&d| d == g);
        for (i, &a) in delta.iter().enumerate() {
            for (j, &b) in delta.iter().enumerate() {
                let Some(k) = pos(self.op(a, b)) else {
                    return invalid("delta is not closed under the group law");
                };
                if chi[k] % self.modulus() != mul_mod(chi[i], chi[j], self.modulus()) {
                    return invalid("character is not multiplicative on delta");
                }
            }
        }
        let Some(inv) = inv_mod(delta.len() as u64, self.modulus()) else {
            return Err(Error::Invalid(format!(
                "|delta| = {} is not invertible mod {}",
                delta.len(),
                self.p()
            )));
        };
        let mut e = self.zero();
        for (&g, &c) in delta.iter().zip(chi) {
            let gi = self.inv(g);
            e.coeffs[gi] = (e.coeffs[gi] + mul_mod(c, inv, self.modulus())) % self.modulus();
        }
        Ok(e)
    }
}

/// An element of (Z/pⁿ)[G]; coefficients are indexed by group elements.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    ring: Ring,
    coeffs: Vec<u64>,
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

/// Σ c·s^a t^b …, one letter per cyclic factor of G.
impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const LETTERS: &[u8] = b"stuvwxyz";
        let mut terms = Vec::new();
        for (g, &c) in self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
            let mono: Vec<String> = self
                .ring
                .digits(g)
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(k, &e)| {
                    let x = LETTERS
                        .get(k)
                        .map_or(format!("g{k}"), |&b| (b as char).to_string());
                    if e == 1 {
                        x
                    } else {
                        format!("{x}^{e}")
                    }
                })
                .collect();
            terms.push(match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono.join(""),
                _ => format!("{c}{}", mono.join("")),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl GroupRingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
    pub fn coeff(&self, g: usize) -> u64 {
        self.coeffs[g]
    }
    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{:?} vs {:?}",
                self.ring, other.ring
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = self.ring.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % m)
            .collect();
        Ok(GroupRingElement {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = self.ring.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + m - b) % m)
            .collect();
        Ok(GroupRingElement {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    /// Convolution product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = &self.ring;
        let m = r.modulus() as u128;
        let n = r.order();
        let mut acc = vec![0u128; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b != 0 {
                    let k = r.op(i, j);
                    acc[k] = (acc[k] + a as u128 * b as u128) % m;
                }
            }
        }
        Ok(GroupRingElement {
            ring: r.clone(),
            coeffs: acc.into_iter().map(|c| c as u64).collect(),
        })
    }

    pub fn scale(&self, c: u64) -> Self {
        let m = self.ring.modulus();
        GroupRingElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|&a| mul_mod(a, c, m)).collect(),
        }
    }

    /// Multiplication by a group element.
    pub fn shift(&self, g: usize) -> Self {
        let mut out = vec![0; self.coeffs.len()];
        for (h, &a) in self.coeffs.iter().enumerate() {
            out[self.ring.op(g, h)] = a;
        }
        GroupRingElement {
            ring: self.ring.clone(),
            coeffs: out,
        }
    }

    /// ι: σ ↦ σ⁻¹.
    pub fn involution(&self) -> Self {
        let mut out = vec![0; self.coeffs.len()];
        for (g, &a) in self.coeffs.iter().enumerate() {
            out[self.ring.inv(g)] = a;
        }
        GroupRingElement {
            ring: self.ring.clone(),
            coeffs: out,
        }
    }

    pub fn augmentation(&self) -> u64 {
        let m = self.ring.modulus();
        self.coeffs.iter().fold(0, |s, &a| (s + a) % m)
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut r = self.ring.one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Push forward along a group homomorphism given on indices.
    pub fn map_group(&self, target: &Ring, f: impl Fn(usize) -> usize) -> Result<Self> {
        if target.p() != self.ring.p() || target.n() > self.ring.n() {
            return invalid("coefficient rings are incompatible");
        }
        let m = target.modulus();
        let mut out = vec![0; target.order()];
        for (g, &a) in self.coeffs.iter().enumerate() {
            let h = f(g);
            out[h] = (out[h] + a % m) % m;
        }
        target.element(out)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl Add for &GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, rhs: Self) -> GroupRingElement {
        self.try_add(rhs).expect("ring mismatch")
    }
}

impl Sub for &GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, rhs: Self) -> GroupRingElement {
        self.try_sub(rhs).expect("ring mismatch")
    }
}

impl Mul for &GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, rhs: Self) -> GroupRingElement {
        self.try_mul(rhs).expect("ring mismatch")
    }
}

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        let m = self.ring.modulus();
        GroupRingElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|&a| (m - a) % m).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> Ring {
        Ring::new(3, 2, &[3]).unwrap()
    }

    #[test]
    fn schoolbook_product() {
        let r = c3();
        let s = r.basis(1);
        let a = &r.one() + &s;
        let b = &r.one() - &s;
        let s2 = r.basis(2);
        assert_eq!(&a * &b, &r.one() - &s2);
        assert_eq!(&a * &r.one(), a);
        assert_eq!(&r.norm_element() * &s, r.norm_element());
    }

    #[test]
    fn involution_examples() {
        let r = c3();
        assert_eq!(r.basis(1).involution(), r.basis(2));
        let a = r.element(vec![1, 2, 0]).unwrap();
        assert_eq!(a.involution(), r.element(vec![1, 0, 2]).unwrap());
        assert_eq!(a.involution().involution(), a);
    }

    #[test]
    fn sign_idempotent_on_c2() {
        let r = Ring::new(3, 2, &[2]).unwrap();
        let e = r.idempotent(&[0, 1], &[1, 8]).unwrap();
        assert_eq!(e.coeffs(), &[5, 4]);
        assert_eq!(&e * &e, e);
        let t = r.idempotent(&[0, 1], &[1, 1]).unwrap();
        assert_eq!(t.coeffs(), &[5, 5]);
        assert!((&e * &t).is_zero());
    }

    #[test]
    fn idempotent_needs_invertible_order() {
        let r = Ring::new(3, 1, &[3]).unwrap();
        assert!(r.idempotent(&[0, 1, 2], &[1, 1, 1]).is_err());
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(3, 2, 2).unwrap(), 8);
        assert_eq!(teichmuller(3, 2, 1).unwrap(), 1);
        assert_eq!(teichmuller(5, 2, 4).unwrap(), 24);
        assert!(teichmuller(5, 2, 10).is_err());
    }

    #[test]
    fn teichmuller_is_root_of_unity() {
        for p in [3u64, 5, 7, 11] {
            for n in 1..4 {
                let m = p.pow(n);
                for a in 1..p {
                    let w = teichmuller(p, n, a as i64).unwrap();
                    assert_eq!(pow_mod(w, p - 1, m), 1);
                    assert_eq!(w % p, a);
                }
            }
        }
    }

    #[test]
    fn mixed_radix_order() {
        let r = Ring::new(3, 1, &[3, 9]).unwrap();
        assert_eq!(r.order(), 27);
        assert_eq!(r.digits(10), vec![1, 1]);
        assert_eq!(r.index(&[2, 8]), 26);
        assert_eq!(r.op(r.generator(1), r.index(&[0, 8])), 0);
        assert!(r.is_local());
        assert!(!Ring::new(3, 1, &[2]).unwrap().is_local());
    }

    #[test]
    fn rejects_bad_descriptors() {
        assert!(Ring::new(2, 1, &[]).is_err());
        assert!(Ring::new(9, 1, &[]).is_err());
        assert!(Ring::new(3, 0, &[]).is_err());
        assert!(Ring::new(3, 1, &[3, 2]).is_err());
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = Ring::new(3, 2, &[3]).unwrap().one();
        let b = Ring::new(3, 3, &[3]).unwrap().one();
        assert!(matches!(a.try_mul(&b), Err(Error::RingMismatch(_))));
    }
}
