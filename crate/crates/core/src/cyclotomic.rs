//! Exact arithmetic in Q(ζ_d) and complex Dirichlet characters.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::ring::gcd;
use crate::units::UnitGroup;

/// Integer coefficients of the d-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(d: u64) -> Vec<i64> {
    // x^d − 1 divided by Φ_e for every proper divisor e
    let mut num = vec![0i64; d as usize + 1];
    num[0] = -1;
    num[d as usize] = 1;
    for e in (1..d).filter(|e| d.is_multiple_of(*e)) {
        num = divide_exact(&num, &cyclotomic_polynomial(e));
    }
    num
}

fn divide_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let (da, db) = (a.len() - 1, b.len() - 1);
    let mut q = vec![0i64; da - db + 1];
    for i in (0..=da - db).rev() {
        let c = rem[i + db] / b[db];
        q[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            rem[i + j] -= c * bj;
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

/// An element of Q(ζ_d) as Σ cᵢζ^i, i < d; compare with `reduced`.
#[derive(Debug, Clone)]
pub struct Cyclotomic {
    pub d: u64,
    pub coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(d: u64) -> Self {
        Cyclotomic {
            d,
            coeffs: vec![BigRational::zero(); d as usize],
        }
    }

    pub fn rational(d: u64, r: BigRational) -> Self {
        let mut z = Self::zero(d);
        z.coeffs[0] = r;
        z
    }

    /// ζ^k.
    pub fn root(d: u64, k: u64) -> Self {
        let mut z = Self::zero(d);
        z.coeffs[(k % d) as usize] = BigRational::one();
        z
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Cyclotomic {
            d: self.d,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Coordinates on 1, ζ, …, ζ^{φ(d)−1}.
    pub fn reduced(&self) -> Vec<BigRational> {
        let phi = cyclotomic_polynomial(self.d);
        let deg = phi.len() - 1;
        let mut c = self.coeffs.clone();
        for i in (deg..c.len()).rev() {
            let lead = c[i].clone();
            if lead.is_zero() {
                continue;
            }
            for (j, &pj) in phi.iter().enumerate() {
                c[i - deg + j] -= &lead * BigRational::from_integer(BigInt::from(pj));
            }
        }
        c.truncate(deg);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(Zero::is_zero)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && (self - other).is_zero()
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, o: &Cyclotomic) -> Cyclotomic {
        assert_eq!(self.d, o.d);
        Cyclotomic {
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, o: &Cyclotomic) -> Cyclotomic {
        self + &(-o)
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            d: self.d,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, o: &Cyclotomic) -> Cyclotomic {
        assert_eq!(self.d, o.d);
        let d = self.d as usize;
        let mut out = Cyclotomic::zero(self.d);
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in o.coeffs.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                out.coeffs[(i + j) % d] += a * b;
            }
        }
        out
    }
}

/// ψ: (Z/f)^× → μ_d, stored as exponents k with ψ(a) = ζ_d^k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub d: u64,
    exps: Vec<Option<u64>>,
}

impl DirichletCharacter {
    /// Every character mod f, with values in μ_d for d the exponent of (Z/f)^×.
    pub fn all(f: u64) -> Result<Vec<DirichletCharacter>> {
        if f == 0 {
            return invalid("modulus must be positive");
        }
        let u = UnitGroup::new(f)?;
        let orders = u.orders();
        let d = orders.iter().fold(1u64, |acc, &o| acc / gcd(acc, o) * o);
        let logs: Vec<Option<Vec<u64>>> = (0..f).map(|a| u.log(a as i64)).collect();
        let mut out = Vec::new();
        let total: u64 = orders.iter().product();
        for idx in 0..total {
            // choice kᵢ mod oᵢ on the i-th generator
            let mut ks = vec![0u64; orders.len()];
            let mut r = idx;
            for i in (0..orders.len()).rev() {
                ks[i] = r % orders[i];
                r /= orders[i];
            }
            let exps = logs
                .iter()
                .map(|l| {
                    l.as_ref().map(|e| {
                        e.iter()
                            .zip(&ks)
                            .zip(&orders)
                            .map(|((&ei, &ki), &oi)| ei * ki % oi * (d / oi))
                            .sum::<u64>()
                            % d
                    })
                })
                .collect();
            out.push(DirichletCharacter {
                modulus: f,
                d,
                exps,
            });
        }
        Ok(out)
    }

    pub fn exponent(&self, a: i64) -> Option<u64> {
        self.exps[a.rem_euclid(self.modulus as i64) as usize]
    }

    /// ψ(a) ∈ Q(ζ_d), zero when gcd(a, f) > 1.
    pub fn value(&self, a: i64) -> Cyclotomic {
        match self.exponent(a) {
            Some(k) => Cyclotomic::root(self.d, k),
            None => Cyclotomic::zero(self.d),
        }
    }

    pub fn conj(&self) -> DirichletCharacter {
        DirichletCharacter {
            modulus: self.modulus,
            d: self.d,
            exps: self
                .exps
                .iter()
                .map(|e| e.map(|k| (self.d - k) % self.d))
                .collect(),
        }
    }

    pub fn is_odd(&self) -> bool {
        self.exponent(-1) == Some(self.d / 2) && self.d.is_multiple_of(2)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|e| matches!(e, None | Some(0)))
    }

    /// Smallest f′ | f such that ψ is trivial on units ≡ 1 mod f′.
    pub fn conductor(&self) -> u64 {
        let f = self.modulus;
        (1..=f)
            .filter(|g| f.is_multiple_of(*g))
            .find(|&g| {
                (0..f).all(|a| gcd(a, f) != 1 || a % g != 1 % g || self.exps[a as usize] == Some(0))
            })
            .unwrap_or(f)
    }

    /// ψ viewed modulo a multiple of its modulus.
    pub fn lift(&self, m: u64) -> Result<DirichletCharacter> {
        if !m.is_multiple_of(self.modulus) {
            return invalid("lift target must be a multiple of the modulus");
        }
        let exps = (0..m)
            .map(|a| {
                if gcd(a, m) == 1 {
                    self.exps[(a % self.modulus) as usize]
                } else {
                    None
                }
            })
            .collect();
        Ok(DirichletCharacter {
            modulus: m,
            d: self.d,
            exps,
        })
    }
}

/// B_{1,ψ} = (1/f) Σ_{a=1}^{f} a·ψ(a) for ψ mod f.
pub fn bernoulli_one(psi: &DirichletCharacter) -> Cyclotomic {
    let f = psi.modulus;
    let mut acc = Cyclotomic::zero(psi.d);
    for a in 1..=f {
        if let Some(k) = psi.exponent(a as i64) {
            acc.coeffs[k as usize] += BigRational::from_integer(BigInt::from(a));
        }
    }
    acc.scale(&BigRational::new(BigInt::one(), BigInt::from(f)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_sum_to_zero() {
        let d = 12;
        let mut s = Cyclotomic::zero(d);
        for k in (1..d).filter(|&k| gcd(k, d) == 1) {
            s = &s + &Cyclotomic::root(d, k);
        }
        // the primitive 12th roots sum to μ(12) = 0
        assert!(s.is_zero());
        assert_eq!(
            &Cyclotomic::root(d, 6) * &Cyclotomic::root(d, 6),
            Cyclotomic::root(d, 0)
        );
    }

    #[test]
    fn quadratic_character_mod_7() {
        let chars = DirichletCharacter::all(7).unwrap();
        assert_eq!(chars.len(), 6);
        let quad: Vec<_> = chars
            .iter()
            .filter(|c| c.is_odd() && c.conj() == **c)
            .collect();
        assert_eq!(quad.len(), 1);
        let b = bernoulli_one(quad[0]);
        assert_eq!(
            b,
            Cyclotomic::rational(quad[0].d, BigRational::from_integer((-1).into()))
        );
        assert_eq!(quad[0].conductor(), 7);
        assert_eq!(chars.iter().filter(|c| c.conductor() == 1).count(), 1);
    }
}
