//! Unit groups (Z/m)^× as products of cyclic factors, with discrete logarithms.

use std::collections::HashMap;

use crate::error::{invalid, Result};
use crate::ring::{gcd, is_prime, pow_mod};

/// Prime factorization by trial division, ascending.
pub fn factor(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            let mut k = 0;
            while m.is_multiple_of(d) {
                m /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn totient(m: u64) -> u64 {
    factor(m)
        .iter()
        .fold(1, |acc, &(l, k)| acc * (l - 1) * l.pow(k - 1))
}

/// Smallest primitive root modulo an odd prime power.
pub fn primitive_root(ell: u64, k: u32) -> Result<u64> {
    if ell == 2 || !is_prime(ell) {
        return invalid(format!("{ell} is not an odd prime"));
    }
    let modulus = ell.pow(k);
    let phi = (ell - 1) * ell.pow(k - 1);
    let primes: Vec<u64> = factor(phi).into_iter().map(|(q, _)| q).collect();
    (2..modulus)
        .find(|&g| gcd(g, ell) == 1 && primes.iter().all(|&q| pow_mod(g, phi / q, modulus) != 1))
        .ok_or_else(|| crate::Error::Invalid("no primitive root".into()))
}

/// Discrete logarithm table of a cyclic group generated by g mod `modulus`.
pub fn log_table(g: u64, order: u64, modulus: u64) -> HashMap<u64, u64> {
    let mut t = HashMap::with_capacity(order as usize);
    let mut x = 1 % modulus;
    for i in 0..order {
        t.insert(x, i);
        x = x * g % modulus;
    }
    t
}

/// CRT lift of x mod q to a residue mod m that is 1 modulo m/q.
fn lift(x: u64, q: u64, m: u64) -> u64 {
    let rest = m / q;
    if rest == 1 {
        return x % m;
    }
    // y ≡ x mod q, y ≡ 1 mod rest
    let inv = crate::ring::inv_mod(rest % q, q).expect("coprime moduli");
    let t = (x % q + q - 1) % q * inv % q;
    (1 + (t as u128 * rest as u128 % m as u128) as u64) % m
}

#[derive(Debug, Clone)]
struct PrimePower {
    ell: u64,
    modulus: u64,
    /// (generator lifted to Z/m, order)
    gens: Vec<(u64, u64)>,
    logs: HashMap<u64, Vec<u64>>,
}

/// (Z/m)^× with one cyclic factor per odd prime power and up to two for the 2-part.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    m: u64,
    parts: Vec<PrimePower>,
}

impl UnitGroup {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return invalid("modulus must be positive");
        }
        let mut parts = Vec::new();
        for (ell, k) in factor(m) {
            let q = ell.pow(k);
            let mut logs = HashMap::new();
            let gens = if ell == 2 {
                match k {
                    1 => {
                        logs.insert(1, vec![]);
                        vec![]
                    }
                    2 => {
                        logs.insert(1, vec![0]);
                        logs.insert(3, vec![1]);
                        vec![(lift(3, q, m), 2)]
                    }
                    _ => {
                        let ord5 = q / 4;
                        let mut x = 1u64;
                        for j in 0..ord5 {
                            logs.insert(x, vec![0, j]);
                            logs.insert(q - x, vec![1, j]);
                            x = x * 5 % q;
                        }
                        vec![(lift(q - 1, q, m), 2), (lift(5, q, m), ord5)]
                    }
                }
            } else {
                let g = primitive_root(ell, k)?;
                let order = q / ell * (ell - 1);
                for (x, i) in log_table(g, order, q) {
                    logs.insert(x, vec![i]);
                }
                vec![(lift(g, q, m), order)]
            };
            parts.push(PrimePower {
                ell,
                modulus: q,
                gens,
                logs,
            });
        }
        Ok(UnitGroup { m, parts })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// Orders of the cyclic factors, in factor order.
    pub fn orders(&self) -> Vec<u64> {
        self.parts
            .iter()
            .flat_map(|p| p.gens.iter().map(|g| g.1))
            .collect()
    }

    /// Generators lifted to residues mod m.
    pub fn generators(&self) -> Vec<u64> {
        self.parts
            .iter()
            .flat_map(|p| p.gens.iter().map(|g| g.0))
            .collect()
    }

    pub fn order(&self) -> u64 {
        self.orders().iter().product()
    }

    /// Exponents of `a` on the generators.
    pub fn log(&self, a: i64) -> Option<Vec<u64>> {
        let a = a.rem_euclid(self.m as i64) as u64;
        if gcd(a, self.m) != 1 {
            return None;
        }
        let mut out = Vec::new();
        for p in &self.parts {
            out.extend_from_slice(p.logs.get(&(a % p.modulus))?);
        }
        Some(out)
    }

    /// Log of a modulo the ℓ-power part only, for the factor of prime ℓ.
    pub fn log_at(&self, ell: u64, a: i64) -> Option<Vec<u64>> {
        let p = self.parts.iter().find(|p| p.ell == ell)?;
        let a = a.rem_euclid(p.modulus as i64) as u64;
        p.logs.get(&a).cloned()
    }

    pub fn units(&self) -> Vec<u64> {
        (1..=self.m)
            .map(|a| a % self.m)
            .filter(|&a| gcd(a, self.m) == 1)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logs_reconstruct_units() {
        for m in [1u64, 2, 4, 8, 9, 15, 16, 21, 40, 63, 120] {
            let u = UnitGroup::new(m).unwrap();
            assert_eq!(u.order(), totient(m), "m={m}");
            let gens = u.generators();
            for a in u.units() {
                let e = u.log(a as i64).unwrap();
                let back = gens
                    .iter()
                    .zip(&e)
                    .fold(1 % m, |acc, (&g, &k)| acc * pow_mod(g, k, m) % m);
                assert_eq!(back, a % m, "m={m} a={a}");
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(7, 1).unwrap(), 3);
        assert_eq!(primitive_root(3, 3).unwrap(), 2);
        assert_eq!(primitive_root(13, 1).unwrap(), 2);
    }
}
