//! Dirichlet characters with values in the (p−1)-th roots of unity of Z/pⁿ.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ring::{gcd, mul_mod, pow_mod, teichmuller};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterSpec {
    pub modulus: u64,
    pub p: u64,
    pub n: u32,
    /// Indexed by a mod f; zero on non-units.
    values: Vec<u64>,
    pub order: u64,
    pub even: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterJson {
    pub modulus: u64,
    /// Pairs [a, χ(a)] as decimal strings, one per unit class.
    pub values: Vec<[String; 2]>,
}

impl CharacterSpec {
    /// Builds and validates a character from χ(a) for each unit a mod f.
    pub fn from_fn(f: u64, p: u64, n: u32, chi: impl Fn(u64) -> u64) -> Result<CharacterSpec> {
        if f == 0 {
            return invalid("modulus must be positive");
        }
        let m = p.pow(n);
        let units: Vec<u64> = (0..f).filter(|&a| gcd(a, f) == 1).collect();
        let mut values = vec![0; f as usize];
        for &a in &units {
            values[a as usize] = chi(a) % m;
        }
        for &a in &units {
            let x = values[a as usize];
            if pow_mod(x, p - 1, m) != 1 % m {
                return invalid(format!("χ({a}) = {x} is not a (p−1)-th root of unity"));
            }
            for &b in &units {
                if values[((a * b) % f) as usize] != mul_mod(x, values[b as usize], m) {
                    return invalid(format!("χ is not multiplicative at ({a}, {b})"));
                }
            }
        }
        let order = (1..=p - 1)
            .find(|&k| {
                (p - 1).is_multiple_of(k)
                    && units
                        .iter()
                        .all(|&a| pow_mod(values[a as usize], k, m) == 1 % m)
            })
            .unwrap();
        let minus = values[((f - 1) % f) as usize];
        let even = f <= 2 || minus == 1 % m;
        Ok(CharacterSpec {
            modulus: f,
            p,
            n,
            values,
            order,
            even,
        })
    }

    /// The trivial character mod 1.
    pub fn trivial(p: u64, n: u32) -> CharacterSpec {
        CharacterSpec::from_fn(1, p, n, |_| 1).unwrap()
    }

    /// The Legendre symbol mod an odd prime ℓ, lifted to Z/pⁿ.
    pub fn legendre(ell: u64, p: u64, n: u32) -> Result<CharacterSpec> {
        if ell < 3 || !crate::ring::is_prime(ell) {
            return invalid(format!("{ell} is not an odd prime"));
        }
        let m = p.pow(n);
        CharacterSpec::from_fn(ell, p, n, |a| {
            if pow_mod(a, (ell - 1) / 2, ell) == 1 {
                1
            } else {
                m - 1
            }
        })
    }

    /// ω^k on (Z/p)^×.
    pub fn teichmuller_power(p: u64, n: u32, k: u64) -> Result<CharacterSpec> {
        let m = p.pow(n);
        CharacterSpec::from_fn(p, p, n, |a| {
            pow_mod(teichmuller(p, n, a as i64).unwrap(), k, m)
        })
    }

    pub fn value(&self, a: i64) -> u64 {
        let f = self.modulus as i64;
        self.values[a.rem_euclid(f) as usize]
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Smallest d | f through which χ factors.
    pub fn conductor(&self) -> u64 {
        let f = self.modulus;
        let one = 1 % self.p.pow(self.n);
        (1..=f)
            .filter(|d| f.is_multiple_of(*d))
            .find(|&d| {
                (0..f).all(|a| gcd(a, f) != 1 || a % d != 1 % d || self.values[a as usize] == one)
            })
            .unwrap()
    }

    pub fn to_json(&self) -> CharacterJson {
        let values = (0..self.modulus)
            .filter(|&a| gcd(a, self.modulus) == 1)
            .map(|a| [a.to_string(), self.values[a as usize].to_string()])
            .collect();
        CharacterJson {
            modulus: self.modulus,
            values,
        }
    }

    pub fn from_json(j: &CharacterJson, p: u64, n: u32) -> Result<CharacterSpec> {
        let mut table = vec![None; j.modulus.max(1) as usize];
        for [a, v] in &j.values {
            let a: u64 = a
                .parse()
                .map_err(|_| crate::Error::Parse(format!("bad unit {a}")))?;
            let v: u64 = v
                .parse()
                .map_err(|_| crate::Error::Parse(format!("bad value {v}")))?;
            if a >= j.modulus {
                return invalid(format!("unit {a} out of range"));
            }
            table[a as usize] = Some(v);
        }
        for a in 0..j.modulus {
            if gcd(a, j.modulus) == 1 && table[a as usize].is_none() {
                return invalid(format!("missing χ({a})"));
            }
        }
        CharacterSpec::from_fn(j.modulus, p, n, |a| table[a as usize].unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_113_is_even_quadratic() {
        let chi = CharacterSpec::legendre(113, 3, 2).unwrap();
        assert!(chi.even);
        assert_eq!(chi.order, 2);
        assert_eq!(chi.conductor(), 113);
        for q in [7, 13, 31] {
            assert_eq!(chi.value(q), 1);
        }
    }

    #[test]
    fn legendre_7_is_odd() {
        let chi = CharacterSpec::legendre(7, 3, 1).unwrap();
        assert!(!chi.even);
    }

    #[test]
    fn omega_has_full_order() {
        let w = CharacterSpec::teichmuller_power(5, 2, 1).unwrap();
        assert_eq!(w.order, 4);
        assert!(!w.even);
        assert_eq!(w.value(4), 24);
        let w2 = CharacterSpec::teichmuller_power(5, 2, 2).unwrap();
        assert!(w2.even);
    }

    #[test]
    fn rejects_non_multiplicative() {
        assert!(CharacterSpec::from_fn(5, 3, 1, |a| if a == 2 { 2 } else { 1 }).is_err());
    }

    #[test]
    fn imprimitive_conductor() {
        let chi = CharacterSpec::legendre(5, 3, 1).unwrap();
        let lifted = CharacterSpec::from_fn(35, 3, 1, |a| chi.value(a as i64)).unwrap();
        assert_eq!(lifted.conductor(), 5);
    }

    #[test]
    fn json_round_trip() {
        let chi = CharacterSpec::legendre(13, 3, 2).unwrap();
        assert_eq!(CharacterSpec::from_json(&chi.to_json(), 3, 2).unwrap(), chi);
    }
}
