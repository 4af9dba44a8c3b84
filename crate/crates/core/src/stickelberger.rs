//! Stickelberger elements over Q, their flat projections, the twist Tw and the
//! modified p-adic L-elements at finite level, packaged as Euler-system windows.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::character::CharacterSpec;
use crate::cyclotomic::{Cyclotomic, DirichletCharacter};
use crate::error::{hypothesis, invalid, Error, Result};
use crate::ring::{
    gcd, int_valuation, inv_mod, is_prime, mul_mod, pow_mod, teichmuller, GroupRingElement, Ring,
};
use crate::units::{primitive_root, UnitGroup};

fn rat(num: i128, den: i128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// ζ(0, σ_a) = 1/2 − ⟨a/m⟩ with ⟨x⟩ ∈ (0, 1].
pub fn partial_zeta_zero(m: u64, a: i64) -> Result<BigRational> {
    if m < 2 {
        return invalid("modulus must exceed 1");
    }
    let r = a.rem_euclid(m as i64) as u64;
    if gcd(r, m) != 1 {
        return invalid(format!("{a} is not a unit mod {m}"));
    }
    Ok(rat(1, 2) - rat(r as i128, m as i128))
}

/// Gal(Q(μ_m)/Q) = (Z/m)^×, elements σ_a listed by ascending a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicLevel {
    pub m: u64,
    pub units: Vec<u64>,
    index: Vec<Option<usize>>,
}

impl CyclotomicLevel {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return invalid("modulus must exceed 1");
        }
        let units: Vec<u64> = (1..m).filter(|&a| gcd(a, m) == 1).collect();
        let mut index = vec![None; m as usize];
        for (i, &a) in units.iter().enumerate() {
            index[a as usize] = Some(i);
        }
        Ok(CyclotomicLevel { m, units, index })
    }

    pub fn order(&self) -> usize {
        self.units.len()
    }

    pub fn position(&self, a: i64) -> Option<usize> {
        self.index[a.rem_euclid(self.m as i64) as usize]
    }
}

/// Σ c_a σ_a⁻¹ with exact rational c_a, stored under the key a.
#[derive(Debug, Clone, PartialEq)]
pub struct StickelbergerElement {
    pub level: CyclotomicLevel,
    pub extra_primes: Vec<u64>,
    pub coeffs: Vec<BigRational>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StickelbergerJson {
    pub m: String,
    pub extra_primes: Vec<String>,
    pub coeffs: BTreeMap<String, String>,
}

/// θ_m times Π_{q ∈ extra}(1 − Frob_q⁻¹).
pub fn stickelberger_element(m: u64, extra_primes: &[u64]) -> Result<StickelbergerElement> {
    let level = CyclotomicLevel::new(m)?;
    let coeffs = level
        .units
        .iter()
        .map(|&a| partial_zeta_zero(m, a as i64))
        .collect::<Result<_>>()?;
    let mut x = StickelbergerElement {
        level,
        extra_primes: vec![],
        coeffs,
    };
    for &q in extra_primes {
        if !is_prime(q) || m.is_multiple_of(q) {
            return invalid(format!("extra prime {q} must be a prime not dividing {m}"));
        }
        x = x.euler_factor(q);
    }
    Ok(x)
}

impl StickelbergerElement {
    pub fn coeff(&self, a: i64) -> Option<&BigRational> {
        self.level.position(a).map(|i| &self.coeffs[i])
    }

    /// (1 − σ_q⁻¹)·x; σ_q⁻¹σ_b⁻¹ = σ_{qb}⁻¹ moves the key b to qb.
    pub fn euler_factor(&self, q: u64) -> StickelbergerElement {
        let m = self.level.m;
        let mut out = self.coeffs.clone();
        for (i, &b) in self.level.units.iter().enumerate() {
            let j = self
                .level
                .position((b * (q % m) % m) as i64)
                .expect("q is a unit");
            out[j] -= &self.coeffs[i];
        }
        let mut extra = self.extra_primes.clone();
        extra.push(q);
        StickelbergerElement {
            level: self.level.clone(),
            extra_primes: extra,
            coeffs: out,
        }
    }

    /// Image under Gal(Q(μ_m)/Q) → Gal(Q(μ_d)/Q) for d | m.
    pub fn project(&self, d: u64) -> Result<StickelbergerElement> {
        if d < 2 || !self.level.m.is_multiple_of(d) {
            return invalid(format!("{d} does not divide {}", self.level.m));
        }
        let level = CyclotomicLevel::new(d)?;
        let mut coeffs = vec![BigRational::zero(); level.order()];
        for (i, &a) in self.level.units.iter().enumerate() {
            coeffs[level.position(a as i64).unwrap()] += &self.coeffs[i];
        }
        Ok(StickelbergerElement {
            level,
            extra_primes: self.extra_primes.clone(),
            coeffs,
        })
    }

    /// The ring map σ_a ↦ ψ(a); on θ this is Σ c_a ψ(a)⁻¹.
    pub fn evaluate(&self, psi: &DirichletCharacter) -> Result<Cyclotomic> {
        if !self.level.m.is_multiple_of(psi.modulus) {
            return invalid("character modulus must divide the level");
        }
        let conj = psi.conj();
        let mut acc = Cyclotomic::zero(psi.d);
        for (i, &a) in self.level.units.iter().enumerate() {
            let k = conj.exponent(a as i64).expect("units stay units");
            acc.coeffs[k as usize] += &self.coeffs[i];
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> StickelbergerJson {
        StickelbergerJson {
            m: self.level.m.to_string(),
            extra_primes: self.extra_primes.iter().map(|q| q.to_string()).collect(),
            coeffs: self
                .level
                .units
                .iter()
                .zip(&self.coeffs)
                .map(|(a, c)| (a.to_string(), c.to_string()))
                .collect(),
        }
    }

    /// The flat projection at full level, as a residue table keyed like `coeffs`.
    pub fn flat_projection(&self, p: u64, n: u32) -> Result<Vec<u64>> {
        let q = UnitQuotient::full(self.level.m, p)?;
        let mut x = vec![BigRational::zero(); q.size()];
        for (i, &a) in self.level.units.iter().enumerate() {
            x[q.inverse(q.unit_index(a))] += &self.coeffs[i];
        }
        let flat = q.flat(&x, n)?;
        Ok(self
            .level
            .units
            .iter()
            .map(|&a| flat[q.inverse(q.unit_index(a))])
            .collect())
    }
}

/// −B_{1,ψ̄}·Π_{q | m, q ∤ f}(1 − ψ̄(q)) for ψ primitive of conductor f.
pub fn theta_character_value(m: u64, psi: &DirichletCharacter) -> Result<Cyclotomic> {
    if !m.is_multiple_of(psi.modulus) {
        return invalid("conductor must divide the level");
    }
    let conj = psi.conj();
    let mut out = -&crate::cyclotomic::bernoulli_one(&conj);
    for (q, _) in crate::units::factor(m) {
        if !psi.modulus.is_multiple_of(q) {
            out =
                &out * &(&Cyclotomic::rational(psi.d, BigRational::one()) - &conj.value(q as i64));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Component {
    /// The slot-th exponent of a at the prime ℓ, reduced mod `order`.
    Log { ell: u64, slot: usize, order: u64 },
    /// The index k with χ(a) = z^k for a fixed generator z of im χ.
    Character { table: Vec<u64> },
}

/// A quotient of (Z/m)^× presented as a product of cyclic components.
#[derive(Debug, Clone)]
pub struct UnitQuotient {
    m: u64,
    p: u64,
    units: UnitGroup,
    comps: Vec<Component>,
    orders: Vec<u64>,
    /// Value mod p^e of the p-component generator.
    p_gen: Option<(u64, u64)>,
}

impl UnitQuotient {
    /// All of (Z/m)^×.
    pub fn full(m: u64, p: u64) -> Result<Self> {
        let units = UnitGroup::new(m)?;
        let mut comps = Vec::new();
        let mut orders = Vec::new();
        for (ell, k) in crate::units::factor(m) {
            let slots = units.log_at(ell, 1).map(|v| v.len()).unwrap_or(0);
            let all = units.orders();
            let before: usize = crate::units::factor(m)
                .iter()
                .take_while(|&&(l, _)| l != ell)
                .map(|&(l, _)| units.log_at(l, 1).map(|v| v.len()).unwrap_or(0))
                .sum();
            for s in 0..slots {
                comps.push(Component::Log {
                    ell,
                    slot: s,
                    order: all[before + s],
                });
                orders.push(all[before + s]);
            }
            let _ = k;
        }
        Self::assemble(m, p, units, comps, orders)
    }

    fn assemble(
        m: u64,
        p: u64,
        units: UnitGroup,
        comps: Vec<Component>,
        orders: Vec<u64>,
    ) -> Result<Self> {
        let e = if m.is_multiple_of(p) {
            int_valuation(m, p)
        } else {
            0
        };
        let p_gen = (e > 0).then(|| {
            let pe = p.pow(e);
            (primitive_root(p, e).unwrap(), pe)
        });
        let q = UnitQuotient {
            m,
            p,
            units,
            comps,
            orders,
            p_gen,
        };
        if q.size() > 1 << 22 {
            return invalid("quotient group too large");
        }
        Ok(q)
    }

    pub fn size(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn digits(&self, mut i: usize) -> Vec<u64> {
        let mut d = vec![0; self.orders.len()];
        for k in (0..self.orders.len()).rev() {
            d[k] = i as u64 % self.orders[k];
            i /= self.orders[k] as usize;
        }
        d
    }

    pub fn index(&self, d: &[u64]) -> usize {
        d.iter()
            .zip(&self.orders)
            .fold(0, |acc, (&x, &o)| acc * o as usize + (x % o) as usize)
    }

    pub fn unit_digits(&self, a: u64) -> Vec<u64> {
        self.comps
            .iter()
            .map(|c| match c {
                Component::Log { ell, slot, order } => {
                    self.units.log_at(*ell, a as i64).expect("unit")[*slot] % order
                }
                Component::Character { table } => table[(a % table.len() as u64) as usize],
            })
            .collect()
    }

    pub fn unit_index(&self, a: u64) -> usize {
        self.index(&self.unit_digits(a))
    }

    pub fn inverse(&self, i: usize) -> usize {
        let d: Vec<u64> = self
            .digits(i)
            .iter()
            .zip(&self.orders)
            .map(|(&x, &o)| (o - x) % o)
            .collect();
        self.index(&d)
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        let (a, b) = (self.digits(i), self.digits(j));
        let d: Vec<u64> = a
            .iter()
            .zip(&b)
            .zip(&self.orders)
            .map(|((&x, &y), &o)| (x + y) % o)
            .collect();
        self.index(&d)
    }

    /// The p-part of the unit an element represents, modulo p^e.
    fn p_unit(&self, i: usize) -> u64 {
        let Some((g, pe)) = self.p_gen else { return 1 };
        let d = self.digits(i);
        let mut v = 1;
        for (c, &x) in self.comps.iter().zip(&d) {
            if let Component::Log { ell, .. } = c {
                if *ell == self.p {
                    v = mul_mod(v, pow_mod(g, x, pe), pe);
                }
            }
        }
        v
    }

    /// The prime-to-p part Δ of the group.
    fn delta(&self) -> Vec<usize> {
        let steps: Vec<u64> = self
            .orders
            .iter()
            .map(|&o| {
                self.p.pow(if o % self.p == 0 {
                    int_valuation(o, self.p)
                } else {
                    0
                })
            })
            .collect();
        (0..self.size())
            .filter(|&i| self.digits(i).iter().zip(&steps).all(|(&x, &s)| x % s == 0))
            .collect()
    }

    /// x ↦ ((1 − c)/2)x − e_ω x, reduced mod pⁿ; an error unless p-integral.
    pub fn flat(&self, x: &[BigRational], n: u32) -> Result<Vec<u64>> {
        let p = self.p;
        if self.p_gen.is_none() {
            return hypothesis(format!("level {} does not contain μ_{p}", self.m));
        }
        let s = x
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| {
                let d = c
                    .denom()
                    .to_u64()
                    .ok_or_else(|| Error::Invalid("denominator too large".into()))?;
                Ok(int_valuation(d, p))
            })
            .collect::<Result<Vec<u32>>>()?
            .into_iter()
            .max()
            .unwrap_or(0);
        let big = p.pow(n + s);
        let scale = BigInt::from(p.pow(s));
        let res: Vec<u64> = x
            .iter()
            .map(|c| rational_mod(&(c * &scale), big))
            .collect::<Result<_>>()?;
        let c = self.unit_index(self.m - 1);
        let half = inv_mod(2, big).unwrap();
        let delta = self.delta();
        let dinv = inv_mod(delta.len() as u64 % big, big)
            .ok_or_else(|| Error::Hypothesis("|Δ| divisible by p".into()))?;
        let omega: Vec<u64> = delta
            .iter()
            .map(|&d| teichmuller(p, n + s, (self.p_unit(d) % p) as i64))
            .collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(self.size());
        for g in 0..self.size() {
            let odd = mul_mod((res[g] + big - res[self.mul(c, g)]) % big, half, big);
            let mut ew = 0u64;
            for (k, &d) in delta.iter().enumerate() {
                ew = (ew + mul_mod(omega[k], res[self.mul(d, g)], big)) % big;
            }
            let v = (odd + big - mul_mod(ew, dinv, big)) % big;
            if !v.is_multiple_of(p.pow(s)) {
                return Err(Error::NotIntegral(format!(
                    "flat coefficient {v} mod {big} not divisible by p^{s}"
                )));
            }
            out.push(v / p.pow(s) % p.pow(n));
        }
        Ok(out)
    }

    /// Tw: g ↦ χ_cyc(g)·g⁻¹ on residues mod pⁿ; needs μ_{pⁿ} in the level.
    pub fn twist(&self, x: &[u64], n: u32) -> Result<Vec<u64>> {
        let pn = self.p.pow(n);
        match self.p_gen {
            Some((_, pe)) if pe % pn == 0 => {}
            _ => return hypothesis(format!("χ_cyc mod {pn} is not defined at level {}", self.m)),
        }
        let mut out = vec![0u64; x.len()];
        for (g, &c) in x.iter().enumerate() {
            let h = self.inverse(g);
            out[h] = (out[h] + mul_mod(c, self.p_unit(g) % pn, pn)) % pn;
        }
        Ok(out)
    }
}

fn rational_mod(c: &BigRational, m: u64) -> Result<u64> {
    let mb = BigInt::from(m);
    let num = c.numer().mod_floor(&mb).to_u64().unwrap();
    let den = c.denom().mod_floor(&mb).to_u64().unwrap();
    let inv = inv_mod(den, m)
        .ok_or_else(|| Error::NotIntegral(format!("{c} is not integral mod {m}")))?;
    Ok(mul_mod(num, inv, m))
}

/// Twist on exact elements of a cyclotomic level: σ_a ↦ (a mod pⁿ)·σ_a⁻¹.
pub fn twist_level(level: &CyclotomicLevel, x: &[u64], p: u64, n: u32) -> Result<Vec<u64>> {
    let pn = p.pow(n);
    if !level.m.is_multiple_of(pn) {
        return hypothesis(format!(
            "χ_cyc mod {pn} is not defined at level {}",
            level.m
        ));
    }
    // x is keyed by a for σ_a⁻¹; Tw(σ_a⁻¹) = a⁻¹σ_a, i.e. key a⁻¹ with factor a⁻¹
    let mut out = vec![0u64; x.len()];
    for (i, &a) in level.units.iter().enumerate() {
        let ainv = inv_mod(a, level.m).unwrap();
        let j = level.position(ainv as i64).unwrap();
        out[j] = (out[j] + mul_mod(x[i], ainv % pn, pn)) % pn;
    }
    Ok(out)
}

/// An auxiliary prime q with G_q the degree-p^v quotient of (Z/q)^×.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeLabel {
    pub q: u64,
    /// #G_q.
    pub order: u64,
    /// The primitive root g whose image generates G_q as σ_q.
    pub root: u64,
}

impl PrimeLabel {
    /// #G_q = p^{min(v_p(q−1), cap)}.
    pub fn new(q: u64, p: u64, cap: u32) -> Result<Self> {
        if !is_prime(q) || q == p || q == 2 {
            return invalid(format!("{q} is not an odd prime different from p"));
        }
        let v = int_valuation(q - 1, p).min(cap);
        Ok(PrimeLabel {
            q,
            order: p.pow(v),
            root: primitive_root(q, 1)?,
        })
    }

    /// The exponent j with a ≡ root^j mod q, reduced mod #G_q.
    pub fn log(&self, a: i64) -> u64 {
        let a = a.rem_euclid(self.q as i64) as u64;
        let mut x = 1;
        for j in 0..self.q - 1 {
            if x == a {
                return j % self.order;
            }
            x = x * self.root % self.q;
        }
        panic!("{a} is not a unit mod {}", self.q)
    }

    /// q ≡ 1 mod p^N.
    pub fn admissible(&self, p: u64, big_n: u32) -> bool {
        (self.q - 1).is_multiple_of(p.pow(big_n))
    }
}

/// Parameters shared by every field in a window: p, n, the cyclotomic layer t and χ.
#[derive(Debug, Clone)]
pub struct LSetup {
    pub p: u64,
    pub n: u32,
    pub t: u32,
    pub chi: CharacterSpec,
}

impl LSetup {
    pub fn new(p: u64, n: u32, t: u32, chi: CharacterSpec) -> Result<Self> {
        if t > n {
            return invalid("layer t must not exceed n");
        }
        if chi.p != p || chi.n != n {
            return invalid("character must take values in Z/pⁿ");
        }
        if !chi.even {
            return hypothesis("χ must be even");
        }
        if chi.is_trivial() {
            return hypothesis("χ must be nontrivial");
        }
        if chi.modulus.is_multiple_of(p) {
            return hypothesis("the conductor of χ must be prime to p");
        }
        if chi.conductor() != chi.modulus {
            return hypothesis("χ must be given at its conductor");
        }
        Ok(LSetup { p, n, t, chi })
    }

    /// Level p^e of μ used for the construction.
    pub fn e(&self) -> u32 {
        self.n.max(self.t + 1)
    }
}

/// R_{K,n} for K = k(𝔫): (Z/pⁿ)[Π G_q × Gal(k_t/Q)].
#[derive(Debug, Clone)]
pub struct Layer {
    pub p: u64,
    pub n: u32,
    pub t: u32,
    pub labels: Vec<PrimeLabel>,
    pub ring: Ring,
    /// Ring digit position of each logical component (labels, then Γ), if nontrivial.
    slots: Vec<Option<usize>>,
    orders: Vec<u64>,
    gamma_root: u64,
}

impl Layer {
    pub fn new(p: u64, n: u32, t: u32, labels: &[PrimeLabel]) -> Result<Self> {
        let mut labels = labels.to_vec();
        labels.sort_by_key(|l| l.q);
        let mut orders: Vec<u64> = labels.iter().map(|l| l.order).collect();
        orders.push(p.pow(t));
        let mut order: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] > 1).collect();
        order.sort_by_key(|&i| (orders[i], i));
        let mut slots = vec![None; orders.len()];
        for (pos, &i) in order.iter().enumerate() {
            slots[i] = Some(pos);
        }
        let factors: Vec<u64> = order.iter().map(|&i| orders[i]).collect();
        let ring = Ring::new(p, n, &factors)?;
        Ok(Layer {
            p,
            n,
            t,
            labels,
            ring,
            slots,
            orders,
            gamma_root: primitive_root(p, 2)?,
        })
    }

    pub fn label_set(&self) -> Vec<u64> {
        self.labels.iter().map(|l| l.q).collect()
    }

    /// Group index of an element given by logical digits.
    pub fn element(&self, logical: &[u64]) -> usize {
        let mut d = vec![0u64; self.ring.invariant_factors().len()];
        for (i, &x) in logical.iter().enumerate() {
            if let Some(s) = self.slots[i] {
                d[s] = x % self.orders[i];
            }
        }
        self.ring.index(&d)
    }

    pub fn logical(&self, g: usize) -> Vec<u64> {
        let d = self.ring.digits(g);
        self.slots.iter().map(|s| s.map_or(0, |s| d[s])).collect()
    }

    /// Γ-coordinate of a unit: its log to a fixed primitive root mod p², reduced mod p^t.
    pub fn gamma_log(&self, a: u64) -> u64 {
        let pt = self.p.pow(self.t);
        if pt == 1 {
            return 0;
        }
        let modulus = self.p.pow(self.t + 1);
        let order = (self.p - 1) * pt;
        let a = a % modulus;
        let mut x = 1;
        for j in 0..order {
            if x == a {
                return j % pt;
            }
            x = x * self.gamma_root % modulus;
        }
        panic!("{a} is not a unit mod p")
    }

    /// The image of σ_a for a unit a prime to all labels and p.
    pub fn sigma(&self, a: u64) -> usize {
        let mut d: Vec<u64> = self.labels.iter().map(|l| l.log(a as i64)).collect();
        d.push(self.gamma_log(a));
        self.element(&d)
    }

    /// Frob_q, taken trivial on G_q when q is one of the labels.
    pub fn frob(&self, q: u64) -> usize {
        let mut d: Vec<u64> = self
            .labels
            .iter()
            .map(|l| if l.q == q { 0 } else { l.log(q as i64) })
            .collect();
        d.push(self.gamma_log(q));
        self.element(&d)
    }

    /// σ_q: the chosen generator of G_q.
    pub fn sigma_q(&self, q: u64) -> Result<usize> {
        let i = self
            .labels
            .iter()
            .position(|l| l.q == q)
            .ok_or_else(|| Error::Invalid(format!("{q} is not a label")))?;
        let mut d = vec![0u64; self.orders.len()];
        d[i] = 1;
        Ok(self.element(&d))
    }

    /// u_q = χ(q)⁻¹·q·Frob_q⁻¹.
    pub fn u(&self, chi: &CharacterSpec, q: u64) -> GroupRingElement {
        let pn = self.ring.modulus();
        let c = mul_mod(inv_mod(chi.value(q as i64), pn).unwrap(), q % pn, pn);
        self.ring.basis(self.ring.inv(self.frob(q))).scale(c)
    }

    /// P_q(Frob_q⁻¹) = 1 − u_q.
    pub fn euler_factor(&self, chi: &CharacterSpec, q: u64) -> GroupRingElement {
        &self.ring.one() - &self.u(chi, q)
    }

    /// The projection to the layer of a subset of the labels.
    pub fn project_to(&self, x: &GroupRingElement, target: &Layer) -> Result<GroupRingElement> {
        if target.t != self.t || !target.labels.iter().all(|l| self.labels.contains(l)) {
            return invalid("target layer is not a quotient");
        }
        x.map_group(&target.ring, |g| {
            let d = self.logical(g);
            let mut out: Vec<u64> = target
                .labels
                .iter()
                .map(|l| d[self.labels.iter().position(|k| k == l).unwrap()])
                .collect();
            out.push(d[self.labels.len()]);
            target.element(&out)
        })
    }

    /// The inclusion R_{K,n} → R_{K,n}[G_𝔫] of a sub-layer.
    pub fn include_from(&self, x: &GroupRingElement, source: &Layer) -> Result<GroupRingElement> {
        self.check_sublayer(source)?;
        x.map_group(&self.ring, |g| self.embed(source, g))
    }

    pub fn check_sublayer(&self, source: &Layer) -> Result<()> {
        if source.t != self.t || !source.labels.iter().all(|l| self.labels.contains(l)) {
            return invalid("source layer is not a sub-layer");
        }
        Ok(())
    }

    /// Image of a group element of a sub-layer, with digit 0 at the extra labels.
    pub fn embed(&self, source: &Layer, g: usize) -> usize {
        let d = source.logical(g);
        let mut out = vec![0u64; self.orders.len()];
        for (i, l) in source.labels.iter().enumerate() {
            out[self.labels.iter().position(|k| k == l).unwrap()] = d[i];
        }
        out[self.labels.len()] = d[source.labels.len()];
        self.element(&out)
    }
}

/// L_{p,K}^χ in R_{K,n} for K = k(𝔫) with 𝔫 the given labels.
pub fn modified_p_adic_l(
    setup: &LSetup,
    labels: &[PrimeLabel],
) -> Result<(Layer, GroupRingElement)> {
    let (p, n) = (setup.p, setup.n);
    let f = setup.chi.modulus;
    for l in labels {
        if f.is_multiple_of(l.q) {
            return hypothesis(format!("label {} divides the conductor of χ", l.q));
        }
    }
    let layer = Layer::new(p, n, setup.t, labels)?;
    let e = setup.e();
    let m = f * p.pow(e) * layer.labels.iter().map(|l| l.q).product::<u64>();
    let quotient = UnitQuotient::for_layer(setup, &layer, m)?;
    let x = theta_pushforward(m, &quotient);
    let flat = quotient.flat(&x, n)?;
    let tw = quotient.twist(&flat, n)?;
    let out = quotient.to_layer(setup, &layer, &tw);
    let mut l = layer.ring.element(out)?;
    for lab in &layer.labels {
        l = &l * &(-&layer.u(&setup.chi, lab.q));
    }
    Ok((layer, l))
}

/// θ_m pushed to a quotient, as coefficients of group elements.
fn theta_pushforward(m: u64, q: &UnitQuotient) -> Vec<BigRational> {
    let mut sums = vec![0i128; q.size()];
    for a in 1..m {
        if gcd(a, m) == 1 {
            let g = q.inverse(q.unit_index(a));
            sums[g] += m as i128 - 2 * a as i128;
        }
    }
    sums.into_iter().map(|s| rat(s, 2 * m as i128)).collect()
}

impl UnitQuotient {
    /// G_𝔫 × Gal(L/Q) × (Z/p^e)^× as a quotient of (Z/m)^×.
    fn for_layer(setup: &LSetup, layer: &Layer, m: u64) -> Result<Self> {
        let units = UnitGroup::new(m)?;
        let p = setup.p;
        let mut comps: Vec<Component> = layer
            .labels
            .iter()
            .map(|l| Component::Log {
                ell: l.q,
                slot: 0,
                order: l.order,
            })
            .collect();
        let chi = &setup.chi;
        let pn = p.pow(setup.n);
        let z = pow_mod(
            teichmuller(p, setup.n, primitive_root(p, 1)? as i64)?,
            (p - 1) / chi.order,
            pn,
        );
        let powers: Vec<u64> = (0..chi.order).map(|k| pow_mod(z, k, pn)).collect();
        let table = (0..chi.modulus)
            .map(|a| {
                let v = chi.value(a as i64);
                powers.iter().position(|&w| w == v).map_or(0, |k| k as u64)
            })
            .collect();
        comps.push(Component::Character { table });
        let e = setup.e();
        comps.push(Component::Log {
            ell: p,
            slot: 0,
            order: (p - 1) * p.pow(e - 1),
        });
        let mut orders: Vec<u64> = layer.labels.iter().map(|l| l.order).collect();
        orders.push(chi.order);
        orders.push((p - 1) * p.pow(e - 1));
        // the label logs must use the same roots as the layer
        for l in &layer.labels {
            debug_assert_eq!(primitive_root(l.q, 1).ok(), Some(l.root));
        }
        Self::assemble(m, p, units, comps, orders)
    }

    /// e_χ: g ↦ χ(δ(g))·π(g) into R_{K,n}.
    fn to_layer(&self, setup: &LSetup, layer: &Layer, x: &[u64]) -> Vec<u64> {
        let pn = setup.p.pow(setup.n);
        let k = layer.labels.len();
        let pt = setup.p.pow(setup.t);
        let z = pow_mod(
            teichmuller(setup.p, setup.n, primitive_root(setup.p, 1).unwrap() as i64).unwrap(),
            (setup.p - 1) / setup.chi.order,
            pn,
        );
        let mut out = vec![0u64; layer.ring.order()];
        for (g, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let d = self.digits(g);
            let mut logical: Vec<u64> = d[..k].to_vec();
            // the p-component is cyclic of order (p−1)p^{e−1}; Γ_t is its quotient mod p^t
            logical.push(d[k + 1] % pt);
            let chi = pow_mod(z, d[k], pn);
            let h = layer.element(&logical);
            out[h] = (out[h] + mul_mod(c, chi, pn)) % pn;
        }
        out
    }
}

/// A finite family of layers K = k(𝔫) with a value c_K in each R_{K,n}.
#[derive(Debug, Clone)]
pub struct EulerSystemWindow {
    pub setup: LSetup,
    pub pool: Vec<PrimeLabel>,
    pub values: BTreeMap<Vec<u64>, (Layer, GroupRingElement)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowFailure {
    pub from: Vec<u64>,
    pub to: Vec<u64>,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowReport {
    pub valid: bool,
    pub pairs_checked: usize,
    pub failure: Option<WindowFailure>,
}

/// Subsets of `pool` of size at most `max`, in lexicographic order of positions.
pub fn label_subsets<T: Clone>(pool: &[T], max: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for r in 0..=max.min(pool.len()) {
        for s in crate::exterior::subsets(pool.len(), r) {
            out.push(s.iter().map(|&i| pool[i].clone()).collect());
        }
    }
    out
}

impl EulerSystemWindow {
    /// The Stickelberger window: L_{p,k(𝔫)}^χ for 𝔫 over subsets of the pool.
    pub fn stickelberger(setup: &LSetup, pool: &[PrimeLabel], max_nu: usize) -> Result<Self> {
        let mut pool = pool.to_vec();
        pool.sort_by_key(|l| l.q);
        let mut values = BTreeMap::new();
        for sub in label_subsets(&pool, max_nu) {
            let (layer, l) = modified_p_adic_l(setup, &sub)?;
            values.insert(layer.label_set(), (layer, l));
        }
        Ok(EulerSystemWindow {
            setup: setup.clone(),
            pool,
            values,
        })
    }

    pub fn get(&self, labels: &[u64]) -> Result<&(Layer, GroupRingElement)> {
        let mut key = labels.to_vec();
        key.sort_unstable();
        self.values
            .get(&key)
            .ok_or_else(|| Error::Invalid(format!("window has no level for {key:?}")))
    }

    /// Replaces one value, for corruption controls.
    pub fn with_value(&self, labels: &[u64], x: GroupRingElement) -> Result<Self> {
        let mut w = self.clone();
        let mut key = labels.to_vec();
        key.sort_unstable();
        let slot = w
            .values
            .get_mut(&key)
            .ok_or_else(|| Error::Invalid("no such level".into()))?;
        if x.ring() != &slot.0.ring {
            return Err(Error::RingMismatch("replacement value".into()));
        }
        slot.1 = x;
        Ok(w)
    }

    /// π(c_{K′}) = Π_{q ∈ 𝔫′∖𝔫} P_q(Frob_q⁻¹)·c_K for every nested pair.
    pub fn validate(&self) -> WindowReport {
        let mut checked = 0;
        for (big, (lb, cb)) in &self.values {
            for (small, (ls, cs)) in &self.values {
                if big == small || !small.iter().all(|q| big.contains(q)) {
                    continue;
                }
                checked += 1;
                let lhs = lb.project_to(cb, ls).expect("nested layers");
                let mut rhs = cs.clone();
                for q in big.iter().filter(|q| !small.contains(q)) {
                    rhs = &rhs * &ls.euler_factor(&self.setup.chi, *q);
                }
                if lhs != rhs {
                    return WindowReport {
                        valid: false,
                        pairs_checked: checked,
                        failure: Some(WindowFailure {
                            from: big.clone(),
                            to: small.clone(),
                            lhs: lhs.to_strings(),
                            rhs: rhs.to_strings(),
                        }),
                    };
                }
            }
        }
        WindowReport {
            valid: true,
            pairs_checked: checked,
            failure: None,
        }
    }
}

/// Signed rational as a "num/den" string.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else if r.is_negative() {
        format!("-{}/{}", r.numer().abs(), r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_five() {
        let t = stickelberger_element(5, &[]).unwrap();
        let want = [rat(3, 10), rat(1, 10), rat(-1, 10), rat(-3, 10)];
        assert_eq!(t.coeffs, want);
        assert!(partial_zeta_zero(5, 5).is_err());
        assert!(stickelberger_element(1, &[]).is_err());
        assert!(stickelberger_element(10, &[5]).is_err());
    }

    #[test]
    fn quadratic_mod_seven_evaluates_to_one() {
        let t = stickelberger_element(7, &[]).unwrap();
        let psi = DirichletCharacter::all(7)
            .unwrap()
            .into_iter()
            .find(|c| c.is_odd() && c.conj() == *c)
            .unwrap();
        assert_eq!(
            t.evaluate(&psi).unwrap(),
            Cyclotomic::rational(psi.d, BigRational::one())
        );
    }

    #[test]
    fn prop_rel_small() {
        for (m, q) in [(5u64, 2u64), (9, 7), (12, 5), (7, 3)] {
            let lhs = stickelberger_element(m * q, &[])
                .unwrap()
                .project(m)
                .unwrap();
            let rhs = stickelberger_element(m, &[q]).unwrap();
            assert_eq!(lhs.coeffs, rhs.coeffs, "m={m} q={q}");
        }
    }

    #[test]
    fn flat_projection_integral_at_21() {
        let t = stickelberger_element(21, &[]).unwrap();
        let flat = t.flat_projection(3, 2).unwrap();
        assert_eq!(flat.len(), 12);
        let even = stickelberger_element(21, &[]).unwrap();
        // c = σ₋₁ acts by −1 on the result
        let lvl = &even.level;
        for (i, &a) in lvl.units.iter().enumerate() {
            let j = lvl.position(21 - a as i64).unwrap();
            assert_eq!((flat[i] + flat[j]) % 9, 0);
        }
    }

    #[test]
    fn twist_examples() {
        let lvl = CyclotomicLevel::new(9).unwrap();
        // Tw(1) = 1 and Tw(σ₂⁻¹) = 2⁻¹σ₂ = 5·σ_{5}⁻¹ mod 9
        let one: Vec<u64> = lvl.units.iter().map(|&a| (a == 1) as u64).collect();
        assert_eq!(twist_level(&lvl, &one, 3, 2).unwrap(), one);
        let s2: Vec<u64> = lvl.units.iter().map(|&a| (a == 2) as u64).collect();
        let tw = twist_level(&lvl, &s2, 3, 2).unwrap();
        assert_eq!(tw[lvl.position(5).unwrap()], 5);
        assert_eq!(twist_level(&lvl, &tw, 3, 2).unwrap(), s2);
    }

    #[test]
    fn derivative_window_norm_relation() {
        let chi = CharacterSpec::legendre(5, 3, 2).unwrap();
        let setup = LSetup::new(3, 2, 2, chi).unwrap();
        let pool = vec![PrimeLabel::new(7, 3, 1).unwrap()];
        let w = EulerSystemWindow::stickelberger(&setup, &pool, 1).unwrap();
        let r = w.validate();
        assert!(r.valid, "{r:?}");
        assert_eq!(r.pairs_checked, 1);
        let (layer, x) = w.get(&[7]).unwrap().clone();
        let bad = w.with_value(&[7], &x + &layer.ring.one()).unwrap();
        let r = bad.validate();
        assert!(!r.valid);
        assert_eq!(r.failure.unwrap().from, vec![7]);
    }
}
