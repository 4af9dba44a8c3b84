//! Ideals of (Z/pⁿ)[G] in canonical form, and the ideal invariants of modules:
//! Fitting ideals, annihilators and characteristic ideals.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{det, subsets, wedge_coords, Bidual};
use crate::linalg::{kernel, preimage, HowellBasis, ResidueMatrix, Zpn};
use crate::module::{dual, expand_vectors, span, submodule_presentation, PresentedModule};
use crate::ring::{GroupRingElement, Ring, RingSpec};

/// An ideal as the Howell basis of its G-closed lattice in R ≅ (Z/pⁿ)^{|G|}.
#[derive(Clone)]
pub struct IdealHandle {
    ring: Ring,
    basis: HowellBasis,
    echo: Vec<GroupRingElement>,
}

impl PartialEq for IdealHandle {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.basis == other.basis
    }
}
impl Eq for IdealHandle {}

impl fmt::Debug for IdealHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{:?}", self.basis.rows)
    }
}

/// "(g₁, …, g_k)" with a generating set pruned from the Howell basis.
impl fmt::Display for IdealHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut gens: Vec<GroupRingElement> = self
            .basis
            .rows
            .iter()
            .filter_map(|r| self.ring.element(r.clone()).ok())
            .collect();
        let mut i = 0;
        while i < gens.len() {
            let rest: Vec<GroupRingElement> = gens
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, g)| g.clone())
                .collect();
            if IdealHandle::generated_by(&self.ring, &rest) == *self {
                gens = rest;
            } else {
                i += 1;
            }
        }
        if gens.is_empty() {
            return write!(f, "(0)");
        }
        let parts: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdealOrder {
    Equal,
    Subset,
    Superset,
    Incomparable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealReport {
    pub ring: RingSpec,
    pub howell_basis: Vec<Vec<String>>,
    pub generators_echo: Vec<Vec<String>>,
}

impl IdealHandle {
    pub fn generated_by(ring: &Ring, gens: &[GroupRingElement]) -> IdealHandle {
        let vs: Vec<Vec<u64>> = gens.iter().map(|g| g.coeffs().to_vec()).collect();
        IdealHandle {
            ring: ring.clone(),
            basis: span(ring, ring.order(), &vs),
            echo: gens.to_vec(),
        }
    }

    pub fn from_lattice(ring: &Ring, lattice: HowellBasis) -> IdealHandle {
        let echo = lattice
            .rows
            .iter()
            .map(|r| ring.element(r.clone()).unwrap())
            .collect();
        let basis = span(ring, ring.order(), &lattice.rows);
        IdealHandle {
            ring: ring.clone(),
            basis,
            echo,
        }
    }

    pub fn zero(ring: &Ring) -> IdealHandle {
        Self::generated_by(ring, &[])
    }

    pub fn unit(ring: &Ring) -> IdealHandle {
        Self::generated_by(ring, &[ring.one()])
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn basis(&self) -> &HowellBasis {
        &self.basis
    }
    pub fn generators(&self) -> &[GroupRingElement] {
        &self.echo
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.basis.is_full()
    }

    pub fn length(&self) -> u32 {
        self.basis.length()
    }

    pub fn contains(&self, a: &GroupRingElement) -> bool {
        self.basis.contains(a.coeffs())
    }

    pub fn contains_ideal(&self, other: &IdealHandle) -> bool {
        self.basis.contains_basis(&other.basis)
    }

    pub fn compare(&self, other: &IdealHandle) -> Result<IdealOrder> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch("ideal comparison".into()));
        }
        Ok(
            match (other.contains_ideal(self), self.contains_ideal(other)) {
                (true, true) => IdealOrder::Equal,
                (true, false) => IdealOrder::Subset,
                (false, true) => IdealOrder::Superset,
                (false, false) => IdealOrder::Incomparable,
            },
        )
    }

    pub fn sum(&self, other: &IdealHandle) -> IdealHandle {
        let mut gens = self.echo.clone();
        gens.extend(other.echo.iter().cloned());
        IdealHandle {
            ring: self.ring.clone(),
            basis: self.basis.sum(&other.basis),
            echo: gens,
        }
    }

    pub fn product(&self, other: &IdealHandle) -> IdealHandle {
        let mut gens = Vec::new();
        for a in &self.basis.rows {
            for b in &other.basis.rows {
                let a = self.ring.element(a.clone()).unwrap();
                let b = self.ring.element(b.clone()).unwrap();
                gens.push(&a * &b);
            }
        }
        Self::generated_by(&self.ring, &gens)
    }

    pub fn power(&self, k: u32) -> IdealHandle {
        (0..k).fold(IdealHandle::unit(&self.ring), |acc, _| acc.product(self))
    }

    /// Ann_R(I) = {a : aI = 0}.
    pub fn annihilator(&self) -> IdealHandle {
        let ring = &self.ring;
        let n = ring.order();
        let ctx = Zpn::of(ring);
        if self.basis.rows.is_empty() {
            return IdealHandle::unit(ring);
        }
        // a ↦ (a·x_j)_j on row vectors
        let k = self.basis.rows.len();
        let mut mat = ResidueMatrix::zeros(ctx, n, k * n);
        for h in 0..n {
            for (j, x) in self.basis.rows.iter().enumerate() {
                let shifted = crate::module::translate(ring, x, h);
                mat.data[h * k * n + j * n..h * k * n + (j + 1) * n].copy_from_slice(&shifted);
            }
        }
        IdealHandle::from_lattice(ring, kernel(&mat))
    }

    pub fn report(&self) -> IdealReport {
        IdealReport {
            ring: self.ring.spec(),
            howell_basis: self
                .basis
                .rows
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect(),
            generators_echo: self.echo.iter().map(|g| g.to_strings()).collect(),
        }
    }
}

impl PartialOrd for IdealHandle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.compare(other).ok()? {
            IdealOrder::Equal => Some(Ordering::Equal),
            IdealOrder::Subset => Some(Ordering::Less),
            IdealOrder::Superset => Some(Ordering::Greater),
            IdealOrder::Incomparable => None,
        }
    }
}

pub fn ideal_compare(a: &IdealHandle, b: &IdealHandle) -> Result<IdealOrder> {
    a.compare(b)
}

/// Ideal of k×k minors of a matrix over R (rows flattened).
pub fn minors_ideal(ring: &Ring, rows: &[Vec<u64>], cols: usize, k: usize) -> IdealHandle {
    if k == 0 {
        return IdealHandle::unit(ring);
    }
    if k > rows.len() || k > cols {
        return IdealHandle::zero(ring);
    }
    let n = ring.order();
    let entries: Vec<Vec<GroupRingElement>> = rows
        .iter()
        .map(|r| {
            r.chunks(n)
                .map(|c| ring.element(c.to_vec()).unwrap())
                .collect()
        })
        .collect();
    let mut gens = Vec::new();
    for rs in subsets(rows.len(), k) {
        for cs in subsets(cols, k) {
            let minor: Vec<Vec<GroupRingElement>> = rs
                .iter()
                .map(|&i| cs.iter().map(|&j| entries[i][j].clone()).collect())
                .collect();
            let d = det(ring, &minor);
            if !d.is_zero() {
                gens.push(d);
            }
        }
    }
    IdealHandle::generated_by(ring, &gens)
}

/// Fitt^i(M): the (g−i)-minors of the relation matrix.
pub fn fitting_ideal(m: &PresentedModule, i: usize) -> IdealHandle {
    let g = m.gens();
    if i >= g {
        return IdealHandle::unit(m.ring());
    }
    minors_ideal(m.ring(), m.relations_flat(), g, g - i)
}

/// {a ∈ R : aM = 0}.
pub fn annihilator(m: &PresentedModule) -> IdealHandle {
    let ring = m.ring();
    let ctx = Zpn::of(ring);
    let n = ring.order();
    let mut acc = HowellBasis::full(ctx, n);
    for i in 0..m.gens() {
        let e = expand_vectors(ring, m.dim(), &[m.generator(i)]);
        acc = acc.intersect(&preimage(&e, m.lattice()));
    }
    IdealHandle::from_lattice(ring, acc)
}

/// char_R(M) from the presentation R^g → M with kernel N.
///
/// N* is the quotient of (R^g)* by K = {c : N·c = 0}, so Λ^g(N*) = R/I with I
/// the ideal of coordinates of K, ∩^g N = Ann(I), and evaluation at the image
/// of e₁*∧…∧e_g* has image Ann(I).
pub fn characteristic_ideal(m: &PresentedModule) -> IdealHandle {
    let ring = m.ring();
    let n = ring.order();
    let g = m.gens();
    if g == 0 {
        return IdealHandle::unit(ring);
    }
    let rels = m.relations_flat();
    if rels.is_empty() {
        return IdealHandle::zero(ring);
    }
    // c ↦ (a_i·c)_i on row vectors c ∈ R^g
    let entries: Vec<Vec<GroupRingElement>> = (0..g)
        .map(|j| {
            rels.iter()
                .map(|a| ring.element(a[j * n..(j + 1) * n].to_vec()).unwrap())
                .collect()
        })
        .collect();
    let k = kernel(&crate::linalg::expand_scalars(ring, &entries).unwrap());
    let coords: Vec<GroupRingElement> = k
        .rows
        .iter()
        .flat_map(|v| {
            v.chunks(n)
                .map(|c| ring.element(c.to_vec()).unwrap())
                .collect::<Vec<_>>()
        })
        .collect();
    IdealHandle::generated_by(ring, &coords).annihilator()
}

/// char_R(M) through the general bi-dual machinery: presents N, its dual, the
/// g-th exterior bi-dual, and evaluates every generator of ∩^g N at the image
/// of e₁*∧…∧e_g*.
pub fn characteristic_ideal_generic(m: &PresentedModule) -> Result<IdealHandle> {
    let ring = m.ring();
    let n = ring.order();
    let g = m.gens();
    let free = PresentedModule::free(ring, g);
    let (nmod, _) = submodule_presentation(&free, m.relations_flat())?;
    let d = dual(&nmod);
    let b = Bidual::with_dual(&d, g);
    let restricted: Vec<Vec<u64>> = (0..g)
        .map(|j| {
            let vals: Vec<u64> = m
                .relations_flat()
                .iter()
                .flat_map(|x| x[j * n..(j + 1) * n].to_vec())
                .collect();
            b.functional_coords(&vals)
        })
        .collect::<Result<_>>()?;
    let nu = wedge_coords(ring, d.maps.len(), &restricted);
    let gens: Vec<GroupRingElement> = b.hom.maps.iter().map(|psi| b.pair(psi, &nu)).collect();
    Ok(IdealHandle::generated_by(ring, &gens))
}

/// The augmentation ideal of the subgroup generated by the listed elements.
pub fn augmentation_ideal(ring: &Ring, gens: &[usize]) -> IdealHandle {
    let e: Vec<GroupRingElement> = gens.iter().map(|&g| &ring.basis(g) - &ring.one()).collect();
    IdealHandle::generated_by(ring, &e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z9() -> Ring {
        Ring::scalars(3, 2).unwrap()
    }

    #[test]
    fn fitting_examples() {
        let r = Ring::new(3, 2, &[3]).unwrap();
        let x = &r.one() - &r.basis(1);
        let y = r.scalar(3);
        let m = PresentedModule::cyclic(&r, std::slice::from_ref(&x))
            .direct_sum(&PresentedModule::cyclic(&r, std::slice::from_ref(&y)));
        assert_eq!(
            fitting_ideal(&m, 0),
            IdealHandle::generated_by(&r, &[&x * &y])
        );
        assert_eq!(fitting_ideal(&m, 1), IdealHandle::generated_by(&r, &[x, y]));
        let z = z9();
        let z3 = PresentedModule::cyclic(&z, &[z.scalar(3)]);
        assert_eq!(
            fitting_ideal(&z3, 0),
            IdealHandle::generated_by(&z, &[z.scalar(3)])
        );
        assert!(fitting_ideal(&z3.direct_sum(&z3), 0).is_zero());
    }

    #[test]
    fn annihilator_examples() {
        let z = z9();
        assert!(annihilator(&PresentedModule::free(&z, 1)).is_zero());
        let z3 = PresentedModule::cyclic(&z, &[z.scalar(3)]);
        let three = IdealHandle::generated_by(&z, &[z.scalar(3)]);
        assert_eq!(annihilator(&z3), three);
        assert_eq!(annihilator(&z3.direct_sum(&z3)), three);
    }

    #[test]
    fn characteristic_examples() {
        let z = z9();
        let three = IdealHandle::generated_by(&z, &[z.scalar(3)]);
        let z3 = PresentedModule::cyclic(&z, &[z.scalar(3)]);
        assert_eq!(characteristic_ideal(&z3), three);
        let sq = z3.direct_sum(&z3);
        assert_eq!(characteristic_ideal(&sq), three);
        assert_eq!(
            characteristic_ideal(&sq)
                .compare(&fitting_ideal(&sq, 0))
                .unwrap(),
            IdealOrder::Superset
        );
        assert!(characteristic_ideal(&PresentedModule::zero(&z)).is_unit());
        assert!(characteristic_ideal(&PresentedModule::cyclic(&z, &[z.one()])).is_unit());
        assert!(characteristic_ideal(&PresentedModule::free(&z, 2)).is_zero());
        for m in [z3.clone(), sq.clone(), PresentedModule::free(&z, 1)] {
            assert_eq!(
                characteristic_ideal_generic(&m).unwrap(),
                characteristic_ideal(&m)
            );
        }
    }

    #[test]
    fn compare_examples() {
        let z = z9();
        let three = IdealHandle::generated_by(&z, &[z.scalar(3)]);
        assert_eq!(three.compare(&three).unwrap(), IdealOrder::Equal);
        assert_eq!(
            IdealHandle::zero(&z).compare(&three).unwrap(),
            IdealOrder::Subset
        );
        let r = Ring::new(3, 2, &[3]).unwrap();
        let a = IdealHandle::generated_by(&r, &[&r.one() - &r.basis(1)]);
        let b = IdealHandle::generated_by(&r, &[r.scalar(3)]);
        assert_eq!(a.compare(&b).unwrap(), IdealOrder::Incomparable);
    }

    #[test]
    fn annihilator_of_ideal() {
        let r = Ring::new(3, 1, &[3]).unwrap();
        let aug = augmentation_ideal(&r, &[1]);
        assert_eq!(
            aug.annihilator(),
            IdealHandle::generated_by(&r, &[r.norm_element()])
        );
        assert_eq!(aug.annihilator().annihilator(), aug);
    }
}
