//! Finitely presented modules over (Z/pⁿ)[G], their maps and Hom modules.
//!
//! Module elements are rows in R^g flattened to (Z/pⁿ)^{g|G|}; the relation
//! submodule is kept as a Howell basis of its G-closed lattice.

use serde::{Deserialize, Serialize};

use crate::error::{hypothesis, invalid, Error, Result};
use crate::linalg::{preimage, HowellBasis, ResidueMatrix, Solver, Zpn};
use crate::ring::{GroupRingElement, Ring, RingSpec};

/// g·x for a flattened vector x ∈ R^k.
pub fn translate(ring: &Ring, v: &[u64], g: usize) -> Vec<u64> {
    let n = ring.order();
    let mut out = vec![0; v.len()];
    for (b, block) in v.chunks(n).enumerate() {
        for (h, &a) in block.iter().enumerate() {
            out[b * n + ring.op(g, h)] = a;
        }
    }
    out
}

/// All G-translates of each vector: the rows of their scalar expansion.
pub fn expand_vectors(ring: &Ring, dim: usize, vs: &[Vec<u64>]) -> ResidueMatrix {
    let mut rows = Vec::with_capacity(vs.len() * ring.order());
    for v in vs {
        for g in 0..ring.order() {
            rows.push(translate(ring, v, g));
        }
    }
    ResidueMatrix::from_rows(Zpn::of(ring), dim, &rows)
}

/// The R-submodule generated by `vs`, as a lattice.
pub fn span(ring: &Ring, dim: usize, vs: &[Vec<u64>]) -> HowellBasis {
    HowellBasis::from_rows(Zpn::of(ring), dim, expand_vectors(ring, dim, vs).to_rows())
}

/// c·v for c ∈ R and flattened v ∈ R^k.
pub fn scalar_mul(ring: &Ring, c: &[u64], v: &[u64]) -> Vec<u64> {
    let m = ring.modulus();
    let mut out = vec![0u64; v.len()];
    for (g, &a) in c.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (o, x) in out.iter_mut().zip(translate(ring, v, g)) {
            *o = ((*o as u128 + a as u128 * x as u128) % m as u128) as u64;
        }
    }
    out
}

/// Σ cᵢ·vᵢ for coefficients c ∈ R^k (flattened) and vectors vᵢ.
pub fn combine(ring: &Ring, c: &[u64], vs: &[Vec<u64>], dim: usize) -> Vec<u64> {
    let n = ring.order();
    let m = ring.modulus();
    let mut out = vec![0u64; dim];
    for (ci, v) in c.chunks(n).zip(vs) {
        for (o, x) in out.iter_mut().zip(scalar_mul(ring, ci, v)) {
            *o = (*o + x) % m;
        }
    }
    out
}

pub fn vsub(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| (x + m - y) % m).collect()
}

pub fn vadd(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| (x + y) % m).collect()
}

/// A small generating set of L over R, modulo the sublattice `base`.
pub fn minimal_generators(ring: &Ring, lattice: &HowellBasis, base: &HowellBasis) -> Vec<Vec<u64>> {
    let dim = lattice.cols;
    let mut acc = base.clone();
    let mut chosen = Vec::new();
    for row in &lattice.rows {
        if !acc.contains(row) {
            chosen.push(row.clone());
            acc = acc.sum(&span(ring, dim, std::slice::from_ref(row)));
        }
    }
    chosen
}

/// R-linear relations among `gens` modulo `base`: {c ∈ R^k : Σ cᵢgᵢ ∈ base}.
pub fn syzygies(ring: &Ring, gens: &[Vec<u64>], base: &HowellBasis) -> Vec<Vec<u64>> {
    let k = gens.len();
    let dim = base.cols;
    let n = ring.order();
    if k == 0 {
        return vec![];
    }
    let v = expand_vectors(ring, dim, gens);
    let syz = preimage(&v, base);
    minimal_generators(ring, &syz, &HowellBasis::zero(Zpn::of(ring), k * n))
}

/// coker(R^r → R^g) with rows of `relations` as the relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedModule {
    ring: Ring,
    gens: usize,
    relations: Vec<Vec<u64>>,
    lattice: HowellBasis,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleJson {
    pub ring: RingSpec,
    pub gens: usize,
    pub relations: Vec<Vec<Vec<String>>>,
}

impl PresentedModule {
    pub fn new(ring: &Ring, gens: usize, relations: &[Vec<GroupRingElement>]) -> Result<Self> {
        let mut flat = Vec::with_capacity(relations.len());
        for r in relations {
            if r.len() != gens {
                return invalid(format!("relation has {} entries, expected {gens}", r.len()));
            }
            if r.iter().any(|a| a.ring() != ring) {
                return Err(Error::RingMismatch("relation entry".into()));
            }
            flat.push(r.iter().flat_map(|a| a.coeffs().iter().copied()).collect());
        }
        Ok(Self::from_flat(ring, gens, flat))
    }

    pub fn from_flat(ring: &Ring, gens: usize, relations: Vec<Vec<u64>>) -> Self {
        let dim = gens * ring.order();
        let relations: Vec<Vec<u64>> = relations
            .into_iter()
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect();
        let lattice = span(ring, dim, &relations);
        PresentedModule {
            ring: ring.clone(),
            gens,
            relations,
            lattice,
        }
    }

    pub fn free(ring: &Ring, k: usize) -> Self {
        Self::from_flat(ring, k, vec![])
    }

    pub fn zero(ring: &Ring) -> Self {
        Self::free(ring, 0)
    }

    /// R/(x₁,…,x_k).
    pub fn cyclic(ring: &Ring, ideal_gens: &[GroupRingElement]) -> Self {
        Self::from_flat(
            ring,
            1,
            ideal_gens.iter().map(|x| x.coeffs().to_vec()).collect(),
        )
    }

    pub fn direct_sum(&self, other: &PresentedModule) -> PresentedModule {
        let n = self.ring.order();
        let (a, b) = (self.gens * n, other.gens * n);
        let mut rels: Vec<Vec<u64>> = self
            .relations
            .iter()
            .map(|r| [r.clone(), vec![0; b]].concat())
            .collect();
        rels.extend(
            other
                .relations
                .iter()
                .map(|r| [vec![0; a], r.clone()].concat()),
        );
        Self::from_flat(&self.ring, self.gens + other.gens, rels)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn gens(&self) -> usize {
        self.gens
    }
    pub fn dim(&self) -> usize {
        self.gens * self.ring.order()
    }
    pub fn relations_flat(&self) -> &[Vec<u64>] {
        &self.relations
    }
    pub fn lattice(&self) -> &HowellBasis {
        &self.lattice
    }

    pub fn relations(&self) -> Vec<Vec<GroupRingElement>> {
        let n = self.ring.order();
        self.relations
            .iter()
            .map(|r| {
                r.chunks(n)
                    .map(|c| self.ring.element(c.to_vec()).unwrap())
                    .collect()
            })
            .collect()
    }

    /// log_p |M|.
    pub fn length(&self) -> u32 {
        self.ring.n() * self.dim() as u32 - self.lattice.length()
    }

    pub fn is_zero(&self) -> bool {
        self.lattice.is_full()
    }

    pub fn is_zero_element(&self, v: &[u64]) -> bool {
        self.lattice.contains(v)
    }

    /// Canonical representative of the class of v.
    pub fn normalize(&self, v: &[u64]) -> Vec<u64> {
        self.lattice.reduce(v).0
    }

    pub fn generator(&self, i: usize) -> Vec<u64> {
        let n = self.ring.order();
        let mut v = vec![0; self.dim()];
        v[i * n] = 1 % self.ring.modulus();
        v
    }

    pub fn to_json(&self) -> ModuleJson {
        let n = self.ring.order();
        ModuleJson {
            ring: self.ring.spec(),
            gens: self.gens,
            relations: self
                .relations
                .iter()
                .map(|r| {
                    r.chunks(n)
                        .map(|c| c.iter().map(|x| x.to_string()).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(j: &ModuleJson) -> Result<Self> {
        let ring = Ring::from_spec(&j.ring)?;
        let mut rels = Vec::new();
        for r in &j.relations {
            let mut row = Vec::new();
            for c in r {
                let coeffs = c
                    .iter()
                    .map(|s| {
                        s.parse::<i128>()
                            .map_err(|_| Error::Parse(format!("bad residue {s}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                row.push(ring.element_signed(&coeffs)?);
            }
            rels.push(row);
        }
        PresentedModule::new(&ring, j.gens, &rels)
    }
}

/// An R-linear map given by the images of the source generators.
#[derive(Debug, Clone)]
pub struct ModuleMap {
    pub source: PresentedModule,
    pub target: PresentedModule,
    rows: Vec<Vec<u64>>,
    expanded: ResidueMatrix,
}

impl ModuleMap {
    pub fn new(
        source: &PresentedModule,
        target: &PresentedModule,
        rows: Vec<Vec<u64>>,
    ) -> Result<Self> {
        if source.ring != target.ring {
            return Err(Error::RingMismatch("map endpoints".into()));
        }
        if rows.len() != source.gens || rows.iter().any(|r| r.len() != target.dim()) {
            return invalid("map matrix has the wrong shape");
        }
        let expanded = expand_vectors(&source.ring, target.dim(), &rows);
        let f = ModuleMap {
            source: source.clone(),
            target: target.clone(),
            rows,
            expanded,
        };
        for r in &source.relations {
            if !target.is_zero_element(&f.apply(r)) {
                return invalid("map does not respect the source relations");
            }
        }
        Ok(f)
    }

    pub fn from_elements(
        source: &PresentedModule,
        target: &PresentedModule,
        images: &[Vec<GroupRingElement>],
    ) -> Result<Self> {
        Self::new(
            source,
            target,
            images.iter().map(|v| crate::linalg::flatten(v)).collect(),
        )
    }

    pub fn identity(m: &PresentedModule) -> Self {
        Self::new(m, m, (0..m.gens).map(|i| m.generator(i)).collect()).unwrap()
    }

    pub fn zero(source: &PresentedModule, target: &PresentedModule) -> Self {
        Self::new(source, target, vec![vec![0; target.dim()]; source.gens]).unwrap()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn expanded(&self) -> &ResidueMatrix {
        &self.expanded
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        self.expanded.vec_mul(v)
    }

    /// self, then other.
    pub fn then(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if self.target.gens != other.source.gens || self.target.lattice != other.source.lattice {
            return invalid("maps are not composable");
        }
        let rows = self.rows.iter().map(|r| other.apply(r)).collect();
        ModuleMap::new(&self.source, &other.target, rows)
    }

    pub fn scale(&self, c: &GroupRingElement) -> ModuleMap {
        let ring = &self.source.ring;
        let rows = self
            .rows
            .iter()
            .map(|r| scalar_mul(ring, c.coeffs(), r))
            .collect();
        ModuleMap::new(&self.source, &self.target, rows).unwrap()
    }

    pub fn add(&self, other: &ModuleMap) -> ModuleMap {
        let m = self.source.ring.modulus();
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| vadd(a, b, m))
            .collect();
        ModuleMap::new(&self.source, &self.target, rows).unwrap()
    }

    /// Equality as maps (images agree modulo target relations).
    pub fn equals(&self, other: &ModuleMap) -> bool {
        let m = self.source.ring.modulus();
        self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| self.target.is_zero_element(&vsub(a, b, m)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| self.target.is_zero_element(r))
    }

    /// Preimage of the target relations: {x ∈ R^g : f(x) = 0}.
    pub fn kernel_lattice(&self) -> HowellBasis {
        preimage(&self.expanded, &self.target.lattice)
    }

    pub fn image_lattice(&self) -> HowellBasis {
        HowellBasis::from_rows(
            self.expanded.ctx,
            self.target.dim(),
            self.expanded.to_rows(),
        )
        .sum(&self.target.lattice)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_lattice().length() == self.source.lattice.length()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_lattice().is_full()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// The kernel as a submodule of the source.
    pub fn kernel(&self) -> Result<(PresentedModule, ModuleMap)> {
        let gens = minimal_generators(
            &self.source.ring,
            &self.kernel_lattice(),
            &self.source.lattice,
        );
        submodule_presentation(&self.source, &gens)
    }

    /// Composite map into R^k for a list of functionals (values on generators).
    pub fn to_free(source: &PresentedModule, functionals: &[Vec<u64>]) -> Result<ModuleMap> {
        let n = source.ring.order();
        let k = functionals.len();
        let target = PresentedModule::free(&source.ring, k);
        let rows = (0..source.gens)
            .map(|i| {
                functionals
                    .iter()
                    .flat_map(|f| f[i * n..(i + 1) * n].to_vec())
                    .collect()
            })
            .collect();
        ModuleMap::new(source, &target, rows)
    }
}

/// Presents the submodule generated by `elements` (flattened vectors in R^g).
pub fn submodule_presentation(
    m: &PresentedModule,
    elements: &[Vec<u64>],
) -> Result<(PresentedModule, ModuleMap)> {
    if elements.iter().any(|e| e.len() != m.dim()) {
        return invalid("element has the wrong length");
    }
    let rels = syzygies(&m.ring, elements, &m.lattice);
    let sub = PresentedModule::from_flat(&m.ring, elements.len(), rels);
    let incl = ModuleMap::new(&sub, m, elements.to_vec())?;
    debug_assert!(incl.is_injective());
    Ok((sub, incl))
}

/// Hom_R(M, N) with generators recorded as explicit maps.
#[derive(Debug, Clone)]
pub struct Hom {
    pub module: PresentedModule,
    pub source: PresentedModule,
    pub target: PresentedModule,
    /// Generator maps, flattened as g_M blocks of the target's dimension.
    pub maps: Vec<Vec<u64>>,
    zero_maps: HowellBasis,
    solver: Solver,
}

pub fn hom_module(src: &PresentedModule, tgt: &PresentedModule) -> Result<Hom> {
    if src.ring != tgt.ring {
        return Err(Error::RingMismatch("hom endpoints".into()));
    }
    let ring = &src.ring;
    let ctx = Zpn::of(ring);
    let n = ring.order();
    let (gs, tdim) = (src.gens, tgt.dim());
    let dim = gs * tdim;
    let nrel = src.relations.len();
    // X ↦ (Σ_j a_ij X_j)_i, on row vectors.
    let mut c = ResidueMatrix::zeros(ctx, dim, nrel * tdim);
    for j in 0..gs {
        for k in 0..tdim {
            let (blk, h) = (k / n, k % n);
            let row = j * tdim + k;
            for (i, rel) in src.relations.iter().enumerate() {
                let a = &rel[j * n..(j + 1) * n];
                for (g, &x) in a.iter().enumerate() {
                    if x != 0 {
                        let col = i * tdim + blk * n + ring.op(g, h);
                        let at = row * c.cols + col;
                        c.data[at] = (c.data[at] + x) % ctx.m;
                    }
                }
            }
        }
    }
    let block = |copies: usize| -> HowellBasis {
        let mut rows = Vec::new();
        for b in 0..copies {
            for r in &tgt.lattice.rows {
                let mut v = vec![0; copies * tdim];
                v[b * tdim..(b + 1) * tdim].copy_from_slice(r);
                rows.push(v);
            }
        }
        HowellBasis::from_rows(ctx, copies * tdim, rows)
    };
    let lattice = preimage(&c, &block(nrel));
    let zero_maps = block(gs);
    let maps = minimal_generators(ring, &lattice, &zero_maps);
    let rels = syzygies(ring, &maps, &zero_maps);
    let module = PresentedModule::from_flat(ring, maps.len(), rels);
    let mut stacked = expand_vectors(ring, dim, &maps).to_rows();
    stacked.extend(zero_maps.rows.iter().cloned());
    let solver = Solver::new(&ResidueMatrix::from_rows(ctx, dim, &stacked));
    Ok(Hom {
        module,
        source: src.clone(),
        target: tgt.clone(),
        maps,
        zero_maps,
        solver,
    })
}

pub fn dual(m: &PresentedModule) -> Hom {
    hom_module(m, &PresentedModule::free(&m.ring, 1)).expect("same ring")
}

impl Hom {
    /// Coordinates (in R^k, flattened) of an explicit map, if it is R-linear.
    pub fn coords(&self, map: &[u64]) -> Option<Vec<u64>> {
        let kn = self.maps.len() * self.source.ring.order();
        self.solver.solve(map).map(|x| x[..kn].to_vec())
    }

    /// The explicit map with the given coordinates.
    pub fn map_of(&self, coords: &[u64]) -> Vec<u64> {
        combine(
            &self.source.ring,
            coords,
            &self.maps,
            self.source.gens * self.target.dim(),
        )
    }

    /// f(m) for f given by coordinates and m ∈ source.
    pub fn evaluate(&self, coords: &[u64], m: &[u64]) -> Vec<u64> {
        let f = self.map_of(coords);
        let rows: Vec<Vec<u64>> = f.chunks(self.target.dim()).map(|c| c.to_vec()).collect();
        combine(&self.source.ring, m, &rows, self.target.dim())
    }

    pub fn is_zero_map(&self, map: &[u64]) -> bool {
        self.zero_maps.contains(map)
    }

    pub fn as_module_map(&self, coords: &[u64]) -> ModuleMap {
        let f = self.map_of(coords);
        let rows = f.chunks(self.target.dim()).map(|c| c.to_vec()).collect();
        ModuleMap::new(&self.source, &self.target, rows).expect("hom element is R-linear")
    }
}

/// The dual of f: A → B as a map B* → A*.
pub fn dual_map(f: &ModuleMap, dual_target: &Hom, dual_source: &Hom) -> Result<ModuleMap> {
    let ring = &f.source.ring;
    let n = ring.order();
    let mut rows = Vec::new();
    for w in &dual_target.maps {
        let vals: Vec<u64> = (0..f.source.gens)
            .flat_map(|i| {
                let img = &f.rows[i];
                let blocks: Vec<Vec<u64>> = w.chunks(n).map(|c| c.to_vec()).collect();
                combine(ring, img, &blocks, n)
            })
            .collect();
        match dual_source.coords(&vals) {
            Some(c) => rows.push(c),
            None => return hypothesis("pulled-back functional is not R-linear"),
        }
    }
    ModuleMap::new(&dual_target.module, &dual_source.module, rows)
}

/// A surjection R → R′: reduction of coefficients and a group quotient.
#[derive(Debug, Clone)]
pub struct RingProjection {
    pub source: Ring,
    pub target: Ring,
    map: Vec<usize>,
}

impl RingProjection {
    /// `images[k]` is the image of the k-th standard generator of the source group.
    pub fn new(source: &Ring, target: &Ring, images: &[usize]) -> Result<Self> {
        if source.p() != target.p() || target.n() > source.n() {
            return invalid("coefficient reduction must be Z/pⁿ → Z/p^m with m ≤ n");
        }
        let k = source.invariant_factors().len();
        if images.len() != k || images.iter().any(|&g| g >= target.order()) {
            return invalid("need one image per source generator");
        }
        for (i, &d) in source.invariant_factors().iter().enumerate() {
            if target.pow(images[i], d) != 0 {
                return invalid("generator images violate the group relations");
            }
        }
        let map: Vec<usize> = (0..source.order())
            .map(|g| {
                source
                    .digits(g)
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (i, &e)| target.op(acc, target.pow(images[i], e)))
            })
            .collect();
        let mut hit = vec![false; target.order()];
        for &h in &map {
            hit[h] = true;
        }
        if hit.iter().any(|&b| !b) {
            return invalid("group map is not surjective");
        }
        Ok(RingProjection {
            source: source.clone(),
            target: target.clone(),
            map,
        })
    }

    pub fn reduction(source: &Ring, m: u32) -> Result<Self> {
        let target = source.with_exponent(m)?;
        let images: Vec<usize> = (0..source.invariant_factors().len())
            .map(|k| target.generator(k))
            .collect();
        Self::new(source, &target, &images)
    }

    pub fn apply(&self, a: &GroupRingElement) -> GroupRingElement {
        a.map_group(&self.target, |g| self.map[g]).unwrap()
    }

    pub fn apply_flat(&self, v: &[u64]) -> Vec<u64> {
        let (n, t) = (self.source.order(), self.target.order());
        let m = self.target.modulus();
        let mut out = vec![0; v.len() / n * t];
        for (b, blk) in v.chunks(n).enumerate() {
            for (g, &a) in blk.iter().enumerate() {
                let at = b * t + self.map[g];
                out[at] = (out[at] + a % m) % m;
            }
        }
        out
    }
}

/// M ⊗_R R′.
pub fn base_change(m: &PresentedModule, proj: &RingProjection) -> Result<PresentedModule> {
    if m.ring != proj.source {
        return Err(Error::RingMismatch("base change source".into()));
    }
    let rels = m.relations.iter().map(|r| proj.apply_flat(r)).collect();
    Ok(PresentedModule::from_flat(&proj.target, m.gens, rels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z9() -> Ring {
        Ring::scalars(3, 2).unwrap()
    }

    #[test]
    fn hom_from_free_is_target() {
        let r = Ring::new(3, 2, &[3]).unwrap();
        let n = PresentedModule::cyclic(&r, &[&r.one() - &r.basis(1)]);
        let h = hom_module(&PresentedModule::free(&r, 1), &n).unwrap();
        assert_eq!(h.module.length(), n.length());
    }

    #[test]
    fn hom_z3_z9() {
        let r = z9();
        let z3 = PresentedModule::cyclic(&r, &[r.scalar(3)]);
        let h = hom_module(&z3, &PresentedModule::free(&r, 1)).unwrap();
        assert_eq!(h.module.length(), 1);
        let brute = (0..9u64).filter(|&x| (3 * x) % 9 == 0).count();
        assert_eq!(3usize.pow(h.module.length()), brute);
        assert!(hom_module(&z3, &PresentedModule::zero(&r))
            .unwrap()
            .module
            .is_zero());
    }

    #[test]
    fn duals_match_lengths() {
        let r = z9();
        let z3 = PresentedModule::cyclic(&r, &[r.scalar(3)]);
        assert_eq!(dual(&z3).module.length(), 1);
        assert_eq!(dual(&PresentedModule::free(&r, 3)).module.length(), 6);
        assert!(dual(&PresentedModule::zero(&r)).module.is_zero());
    }

    #[test]
    fn submodule_of_sum() {
        let r = z9();
        let m =
            PresentedModule::free(&r, 1).direct_sum(&PresentedModule::cyclic(&r, &[r.scalar(3)]));
        let (s, incl) = submodule_presentation(&m, &[vec![3, 0]]).unwrap();
        assert_eq!(s.length(), 1);
        assert!(incl.is_injective());
        let (all, _) = submodule_presentation(&m, &[m.generator(0), m.generator(1)]).unwrap();
        assert_eq!(all.length(), m.length());
        let (none, _) = submodule_presentation(&m, &[]).unwrap();
        assert!(none.is_zero());
    }

    #[test]
    fn evaluation_pairing() {
        let r = Ring::new(3, 1, &[3]).unwrap();
        let m = PresentedModule::cyclic(&r, &[&r.one() - &r.basis(1)]);
        let d = dual(&m);
        for i in 0..d.maps.len() {
            let mut c = vec![0; d.maps.len() * 3];
            c[i * 3] = 1;
            assert_eq!(d.evaluate(&c, &m.generator(0)), d.maps[i]);
        }
    }

    #[test]
    fn projections() {
        let r = Ring::new(3, 2, &[3]).unwrap();
        let id = RingProjection::new(&r, &r, &[r.generator(0)]).unwrap();
        let m = PresentedModule::cyclic(&r, &[r.scalar(3)]);
        assert_eq!(base_change(&m, &id).unwrap(), m);
        let red = RingProjection::reduction(&r, 1).unwrap();
        let f = base_change(&PresentedModule::free(&r, 1), &red).unwrap();
        assert_eq!(f.length(), 3);
        let z9 = z9();
        let aug = RingProjection::new(&r, &z9, &[0]).unwrap();
        assert_eq!(aug.apply(&r.norm_element()), z9.scalar(3));
        assert!(RingProjection::new(&z9, &r, &[]).is_err());
    }
}
