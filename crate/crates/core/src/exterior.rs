//! Exterior powers, exterior bi-duals ∩ʳM = (Λʳ(M*))*, contractions and the
//! maps attached to cartesian squares with free bottom row.

use crate::error::{hypothesis, invalid, Error, Result};
use crate::linalg::{expand_scalars, gr_inverse, kernel, HowellBasis, Solver, Zpn};
use crate::module::{
    combine, dual, expand_vectors, minimal_generators, submodule_presentation, Hom, ModuleMap,
    PresentedModule,
};
use crate::ring::{GroupRingElement, Ring};

/// r-subsets of {0,…,g−1} in lexicographic order.
pub fn subsets(g: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, g: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..g {
            if g - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, g, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= g {
        go(0, g, r, &mut Vec::new(), &mut out);
    }
    out
}

pub fn subset_position(all: &[Vec<usize>], s: &[usize]) -> usize {
    all.binary_search_by(|x| x.as_slice().cmp(s))
        .expect("subset present")
}

/// Sign of the shuffle sorting a ++ b, or None if they meet.
pub fn shuffle_sign(a: &[usize], b: &[usize]) -> Option<bool> {
    let mut inversions = 0usize;
    for &x in a {
        for &y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    Some(inversions.is_multiple_of(2))
}

/// Sorted union of disjoint sorted sets.
pub fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

/// Determinant over a commutative group ring, by Laplace expansion along
/// the last row with memoized column subsets.
pub fn det(ring: &Ring, mat: &[Vec<GroupRingElement>]) -> GroupRingElement {
    let k = mat.len();
    let mut dp: Vec<GroupRingElement> = Vec::with_capacity(1 << k);
    dp.push(ring.one());
    for mask in 1usize..(1 << k) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = ring.zero();
        for col in (0..k).filter(|c| mask & (1 << c) != 0) {
            let a = &mat[row][col];
            let rest = mask & !(1 << col);
            if a.is_zero() || dp[rest].is_zero() {
                continue;
            }
            let term = a * &dp[rest];
            acc = if (rest >> col).count_ones() % 2 == 1 {
                &acc - &term
            } else {
                &acc + &term
            };
        }
        dp.push(acc);
    }
    dp.pop().unwrap()
}

fn elements(ring: &Ring, v: &[u64]) -> Vec<GroupRingElement> {
    v.chunks(ring.order())
        .map(|c| ring.element(c.to_vec()).unwrap())
        .collect()
}

/// v₁∧…∧v_k for vectors in R^g, as coordinates over k-subsets (flattened).
pub fn wedge_coords(ring: &Ring, g: usize, vs: &[Vec<u64>]) -> Vec<u64> {
    let k = vs.len();
    let rows: Vec<Vec<GroupRingElement>> = vs.iter().map(|v| elements(ring, v)).collect();
    let mut out = Vec::new();
    for s in subsets(g, k) {
        let minor: Vec<Vec<GroupRingElement>> = rows
            .iter()
            .map(|r| s.iter().map(|&c| r[c].clone()).collect())
            .collect();
        out.extend_from_slice(det(ring, &minor).coeffs());
    }
    out
}

/// Λʳ M with generators the r-subsets of M's generators.
pub fn exterior_power(m: &PresentedModule, r: usize) -> PresentedModule {
    let ring = m.ring();
    let n = ring.order();
    let g = m.gens();
    let top = subsets(g, r);
    if r == 0 {
        return PresentedModule::free(ring, 1);
    }
    let mut rels = Vec::new();
    for rel in m.relations_flat() {
        for j in subsets(g, r - 1) {
            let mut v = vec![0u64; top.len() * n];
            for (i, a) in rel.chunks(n).enumerate() {
                if j.contains(&i) || a.iter().all(|&x| x == 0) {
                    continue;
                }
                let even = shuffle_sign(&[i], &j).unwrap();
                let pos = subset_position(&top, &merge(&[i], &j));
                for (h, &x) in a.iter().enumerate() {
                    let x = if even {
                        x
                    } else {
                        (ring.modulus() - x) % ring.modulus()
                    };
                    let at = pos * n + h;
                    v[at] = (v[at] + x) % ring.modulus();
                }
            }
            rels.push(v);
        }
    }
    PresentedModule::from_flat(ring, top.len(), rels)
}

/// ∩ʳM = Hom(Λʳ(M*), R), relative to a fixed presentation of M*.
#[derive(Debug, Clone)]
pub struct Bidual {
    pub base: PresentedModule,
    pub r: usize,
    pub dual: Hom,
    pub ext: PresentedModule,
    pub subsets: Vec<Vec<usize>>,
    pub hom: Hom,
}

impl Bidual {
    pub fn new(m: &PresentedModule, r: usize) -> Bidual {
        Self::with_dual(&dual(m), r)
    }

    pub fn with_dual(d: &Hom, r: usize) -> Bidual {
        let ext = exterior_power(&d.module, r);
        let hom = dual(&ext);
        Bidual {
            base: d.source.clone(),
            r,
            dual: d.clone(),
            subsets: subsets(d.maps.len(), r),
            ext,
            hom,
        }
    }

    pub fn ring(&self) -> &Ring {
        self.base.ring()
    }

    /// The module ∩ʳM itself.
    pub fn space(&self) -> &PresentedModule {
        &self.hom.module
    }

    /// Values of an element on the generators of Λʳ(M*).
    pub fn values(&self, coords: &[u64]) -> Vec<u64> {
        self.hom.map_of(coords)
    }

    pub fn coords(&self, values: &[u64]) -> Option<Vec<u64>> {
        self.hom.coords(values)
    }

    /// M*-coordinates of a functional given by its values on M's generators.
    pub fn functional_coords(&self, f: &[u64]) -> Result<Vec<u64>> {
        self.dual
            .coords(f)
            .ok_or_else(|| Error::Invalid("values do not define a functional".into()))
    }

    /// Ψ(f₁∧…∧f_r) for functionals given by values on M's generators.
    pub fn evaluate(&self, coords: &[u64], fs: &[Vec<u64>]) -> Result<GroupRingElement> {
        if fs.len() != self.r {
            return invalid("wrong number of functionals");
        }
        let cs = fs
            .iter()
            .map(|f| self.functional_coords(f))
            .collect::<Result<Vec<_>>>()?;
        let w = wedge_coords(self.ring(), self.dual.maps.len(), &cs);
        Ok(self.pair(&self.values(coords), &w))
    }

    /// Σ_S w_S ψ_S for a wedge given by subset coordinates.
    pub fn pair(&self, values: &[u64], wedge: &[u64]) -> GroupRingElement {
        let ring = self.ring();
        let n = ring.order();
        let blocks: Vec<Vec<u64>> = values.chunks(n).map(|c| c.to_vec()).collect();
        ring.element(combine(ring, wedge, &blocks, n)).unwrap()
    }

    /// The ideal {Ψ(x) : x ∈ Λʳ(M*)} for one element Ψ.
    pub fn image_generators(&self, coords: &[u64]) -> Vec<GroupRingElement> {
        let ring = self.ring();
        self.values(coords)
            .chunks(ring.order())
            .map(|c| ring.element(c.to_vec()).unwrap())
            .collect()
    }
}

/// ξʳ: ΛʳM → ∩ʳM, m ↦ (Φ ↦ Φ(m)).
pub fn xi_map(b: &Bidual) -> ModuleMap {
    let m = &b.base;
    let ring = m.ring();
    let n = ring.order();
    let src = exterior_power(m, b.r);
    let k = b.dual.maps.len();
    let fvals: Vec<Vec<GroupRingElement>> = b.dual.maps.iter().map(|w| elements(ring, w)).collect();
    let mut rows = Vec::new();
    for s in subsets(m.gens(), b.r) {
        let mut vals = Vec::with_capacity(b.subsets.len() * n);
        for t in subsets(k, b.r) {
            let minor: Vec<Vec<GroupRingElement>> = t
                .iter()
                .map(|&ti| s.iter().map(|&sj| fvals[ti][sj].clone()).collect())
                .collect();
            vals.extend_from_slice(det(ring, &minor).coeffs());
        }
        rows.push(b.coords(&vals).expect("evaluation is a functional"));
    }
    ModuleMap::new(&src, b.space(), rows).expect("ξ is well defined")
}

/// Values over (s−r)-subsets of Ψ' ↦ Ψ(Φ∧Ψ').
fn contract_values(
    ring: &Ring,
    k: usize,
    phi: &[u64],
    r: usize,
    psi: &[u64],
    s: usize,
) -> Vec<u64> {
    let n = ring.order();
    let big = subsets(k, s);
    let small = subsets(k, r);
    let mut out = Vec::new();
    for t in subsets(k, s - r) {
        let mut acc = ring.zero();
        for (i, sp) in small.iter().enumerate() {
            let ph = &phi[i * n..(i + 1) * n];
            if ph.iter().all(|&x| x == 0) {
                continue;
            }
            if let Some(even) = shuffle_sign(sp, &t) {
                let pos = subset_position(&big, &merge(sp, &t));
                let a = ring.element(ph.to_vec()).unwrap();
                let b = ring.element(psi[pos * n..(pos + 1) * n].to_vec()).unwrap();
                let term = &a * &b;
                acc = if even { &acc + &term } else { &acc - &term };
            }
        }
        out.extend_from_slice(acc.coeffs());
    }
    out
}

/// The map ∩ˢM → ∩^{s−r}M dual to Ψ ↦ Φ∧Ψ, for Φ ∈ Λʳ(M*) given by subset coordinates.
pub fn contract(phi: &[u64], from: &Bidual, to: &Bidual) -> Result<ModuleMap> {
    if from.r < to.r {
        return invalid("contraction needs s ≥ r");
    }
    let r = from.r - to.r;
    let k = from.dual.maps.len();
    if to.dual.maps != from.dual.maps {
        return invalid("biduals must share the dual presentation");
    }
    let ring = from.ring();
    if phi.len() != subsets(k, r).len() * ring.order() {
        return invalid("Φ has the wrong number of coordinates");
    }
    let mut rows = Vec::new();
    for psi in &from.hom.maps {
        let vals = contract_values(ring, k, phi, r, psi, from.r);
        rows.push(
            to.coords(&vals)
                .ok_or_else(|| Error::Invalid("contraction left ∩".into()))?,
        );
    }
    ModuleMap::new(from.space(), to.space(), rows)
}

/// M₁ ↪ M₂ over F₁ ↪ F₂ with F₁ = R^{s₁}, F₂ = R^{s₂}.
#[derive(Debug, Clone)]
pub struct CartesianSquare {
    pub iota: ModuleMap,
    pub alpha1: ModuleMap,
    pub alpha2: ModuleMap,
    pub j: ModuleMap,
}

impl CartesianSquare {
    pub fn new(
        iota: ModuleMap,
        alpha1: ModuleMap,
        alpha2: ModuleMap,
        j: ModuleMap,
    ) -> Result<Self> {
        let sq = CartesianSquare {
            iota,
            alpha1,
            alpha2,
            j,
        };
        sq.check()?;
        Ok(sq)
    }

    pub fn m1(&self) -> &PresentedModule {
        &self.iota.source
    }
    pub fn m2(&self) -> &PresentedModule {
        &self.iota.target
    }
    pub fn s1(&self) -> usize {
        self.j.source.gens()
    }
    pub fn s2(&self) -> usize {
        self.j.target.gens()
    }

    fn check(&self) -> Result<()> {
        let free = |m: &PresentedModule| m.lattice().is_zero();
        if !free(&self.j.source) || !free(&self.j.target) {
            return invalid("bottom row must be free");
        }
        if self.alpha1.source != *self.m1()
            || self.alpha2.source != *self.m2()
            || self.alpha1.target != self.j.source
            || self.alpha2.target != self.j.target
        {
            return invalid("square endpoints do not match");
        }
        if !self
            .iota
            .then(&self.alpha2)?
            .equals(&self.alpha1.then(&self.j)?)
        {
            return invalid("square does not commute");
        }
        if !self.iota.is_injective() || !self.j.is_injective() {
            return invalid("vertical maps must be injective");
        }
        // every m ∈ M₂ with α₂(m) ∈ F₁ comes from M₁
        let jimg = self.j.image_lattice();
        let pre = crate::linalg::preimage(self.alpha2.expanded(), &jimg);
        let img = self.iota.image_lattice();
        if !pre.rows.iter().all(|v| img.contains(v)) {
            return invalid("square is not cartesian");
        }
        Ok(())
    }
}

/// Φ: ∩ʳM₂ ⊗ det(F₂*) → ∩^{r−s₂+s₁}M₁ ⊗ det(F₁*), with det(Fᵢ*) trivialized by
/// the wedge of the coordinate functionals.
pub fn cartesian_map(sq: &CartesianSquare, from: &Bidual, to: &Bidual) -> Result<ModuleMap> {
    let ring = sq.m1().ring().clone();
    let ctx = Zpn::of(&ring);
    let n = ring.order();
    let (s1, s2) = (sq.s1(), sq.s2());
    let t = s2 - s1;
    if from.base != *sq.m2() || to.base != *sq.m1() {
        return invalid("biduals do not match the square");
    }
    if from.r < t || to.r != from.r - t {
        return hypothesis(format!(
            "rank deficit: r = {} < {t} or target rank mismatch",
            from.r
        ));
    }
    // (F₂/F₁)* as functionals on F₂ killing F₁
    let jt: Vec<Vec<GroupRingElement>> = (0..s2)
        .map(|k| {
            (0..s1)
                .map(|i| {
                    ring.element(sq.j.rows()[i][k * n..(k + 1) * n].to_vec())
                        .unwrap()
                })
                .collect()
        })
        .collect();
    let jt_exp = if s1 == 0 {
        crate::linalg::ResidueMatrix::zeros(ctx, s2 * n, 0)
    } else {
        expand_scalars(&ring, &jt)?
    };
    let ker = kernel(&jt_exp);
    let fs = minimal_generators(&ring, &ker, &HowellBasis::zero(ctx, s2 * n));
    if fs.len() != t {
        return hypothesis("F₂/F₁ is not free of rank s₂ − s₁");
    }
    let solver = Solver::new(&jt_exp);
    let mut gs = Vec::new();
    for i in 0..s1 {
        let mut e = vec![0; s1 * n];
        e[i * n] = 1;
        gs.push(
            solver
                .solve(&e)
                .ok_or_else(|| Error::Hypothesis("F₁ is not a direct summand".into()))?,
        );
    }
    let basis: Vec<Vec<GroupRingElement>> =
        fs.iter().chain(&gs).map(|v| elements(&ring, v)).collect();
    let lambda = det(&ring, &basis);
    let lambda_inv =
        gr_inverse(&lambda).ok_or_else(|| Error::Hypothesis("orientation is not a unit".into()))?;

    // ψᵢ = fᵢ∘α₂ in M₂*-coordinates, and Φ = ψ₁∧…∧ψ_t
    let k2 = from.dual.maps.len();
    let mut psi = Vec::new();
    for f in &fs {
        let fblocks: Vec<Vec<u64>> = f.chunks(n).map(|c| c.to_vec()).collect();
        let vals: Vec<u64> = sq
            .alpha2
            .rows()
            .iter()
            .flat_map(|row| combine(&ring, row, &fblocks, n))
            .collect();
        psi.push(from.functional_coords(&vals)?);
    }
    let phi = wedge_coords(&ring, k2, &psi);

    // lifts of M₁* generators along ι*
    let restricted: Vec<Vec<u64>> = from
        .dual
        .maps
        .iter()
        .map(|w| {
            let wblocks: Vec<Vec<u64>> = w.chunks(n).map(|c| c.to_vec()).collect();
            sq.iota
                .rows()
                .iter()
                .flat_map(|row| combine(&ring, row, &wblocks, n))
                .collect()
        })
        .collect();
    let g1 = sq.m1().gens();
    let lift_solver = Solver::new(&expand_vectors(&ring, g1 * n, &restricted));
    let mut lifts = Vec::new();
    for u in &to.dual.maps {
        let c = lift_solver
            .solve(u)
            .ok_or_else(|| Error::Invalid("restriction of duals is not surjective".into()))?;
        lifts.push(c);
    }
    let lift_wedges: Vec<Vec<u64>> = to
        .subsets
        .iter()
        .map(|tset| {
            let vs: Vec<Vec<u64>> = tset.iter().map(|&i| lifts[i].clone()).collect();
            wedge_coords(&ring, k2, &vs)
        })
        .collect();

    let mut rows = Vec::new();
    for psi_gen in &from.hom.maps {
        let contracted = contract_values(&ring, k2, &phi, t, psi_gen, from.r);
        let blocks: Vec<Vec<u64>> = contracted.chunks(n).map(|c| c.to_vec()).collect();
        let mut vals = Vec::with_capacity(to.subsets.len() * n);
        for w in &lift_wedges {
            let v = ring.element(combine(&ring, w, &blocks, n)).unwrap();
            vals.extend_from_slice((&v * &lambda_inv).coeffs());
        }
        rows.push(
            to.coords(&vals)
                .ok_or_else(|| Error::Invalid("image does not descend to M₁".into()))?,
        );
    }
    ModuleMap::new(from.space(), to.space(), rows)
}

/// ∩ʳ of f: A → B, dual to Λʳ(f*): Λʳ(B*) → Λʳ(A*).
pub fn bidual_map(f: &ModuleMap, from: &Bidual, to: &Bidual) -> Result<ModuleMap> {
    if from.r != to.r || from.base != f.source || to.base != f.target {
        return invalid("biduals do not match the map");
    }
    let ring = f.source.ring().clone();
    let n = ring.order();
    let ka = from.dual.maps.len();
    // each B* generator pulled back to A*, in A*-coordinates
    let pulled: Vec<Vec<u64>> = to
        .dual
        .maps
        .iter()
        .map(|w| {
            let wb: Vec<Vec<u64>> = w.chunks(n).map(|c| c.to_vec()).collect();
            let vals: Vec<u64> = f
                .rows()
                .iter()
                .flat_map(|row| combine(&ring, row, &wb, n))
                .collect();
            from.functional_coords(&vals)
        })
        .collect::<Result<_>>()?;
    let wedges: Vec<Vec<u64>> = to
        .subsets
        .iter()
        .map(|t| {
            wedge_coords(
                &ring,
                ka,
                &t.iter().map(|&i| pulled[i].clone()).collect::<Vec<_>>(),
            )
        })
        .collect();
    let mut rows = Vec::new();
    for psi in &from.hom.maps {
        let mut vals = Vec::with_capacity(to.subsets.len() * n);
        for w in &wedges {
            vals.extend_from_slice(from.pair(psi, w).coeffs());
        }
        rows.push(
            to.coords(&vals)
                .ok_or_else(|| Error::Invalid("pushforward is not a functional".into()))?,
        );
    }
    ModuleMap::new(from.space(), to.space(), rows)
}

/// A two-term complex of free modules P¹ → P² given by an s₁×s₂ matrix.
#[derive(Debug, Clone)]
pub struct FreeComplex {
    pub ring: Ring,
    pub s1: usize,
    pub s2: usize,
    pub alpha: Vec<Vec<u64>>,
}

impl FreeComplex {
    pub fn new(ring: &Ring, alpha: Vec<Vec<GroupRingElement>>, s2: usize) -> Result<Self> {
        if alpha.iter().any(|r| r.len() != s2) {
            return invalid("ragged differential");
        }
        let s1 = alpha.len();
        Ok(FreeComplex {
            ring: ring.clone(),
            s1,
            s2,
            alpha: alpha.iter().map(|r| crate::linalg::flatten(r)).collect(),
        })
    }

    fn map(&self) -> ModuleMap {
        ModuleMap::new(
            &PresentedModule::free(&self.ring, self.s1),
            &PresentedModule::free(&self.ring, self.s2),
            self.alpha.clone(),
        )
        .unwrap()
    }

    /// H¹ = ker α with its inclusion into P¹.
    pub fn kernel(&self) -> Result<(PresentedModule, ModuleMap)> {
        self.map().kernel()
    }

    /// ker(ΛʳP¹ → P² ⊗ Λ^{r−1}P¹), a lattice in R^{C(s₁,r)}.
    pub fn wedge_kernel(&self, r: usize) -> HowellBasis {
        let ring = &self.ring;
        let n = ring.order();
        let ctx = Zpn::of(ring);
        let top = subsets(self.s1, r);
        if r == 0 {
            return HowellBasis::zero(ctx, n);
        }
        let low = subsets(self.s1, r - 1);
        let cols = self.s2 * low.len() * n;
        let mut gens: Vec<Vec<u64>> = Vec::new();
        for s in &top {
            let mut v = vec![0u64; cols];
            for (pos, &i) in s.iter().enumerate() {
                let rest: Vec<usize> = s.iter().copied().filter(|&x| x != i).collect();
                let li = subset_position(&low, &rest);
                for k in 0..self.s2 {
                    let a = &self.alpha[i][k * n..(k + 1) * n];
                    for (h, &x) in a.iter().enumerate() {
                        let x = if pos % 2 == 0 {
                            x
                        } else {
                            (ring.modulus() - x) % ring.modulus()
                        };
                        let at = (k * low.len() + li) * n + h;
                        v[at] = (v[at] + x) % ring.modulus();
                    }
                }
            }
            gens.push(v);
        }
        let big = expand_vectors(ring, cols, &gens);
        kernel(&big)
    }

    /// Image of ∩ʳ(ker α) in ∩ʳP¹ = ΛʳP¹, in standard wedge coordinates, and
    /// whether that map is injective.
    pub fn bidual_image(&self, r: usize) -> Result<(HowellBasis, bool)> {
        let ring = &self.ring;
        let n = ring.order();
        let (m, incl) = self.kernel()?;
        let p1 = PresentedModule::free(ring, self.s1);
        let bm = Bidual::new(&m, r);
        let bp = Bidual::new(&p1, r);
        let f = bidual_map(&incl, &bm, &bp)?;
        let coords: Vec<Vec<u64>> = (0..self.s1)
            .map(|i| {
                let mut e = vec![0; self.s1 * n];
                e[i * n] = 1;
                bp.functional_coords(&e)
            })
            .collect::<Result<_>>()?;
        let mut rows = Vec::new();
        for img in f.rows() {
            let vals = bp.values(img);
            let mut x = Vec::new();
            for t in subsets(self.s1, r) {
                let w = wedge_coords(
                    ring,
                    bp.dual.maps.len(),
                    &t.iter().map(|&i| coords[i].clone()).collect::<Vec<_>>(),
                );
                x.extend_from_slice(bp.pair(&vals, &w).coeffs());
            }
            rows.push(x);
        }
        let dim = subsets(self.s1, r).len() * n;
        Ok((crate::module::span(ring, dim, &rows), f.is_injective()))
    }

    pub fn base_change(&self, proj: &crate::module::RingProjection) -> FreeComplex {
        FreeComplex {
            ring: proj.target.clone(),
            s1: self.s1,
            s2: self.s2,
            alpha: self.alpha.iter().map(|r| proj.apply_flat(r)).collect(),
        }
    }
}

/// The square over the coordinate inclusion F₁ = R^{keep} ⊆ F₂, with M₁ = α₂⁻¹(F₁).
pub fn coordinate_square(alpha2: &ModuleMap, keep: &[usize]) -> Result<CartesianSquare> {
    let m2 = &alpha2.source;
    let ring = m2.ring();
    let n = ring.order();
    let s2 = alpha2.target.gens();
    if !alpha2.target.lattice().is_zero()
        || keep.iter().any(|&c| c >= s2)
        || keep.windows(2).any(|w| w[0] >= w[1])
    {
        return invalid("coordinate square needs a free target and increasing coordinates");
    }
    let f1 = PresentedModule::free(ring, keep.len());
    let unit = |c: usize| {
        let mut v = vec![0u64; s2 * n];
        v[c * n] = 1;
        v
    };
    let j = ModuleMap::new(&f1, &alpha2.target, keep.iter().map(|&c| unit(c)).collect())?;
    let pre = crate::linalg::preimage(alpha2.expanded(), &j.image_lattice());
    let gens = minimal_generators(ring, &pre, m2.lattice());
    let (m1, iota) = submodule_presentation(m2, &gens)?;
    let rows = gens
        .iter()
        .map(|g| {
            let img = alpha2.apply(g);
            keep.iter()
                .flat_map(|&c| img[c * n..(c + 1) * n].to_vec())
                .collect()
        })
        .collect();
    let alpha1 = ModuleMap::new(&m1, &f1, rows)?;
    CartesianSquare::new(iota, alpha1, alpha2.clone(), j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z9() -> Ring {
        Ring::scalars(3, 2).unwrap()
    }

    #[test]
    fn exterior_powers() {
        let r = z9();
        let free2 = PresentedModule::free(&r, 2);
        assert_eq!(exterior_power(&free2, 0).length(), 2);
        assert_eq!(exterior_power(&free2, 2).length(), 2);
        let z3 = PresentedModule::cyclic(&r, &[r.scalar(3)]);
        let sq = z3.direct_sum(&z3);
        assert_eq!(exterior_power(&sq, 2).length(), 1);
        assert!(exterior_power(&z3, 2).is_zero());
    }

    #[test]
    fn biduals_of_basic_modules() {
        let r = Ring::new(3, 2, &[3]).unwrap();
        for k in 1..=3 {
            let f = PresentedModule::free(&r, k);
            for rank in 0..=k {
                let b = Bidual::new(&f, rank);
                assert!(xi_map(&b).is_bijective(), "k={k} r={rank}");
            }
        }
        let z = z9();
        let z3 = PresentedModule::cyclic(&z, &[z.scalar(3)]);
        let b1 = Bidual::new(&z3, 1);
        assert_eq!(b1.space().length(), 1);
        assert!(xi_map(&b1).is_bijective());
        let b2 = Bidual::new(&z3, 2);
        assert!(xi_map(&b2).is_zero());
        assert!(Bidual::new(&PresentedModule::zero(&z), 1).space().is_zero());
    }

    #[test]
    fn contraction_by_first_coordinate() {
        let r = z9();
        let m = PresentedModule::free(&r, 2);
        let d = dual(&m);
        let (b2, b1, b0) = (
            Bidual::with_dual(&d, 2),
            Bidual::with_dual(&d, 1),
            Bidual::with_dual(&d, 0),
        );
        let e1 = b1.functional_coords(&[1, 0]).unwrap();
        let c = contract(&e1, &b2, &b1).unwrap();
        let top = b2.coords(&[1]).unwrap();
        let img = b1.values(&c.apply(&top));
        // the functional on M* given by evaluation at e₂
        let e2_star = b1.functional_coords(&[0, 1]).unwrap();
        let e1_star = b1.functional_coords(&[1, 0]).unwrap();
        assert_eq!(b1.pair(&img, &e2_star), r.one());
        assert_eq!(b1.pair(&img, &e1_star), r.zero());
        let id = contract(&[1], &b1, &b1).unwrap();
        assert!(id.equals(&ModuleMap::identity(b1.space())));
        let ee = wedge_coords(&r, 2, &[e1.clone(), e1]);
        assert!(contract(&ee, &b2, &b0).unwrap().is_zero());
    }

    #[test]
    fn cartesian_coordinate_square() {
        let r = z9();
        let f2 = PresentedModule::free(&r, 2);
        let f1 = PresentedModule::free(&r, 1);
        let j = ModuleMap::new(&f1, &f2, vec![vec![1, 0]]).unwrap();
        let sq = CartesianSquare::new(
            j.clone(),
            ModuleMap::identity(&f1),
            ModuleMap::identity(&f2),
            j,
        )
        .unwrap();
        let from = Bidual::new(&f2, 2);
        let to = Bidual::new(&f1, 1);
        let phi = cartesian_map(&sq, &from, &to).unwrap();
        let top = from.coords(&[1]).unwrap();
        // with det(F₂*) oriented by e₂*∧e₁* the map is contraction by e₂*
        let e2 = from.functional_coords(&[0, 1]).unwrap();
        let contracted = contract(&e2, &from, &Bidual::with_dual(&from.dual, 1)).unwrap();
        let c = to.values(&phi.apply(&top));
        let d = from.dual.clone();
        let via = Bidual::with_dual(&d, 1).values(&contracted.apply(&top));
        let e1_star = to.functional_coords(&[1]).unwrap();
        let e1_big = Bidual::with_dual(&d, 1).functional_coords(&[1, 0]).unwrap();
        let lhs = to.pair(&c, &e1_star);
        let rhs = Bidual::with_dual(&d, 1).pair(&via, &e1_big);
        assert_eq!(lhs, -&rhs);
        assert_eq!(lhs, r.one());
        let same = CartesianSquare::new(
            ModuleMap::identity(&f2),
            ModuleMap::identity(&f2),
            ModuleMap::identity(&f2),
            ModuleMap::identity(&f2),
        )
        .unwrap();
        let id = cartesian_map(&same, &from, &from).unwrap();
        assert!(id.equals(&ModuleMap::identity(from.space())));
    }

    #[test]
    fn non_cartesian_square_rejected() {
        let r = z9();
        let f1 = PresentedModule::free(&r, 1);
        let zero = PresentedModule::zero(&r);
        let incl = ModuleMap::zero(&zero, &f1);
        let bad = CartesianSquare::new(
            incl,
            ModuleMap::zero(&zero, &f1),
            ModuleMap::identity(&f1),
            ModuleMap::identity(&f1),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn determinant_small() {
        let r = z9();
        let m = |a: i128, b: i128, c: i128, d: i128| {
            vec![
                vec![r.scalar(a), r.scalar(b)],
                vec![r.scalar(c), r.scalar(d)],
            ]
        };
        assert_eq!(det(&r, &m(1, 2, 3, 4)), r.scalar(-2));
        assert_eq!(det(&r, &[]), r.one());
        let m3 = vec![
            vec![r.scalar(2), r.scalar(0), r.scalar(1)],
            vec![r.scalar(1), r.scalar(3), r.scalar(2)],
            vec![r.scalar(1), r.scalar(1), r.scalar(1)],
        ];
        assert_eq!(det(&r, &m3), r.scalar(2 + (1 - 3)));
    }
}
