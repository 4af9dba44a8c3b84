//! Synthetic Selmer data over R, Stark systems on them, and the classes κ^σ, δ^σ
//! attached to rank-0 systems.
//!
//! Labels are indexed 0..L in ascending order of their primes and a square-free
//! product 𝔫 is a bit mask. Every H(𝔫) is cut out of the top module H(𝔐) by
//! functionals: `div[i]` is the coordinate of H_{/f}(qᵢ), `phi[i]` the transverse
//! coordinate φ_{qᵢ}, and `local` the Σ-local coordinates used by rank reduction.
//! H(𝔫) is the common kernel of div_q for q ∤ 𝔫. det(W_𝔫) is trivialized by the
//! wedge of the div_q in ascending order.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{hypothesis, invalid, Error, Result};
use crate::exterior::{cartesian_map, subsets, Bidual, CartesianSquare};
use crate::ideal::{fitting_ideal, IdealHandle};
use crate::linalg::{flatten, ResidueMatrix, Solver, Zpn};
use crate::module::{
    combine, dual, expand_vectors, submodule_presentation, ModuleJson, ModuleMap, PresentedModule,
};
use crate::random::{self, Rng};
use crate::ring::{GroupRingElement, Ring, RingSpec};
use crate::units::primitive_root;

fn blocks(v: &[u64], n: usize) -> Vec<Vec<u64>> {
    v.chunks(n).map(|c| c.to_vec()).collect()
}

/// f(x) for a functional given by its values on generators.
pub fn apply_functional(ring: &Ring, f: &[u64], x: &[u64]) -> GroupRingElement {
    let n = ring.order();
    ring.element(combine(ring, x, &blocks(f, n), n))
        .expect("residues in range")
}

/// f∘map, as values on the generators of the map's source.
pub fn pull_back(f: &[u64], map: &ModuleMap) -> Vec<u64> {
    let ring = map.source.ring();
    map.rows()
        .iter()
        .flat_map(|row| apply_functional(ring, f, row).into_coeffs())
        .collect()
}

/// The map A → B whose composite with the injection `incl: B → T` is `map: A → T`.
pub fn factor_through(map: &ModuleMap, incl: &ModuleMap) -> Result<ModuleMap> {
    if map.target != incl.target {
        return invalid("maps have different targets");
    }
    let ring = map.source.ring();
    let t = &incl.target;
    let mut rows = expand_vectors(ring, t.dim(), incl.rows()).to_rows();
    rows.extend(t.lattice().rows.iter().cloned());
    let solver = Solver::new(&ResidueMatrix::from_rows(Zpn::of(ring), t.dim(), &rows));
    let k = incl.source.dim();
    let out = map
        .rows()
        .iter()
        .map(|y| solver.solve(y).map(|x| x[..k].to_vec()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Hypothesis("image is not contained in the submodule".into()))?;
    ModuleMap::new(&map.source, &incl.source, out)
}

fn unit_vector(ring: &Ring, len: usize, at: usize) -> Vec<u64> {
    let mut v = vec![0; len * ring.order()];
    v[at * ring.order()] = 1 % ring.modulus();
    v
}

fn bits(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|i| mask >> i & 1 == 1)
        .collect()
}

fn nu(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// Sign of the permutation sorting `xs` (distinct entries).
fn sort_sign(xs: &[usize]) -> bool {
    let mut even = true;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if xs[i] > xs[j] {
                even = !even;
            }
        }
    }
    even
}

fn signed(ring: &Ring, x: GroupRingElement, even: bool) -> GroupRingElement {
    if even {
        x
    } else {
        &ring.zero() - &x
    }
}

/// A submodule of the top module together with its inclusion.
#[derive(Debug, Clone)]
pub struct Piece {
    pub module: PresentedModule,
    pub incl: ModuleMap,
}

impl Piece {
    /// The common kernel of `fs` in `top`.
    pub fn cut(top: &PresentedModule, fs: &[Vec<u64>]) -> Result<Piece> {
        if fs.is_empty() {
            return Ok(Piece {
                module: top.clone(),
                incl: ModuleMap::identity(top),
            });
        }
        let (module, incl) = ModuleMap::to_free(top, fs)?.kernel()?;
        Ok(Piece { module, incl })
    }

    pub fn restrict(&self, f: &[u64]) -> Vec<u64> {
        pull_back(f, &self.incl)
    }
}

/// A finite Selmer datum on a pool of labels.
#[derive(Debug, Clone)]
pub struct SelmerDatum {
    pub ring: Ring,
    pub labels: Vec<u64>,
    pub top: PresentedModule,
    pub phi: Vec<Vec<u64>>,
    pub div: Vec<Vec<u64>>,
    pub local: Vec<Vec<u64>>,
    /// Module whose Fitting ideals the rank-0 system is rigged to compute.
    pub planted: Option<PresentedModule>,
    /// Inclusion of `top` into the top module of the datum this one was cut from.
    pub ambient: Option<ModuleMap>,
    levels: Vec<Piece>,
}

impl SelmerDatum {
    pub fn new(
        ring: &Ring,
        labels: Vec<u64>,
        top: PresentedModule,
        phi: Vec<Vec<u64>>,
        div: Vec<Vec<u64>>,
        local: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let l = labels.len();
        if l > 6 {
            return invalid("at most six labels");
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("labels must be strictly increasing");
        }
        if phi.len() != l || div.len() != l {
            return invalid("one φ and one div functional per label");
        }
        if top.ring() != ring {
            return Err(Error::RingMismatch("top module".into()));
        }
        let all: Vec<Vec<u64>> = phi.iter().chain(&div).chain(&local).cloned().collect();
        if all.iter().any(|f| f.len() != top.dim()) {
            return invalid("functional has the wrong length");
        }
        ModuleMap::to_free(&top, &all)?;
        let levels = (0..1usize << l)
            .map(|mask| {
                let fs: Vec<Vec<u64>> = (0..l)
                    .filter(|i| mask >> i & 1 == 0)
                    .map(|i| div[i].clone())
                    .collect();
                Piece::cut(&top, &fs)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SelmerDatum {
            ring: ring.clone(),
            labels,
            top,
            phi,
            div,
            local,
            planted: None,
            ambient: None,
            levels,
        })
    }

    /// H(𝔫) = R^{r+ν(𝔫)} with coordinate localizations.
    pub fn toy(ring: &Ring, labels: Vec<u64>, r: usize) -> Result<Self> {
        let l = labels.len();
        let top = PresentedModule::free(ring, l + r);
        let coord = |i: usize| unit_vector(ring, l + r, i);
        let phi = (0..l).map(coord).collect();
        let div = (0..l).map(coord).collect();
        let local = (l..l + r).map(coord).collect();
        let mut d = Self::new(ring, labels, top, phi, div, local)?;
        d.planted = Some(PresentedModule::zero(ring));
        Ok(d)
    }

    /// A random datum of core rank r whose strict part computes the Fitting ideals
    /// of a planted X = coker(M), M a random L×L matrix.
    ///
    /// On the basis e₁…e_L, f₁…f_r of H(𝔐) = R^{L+r}: φ_{qᵢ}(e_j) = δᵢⱼ,
    /// div_{qᵢ}(e_j) = M_{ji}, λ_k(e_j) = 0, λ_k(f_l) = δ_kl, and φ, div random
    /// on the fᵢ. The basis is then scrambled by a random unimodular matrix.
    pub fn synthetic(ring: &Ring, labels: Vec<u64>, r: usize, rng: &mut Rng) -> Result<Self> {
        let l = labels.len();
        let k = l + r;
        let invertible = rng.gen_bool(0.3);
        let m: Vec<Vec<GroupRingElement>> = (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| match (invertible, i.cmp(&j)) {
                        (true, std::cmp::Ordering::Equal) => {
                            &ring.one() + &random::element_in_power(ring, rng, 1)
                        }
                        (true, std::cmp::Ordering::Greater) => ring.zero(),
                        _ => random::sparse_entry(ring, rng),
                    })
                    .collect()
            })
            .collect();
        // values of the 2L + r functionals on the basis, one row per basis vector
        let mut vals: Vec<Vec<GroupRingElement>> = Vec::new();
        for j in 0..k {
            let mut row = Vec::new();
            for i in 0..l {
                row.push(if j < l {
                    if i == j {
                        ring.one()
                    } else {
                        ring.zero()
                    }
                } else {
                    random::sparse_entry(ring, rng)
                });
            }
            for i in 0..l {
                row.push(if j < l {
                    m[j][i].clone()
                } else {
                    random::sparse_entry(ring, rng)
                });
            }
            for t in 0..r {
                row.push(if j == l + t { ring.one() } else { ring.zero() });
            }
            vals.push(row);
        }
        let scramble = unimodular(ring, k, rng);
        let mixed: Vec<Vec<GroupRingElement>> = scramble
            .iter()
            .map(|srow| {
                (0..2 * l + r)
                    .map(|c| {
                        srow.iter()
                            .zip(&vals)
                            .fold(ring.zero(), |acc, (a, v)| &acc + &(a * &v[c]))
                    })
                    .collect()
            })
            .collect();
        let functional =
            |c: usize| flatten(&mixed.iter().map(|row| row[c].clone()).collect::<Vec<_>>());
        let top = PresentedModule::free(ring, k);
        let phi = (0..l).map(functional).collect();
        let div = (l..2 * l).map(functional).collect();
        let local = (2 * l..2 * l + r).map(functional).collect();
        let mut d = Self::new(ring, labels, top, phi, div, local)?;
        d.planted = Some(PresentedModule::new(ring, l, &m)?);
        Ok(d)
    }

    pub fn pool(&self) -> usize {
        self.labels.len()
    }

    pub fn rank(&self) -> usize {
        self.local.len()
    }

    pub fn level(&self, mask: usize) -> &Piece {
        &self.levels[mask]
    }

    /// Replaces H(𝔫) by the submodule of the top module generated by `gens`.
    pub fn with_level(mut self, mask: usize, gens: &[Vec<u64>]) -> Result<Self> {
        if mask >= self.levels.len() {
            return invalid("mask outside the pool");
        }
        let (module, incl) = submodule_presentation(&self.top, gens)?;
        self.levels[mask] = Piece { module, incl };
        Ok(self)
    }

    /// The strict datum: everything intersected with the kernel of the Σ-local maps.
    pub fn strict(&self) -> Result<SelmerDatum> {
        let cut = Piece::cut(&self.top, &self.local)?;
        let pb = |fs: &[Vec<u64>]| fs.iter().map(|f| cut.restrict(f)).collect::<Vec<_>>();
        let mut d = SelmerDatum::new(
            &self.ring,
            self.labels.clone(),
            cut.module.clone(),
            pb(&self.phi),
            pb(&self.div),
            vec![],
        )?;
        d.planted = self.planted.clone();
        d.ambient = Some(cut.incl);
        Ok(d)
    }

    /// Generator σ_q of each G_q, recorded as a primitive root mod q.
    pub fn sigma_generators(&self) -> Vec<(u64, u64)> {
        self.labels
            .iter()
            .map(|&q| (q, primitive_root(q, 1).unwrap_or(0)))
            .collect()
    }

    fn localization(&self, piece: &Piece, idx: &[usize]) -> Result<ModuleMap> {
        let fs: Vec<Vec<u64>> = idx.iter().map(|&i| piece.restrict(&self.div[i])).collect();
        ModuleMap::to_free(&piece.module, &fs)
    }

    /// H(𝔫) ↪ H(𝔪) over W_𝔫* ↪ W_𝔪*.
    pub fn square(&self, n: usize, m: usize) -> Result<CartesianSquare> {
        if n & !m != 0 {
            return invalid("𝔫 does not divide 𝔪");
        }
        let (lo, hi) = (&self.levels[n], &self.levels[m]);
        let iota = factor_through(&lo.incl, &hi.incl)?;
        let (bn, bm) = (bits(n), bits(m));
        let a1 = self.localization(lo, &bn)?;
        let a2 = self.localization(hi, &bm)?;
        let rows = bn
            .iter()
            .map(|b| {
                unit_vector(
                    &self.ring,
                    bm.len(),
                    bm.iter().position(|c| c == b).unwrap(),
                )
            })
            .collect();
        let j = ModuleMap::new(&a1.target, &a2.target, rows)?;
        CartesianSquare::new(iota, a1, a2, j)
    }

    /// Every square of the poset, plus the core-rank axiom: φ ⊕ λ identifies
    /// H(𝔐) with R^{L+r}.
    pub fn validate(&self) -> DatumReport {
        let mut violations = Vec::new();
        let mut squares = 0;
        for m in 0..self.levels.len() {
            let mut n = m;
            loop {
                squares += 1;
                if let Err(e) = self.square(n, m) {
                    violations.push(format!(
                        "square {:?} ⊂ {:?}: {e}",
                        self.names(n),
                        self.names(m)
                    ));
                }
                if n == 0 {
                    break;
                }
                n = (n - 1) & m;
            }
        }
        let core: Vec<Vec<u64>> = self.phi.iter().chain(&self.local).cloned().collect();
        match ModuleMap::to_free(&self.top, &core) {
            Ok(map) if map.is_bijective() => {}
            _ => violations.push("φ ⊕ λ is not an isomorphism onto a free module".into()),
        }
        DatumReport {
            valid: violations.is_empty(),
            squares_checked: squares,
            violations,
        }
    }

    pub fn names(&self, mask: usize) -> Vec<u64> {
        bits(mask).into_iter().map(|i| self.labels[i]).collect()
    }

    fn mask_of(&self, labels: &[u64]) -> Result<usize> {
        labels.iter().try_fold(0usize, |acc, q| {
            let i = self
                .labels
                .iter()
                .position(|x| x == q)
                .ok_or_else(|| Error::Invalid(format!("unknown label {q}")))?;
            Ok(acc | 1 << i)
        })
    }

    pub fn to_json(&self) -> DatumJson {
        let n = self.ring.order();
        let enc = |fs: &[Vec<u64>]| -> Vec<Vec<Vec<String>>> {
            fs.iter()
                .map(|f| {
                    f.chunks(n)
                        .map(|c| c.iter().map(|x| x.to_string()).collect())
                        .collect()
                })
                .collect()
        };
        DatumJson {
            ring: self.ring.spec(),
            labels: self.labels.iter().map(|q| q.to_string()).collect(),
            top: self.top.to_json(),
            phi: enc(&self.phi),
            div: enc(&self.div),
            local: enc(&self.local),
            planted: self.planted.as_ref().map(|m| m.to_json()),
            levels: vec![],
        }
    }

    pub fn from_json(j: &DatumJson) -> Result<Self> {
        let ring = Ring::from_spec(&j.ring)?;
        let labels = j
            .labels
            .iter()
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad label {s}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let top = PresentedModule::from_json(&j.top)?;
        if top.ring() != &ring {
            return Err(Error::RingMismatch("top module".into()));
        }
        let dec = |fs: &[Vec<Vec<String>>]| {
            fs.iter()
                .map(|f| parse_vector(&ring, f))
                .collect::<Result<Vec<_>>>()
        };
        let mut d = SelmerDatum::new(
            &ring,
            labels,
            top,
            dec(&j.phi)?,
            dec(&j.div)?,
            dec(&j.local)?,
        )?;
        d.planted = j
            .planted
            .as_ref()
            .map(PresentedModule::from_json)
            .transpose()?;
        for o in &j.levels {
            let labels = o
                .labels
                .iter()
                .map(|s| {
                    s.parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad label {s}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let mask = d.mask_of(&labels)?;
            let gens = dec(&o.generators)?;
            d = d.with_level(mask, &gens)?;
        }
        Ok(d)
    }
}

fn parse_vector(ring: &Ring, v: &[Vec<String>]) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for c in v {
        let coeffs = c
            .iter()
            .map(|s| {
                s.parse::<i128>()
                    .map_err(|_| Error::Parse(format!("bad residue {s}")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.extend_from_slice(ring.element_signed(&coeffs)?.coeffs());
    }
    Ok(out)
}

/// A random element of GL_k(R): lower times upper unitriangular, times a unit diagonal.
fn unimodular(ring: &Ring, k: usize, rng: &mut Rng) -> Vec<Vec<GroupRingElement>> {
    let tri = |rng: &mut Rng, lower: bool| -> Vec<Vec<GroupRingElement>> {
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        if i == j {
                            ring.one()
                        } else if (j < i) == lower {
                            random::sparse_entry(ring, rng)
                        } else {
                            ring.zero()
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let (a, b) = (tri(rng, true), tri(rng, false));
    let mut out: Vec<Vec<GroupRingElement>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (0..k).fold(ring.zero(), |acc, t| &acc + &(&a[i][t] * &b[t][j])))
                .collect()
        })
        .collect();
    let units: Vec<i128> = (1..ring.modulus() as i128)
        .filter(|u| u % ring.p() as i128 != 0)
        .collect();
    for row in out.iter_mut() {
        let u = ring.scalar(*units.choose(rng).expect("p > 1"));
        for x in row.iter_mut() {
            *x = &*x * &u;
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatumJson {
    pub ring: RingSpec,
    pub labels: Vec<String>,
    pub top: ModuleJson,
    pub phi: Vec<Vec<Vec<String>>>,
    pub div: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    pub local: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    pub planted: Option<ModuleJson>,
    /// Explicit H(𝔫), overriding the functional description.
    #[serde(default)]
    pub levels: Vec<LevelJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelJson {
    pub labels: Vec<String>,
    pub generators: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatumReport {
    pub valid: bool,
    pub squares_checked: usize,
    pub violations: Vec<String>,
}

/// ε_𝔫 ∈ ∩^{r+ν(𝔫)}H(𝔫) for every mask, in the coordinates of the matching bidual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarkSystem {
    pub rank: usize,
    pub values: Vec<Vec<u64>>,
}

/// The spaces ∩^{r+ν(𝔫)}H(𝔫) and the transition maps along covering edges.
#[derive(Debug, Clone)]
pub struct StarkSpace {
    pub rank: usize,
    pub biduals: Vec<Bidual>,
    edges: BTreeMap<(usize, usize), ModuleMap>,
}

impl StarkSpace {
    pub fn new(d: &SelmerDatum, rank: usize) -> Result<Self> {
        let biduals: Vec<Bidual> = (0..d.levels.len())
            .map(|m| Bidual::new(&d.levels[m].module, rank + nu(m)))
            .collect();
        let mut edges = BTreeMap::new();
        for m in 0..d.levels.len() {
            for i in bits(m) {
                let n = m & !(1 << i);
                edges.insert(
                    (m, n),
                    cartesian_map(&d.square(n, m)?, &biduals[m], &biduals[n])?,
                );
            }
        }
        Ok(StarkSpace {
            rank,
            biduals,
            edges,
        })
    }

    /// Φ_{𝔪,𝔫} computed from the square of 𝔫 | 𝔪 directly.
    pub fn transition(&self, d: &SelmerDatum, m: usize, n: usize) -> Result<ModuleMap> {
        if n == m {
            return Ok(ModuleMap::identity(self.biduals[m].space()));
        }
        cartesian_map(&d.square(n, m)?, &self.biduals[m], &self.biduals[n])
    }

    pub fn edges(&self) -> impl Iterator<Item = (&(usize, usize), &ModuleMap)> {
        self.edges.iter()
    }

    /// Covering edges 𝔫 | 𝔪 with Φ_{𝔪,𝔫}(ε_𝔪) ≠ ε_𝔫.
    pub fn incompatible_edges(&self, eps: &StarkSystem) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter(|((m, n), phi)| {
                let space = phi.target.clone();
                let diff = crate::module::vsub(
                    &phi.apply(&eps.values[*m]),
                    &eps.values[*n],
                    space.ring().modulus(),
                );
                !space.is_zero_element(&diff)
            })
            .map(|(e, _)| *e)
            .collect()
    }
}

/// SS_r as a kernel over expanded scalars.
#[derive(Debug, Clone)]
pub struct StarkSolution {
    pub module: PresentedModule,
    pub length: u32,
    pub free_rank_one: bool,
    pub basis: Option<StarkSystem>,
}

pub fn stark_solve(d: &SelmerDatum, space: &StarkSpace) -> Result<StarkSolution> {
    let ring = &d.ring;
    let masks = d.levels.len();
    let spaces: Vec<&PresentedModule> = space.biduals.iter().map(|b| b.space()).collect();
    let total = spaces
        .iter()
        .fold(PresentedModule::zero(ring), |acc, s| acc.direct_sum(s));
    let mut offsets = vec![0usize];
    for s in &spaces {
        offsets.push(offsets.last().unwrap() + s.dim());
    }
    let edge_list: Vec<((usize, usize), &ModuleMap)> =
        space.edges.iter().map(|(e, m)| (*e, m)).collect();
    let target = edge_list
        .iter()
        .fold(PresentedModule::zero(ring), |acc, ((_, n), _)| {
            acc.direct_sum(spaces[*n])
        });
    let mut edge_off = vec![0usize];
    for ((_, n), _) in &edge_list {
        edge_off.push(edge_off.last().unwrap() + spaces[*n].dim());
    }
    let modulus = ring.modulus();
    let mut rows = Vec::new();
    for a in 0..masks {
        for g in 0..spaces[a].gens() {
            let mut row = vec![0u64; target.dim()];
            for (e, ((m, n), phi)) in edge_list.iter().enumerate() {
                let blk = &mut row[edge_off[e]..edge_off[e + 1]];
                if *m == a {
                    blk.copy_from_slice(&phi.rows()[g]);
                }
                if *n == a {
                    let unit = spaces[a].generator(g);
                    for (x, u) in blk.iter_mut().zip(unit) {
                        *x = (*x + modulus - u) % modulus;
                    }
                }
            }
            rows.push(row);
        }
    }
    let (module, incl) = if edge_list.is_empty() {
        (total.clone(), ModuleMap::identity(&total))
    } else {
        ModuleMap::new(&total, &target, rows)?.kernel()?
    };
    let length = module.length();
    let full = PresentedModule::free(ring, 1).length();
    let free_rank_one = length == full && fitting_ideal(&module, 1).is_unit();
    let basis = if free_rank_one {
        incl.rows()
            .iter()
            .find(|x| {
                submodule_presentation(&total, &[x.to_vec()])
                    .map(|(s, _)| s.length() == full)
                    .unwrap_or(false)
            })
            .map(|x| StarkSystem {
                rank: space.rank,
                values: (0..masks)
                    .map(|a| x[offsets[a]..offsets[a + 1]].to_vec())
                    .collect(),
            })
    } else {
        None
    };
    Ok(StarkSolution {
        module,
        length,
        free_rank_one,
        basis,
    })
}

/// The rank-reduction map l_𝔫 with its sign (−1)^{rν(𝔫)}, from ∩^{r+ν}H(𝔫) to
/// ∩^{ν}H_str(𝔫).
pub fn reduction_map(
    can: &SelmerDatum,
    strict: &SelmerDatum,
    from: &StarkSpace,
    to: &StarkSpace,
    mask: usize,
) -> Result<ModuleMap> {
    let ambient = strict
        .ambient
        .as_ref()
        .ok_or_else(|| Error::Invalid("datum has no Σ-local identification".into()))?;
    let r = can.rank();
    let (lo, hi) = (&strict.levels[mask], &can.levels[mask]);
    let iota = factor_through(&lo.incl.then(ambient)?, &hi.incl)?;
    let b = bits(mask);
    let a1 = strict.localization(lo, &b)?;
    // H_Σ* ⊕ W_𝔫*, Σ-coordinates first
    let fs: Vec<Vec<u64>> = can
        .local
        .iter()
        .chain(b.iter().map(|&i| &can.div[i]))
        .map(|f| hi.restrict(f))
        .collect();
    let a2 = ModuleMap::to_free(&hi.module, &fs)?;
    let rows = (0..b.len())
        .map(|i| unit_vector(&can.ring, b.len() + r, r + i))
        .collect();
    let j = ModuleMap::new(&a1.target, &a2.target, rows)?;
    let sq = CartesianSquare::new(iota, a1, a2, j)?;
    let map = cartesian_map(&sq, &from.biduals[mask], &to.biduals[mask])?;
    Ok(if r * b.len() % 2 == 1 {
        map.scale(&can.ring.scalar(-1))
    } else {
        map
    })
}

pub fn rank_reduction(
    can: &SelmerDatum,
    strict: &SelmerDatum,
    from: &StarkSpace,
    to: &StarkSpace,
    eps: &StarkSystem,
) -> Result<StarkSystem> {
    let values = (0..can.levels.len())
        .map(|m| Ok(reduction_map(can, strict, from, to, m)?.apply(&eps.values[m])))
        .collect::<Result<Vec<_>>>()?;
    Ok(StarkSystem { rank: 0, values })
}

/// Covering edges 𝔫 | 𝔪 where l_𝔫∘Φ^can_{𝔪,𝔫} ≠ Φ^str_{𝔪,𝔫}∘l_𝔪, with the number checked.
pub fn reduction_square_failures(
    can: &SelmerDatum,
    strict: &SelmerDatum,
    from: &StarkSpace,
    to: &StarkSpace,
) -> Result<(usize, Vec<(usize, usize)>)> {
    let maps = (0..can.levels.len())
        .map(|m| reduction_map(can, strict, from, to, m))
        .collect::<Result<Vec<_>>>()?;
    let mut bad = Vec::new();
    for ((m, n), phi) in from.edges() {
        let lhs = phi.then(&maps[*n])?;
        let rhs = maps[*m].then(&to.edges[&(*m, *n)])?;
        if !lhs.equals(&rhs) {
            bad.push((*m, *n));
        }
    }
    Ok((from.edges.len(), bad))
}

/// H_{F(𝔫)}: classes of H(𝔫) killed by φ_q for q | 𝔫, and also by div_{q} for
/// q | `extra`.
pub fn transverse_piece(d: &SelmerDatum, mask: usize, extra: usize) -> Result<Piece> {
    let l = d.pool();
    let fs: Vec<Vec<u64>> = (0..l)
        .filter(|i| mask >> i & 1 == 0 || extra >> i & 1 == 1)
        .map(|i| d.div[i].clone())
        .chain(bits(mask).into_iter().map(|i| d.phi[i].clone()))
        .collect();
    Piece::cut(&d.top, &fs)
}

/// Reg_𝔫(ε) = (−1)^{ν(𝔫)} ε_𝔫(∧_{q|𝔫} φ_q) ∈ ∩^{r}H_{F(𝔫)}, with its bidual.
pub fn regulator(
    d: &SelmerDatum,
    space: &StarkSpace,
    eps: &StarkSystem,
    mask: usize,
) -> Result<(Piece, Bidual, Vec<u64>)> {
    let f = transverse_piece(d, mask, 0)?;
    let hi = &d.levels[mask];
    let iota = factor_through(&f.incl, &hi.incl)?;
    let b = bits(mask);
    let fs: Vec<Vec<u64>> = b.iter().map(|&i| hi.restrict(&d.phi[i])).collect();
    let a2 = ModuleMap::to_free(&hi.module, &fs)?;
    let a1 = ModuleMap::to_free(&f.module, &[])?;
    let j = ModuleMap::zero(&a1.target, &a2.target);
    let sq = CartesianSquare::new(iota, a1, a2, j)?;
    let to = Bidual::new(&f.module, space.rank);
    let map = cartesian_map(&sq, &space.biduals[mask], &to)?;
    let map = if b.len() % 2 == 1 {
        map.scale(&d.ring.scalar(-1))
    } else {
        map
    };
    let value = map.apply(&eps.values[mask]);
    Ok((f, to, value))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationFailure {
    pub relation: String,
    pub n: Vec<u64>,
    pub q: Option<u64>,
    pub r: Option<u64>,
    pub sigma: Vec<u64>,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub checked: usize,
    pub failures: Vec<RelationFailure>,
}

impl RelationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// φ_q(Reg_𝔫 ε) = div_q(Reg_{𝔫/q} ε) for every 𝔫 and q | 𝔫, compared on all
/// (r−1)-fold wedges of functionals restricted from H(𝔐).
pub fn check_kolyvagin_relation(
    d: &SelmerDatum,
    space: &StarkSpace,
    eps: &StarkSystem,
) -> Result<RelationReport> {
    let mut report = RelationReport {
        checked: 0,
        failures: vec![],
    };
    if space.rank == 0 {
        return Ok(report);
    }
    let regs = (0..d.levels.len())
        .map(|m| regulator(d, space, eps, m))
        .collect::<Result<Vec<_>>>()?;
    let tops = dual(&d.top).maps;
    for m in 0..d.levels.len() {
        for i in bits(m) {
            let n = m & !(1 << i);
            let (fm, bm, km) = &regs[m];
            let (fn_, bn, kn) = &regs[n];
            for s in subsets(tops.len(), space.rank - 1) {
                let mut lf = vec![fm.restrict(&d.div[i])];
                let mut rf = vec![fn_.restrict(&d.phi[i])];
                for &t in &s {
                    lf.push(fm.restrict(&tops[t]));
                    rf.push(fn_.restrict(&tops[t]));
                }
                let lhs = bm.evaluate(km, &lf)?;
                let rhs = bn.evaluate(kn, &rf)?;
                report.checked += 1;
                if lhs != rhs {
                    report.failures.push(RelationFailure {
                        relation: "kolyvagin".into(),
                        n: d.names(m),
                        q: Some(d.labels[i]),
                        r: None,
                        sigma: vec![],
                        lhs: lhs.to_strings(),
                        rhs: rhs.to_strings(),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// κ^σ and δ^σ of a rank-0 system, evaluated on functionals of H(𝔐).
pub struct Derived<'a> {
    d: &'a SelmerDatum,
    space: &'a StarkSpace,
    eps: &'a StarkSystem,
}

impl<'a> Derived<'a> {
    pub fn new(d: &'a SelmerDatum, space: &'a StarkSpace, eps: &'a StarkSystem) -> Result<Self> {
        if eps.rank != 0 || space.rank != 0 {
            return hypothesis("κ^σ needs a rank-0 system");
        }
        Ok(Derived { d, space, eps })
    }

    /// ε̄_{𝔫,q}(φ_{σ(o₁)}∧…∧φ_{σ(o_ν)}∧f) scaled by (−1)^ν, for an ordering o of 𝔫.
    fn contract(
        &self,
        order: &[usize],
        q: Option<usize>,
        sigma: &[usize],
        f: Option<&[u64]>,
    ) -> Result<GroupRingElement> {
        let ring = &self.d.ring;
        let mut all = order.to_vec();
        all.extend(q);
        let mask = all.iter().fold(0usize, |acc, &i| acc | 1 << i);
        if nu(mask) != all.len() {
            return invalid("labels of 𝔫q must be distinct");
        }
        let piece = &self.d.levels[mask];
        let mut fs: Vec<Vec<u64>> = order
            .iter()
            .map(|&o| piece.restrict(&self.d.phi[sigma[o]]))
            .collect();
        fs.extend(f.map(|f| piece.restrict(f)));
        let v = self.space.biduals[mask].evaluate(&self.eps.values[mask], &fs)?;
        Ok(signed(
            ring,
            v,
            sort_sign(&all) == order.len().is_multiple_of(2),
        ))
    }

    /// κ^σ_{𝔫,q}(f), computed with the divisors of 𝔫 in the given order.
    pub fn kappa_ordered(
        &self,
        order: &[usize],
        q: usize,
        sigma: &[usize],
        f: &[u64],
    ) -> Result<GroupRingElement> {
        self.contract(order, Some(q), sigma, Some(f))
    }

    pub fn kappa(
        &self,
        n: usize,
        q: usize,
        sigma: &[usize],
        f: &[u64],
    ) -> Result<GroupRingElement> {
        if n >> q & 1 == 1 {
            return invalid("q divides 𝔫");
        }
        self.contract(&bits(n), Some(q), sigma, Some(f))
    }

    pub fn delta(&self, n: usize, sigma: &[usize]) -> Result<GroupRingElement> {
        self.contract(&bits(n), None, sigma, None)
    }

    pub fn delta_ordered(&self, order: &[usize], sigma: &[usize]) -> Result<GroupRingElement> {
        self.contract(order, None, sigma, None)
    }

    /// Relations (i)–(iv) over all 𝔫, q ∤ 𝔫, 𝔯 | 𝔫 and σ: pool → pool.
    pub fn check_relations(&self) -> Result<RelationReport> {
        let d = self.d;
        let l = d.pool();
        let ring = &d.ring;
        let mut report = RelationReport {
            checked: 0,
            failures: vec![],
        };
        for sigma in self_maps(l) {
            let deltas = (0..1usize << l)
                .map(|n| self.delta(n, &sigma))
                .collect::<Result<Vec<_>>>()?;
            for n in 0..1usize << l {
                for q in (0..l).filter(|q| n >> q & 1 == 0) {
                    let mut fail = |rel: &str,
                                    r: Option<usize>,
                                    lhs: GroupRingElement,
                                    rhs: GroupRingElement| {
                        report.checked += 1;
                        if lhs != rhs {
                            report.failures.push(RelationFailure {
                                relation: rel.into(),
                                n: d.names(n),
                                q: Some(d.labels[q]),
                                r: r.map(|r| d.labels[r]),
                                sigma: sigma.iter().map(|&s| d.labels[s]).collect(),
                                lhs: lhs.to_strings(),
                                rhs: rhs.to_strings(),
                            });
                        }
                    };
                    for r in bits(n) {
                        let lhs = self.kappa(n, q, &sigma, &d.div[r])?;
                        let rhs = self.kappa(n & !(1 << r), q, &sigma, &d.phi[sigma[r]])?;
                        fail("i", Some(r), lhs, rhs);
                        let lhs = self.kappa(n, q, &sigma, &d.phi[sigma[r]])?;
                        fail("iii", Some(r), lhs, ring.zero());
                    }
                    let lhs = self.kappa(n, q, &sigma, &d.div[q])?;
                    fail("ii", None, lhs, deltas[n].clone());
                    let lhs = self.kappa(n, q, &sigma, &d.phi[sigma[q]])?;
                    fail("iv", None, lhs, &ring.zero() - &deltas[n | 1 << q]);
                }
            }
        }
        Ok(report)
    }

    /// An element z of H(qr) ⊂ H(𝔐) with div_q(z) = 1, if one exists.
    pub fn find_z(&self, q: usize, r: usize) -> Option<Vec<u64>> {
        let d = self.d;
        let ring = &d.ring;
        let piece = &d.levels[1 << q | 1 << r];
        let vals = blocks(&piece.restrict(&d.div[q]), ring.order());
        if vals.is_empty() {
            return None;
        }
        let c =
            Solver::new(&expand_vectors(ring, ring.order(), &vals)).solve(ring.one().coeffs())?;
        Some(combine(ring, &c, piece.incl.rows(), d.top.dim()))
    }

    /// κ̃_{𝔪,q}(f) = −div_r(z)κ_{𝔪,r}(f) + δ_𝔪 f(z) + Σ_{s|𝔪} φ_{σ(s)}(z)κ_{𝔪/s,s}(f).
    fn tilde(
        &self,
        m: usize,
        r: usize,
        z: &[u64],
        sigma: &[usize],
        f: &[u64],
    ) -> Result<GroupRingElement> {
        let d = self.d;
        let ring = &d.ring;
        let mut acc = &self.delta(m, sigma)? * &apply_functional(ring, f, z);
        acc = &acc - &(&apply_functional(ring, &d.div[r], z) * &self.kappa(m, r, sigma, f)?);
        for s in bits(m) {
            acc = &acc
                + &(&apply_functional(ring, &d.phi[sigma[s]], z)
                    * &self.kappa(m & !(1 << s), s, sigma, f)?);
        }
        Ok(acc)
    }

    /// The compatibilities of κ̃ built from z ∈ H(qr) with div_q(z) = 1, over all
    /// 𝔪 prime to qr. When H_str(1) = 0 also κ̃ = κ.
    pub fn check_tilde(
        &self,
        q: usize,
        r: usize,
        z: &[u64],
        sigma: &[usize],
    ) -> Result<RelationReport> {
        let d = self.d;
        let ring = &d.ring;
        let l = d.pool();
        if q == r || q >= l || r >= l {
            return invalid("q and r must be distinct labels");
        }
        if apply_functional(ring, &d.div[q], z) != ring.one() {
            return hypothesis("div_q(z) ≠ 1");
        }
        if (0..l).any(|t| t != q && t != r && !apply_functional(ring, &d.div[t], z).is_zero()) {
            return hypothesis("z is not relaxed only at q and r");
        }
        let vanishing = d.levels[0].module.is_zero();
        let tops = dual(&d.top).maps;
        let mut report = RelationReport {
            checked: 0,
            failures: vec![],
        };
        let rest = ((1usize << l) - 1) & !(1 << q) & !(1 << r);
        let mut m = rest;
        loop {
            let mut push =
                |rel: &str, s: Option<usize>, lhs: GroupRingElement, rhs: GroupRingElement| {
                    report.checked += 1;
                    if lhs != rhs {
                        report.failures.push(RelationFailure {
                            relation: rel.into(),
                            n: d.names(m),
                            q: Some(d.labels[q]),
                            r: s.map(|s| d.labels[s]),
                            sigma: sigma.iter().map(|&s| d.labels[s]).collect(),
                            lhs: lhs.to_strings(),
                            rhs: rhs.to_strings(),
                        });
                    }
                };
            push(
                "div_q",
                None,
                self.tilde(m, r, z, sigma, &d.div[q])?,
                self.delta(m, sigma)?,
            );
            push(
                "div_r",
                Some(r),
                self.tilde(m, r, z, sigma, &d.div[r])?,
                ring.zero(),
            );
            for s in bits(m) {
                let lhs = self.tilde(m, r, z, sigma, &d.div[s])?;
                let rhs = self.tilde(m & !(1 << s), r, z, sigma, &d.phi[sigma[s]])?;
                push("div_s", Some(s), lhs, rhs);
            }
            if vanishing {
                for f in &tops {
                    push(
                        "equal",
                        None,
                        self.tilde(m, r, z, sigma, f)?,
                        self.kappa(m, q, sigma, f)?,
                    );
                }
            }
            if m == 0 {
                break;
            }
            m = (m - 1) & rest;
        }
        Ok(report)
    }
}

/// All maps {0..l} → {0..l}, lexicographically.
pub fn self_maps(l: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..l {
        out = out
            .into_iter()
            .flat_map(|s: Vec<usize>| (0..l).map(move |x| [s.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

/// I_i(ε) = Σ_{ν(𝔫)=i} im(ε_𝔫).
pub fn stark_ideals(
    d: &SelmerDatum,
    space: &StarkSpace,
    eps: &StarkSystem,
    i: usize,
) -> IdealHandle {
    let gens: Vec<GroupRingElement> = (0..d.levels.len())
        .filter(|&m| nu(m) == i)
        .flat_map(|m| space.biduals[m].image_generators(&eps.values[m]))
        .collect();
    IdealHandle::generated_by(&d.ring, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z9() -> Ring {
        Ring::scalars(3, 2).unwrap()
    }

    #[test]
    fn toy_datum_is_valid_and_has_a_rank_one_system() {
        let ring = z9();
        let d = SelmerDatum::toy(&ring, vec![7, 13], 1).unwrap();
        assert!(d.validate().valid);
        let s = d.strict().unwrap();
        assert!(s.validate().valid);
        let space = StarkSpace::new(&s, 0).unwrap();
        let sol = stark_solve(&s, &space).unwrap();
        assert!(sol.free_rank_one);
        let eps = sol.basis.unwrap();
        assert!(space.incompatible_edges(&eps).is_empty());
        assert!(stark_ideals(&s, &space, &eps, 0).is_unit());
    }

    #[test]
    fn empty_pool_gives_the_bidual_of_h1() {
        let ring = z9();
        let d = SelmerDatum::toy(&ring, vec![], 2).unwrap();
        let space = StarkSpace::new(&d, 2).unwrap();
        let sol = stark_solve(&d, &space).unwrap();
        assert_eq!(sol.module, *space.biduals[0].space());
    }

    #[test]
    fn corrupted_level_is_flagged() {
        let ring = z9();
        let d = SelmerDatum::toy(&ring, vec![7, 13], 0).unwrap();
        // H(7) replaced by 3·H(7)
        let gens = vec![vec![3, 0]];
        let bad = d.with_level(1, &gens).unwrap();
        let rep = bad.validate();
        assert!(!rep.valid);
        assert!(
            rep.violations.iter().any(|v| v.contains("cartesian")),
            "{:?}",
            rep.violations
        );
    }

    #[test]
    fn toy_relations_hold() {
        let ring = z9();
        let d = SelmerDatum::toy(&ring, vec![7, 13, 19], 1).unwrap();
        let s = d.strict().unwrap();
        let space = StarkSpace::new(&s, 0).unwrap();
        let eps = stark_solve(&s, &space).unwrap().basis.unwrap();
        let der = Derived::new(&s, &space, &eps).unwrap();
        let rep = der.check_relations().unwrap();
        assert!(rep.ok(), "{:?}", &rep.failures[..rep.failures.len().min(4)]);
        assert!(rep.checked > 0);
    }

    #[test]
    fn toy_transition_contracts_against_div() {
        let ring = z9();
        let d = SelmerDatum::toy(&ring, vec![7, 13, 19], 0).unwrap();
        let space = StarkSpace::new(&d, 0).unwrap();
        let (m, n) = (0b111, 0b010);
        let phi = space.transition(&d, m, n).unwrap();
        let b = &space.biduals[m];
        // the generator of ∩³R³ sent to ±e₁₃*: x ↦ det(div₇, div₁₉, x) up to the orientation sign
        let e = b
            .coords(&b.values(&unit_vector(&ring, b.space().gens(), 0)))
            .unwrap();
        let image = phi.apply(&e);
        let lvl = d.level(n);
        let f = lvl.restrict(&d.div[1]);
        let direct = b
            .evaluate(&e, &[d.div[0].clone(), d.div[2].clone(), d.div[1].clone()])
            .unwrap();
        let via = space.biduals[n].evaluate(&image, &[f]).unwrap();
        // complement (7, 19) moved in front of 13 costs one transposition
        assert_eq!(via, &ring.zero() - &direct);
        assert!(!via.is_zero());
        // composition through 𝔪′ = 7·13
        let two = space
            .transition(&d, m, 0b011)
            .unwrap()
            .then(&space.transition(&d, 0b011, n).unwrap())
            .unwrap();
        assert!(two.equals(&phi));
    }

    #[test]
    fn regulator_at_one_is_eps_one() {
        let ring = z9();
        let d = SelmerDatum::toy(&ring, vec![7, 13], 1).unwrap();
        let space = StarkSpace::new(&d, 1).unwrap();
        let eps = stark_solve(&d, &space).unwrap().basis.unwrap();
        let (f, b, reg) = regulator(&d, &space, &eps, 0).unwrap();
        for g in dual(&d.top).maps {
            let lhs = b.evaluate(&reg, &[f.restrict(&g)]).unwrap();
            let rhs = space.biduals[0]
                .evaluate(&eps.values[0], &[d.level(0).restrict(&g)])
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn orderings_and_tilde_kappa_on_the_toy() {
        let ring = z9();
        let d = SelmerDatum::toy(&ring, vec![7, 13, 19, 31], 0).unwrap();
        let space = StarkSpace::new(&d, 0).unwrap();
        let eps = stark_solve(&d, &space).unwrap().basis.unwrap();
        let der = Derived::new(&d, &space, &eps).unwrap();
        let sigma = vec![1, 1, 3, 0];
        let tops = dual(&d.top).maps;
        for f in tops.iter().chain(&d.div).chain(&d.phi) {
            let a = der.kappa_ordered(&[0, 1, 3], 2, &sigma, f).unwrap();
            let b = der.kappa_ordered(&[3, 0, 1], 2, &sigma, f).unwrap();
            assert_eq!(a, b);
        }
        assert_eq!(
            der.delta_ordered(&[2, 0], &sigma).unwrap(),
            der.delta_ordered(&[0, 2], &sigma).unwrap()
        );
        assert_eq!(
            der.delta(0, &sigma).unwrap(),
            ring.element(eps.values[0].clone()).unwrap()
        );
        let z = der.find_z(0, 1).unwrap();
        let rep = der.check_tilde(0, 1, &z, &sigma).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
        assert!(rep.checked > 0);
        let bad: Vec<u64> = z.iter().map(|x| x * 2 % 9).collect();
        assert!(matches!(
            der.check_tilde(0, 1, &bad, &sigma),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn perturbed_system_breaks_relation_two() {
        let ring = z9();
        let d = SelmerDatum::toy(&ring, vec![7, 13], 0).unwrap();
        let space = StarkSpace::new(&d, 0).unwrap();
        let mut eps = stark_solve(&d, &space).unwrap().basis.unwrap();
        eps.values[0] = vec![(eps.values[0][0] + 1) % 9];
        assert!(!space.incompatible_edges(&eps).is_empty());
        let rep = Derived::new(&d, &space, &eps)
            .unwrap()
            .check_relations()
            .unwrap();
        assert!(rep.failures.iter().any(|f| f.relation == "ii"));
    }

    #[test]
    fn torsion_in_the_top_module_is_reported() {
        let ring = z9();
        let toy = SelmerDatum::toy(&ring, vec![7], 0).unwrap();
        // H(𝔐) = R ⊕ R/3 with the functionals zero on the torsion summand
        let top = toy
            .top
            .direct_sum(&PresentedModule::cyclic(&ring, &[ring.scalar(3)]));
        let ext = |f: &Vec<u64>| [f.clone(), vec![0]].concat();
        let d = SelmerDatum::new(
            &ring,
            vec![7],
            top,
            toy.phi.iter().map(ext).collect(),
            toy.div.iter().map(ext).collect(),
            vec![],
        )
        .unwrap();
        assert!(!d.validate().valid);
        let space = StarkSpace::new(&d, 0).unwrap();
        assert!(!stark_solve(&d, &space).unwrap().free_rank_one);
    }

    #[test]
    fn synthetic_datum_end_to_end() {
        let ring = Ring::new(3, 1, &[3]).unwrap();
        let mut rng = random::rng(11);
        let d = SelmerDatum::synthetic(&ring, vec![7, 13, 19], 1, &mut rng).unwrap();
        assert!(d.validate().valid, "{:?}", d.validate().violations);
        let s = d.strict().unwrap();
        assert!(s.validate().valid);
        let can = StarkSpace::new(&d, 1).unwrap();
        let str_ = StarkSpace::new(&s, 0).unwrap();
        let sol = stark_solve(&d, &can).unwrap();
        assert!(sol.free_rank_one);
        let eps = sol.basis.unwrap();
        let kol = check_kolyvagin_relation(&d, &can, &eps).unwrap();
        assert!(kol.ok(), "{:?}", kol.failures);
        let red = rank_reduction(&d, &s, &can, &str_, &eps).unwrap();
        let (checked, bad) = reduction_square_failures(&d, &s, &can, &str_).unwrap();
        assert!(checked > 0 && bad.is_empty());
        assert!(str_.incompatible_edges(&red).is_empty());
        let x = s.planted.clone().unwrap();
        for i in 0..=3 {
            assert_eq!(
                stark_ideals(&s, &str_, &red, i),
                fitting_ideal(&x, i),
                "i = {i}"
            );
        }
        let der = Derived::new(&s, &str_, &red).unwrap();
        let rep = der.check_relations().unwrap();
        assert!(rep.ok(), "{:?}", &rep.failures[..rep.failures.len().min(4)]);
    }
}
