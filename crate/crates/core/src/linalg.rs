//! Howell forms, kernels and linear solving over the chain ring Z/pⁿ.
//!
//! Vectors are rows and maps act on the right: x ↦ xA.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::ring::{inv_mod, valuation, GroupRingElement, Ring};

/// Scalar context Z/pⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zpn {
    pub p: u64,
    pub n: u32,
    pub m: u64,
}

impl Zpn {
    pub fn new(p: u64, n: u32) -> Zpn {
        let m = p.pow(n);
        assert!(m < 1 << 32, "linear algebra requires pⁿ < 2^32");
        Zpn { p, n, m }
    }

    pub fn of(ring: &Ring) -> Zpn {
        Zpn::new(ring.p(), ring.n())
    }

    #[inline]
    pub fn val(&self, a: u64) -> u32 {
        valuation(a, self.p, self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueMatrix {
    pub ctx: Zpn,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson(Vec<Vec<String>>);

impl ResidueMatrix {
    pub fn zeros(ctx: Zpn, rows: usize, cols: usize) -> Self {
        ResidueMatrix {
            ctx,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(ctx: Zpn, k: usize) -> Self {
        let mut a = Self::zeros(ctx, k, k);
        for i in 0..k {
            a.data[i * k + i] = 1 % ctx.m;
        }
        a
    }

    pub fn from_rows(ctx: Zpn, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().map(|&x| x % ctx.m));
        }
        ResidueMatrix {
            ctx,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn mul(&self, other: &ResidueMatrix) -> ResidueMatrix {
        assert_eq!(self.cols, other.rows);
        let m = self.ctx.m;
        let mut out = ResidueMatrix::zeros(self.ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = (*d + a * b) % m;
                }
            }
        }
        out
    }

    pub fn vec_mul(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.rows);
        let m = self.ctx.m;
        let mut out = vec![0; self.cols];
        for (i, &a) in x.iter().enumerate() {
            if a != 0 {
                for (d, &b) in out.iter_mut().zip(self.row(i)) {
                    *d = (*d + a * b) % m;
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_string()).collect())
            .collect();
        serde_json::to_value(MatrixJson(rows)).unwrap()
    }
}

/// A row span over Z/pⁿ in Howell normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HowellBasis {
    pub ctx: Zpn,
    pub cols: usize,
    /// Rows in order of strictly increasing pivot column.
    pub rows: Vec<Vec<u64>>,
    pub pivots: Vec<usize>,
}

#[inline]
fn axpy(dst: &mut [u64], q: u64, src: &[u64], m: u64) {
    let nq = (m - q % m) % m;
    if nq == 0 {
        return;
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = (*d + nq * s) % m;
    }
}

fn scale_row(r: &mut [u64], c: u64, m: u64) {
    for x in r.iter_mut() {
        *x = (*x * c) % m;
    }
}

/// Row-reduces `rows` (each of length `cols`); returns (pivot column, row) pairs.
fn echelon(ctx: Zpn, cols: usize, rows: Vec<Vec<u64>>) -> Vec<(usize, Vec<u64>)> {
    let m = ctx.m;
    let mut work: Vec<Vec<u64>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    for c in 0..cols {
        if work.is_empty() {
            break;
        }
        let mut best: Option<(u32, u64, usize)> = None;
        for (i, r) in work.iter().enumerate() {
            if r[c] != 0 {
                let key = (ctx.val(r[c]), r[c], i);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let Some((v, _, idx)) = best else { continue };
        let mut piv = work.remove(idx);
        let pv = ctx.p.pow(v);
        let unit = piv[c] / pv;
        scale_row(&mut piv, inv_mod(unit, m).unwrap(), m);
        for r in work.iter_mut() {
            if r[c] != 0 {
                let q = r[c] / pv;
                axpy(r, q, &piv, m);
            }
        }
        work.retain(|r| r.iter().any(|&x| x != 0));
        if v > 0 {
            let mut extra = piv.clone();
            scale_row(&mut extra, ctx.p.pow(ctx.n - v), m);
            if extra.iter().any(|&x| x != 0) {
                work.push(extra);
            }
        }
        basis.push((c, piv));
    }
    for i in 0..basis.len() {
        let (c, pv) = (basis[i].0, ctx.p.pow(ctx.val(basis[i].1[basis[i].0])));
        let (head, tail) = basis.split_at_mut(i);
        let piv = &tail[0].1;
        for (_, r) in head.iter_mut() {
            let q = r[c] / pv;
            if q != 0 {
                axpy(r, q, piv, m);
            }
        }
    }
    basis
}

impl HowellBasis {
    pub fn zero(ctx: Zpn, cols: usize) -> Self {
        HowellBasis {
            ctx,
            cols,
            rows: vec![],
            pivots: vec![],
        }
    }

    pub fn full(ctx: Zpn, cols: usize) -> Self {
        Self::from_rows(ctx, cols, ResidueMatrix::identity(ctx, cols).to_rows())
    }

    pub fn from_rows(ctx: Zpn, cols: usize, rows: Vec<Vec<u64>>) -> Self {
        let e = echelon(ctx, cols, rows);
        HowellBasis {
            ctx,
            cols,
            pivots: e.iter().map(|x| x.0).collect(),
            rows: e.into_iter().map(|x| x.1).collect(),
        }
    }

    pub fn as_matrix(&self) -> ResidueMatrix {
        ResidueMatrix::from_rows(self.ctx, self.cols, &self.rows)
    }

    /// log_p of the number of elements in the span.
    pub fn length(&self) -> u32 {
        self.rows
            .iter()
            .zip(&self.pivots)
            .map(|(r, &c)| self.ctx.n - self.ctx.val(r[c]))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.length() == self.ctx.n * self.cols as u32
    }

    /// Reduces `v` against the basis; returns the remainder and the coefficients used.
    pub fn reduce(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let m = self.ctx.m;
        let mut r: Vec<u64> = v.iter().map(|&x| x % m).collect();
        let mut coeffs = vec![0; self.rows.len()];
        for (k, (row, &c)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if r[c] == 0 {
                continue;
            }
            let pv = row[c];
            if r[c].is_multiple_of(pv) {
                let q = r[c] / pv;
                coeffs[k] = q;
                axpy(&mut r, q, row, m);
            }
        }
        (r, coeffs)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).0.iter().all(|&x| x == 0)
    }

    pub fn contains_basis(&self, other: &HowellBasis) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &HowellBasis) -> HowellBasis {
        assert_eq!(self.cols, other.cols);
        let rows = self.rows.iter().chain(&other.rows).cloned().collect();
        HowellBasis::from_rows(self.ctx, self.cols, rows)
    }

    pub fn intersect(&self, other: &HowellBasis) -> HowellBasis {
        let a = self.rows.len();
        let m = self.ctx.m;
        let mut stacked = self.rows.clone();
        stacked.extend(
            other
                .rows
                .iter()
                .map(|r| r.iter().map(|&x| (m - x) % m).collect()),
        );
        let k = kernel(&ResidueMatrix::from_rows(self.ctx, self.cols, &stacked));
        let mine = ResidueMatrix::from_rows(self.ctx, self.cols, &self.rows);
        let img: Vec<Vec<u64>> = k.rows.iter().map(|y| mine.vec_mul(&y[..a])).collect();
        HowellBasis::from_rows(self.ctx, self.cols, img)
    }

    /// Rows scaled by p^k.
    pub fn scaled(&self, k: u32) -> HowellBasis {
        let c = self.ctx.p.pow(k.min(self.ctx.n)) % self.ctx.m;
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| (x * c) % self.ctx.m).collect())
            .collect();
        HowellBasis::from_rows(self.ctx, self.cols, rows)
    }
}

pub fn howell_form(a: &ResidueMatrix) -> HowellBasis {
    HowellBasis::from_rows(a.ctx, a.cols, a.to_rows())
}

/// {x : xA = 0}.
pub fn kernel(a: &ResidueMatrix) -> HowellBasis {
    let (r, c) = (a.rows, a.cols);
    let rows: Vec<Vec<u64>> = (0..r)
        .map(|i| {
            let mut v = a.row(i).to_vec();
            v.extend((0..r).map(|j| u64::from(i == j) % a.ctx.m));
            v
        })
        .collect();
    let e = echelon(a.ctx, c + r, rows);
    let ker = e
        .into_iter()
        .filter(|(p, _)| *p >= c)
        .map(|(_, v)| v[c..].to_vec())
        .collect();
    HowellBasis::from_rows(a.ctx, r, ker)
}

/// Echelon data of [A | I], reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct Solver {
    ctx: Zpn,
    rows: usize,
    cols: usize,
    echelon: Vec<(usize, Vec<u64>)>,
}

impl Solver {
    pub fn new(a: &ResidueMatrix) -> Solver {
        let (r, c) = (a.rows, a.cols);
        let m = a.ctx.m;
        let rows: Vec<Vec<u64>> = (0..r)
            .map(|i| {
                let mut v = a.row(i).to_vec();
                v.extend((0..r).map(|j| u64::from(i == j) % m));
                v
            })
            .collect();
        let echelon = echelon(a.ctx, c + r, rows)
            .into_iter()
            .filter(|(p, _)| *p < c)
            .collect();
        Solver {
            ctx: a.ctx,
            rows: r,
            cols: c,
            echelon,
        }
    }

    /// Some x with xA = b, chosen by elimination order, or None.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        assert_eq!(b.len(), self.cols);
        let (m, c) = (self.ctx.m, self.cols);
        let mut rem: Vec<u64> = b.iter().map(|&x| x % m).collect();
        rem.extend(std::iter::repeat_n(0, self.rows));
        for (pc, row) in &self.echelon {
            if rem[*pc] == 0 {
                continue;
            }
            let pv = row[*pc];
            if !rem[*pc].is_multiple_of(pv) {
                return None;
            }
            let q = rem[*pc] / pv;
            axpy(&mut rem, q, row, m);
        }
        if rem[..c].iter().any(|&x| x != 0) {
            return None;
        }
        Some(rem[c..].iter().map(|&x| (m - x) % m).collect())
    }
}

/// Some x with xA = b, chosen by elimination order, or None.
pub fn solve(a: &ResidueMatrix, b: &[u64]) -> Option<Vec<u64>> {
    Solver::new(a).solve(b)
}

/// {x : xA ∈ span(target)}.
pub fn preimage(a: &ResidueMatrix, target: &HowellBasis) -> HowellBasis {
    let mut rows = a.to_rows();
    rows.extend(target.rows.iter().cloned());
    let k = kernel(&ResidueMatrix::from_rows(a.ctx, a.cols, &rows));
    let proj = k.rows.iter().map(|v| v[..a.rows].to_vec()).collect();
    HowellBasis::from_rows(a.ctx, a.rows, proj)
}

/// The |G|×|G| block of multiplication by `a` on row vectors.
pub fn regular_block(a: &GroupRingElement) -> Vec<Vec<u64>> {
    let ring = a.ring();
    (0..ring.order())
        .map(|h| a.shift(h).into_coeffs())
        .collect()
}

/// Replaces each group-ring entry by its regular-representation block.
pub fn expand_scalars(ring: &Ring, rows: &[Vec<GroupRingElement>]) -> Result<ResidueMatrix> {
    let ctx = Zpn::of(ring);
    let n = ring.order();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut out = ResidueMatrix::zeros(ctx, rows.len() * n, cols * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return invalid("ragged matrix");
        }
        for (j, a) in row.iter().enumerate() {
            if a.ring() != ring {
                return Err(crate::Error::RingMismatch("matrix entry".into()));
            }
            if a.is_zero() {
                continue;
            }
            for h in 0..n {
                let shifted = a.shift(h);
                let dst = (i * n + h) * out.cols + j * n;
                out.data[dst..dst + n].copy_from_slice(shifted.coeffs());
            }
        }
    }
    Ok(out)
}

/// Flattens a vector in R^k to (Z/pⁿ)^{k|G|}.
pub fn flatten(v: &[GroupRingElement]) -> Vec<u64> {
    v.iter().flat_map(|a| a.coeffs().iter().copied()).collect()
}

pub fn unflatten(ring: &Ring, v: &[u64]) -> Vec<GroupRingElement> {
    v.chunks(ring.order())
        .map(|c| ring.element(c.to_vec()).unwrap())
        .collect()
}

/// Z/pⁿ-span of the G-translates of the given vectors in R^k: the R-submodule they generate.
pub fn submodule_lattice(ring: &Ring, k: usize, gens: &[Vec<GroupRingElement>]) -> HowellBasis {
    let ctx = Zpn::of(ring);
    let mut rows = Vec::new();
    for v in gens {
        for g in 0..ring.order() {
            rows.push(
                v.iter()
                    .flat_map(|a| a.shift(g).into_coeffs())
                    .collect::<Vec<u64>>(),
            );
        }
    }
    HowellBasis::from_rows(ctx, k * ring.order(), rows)
}

/// Multiplicative inverse in the group ring, if any.
pub fn gr_inverse(a: &GroupRingElement) -> Option<GroupRingElement> {
    let ring = a.ring();
    let m = expand_scalars(ring, &[vec![a.clone()]]).ok()?;
    let x = solve(&m, ring.one().coeffs())?;
    ring.element(x).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z9() -> Zpn {
        Zpn::new(3, 2)
    }

    fn span_brute(ctx: Zpn, rows: &[Vec<u64>], cols: usize) -> Vec<Vec<u64>> {
        let mut set = std::collections::BTreeSet::new();
        let k = rows.len();
        let total = (ctx.m as usize).pow(k as u32);
        for idx in 0..total {
            let mut c = idx;
            let mut v = vec![0u64; cols];
            for r in rows {
                let a = (c % ctx.m as usize) as u64;
                c /= ctx.m as usize;
                for j in 0..cols {
                    v[j] = (v[j] + a * r[j]) % ctx.m;
                }
            }
            set.insert(v);
        }
        set.into_iter().collect()
    }

    #[test]
    fn howell_examples() {
        let h = HowellBasis::from_rows(z9(), 1, vec![vec![3]]);
        assert_eq!(h.rows, vec![vec![3]]);
        let h = HowellBasis::from_rows(z9(), 2, vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(h.rows, vec![vec![1, 0], vec![0, 1]]);
        let h = HowellBasis::from_rows(z9(), 2, vec![vec![3, 1]]);
        assert_eq!(h.rows, vec![vec![3, 1], vec![0, 3]]);
        let brute = span_brute(z9(), &[vec![3, 1]], 2);
        assert_eq!(brute.len() as u32, 3u32.pow(h.length()));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel(&ResidueMatrix::from_rows(z9(), 1, &[vec![3]]));
        assert_eq!(k.rows, vec![vec![3]]);
        let k = kernel(&ResidueMatrix::from_rows(z9(), 1, &[vec![2]]));
        assert!(k.is_zero());
        let k = kernel(&ResidueMatrix::from_rows(z9(), 1, &[vec![0]]));
        assert_eq!(k.rows, vec![vec![1]]);
    }

    #[test]
    fn solve_examples() {
        let a = ResidueMatrix::from_rows(z9(), 1, &[vec![3]]);
        assert_eq!(solve(&a, &[6]), Some(vec![2]));
        assert_eq!(solve(&a, &[0]), Some(vec![0]));
        assert_eq!(solve(&a, &[1]), None);
    }

    #[test]
    fn exhaustive_two_by_two_over_z9() {
        let ctx = z9();
        let mut seed = 7u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 33) % 9
        };
        for _ in 0..60 {
            let rows = vec![vec![next(), next()], vec![next(), next()]];
            let a = ResidueMatrix::from_rows(ctx, 2, &rows);
            let h = howell_form(&a);
            let brute = span_brute(ctx, &rows, 2);
            assert_eq!(brute.len() as u64, 3u64.pow(h.length()));
            for v in &brute {
                assert!(h.contains(v));
            }
            let k = kernel(&a);
            let mut kb = 0;
            for x0 in 0..9 {
                for x1 in 0..9 {
                    let x = [x0, x1];
                    let zero = a.vec_mul(&x).iter().all(|&y| y == 0);
                    assert_eq!(zero, k.contains(&x));
                    kb += zero as u32;
                    let b = a.vec_mul(&x);
                    let s = solve(&a, &b).unwrap();
                    assert_eq!(a.vec_mul(&s), b);
                }
            }
            assert_eq!(3u32.pow(k.length()), kb);
            assert_eq!(h.length() + k.length(), 2 * ctx.n);
            for b0 in 0..9 {
                for b1 in 0..9 {
                    let b = [b0, b1];
                    assert_eq!(solve(&a, &b).is_some(), brute.contains(&b.to_vec()));
                }
            }
        }
    }

    #[test]
    fn cyclic_block() {
        let r = Ring::new(3, 2, &[3]).unwrap();
        let e = expand_scalars(&r, &[vec![r.basis(1)]]).unwrap();
        assert_eq!(
            e.to_rows(),
            vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]
        );
        let i = expand_scalars(&r, &[vec![r.one()]]).unwrap();
        assert_eq!(i, ResidueMatrix::identity(Zpn::of(&r), 3));
    }

    #[test]
    fn inverse_of_unit() {
        let r = Ring::new(3, 2, &[3]).unwrap();
        let a = r.element(vec![2, 3, 0]).unwrap();
        let b = gr_inverse(&a).unwrap();
        assert_eq!(&a * &b, r.one());
        assert!(gr_inverse(&(&r.one() - &r.basis(1))).is_none());
    }

    #[test]
    fn intersection_and_preimage() {
        let ctx = z9();
        let a = HowellBasis::from_rows(ctx, 2, vec![vec![1, 0]]);
        let b = HowellBasis::from_rows(ctx, 2, vec![vec![1, 3]]);
        let i = a.intersect(&b);
        assert_eq!(i.rows, vec![vec![3, 0]]);
        let m = ResidueMatrix::from_rows(ctx, 1, &[vec![3]]);
        let pre = preimage(&m, &HowellBasis::zero(ctx, 1));
        assert_eq!(pre.rows, vec![vec![3]]);
    }
}
