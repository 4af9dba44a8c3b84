//! Kolyvagin derivative classes of an Euler-system window and the Θ ideals they generate.

use serde::Serialize;

use crate::error::{hypothesis, invalid, Error, Result};
use crate::ideal::{augmentation_ideal, IdealHandle};
use crate::ring::{GroupRingElement, Ring};
use crate::stickelberger::{label_subsets, EulerSystemWindow, Layer};

/// D = Σ_{i<order} i·σ^i.
pub fn derivative_operator(ring: &Ring, sigma: usize, order: u64) -> GroupRingElement {
    let mut out = ring.zero();
    for i in 1..order {
        out = &out + &ring.basis(ring.pow(sigma, i)).scale(i % ring.modulus());
    }
    out
}

/// N = Σ_{i<order} σ^i.
pub fn norm_operator(ring: &Ring, sigma: usize, order: u64) -> GroupRingElement {
    (0..order).fold(ring.zero(), |acc, i| &acc + &ring.basis(ring.pow(sigma, i)))
}

/// D_𝔫 = Π_{q | 𝔫} D_q in the layer of 𝔫.
pub fn derivative_product(layer: &Layer, labels: &[u64]) -> Result<GroupRingElement> {
    let mut out = layer.ring.one();
    for &q in labels {
        let l = layer
            .labels
            .iter()
            .find(|l| l.q == q)
            .ok_or_else(|| Error::Invalid(format!("{q} is not a label")))?;
        out = &out * &derivative_operator(&layer.ring, layer.sigma_q(q)?, l.order);
    }
    Ok(out)
}

fn union(base: &[u64], labels: &[u64]) -> Result<Vec<u64>> {
    if labels.iter().any(|q| base.contains(q)) {
        return invalid("derivative labels must avoid the base field's labels");
    }
    let mut all: Vec<u64> = base.iter().chain(labels).copied().collect();
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return invalid("labels must be distinct");
    }
    Ok(all)
}

/// κ for K = k(base) and the label set 𝔫, with the generators σ_q it depends on.
#[derive(Debug, Clone)]
pub struct KolyvaginClass {
    pub base: Vec<u64>,
    pub labels: Vec<u64>,
    /// (q, g) with σ_q the image of g ∈ (Z/q)^×.
    pub generators: Vec<(u64, u64)>,
    pub value: GroupRingElement,
}

#[derive(Debug, Clone, Serialize)]
pub struct KolyvaginJson {
    pub base: Vec<String>,
    pub labels: Vec<String>,
    pub generators: Vec<(String, String)>,
    pub ring: String,
    pub coeffs: Vec<String>,
}

impl KolyvaginClass {
    pub fn to_json(&self) -> KolyvaginJson {
        KolyvaginJson {
            base: self.base.iter().map(u64::to_string).collect(),
            labels: self.labels.iter().map(u64::to_string).collect(),
            generators: self
                .generators
                .iter()
                .map(|(q, g)| (q.to_string(), g.to_string()))
                .collect(),
            ring: format!("{:?}", self.value.ring().spec()),
            coeffs: self.value.to_strings(),
        }
    }
}

/// π(D_𝔫 c_{K(𝔫)}) after checking it is fixed by Gal(K(𝔫)/K), descended to R_{K,n}.
pub fn kolyvagin_class(
    w: &EulerSystemWindow,
    base: &[u64],
    labels: &[u64],
) -> Result<KolyvaginClass> {
    let all = union(base, labels)?;
    let (big, c) = w.get(&all)?;
    let (small, _) = w.get(base)?;
    let x = &derivative_product(big, labels)? * c;
    for &q in labels {
        if x.shift(big.sigma_q(q)?) != x {
            return Err(Error::NotFixed(format!(
                "D_𝔫c for 𝔫 = {labels:?} over {base:?} moves under σ_{q}"
            )));
        }
    }
    let coeffs = (0..small.ring.order())
        .map(|h| x.coeff(big.embed(small, h)))
        .collect();
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    let generators = big
        .labels
        .iter()
        .filter(|l| labels.contains(&l.q))
        .map(|l| (l.q, l.root))
        .collect();
    Ok(KolyvaginClass {
        base: base.to_vec(),
        labels: sorted,
        generators,
        value: small.ring.element(coeffs)?,
    })
}

/// c_{K(𝔫)} ≡ (−1)^ν κ·Π(σ_q − 1) mod I_𝔫^{ν+1}.
pub fn leading_coeff_check(w: &EulerSystemWindow, base: &[u64], labels: &[u64]) -> Result<bool> {
    let kappa = kolyvagin_class(w, base, labels)?;
    let all = union(base, labels)?;
    let (big, c) = w.get(&all)?;
    let (small, _) = w.get(base)?;
    let mut rhs = big.include_from(&kappa.value, small)?;
    let mut sigmas = Vec::new();
    for &q in labels {
        let s = big.sigma_q(q)?;
        sigmas.push(s);
        rhs = &rhs * &(&big.ring.basis(s) - &big.ring.one());
    }
    if labels.len() % 2 == 1 {
        rhs = -&rhs;
    }
    let ideal = augmentation_ideal(&big.ring, &sigmas).power(labels.len() as u32 + 1);
    Ok(ideal.contains(&(c - &rhs)))
}

/// For 𝔫 = qr: c_{K(qr)} ≡ κ_{qr}(σ_q − 1)(σ_r − 1) − Σ a·κ_{q′}(σ_{q′} − 1)² mod I³, where for
/// each q′ ∈ {q, r} the residue a is that of the other label's Euler factor in G_{q′}.
pub fn leading_coeff_check_pair(
    w: &EulerSystemWindow,
    base: &[u64],
    q: u64,
    r: u64,
) -> Result<bool> {
    let all = union(base, &[q, r])?;
    let (big, c) = w.get(&all)?;
    let (small, _) = w.get(base)?;
    let ring = &big.ring;
    let lift = |x: &GroupRingElement| big.include_from(x, small);
    let (sq, sr) = (big.sigma_q(q)?, big.sigma_q(r)?);
    let (x, y) = (&ring.basis(sq) - &ring.one(), &ring.basis(sr) - &ring.one());
    let mut rhs = &lift(&kolyvagin_class(w, base, &[q, r])?.value)? * &(&x * &y);
    for (own, other, z) in [(q, r, &x), (r, q, &y)] {
        let a = lift(&frobenius_residue(w, base, own, other)?)?;
        let k = lift(&kolyvagin_class(w, base, &[own])?.value)?;
        rhs = &rhs - &(&(&a * &k) * &(z * z));
    }
    let ideal = augmentation_ideal(ring, &[sq, sr]).power(3);
    Ok(ideal.contains(&(c - &rhs)))
}

/// Permutations of 0..k with their signs, in lexicographic order.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..k).collect(), &mut out);
    out.into_iter()
        .map(|p| {
            let inversions = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            (p, inversions % 2 == 0)
        })
        .collect()
}

/// The class of P_r(Frob_r⁻¹) ∈ I_q in I_q/I_q² ≅ R_{K,n}, using σ_q − 1 as generator.
pub fn frobenius_residue(
    w: &EulerSystemWindow,
    base: &[u64],
    q: u64,
    r: u64,
) -> Result<GroupRingElement> {
    let all = union(base, &[q])?;
    let (layer, _) = w.get(&all)?;
    let (small, _) = w.get(base)?;
    let label = layer.labels.iter().find(|l| l.q == q).unwrap();
    if label.order % layer.ring.modulus() != 0 {
        return hypothesis(format!("#G_{q} = {} is not divisible by p^n", label.order));
    }
    let x = layer.euler_factor(&w.setup.chi, r);
    let sigma = layer.sigma_q(q)?;
    // x = Σ_j x_j σ_q^j with x_j ∈ R_{K,n}
    let parts: Vec<GroupRingElement> = (0..label.order)
        .map(|j| {
            let shifted = x.shift(layer.ring.pow(layer.ring.inv(sigma), j));
            let c = (0..small.ring.order())
                .map(|h| shifted.coeff(layer.embed(small, h)))
                .collect();
            small.ring.element(c)
        })
        .collect::<Result<_>>()?;
    let total = parts.iter().fold(small.ring.zero(), |a, b| &a + b);
    if !total.is_zero() {
        return hypothesis(format!(
            "P_{r}(Frob⁻¹) does not lie in the augmentation ideal of G_{q}"
        ));
    }
    Ok(parts
        .iter()
        .enumerate()
        .fold(small.ring.zero(), |a, (j, b)| {
            &a + &b.scale(j as u64 % small.ring.modulus())
        }))
}

/// κ̃_𝔫 = Σ_τ sgn(τ)·Π_{τ(q) ≠ q} a_{τ,q}·κ_{𝔡_τ} with 𝔡_τ the fixed labels of τ.
pub fn tilde_kappa(
    w: &EulerSystemWindow,
    base: &[u64],
    labels: &[u64],
) -> Result<GroupRingElement> {
    let mut labels = labels.to_vec();
    labels.sort_unstable();
    let (small, _) = w.get(base)?;
    let mut out = small.ring.zero();
    for (perm, even) in permutations(labels.len()) {
        let fixed: Vec<u64> = (0..labels.len())
            .filter(|&i| perm[i] == i)
            .map(|i| labels[i])
            .collect();
        let mut term = kolyvagin_class(w, base, &fixed)?.value;
        for i in (0..labels.len()).filter(|&i| perm[i] != i) {
            term = &term * &frobenius_residue(w, base, labels[i], labels[perm[i]])?;
        }
        out = if even { &out + &term } else { &out - &term };
    }
    Ok(out)
}

/// Label sets 𝔫 from the pool, disjoint from the base, with ν(𝔫) ≤ i.
fn derivative_sets(w: &EulerSystemWindow, base: &[u64], i: usize) -> Vec<Vec<u64>> {
    let free: Vec<u64> = w
        .pool
        .iter()
        .map(|l| l.q)
        .filter(|q| !base.contains(q))
        .collect();
    label_subsets(&free, i)
        .into_iter()
        .filter(|s| {
            union(base, s)
                .map(|all| w.values.contains_key(&all))
                .unwrap_or(false)
        })
        .collect()
}

/// Θ^i: the ideal of R_{K,n} generated by κ_𝔫 with ν(𝔫) ≤ i.
pub fn theta_ideal(w: &EulerSystemWindow, base: &[u64], i: usize) -> Result<IdealHandle> {
    let (small, _) = w.get(base)?;
    let gens = derivative_sets(w, base, i)
        .iter()
        .map(|s| kolyvagin_class(w, base, s).map(|k| k.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(IdealHandle::generated_by(&small.ring, &gens))
}

/// The ideal generated by κ̃_𝔫 with ν(𝔫) ≤ i.
pub fn tilde_theta_ideal(w: &EulerSystemWindow, base: &[u64], i: usize) -> Result<IdealHandle> {
    let (small, _) = w.get(base)?;
    let gens = derivative_sets(w, base, i)
        .iter()
        .map(|s| tilde_kappa(w, base, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(IdealHandle::generated_by(&small.ring, &gens))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::CharacterSpec;
    use crate::stickelberger::{LSetup, PrimeLabel};

    #[test]
    fn derivative_of_order_three() {
        let r = Ring::new(3, 2, &[3]).unwrap();
        let s = r.generator(0);
        let d = derivative_operator(&r, s, 3);
        assert_eq!(d, &r.basis(s) + &r.basis(r.pow(s, 2)).scale(2));
        let lhs = &(&r.basis(s) - &r.one()) * &d;
        assert_eq!(lhs, &r.scalar(3) - &norm_operator(&r, s, 3));
        assert!(derivative_operator(&r, 0, 1).is_zero());
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().filter(|x| x.1).count(), 3);
        assert_eq!(p[1], (vec![0, 2, 1], false));
    }

    fn window() -> EulerSystemWindow {
        let chi = CharacterSpec::legendre(113, 3, 1).unwrap();
        let setup = LSetup::new(3, 1, 0, chi).unwrap();
        let pool: Vec<PrimeLabel> = [7, 13]
            .iter()
            .map(|&q| PrimeLabel::new(q, 3, 1).unwrap())
            .collect();
        EulerSystemWindow::stickelberger(&setup, &pool, 2).unwrap()
    }

    #[test]
    fn stickelberger_classes_are_fixed() {
        let w = window();
        assert!(w.validate().valid);
        for s in [vec![], vec![7], vec![13]] {
            assert!(leading_coeff_check(&w, &[], &s).unwrap());
        }
        // Frob_7 is nontrivial in G_13, so the pure product term misses a (σ_13 − 1)² term
        assert!(!leading_coeff_check(&w, &[], &[7, 13]).unwrap());
        assert!(leading_coeff_check_pair(&w, &[], 7, 13).unwrap());
        kolyvagin_class(&w, &[7], &[13]).unwrap();
        let k1 = kolyvagin_class(&w, &[], &[]).unwrap().value;
        assert_eq!(&k1, &w.get(&[]).unwrap().1);
        assert_eq!(
            tilde_kappa(&w, &[], &[7]).unwrap(),
            kolyvagin_class(&w, &[], &[7]).unwrap().value
        );
        for i in 0..=2 {
            assert_eq!(
                theta_ideal(&w, &[], i).unwrap(),
                tilde_theta_ideal(&w, &[], i).unwrap()
            );
        }
    }

    #[test]
    fn corruption_breaks_fixedness() {
        let w = window();
        let (layer, x) = w.get(&[7]).unwrap().clone();
        let bad = w
            .with_value(&[7], &x + &layer.ring.basis(layer.sigma_q(7).unwrap()))
            .unwrap();
        assert!(matches!(
            kolyvagin_class(&bad, &[], &[7]),
            Err(Error::NotFixed(_))
        ));
    }
}
