//! Seeded generators of group-ring elements, modules and presentations.

use rand::Rng as _;
use rand_chacha::ChaCha8Rng;

use crate::module::PresentedModule;
use crate::ring::{GroupRingElement, Ring};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn element(ring: &Ring, rng: &mut Rng) -> GroupRingElement {
    let m = ring.modulus();
    ring.element((0..ring.order()).map(|_| rng.gen_range(0..m)).collect())
        .unwrap()
}

/// A random element of 𝔪^depth for the maximal ideal 𝔪 = (p, g−1 : g ∈ G).
pub fn element_in_power(ring: &Ring, rng: &mut Rng, depth: u32) -> GroupRingElement {
    let mut a = element(ring, rng);
    for _ in 0..depth {
        let k = ring.invariant_factors().len();
        let factor = if k == 0 || rng.gen_bool(0.5) {
            ring.scalar(ring.p() as i128)
        } else {
            let g = ring.generator(rng.gen_range(0..k));
            &ring.basis(g) - &ring.one()
        };
        a = &a * &factor;
    }
    a
}

/// Entries biased toward the maximal ideal so that quotients are rarely zero.
pub fn sparse_entry(ring: &Ring, rng: &mut Rng) -> GroupRingElement {
    match rng.gen_range(0..6) {
        0 | 1 => ring.zero(),
        2 => element(ring, rng),
        d => element_in_power(ring, rng, d as u32 - 2),
    }
}

pub fn module(ring: &Ring, rng: &mut Rng, max_gens: usize, max_rels: usize) -> PresentedModule {
    let g = rng.gen_range(1..=max_gens);
    let r = rng.gen_range(0..=max_rels);
    let rels: Vec<Vec<GroupRingElement>> = (0..r)
        .map(|_| (0..g).map(|_| sparse_entry(ring, rng)).collect())
        .collect();
    PresentedModule::new(ring, g, &rels).unwrap()
}

/// Same module, extra generator e' with relation e' = Σ cⱼeⱼ, relations mixed by
/// a random unimodular combination.
pub fn represent(m: &PresentedModule, rng: &mut Rng) -> PresentedModule {
    let ring = m.ring();
    let g = m.gens();
    let mut rels: Vec<Vec<GroupRingElement>> = m
        .relations()
        .into_iter()
        .map(|mut r| {
            r.push(ring.zero());
            r
        })
        .collect();
    let mut extra: Vec<GroupRingElement> = (0..g).map(|_| -&element(ring, rng)).collect();
    extra.push(ring.one());
    for i in 0..rels.len() {
        for j in 0..rels.len() {
            if i != j && rng.gen_bool(0.3) {
                let c = element(ring, rng);
                let add: Vec<GroupRingElement> = rels[j].iter().map(|a| &c * a).collect();
                rels[i] = rels[i].iter().zip(&add).map(|(a, b)| a + b).collect();
            }
        }
    }
    let c = element(ring, rng);
    let mut with_extra: Vec<Vec<GroupRingElement>> = rels
        .into_iter()
        .map(|r| r.iter().zip(&extra).map(|(a, b)| a + &(&c * b)).collect())
        .collect();
    with_extra.push(extra);
    PresentedModule::new(ring, g + 1, &with_extra).unwrap()
}
