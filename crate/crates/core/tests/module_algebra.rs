use kolyvagin_core::exterior::{
    bidual_map, cartesian_map, coordinate_square, xi_map, Bidual, CartesianSquare, FreeComplex,
};
use kolyvagin_core::ideal::{
    annihilator, characteristic_ideal, characteristic_ideal_generic, fitting_ideal, IdealHandle,
};
use kolyvagin_core::linalg::flatten;
use kolyvagin_core::module::{
    combine, dual, submodule_presentation, ModuleMap, PresentedModule, RingProjection,
};
use kolyvagin_core::random::{self, Rng};
use kolyvagin_core::ring::{GroupRingElement, Ring};
use proptest::prelude::*;
use rand::Rng as _;

fn rings() -> Vec<Ring> {
    vec![
        Ring::new(3, 2, &[3]).unwrap(),
        Ring::new(3, 1, &[9]).unwrap(),
        Ring::new(5, 1, &[5]).unwrap(),
        Ring::new(3, 1, &[3, 3]).unwrap(),
        Ring::scalars(3, 3).unwrap(),
    ]
}

fn pick(idx: usize, seed: u64) -> (Ring, Rng) {
    let rs = rings();
    (rs[idx % rs.len()].clone(), random::rng(seed))
}

fn random_functionals(m: &PresentedModule, rng: &mut Rng, k: usize) -> Vec<Vec<u64>> {
    let d = dual(m);
    let ring = m.ring();
    (0..k)
        .map(|_| {
            let c = flatten(
                &(0..d.maps.len())
                    .map(|_| random::sparse_entry(ring, rng))
                    .collect::<Vec<_>>(),
            );
            combine(ring, &c, &d.maps, m.dim())
        })
        .collect()
}

fn random_submodule(m: &PresentedModule, rng: &mut Rng) -> (PresentedModule, ModuleMap) {
    let ring = m.ring();
    let k = rng.gen_range(1..=2);
    let els: Vec<Vec<u64>> = (0..k)
        .map(|_| {
            let c = flatten(
                &(0..m.gens())
                    .map(|_| random::sparse_entry(ring, rng))
                    .collect::<Vec<_>>(),
            );
            let basis: Vec<Vec<u64>> = (0..m.gens()).map(|i| m.generator(i)).collect();
            combine(ring, &c, &basis, m.dim())
        })
        .collect();
    submodule_presentation(m, &els).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, .. ProptestConfig::default() })]

    #[test]
    fn invariants_ignore_the_presentation(idx in 0usize..5, seed in any::<u64>()) {
        let (ring, mut rng) = pick(idx, seed);
        let m = random::module(&ring, &mut rng, 3, 3);
        let m2 = random::represent(&m, &mut rng);
        prop_assert_eq!(m.length(), m2.length());
        prop_assert_eq!(characteristic_ideal(&m), characteristic_ideal(&m2));
        prop_assert_eq!(fitting_ideal(&m, 0), fitting_ideal(&m2, 0));
        prop_assert_eq!(fitting_ideal(&m, 1), fitting_ideal(&m2, 1));
        prop_assert_eq!(annihilator(&m), annihilator(&m2));
    }

    #[test]
    fn fitting_inside_characteristic_equals_annihilator(idx in 0usize..5, seed in any::<u64>()) {
        let (ring, mut rng) = pick(idx, seed);
        let m = random::module(&ring, &mut rng, 3, 3);
        let ch = characteristic_ideal(&m);
        prop_assert!(ch.contains_ideal(&fitting_ideal(&m, 0)));
        prop_assert_eq!(&ch, &annihilator(&m));
        prop_assert_eq!(&ch, &characteristic_ideal_generic(&m).unwrap());
        prop_assert_eq!(ch.is_unit(), m.is_zero());
    }

    #[test]
    fn duality_preserves_length(idx in 0usize..5, seed in any::<u64>()) {
        let (ring, mut rng) = pick(idx, seed);
        let m = random::module(&ring, &mut rng, 3, 3);
        let d = dual(&m);
        prop_assert_eq!(d.module.length(), m.length());
        prop_assert_eq!(dual(&d.module).module.length(), m.length());
        prop_assert!(xi_map(&Bidual::new(&m, 1)).is_bijective());
    }

    #[test]
    fn characteristic_ideal_is_reflexive(idx in 0usize..5, seed in any::<u64>()) {
        let (ring, mut rng) = pick(idx, seed);
        let m = random::module(&ring, &mut rng, 3, 3);
        let ch = characteristic_ideal(&m);
        // I as a submodule of R, and the image of I** → R** = R
        let r1 = PresentedModule::free(&ring, 1);
        let gens: Vec<Vec<u64>> = ch.generators().iter().map(|a| a.coeffs().to_vec()).collect();
        prop_assume!(!gens.is_empty());
        let (i, incl) = submodule_presentation(&r1, &gens).unwrap();
        let b = Bidual::new(&i, 1);
        let iota: Vec<u64> = incl.rows().concat();
        let image: Vec<GroupRingElement> = (0..b.hom.maps.len())
            .map(|t| {
                let mut e = vec![0u64; b.hom.maps.len() * ring.order()];
                e[t * ring.order()] = 1;
                b.evaluate(&e, std::slice::from_ref(&iota)).unwrap()
            })
            .collect();
        prop_assert_eq!(IdealHandle::generated_by(&ring, &image), ch);
    }

    #[test]
    fn submodules_have_larger_characteristic_ideal(idx in 0usize..5, seed in any::<u64>()) {
        let (ring, mut rng) = pick(idx, seed);
        let m = random::module(&ring, &mut rng, 3, 2);
        let (n, incl) = random_submodule(&m, &mut rng);
        prop_assert!(characteristic_ideal(&n).contains_ideal(&characteristic_ideal(&m)));
        prop_assert!(n.length() <= m.length());
        for r in 1..=2 {
            let f = bidual_map(&incl, &Bidual::new(&n, r), &Bidual::new(&m, r)).unwrap();
            prop_assert!(f.is_injective(), "rank {}", r);
        }
    }

    #[test]
    fn bidual_of_kernel_is_wedge_kernel(idx in 0usize..5, seed in any::<u64>(), r in 1usize..=2) {
        let (ring, mut rng) = pick(idx, seed);
        let s1 = rng.gen_range(r..=3);
        let s2 = rng.gen_range(1..=2);
        let alpha: Vec<Vec<GroupRingElement>> =
            (0..s1).map(|_| (0..s2).map(|_| random::sparse_entry(&ring, &mut rng)).collect()).collect();
        let c = FreeComplex::new(&ring, alpha, s2).unwrap();
        let (img, injective) = c.bidual_image(r).unwrap();
        prop_assert!(injective);
        prop_assert_eq!(img, c.wedge_kernel(r));
        // reduction modulo a smaller power of p maps kernels into kernels
        if ring.n() > 1 {
            let proj = RingProjection::reduction(&ring, ring.n() - 1).unwrap();
            let small = c.base_change(&proj).wedge_kernel(r);
            for row in &c.wedge_kernel(r).rows {
                prop_assert!(small.contains(&proj.apply_flat(row)));
            }
        }
    }
}

/// M₃ = M ⊕ R^s with α₃ random on M and the identity plus noise on R^s.
fn nested_setup(ring: &Ring, rng: &mut Rng, s3: usize) -> (PresentedModule, ModuleMap) {
    let base = random::module(ring, rng, 2, 2);
    let m3 = base.direct_sum(&PresentedModule::free(ring, s3));
    let mut fs = random_functionals(&m3, rng, s3);
    let n = ring.order();
    for (k, f) in fs.iter_mut().enumerate() {
        let at = (base.gens() + k) * n;
        f[at] = (f[at] + 1) % ring.modulus();
    }
    let alpha = ModuleMap::to_free(&m3, &fs).unwrap();
    (m3, alpha)
}

fn restrict(sq: &CartesianSquare) -> ModuleMap {
    // α₁ viewed as the next level's α₂
    sq.alpha1.clone()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, .. ProptestConfig::default() })]

    #[test]
    fn cartesian_maps_compose(idx in 0usize..5, seed in any::<u64>()) {
        let (ring, mut rng) = pick(idx, seed);
        let (_m3, a3) = nested_setup(&ring, &mut rng, 3);
        let big = coordinate_square(&a3, &[0]).unwrap();
        let top = coordinate_square(&a3, &[0, 1]).unwrap();
        let low = coordinate_square(&restrict(&top), &[0]).unwrap();
        let r = 3;
        let b3 = Bidual::new(top.m2(), r);
        let b2 = Bidual::new(top.m1(), r - 1);
        let b1 = Bidual::new(low.m1(), r - 2);
        let b1_direct = Bidual::new(big.m1(), r - 2);
        let step = cartesian_map(&top, &b3, &b2).unwrap().then(&cartesian_map(&low, &b2, &b1).unwrap()).unwrap();
        let direct = cartesian_map(&big, &b3, &b1_direct).unwrap();
        // the two M₁ presentations differ, so compare values on M* functionals pulled back to M₃
        let pulled_low = low.iota.then(&top.iota).unwrap();
        let pulled_big = big.iota.clone();
        let fs = dual(top.m2()).maps;
        let restrict_to = |f: &Vec<u64>, incl: &ModuleMap| -> Vec<u64> {
            incl.rows().iter().flat_map(|g| combine(&ring, g, &f.chunks(ring.order()).map(|c| c.to_vec()).collect::<Vec<_>>(), ring.order())).collect()
        };
        let mut nonzero = false;
        for t in 0..b3.hom.maps.len() {
            let mut e = vec![0u64; b3.hom.maps.len() * ring.order()];
            e[t * ring.order()] = 1;
            let x = step.apply(&e);
            let y = direct.apply(&e);
            for f in &fs {
                let v = b1.evaluate(&x, &[restrict_to(f, &pulled_low)]).unwrap();
                nonzero |= !v.is_zero();
                prop_assert_eq!(v, b1_direct.evaluate(&y, &[restrict_to(f, &pulled_big)]).unwrap());
            }
        }
        prop_assert!(nonzero);
    }

    #[test]
    fn cartesian_map_ignores_complement_choice(idx in 0usize..5, seed in any::<u64>()) {
        let (ring, mut rng) = pick(idx, seed);
        let (m2, a2) = nested_setup(&ring, &mut rng, 3);
        let sq = coordinate_square(&a2, &[0]).unwrap();
        // U fixes F₁ = R·e₀ and acts on the quotient by V with det V = u
        let u = ring.scalar(2);
        let mut rows: Vec<Vec<GroupRingElement>> = (0..3).map(|i| (0..3).map(|j| if i == j { ring.one() } else { ring.zero() }).collect()).collect();
        rows[1][0] = random::element(&ring, &mut rng);
        rows[2][0] = random::element(&ring, &mut rng);
        rows[1][2] = random::element(&ring, &mut rng);
        rows[2][1] = random::element_in_power(&ring, &mut rng, 1);
        rows[1] = rows[1].iter().map(|a| a * &u).collect();
        let det_v = kolyvagin_core::exterior::det(&ring, &[rows[1][1..].to_vec(), rows[2][1..].to_vec()]);
        prop_assume!(!det_v.augmentation().is_multiple_of(ring.p()));
        let umat = ModuleMap::new(
            &PresentedModule::free(&ring, 3),
            &PresentedModule::free(&ring, 3),
            rows.iter().map(|r| flatten(r)).collect(),
        ).unwrap();
        let a2u = a2.then(&umat).unwrap();
        let sq_u = CartesianSquare::new(sq.iota.clone(), sq.alpha1.clone(), a2u, sq.j.clone()).unwrap();
        let from = Bidual::new(&m2, 2);
        let to = Bidual::new(sq.m1(), 0);
        let phi = cartesian_map(&sq, &from, &to).unwrap();
        let phi_u = cartesian_map(&sq_u, &from, &to).unwrap();
        prop_assert!(!phi.is_zero());
        prop_assert!(phi_u.equals(&phi.scale(&det_v)));
    }
}
