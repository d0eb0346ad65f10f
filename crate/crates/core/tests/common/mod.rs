//! Helpers shared by the property and acceptance test targets: fixture
//! loading plus the randomized suites, written against plain `TestRunner`
//! so both targets can run them with their own case counts.

#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestError, TestRunner};

use mds_core::abgroup::{AbelianGroup, GroupElement, GroupHom};
use mds_core::cone::Cone;
use mds_core::gitfan;
use mds_core::linalg::{dot, IntMatrix, IntVec};
use mds_core::polyring::{
    contains_one, groebner_basis, normal_form, Polynomial, TermOrder,
};
use mds_core::ring::GradedRing;
use mds_core::space::MoriDreamSpace;
use mds_core::spacefile::SpaceFile;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/fixtures")
        .join(name)
}

pub fn load_file(name: &str) -> SpaceFile {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture should exist");
    SpaceFile::from_json(&text).expect("fixture should parse")
}

pub fn load_ring(name: &str) -> GradedRing {
    load_file(name).build(true).expect("fixture should build").0
}

pub fn load_space(name: &str) -> MoriDreamSpace {
    let (ring, ample) = load_file(name).build(true).expect("fixture should build");
    MoriDreamSpace::new(ring, ample).expect("fixture should be a valid space")
}

fn config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, ..Config::default() }
}

fn done<T: std::fmt::Debug>(result: Result<(), TestError<T>>) -> Result<(), String> {
    result.map_err(|e| e.to_string())
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn bigvec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| big(x)).collect()
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(big(x))
}

/// Smith and Hermite forms reconstruct the input through unimodular
/// transformations and have the promised shapes.
pub fn suite_normal_forms(cases: u32) -> Result<(), String> {
    let strategy = (1usize..=5, 1usize..=6).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-20i64..=20, c), r)
    });
    let mut runner = TestRunner::new(config(cases));
    done(runner.run(&strategy, |rows| {
        let m = IntMatrix::from_rows(&rows);

        let snf = m.smith_form();
        prop_assert_eq!(&snf.u.mul(&m).mul(&snf.v), &snf.s);
        prop_assert!(snf.u.det().abs().is_one());
        prop_assert!(snf.v.det().abs().is_one());
        for i in 0..snf.s.rows {
            for j in 0..snf.s.cols {
                if i != j {
                    prop_assert!(snf.s[(i, j)].is_zero());
                }
            }
        }
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }

        let hnf = m.hermite_form();
        prop_assert_eq!(&m.mul(&hnf.u), &hnf.h);
        prop_assert!(hnf.u.det().abs().is_one());
        prop_assert!(hnf.pivots.windows(2).all(|w| w[0] < w[1]));
        for (j, &p) in hnf.pivots.iter().enumerate() {
            prop_assert!(!hnf.h[(p, j)].is_zero());
            for i in 0..p {
                prop_assert!(hnf.h[(i, j)].is_zero());
            }
        }
        for j in hnf.pivots.len()..hnf.h.cols {
            for i in 0..hnf.h.rows {
                prop_assert!(hnf.h[(i, j)].is_zero());
            }
        }
        Ok(())
    }))
}

/// Lattice laws for subgroups: membership of generators, the sharp iff
/// law for intersections, Lagrange for finite groups, rank additivity
/// and element orders in the factor group.
pub fn suite_subgroups(cases: u32) -> Result<(), String> {
    let torsion_choices = proptest::sample::subsequence(vec![2i64, 3, 4, 6, 8, 9], 0..=2);
    let raw_vec = proptest::collection::vec(-10i64..=10, 4);
    let strategy = (
        0usize..=2,
        torsion_choices,
        proptest::collection::vec(raw_vec, 11),
    );
    let mut runner = TestRunner::new(config(cases));
    done(runner.run(&strategy, |(rank, torsion, raws)| {
        let g = AbelianGroup::from_i64(rank, &torsion).expect("torsion is positive");
        let dim = g.dim();
        let elems: Vec<GroupElement> = raws
            .iter()
            .map(|raw| g.element_from_i64(&raw[..dim]).expect("coords fit"))
            .collect();
        let hgens = &elems[0..3];
        let kgens = &elems[3..6];
        let probes = &elems[6..11];

        let h = g.subgroup(hgens);
        let k = g.subgroup(kgens);
        for e in hgens {
            prop_assert!(h.contains(e));
        }

        let meet = h.intersect(&k).expect("same ambient group");
        for p in probes {
            prop_assert_eq!(meet.contains(p), h.contains(p) && k.contains(p));
        }

        let join_gens: Vec<GroupElement> =
            hgens.iter().chain(kgens.iter()).cloned().collect();
        let join = g.subgroup(&join_gens);
        for e in h.generators().iter().chain(k.generators().iter()) {
            prop_assert!(join.contains(e));
        }
        for e in meet.generators() {
            prop_assert!(h.contains(&e) && k.contains(&e));
        }

        if let Some(order_g) = g.order() {
            let order_h = h.abstract_type().order().expect("subgroup of finite");
            let order_q = h.factor_group().order().expect("factor of finite");
            prop_assert_eq!(order_h * order_q, order_g);
        }
        prop_assert_eq!(
            h.abstract_type().rank() + h.factor_group().rank(),
            g.rank()
        );

        if let Some(order_q) = h.factor_group().order() {
            for p in probes {
                let d = h.element_order_mod(p).expect("finite factor group");
                prop_assert!((&order_q % &d).is_zero());
                prop_assert!(h.contains(&g.scale(&d, p)));
            }
        }
        Ok(())
    }))
}

fn poly_strategy(nvars: usize) -> impl Strategy<Value = Polynomial> {
    let term = (
        proptest::collection::vec(0u32..=3, nvars),
        (-5i64..=5).prop_filter("nonzero coefficient", |c| *c != 0),
    );
    proptest::collection::vec(term, 1..=3).prop_map(move |terms| {
        let mut p = Polynomial::zero(nvars);
        for (exps, c) in terms {
            p = p.add(&Polynomial::monomial(nvars, &exps, rat(c)));
        }
        p
    })
}

/// Groebner bases decide ideal membership: explicit combinations reduce
/// to zero, reduction is idempotent and splits off a member.
pub fn suite_groebner(cases: u32) -> Result<(), String> {
    let strategy = (2usize..=3).prop_flat_map(|nvars| {
        (
            proptest::collection::vec(poly_strategy(nvars), 1..=2),
            proptest::collection::vec(poly_strategy(nvars), 1..=2),
            poly_strategy(nvars),
        )
    });
    let order = TermOrder::DegRevLex;
    let mut runner = TestRunner::new(config(cases));
    done(runner.run(&strategy, |(gens, mults, probe)| {
        let gens: Vec<Polynomial> =
            gens.into_iter().filter(|g| !g.is_zero()).collect();
        if gens.is_empty() {
            return Ok(());
        }
        let gb = groebner_basis(&gens, &order);

        let mut member = Polynomial::zero(gens[0].nvars());
        for (g, h) in gens.iter().zip(mults.iter().cycle()) {
            member = member.add(&g.mul(h));
        }
        prop_assert!(normal_form(&member, &gb, &order).is_zero());

        let reduced = normal_form(&probe, &gb, &order);
        prop_assert_eq!(&normal_form(&reduced, &gb, &order), &reduced);
        prop_assert!(normal_form(&probe.sub(&reduced), &gb, &order).is_zero());

        let unit_in_basis = gb
            .iter()
            .any(|g| g.as_constant().is_some_and(|c| !c.is_zero()));
        prop_assert_eq!(contains_one(&gens), unit_in_basis);
        Ok(())
    }))
}

/// Convex duality is an involution and the ray/halfspace descriptions
/// agree; faces, relative interiors and intersections are consistent.
pub fn suite_cones(cases: u32) -> Result<(), String> {
    let strategy = (2usize..=4).prop_flat_map(|ambient| {
        let rays = proptest::collection::vec(
            proptest::collection::vec(-4i64..=4, ambient),
            0..=5,
        );
        let coeffs = proptest::collection::vec(0i64..=3, 5);
        (Just(ambient), rays.clone(), rays, coeffs)
    });
    let mut runner = TestRunner::new(config(cases));
    done(runner.run(&strategy, |(ambient, rays_a, rays_b, coeffs)| {
        let rays_a: Vec<IntVec> = rays_a.iter().map(|r| bigvec(r)).collect();
        let rays_b: Vec<IntVec> = rays_b.iter().map(|r| bigvec(r)).collect();
        let a = Cone::from_rays(ambient, &rays_a);
        let b = Cone::from_rays(ambient, &rays_b);

        prop_assert_eq!(&a.dual().dual(), &a);
        prop_assert_eq!(&Cone::from_inequalities(ambient, &rays_a), &a.dual());

        let meet = a.intersect(&b);
        prop_assert_eq!(&meet, &b.intersect(&a));
        prop_assert!(a.contains_cone(&meet));
        prop_assert!(b.contains_cone(&meet));
        prop_assert!(a.contains_cone(&a));

        for f in a.facets() {
            prop_assert!(f.is_face_of(&a));
            prop_assert_eq!(f.dim() + 1, a.dim());
        }

        let rp = a.relint_point();
        prop_assert!(a.contains(&rp));
        prop_assert!(a.relint_contains(&rp));
        prop_assert_eq!(&a.minimal_face_at(&rp), &a);

        let mut x = vec![BigInt::zero(); ambient];
        for (r, c) in rays_a.iter().zip(coeffs.iter()) {
            for (xi, ri) in x.iter_mut().zip(r.iter()) {
                *xi += ri * big(*c);
            }
        }
        prop_assert!(a.contains(&x));
        let dual = a.dual();
        for y in dual.rays() {
            prop_assert!(!dot(&x, y).is_negative());
        }
        Ok(())
    }))
}

/// For a polynomial-free grading every variable subset spans an orbit
/// cone, so the GIT fan must match the brute-force refinement of all
/// subset cones: chambers are intersections of the cones containing a
/// point, and the result is a genuine fan supported on the effective
/// cone.
pub fn suite_gitfan_oracle(cases: u32) -> Result<(), String> {
    let strategy = (1usize..=3)
        .prop_flat_map(|k| {
            let r = k..=5usize;
            r.prop_flat_map(move |r| {
                let cols = proptest::collection::vec(
                    proptest::collection::vec(-3i64..=3, k),
                    r,
                );
                let coeffs = proptest::collection::vec(0i64..=4, r);
                (Just(k), cols, coeffs)
            })
        })
        .prop_map(|(k, mut cols, coeffs)| {
            for col in &mut cols {
                if col.iter().all(|&x| x == 0) {
                    col[0] = 1;
                }
            }
            (k, cols, coeffs)
        });
    let mut runner = TestRunner::new(config(cases));
    done(runner.run(&strategy, |(k, cols, coeffs)| {
        let r = cols.len();
        let cols_big: Vec<IntVec> = cols.iter().map(|c| bigvec(c)).collect();
        let q = IntMatrix::from_cols(&cols_big);
        let hom = GroupHom::new(AbelianGroup::free(r), AbelianGroup::free(k), q)
            .expect("free groups accept any matrix");
        let ring = GradedRing::new(r, vec![], hom).expect("no relations to check");

        let fan = gitfan::git_fan(&ring);
        prop_assert!(fan.is_fan());

        let subset_cones: Vec<Cone> = (0usize..1 << r)
            .map(|mask| {
                let members: Vec<IntVec> = (0..r)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| cols_big[i].clone())
                    .collect();
                Cone::from_rays(k, &members)
            })
            .collect();
        let eff = subset_cones.last().expect("full subset present");

        for sigma in fan.max_cones() {
            prop_assert!(eff.contains_cone(sigma));
            let p = sigma.relint_point();
            let containing: Vec<&Cone> =
                subset_cones.iter().filter(|c| c.contains(&p)).collect();
            let lambda = Cone::intersection(k, &containing);
            prop_assert_eq!(&lambda, sigma);
        }

        let mut w = vec![BigInt::zero(); k];
        for (col, c) in cols_big.iter().zip(coeffs.iter()) {
            for (wi, ci) in w.iter_mut().zip(col.iter()) {
                *wi += ci * big(*c);
            }
        }
        let hits = fan.cones_containing(&w);
        prop_assert!(!hits.is_empty());
        let containing: Vec<&Cone> =
            subset_cones.iter().filter(|c| c.contains(&w)).collect();
        let lambda = Cone::intersection(k, &containing);
        for sigma in hits {
            prop_assert!(sigma.contains_cone(&lambda));
        }
        Ok(())
    }))
}

fn delpezzo() -> &'static MoriDreamSpace {
    static SPACE: OnceLock<MoriDreamSpace> = OnceLock::new();
    SPACE.get_or_init(|| load_space("delpezzo.json"))
}

fn x2_surface() -> &'static MoriDreamSpace {
    static SPACE: OnceLock<MoriDreamSpace> = OnceLock::new();
    SPACE.get_or_init(|| load_space("x2.json"))
}

/// The intersection form on a surface is symmetric, bilinear, compatible
/// with scaling and blind to torsion.
pub fn suite_intersection_form(cases: u32) -> Result<(), String> {
    let strategy = (
        0u8..10,
        proptest::collection::vec(proptest::collection::vec(-2i64..=2, 9), 3),
    );
    let mut runner = TestRunner::new(config(cases));
    done(runner.run(&strategy, |(pick, raws)| {
        // Weight the big Picard rank 9 surface low, it costs real time.
        let space = if pick == 0 { x2_surface() } else { delpezzo() };
        let cl = space.class_group().clone();
        let dim = cl.dim();
        let elem = |raw: &[i64]| cl.element_from_i64(&raw[..dim]).expect("coords fit");
        let u = elem(&raws[0]);
        let v = elem(&raws[1]);
        let w = elem(&raws[2]);
        let pair = |a: &GroupElement, b: &GroupElement| {
            space
                .intersection_number(&[a.clone(), b.clone()])
                .expect("surface intersection numbers exist")
        };

        let uw = pair(&u, &w);
        let vw = pair(&v, &w);
        prop_assert_eq!(&pair(&w, &u), &uw);
        prop_assert_eq!(pair(&cl.add(&u, &v), &w), &uw + &vw);
        prop_assert_eq!(pair(&cl.scale(&big(2), &u), &w), &uw * rat(2));

        if !cl.torsion().is_empty() {
            let mut tors = vec![0i64; dim];
            tors[cl.rank()] = 1;
            let t = cl.element_from_i64(&tors).expect("torsion coordinate");
            prop_assert_eq!(&pair(&cl.add(&u, &t), &w), &uw);
        }
        Ok(())
    }))
}

/// Polynomial printing and parsing are inverse to each other.
pub fn suite_poly_roundtrip(cases: u32) -> Result<(), String> {
    let strategy = (1usize..=4).prop_flat_map(|nvars| (Just(nvars), poly_strategy(nvars)));
    let mut runner = TestRunner::new(config(cases));
    done(runner.run(&strategy, |(nvars, p)| {
        let text = p.to_string();
        let back = Polynomial::parse(&text, nvars).expect("printed form parses");
        prop_assert_eq!(back, p);
        Ok(())
    }))
}

/// GIT fans of the bundled spaces are fans supported exactly on the
/// effective cone, and agree with the single-chamber entry point.
pub fn suite_fan_fixtures() -> Result<(), String> {
    for name in ["quadric.json", "fourfold.json"] {
        let ring = load_ring(name);
        let fan = gitfan::git_fan(&ring);
        if !fan.is_fan() {
            return Err(format!("{name}: maximal cones do not form a fan"));
        }
        let eff = gitfan::effective_cone(&ring);
        if fan.cones_containing(&eff.relint_point()).is_empty() {
            return Err(format!("{name}: interior of the effective cone uncovered"));
        }
        for sigma in fan.max_cones() {
            if !eff.contains_cone(sigma) {
                return Err(format!("{name}: chamber escapes the effective cone"));
            }
            let p = sigma.relint_point();
            match gitfan::chamber(&ring, &p) {
                Some(c) if &c == sigma => {}
                _ => return Err(format!("{name}: chamber lookup disagrees with the fan")),
            }
        }
    }
    Ok(())
}
