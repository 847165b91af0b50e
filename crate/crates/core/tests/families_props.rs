use galpoint::curve::PlaneCurve;
use galpoint::families::{
    additive_poly_from_subgroup, build_family, verify_family, FamilyExpectation, FamilySpec, FamilyVerdict,
};
use galpoint::galois::{GaloisReport, RunConfig};
use galpoint::polyring::Polynomial;
use galpoint::projective::{common_field, Classification, GroupElement, GroupTag, ProjLine, ProjPoint};
use galpoint::{Error, Field, Fq};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 15] = [5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59];

fn build_and_verify(spec: &FamilySpec) -> (PlaneCurve, FamilyExpectation, FamilyVerdict) {
    let (c, x) = build_family(spec).unwrap();
    let v = verify_family(&c, &x, &RunConfig::default()).unwrap();
    let failed: Vec<_> = v.checks.iter().filter(|c| !c.pass).collect();
    assert!(v.pass, "{spec:?}: {failed:?}");
    (c, x, v)
}

fn point(f: &Field, c: [i64; 3]) -> ProjPoint {
    ProjPoint::from_i64s(f, &c).unwrap()
}

/// Points of the curve, other than `a`, on the line through `a` and `r`: the
/// form restricted to `s·a + r`, when it is squarefree of degree `n`.
fn line_fiber(c: &PlaneCurve, a: &ProjPoint, r: &ProjPoint, n: usize) -> Option<Vec<Fq>> {
    let f = c.field();
    let s = Polynomial::var(f, 1, 0);
    let coords: Vec<Polynomial> = (0..3)
        .map(|i| &s.scale(a.coords()[i]) + &Polynomial::constant(f, 1, r.coords()[i]))
        .collect();
    let u = c.form().compose(&coords).to_upoly(0)?;
    (u.degree() == n && u.is_squarefree()).then(|| u.roots_in_field())
}

/// A certified group acts freely on a transversal fiber, so the fiber points
/// rational over the group's field number 0 or `n`.
fn fiber_counts_are_all_or_nothing(c: &PlaneCurve, a: &ProjPoint, r: &GaloisReport, n: usize, seed: u64) {
    let Some(g) = r.group.as_ref().and_then(|g| g.projective()) else { return };
    let w = common_field(g.identity().field(), c.field()).unwrap();
    let (cw, aw) = (c.lift(&w).unwrap(), a.lift(&w).unwrap());
    let on_curve = cw.contains(&aw).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4 {
        let v = [w.random(&mut rng), w.random(&mut rng), w.random(&mut rng)];
        let Ok(rp) = ProjPoint::new(&w, &v) else { continue };
        if rp == aw || (on_curve && cw.contains(&rp).unwrap()) {
            continue;
        }
        if let Some(roots) = line_fiber(&cw, &aw, &rp, n) {
            assert!(roots.is_empty() || roots.len() == n, "{} of {n} rational", roots.len());
        }
    }
}

/// The two groups share a field and the reported pair really fails to commute.
fn assert_noncommuting_pair(v: &FamilyVerdict) {
    let j = v.joint.as_ref().unwrap();
    let (i, k) = j.noncommuting_pair.expect("a noncommuting pair");
    let g = |r: &Option<GaloisReport>| r.as_ref().unwrap().group.as_ref().unwrap().projective().unwrap().clone();
    let (a, b) = (g(&v.inner), g(&v.outer));
    let w = common_field(a.identity().field(), b.identity().field()).unwrap();
    let (a, b) = (a.lift(&w).unwrap(), b.lift(&w).unwrap());
    let (x, y) = (&a.elements()[i], &b.elements()[k]);
    assert_ne!(x.compose(y), y.compose(x));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn tame_members_are_direct_products(
        d in 3usize..=8,
        p in prop::sample::select(PRIMES.to_vec()),
        c in 0u8..=1,
        seed in any::<u64>(),
    ) {
        prop_assume!(d % p as usize != 0 && (d - 1) % p as usize != 0);
        let spec = FamilySpec::Thm2Tame { d, c, field: p.to_string() };
        let (curve, x, v) = build_and_verify(&spec);
        let (inner, outer) = (v.inner.as_ref().unwrap(), v.outer.as_ref().unwrap());
        prop_assert_eq!(inner.group_order(), Some(d - 1));
        prop_assert_eq!(outer.group_order(), Some(d));
        let j = v.joint.as_ref().unwrap();
        prop_assert_eq!(j.classification, Classification::Direct);
        prop_assert_eq!(j.joint_order, (d * (d - 1)) as u64);
        prop_assert!(j.all_commute && j.intersection_order == 1);
        // Z = 0 meets x^{d-1} z + y^d + c z^d only in (1:0:0)
        let w = curve.field().clone();
        let div = curve.line_intersection_divisor(&ProjLine::through(&x.p, &x.q).unwrap(), 12).unwrap();
        let pts: Vec<_> = div.points().to_vec();
        prop_assert_eq!(pts.len(), 1);
        prop_assert_eq!(&pts[0].0, &x.p.lift(div.field().unwrap()).unwrap());
        prop_assert_eq!(pts[0].1, d as u32);
        let sing = curve.singular_points(12).unwrap();
        if c == 1 {
            prop_assert!(sing.is_empty());
        } else {
            let origin = point(&w, [0, 0, 1]);
            prop_assert_eq!(sing.points.len(), 1);
            prop_assert!(sing.contains(&origin));
            prop_assert_eq!(sing.multiplicity(&origin), d as u32 - 1);
            prop_assert_eq!(curve.multiplicity_at(&origin).unwrap(), d as u32 - 1);
        }
        fiber_counts_are_all_or_nothing(&curve, &x.p, inner, d - 1, seed);
        fiber_counts_are_all_or_nothing(&curve, &x.q, outer, d, seed ^ 1);
    }

    #[test]
    fn cubic_and_quartic_members_give_s3_and_a4(
        p in prop::sample::select(PRIMES.to_vec()),
        quartic in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let field = p.to_string();
        let spec = if quartic { FamilySpec::Thm3Quartic { field } } else { FamilySpec::Thm3Cubic { field } };
        let (curve, x, v) = build_and_verify(&spec);
        let d = if quartic { 4 } else { 3 };
        let (inner, outer) = (v.inner.as_ref().unwrap(), v.outer.as_ref().unwrap());
        prop_assert_eq!(inner.descriptor.as_ref().unwrap().tag, GroupTag::Cyclic);
        prop_assert_eq!(outer.descriptor.as_ref().unwrap().tag, if quartic { GroupTag::Klein } else { GroupTag::Cyclic });
        let j = v.joint.as_ref().unwrap();
        prop_assert_eq!(j.joint_descriptor.tag, if quartic { GroupTag::A4 } else { GroupTag::S3 });
        prop_assert_eq!(j.classification, Classification::RightSemidirect);
        assert_noncommuting_pair(&v);
        // y = 0 meets the curve in (x+1)^{d-1}(x - a) with a = 8 or -9
        let f = curve.field().clone();
        let axis = ProjLine::from_i64s(&f, [0, 1, 0]).unwrap();
        prop_assert!(axis.contains(&x.q).unwrap());
        let div = curve.line_intersection_divisor(&axis, 12).unwrap();
        let (node, other) = (point(&f, [-1, 0, 1]), point(&f, [if quartic { -9 } else { 8 }, 0, 1]));
        let mut expect = vec![(node.clone(), d - 1), (other.clone(), 1)];
        expect.sort();
        let mut found: Vec<(ProjPoint, u32)> = div.points().to_vec();
        found.sort();
        prop_assert_eq!(found, expect);
        prop_assert_eq!(curve.multiplicity_at(&node).unwrap(), d - 1);
        prop_assert_eq!(curve.multiplicity_at(&other).unwrap(), 1);
        fiber_counts_are_all_or_nothing(&curve, &x.p, inner, d as usize - 1, seed);
        fiber_counts_are_all_or_nothing(&curve, &x.q, outer, d as usize, seed ^ 1);
    }

    #[test]
    fn prop4_members_are_semidirect_with_distinct_line_points(
        (p, e) in prop::sample::select(vec![(2u64, 2u32), (3, 1), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4)]),
        j in 1usize..=2,
        normal_form in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let field = Some(Field::new(p, e as usize * j).unwrap().spec());
        let spec = FamilySpec::Prop4 { p, e, normal_form, field };
        let (curve, x, v) = build_and_verify(&spec);
        let q = p.pow(e) as usize;
        let (inner, outer) = (v.inner.as_ref().unwrap(), v.outer.as_ref().unwrap());
        prop_assert_eq!(inner.group_order(), Some(q - 1));
        prop_assert_eq!(outer.group_order(), Some(q));
        prop_assert_eq!(outer.descriptor.as_ref().unwrap().elementary_abelian(), Some((p, e)));
        let jt = v.joint.as_ref().unwrap();
        prop_assert_eq!(jt.classification, Classification::RightSemidirect);
        prop_assert!(jt.g2_normal && !jt.g1_normal);
        assert_noncommuting_pair(&v);
        let div = curve.line_intersection_divisor(&ProjLine::through(&x.p, &x.q).unwrap(), 12).unwrap();
        prop_assert_eq!(div.points().len(), q);
        prop_assert!(div.points().iter().all(|(_, m)| *m == 1));
        fiber_counts_are_all_or_nothing(&curve, &x.p, inner, q - 1, seed);
        fiber_counts_are_all_or_nothing(&curve, &x.q, outer, q, seed ^ 1);
    }

    #[test]
    fn additive_polynomials_from_scaled_subfields(
        (p, e, k) in prop::sample::select(vec![
            (2u64, 1usize, 4usize), (2, 2, 4), (2, 2, 6), (2, 3, 6), (3, 1, 2), (3, 2, 4), (5, 1, 2),
            (5, 2, 2), (7, 1, 3), (2, 4, 4), (3, 1, 3), (13, 1, 2),
        ]),
        beta in any::<u64>(),
        mi in any::<prop::sample::Index>(),
        ab in (any::<u64>(), any::<u64>()),
    ) {
        let f = Field::new(p, k).unwrap();
        let elem = |i: u64| f.from_index(i % f.order()).unwrap();
        let b = f.from_index(1 + beta % (f.order() - 1)).unwrap();
        let s: Vec<Fq> = f.subfield_elements(e).unwrap().into_iter().map(|a| f.mul(a, b)).collect();
        let pe = p.pow(e as u32);
        let divisors: Vec<u64> = (1..pe).filter(|m| (pe - 1) % m == 0).collect();
        let m = divisors[mi.index(divisors.len())];
        let g = additive_poly_from_subgroup(&f, &s, m).unwrap();
        prop_assert!(g.is_additive());
        prop_assert!(g.scales_with_root_of_unity().unwrap());
        let u = g.to_upoly();
        prop_assert_eq!(u.degree() as u64, pe);
        prop_assert_eq!(u.lc(), f.one());
        prop_assert!(s.iter().all(|&a| u.eval(a).is_zero()));
        // additivity and scaling by evaluation
        let (x, y) = (elem(ab.0), elem(ab.1));
        prop_assert_eq!(u.eval(f.add(x, y)), f.add(u.eval(x), u.eval(y)));
        let zeta = f.nth_root_of_unity(m).unwrap().unwrap();
        prop_assert_eq!(f.pow(zeta, m as u128), f.one());
        prop_assert_eq!(u.eval(f.mul(zeta, x)), f.mul(zeta, u.eval(x)));
        prop_assert_eq!(g.exponents()[0], pe);
        // one extra element breaks closure, unless S is the whole field
        if let Some(extra) = f.elements().find(|a| !s.contains(a)) {
            let mut bad = s.clone();
            bad.push(extra);
            prop_assert!(matches!(additive_poly_from_subgroup(&f, &bad, m), Err(Error::NotSubgroup(_))));
        }
    }
}
