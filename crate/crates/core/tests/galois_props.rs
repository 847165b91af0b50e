use std::sync::OnceLock;

use galpoint::curve::{curve_from_affine, PlaneCurve};
use galpoint::embedder::invariant_generator;
use galpoint::families::{build_family, FamilyExpectation, FamilySpec};
use galpoint::galois::{
    deck_group, fiber_polynomial, fixes_point, is_galois_point, joint_structure, monte_carlo_screen, transform_form,
    verify_witness, GaloisReport, ProjectionFiber, RationalMap1D, RunConfig, Strategy as Method, Verdict,
};
use galpoint::polyring::{Mono, Polynomial, UPoly};
use galpoint::projective::{generate_group, GroupElement, ProjPoint, Projectivity};
use galpoint::{Error, Field, Fq};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(p: u64, k: usize) -> Field {
    Field::new(p, k).unwrap()
}

fn family_specs() -> Vec<FamilySpec> {
    let tame = |d, c, f: &str| FamilySpec::Thm2Tame { d, c, field: f.into() };
    vec![
        tame(4, 0, "13"),
        tame(4, 1, "13"),
        tame(5, 0, "11"),
        tame(5, 1, "11"),
        tame(6, 0, "13"),
        tame(6, 1, "13"),
        FamilySpec::Thm3Cubic { field: "13".into() },
        FamilySpec::Thm3Quartic { field: "13".into() },
        FamilySpec::Prop4 { p: 2, e: 2, normal_form: false, field: None },
        FamilySpec::Prop4 { p: 3, e: 1, normal_form: false, field: None },
        FamilySpec::Prop4 { p: 2, e: 2, normal_form: true, field: None },
        FamilySpec::Gk { q: 2, field: None },
    ]
}

fn families() -> &'static [(PlaneCurve, FamilyExpectation)] {
    static F: OnceLock<Vec<(PlaneCurve, FamilyExpectation)>> = OnceLock::new();
    F.get_or_init(|| family_specs().iter().map(|s| build_family(s).unwrap()).collect())
}

/// Projection fibers from both points of every family member.
fn family_fibers() -> &'static [(String, ProjectionFiber)] {
    static F: OnceLock<Vec<(String, ProjectionFiber)>> = OnceLock::new();
    F.get_or_init(|| {
        let mut out = Vec::new();
        for (c, x) in families() {
            for (tag, pt) in [("inner", &x.p), ("outer", &x.q)] {
                out.push((format!("{} {tag}", x.family.name()), fiber_polynomial(c, pt).unwrap()));
            }
        }
        out
    })
}

fn cfg() -> RunConfig {
    RunConfig::default()
}

#[test]
fn certificates_agree_on_family_points() {
    for (c, x) in families() {
        for (pt, strategy, order) in [(&x.p, &x.inner_strategy, x.inner_order), (&x.q, &x.outer_strategy, x.outer_order)] {
            let name = format!("{} at {pt}", x.family.name());
            let main = is_galois_point(c, pt, strategy, &cfg()).unwrap();
            assert_eq!(main.verdict, Verdict::CertifiedGalois, "{name}");
            assert_eq!(main.group_order(), Some(order), "{name}");
            // any other certificate agrees; none refutes
            for other in [Method::Collineation, Method::Auto] {
                let r = is_galois_point(c, pt, &other, &cfg()).unwrap();
                assert_ne!(r.verdict, Verdict::CertifiedNotGalois, "{name}");
                if r.verdict == Verdict::CertifiedGalois {
                    assert_eq!(r.group_order(), Some(order), "{name}");
                }
                assert!(r.group_order().unwrap_or(0) <= order, "{name}");
            }
        }
    }
}

fn random_affine(f: &Field, d: u16, terms: &[(u16, u16, u64)]) -> Polynomial {
    let mono = |i: u16, j: u16| {
        let mut m: Mono = [0; 6];
        m[0] = i;
        m[1] = j;
        m
    };
    let mut all: Vec<(Mono, Fq)> = terms
        .iter()
        .filter(|&&(i, j, _)| i + j < d)
        .map(|&(i, j, c)| (mono(i, j), f.from_index(c % f.order()).unwrap()))
        .collect();
    all.push((mono(d, 0), f.one()));
    all.push((mono(0, d), f.one()));
    Polynomial::from_terms(f, 2, all)
}

/// A random reduced cubic or quartic and a random rational center.
fn random_curve_and_center(
    p: u64,
    d: u16,
    terms: &[(u16, u16, u64)],
    center: (u64, u64, u64),
) -> Option<(PlaneCurve, ProjPoint)> {
    let f = field(p, 1);
    let c = curve_from_affine(&random_affine(&f, d, terms)).ok()?;
    let idx = |i: u64| f.from_index(i % p).unwrap();
    let pt = ProjPoint::new(&f, &[idx(center.0), idx(center.1), idx(center.2)]).ok()?;
    Some((c, pt))
}

fn curve_terms() -> impl Strategy<Value = Vec<(u16, u16, u64)>> {
    prop::collection::vec((0u16..4, 0u16..4, any::<u64>()), 0..9)
}

/// Re-specializes the fiber at the witness and factors it completely.
fn refactor_witness(fib: &ProjectionFiber, r: &GaloisReport) -> Vec<usize> {
    let w = r.witness.as_ref().unwrap();
    let ext = Field::parse_spec(&w.field).unwrap();
    let t0 = ext.from_index(w.t0_index).unwrap();
    let u = fib.poly.lift(&ext).unwrap().eval_var(0, t0).to_upoly(1).unwrap();
    assert!(u.is_squarefree());
    let mut degs: Vec<usize> = u.factor(7).iter().map(|(g, _)| g.degree()).collect();
    degs.sort_unstable();
    degs
}

/// A rational function of degree `n` with coprime numerator and denominator.
fn random_map(f: &Field, num: &[u64], den: &[u64]) -> Option<RationalMap1D> {
    let up = |v: &[u64]| UPoly::new(f, v.iter().map(|i| f.from_index(i % f.order()).unwrap()).collect());
    let (a, b) = (up(num), up(den));
    if a.is_zero() || b.is_zero() || !a.gcd(&b).is_constant() {
        return None;
    }
    let h = RationalMap1D::new(a, b).ok()?;
    (h.degree() >= 2).then_some(h)
}

fn thm2_specs() -> Vec<FamilySpec> {
    family_specs().into_iter().filter(|s| matches!(s, FamilySpec::Thm2Tame { .. })).collect()
}

fn thm2_members() -> &'static [(PlaneCurve, FamilyExpectation)] {
    static F: OnceLock<Vec<(PlaneCurve, FamilyExpectation)>> = OnceLock::new();
    F.get_or_init(|| thm2_specs().iter().map(|s| build_family(s).unwrap()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn monte_carlo_never_refutes_a_family_point(i in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let fibers = family_fibers();
        let (name, fib) = &fibers[i.index(fibers.len())];
        let out = match monte_carlo_screen(fib, 24, seed) {
            Ok(out) => out,
            // the constant-field bound can outgrow 63-bit field orders
            Err(Error::NoScreeningField { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{name}: {e}"))),
        };
        prop_assert!(out.witness.is_none(), "{name}: {:?}", out.witness);
        prop_assert!(out.used > 0, "{name}: no usable specialization");
    }

    #[test]
    fn non_galois_witnesses_survive_refactoring(
        p in prop::sample::select(vec![7u64, 13]),
        d in 3u16..=4,
        t in curve_terms(),
        center in (any::<u64>(), any::<u64>(), any::<u64>()),
        seed in any::<u64>(),
    ) {
        let Some((c, pt)) = random_curve_and_center(p, d, &t, center) else { return Ok(()) };
        let Ok(fib) = fiber_polynomial(&c, &pt) else { return Ok(()) };
        let cfg = RunConfig { trials: 24, seed, ..RunConfig::default() };
        let r = is_galois_point(&c, &pt, &Method::MonteCarlo, &cfg).unwrap();
        if let Some(w) = &r.witness {
            prop_assert_eq!(r.verdict, Verdict::CertifiedNotGalois);
            prop_assert!(verify_witness(&fib, w).unwrap());
            let degs = refactor_witness(&fib, &r);
            prop_assert_eq!(&degs, &w.factor_degrees);
            prop_assert!(degs.first() != degs.last());
            prop_assert_eq!(degs.iter().sum::<usize>(), fib.degree);
        } else {
            prop_assert_ne!(r.verdict, Verdict::CertifiedNotGalois);
        }
    }

    #[test]
    fn collineation_groups_never_exceed_the_degree(
        p in prop::sample::select(vec![5u64, 7, 13]),
        d in 3u16..=4,
        t in curve_terms(),
        center in (any::<u64>(), any::<u64>(), any::<u64>()),
    ) {
        let Some((c, pt)) = random_curve_and_center(p, d, &t, center) else { return Ok(()) };
        let r = match is_galois_point(&c, &pt, &Method::Collineation, &cfg()) {
            Ok(r) => r,
            Err(_) => return Ok(()),
        };
        if let Some(n) = r.group_order() {
            prop_assert!(n <= r.projection_degree);
            prop_assert_eq!(r.verdict == Verdict::CertifiedGalois, n == r.projection_degree);
        } else {
            prop_assert_ne!(r.verdict, Verdict::CertifiedGalois);
        }
        prop_assert_ne!(r.verdict, Verdict::CertifiedNotGalois);
    }

    #[test]
    fn deck_groups_are_closed_and_preserve_the_map(
        p in prop::sample::select(vec![7u64, 11, 13]),
        num in prop::collection::vec(any::<u64>(), 1..=5),
        den in prop::collection::vec(any::<u64>(), 1..=5),
        seed in any::<u64>(),
    ) {
        let f = field(p, 1);
        let Some(h) = random_map(&f, &num, &den) else { return Ok(()) };
        let g = deck_group(&h, 12).unwrap();
        prop_assert!(g.is_closed());
        prop_assert!(h.degree() % g.order() == 0);
        let w = g.identity().field().clone();
        let hw = h.lift(&w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in g.elements() {
            prop_assert!(hw.is_invariant_under(s));
            for _ in 0..20 {
                let t = Some(w.random(&mut rng));
                prop_assert_eq!(hw.eval(s.apply_t(t)), hw.eval(t));
            }
        }
    }

    #[test]
    fn deck_group_of_an_invariant_is_the_group(
        p in prop::sample::select(vec![5u64, 7, 11, 13]),
        seeds in (any::<u64>(), any::<u64>()),
        q0 in any::<u64>(),
    ) {
        let f = field(p, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seeds.0);
        let id = Projectivity::identity(&f, 2);
        let a = Projectivity::random(&f, 2, &mut rng);
        let b = Projectivity::random(&f, 2, &mut rng);
        let g = generate_group(&id, &[a.clone(), b], 60).unwrap_or_else(|_| generate_group(&id, &[a], 60).unwrap());
        prop_assume!(g.order() >= 2);
        let pt = if q0 % (p + 1) == p {
            ProjPoint::infinity_p1(&f)
        } else {
            ProjPoint::affine_line(&f, f.from_index(q0 % (p + 1)).unwrap())
        };
        let h = invariant_generator(&g, &pt).unwrap();
        prop_assert_eq!(h.degree(), g.order());
        let deck = deck_group(&h, 12).unwrap();
        prop_assert_eq!(deck.order(), g.order());
        let w = deck.identity().field().clone();
        for s in g.elements() {
            prop_assert!(deck.contains(&s.lift(&w).unwrap()));
        }
    }

    #[test]
    fn inner_groups_fix_their_center(i in any::<prop::sample::Index>(), seed in any::<u64>()) {
        // a family member in random coordinates: the curve F(T·v) with P' = T⁻¹P
        let members = thm2_members();
        let (c, x) = &members[i.index(members.len())];
        let f = c.field().clone();
        let t = Projectivity::random(&f, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let moved = PlaneCurve::from_form(transform_form(c.form(), &t)).unwrap();
        let (p, q) = (t.inverse().apply(&x.p).unwrap(), t.inverse().apply(&x.q).unwrap());
        let rp = is_galois_point(&moved, &p, &Method::Collineation, &cfg()).unwrap();
        let rq = is_galois_point(&moved, &q, &Method::Collineation, &cfg()).unwrap();
        prop_assert_eq!(rp.verdict, Verdict::CertifiedGalois);
        prop_assert_eq!(rq.verdict, Verdict::CertifiedGalois);
        let joint = joint_structure(&moved, &rp, &rq, cfg().closure_cap).unwrap();
        prop_assert!(joint.classification == galpoint::projective::Classification::Direct);
        let gp = rp.group.as_ref().unwrap().projective().unwrap();
        let gq = rq.group.as_ref().unwrap().projective().unwrap();
        prop_assert!(fixes_point(gp, &p.lift(gp.identity().field()).unwrap()).unwrap());
        prop_assert!(fixes_point(gq, &q.lift(gq.identity().field()).unwrap()).unwrap());
    }
}
