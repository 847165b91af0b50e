//! The acceptance criteria, one test per criterion. Each prints a
//! `criterion N: PASS|FAIL` line with its runtime; the harness line
//! `test criterion_NN_... ok|FAILED` carries the same verdict.

use std::time::{Duration, Instant};

use galpoint::curve::{curve_from_affine, PlaneCurve};
use galpoint::embedder::{a4_data, check_condition_b, construct_embedding};
use galpoint::families::{
    additive_poly_from_subgroup, branch_certificate, build_family, verify_family, FamilyExpectation, FamilySpec,
    FamilyVerdict,
};
use galpoint::galois::{
    central_collineation_group, classify_center, fiber_polynomial, monte_carlo_galois, verify_witness,
    CollineationMode, GaloisReport, Method, PointClass, RunConfig, Verdict,
};
use galpoint::polyring::{parse_polynomial, Mono, Polynomial};
use galpoint::projective::{common_field, Classification, GroupElement, GroupTag, ProjLine, ProjPoint};
use galpoint::{Field, Fq};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Runs one criterion under a time limit and reports it on one line.
fn criterion(n: u32, name: &str, limit: Duration, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(body));
    let took = start.elapsed();
    let ok = outcome.is_ok() && took <= limit;
    eprintln!(
        "criterion {n}: {} ({name}, {:.3} s, limit {} s)",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        limit.as_secs()
    );
    if let Err(e) = outcome {
        std::panic::resume_unwind(e);
    }
    assert!(took <= limit, "criterion {n} took {took:?}, limit {limit:?}");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn field(spec: &str) -> Field {
    Field::parse_spec(spec).unwrap()
}

fn verified(spec: FamilySpec) -> (PlaneCurve, FamilyExpectation, FamilyVerdict) {
    let (c, x) = build_family(&spec).unwrap();
    let v = verify_family(&c, &x, &RunConfig::default()).unwrap();
    let failed: Vec<_> = v.checks.iter().filter(|c| !c.pass).collect();
    assert!(v.pass, "{spec:?}: {failed:?}");
    (c, x, v)
}

fn inner(v: &FamilyVerdict) -> &GaloisReport {
    v.inner.as_ref().unwrap()
}

fn outer(v: &FamilyVerdict) -> &GaloisReport {
    v.outer.as_ref().unwrap()
}

fn certified(r: &GaloisReport, order: usize) {
    assert_eq!(r.verdict, Verdict::CertifiedGalois, "{:?}", r.notes);
    assert_eq!(r.group_order(), Some(order));
}

fn tag(r: &GaloisReport) -> GroupTag {
    r.descriptor.as_ref().unwrap().tag
}

/// `(point, multiplicity)` pairs cut on a line, sorted.
fn cut(c: &PlaneCurve, l: &ProjLine) -> Vec<(ProjPoint, u32)> {
    let mut v = c.line_intersection_divisor(l, 12).unwrap().points().to_vec();
    v.sort();
    v
}

/// The reported noncommuting pair, re-checked on the group elements.
fn pair_fails_to_commute(v: &FamilyVerdict) {
    let (i, k) = v.joint.as_ref().unwrap().noncommuting_pair.expect("a noncommuting pair");
    let g = |r: &GaloisReport| r.group.as_ref().unwrap().projective().unwrap().clone();
    let (a, b) = (g(inner(v)), g(outer(v)));
    let w = common_field(a.identity().field(), b.identity().field()).unwrap();
    let (a, b) = (a.lift(&w).unwrap(), b.lift(&w).unwrap());
    let (s, t) = (&a.elements()[i], &b.elements()[k]);
    assert_ne!(s.compose(t), t.compose(s));
}

#[test]
fn criterion_01_branch_certificates() {
    for base in ["13", "7"] {
        criterion(1, &format!("branch d = 3 over F_{base}"), secs(1), || {
            let f = field(base);
            let cert = branch_certificate(3, &f).unwrap();
            let v = &cert.values;
            let e = |n: i64| f.from_i64(n);
            assert_eq!((v.c, v.a, v.beta_power), (e(-2), e(-8), e(27)));
            assert!(cert.identity_holds);
            let lhs = parse_polynomial("y^2*x+(x+1)^2*(x-8)", &f, 2).unwrap();
            let rhs = parse_polynomial("y^2*x-27*x+(x-2)^3", &f, 2).unwrap();
            assert_eq!(lhs, rhs);
            // β lives in F_49 over F_7, where 27 is a non-residue
            let w = field(&cert.field);
            assert_eq!(w.k(), if base == "7" { 2 } else { 1 });
            assert_eq!(w.pow(v.beta, 2), galpoint::gf::embed(&f, &w, e(27)).unwrap());
        });
        criterion(1, &format!("branch d = 4 over F_{base}"), secs(1), || {
            let f = field(base);
            let cert = branch_certificate(4, &f).unwrap();
            let v = &cert.values;
            let e = |n: i64| f.from_i64(n);
            assert_eq!((v.d0, v.a, v.c, v.beta_power), (Some(e(-3)), e(9), e(6), e(-64)));
            assert!(cert.identity_holds);
            let lhs = parse_polynomial("y^3*x+(x+1)^3*(x+9)", &f, 2).unwrap();
            let rhs = parse_polynomial("y^3*x+64*x+(x^2+6*x-3)^2", &f, 2).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(f.pow(v.beta, 3), e(-64));
        });
    }
}

#[test]
fn criterion_02_cubic_gives_s3() {
    criterion(2, "thm3_cubic over F_13", secs(5), || {
        let (c, _, v) = verified(FamilySpec::Thm3Cubic { field: "13".into() });
        certified(inner(&v), 2);
        certified(outer(&v), 3);
        assert_eq!(outer(&v).method, Method::Deck);
        let j = v.joint.as_ref().unwrap();
        assert_eq!(j.joint_order, 6);
        assert_eq!(j.joint_descriptor.tag, GroupTag::S3);
        assert_eq!(j.classification, Classification::RightSemidirect);
        assert!(!j.all_commute);
        // ℓ_P is y = 0: a node at (-1:0:1) and one smooth point (8:0:1)
        let f = c.field().clone();
        let pts = cut(&c, &ProjLine::from_i64s(&f, [0, 1, 0]).unwrap());
        let smooth: Vec<_> = pts.iter().filter(|(p, _)| c.multiplicity_at(p).unwrap() == 1).collect();
        assert_eq!(smooth.len(), 1);
        assert_eq!(smooth[0].0, ProjPoint::from_i64s(&f, &[8, 0, 1]).unwrap());
    });
}

#[test]
fn criterion_03_quartic_gives_a4() {
    criterion(3, "thm3_quartic over F_13", secs(10), || {
        let (c, _, v) = verified(FamilySpec::Thm3Quartic { field: "13".into() });
        certified(inner(&v), 3);
        certified(outer(&v), 4);
        assert_eq!(tag(outer(&v)), GroupTag::Klein);
        let j = v.joint.as_ref().unwrap();
        assert_eq!(j.joint_order, 12);
        assert_eq!(j.joint_descriptor.tag, GroupTag::A4);
        assert_eq!(j.classification, Classification::RightSemidirect);
        let f = c.field().clone();
        let pts = cut(&c, &ProjLine::from_i64s(&f, [0, 1, 0]).unwrap());
        let worst = pts.iter().map(|(p, _)| c.multiplicity_at(p).unwrap()).max().unwrap();
        assert_eq!(worst, 3);
        assert_eq!(c.multiplicity_at(&ProjPoint::from_i64s(&f, &[-1, 0, 1]).unwrap()).unwrap(), 3);
    });
}

#[test]
fn criterion_04_a4_round_trip() {
    criterion(4, "A4 embedding over F_13", secs(30), || {
        let f = field("13");
        let (g1, g2, p) = a4_data(&f).unwrap();
        assert_eq!((g1.order(), g2.order()), (3, 4));
        assert_eq!(galpoint::embedder::pgl2_elements(&f).len(), 2184);
        assert!(!check_condition_b(&g1, &g2, &p).unwrap().is_empty());
        let e = construct_embedding(&g1, &g2, &p, &RunConfig::default()).unwrap();
        assert_eq!(e.curve.degree(), 4);
        certified(&e.inner_report, 3);
        certified(&e.outer_report, 4);
        assert_eq!(e.joint.joint_descriptor.tag, GroupTag::A4);
        assert!(e.converse_divisor_check);
    });
}

#[test]
fn criterion_05_tame_direct_products() {
    for (d, p) in [(4usize, 13u64), (5, 11), (6, 13)] {
        for c in [0u8, 1] {
            criterion(5, &format!("thm2_tame d = {d}, p = {p}, c = {c}"), secs(10), || {
                let (curve, _, v) = verified(FamilySpec::Thm2Tame { d, c, field: p.to_string() });
                certified(inner(&v), d - 1);
                certified(outer(&v), d);
                assert_eq!(v.joint.as_ref().unwrap().classification, Classification::Direct);
                let f = curve.field().clone();
                let pp = ProjPoint::from_i64s(&f, &[1, 0, 0]).unwrap();
                let qq = ProjPoint::from_i64s(&f, &[0, 1, 0]).unwrap();
                let pts = cut(&curve, &ProjLine::through(&pp, &qq).unwrap());
                assert_eq!(pts.len(), 1);
                assert_eq!(pts[0].1, d as u32);
                assert_eq!(pts[0].0.field_of_definition_degree(), 1);
                assert!(pts[0].0.coords()[1].is_zero() && pts[0].0.coords()[2].is_zero());
                let sing = curve.singular_points(12).unwrap();
                if c == 1 {
                    assert!(sing.is_empty());
                } else {
                    assert!(sing.contains(&ProjPoint::from_i64s(&f, &[0, 0, 1]).unwrap()));
                }
            });
        }
    }
}

#[test]
fn criterion_06_wild_member() {
    criterion(6, "thm2_wild p = 2, e = 2, m = 3 over F_16", secs(60), || {
        let f = field("2^4");
        let f4 = f.subfield_elements(2).unwrap();
        let g = additive_poly_from_subgroup(&f, &f4, 3).unwrap();
        assert!(g.is_additive());
        assert_eq!(g.exponents(), vec![4, 1]);
        assert!(g.scales_with_root_of_unity().unwrap());
        // ζ_3 y ↦ ζ_3 g(y) at every y
        let z = f.nth_root_of_unity(3).unwrap().unwrap();
        let u = g.to_upoly();
        assert!(f.elements().all(|y| u.eval(f.mul(z, y)) == f.mul(z, u.eval(y))));
        let (curve, _, v) = verified(g.wild_spec(1));
        assert_eq!(curve.degree(), 12);
        certified(inner(&v), 11);
        certified(outer(&v), 12);
        assert_eq!(inner(&v).method, Method::Collineation);
        assert_eq!(outer(&v).method, Method::Collineation);
    });
}

#[test]
fn criterion_07_additive_semidirect() {
    for normal_form in [false, true] {
        let name = if normal_form { "x - y^4 normal form" } else { "prop4 p = 2, e = 2 over F_4" };
        criterion(7, name, secs(10), || {
            let (curve, x, v) = verified(FamilySpec::Prop4 { p: 2, e: 2, normal_form, field: Some("2^2".into()) });
            certified(inner(&v), 3);
            certified(outer(&v), 4);
            assert_eq!(outer(&v).descriptor.as_ref().unwrap().elementary_abelian(), Some((2, 2)));
            let j = v.joint.as_ref().unwrap();
            assert_eq!(j.classification, Classification::RightSemidirect);
            assert!(!j.all_commute);
            pair_fails_to_commute(&v);
            let pts = cut(&curve, &ProjLine::through(&x.p, &x.q).unwrap());
            assert_eq!(pts.len(), 4);
            assert!(pts.iter().all(|(_, m)| *m == 1));
        });
    }
}

/// A cubic or quartic over `f` with random coefficients and nonzero `x^d`, `y^d`.
fn random_curve(f: &Field, d: u16, rng: &mut ChaCha8Rng) -> Option<PlaneCurve> {
    let mut terms: Vec<(Mono, Fq)> = Vec::new();
    for i in 0..=d {
        for j in 0..=(d - i) {
            let mut m: Mono = [0; 6];
            m[0] = i;
            m[1] = j;
            let c = if i + j == d && (i == 0 || j == 0) { f.random_nonzero(rng) } else { f.random(rng) };
            terms.push((m, c));
        }
    }
    curve_from_affine(&Polynomial::from_terms(f, 2, terms)).ok()
}

#[test]
fn criterion_08_monte_carlo_against_brute_collineations() {
    criterion(8, "20 random cubics and quartics over F_7", secs(60), || {
        let f = field("7");
        let cfg = RunConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let (mut refuted, mut probable, mut agreeing) = (0, 0, 0);
        let mut done = 0;
        while done < 20 {
            let d = rng.gen_range(3u16..=4);
            let Some(c) = random_curve(&f, d, &mut rng) else { continue };
            let center = ProjPoint::new(&f, &[f.random(&mut rng), f.random(&mut rng), f.random(&mut rng)]);
            let Ok(center) = center else { continue };
            if classify_center(&c, &center).unwrap() == PointClass::Invalid {
                continue;
            }
            done += 1;
            let fib = fiber_polynomial(&c, &center).unwrap();
            let mc = monte_carlo_galois(&fib, cfg.trials, done).unwrap();
            let brute = central_collineation_group(&c, &center, CollineationMode::Brute { q_cap: cfg.brute_q_cap }).unwrap();
            match mc.verdict {
                Verdict::CertifiedNotGalois => {
                    refuted += 1;
                    let w = mc.witness.as_ref().unwrap();
                    assert!(verify_witness(&fib, w).unwrap());
                    // re-specialize by hand and refactor
                    let ext = Field::parse_spec(&w.field).unwrap();
                    let t0 = ext.from_index(w.t0_index).unwrap();
                    let u = fib.poly.lift(&ext).unwrap().eval_var(0, t0).to_upoly(1).unwrap();
                    assert_eq!(u.degree(), fib.degree);
                    let mut degs = u.factor_degrees();
                    degs.sort_unstable();
                    assert_ne!(degs.first(), degs.last());
                    // a refuted point has no full collineation group
                    assert!(brute.order() < fib.degree);
                }
                Verdict::ProbablyGalois => {
                    probable += 1;
                    if brute.order() == fib.degree {
                        agreeing += 1;
                    }
                }
                other => panic!("unexpected Monte Carlo verdict {other}"),
            }
        }
        eprintln!("  {refuted} refuted with witnesses, {probable} probably Galois ({agreeing} confirmed by collineations)");
        assert!(refuted > 0);
        // random centers are rarely Galois; known ones exercise the other branch
        for d in [3usize, 4] {
            let (c, x) = build_family(&FamilySpec::Thm2Tame { d, c: 1, field: "7".into() }).unwrap();
            for pt in [&x.p, &x.q] {
                let fib = fiber_polynomial(&c, pt).unwrap();
                let mc = monte_carlo_galois(&fib, cfg.trials, 1).unwrap();
                assert_eq!(mc.verdict, Verdict::ProbablyGalois);
                let brute = central_collineation_group(&c, pt, CollineationMode::Brute { q_cap: cfg.brute_q_cap }).unwrap();
                assert_eq!(brute.order(), fib.degree);
            }
        }
    });
}

#[test]
fn criterion_09_gk_curve() {
    criterion(9, "GK curve q = 2 over F_64", secs(120), || {
        let (c, _, v) = verified(FamilySpec::Gk { q: 2, field: None });
        assert_eq!(c.degree(), 9);
        certified(inner(&v), 8);
        certified(outer(&v), 9);
        assert_eq!(v.p, vec!["1", "0", "0"]);
        assert_eq!(v.q, vec!["0", "1", "0"]);
        let j = v.joint.as_ref().unwrap();
        assert!(!j.g2_normal);
        assert_eq!(j.classification, Classification::LeftSemidirect);
    });
}

/// Every `proptest!` block in the property suites asks for at least 500 cases,
/// and each module has a suite. Whether they pass is reported by the same
/// `cargo test` run that executes this file.
#[test]
fn criterion_10_property_suites_are_configured() {
    criterion(10, "property suites", secs(5), || {
        let suites = [
            ("gf", include_str!("gf_props.rs")),
            ("polyring", include_str!("polyring_props.rs")),
            ("projective", include_str!("projective_props.rs")),
            ("curve", include_str!("curve_props.rs")),
            ("galois", include_str!("galois_props.rs")),
            ("embedder", include_str!("embedder_props.rs")),
            ("families", include_str!("families_props.rs")),
        ];
        for (name, src) in suites {
            let blocks = src.matches("proptest! {").count();
            assert!(blocks >= 1, "{name}: no property block");
            let cases: Vec<u32> = src
                .match_indices("with_cases(")
                .map(|(i, _)| {
                    let rest = &src[i + "with_cases(".len()..];
                    rest[..rest.find(')').unwrap()].parse().unwrap()
                })
                .collect();
            assert_eq!(cases.len(), blocks, "{name}: every block sets its case count");
            assert!(cases.iter().all(|&n| n >= 500), "{name}: {cases:?}");
        }
    });
}
