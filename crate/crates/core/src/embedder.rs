//! Plane models of P¹ with prescribed Galois groups: given finite groups
//! `G1, G2 ⊂ PGL(2)` and a point `P` with
//! `P + Σ_{σ∈G1} σ(η(P)) = Σ_{τ∈G2} τ(P)` for some `η ∈ G2`, the map
//! `t ↦ (f(t) : g(t) : 1)` with `k(t)^{G1} = k(f)`, `k(t)^{G2} = k(g)` embeds
//! P¹ as a curve of degree `|G2|` with an inner Galois point `(0:1:0)` and an
//! outer Galois point `(1:0:0)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::curve::{curve_from_affine, CurveSummary, PlaneCurve};
use crate::error::{Error, Result};
use crate::galois::{is_galois_point, joint_structure, GaloisReport, RunConfig, Strategy};
use crate::gf::Field;
use crate::polyring::{resultant, splitting_roots, Polynomial, UPoly};
use crate::projective::{
    common_field, generate_group, orbit, FiniteProjectivityGroup, GroupElement, PointDivisor, ProductReport,
    ProjPoint, Projectivity,
};

pub use crate::galois::{Parametrization, RationalMap1D};

#[derive(Clone, Debug)]
pub struct ConditionBWitness {
    pub eta: Projectivity,
    pub lhs: PointDivisor,
    pub rhs: PointDivisor,
}

impl Serialize for ConditionBWitness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ConditionBWitness", 3)?;
        st.serialize_field("eta", &self.eta)?;
        st.serialize_field("lhs", &self.lhs.to_json())?;
        st.serialize_field("rhs", &self.rhs.to_json())?;
        st.end()
    }
}

/// Every `η ∈ G2` (in element order) with `P + Σ_{G1} σ(η(P)) = Σ_{G2} τ(P)`.
pub fn check_condition_b(
    g1: &FiniteProjectivityGroup,
    g2: &FiniteProjectivityGroup,
    p: &ProjPoint,
) -> Result<Vec<ConditionBWitness>> {
    let f = common_field(&common_field(g1.identity().field(), g2.identity().field())?, p.field())?;
    let (g1, g2, p) = (g1.lift(&f)?, g2.lift(&f)?, p.lift(&f)?);
    let rhs = orbit(&g2, &p)?;
    let single = PointDivisor::new([(p.clone(), 1)])?;
    let mut out = Vec::new();
    for eta in g2.elements() {
        let lhs = single.add(&orbit(&g1, &eta.apply(&p)?)?)?;
        if lhs.same_as(&rhs)? {
            out.push(ConditionBWitness {
                eta: eta.clone(),
                lhs,
                rhs: rhs.clone(),
            });
        }
    }
    Ok(out)
}

fn add_maps(a: &RationalMap1D, b: &RationalMap1D) -> Result<RationalMap1D> {
    RationalMap1D::new(
        a.num().mul(b.den()).add(&b.num().mul(a.den())),
        a.den().mul(b.den()),
    )
}

/// `Σ_{σ∈G} σ(t)^j`.
fn power_sum(g: &FiniteProjectivityGroup, j: u64) -> Result<RationalMap1D> {
    let f = g.identity().field();
    let mut acc = RationalMap1D::polynomial(UPoly::zero(f));
    for s in g.elements() {
        let num = UPoly::new(f, vec![s.entry(0, 1), s.entry(0, 0)]).pow(j);
        let den = UPoly::new(f, vec![s.entry(1, 1), s.entry(1, 0)]).pow(j);
        acc = add_maps(&acc, &RationalMap1D::new(num, den)?)?;
    }
    Ok(acc)
}

/// A generator `f` of the invariant field of `G` whose pole divisor is the
/// orbit sum `Σ_{σ∈G} σ(Q0)`.
pub fn invariant_generator(g: &FiniteProjectivityGroup, q0: &ProjPoint) -> Result<RationalMap1D> {
    let field = common_field(g.identity().field(), q0.field())?;
    let g = g.lift(&field)?;
    let q0 = q0.lift(&field)?;
    let n = g.order();
    for j in 1..=(2 * n as u64) {
        let fj = power_sum(&g, j)?;
        if fj.degree() != n || fj.is_constant() {
            continue;
        }
        return match fj.eval(q0.affine_t()) {
            Some(v) => {
                let shifted = fj.num().sub(&fj.den().scale(v));
                RationalMap1D::new(fj.den().clone(), shifted)
            }
            None => Ok(fj),
        };
    }
    Err(Error::LadderExhausted { order: n })
}

/// Poles of `f` with multiplicities, over the splitting field of its denominator.
pub fn pole_divisor(f: &RationalMap1D, ext_cap: usize) -> Result<PointDivisor> {
    let base = f.field();
    let roots = if f.den().is_constant() {
        None
    } else {
        Some(splitting_roots(f.den(), ext_cap)?)
    };
    let ext = roots.as_ref().map(|r| r.ext.clone()).unwrap_or_else(|| base.clone());
    let mut pts: Vec<(ProjPoint, u32)> = roots
        .map(|r| r.roots.iter().map(|&(a, m)| (ProjPoint::affine_line(&r.ext, a), m)).collect())
        .unwrap_or_default();
    let (dn, dd) = (f.num().degree(), f.den().degree());
    if dn > dd {
        pts.push((ProjPoint::infinity_p1(&ext), (dn - dd) as u32));
    }
    PointDivisor::new(pts)
}

/// Divisor cut on the parameter line by `Z = 0` (the line at infinity).
pub fn pullback_of_line_at_infinity(param: &Parametrization, ext_cap: usize) -> Result<PointDivisor> {
    let h = param.homogeneous();
    let m = h.iter().map(|u| u.degree()).max().unwrap();
    let z = &h[2];
    let roots = splitting_roots(z, ext_cap)?;
    let mut pts: Vec<(ProjPoint, u32)> =
        roots.roots.iter().map(|&(a, e)| (ProjPoint::affine_line(&roots.ext, a), e)).collect();
    if m > z.degree() {
        pts.push((ProjPoint::infinity_p1(&roots.ext), (m - z.degree()) as u32));
    }
    PointDivisor::new(pts)
}

const IMPLICIT_SAMPLES: usize = 20;

/// The curve traced by `t ↦ (f(t), g(t))`, from `Res_t(N_f − x D_f, N_g − y D_g)`.
pub fn implicitize(f: &RationalMap1D, g: &RationalMap1D, expected_degree: Option<usize>) -> Result<PlaneCurve> {
    if f.is_constant() || g.is_constant() {
        return Err(Error::InvalidInput("implicitization needs nonconstant maps".into()));
    }
    let field = common_field(f.field(), g.field())?;
    let (f, g) = (f.lift(&field)?, g.lift(&field)?);
    let lift = |u: &UPoly| Polynomial::from_upoly(u, 3, 2);
    let x = Polynomial::var(&field, 3, 0);
    let y = Polynomial::var(&field, 3, 1);
    let a = &lift(f.num()) - &(&x * &lift(f.den()));
    let b = &lift(g.num()) - &(&y * &lift(g.den()));
    let r = resultant(&a, &b, 2)?.restrict_vars(2).normalized();
    let curve = match curve_from_affine(&r) {
        Ok(c) => c,
        Err(Error::NotSquarefree) => {
            return Err(Error::DegreeMismatch {
                expected: expected_degree.unwrap_or(0),
                found: r.total_degree(),
            })
        }
        Err(e) => return Err(e),
    };
    if let Some(d) = expected_degree {
        if curve.degree() != d {
            return Err(Error::DegreeMismatch {
                expected: d,
                found: curve.degree(),
            });
        }
    }
    let param = Parametrization::new(f, g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d);
    for _ in 0..IMPLICIT_SAMPLES {
        let t = field.random(&mut rng);
        if !curve.contains(&param.point_at(Some(t)))? {
            return Err(Error::VerificationFailed("implicit equation misses a sampled point".into()));
        }
    }
    Ok(curve)
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingResult {
    pub f: RationalMap1D,
    pub g: RationalMap1D,
    #[serde(serialize_with = "ser_curve")]
    pub curve: PlaneCurve,
    #[serde(serialize_with = "ser_point")]
    pub image_p: ProjPoint,
    #[serde(serialize_with = "ser_point")]
    pub q: ProjPoint,
    pub witness: ConditionBWitness,
    pub witness_count: usize,
    pub inner_report: GaloisReport,
    pub outer_report: GaloisReport,
    pub joint: ProductReport,
    /// `Z = 0` pulls back to `Σ_{τ∈G2} τ(P)`.
    pub converse_divisor_check: bool,
}

fn ser_point<S: Serializer>(p: &ProjPoint, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.to_strings().serialize(s)
}

fn ser_curve<S: Serializer>(c: &PlaneCurve, s: S) -> std::result::Result<S::Ok, S::Error> {
    let summary: CurveSummary = c.summary();
    summary.serialize(s)
}

pub fn construct_embedding(
    g1: &FiniteProjectivityGroup,
    g2: &FiniteProjectivityGroup,
    p: &ProjPoint,
    cfg: &RunConfig,
) -> Result<EmbeddingResult> {
    if g2.order() < 2 {
        return Err(Error::InvalidInput("G2 must be nontrivial".into()));
    }
    let witnesses = check_condition_b(g1, g2, p)?;
    let Some(w) = witnesses.first().cloned() else {
        return Err(Error::ConditionBFails);
    };
    let field = w.eta.field().clone();
    let (g1, g2, p) = (g1.lift(&field)?, g2.lift(&field)?, p.lift(&field)?);
    let f = invariant_generator(&g1, &w.eta.apply(&p)?)?;
    let g = invariant_generator(&g2, &p)?;
    let curve = implicitize(&f, &g, Some(g2.order()))?;
    let param = Parametrization::new(f.clone(), g.clone())?;
    let image_p = ProjPoint::new(&field, &[field.zero(), field.one(), field.zero()])?;
    let q = ProjPoint::new(&field, &[field.one(), field.zero(), field.zero()])?;
    let strategy = Strategy::Deck(param.clone());
    let inner = is_galois_point(&curve, &image_p, &strategy, cfg)?;
    if !inner.is_certified() || inner.group_order() != Some(g1.order()) {
        return Err(Error::VerificationFailed("inner Galois point".into()));
    }
    let outer = is_galois_point(&curve, &q, &strategy, cfg)?;
    if !outer.is_certified() || outer.group_order() != Some(g2.order()) {
        return Err(Error::VerificationFailed("outer Galois point".into()));
    }
    let joint = joint_structure(&curve, &inner, &outer, cfg.closure_cap)?;
    let converse = pullback_of_line_at_infinity(&param, cfg.ext_cap)?.same_as(&orbit(&g2, &p)?)?;
    Ok(EmbeddingResult {
        f,
        g,
        curve,
        image_p,
        q,
        witness: w,
        witness_count: witnesses.len(),
        inner_report: inner,
        outer_report: outer,
        joint,
        converse_divisor_check: converse,
    })
}

/// Every element of `PGL(2, F)`, as normalized matrices in index order.
pub fn pgl2_elements(field: &Field) -> Vec<Projectivity> {
    let els: Vec<_> = field.elements().collect();
    let (o, l) = (field.zero(), field.one());
    let mut out = Vec::new();
    for &b in &els {
        for &c in &els {
            for &d in &els {
                if let Ok(m) = Projectivity::new(field, 2, &[l, b, c, d]) {
                    out.push(m);
                }
            }
        }
    }
    for &c in &els {
        for &d in &els {
            if let Ok(m) = Projectivity::new(field, 2, &[o, l, c, d]) {
                out.push(m);
            }
        }
    }
    out
}

fn fixed_points(s: &Projectivity) -> Vec<ProjPoint> {
    let f = s.field();
    std::iter::once(ProjPoint::infinity_p1(f))
        .chain(f.elements().map(|a| ProjPoint::affine_line(f, a)))
        .filter(|x| s.apply(x).ok().as_ref() == Some(x))
        .collect()
}

/// Data `(G1, G2, P)` generating `A4 = G1 ⋉ G2`: `G2` a Klein four-group,
/// `G1` of order 3 normalizing it and fixing the rational point `P`.
pub fn a4_data(field: &Field) -> Result<(FiniteProjectivityGroup, FiniteProjectivityGroup, ProjPoint)> {
    let all = pgl2_elements(field);
    let id = Projectivity::identity(field, 2);
    let invols: Vec<&Projectivity> = all.iter().filter(|s| s.order() == 2).collect();
    let threes: Vec<&Projectivity> = all.iter().filter(|s| s.order() == 3).collect();
    for (i, a) in invols.iter().enumerate() {
        for b in &invols[i + 1..] {
            if a.compose(b) != b.compose(a) {
                continue;
            }
            let v = generate_group(&id, &[(*a).clone(), (*b).clone()], 8)?;
            if v.order() != 4 {
                continue;
            }
            for s in &threes {
                let normalizes = v.elements().iter().all(|x| v.contains(&x.conjugate_by(s)));
                if !normalizes {
                    continue;
                }
                if let Some(p) = fixed_points(s).into_iter().next() {
                    let g1 = generate_group(&id, &[(*s).clone()], 3)?;
                    return Ok((g1, v, p));
                }
            }
        }
    }
    Err(Error::FieldTooSmall(format!("no A4 with a rational fixed point in PGL(2, {})", field.spec())))
}

/// Data `(G1, G2, P)` generating `S3`: `G2 = ⟨τ⟩` of order 3, `G1 = ⟨σ⟩` with
/// `στσ = τ^{-1}`, and `P` fixed by `σ` but not by `τ`.
pub fn s3_data(field: &Field) -> Result<(FiniteProjectivityGroup, FiniteProjectivityGroup, ProjPoint)> {
    let all = pgl2_elements(field);
    let id = Projectivity::identity(field, 2);
    for tau in all.iter().filter(|s| s.order() == 3) {
        let tinv = tau.inverse();
        for sigma in all.iter().filter(|s| s.order() == 2) {
            if sigma.compose(tau).compose(sigma) != tinv {
                continue;
            }
            let fixed_tau = fixed_points(tau);
            if let Some(p) = fixed_points(sigma).into_iter().find(|x| !fixed_tau.contains(x)) {
                let g1 = generate_group(&id, std::slice::from_ref(sigma), 2)?;
                let g2 = generate_group(&id, std::slice::from_ref(tau), 3)?;
                return Ok((g1, g2, p));
            }
        }
    }
    Err(Error::FieldTooSmall(format!("no S3 with a rational fixed point in PGL(2, {})", field.spec())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::polyring::parse_polynomial;
    use crate::projective::{Classification, GroupTag};

    fn up(f: &Field, c: &[i64]) -> UPoly {
        UPoly::from_i64s(f, c)
    }

    #[test]
    fn reflection_invariant() {
        let f = make_field(13, 1).unwrap();
        let id = Projectivity::identity(&f, 2);
        let neg = Projectivity::from_i64s(&f, 2, &[-1, 0, 0, 1]).unwrap();
        let g = generate_group(&id, &[neg], 4).unwrap();
        let h = invariant_generator(&g, &ProjPoint::infinity_p1(&f)).unwrap();
        assert_eq!(h, RationalMap1D::polynomial(up(&f, &[0, 0, 2])));
    }

    #[test]
    fn translation_invariant_is_artin_schreier() {
        let f = make_field(5, 1).unwrap();
        let id = Projectivity::identity(&f, 2);
        let tr = Projectivity::from_i64s(&f, 2, &[1, 1, 0, 1]).unwrap();
        let g = generate_group(&id, &[tr], 8).unwrap();
        let h = invariant_generator(&g, &ProjPoint::infinity_p1(&f)).unwrap();
        // a nonzero multiple of t^5 - t
        let base = up(&f, &[0, -1, 0, 0, 0, 1]);
        assert!(h.den().is_constant());
        assert_eq!(h.num().monic(), base);
    }

    #[test]
    fn trivial_group_gives_inverse() {
        let f = make_field(7, 1).unwrap();
        let g = FiniteProjectivityGroup::trivial(&Projectivity::identity(&f, 2));
        let h = invariant_generator(&g, &ProjPoint::affine_line(&f, f.zero())).unwrap();
        assert_eq!(h, RationalMap1D::new(up(&f, &[1]), up(&f, &[0, 1])).unwrap());
    }

    #[test]
    fn conic_from_square() {
        let f = make_field(11, 1).unwrap();
        let c = implicitize(
            &RationalMap1D::polynomial(up(&f, &[0, 0, 1])),
            &RationalMap1D::polynomial(up(&f, &[0, 1])),
            Some(2),
        )
        .unwrap();
        let expect = parse_polynomial("y^2-x", &f, 2).unwrap();
        assert_eq!(c.affine().normalized(), expect.normalized());
    }

    #[test]
    fn two_element_condition_b() {
        let f = make_field(13, 1).unwrap();
        let id = Projectivity::identity(&f, 2);
        let neg = Projectivity::from_i64s(&f, 2, &[-1, 0, 0, 1]).unwrap();
        let g1 = FiniteProjectivityGroup::trivial(&id);
        let g2 = generate_group(&id, std::slice::from_ref(&neg), 4).unwrap();
        let p = ProjPoint::affine_line(&f, f.one());
        let w = check_condition_b(&g1, &g2, &p).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].eta, neg);
        let e = construct_embedding(&g1, &g2, &p, &RunConfig::default()).unwrap();
        assert_eq!(e.curve.degree(), 2);
        assert_eq!(e.outer_report.group_order(), Some(2));
        assert!(e.converse_divisor_check);
    }

    #[test]
    fn a4_round_trip() {
        let f = make_field(13, 1).unwrap();
        let (g1, g2, p) = a4_data(&f).unwrap();
        assert_eq!((g1.order(), g2.order()), (3, 4));
        let w = check_condition_b(&g1, &g2, &p).unwrap();
        assert!(!w.is_empty());
        let e = construct_embedding(&g1, &g2, &p, &RunConfig::default()).unwrap();
        assert_eq!(e.curve.degree(), 4);
        assert_eq!(e.joint.joint_order, 12);
        assert_eq!(e.joint.joint_descriptor.tag, GroupTag::A4);
        assert_eq!(e.joint.classification, Classification::RightSemidirect);
        assert!(e.converse_divisor_check);
    }

    #[test]
    fn s3_round_trip() {
        let f = make_field(13, 1).unwrap();
        let (g1, g2, p) = s3_data(&f).unwrap();
        let e = construct_embedding(&g1, &g2, &p, &RunConfig::default()).unwrap();
        assert_eq!(e.curve.degree(), 3);
        assert_eq!(e.joint.joint_descriptor.tag, GroupTag::S3);
    }
}
