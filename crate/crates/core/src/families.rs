//! Curve families with two Galois points, the additive polynomials behind
//! the wild case, and the coefficient systems that pin down the singular
//! normal forms.

use std::collections::BTreeSet;
use std::fmt::Display;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::curve::{curve_from_affine, CurveSummary, PlaneCurve, SingularPointJson};
use crate::error::{Error, Result};
use crate::galois::{
    is_galois_point, joint_structure, lemma_line, AffinePlaneMap, GaloisReport, LemmaLine, Parametrization,
    RationalMap1D, RunConfig, Strategy,
};
use crate::gf::{Field, Fq};
use crate::polyring::{parse_polynomial, Polynomial, UPoly};
use crate::projective::{Classification, GroupTag, ProductReport, ProjLine, ProjPoint};

/// Largest extension degree taken when a family needs more roots of unity.
const FAMILY_EXTENSION_CAP: u64 = 12;

/// A member of one of the classified families, as read from a spec file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `x^{d-1} + y^d + c = 0`.
    Thm2Tame { d: usize, c: u8, field: String },
    /// `x^{d-1} + (Σ α_i y^{p^i})^m + c = 0` with `d = p^e m`; `alphas` lists
    /// `α_0, …, α_e` as field elements in text form.
    Thm2Wild {
        p: u64,
        e: u32,
        m: usize,
        alphas: Vec<String>,
        c: u8,
        field: String,
    },
    /// `y²x + (x+1)²(x−8) = 0`.
    Thm3Cubic {
        #[serde(default = "default_thm3_field")]
        field: String,
    },
    /// `y³x + (x+1)³(x+9) = 0`.
    Thm3Quartic {
        #[serde(default = "default_thm3_field")]
        field: String,
    },
    /// `y^{d-1}x + (x+1)^d = 0` with `d = p^e`, or its normal form `x − y^d`.
    Prop4 {
        p: u64,
        e: u32,
        #[serde(default)]
        normal_form: bool,
        field: Option<String>,
    },
    /// `x^{q³} + x − (x^q + x)^{q²−q+1} − y^{q³+1} = 0`.
    Gk { q: u64, field: Option<String> },
}

fn default_thm3_field() -> String {
    "13".into()
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Thm2Tame { .. } => "thm2_tame",
            FamilySpec::Thm2Wild { .. } => "thm2_wild",
            FamilySpec::Thm3Cubic { .. } => "thm3_cubic",
            FamilySpec::Thm3Quartic { .. } => "thm3_quartic",
            FamilySpec::Prop4 { .. } => "prop4",
            FamilySpec::Gk { .. } => "gk",
        }
    }
}

/// Shape of the divisor cut by the line through the two points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineShape {
    /// `d·P`.
    DTimesP,
    /// `d` distinct points.
    DDistinct,
    /// Only the general predicate: one point or `d` points.
    OneOrD,
}

/// What a family member is supposed to satisfy.
#[derive(Clone, Debug)]
pub struct FamilyExpectation {
    pub family: FamilySpec,
    pub p: ProjPoint,
    pub q: ProjPoint,
    pub inner_strategy: Strategy,
    pub outer_strategy: Strategy,
    pub inner_order: usize,
    pub outer_order: usize,
    pub inner_tag: Option<GroupTag>,
    pub outer_tag: Option<GroupTag>,
    /// `(p, e)` with `G_Q ≅ (Z/p)^e`.
    pub outer_elementary_abelian: Option<(u64, u32)>,
    pub classification: Classification,
    pub joint_tag: Option<GroupTag>,
    pub g_q_normal: Option<bool>,
    pub noncommuting_pair: bool,
    pub line_pq: LineShape,
    /// The line `ℓ_P` through `Q` fixed pointwise by `G_P`.
    pub axis: Option<ProjLine>,
    pub axis_smooth_points: Option<usize>,
    pub axis_singular_multiplicity: Option<u32>,
    pub smooth: Option<bool>,
    pub singular_at: Option<ProjPoint>,
}

impl FamilyExpectation {
    fn new(family: &FamilySpec, p: ProjPoint, q: ProjPoint, inner: usize, outer: usize) -> FamilyExpectation {
        FamilyExpectation {
            family: family.clone(),
            p,
            q,
            inner_strategy: Strategy::Collineation,
            outer_strategy: Strategy::Collineation,
            inner_order: inner,
            outer_order: outer,
            inner_tag: None,
            outer_tag: None,
            outer_elementary_abelian: None,
            classification: Classification::Direct,
            joint_tag: None,
            g_q_normal: None,
            noncommuting_pair: false,
            line_pq: LineShape::OneOrD,
            axis: None,
            axis_smooth_points: None,
            axis_singular_multiplicity: None,
            smooth: None,
            singular_at: None,
        }
    }

    fn with_parametrization(mut self, param: Parametrization) -> FamilyExpectation {
        self.inner_strategy = Strategy::Deck(param.clone());
        self.outer_strategy = Strategy::Deck(param);
        self
    }
}

fn point(f: &Field, c: [i64; 3]) -> Result<ProjPoint> {
    ProjPoint::from_i64s(f, &c)
}

fn rmap(f: &Field, num: &[i64], den: &[i64]) -> Result<RationalMap1D> {
    RationalMap1D::new(UPoly::from_i64s(f, num), UPoly::from_i64s(f, den))
}

fn affine_curve(text: &str, f: &Field) -> Result<PlaneCurve> {
    curve_from_affine(&parse_polynomial(text, f, 2)?)
}

fn multiplicative_order_mod(q: u64, n: u64) -> u64 {
    let qn = q % n;
    (1..=n).find(|&j| arith::pow_mod(qn, j, n) == 1 % n).unwrap_or(n)
}

/// Smallest extension of `base` containing the `n`-th roots of unity for
/// every `n` in `ns` and splitting every polynomial in `split`.
pub fn field_with_roots(base: &Field, ns: &[u64], split: &[UPoly]) -> Result<Field> {
    let mut j = 1u64;
    for &n in ns {
        if n % base.p() == 0 {
            return Err(Error::PDividesN { p: base.p(), n });
        }
        j = arith::lcm(j, multiplicative_order_mod(base.order(), n));
    }
    for f in split {
        j = arith::lcm(j, f.splitting_degree() as u64);
    }
    if j > FAMILY_EXTENSION_CAP {
        return Err(Error::FieldTooSmall(format!(
            "{} needs an extension of degree {j} (cap {FAMILY_EXTENSION_CAP})",
            base.spec()
        )));
    }
    base.extension(j as usize)
}

fn parse_element(s: &str, f: &Field) -> Result<Fq> {
    parse_polynomial(s, f, 1)?
        .constant_value()
        .ok_or_else(|| Error::InvalidInput(format!("{s:?} is not a field element")))
}

/// The curve of a family member and what it should satisfy.
pub fn build_family(spec: &FamilySpec) -> Result<(PlaneCurve, FamilyExpectation)> {
    match spec {
        FamilySpec::Thm2Tame { d, c, field } => build_thm2_tame(spec, *d, *c, &Field::parse_spec(field)?),
        FamilySpec::Thm2Wild {
            p,
            e,
            m,
            alphas,
            c,
            field,
        } => build_thm2_wild(spec, *p, *e, *m, alphas, *c, &Field::parse_spec(field)?),
        FamilySpec::Thm3Cubic { field } => build_thm3(spec, 3, &Field::parse_spec(field)?),
        FamilySpec::Thm3Quartic { field } => build_thm3(spec, 4, &Field::parse_spec(field)?),
        FamilySpec::Prop4 {
            p,
            e,
            normal_form,
            field,
        } => {
            let d = arith::checked_pow(*p, *e as usize)
                .filter(|&d| d >= 3)
                .ok_or_else(|| Error::InvalidInput("prop4 needs 3 ≤ p^e < 2^63".into()))?;
            let f = match field {
                Some(s) => Field::parse_spec(s)?,
                None => Field::new(*p, *e as usize)?,
            };
            if f.p() != *p {
                return Err(Error::InvalidInput(format!("field {} has characteristic ≠ {p}", f.spec())));
            }
            build_prop4(spec, *p, *e, d, *normal_form, &f)
        }
        FamilySpec::Gk { q, field } => {
            let f = match field {
                Some(s) => Field::parse_spec(s)?,
                None => Field::new(2, 6)?,
            };
            build_gk(spec, *q, &f)
        }
    }
}

fn check_c(c: u8) -> Result<()> {
    if c > 1 {
        return Err(Error::InvalidInput(format!("c must be 0 or 1, got {c}")));
    }
    Ok(())
}

fn thm2_expectation(spec: &FamilySpec, w: &Field, d: usize, c: u8) -> Result<FamilyExpectation> {
    let mut x = FamilyExpectation::new(spec, point(w, [1, 0, 0])?, point(w, [0, 1, 0])?, d - 1, d);
    x.inner_tag = Some(if d == 2 { GroupTag::Trivial } else { GroupTag::Cyclic });
    x.line_pq = LineShape::DTimesP;
    x.axis = Some(ProjLine::from_i64s(w, [1, 0, 0])?);
    if c == 1 {
        x.smooth = Some(true);
    } else {
        x.smooth = Some(false);
        x.singular_at = Some(point(w, [0, 0, 1])?);
    }
    Ok(x)
}

fn build_thm2_tame(spec: &FamilySpec, d: usize, c: u8, base: &Field) -> Result<(PlaneCurve, FamilyExpectation)> {
    check_c(c)?;
    let p = base.p() as usize;
    if d < 3 || d.is_multiple_of(p) || (d - 1).is_multiple_of(p) {
        return Err(Error::InvalidInput(format!("thm2_tame needs d ≥ 3 and p ∤ d(d−1); d = {d}, p = {p}")));
    }
    let w = field_with_roots(base, &[d as u64 - 1, d as u64], &[])?;
    let curve = affine_curve(&format!("x^{}+y^{d}+{c}", d - 1), &w)?.structural();
    let mut x = thm2_expectation(spec, &w, d, c)?;
    x.outer_tag = Some(GroupTag::Cyclic);
    Ok((curve, x))
}

#[allow(clippy::too_many_arguments)]
fn build_thm2_wild(
    spec: &FamilySpec,
    p: u64,
    e: u32,
    m: usize,
    alphas: &[String],
    c: u8,
    base: &Field,
) -> Result<(PlaneCurve, FamilyExpectation)> {
    check_c(c)?;
    if base.p() != p || e == 0 || m == 0 || (m as u64).is_multiple_of(p) {
        return Err(Error::InvalidInput("thm2_wild needs the field characteristic p, e ≥ 1 and p ∤ m".into()));
    }
    if alphas.len() != e as usize + 1 {
        return Err(Error::InvalidInput(format!("expected {} coefficients α_0..α_e", e + 1)));
    }
    let a: Vec<Fq> = alphas.iter().map(|s| parse_element(s, base)).collect::<Result<_>>()?;
    if a[0].is_zero() || a[e as usize].is_zero() {
        return Err(Error::InvalidInput("α_0 and α_e must be nonzero".into()));
    }
    for (i, ai) in a.iter().enumerate().skip(1) {
        let pi = p.pow(i as u32);
        if !ai.is_zero() && !(pi - 1).is_multiple_of(m as u64) {
            return Err(Error::InvalidInput(format!("α_{i} ≠ 0 but {m} ∤ {p}^{i} − 1")));
        }
    }
    let pe = p.pow(e);
    let d = pe as usize * m;
    let mut gc = vec![base.zero(); pe as usize + 1];
    for (i, &ai) in a.iter().enumerate() {
        gc[p.pow(i as u32) as usize] = ai;
    }
    let g = UPoly::new(base, gc);
    let w = field_with_roots(base, &[d as u64 - 1, m as u64], std::slice::from_ref(&g))?;
    let gy = Polynomial::from_upoly(&g.lift(&w)?, 2, 1);
    let xpow = Polynomial::var(&w, 2, 0).pow(d as u64 - 1);
    let cst = Polynomial::constant(&w, 2, w.from_i64(c as i64));
    let curve = curve_from_affine(&(&(&xpow + &gy.pow(m as u64)) + &cst))?.structural();
    let mut x = thm2_expectation(spec, &w, d, c)?;
    // Smoothness of the wild members is not re-derived here.
    x.smooth = None;
    x.singular_at = None;
    Ok((curve, x))
}

fn build_thm3(spec: &FamilySpec, d: usize, f: &Field) -> Result<(PlaneCurve, FamilyExpectation)> {
    if f.p() == 2 || f.p() == 3 {
        return Err(Error::InvalidInput("thm3 families need p ∉ {2, 3}".into()));
    }
    let (text, param) = if d == 3 {
        (
            "y^2*x+(x+1)^2*(x-8)",
            Parametrization::new(rmap(f, &[8], &[1, 0, 1])?, rmap(f, &[0, 9, 0, 1], &[1, 0, 1])?)?,
        )
    } else {
        (
            "y^3*x+(x+1)^3*(x+9)",
            Parametrization::new(rmap(f, &[-9], &[1, 0, 0, 1])?, rmap(f, &[0, -8, 0, 0, 1], &[1, 0, 0, 1])?)?,
        )
    };
    let curve = affine_curve(text, f)?.structural();
    let mut x = FamilyExpectation::new(spec, point(f, [0, 1, 0])?, point(f, [1, 0, 0])?, d - 1, d)
        .with_parametrization(param);
    x.inner_tag = Some(GroupTag::Cyclic);
    x.outer_tag = Some(if d == 3 { GroupTag::Cyclic } else { GroupTag::Klein });
    x.classification = Classification::RightSemidirect;
    x.joint_tag = Some(if d == 3 { GroupTag::S3 } else { GroupTag::A4 });
    x.noncommuting_pair = true;
    x.line_pq = LineShape::DDistinct;
    x.axis = Some(ProjLine::from_i64s(f, [0, 1, 0])?);
    x.axis_smooth_points = Some(1);
    if d == 4 {
        x.axis_singular_multiplicity = Some(3);
    }
    Ok((curve, x))
}

fn build_prop4(
    spec: &FamilySpec,
    p: u64,
    e: u32,
    d: u64,
    normal_form: bool,
    f: &Field,
) -> Result<(PlaneCurve, FamilyExpectation)> {
    let q = d as usize;
    let (curve, pp, qq, param) = if normal_form {
        let mut tq = vec![0; q + 1];
        tq[q] = 1;
        (
            affine_curve(&format!("x-y^{q}"), f)?,
            point(f, [0, 0, 1])?,
            point(f, [1, 1, 0])?,
            Parametrization::new(rmap(f, &tq, &[1])?, rmap(f, &[0, 1], &[1])?)?,
        )
    } else {
        let mut den = vec![0; q];
        den[0] = 1;
        den[q - 1] = 1;
        let mut tq = vec![0; q + 1];
        tq[q] = 1;
        (
            affine_curve(&format!("y^{}*x+(x+1)^{q}", q - 1), f)?,
            point(f, [0, 1, 0])?,
            point(f, [1, 0, 0])?,
            Parametrization::new(rmap(f, &[-1], &den)?, rmap(f, &tq, &den)?)?,
        )
    };
    let mut x = FamilyExpectation::new(spec, pp, qq, q - 1, q).with_parametrization(param);
    x.outer_elementary_abelian = Some((p, e));
    x.classification = Classification::RightSemidirect;
    x.noncommuting_pair = true;
    x.line_pq = LineShape::DDistinct;
    Ok((curve.structural(), x))
}

/// Maps `(x, y) ↦ (x + b²y³/(x²+x+1) + c, y)` with `b ∈ F_4`, `c² + c = b³`:
/// the stabilizer of the inner point `(1:0:0)` on the `q = 2` curve.
pub fn gk_maps(field: &Field) -> Result<Vec<AffinePlaneMap>> {
    let f4 = field.subfield_elements(2)?;
    let p = |s: &str| parse_polynomial(s, field, 2);
    let den = p("x^2+x+1")?;
    let (x, y3) = (p("x")?, p("y^3")?);
    let mut maps = Vec::new();
    for &b in &f4 {
        let b3 = field.pow(b, 3);
        for &c in &f4 {
            if field.add(field.mul(c, c), c) != b3 {
                continue;
            }
            let xn = &(&(&x * &den) + &y3.scale(field.mul(b, b))) + &den.scale(c);
            maps.push(AffinePlaneMap::new(xn, &p("y")? * &den, den.clone())?);
        }
    }
    Ok(maps)
}

fn build_gk(spec: &FamilySpec, q: u64, f: &Field) -> Result<(PlaneCurve, FamilyExpectation)> {
    if q != 2 {
        return Err(Error::InvalidInput("only q = 2 is supported for the gk family".into()));
    }
    if f.p() != 2 || !f.k().is_multiple_of(6) {
        return Err(Error::FieldTooSmall(format!("gk(2) needs F_64 ⊂ F, got {}", f.spec())));
    }
    let curve = affine_curve("x^8+x-(x^2+x)^3-y^9", f)?.structural();
    let mut x = FamilyExpectation::new(spec, point(f, [1, 0, 0])?, point(f, [0, 1, 0])?, 8, 9);
    x.inner_strategy = Strategy::Birational(gk_maps(f)?);
    x.classification = Classification::LeftSemidirect;
    x.g_q_normal = Some(false);
    x.noncommuting_pair = true;
    Ok((curve, x))
}

/// One named comparison between an expected and a computed value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub found: String,
    pub pass: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn cmp(&mut self, name: &str, expected: impl Display, found: impl Display) {
        let (expected, found) = (expected.to_string(), found.to_string());
        self.0.push(Check {
            name: name.into(),
            pass: expected == found,
            expected,
            found,
        });
    }

    fn error(&mut self, name: &str, e: &Error) {
        self.0.push(Check {
            name: name.into(),
            expected: "no error".into(),
            found: e.to_string(),
            pass: false,
        });
    }
}

/// Everything computed for a family member, with the list of named checks.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyVerdict {
    pub family: FamilySpec,
    pub curve: CurveSummary,
    pub p: Vec<String>,
    pub q: Vec<String>,
    pub inner: Option<GaloisReport>,
    pub outer: Option<GaloisReport>,
    pub joint: Option<ProductReport>,
    pub lemma_line: Option<LemmaLine>,
    pub singular_points: Option<Vec<SingularPointJson>>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn galois_checks(ch: &mut Checks, side: &str, r: &GaloisReport, order: usize, tag: Option<GroupTag>) {
    ch.cmp(&format!("{side}_verdict"), "certified_galois", r.verdict);
    ch.cmp(&format!("{side}_order"), order, r.group_order().unwrap_or(0));
    if let Some(t) = tag {
        let found = r.descriptor.as_ref().map(|d| d.tag.to_string()).unwrap_or_else(|| "none".into());
        ch.cmp(&format!("{side}_descriptor"), t, found);
    }
}

fn fmt_opt<T: Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "none".into())
}

/// Recomputes every claim attached to a family member.
pub fn verify_family(curve: &PlaneCurve, x: &FamilyExpectation, cfg: &RunConfig) -> Result<FamilyVerdict> {
    let mut ch = Checks::default();
    let d = curve.degree();
    let inner = match is_galois_point(curve, &x.p, &x.inner_strategy, cfg) {
        Ok(r) => {
            ch.cmp("p_class", "inner", r.point_class);
            galois_checks(&mut ch, "inner", &r, x.inner_order, x.inner_tag);
            Some(r)
        }
        Err(e) => {
            ch.error("inner_report", &e);
            None
        }
    };
    let outer = match is_galois_point(curve, &x.q, &x.outer_strategy, cfg) {
        Ok(r) => {
            ch.cmp("q_class", "outer", r.point_class);
            galois_checks(&mut ch, "outer", &r, x.outer_order, x.outer_tag);
            if let Some((p, e)) = x.outer_elementary_abelian {
                let found = r.descriptor.as_ref().and_then(|d| d.elementary_abelian());
                ch.cmp("outer_elementary_abelian", format!("({p}, {e})"), fmt_opt(found.map(|(p, e)| format!("({p}, {e})"))));
            }
            Some(r)
        }
        Err(e) => {
            ch.error("outer_report", &e);
            None
        }
    };
    let mut joint = None;
    if let (Some(a), Some(b)) = (&inner, &outer) {
        if a.is_certified() && b.is_certified() {
            match joint_structure(curve, a, b, cfg.closure_cap) {
                Ok(j) => {
                    ch.cmp("joint_order", x.inner_order * x.outer_order, j.joint_order);
                    ch.cmp("joint_classification", x.classification, j.classification);
                    if let Some(t) = x.joint_tag {
                        ch.cmp("joint_descriptor", t, j.joint_descriptor.tag);
                    }
                    if let Some(n) = x.g_q_normal {
                        ch.cmp("g_q_normal", n, j.g2_normal);
                    }
                    if x.noncommuting_pair {
                        ch.cmp("noncommuting_pair", true, j.noncommuting_pair.is_some());
                    }
                    joint = Some(j);
                }
                Err(e) => ch.error("joint", &e),
            }
        }
    }
    let line = match lemma_line(curve, &x.p, &x.q, cfg.ext_cap) {
        Ok(l) => {
            ch.cmp("line_pq_support_is_1_or_d", true, l.is_1_or_d);
            match x.line_pq {
                LineShape::DTimesP => ch.cmp("line_pq_is_d_p", true, l.is_d_p),
                LineShape::DDistinct => ch.cmp("line_pq_distinct_points", d, l.support_size),
                LineShape::OneOrD => {}
            }
            Some(l)
        }
        Err(e) => {
            ch.error("line_pq", &e);
            None
        }
    };
    if let Some(axis) = &x.axis {
        axis_checks(&mut ch, curve, axis, x, inner.as_ref(), cfg);
    }
    let mut singular = None;
    if x.smooth.is_some() || x.singular_at.is_some() {
        match curve.singular_points(cfg.ext_cap) {
            Ok(s) => {
                if let Some(sm) = x.smooth {
                    ch.cmp("smooth", sm, s.is_empty());
                }
                if let Some(p) = &x.singular_at {
                    ch.cmp(&format!("singular_at_{p}"), true, s.contains(p));
                }
                singular = Some(s.to_json());
            }
            Err(e) => ch.error("singular_points", &e),
        }
    }
    let pass = ch.0.iter().all(|c| c.pass);
    Ok(FamilyVerdict {
        family: x.family.clone(),
        curve: curve.summary(),
        p: x.p.to_strings(),
        q: x.q.to_strings(),
        inner,
        outer,
        joint,
        lemma_line: line,
        singular_points: singular,
        checks: ch.0,
        pass,
    })
}

fn axis_checks(ch: &mut Checks, curve: &PlaneCurve, axis: &ProjLine, x: &FamilyExpectation, inner: Option<&GaloisReport>, cfg: &RunConfig) {
    ch.cmp("axis_contains_q", true, axis.contains(&x.q).unwrap_or(false));
    if let Some(g) = inner.and_then(|r| r.group.as_ref()).and_then(|g| g.projective()) {
        if g.identity().dim() == 3 {
            let (a, b) = axis.basis_points();
            let fixed = [&a, &b].iter().all(|pt| crate::galois::fixes_point(g, pt).unwrap_or(false));
            ch.cmp("axis_fixed_by_g_p", true, fixed);
        }
    }
    if x.axis_smooth_points.is_none() && x.axis_singular_multiplicity.is_none() {
        return;
    }
    match curve.line_intersection_divisor(axis, cfg.ext_cap) {
        Ok(div) => {
            let mut smooth = 0;
            let mut worst = 0;
            for (pt, _) in div.points() {
                match curve.multiplicity_at(pt) {
                    Ok(1) => smooth += 1,
                    Ok(m) => worst = worst.max(m),
                    Err(e) => return ch.error("axis_point_multiplicity", &e),
                }
            }
            if let Some(n) = x.axis_smooth_points {
                ch.cmp("axis_smooth_points", n, smooth);
            }
            if let Some(m) = x.axis_singular_multiplicity {
                ch.cmp("axis_singular_multiplicity", m, worst);
            }
        }
        Err(e) => ch.error("axis_divisor", &e),
    }
}

/// `g(y) = Σ_{i=0}^{e} α_i y^{p^i}`, the vanishing polynomial of an additive
/// subgroup of order `p^e`, together with an exponent `m | p^e − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditivePolynomial {
    field: Field,
    pub p: u64,
    pub e: u32,
    /// `α_0, …, α_e`.
    pub alphas: Vec<Fq>,
    pub m: u64,
}

impl AdditivePolynomial {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn to_upoly(&self) -> UPoly {
        let pe = self.p.pow(self.e) as usize;
        let mut c = vec![self.field.zero(); pe + 1];
        for (i, &a) in self.alphas.iter().enumerate() {
            c[self.p.pow(i as u32) as usize] = a;
        }
        UPoly::new(&self.field, c)
    }

    /// Exponents with nonzero coefficient, highest first.
    pub fn exponents(&self) -> Vec<u64> {
        let mut v: Vec<u64> = (0..=self.e)
            .filter(|&i| !self.alphas[i as usize].is_zero())
            .map(|i| self.p.pow(i))
            .collect();
        v.reverse();
        v
    }

    /// `g(y + z) = g(y) + g(z)` in `F[y, z]`.
    pub fn is_additive(&self) -> bool {
        let f = &self.field;
        let (y, z) = (Polynomial::var(f, 2, 0), Polynomial::var(f, 2, 1));
        let g = Polynomial::from_upoly(&self.to_upoly(), 2, 0);
        let gz = Polynomial::from_upoly(&self.to_upoly(), 2, 1);
        g.compose(&[&y + &z, z.clone()]) == &g + &gz
    }

    /// `g(ζy) = ζ g(y)` for a primitive `m`-th root of unity `ζ`.
    pub fn scales_with_root_of_unity(&self) -> Result<bool> {
        let f = &self.field;
        let Some(zeta) = f.nth_root_of_unity(self.m)? else {
            return Err(Error::FieldTooSmall(format!("no primitive {}-th root of unity in {}", self.m, f.spec())));
        };
        let g = self.to_upoly();
        Ok(g.compose(&UPoly::monomial(f, zeta, 1)) == g.scale(zeta))
    }

    pub fn alphas_text(&self) -> Vec<String> {
        self.alphas.iter().map(|&a| self.field.fmt_elem(a)).collect()
    }

    /// The wild family member `x^{d−1} + g(y)^m + c = 0` built from this polynomial.
    pub fn wild_spec(&self, c: u8) -> FamilySpec {
        FamilySpec::Thm2Wild {
            p: self.p,
            e: self.e,
            m: self.m as usize,
            alphas: self.alphas_text(),
            c,
            field: self.field.spec(),
        }
    }
}

impl Serialize for AdditivePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AdditivePolynomial", 6)?;
        st.serialize_field("field", &self.field.spec())?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("e", &self.e)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("alphas", &self.alphas_text())?;
        st.serialize_field("polynomial", &crate::galois::upoly_text(&self.to_upoly(), "y"))?;
        st.end()
    }
}

/// `Π_{α∈S} (y − α)` for an additive subgroup `S` stable under `ζ_m`.
pub fn additive_poly_from_subgroup(field: &Field, s: &[Fq], m: u64) -> Result<AdditivePolynomial> {
    let set: BTreeSet<Fq> = s.iter().copied().collect();
    let p = field.p();
    if !set.contains(&field.zero()) {
        return Err(Error::NotSubgroup("0 is missing".into()));
    }
    for &a in &set {
        for &b in &set {
            if !set.contains(&field.add(a, b)) {
                return Err(Error::NotSubgroup(format!(
                    "{} + {} is missing",
                    field.fmt_elem(a),
                    field.fmt_elem(b)
                )));
            }
        }
    }
    let n = set.len() as u64;
    let e = arith::factorize(n).first().map(|&(_, e)| e).unwrap_or(0);
    if p.pow(e) != n || e == 0 {
        return Err(Error::NotSubgroup(format!("order {n} is not a positive power of {p}")));
    }
    if m == 0 || !(n - 1).is_multiple_of(m) {
        return Err(Error::InvalidInput(format!("m = {m} does not divide {n} − 1")));
    }
    if m > 1 {
        let zeta = field
            .nth_root_of_unity(m)?
            .ok_or_else(|| Error::FieldTooSmall(format!("no primitive {m}-th root of unity in {}", field.spec())))?;
        if let Some(&a) = set.iter().find(|&&a| !set.contains(&field.mul(zeta, a))) {
            return Err(Error::ScalingUnstable(format!(
                "ζ = {} sends {} outside S",
                field.fmt_elem(zeta),
                field.fmt_elem(a)
            )));
        }
    }
    let g = set.iter().fold(UPoly::one(field), |acc, &a| acc.mul(&UPoly::linear(field, a)));
    let alphas: Vec<Fq> = (0..=e).map(|i| g.coeff(p.pow(i) as usize)).collect();
    let out = AdditivePolynomial {
        field: field.clone(),
        p,
        e,
        alphas,
        m,
    };
    if out.to_upoly() != g {
        return Err(Error::VerificationFailed("vanishing polynomial has non-additive terms".into()));
    }
    if out.alphas[0].is_zero() || out.alphas[e as usize].is_zero() {
        return Err(Error::VerificationFailed("α_0 α_e = 0".into()));
    }
    for (i, a) in out.alphas.iter().enumerate().skip(1) {
        if !a.is_zero() && !(p.pow(i as u32) - 1).is_multiple_of(m) {
            return Err(Error::ScalingUnstable(format!("α_{i} ≠ 0 but {m} ∤ {p}^{i} − 1")));
        }
    }
    Ok(out)
}

/// Constants of a branch certificate as field elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchValues {
    pub a: Fq,
    pub c: Fq,
    pub d0: Option<Fq>,
    /// `β^{d−1}`, in the base field.
    pub beta_power: Fq,
    /// `β`, in the field of `identity_lhs`.
    pub beta: Fq,
}

/// Solution of the coefficient system forcing
/// `β^{d−1}x + (x+1)^{d−1}(x+a)` to be a `(d−1)`-th power-like square or cube.
#[derive(Clone, Debug, Serialize)]
pub struct BranchCertificate {
    pub d: usize,
    pub base_field: String,
    /// Field containing `β`.
    pub field: String,
    /// Univariate eliminant in the unknown `c` (d = 3) or `d₀` (d = 4).
    pub eliminant: String,
    pub eliminant_roots: Vec<(String, u32)>,
    /// Roots whose branch has `β = 0`.
    pub discarded: Vec<String>,
    pub a: String,
    pub c: String,
    pub d0: Option<String>,
    pub beta_power: String,
    pub beta: String,
    pub relations: Vec<Check>,
    pub identity_lhs: String,
    pub identity_rhs: String,
    pub identity_holds: bool,
    #[serde(skip)]
    pub values: BranchValues,
    #[serde(skip)]
    pub lhs: Polynomial,
    #[serde(skip)]
    pub rhs: Polynomial,
}

/// Solves `β²x + (x+1)²(x+a) = (x+c)³` (d = 3) or
/// `β³x + (x+1)³(x+a) = (x²+cx+d₀)²` (d = 4) for `β ≠ 0`.
pub fn branch_certificate(d: usize, field: &Field) -> Result<BranchCertificate> {
    if d != 3 && d != 4 {
        return Err(Error::InvalidInput(format!("d must be 3 or 4, got {d}")));
    }
    let p = field.p();
    if p == 2 || p == 3 {
        return Err(Error::InvalidInput("branch certificates need p ∉ {2, 3}".into()));
    }
    let f = field;
    let k = |v: i64| UPoly::constant(f, f.from_i64(v));
    let t = UPoly::x(f);
    // a, c as polynomials in the unknown, and the remaining relation
    let (a_of, c_of, elim) = if d == 3 {
        let a = t.pow(3);
        let elim = a.add(&k(2)).sub(&t.scale(f.from_i64(3)));
        (a, t.clone(), elim)
    } else {
        let a = t.pow(2);
        let c = a.add(&k(3)).scale(f.inv(f.from_i64(2)).unwrap());
        let elim = a.scale(f.from_i64(3)).add(&k(3)).sub(&c.mul(&c)).sub(&t.scale(f.from_i64(2)));
        (a, c, elim)
    };
    let elim = elim.monic();
    let roots = elim.roots_with_multiplicity();
    let mut chosen = None;
    let mut discarded = Vec::new();
    for &(r, _) in &roots {
        let a = a_of.eval(r);
        let c = c_of.eval(r);
        let bp = if d == 3 {
            // β² = 3c² − 2a − 1
            f.sub(f.sub(f.mul(f.from_i64(3), f.mul(c, c)), f.mul(f.from_i64(2), a)), f.one())
        } else {
            // β³ = 2c·d₀ − 3a − 1
            f.sub(f.sub(f.mul(f.from_i64(2), f.mul(c, r)), f.mul(f.from_i64(3), a)), f.one())
        };
        if bp.is_zero() {
            discarded.push(f.fmt_elem(r));
        } else if chosen.is_none() {
            chosen = Some((r, a, c, bp));
        }
    }
    let Some((r, a, c, bp)) = chosen else {
        return Err(Error::DegenerateOnly);
    };
    let e = (d - 1) as u32;
    let mut found = None;
    for j in 1..=e as usize {
        let w = f.extension(j)?;
        let bw = crate::gf::embed(f, &w, bp)?;
        let mut pc = vec![w.zero(); e as usize + 1];
        pc[0] = w.neg(bw);
        pc[e as usize] = w.one();
        if let Some(&b) = UPoly::new(&w, pc).roots_in_field().first() {
            found = Some((w, b));
            break;
        }
    }
    let (w, beta) = found.ok_or_else(|| Error::VerificationFailed("no root β found".into()))?;
    let d0 = (d == 4).then_some(r);
    let mut ch = Checks::default();
    let s = |v: Fq| f.fmt_elem(v);
    let m = |x: i64, v: Fq| f.mul(f.from_i64(x), v);
    if d == 3 {
        ch.cmp("a+2 = 3c", s(f.add(a, f.from_i64(2))), s(m(3, c)));
        ch.cmp("2a+β²+1 = 3c²", s(f.add(f.add(m(2, a), bp), f.one())), s(m(3, f.mul(c, c))));
        ch.cmp("a = c³", s(a), s(f.pow(c, 3)));
    } else {
        ch.cmp("a+3 = 2c", s(f.add(a, f.from_i64(3))), s(m(2, c)));
        ch.cmp("3a+3 = c²+2d₀", s(f.add(m(3, a), f.from_i64(3))), s(f.add(f.mul(c, c), m(2, r))));
        ch.cmp("3a+β³+1 = 2c·d₀", s(f.add(f.add(m(3, a), bp), f.one())), s(m(2, f.mul(c, r))));
        ch.cmp("a = d₀²", s(a), s(f.mul(r, r)));
    }
    // identity in F_w[x, y]
    let up = |v: Fq| -> Result<Polynomial> { Ok(Polynomial::constant(&w, 2, crate::gf::embed(f, &w, v)?)) };
    let x = Polynomial::var(&w, 2, 0);
    let y = Polynomial::var(&w, 2, 1);
    let one = Polynomial::one(&w, 2);
    let yx = &y.pow(e as u64) * &x;
    let lhs = &yx + &(&(&x + &one).pow(e as u64) * &(&x + &up(a)?));
    let bx = &Polynomial::constant(&w, 2, w.pow(beta, e as u128)) * &x;
    let power = if d == 3 {
        (&x + &up(c)?).pow(3)
    } else {
        (&(&x.pow(2) + &(&up(c)? * &x)) + &up(r)?).pow(2)
    };
    let rhs = &(&yx - &bx) + &power;
    let beta_ok = crate::gf::embed(f, &w, bp)? == w.pow(beta, e as u128);
    Ok(BranchCertificate {
        d,
        base_field: f.spec(),
        field: w.spec(),
        eliminant: crate::galois::upoly_text(&elim, "t"),
        eliminant_roots: roots.iter().map(|&(r, e)| (s(r), e)).collect(),
        discarded,
        a: s(a),
        c: s(c),
        d0: d0.map(s),
        beta_power: s(bp),
        beta: w.fmt_elem(beta),
        relations: ch.0,
        identity_lhs: lhs.to_string(),
        identity_rhs: rhs.to_string(),
        identity_holds: beta_ok && lhs == rhs,
        values: BranchValues {
            a,
            c,
            d0,
            beta_power: bp,
            beta,
        },
        lhs,
        rhs,
    })
}

impl BranchCertificate {
    pub fn relations_hold(&self) -> bool {
        self.relations.iter().all(|c| c.pass)
    }
}
