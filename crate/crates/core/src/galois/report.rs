//! Verdicts, the orchestrating `is_galois_point`, and joint analysis of two
//! certified groups.

use serde::{Serialize, Serializer};

use super::birational::{certify_birational, permutation_action, AffinePlaneMap, BirationalGroup, PointMap};
use super::collineation::{central_collineation_group, CollineationMode};
use super::deck::{deck_group, Parametrization, RationalMap1D};
use super::fiber::{align, classify_center, fiber_polynomial, PointClass, ProjectionFiber};
use super::monte_carlo::{monte_carlo_screen, verify_witness, Witness};
use crate::arith;
use crate::curve::PlaneCurve;
use crate::error::{Error, Result};
use crate::projective::{
    identify_group, product_structure, FiniteGroup, FiniteProjectivityGroup, GroupDescriptor, Perm, ProductReport,
    ProjLine, ProjPoint,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub trials: u32,
    pub seed: u64,
    pub ext_cap: usize,
    pub closure_cap: usize,
    pub brute_q_cap: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            trials: 64,
            seed: 0,
            ext_cap: crate::curve::DEFAULT_EXT_CAP,
            closure_cap: crate::projective::DEFAULT_CLOSURE_CAP,
            brute_q_cap: super::DEFAULT_BRUTE_Q_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedGalois,
    CertifiedNotGalois,
    ProbablyGalois,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedGalois => "certified_galois",
            Verdict::CertifiedNotGalois => "certified_not_galois",
            Verdict::ProbablyGalois => "probably_galois",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Collineation,
    Deck,
    Birational,
    MonteCarlo,
    None,
}

#[derive(Clone, Debug)]
pub enum Strategy {
    Auto,
    Collineation,
    Deck(Parametrization),
    Birational(Vec<AffinePlaneMap>),
    MonteCarlo,
}

#[derive(Clone, Debug)]
pub enum CertifiedGroup {
    Projective(FiniteProjectivityGroup),
    Birational(BirationalGroup),
}

impl CertifiedGroup {
    pub fn order(&self) -> usize {
        match self {
            CertifiedGroup::Projective(g) => g.order(),
            CertifiedGroup::Birational(b) => b.action.order(),
        }
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        match self {
            CertifiedGroup::Projective(g) => identify_group(g),
            CertifiedGroup::Birational(b) => identify_group(&b.action),
        }
    }

    pub fn projective(&self) -> Option<&FiniteProjectivityGroup> {
        match self {
            CertifiedGroup::Projective(g) => Some(g),
            CertifiedGroup::Birational(_) => None,
        }
    }
}

impl Serialize for CertifiedGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CertifiedGroup", 4)?;
        match self {
            CertifiedGroup::Projective(g) => {
                let f = g.identity().field();
                st.serialize_field("kind", if g.identity().dim() == 2 { "pgl2" } else { "pgl3" })?;
                st.serialize_field("field", &f.spec())?;
                st.serialize_field("order", &g.order())?;
                st.serialize_field("elements", g.elements())?;
            }
            CertifiedGroup::Birational(b) => {
                st.serialize_field("kind", "birational")?;
                st.serialize_field("field", &b.maps[0].field().spec())?;
                st.serialize_field("order", &b.action.order())?;
                st.serialize_field("elements", &b.maps)?;
            }
        }
        st.end()
    }
}

fn ser_point<S: Serializer>(p: &ProjPoint, s: S) -> std::result::Result<S::Ok, S::Error> {
    p.to_strings().serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct GaloisReport {
    #[serde(serialize_with = "ser_point")]
    pub point: ProjPoint,
    pub point_class: PointClass,
    pub projection_degree: usize,
    pub verdict: Verdict,
    pub method: Method,
    pub trials: u32,
    pub group: Option<CertifiedGroup>,
    pub descriptor: Option<GroupDescriptor>,
    pub witness: Option<Witness>,
    /// The projection written as a rational function of the parameter, when
    /// a parametrization was used.
    pub projection_map: Option<RationalMap1D>,
    pub notes: Vec<String>,
}

impl GaloisReport {
    fn new(point: ProjPoint, class: PointClass, n: usize) -> GaloisReport {
        GaloisReport {
            point,
            point_class: class,
            projection_degree: n,
            verdict: Verdict::Inconclusive,
            method: Method::None,
            trials: 0,
            group: None,
            descriptor: None,
            witness: None,
            projection_map: None,
            notes: Vec::new(),
        }
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedGalois
    }

    pub fn group_order(&self) -> Option<usize> {
        self.group.as_ref().map(|g| g.order())
    }

    /// Records a group; it certifies the point exactly when its order is the
    /// projection degree.
    fn offer(&mut self, g: CertifiedGroup, method: Method) -> bool {
        let ord = g.order();
        if ord == self.projection_degree {
            self.verdict = Verdict::CertifiedGalois;
            self.method = method;
            self.descriptor = Some(g.descriptor());
            self.group = Some(g);
            true
        } else {
            self.notes.push(format!(
                "{method:?} group has order {ord} < {}",
                self.projection_degree
            ));
            false
        }
    }
}

/// Monte Carlo alone, as a report: a witness refutes, uniformity only suggests.
pub fn monte_carlo_galois(fib: &ProjectionFiber, trials: u32, seed: u64) -> Result<GaloisReport> {
    let out = monte_carlo_screen(fib, trials, seed)?;
    let mut r = GaloisReport::new(fib.center.clone(), fib.class, fib.degree);
    r.method = Method::MonteCarlo;
    r.trials = out.used;
    match out.witness {
        Some(w) => {
            r.verdict = Verdict::CertifiedNotGalois;
            r.witness = Some(w);
        }
        None => r.verdict = Verdict::ProbablyGalois,
    }
    Ok(r)
}

fn collineations(curve: &PlaneCurve, p: &ProjPoint, cfg: &RunConfig, notes: &mut Vec<String>) -> Option<FiniteProjectivityGroup> {
    match central_collineation_group(curve, p, CollineationMode::Exact) {
        Ok(g) => Some(g),
        Err(Error::ExactModeDegenerate(why)) => {
            notes.push(format!("exact collineation mode degenerate ({why}); using brute scan"));
            match central_collineation_group(curve, p, CollineationMode::Brute { q_cap: cfg.brute_q_cap }) {
                Ok(g) => Some(g),
                Err(e) => {
                    notes.push(format!("brute collineation scan skipped: {e}"));
                    None
                }
            }
        }
        Err(e) => {
            notes.push(format!("collineation search failed: {e}"));
            None
        }
    }
}

/// Monte Carlo fallback. A witness is re-verified before it is reported.
/// Uniform results count as `probably_galois` only on smooth curves, where
/// Galois groups are linear; elsewhere they stay inconclusive.
fn screen(r: &mut GaloisReport, curve: &PlaneCurve, fib: &ProjectionFiber, cfg: &RunConfig) -> Result<()> {
    let mc = match monte_carlo_galois(fib, cfg.trials, cfg.seed) {
        Ok(mc) => mc,
        Err(Error::AllSpecializationsRamified) => {
            r.notes.push("every Monte Carlo specialization was ramified".into());
            return Ok(());
        }
        Err(e @ Error::NoScreeningField { .. }) => {
            r.notes.push(format!("Monte Carlo screen skipped: {e}"));
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    r.trials = mc.trials;
    if let Some(w) = mc.witness {
        if verify_witness(fib, &w)? {
            r.verdict = Verdict::CertifiedNotGalois;
            r.method = Method::MonteCarlo;
            r.witness = Some(w);
        } else {
            r.notes.push("Monte Carlo witness failed re-verification".into());
        }
        return Ok(());
    }
    let smooth = curve.singular_points(cfg.ext_cap).map(|s| s.is_empty()).unwrap_or(false);
    if smooth && r.group.is_none() {
        r.verdict = Verdict::ProbablyGalois;
        r.method = Method::MonteCarlo;
    } else if smooth {
        r.notes.push("Monte Carlo uniform but the certified group is too small".into());
    } else {
        r.notes.push("Monte Carlo uniform on a singular curve without a parametrization".into());
    }
    Ok(())
}

pub fn is_galois_point(curve: &PlaneCurve, point: &ProjPoint, strategy: &Strategy, cfg: &RunConfig) -> Result<GaloisReport> {
    let (c, p) = align(curve, point)?;
    let class = classify_center(&c, &p)?;
    if class == PointClass::Invalid {
        let mut r = GaloisReport::new(p, class, 0);
        r.notes.push("center is a singular point of the curve".into());
        return Ok(r);
    }
    let fib = fiber_polynomial(&c, &p)?;
    let mut r = GaloisReport::new(p.clone(), class, fib.degree);
    match strategy {
        Strategy::MonteCarlo => {
            screen(&mut r, &c, &fib, cfg)?;
        }
        Strategy::Collineation => {
            if let Some(g) = collineations(&c, &p, cfg, &mut r.notes) {
                r.offer(CertifiedGroup::Projective(g), Method::Collineation);
            }
        }
        Strategy::Auto => {
            let done = match collineations(&c, &p, cfg, &mut r.notes) {
                Some(g) => r.offer(CertifiedGroup::Projective(g), Method::Collineation),
                None => false,
            };
            if !done {
                screen(&mut r, &c, &fib, cfg)?;
            }
        }
        Strategy::Deck(param) => {
            if !param.lies_on(&c)? {
                return Err(Error::InvalidInput("parametrization does not lie on the curve".into()));
            }
            let h = param.projection_from(&p)?;
            r.projection_map = Some(h.clone());
            if h.degree() != fib.degree {
                r.notes.push(format!(
                    "projection has degree {} along the parametrization, expected {}",
                    h.degree(),
                    fib.degree
                ));
            } else {
                let g = deck_group(&h, cfg.ext_cap)?;
                if !r.offer(CertifiedGroup::Projective(g), Method::Deck) {
                    screen(&mut r, &c, &fib, cfg)?;
                }
            }
        }
        Strategy::Birational(maps) => {
            let g = certify_birational(&c, &p, maps)?;
            if !r.offer(CertifiedGroup::Birational(g), Method::Birational) {
                screen(&mut r, &c, &fib, cfg)?;
            }
        }
    }
    Ok(r)
}

/// Both deck groups over the compositum of their fields.
fn common_deck_groups(base: &crate::gf::Field, ga: &FiniteProjectivityGroup, gb: &FiniteProjectivityGroup) -> Result<(FiniteProjectivityGroup, FiniteProjectivityGroup)> {
    let (fa, fb) = (ga.identity().field(), gb.identity().field());
    if fa == fb {
        return Ok((ga.clone(), gb.clone()));
    }
    let l = arith::lcm((fa.k() / base.k()) as u64, (fb.k() / base.k()) as u64) as usize;
    let w = base.extension(l)?;
    Ok((ga.lift(&w)?, gb.lift(&w)?))
}

/// Product structure of the groups certified in two reports on one curve.
pub fn joint_structure(curve: &PlaneCurve, g1: &GaloisReport, g2: &GaloisReport, cap: usize) -> Result<ProductReport> {
    let (Some(a), Some(b)) = (&g1.group, &g2.group) else {
        return Err(Error::InvalidInput("both points need a certified group".into()));
    };
    match (a, b) {
        (CertifiedGroup::Projective(x), CertifiedGroup::Projective(y)) if x.identity().dim() == y.identity().dim() => {
            let (x, y) = if x.identity().dim() == 2 {
                let (Some(ha), Some(_)) = (&g1.projection_map, &g2.projection_map) else {
                    return Err(Error::InvalidInput("deck groups need their projection maps".into()));
                };
                common_deck_groups(ha.field(), x, y)?
            } else {
                (x.clone(), y.clone())
            };
            Ok(product_structure(&x, &y, cap)?.0)
        }
        _ => {
            let (x, y) = (point_maps(a)?, point_maps(b)?);
            let all: Vec<PointMap> = x.iter().chain(y.iter()).cloned().collect();
            let (_, perms) = permutation_action(curve, &all)
                .ok_or_else(|| Error::VerificationFailed("joint action is not by permutations".into()))?;
            let p1 = FiniteGroup::<Perm>::from_elements(perms[..x.len()].to_vec())?;
            let p2 = FiniteGroup::<Perm>::from_elements(perms[x.len()..].to_vec())?;
            if p1.order() != x.len() || p2.order() != y.len() {
                return Err(Error::VerificationFailed("group elements coincide on rational points".into()));
            }
            Ok(product_structure(&p1, &p2, cap)?.0)
        }
    }
}

fn point_maps(g: &CertifiedGroup) -> Result<Vec<PointMap>> {
    match g {
        CertifiedGroup::Projective(p) if p.identity().dim() == 3 => {
            Ok(p.elements().iter().cloned().map(PointMap::Projective).collect())
        }
        CertifiedGroup::Projective(_) => Err(Error::InvalidInput(
            "deck groups act on the parameter line and cannot be joined with plane maps".into(),
        )),
        CertifiedGroup::Birational(b) => Ok(b.maps.iter().cloned().map(PointMap::Birational).collect()),
    }
}

/// How the line through the two points meets the curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaLine {
    pub divisor: Vec<(Vec<String>, u32)>,
    pub support_size: usize,
    pub is_1_or_d: bool,
    pub is_d_p: bool,
}

pub fn lemma_line(curve: &PlaneCurve, p: &ProjPoint, q: &ProjPoint, ext_cap: usize) -> Result<LemmaLine> {
    let (c, p) = align(curve, p)?;
    let q = q.lift(c.field())?;
    let line = ProjLine::through(&p, &q)?;
    let div = c.line_intersection_divisor(&line, ext_cap)?;
    let d = c.degree();
    let pl = p.lift(div.field().unwrap_or(c.field()))?;
    Ok(LemmaLine {
        divisor: div.to_json(),
        support_size: div.support_size(),
        is_1_or_d: div.support_size() == 1 || div.support_size() == d,
        is_d_p: div.support_size() == 1 && div.multiplicity(&pl) as usize == d,
    })
}

/// `σ(P) = P` for every element of a plane group.
pub fn fixes_point(g: &FiniteProjectivityGroup, p: &ProjPoint) -> Result<bool> {
    for s in g.elements() {
        if s.apply(p)? != p.lift(s.field())? {
            return Ok(false);
        }
    }
    Ok(true)
}
