//! Input file formats: curves, group pairs and family specs.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use galpoint::curve::{curve_from_affine, PlaneCurve};
use galpoint::families::FamilySpec;
use galpoint::galois::{Parametrization, RationalMap1D};
use galpoint::polyring::{parse_polynomial, parse_polynomial_vars};
use galpoint::projective::{generate_group, FiniteProjectivityGroup, ProjPoint, Projectivity};
use galpoint::Field;
use serde::de::DeserializeOwned;
use serde::Deserialize;

fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {what} file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{what} file {}", path.display()))
}

/// Field from a `"p^k"` spec and an optional explicit modulus, which must be
/// the canonical one.
pub fn field_from(spec: &str, modulus: Option<&[u64]>) -> Result<Field> {
    let f = Field::parse_spec(spec).with_context(|| format!("field {spec:?}"))?;
    if let Some(m) = modulus {
        if m != f.modulus() {
            bail!(
                "field {spec:?}: modulus {m:?} is not the canonical modulus {:?}",
                f.modulus()
            );
        }
    }
    Ok(f)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalText {
    num: String,
    #[serde(default = "one")]
    den: String,
}

fn one() -> String {
    "1".into()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamText {
    x: RationalText,
    y: RationalText,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    field: String,
    modulus: Option<Vec<u64>>,
    affine_poly: String,
    #[serde(default = "yes")]
    assume_irreducible: bool,
    parametrization: Option<ParamText>,
}

fn yes() -> bool {
    true
}

pub struct CurveInput {
    pub curve: PlaneCurve,
    pub parametrization: Option<Parametrization>,
}

fn rational(r: &RationalText, f: &Field, ctx: &str) -> Result<RationalMap1D> {
    let parse = |s: &str| -> Result<_> {
        parse_polynomial_vars(s, f, &["t"])
            .with_context(|| format!("{ctx}: {s:?}"))?
            .to_upoly(0)
            .ok_or_else(|| anyhow!("{ctx}: {s:?} is not a polynomial in t"))
    };
    RationalMap1D::new(parse(&r.num)?, parse(&r.den)?).with_context(|| ctx.to_string())
}

pub fn read_curve(path: &Path) -> Result<CurveInput> {
    let cf: CurveFile = read_json(path, "curve")?;
    let f = field_from(&cf.field, cf.modulus.as_deref())?;
    let poly = parse_polynomial(&cf.affine_poly, &f, 2).context("affine_poly")?;
    let mut curve = curve_from_affine(&poly).context("affine_poly")?;
    curve.assume_irreducible = cf.assume_irreducible;
    let parametrization = match &cf.parametrization {
        Some(p) => Some(
            Parametrization::new(rational(&p.x, &f, "parametrization.x")?, rational(&p.y, &f, "parametrization.y")?)
                .context("parametrization")?,
        ),
        None => None,
    };
    Ok(CurveInput { curve, parametrization })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupsFile {
    field: String,
    modulus: Option<Vec<u64>>,
    /// `"a4"` or `"s3"`: find the groups and the point by search in PGL(2, F).
    search: Option<String>,
    /// Generators as row-major 2×2 matrices of field elements.
    g1: Option<Vec<[String; 4]>>,
    g2: Option<Vec<[String; 4]>>,
    point: Option<String>,
}

pub struct GroupsInput {
    pub field: Field,
    pub g1: FiniteProjectivityGroup,
    pub g2: FiniteProjectivityGroup,
    pub point: Option<ProjPoint>,
}

fn group(gens: &[[String; 4]], f: &Field, cap: usize, ctx: &str) -> Result<FiniteProjectivityGroup> {
    let mut ms = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let mut e = Vec::new();
        for s in g {
            e.push(element(s, f).with_context(|| format!("{ctx}[{i}]"))?);
        }
        ms.push(Projectivity::new(f, 2, &e).with_context(|| format!("{ctx}[{i}]"))?);
    }
    generate_group(&Projectivity::identity(f, 2), &ms, cap).with_context(|| ctx.to_string())
}

fn element(s: &str, f: &Field) -> Result<galpoint::Fq> {
    parse_polynomial_vars(s, f, &[""])?
        .constant_value()
        .ok_or_else(|| anyhow!("{s:?} is not a field element"))
}

/// A point of P¹: `"inf"`, an affine value `"a"`, or homogeneous `"t:s"`.
pub fn p1_point(s: &str, f: &Field) -> Result<ProjPoint> {
    let s = s.trim();
    if s == "inf" || s == "∞" {
        return Ok(ProjPoint::infinity_p1(f));
    }
    if s.contains(':') {
        let p = ProjPoint::parse(s, f).with_context(|| format!("point {s:?}"))?;
        if p.dim() != 1 {
            bail!("point {s:?} is not a point of P¹");
        }
        return Ok(p);
    }
    Ok(ProjPoint::affine_line(f, element(s, f).with_context(|| format!("point {s:?}"))?))
}

pub fn read_groups(path: &Path, cap: usize) -> Result<GroupsInput> {
    let gf: GroupsFile = read_json(path, "groups")?;
    let f = field_from(&gf.field, gf.modulus.as_deref())?;
    let point = gf.point.as_deref().map(|s| p1_point(s, &f)).transpose()?;
    match (gf.search.as_deref(), &gf.g1, &gf.g2) {
        (Some(kind), None, None) => {
            let (g1, g2, p) = match kind {
                "a4" => galpoint::embedder::a4_data(&f)?,
                "s3" => galpoint::embedder::s3_data(&f)?,
                other => bail!("unknown search {other:?}, expected \"a4\" or \"s3\""),
            };
            Ok(GroupsInput {
                field: f,
                g1,
                g2,
                point: point.or(Some(p)),
            })
        }
        (None, Some(a), Some(b)) => Ok(GroupsInput {
            g1: group(a, &f, cap, "g1")?,
            g2: group(b, &f, cap, "g2")?,
            field: f,
            point,
        }),
        _ => bail!("groups file needs either \"search\" or both \"g1\" and \"g2\""),
    }
}

pub fn read_family(path: &Path) -> Result<FamilySpec> {
    read_json(path, "family spec")
}
