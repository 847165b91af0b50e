//! Plane curves: homogeneous forms in `X, Y, Z` (affine chart `Z = 1`).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::gf::{Field, Fq};
use crate::polyring::{resultant, splitting_roots, Polynomial, UPoly};
use crate::projective::{common_field, PointDivisor, ProjLine, ProjPoint};

pub const DEFAULT_EXT_CAP: usize = 12;

/// A reduced plane curve given by its homogeneous form.
#[derive(Clone, Debug)]
pub struct PlaneCurve {
    form: Polynomial,
    degree: usize,
    /// Irreducibility is never tested; constructors with a structural
    /// guarantee clear this flag.
    pub assume_irreducible: bool,
}

/// Homogenizes a reduced affine equation `f(x, y) = 0` with `z`.
pub fn curve_from_affine(f: &Polynomial) -> Result<PlaneCurve> {
    if f.nvars() != 2 {
        return Err(Error::DimensionMismatch(format!("affine curves need 2 variables, got {}", f.nvars())));
    }
    if f.is_zero() || f.is_constant() {
        return Err(Error::ZeroInput);
    }
    if !f.is_squarefree_bivariate(0x5eed)? {
        return Err(Error::NotSquarefree);
    }
    let form = f.remap_vars(3, &[0, 1]).homogenize(2);
    Ok(PlaneCurve {
        degree: form.total_degree(),
        form,
        assume_irreducible: true,
    })
}

impl PlaneCurve {
    /// From a homogeneous form in three variables.
    pub fn from_form(form: Polynomial) -> Result<PlaneCurve> {
        if form.nvars() != 3 || !form.is_homogeneous() || form.is_zero() || form.total_degree() == 0 {
            return Err(Error::InvalidInput("expected a nonconstant homogeneous form in X, Y, Z".into()));
        }
        // F = Z^a · homogenization of F(x, y, 1)
        let a = form.terms().map(|(m, _)| m[2]).min().unwrap_or(0);
        let affine = form.dehomogenize(2).restrict_vars(2);
        if a > 1 || (!affine.is_constant() && !affine.is_squarefree_bivariate(0x5eed)?) {
            return Err(Error::NotSquarefree);
        }
        Ok(PlaneCurve {
            degree: form.total_degree(),
            form,
            assume_irreducible: true,
        })
    }

    pub fn form(&self) -> &Polynomial {
        &self.form
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn field(&self) -> &Field {
        self.form.field()
    }

    /// `f(x, y) = F(x, y, 1)`.
    pub fn affine(&self) -> Polynomial {
        self.form.dehomogenize(2).restrict_vars(2)
    }

    pub fn structural(mut self) -> PlaneCurve {
        self.assume_irreducible = false;
        self
    }

    pub fn lift(&self, dst: &Field) -> Result<PlaneCurve> {
        Ok(PlaneCurve {
            form: self.form.lift(dst)?,
            degree: self.degree,
            assume_irreducible: self.assume_irreducible,
        })
    }

    /// Form and point moved to a common field.
    fn at(&self, p: &ProjPoint) -> Result<(Polynomial, Vec<Fq>)> {
        if p.dim() != 2 {
            return Err(Error::DimensionMismatch("curve points live in P²".into()));
        }
        let f = common_field(self.field(), p.field())?;
        Ok((self.form.lift(&f)?, p.lift(&f)?.coords().to_vec()))
    }

    pub fn contains(&self, p: &ProjPoint) -> Result<bool> {
        let (form, c) = self.at(p)?;
        Ok(form.eval(&c).is_zero())
    }

    pub fn gradient(&self, p: &ProjPoint) -> Result<[Fq; 3]> {
        let (form, c) = self.at(p)?;
        Ok([0, 1, 2].map(|i| form.derivative(i).eval(&c)))
    }

    pub fn is_smooth_point(&self, p: &ProjPoint) -> Result<bool> {
        if !self.contains(p)? {
            return Err(Error::PointNotOnCurve);
        }
        Ok(self.gradient(p)?.iter().any(|a| !a.is_zero()))
    }

    pub fn tangent_line(&self, p: &ProjPoint) -> Result<ProjLine> {
        if !self.contains(p)? {
            return Err(Error::PointNotOnCurve);
        }
        let g = self.gradient(p)?;
        let field = common_field(self.field(), p.field())?;
        ProjLine::new(&field, g).map_err(|_| Error::PointSingular)
    }

    /// Multiplicity of the curve at a point (0 off the curve).
    pub fn multiplicity_at(&self, p: &ProjPoint) -> Result<u32> {
        let (form, c) = self.at(p)?;
        let f = form.field().clone();
        let i = c.iter().position(|a| !a.is_zero()).unwrap();
        let inv = f.inv(c[i]).unwrap();
        let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
        // chart var_i = 1, local coordinates u, v centred at the point
        let mut subs = vec![Polynomial::zero(&f, 2); 3];
        subs[i] = Polynomial::one(&f, 2);
        for (slot, &j) in others.iter().enumerate() {
            subs[j] = &Polynomial::constant(&f, 2, f.mul(c[j], inv)) + &Polynomial::var(&f, 2, slot);
        }
        let local = form.compose(&subs);
        Ok(local.terms().map(|(m, _)| (m[0] + m[1]) as u32).min().unwrap_or(0))
    }

    /// `φ*L` for a line `L` that is not a component: degree `d` always.
    pub fn line_intersection_divisor(&self, l: &ProjLine, ext_cap: usize) -> Result<PointDivisor> {
        let field = common_field(self.field(), l.field())?;
        let l = l.lift(&field)?;
        let form = self.form.lift(&field)?;
        let (a, b) = l.basis_points();
        let f = &field;
        // points s*A + B; s = ∞ is A itself
        let subs: Vec<UPoly> = (0..3)
            .map(|i| UPoly::new(f, vec![b.coords()[i], a.coords()[i]]))
            .collect();
        let g = form.eval_upoly(&subs);
        if g.is_zero() {
            return Err(Error::LineIsComponent);
        }
        let mut pts: Vec<(ProjPoint, u32)> = Vec::new();
        let at_a = (self.degree - g.degree()) as u32;
        let ext = if g.degree() > 0 {
            let roots = splitting_roots(&g, ext_cap)?;
            let e = roots.ext.clone();
            let (al, bl) = (a.lift(&e)?, b.lift(&e)?);
            for (s, m) in roots.roots {
                let c: Vec<Fq> = (0..3)
                    .map(|i| e.add(e.mul(s, al.coords()[i]), bl.coords()[i]))
                    .collect();
                pts.push((ProjPoint::new(&e, &c)?, m));
            }
            e
        } else {
            field.clone()
        };
        if at_a > 0 {
            pts.push((a.lift(&ext)?, at_a));
        }
        PointDivisor::new(pts)
    }

    /// All singular points over the least extension (relative degree at most
    /// `ext_cap`) that contains them, with multiplicities.
    pub fn singular_points(&self, ext_cap: usize) -> Result<SingularLocus> {
        let base = self.field().clone();
        let f = self.affine();
        let partials: Vec<Polynomial> = (0..3)
            .map(|i| self.form.derivative(i).dehomogenize(2).restrict_vars(2))
            .collect();
        let mut found: Vec<ProjPoint> = Vec::new();

        // affine part: eliminate y
        let r = self.x_eliminant(&f, &partials)?;
        if !r.is_constant() {
            let xs = splitting_roots(&r, ext_cap)?;
            for (x0, _) in &xs.roots {
                let e = &xs.ext;
                let sub = |p: &Polynomial| -> Result<UPoly> {
                    let pl = p.lift(e)?;
                    Ok(pl.eval_upoly(&[UPoly::constant(e, *x0), UPoly::x(e)]))
                };
                let mut g = sub(&f)?;
                for p in &partials {
                    g = g.gcd(&sub(p)?);
                }
                if g.is_zero() {
                    return Err(Error::NotSquarefree);
                }
                if g.is_constant() {
                    continue;
                }
                let ys = splitting_roots(&g, ext_cap)?;
                let total = ys.ext.k() / base.k();
                if total > ext_cap {
                    return Err(Error::ExtensionCapExceeded { cap: ext_cap });
                }
                let x0 = crate::gf::embed(e, &ys.ext, *x0)?;
                for (y0, _) in ys.roots {
                    found.push(ProjPoint::affine_plane(&ys.ext, x0, y0));
                }
            }
        }

        // line at infinity: (x : 1 : 0) and (1 : 0 : 0)
        let at_inf = |p: &Polynomial| -> UPoly {
            p.eval_upoly(&[UPoly::x(&base), UPoly::one(&base), UPoly::zero(&base)])
        };
        let mut g = at_inf(&self.form);
        for i in 0..3 {
            g = g.gcd(&at_inf(&self.form.derivative(i)));
        }
        if g.is_zero() {
            return Err(Error::NotSquarefree);
        }
        if !g.is_constant() {
            let xs = splitting_roots(&g, ext_cap)?;
            for (x0, _) in xs.roots {
                found.push(ProjPoint::new(&xs.ext, &[x0, xs.ext.one(), xs.ext.zero()])?);
            }
        }
        let inf = ProjPoint::from_i64s(&base, &[1, 0, 0])?;
        if self.form.eval(inf.coords()).is_zero() && self.gradient(&inf)?.iter().all(|a| a.is_zero()) {
            found.push(inf);
        }

        let k = found
            .iter()
            .fold(1u64, |acc, p| arith::lcm(acc, (p.field().k() / base.k()) as u64)) as usize;
        if k > ext_cap {
            return Err(Error::ExtensionCapExceeded { cap: ext_cap });
        }
        let ext = base.extension(k)?;
        let mut points = Vec::new();
        for p in found {
            let p = p.lift(&ext)?;
            if points.iter().any(|(q, _)| *q == p) {
                continue;
            }
            let m = self.multiplicity_at(&p)?;
            debug_assert!(m >= 2);
            points.push((p, m));
        }
        points.sort();
        Ok(SingularLocus { ext, points })
    }

    /// Nonzero univariate polynomial in `x` vanishing at the x-coordinates of
    /// all affine singular points.
    fn x_eliminant(&self, f: &Polynomial, partials: &[Polynomial]) -> Result<UPoly> {
        let base = self.field();
        let mut acc: Option<UPoly> = None;
        fn absorb(acc: &mut Option<UPoly>, r: Polynomial) {
            if let Some(u) = r.to_upoly(0).filter(|u| !u.is_zero()) {
                *acc = Some(match acc.take() {
                    None => u.monic(),
                    Some(a) => a.gcd(&u),
                });
            }
        }
        let nonzero: Vec<&Polynomial> = partials.iter().filter(|p| !p.is_zero()).collect();
        if nonzero.is_empty() {
            return Err(Error::NotSquarefree);
        }
        if !f.uses_var(1) {
            // a union of vertical lines: singular exactly where two meet, or nowhere
            let u = f.to_upoly(0).unwrap();
            return Ok(u.gcd(&u.derivative()));
        }
        for p in &nonzero {
            absorb(&mut acc, resultant(f, p, 1)?);
        }
        if acc.is_none() {
            let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
            for _ in 0..16 {
                let mut h = Polynomial::zero(base, 2);
                for p in &nonzero {
                    h = &h + &p.scale(base.random(&mut rng));
                }
                if !h.is_zero() {
                    absorb(&mut acc, resultant(f, &h, 1)?);
                }
                if acc.is_some() {
                    break;
                }
            }
        }
        acc.ok_or(Error::NotSquarefree)
    }
}

#[derive(Clone, Debug)]
pub struct SingularLocus {
    pub ext: Field,
    /// `(point, multiplicity ≥ 2)`, sorted.
    pub points: Vec<(ProjPoint, u32)>,
}

impl SingularLocus {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        p.lift(&self.ext).map(|q| self.points.iter().any(|(r, _)| *r == q)).unwrap_or(false)
    }

    pub fn multiplicity(&self, p: &ProjPoint) -> u32 {
        p.lift(&self.ext)
            .ok()
            .and_then(|q| self.points.iter().find(|(r, _)| *r == q).map(|(_, m)| *m))
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> Vec<SingularPointJson> {
        self.points
            .iter()
            .map(|(p, m)| SingularPointJson {
                point: p.to_strings(),
                multiplicity: *m,
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularPointJson {
    pub point: Vec<String>,
    pub multiplicity: u32,
}

impl Polynomial {
    /// Drops trailing variables that do not occur.
    pub fn restrict_vars(&self, nvars: usize) -> Polynomial {
        assert!((nvars..self.nvars()).all(|v| !self.uses_var(v)));
        let map: Vec<usize> = (0..self.nvars()).map(|i| i.min(nvars - 1)).collect();
        self.remap_vars(nvars, &map)
    }
}

/// JSON view of a curve: field, affine equation, degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveSummary {
    pub field: String,
    pub modulus: Vec<u64>,
    pub affine_poly: String,
    pub form: String,
    pub degree: usize,
}

impl PlaneCurve {
    pub fn summary(&self) -> CurveSummary {
        CurveSummary {
            field: self.field().spec(),
            modulus: self.field().modulus().to_vec(),
            affine_poly: self.affine().to_string(),
            form: self.form().to_string(),
            degree: self.degree(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::polyring::parse_polynomial;

    fn curve(s: &str, f: &Field) -> PlaneCurve {
        curve_from_affine(&parse_polynomial(s, f, 2).unwrap()).unwrap()
    }

    fn form(s: &str, f: &Field) -> Polynomial {
        parse_polynomial(s, f, 3).unwrap()
    }

    #[test]
    fn homogenization_examples() {
        let f13 = make_field(13, 1).unwrap();
        let c = curve("y^2*x+(x+1)^2*(x-8)", &f13);
        assert_eq!(*c.form(), form("y^2*x+(x+z)^2*(x-8*z)", &f13));
        assert_eq!(c.degree(), 3);
        let c = curve("x^3+y^4+1", &f13);
        assert_eq!(*c.form(), form("x^3*z+y^4+z^4", &f13));
        let f2 = make_field(2, 1).unwrap();
        let c = curve("x-y^2", &f2);
        assert_eq!(*c.form(), form("x*z-y^2", &f2));
        assert_eq!(
            curve_from_affine(&parse_polynomial("(x-y)^2*(x+1)", &f13, 2).unwrap()).unwrap_err(),
            Error::NotSquarefree
        );
    }

    #[test]
    fn singular_examples() {
        let f13 = make_field(13, 1).unwrap();
        let c = curve("x^3+y^4", &f13);
        let s = c.singular_points(12).unwrap();
        let pts: Vec<Vec<i64>> = s.points.iter().map(|(p, _)| p.coords().iter().map(|a| a.index() as i64).collect()).collect();
        // (1:0:0) lies on X³Z + Y⁴ but F_Z = X³ does not vanish there
        assert_eq!(pts, vec![vec![0, 0, 1]]);
        assert_eq!(s.points[0].1, 3);
        let inf = ProjPoint::from_i64s(&f13, &[1, 0, 0]).unwrap();
        assert!(c.is_smooth_point(&inf).unwrap());
        assert!(curve("x^3+y^4+1", &f13).singular_points(12).unwrap().is_empty());
        let c = curve("y^2*x+(x+1)^2*(x-8)", &f13);
        let s = c.singular_points(12).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].0, ProjPoint::from_i64s(&f13, &[-1, 0, 1]).unwrap());
        assert_eq!(s.points[0].1, 2);
    }

    #[test]
    fn tangent_examples() {
        let f7 = make_field(7, 1).unwrap();
        let c = curve("x-y^2", &f7);
        let p = ProjPoint::from_i64s(&f7, &[0, 0, 1]).unwrap();
        assert_eq!(c.tangent_line(&p).unwrap(), ProjLine::from_i64s(&f7, [1, 0, 0]).unwrap());
        let f13 = make_field(13, 1).unwrap();
        let top = ProjPoint::from_i64s(&f13, &[0, 1, 0]).unwrap();
        let x0 = ProjLine::from_i64s(&f13, [1, 0, 0]).unwrap();
        assert_eq!(curve("y^2*x+(x+1)^2*(x-8)", &f13).tangent_line(&top).unwrap(), x0);
        assert_eq!(curve("y^3*x+(x+1)^3*(x+9)", &f13).tangent_line(&top).unwrap(), x0);
        let off = ProjPoint::from_i64s(&f13, &[1, 1, 1]).unwrap();
        assert_eq!(curve("x^3+y^4+1", &f13).tangent_line(&off).unwrap_err(), Error::PointNotOnCurve);
        let cusp = ProjPoint::from_i64s(&f13, &[0, 0, 1]).unwrap();
        assert_eq!(curve("x^3+y^4", &f13).tangent_line(&cusp).unwrap_err(), Error::PointSingular);
    }

    #[test]
    fn line_divisor_examples() {
        let f13 = make_field(13, 1).unwrap();
        let c = curve("x^3+y^4+1", &f13);
        let l = ProjLine::through(
            &ProjPoint::from_i64s(&f13, &[0, 1, 0]).unwrap(),
            &ProjPoint::from_i64s(&f13, &[1, 0, 0]).unwrap(),
        )
        .unwrap();
        let d = c.line_intersection_divisor(&l, 12).unwrap();
        // Z = 0 cuts out Y⁴ = 0, the point (1:0:0) with multiplicity 4
        assert_eq!(d.points(), &[(ProjPoint::from_i64s(&f13, &[1, 0, 0]).unwrap(), 4)]);

        let f7 = make_field(7, 1).unwrap();
        let d = curve("x-y^2", &f7)
            .line_intersection_divisor(&ProjLine::from_i64s(&f7, [1, 0, 0]).unwrap(), 12)
            .unwrap();
        assert_eq!(d.points(), &[(ProjPoint::from_i64s(&f7, &[0, 0, 1]).unwrap(), 2)]);

        let f4 = make_field(2, 2).unwrap();
        let c = curve("x-y^4", &f4);
        let l = ProjLine::through(
            &ProjPoint::from_i64s(&f4, &[0, 0, 1]).unwrap(),
            &ProjPoint::from_i64s(&f4, &[1, 1, 0]).unwrap(),
        )
        .unwrap();
        let d = c.line_intersection_divisor(&l, 12).unwrap();
        assert_eq!(d.degree(), 4);
        assert_eq!(d.support_size(), 4);

        let line = curve("(x-y)*(x+y+1)", &f13);
        let err = line
            .line_intersection_divisor(&ProjLine::from_i64s(&f13, [1, -1, 0]).unwrap(), 12)
            .unwrap_err();
        assert_eq!(err, Error::LineIsComponent);
    }
}
