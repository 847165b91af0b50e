//! Projection from a point and the fiber polynomial of the pencil through it.

use serde::Serialize;

use crate::curve::PlaneCurve;
use crate::error::{Error, Result};
use crate::gf::{Field, Fq};
use crate::polyring::Polynomial;
use crate::projective::{common_field, ProjPoint, Projectivity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Inner,
    Outer,
    Invalid,
}

impl std::fmt::Display for PointClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PointClass::Inner => "inner",
            PointClass::Outer => "outer",
            PointClass::Invalid => "invalid",
        })
    }
}

/// The pencil of lines through `center`, written as `F(t, s) = 0` where the
/// line with parameter `t` meets the curve in the roots `s`.
#[derive(Clone, Debug)]
pub struct ProjectionFiber {
    pub center: ProjPoint,
    pub class: PointClass,
    /// `T` with `T·target = center`; the curve in new coordinates is `F∘T`.
    pub frame: Projectivity,
    /// Variables `(t, s)`.
    pub poly: Polynomial,
    pub degree: usize,
}

impl ProjectionFiber {
    pub fn field(&self) -> &Field {
        self.poly.field()
    }
}

/// A projectivity of P² sending `e_target` to `center`, as close to the
/// identity as possible.
pub fn frame_for(center: &ProjPoint, target: usize) -> Projectivity {
    let f = center.field();
    let c = center.coords();
    let mut cols: Vec<[Fq; 3]> = Vec::new();
    let unit = |i: usize| {
        let mut v = [f.zero(); 3];
        v[i] = f.one();
        v
    };
    let others: Vec<usize> = (0..3).filter(|&i| i != target).collect();
    let choices: Vec<[usize; 2]> = if !c[target].is_zero() {
        vec![[others[0], others[1]]]
    } else {
        vec![[0, 1], [0, 2], [1, 2], [1, 0], [2, 0], [2, 1]]
    };
    for ch in choices {
        cols.clear();
        let mut it = ch.iter();
        for i in 0..3 {
            if i == target {
                cols.push([c[0], c[1], c[2]]);
            } else {
                cols.push(unit(*it.next().unwrap()));
            }
        }
        let entries: Vec<Fq> = (0..3).flat_map(|r| (0..3).map(move |k| (r, k))).map(|(r, k)| cols[k][r]).collect();
        if let Ok(m) = Projectivity::new(f, 3, &entries) {
            return m;
        }
    }
    unreachable!("a nonzero vector extends to a basis with two unit vectors")
}

/// `F(T·v)` for a 3×3 projectivity `T`.
pub fn transform_form(form: &Polynomial, t: &Projectivity) -> Polynomial {
    let f = form.field();
    let subs: Vec<Polynomial> = (0..3)
        .map(|i| {
            (0..3).fold(Polynomial::zero(f, 3), |acc, j| {
                &acc + &Polynomial::var(f, 3, j).scale(t.entry(i, j))
            })
        })
        .collect();
    form.compose(&subs)
}

/// Curve and center moved to a common field.
pub(crate) fn align(curve: &PlaneCurve, center: &ProjPoint) -> Result<(PlaneCurve, ProjPoint)> {
    if center.dim() != 2 {
        return Err(Error::DimensionMismatch("projection center must lie in P²".into()));
    }
    let field = common_field(curve.field(), center.field())?;
    Ok((curve.lift(&field)?, center.lift(&field)?))
}

pub fn classify_center(curve: &PlaneCurve, center: &ProjPoint) -> Result<PointClass> {
    let (c, p) = align(curve, center)?;
    if !c.contains(&p)? {
        Ok(PointClass::Outer)
    } else if c.is_smooth_point(&p)? {
        Ok(PointClass::Inner)
    } else {
        Ok(PointClass::Invalid)
    }
}

/// Moves an inner center to `(0:1:0)` and an outer one to `(1:0:0)`; the
/// result has exact `s`-degree `d − 1` or `d`.
pub fn fiber_polynomial(curve: &PlaneCurve, center: &ProjPoint) -> Result<ProjectionFiber> {
    let (c, p) = align(curve, center)?;
    let class = classify_center(&c, &p)?;
    let f = c.field().clone();
    let (target, degree) = match class {
        PointClass::Invalid => return Err(Error::CenterSingular),
        PointClass::Inner => (1, c.degree() - 1),
        PointClass::Outer => (0, c.degree()),
    };
    let frame = frame_for(&p, target);
    let moved = transform_form(c.form(), &frame);
    let one = Polynomial::one(&f, 2);
    let t = Polynomial::var(&f, 2, 0);
    let s = Polynomial::var(&f, 2, 1);
    // inner: (x, y) = (t, s); outer: (x, y) = (s, t)
    let subs = match class {
        PointClass::Inner => [t, s, one],
        _ => [s, t, one],
    };
    let poly = moved.compose(&subs);
    debug_assert_eq!(poly.degree_in(1), degree);
    Ok(ProjectionFiber {
        center: p,
        class,
        frame,
        poly,
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_from_affine;
    use crate::gf::make_field;
    use crate::polyring::{parse_polynomial, parse_polynomial_vars};

    #[test]
    fn cubic_fibers() {
        let f = make_field(13, 1).unwrap();
        let c = curve_from_affine(&parse_polynomial("y^2*x+(x+1)^2*(x-8)", &f, 2).unwrap()).unwrap();
        let q = ProjPoint::from_i64s(&f, &[1, 0, 0]).unwrap();
        let fib = fiber_polynomial(&c, &q).unwrap();
        assert_eq!(fib.class, PointClass::Outer);
        assert_eq!(fib.degree, 3);
        let expect = parse_polynomial_vars("s^3-6*s^2+(t^2-15)*s-8", &f, &["t", "s"]).unwrap();
        assert_eq!(fib.poly, expect);

        let p = ProjPoint::from_i64s(&f, &[0, 1, 0]).unwrap();
        let fib = fiber_polynomial(&c, &p).unwrap();
        assert_eq!(fib.class, PointClass::Inner);
        assert_eq!(fib.poly.degree_in(1), 2);
    }

    #[test]
    fn conic_inner_fiber_is_linear() {
        let f = make_field(7, 1).unwrap();
        let c = PlaneCurve::from_form(parse_polynomial("x*z-y^2", &f, 3).unwrap()).unwrap();
        let p = ProjPoint::from_i64s(&f, &[0, 0, 1]).unwrap();
        let fib = fiber_polynomial(&c, &p).unwrap();
        assert_eq!((fib.class, fib.degree), (PointClass::Inner, 1));
    }

    #[test]
    fn singular_center_rejected() {
        let f = make_field(13, 1).unwrap();
        let c = curve_from_affine(&parse_polynomial("y^2*x+(x+1)^2*(x-8)", &f, 2).unwrap()).unwrap();
        let s = ProjPoint::from_i64s(&f, &[-1, 0, 1]).unwrap();
        assert_eq!(fiber_polynomial(&c, &s).unwrap_err(), Error::CenterSingular);
    }

    #[test]
    fn frame_sends_target_to_center() {
        let f = make_field(5, 1).unwrap();
        for coords in [[0, 0, 1], [1, 2, 3], [0, 1, 4], [1, 0, 0]] {
            let c = ProjPoint::from_i64s(&f, &coords).unwrap();
            for target in 0..3 {
                let mut e = [0; 3];
                e[target] = 1;
                let img = frame_for(&c, target).apply(&ProjPoint::from_i64s(&f, &e).unwrap()).unwrap();
                assert_eq!(img, c);
            }
        }
    }
}
