//! Birational automorphisms given by affine rational formulas, certified by
//! exact reduction modulo the curve and realized as permutations of points.

use std::collections::HashMap;

use serde::Serialize;

use crate::curve::PlaneCurve;
use crate::error::{Error, Result};
use crate::gf::{Field, Fq};
use crate::polyring::{Polynomial, DEFAULT_VARS};
use crate::projective::{generate_group, FiniteGroup, Perm, ProjPoint, Projectivity};

/// `(x, y) ↦ (x_num / den, y_num / den)` with polynomials in `x, y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePlaneMap {
    pub x_num: Polynomial,
    pub y_num: Polynomial,
    pub den: Polynomial,
}

impl Serialize for AffinePlaneMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let names = &DEFAULT_VARS[..2];
        let text = |p: &Polynomial| p.to_text(names);
        [
            ("x", format!("({})/({})", text(&self.x_num), text(&self.den))),
            ("y", format!("({})/({})", text(&self.y_num), text(&self.den))),
        ]
        .into_iter()
        .collect::<std::collections::BTreeMap<_, _>>()
        .serialize(s)
    }
}

impl AffinePlaneMap {
    pub fn new(x_num: Polynomial, y_num: Polynomial, den: Polynomial) -> Result<AffinePlaneMap> {
        if den.is_zero() {
            return Err(Error::ZeroInput);
        }
        if [&x_num, &y_num, &den].iter().any(|p| p.nvars() != 2 || p.field() != den.field()) {
            return Err(Error::DimensionMismatch("affine maps use two variables over one field".into()));
        }
        Ok(AffinePlaneMap { x_num, y_num, den })
    }

    pub fn field(&self) -> &Field {
        self.den.field()
    }

    pub fn apply(&self, x: Fq, y: Fq) -> Option<(Fq, Fq)> {
        let f = self.field();
        let d = f.inv(self.den.eval(&[x, y]))?;
        Some((f.mul(self.x_num.eval(&[x, y]), d), f.mul(self.y_num.eval(&[x, y]), d)))
    }

    /// `F(x_num, y_num, den) ≡ 0` modulo the affine equation.
    pub fn preserves(&self, curve: &PlaneCurve) -> bool {
        let g = curve.form().compose(&[
            self.x_num.remap_vars(3, &[0, 1]),
            self.y_num.remap_vars(3, &[0, 1]),
            self.den.remap_vars(3, &[0, 1]),
        ]);
        g.restrict_vars(2).rem_lex(&curve.affine()).is_zero()
    }

    /// Whether `π∘σ = π` on the curve, where `π` is the projection from `center`.
    pub fn commutes_with_projection(&self, curve: &PlaneCurve, center: &ProjPoint) -> bool {
        let f = self.field();
        let c = center.coords();
        // two affine linear forms ℓ(x, y) = a x + b y + c·1 vanishing at the center
        let mut forms: Vec<[Fq; 3]> = Vec::new();
        for e in [[f.one(), f.zero(), f.zero()], [f.zero(), f.one(), f.zero()], [f.zero(), f.zero(), f.one()]] {
            let l = [
                f.sub(f.mul(c[1], e[2]), f.mul(c[2], e[1])),
                f.sub(f.mul(c[2], e[0]), f.mul(c[0], e[2])),
                f.sub(f.mul(c[0], e[1]), f.mul(c[1], e[0])),
            ];
            if l.iter().any(|a| !a.is_zero()) && forms.iter().all(|m| !proportional(f, m, &l)) {
                forms.push(l);
            }
        }
        let v = |i| Polynomial::var(f, 2, i);
        let one = Polynomial::one(f, 2);
        let plain = |l: &[Fq; 3]| &(&v(0).scale(l[0]) + &v(1).scale(l[1])) + &one.scale(l[2]);
        let moved = |l: &[Fq; 3]| &(&self.x_num.scale(l[0]) + &self.y_num.scale(l[1])) + &self.den.scale(l[2]);
        let (l1, l2) = (&forms[0], &forms[1]);
        let cross = &(&moved(l1) * &plain(l2)) - &(&moved(l2) * &plain(l1));
        cross.rem_lex(&curve.affine()).is_zero()
    }
}

fn proportional(f: &Field, a: &[Fq; 3], b: &[Fq; 3]) -> bool {
    (0..3).all(|i| (0..3).all(|j| f.mul(a[i], b[j]) == f.mul(a[j], b[i])))
}

/// Anything acting on affine points of a curve.
#[derive(Clone, Debug)]
pub enum PointMap {
    Projective(Projectivity),
    Birational(AffinePlaneMap),
}

impl PointMap {
    fn apply(&self, x: Fq, y: Fq) -> Option<(Fq, Fq)> {
        match self {
            PointMap::Birational(m) => m.apply(x, y),
            PointMap::Projective(s) => {
                let f = s.field();
                let p = ProjPoint::new(f, &[x, y, f.one()]).ok()?;
                s.apply(&p).ok()?.affine_xy()
            }
        }
    }
}

/// Affine points of the curve over its own field.
pub fn affine_points(curve: &PlaneCurve) -> Vec<(Fq, Fq)> {
    let f = curve.field();
    let aff = curve.affine();
    let mut pts = Vec::new();
    for x in f.elements() {
        let u = aff.eval_var(0, x).to_upoly(1).expect("univariate in y");
        if u.is_zero() {
            pts.extend(f.elements().map(|y| (x, y)));
        } else {
            pts.extend(u.roots_in_field().into_iter().map(|y| (x, y)));
        }
    }
    pts
}

/// Largest set of affine points on which every map is defined and which every
/// map sends into itself; each map then becomes a permutation, or the
/// function returns `None` for a map that is not injective there.
pub fn permutation_action(curve: &PlaneCurve, maps: &[PointMap]) -> Option<(Vec<(Fq, Fq)>, Vec<Perm>)> {
    let mut domain: Vec<(Fq, Fq)> = affine_points(curve);
    loop {
        let set: std::collections::HashSet<_> = domain.iter().copied().collect();
        let keep: Vec<(Fq, Fq)> = domain
            .iter()
            .copied()
            .filter(|&(x, y)| maps.iter().all(|m| m.apply(x, y).is_some_and(|img| set.contains(&img))))
            .collect();
        if keep.len() == domain.len() {
            break;
        }
        domain = keep;
    }
    let index: HashMap<(Fq, Fq), u32> = domain.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
    let mut perms = Vec::with_capacity(maps.len());
    for m in maps {
        let images: Vec<u32> = domain.iter().map(|&(x, y)| index[&m.apply(x, y).unwrap()]).collect();
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if std::mem::replace(&mut seen[i as usize], true) {
                return None;
            }
        }
        perms.push(Perm(images));
    }
    Some((domain, perms))
}

/// A group of birational deck transformations certified as permutations.
#[derive(Clone, Debug)]
pub struct BirationalGroup {
    pub maps: Vec<AffinePlaneMap>,
    pub action: FiniteGroup<Perm>,
    pub domain_size: usize,
}

/// Checks every map exactly and returns the group they form, provided they
/// act as distinct permutations that are closed under composition.
pub fn certify_birational(
    curve: &PlaneCurve,
    center: &ProjPoint,
    maps: &[AffinePlaneMap],
) -> Result<BirationalGroup> {
    for (i, m) in maps.iter().enumerate() {
        if m.field() != curve.field() {
            return Err(Error::IncompatibleFields("birational map and curve".into()));
        }
        if !m.preserves(curve) {
            return Err(Error::VerificationFailed(format!("map {i} does not preserve the curve")));
        }
        if !m.commutes_with_projection(curve, center) {
            return Err(Error::VerificationFailed(format!("map {i} moves the fibers of the projection")));
        }
    }
    let pm: Vec<PointMap> = maps.iter().cloned().map(PointMap::Birational).collect();
    let (domain, perms) = permutation_action(curve, &pm)
        .ok_or_else(|| Error::VerificationFailed("a map is not injective on rational points".into()))?;
    let action = FiniteGroup::from_elements(perms.clone())?;
    if action.order() != maps.len() {
        return Err(Error::VerificationFailed("maps coincide on rational points".into()));
    }
    Ok(BirationalGroup {
        maps: maps.to_vec(),
        action: generate_group(&perms[0], &perms, maps.len().max(1))?,
        domain_size: domain.len(),
    })
}
