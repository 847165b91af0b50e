//! Deck transformations of rational functions `h: P¹ → P¹`, and the
//! rational parametrizations that turn a projection into such a function.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::curve::PlaneCurve;
use crate::error::{Error, Result};
use crate::gf::{Field, Fq};
use crate::polyring::{Polynomial, UPoly};
use crate::projective::{common_field, generate_group, FiniteProjectivityGroup, GroupElement, ProjPoint, Projectivity};

/// A quotient of coprime univariate polynomials with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMap1D {
    num: UPoly,
    den: UPoly,
}

impl fmt::Debug for RationalMap1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text("t"))
    }
}

impl Serialize for RationalMap1D {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RationalMap1D", 3)?;
        st.serialize_field("num", &upoly_text(&self.num, "t"))?;
        st.serialize_field("den", &upoly_text(&self.den, "t"))?;
        st.serialize_field("degree", &self.degree())?;
        st.end()
    }
}

pub(crate) fn upoly_text(u: &UPoly, var: &str) -> String {
    Polynomial::from_upoly(u, 1, 0).to_text(&[var])
}

impl RationalMap1D {
    pub fn new(num: UPoly, den: UPoly) -> Result<RationalMap1D> {
        if den.is_zero() {
            return Err(Error::ZeroInput);
        }
        if num.field() != den.field() {
            return Err(Error::IncompatibleFields("numerator and denominator".into()));
        }
        if num.is_zero() {
            return Ok(RationalMap1D { den: UPoly::one(num.field()), num });
        }
        let g = num.gcd(&den);
        let (n, d) = (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap());
        let inv = d.field().inv(d.lc()).unwrap();
        Ok(RationalMap1D {
            num: n.scale(inv),
            den: d.scale(inv),
        })
    }

    pub fn polynomial(p: UPoly) -> RationalMap1D {
        let one = UPoly::one(p.field());
        RationalMap1D { num: p, den: one }
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn field(&self) -> &Field {
        self.num.field()
    }

    pub fn degree(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn lift(&self, dst: &Field) -> Result<RationalMap1D> {
        RationalMap1D::new(self.num.lift(dst)?, self.den.lift(dst)?)
    }

    pub fn to_text(&self, var: &str) -> String {
        if self.den.is_constant() {
            upoly_text(&self.num, var)
        } else {
            format!("({})/({})", upoly_text(&self.num, var), upoly_text(&self.den, var))
        }
    }

    /// Value at `t` (`None` is ∞); `None` in the output is ∞.
    pub fn eval(&self, t: Option<Fq>) -> Option<Fq> {
        let f = self.field();
        match t {
            Some(t) => {
                let d = self.den.eval(t);
                f.inv(d).map(|di| f.mul(self.num.eval(t), di))
            }
            None => {
                let (dn, dd) = (self.num.degree(), self.den.degree());
                if self.num.is_zero() || dn < dd {
                    Some(f.zero())
                } else if dn > dd {
                    None
                } else {
                    Some(f.div(self.num.lc(), self.den.lc()))
                }
            }
        }
    }

    /// `N_h(u, w)` for the numerator or denominator homogenized to the map's degree.
    fn homogeneous_at(&self, p: &UPoly, u: &UPoly, w: &UPoly) -> UPoly {
        let n = self.degree();
        let f = self.field();
        let mut upow = vec![UPoly::one(f)];
        let mut wpow = vec![UPoly::one(f)];
        for _ in 0..n {
            upow.push(upow.last().unwrap().mul(u));
            wpow.push(wpow.last().unwrap().mul(w));
        }
        (0..=p.degree().min(n)).fold(UPoly::zero(f), |acc, i| {
            acc.add(&upow[i].mul(&wpow[n - i]).scale(p.coeff(i)))
        })
    }

    /// Exact test of `h∘σ = h` for a Möbius map σ over the same field.
    pub fn is_invariant_under(&self, s: &Projectivity) -> bool {
        let f = self.field();
        let (a, b, c, d) = (s.entry(0, 0), s.entry(0, 1), s.entry(1, 0), s.entry(1, 1));
        let u = UPoly::new(f, vec![b, a]);
        let w = UPoly::new(f, vec![d, c]);
        let lhs = self.homogeneous_at(&self.num, &u, &w).mul(&self.den);
        let rhs = self.homogeneous_at(&self.den, &u, &w).mul(&self.num);
        lhs == rhs
    }

    /// `(a·h + b) / (c·h + d)`.
    pub fn post_mobius(&self, s: &Projectivity) -> Result<RationalMap1D> {
        let (a, b, c, d) = (s.entry(0, 0), s.entry(0, 1), s.entry(1, 0), s.entry(1, 1));
        let num = self.num.scale(a).add(&self.den.scale(b));
        let den = self.num.scale(c).add(&self.den.scale(d));
        RationalMap1D::new(num, den)
    }

    /// `N − v·D`, the fiber over a finite value `v`.
    fn fiber(&self, v: Fq) -> UPoly {
        self.num.sub(&self.den.scale(v))
    }
}

/// Möbius map sending `a_i ↦ b_i` for three distinct points each.
fn mobius_through(f: &Field, a: [Fq; 3], b: [Fq; 3]) -> Option<Projectivity> {
    let cross = |p: [Fq; 3]| {
        let (x, y) = (f.sub(p[2], p[1]), f.sub(p[2], p[0]));
        Projectivity::mobius(f, x, f.neg(f.mul(p[0], x)), y, f.neg(f.mul(p[1], y))).ok()
    };
    Some(cross(b)?.inverse().compose(&cross(a)?))
}

const FIBER_ATTEMPTS: usize = 32;

fn good_fiber(h: &RationalMap1D, v: Fq) -> Option<UPoly> {
    let u = h.fiber(v);
    (u.degree() == h.degree() && u.is_squarefree()).then_some(u)
}

/// Deck group computed inside `w`, from fibers that split there.
fn deck_in(h: &RationalMap1D, w: &Field, fibers: [UPoly; 2]) -> Result<FiniteProjectivityGroup> {
    let hw = h.lift(w)?;
    let r1 = fibers[0].lift(w)?.roots_in_field();
    let r2 = fibers[1].lift(w)?.roots_in_field();
    let n = h.degree();
    debug_assert!(r1.len() == n && r2.len() == n);
    let anchors = [r1[0], r1[1], r2[0]];
    let (mut s1, mut s2) = (r1.clone(), r2.clone());
    s1.sort();
    s2.sort();
    // a deck element permutes both fibers; test a few points before the full check
    let permutes = |m: &Projectivity| {
        let maps_into = |pts: &[Fq], set: &[Fq]| {
            pts.iter().all(|&x| m.apply_t(Some(x)).is_some_and(|y| set.binary_search(&y).is_ok()))
        };
        maps_into(&r1[2..r1.len().min(6)], &s1) && maps_into(&r2[1..r2.len().min(5)], &s2)
    };
    // the fiber is unramified, so a deck element is fixed by the image of
    // r1[0]; images already reached by the group found so far are skipped
    let id = Projectivity::identity(w, 2);
    let mut gens: Vec<Projectivity> = Vec::new();
    let mut group = FiniteProjectivityGroup::trivial(&id);
    'image: for &b1 in &r1 {
        if group.elements().iter().any(|g| g.apply_t(Some(anchors[0])) == Some(b1)) {
            continue;
        }
        for &b2 in r1.iter().filter(|&&b| b != b1) {
            for &b3 in &r2 {
                if let Some(m) = mobius_through(w, anchors, [b1, b2, b3]) {
                    if permutes(&m) && hw.is_invariant_under(&m) {
                        gens.push(m);
                        group = generate_group(&id, &gens, n)?;
                        continue 'image;
                    }
                }
            }
        }
    }
    Ok(group)
}

/// Fibers over values of the base field, with their splitting degrees.
fn base_fibers(h: &RationalMap1D) -> Vec<(UPoly, usize)> {
    h.field()
        .elements()
        .take(FIBER_ATTEMPTS)
        .filter_map(|v| good_fiber(h, v))
        .map(|u| {
            let e = u.splitting_degree();
            (u, e)
        })
        .collect()
}

/// Two fibers over values in `w` itself that split completely in `w`.
fn split_fibers_in(h: &RationalMap1D, w: &Field) -> Result<Option<[UPoly; 2]>> {
    let hw = h.lift(w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(w.order());
    let mut found: Vec<UPoly> = Vec::new();
    let mut used: Vec<Fq> = Vec::new();
    for _ in 0..FIBER_ATTEMPTS {
        let v = w.random(&mut rng);
        if used.contains(&v) {
            continue;
        }
        used.push(v);
        if let Some(u) = good_fiber(&hw, v) {
            if u.splitting_degree() == 1 {
                found.push(u);
                if found.len() == 2 {
                    let b = found.pop().unwrap();
                    let a = found.pop().unwrap();
                    return Ok(Some([a, b]));
                }
            }
        }
    }
    Ok(None)
}

/// `{σ ∈ PGL(2) : h∘σ = h}`, computed in the smallest extension in which two
/// sampled fibers split and returned over the field of its matrix entries.
pub fn deck_group(h: &RationalMap1D, ext_cap: usize) -> Result<FiniteProjectivityGroup> {
    let n = h.degree();
    let k = h.field().clone();
    if n == 0 {
        return Err(Error::InvalidInput("deck group of a constant map".into()));
    }
    if n == 1 {
        return Ok(FiniteProjectivityGroup::trivial(&Projectivity::identity(&k, 2)));
    }
    let mut base = base_fibers(h);
    base.sort_by_key(|(_, e)| *e);
    if base.len() >= 2 {
        let l = crate::arith::lcm(base[0].1 as u64, base[1].1 as u64) as usize;
        if l <= ext_cap {
            let w = k.extension(l)?;
            return deck_in(h, &w, [base[0].0.clone(), base[1].0.clone()])?.descend(&k);
        }
    }
    for l in 1..=ext_cap {
        let Ok(w) = k.extension(l) else { break };
        if let Some(fibers) = split_fibers_in(h, &w)? {
            return deck_in(h, &w, fibers)?.descend(&k);
        }
    }
    if base.is_empty() {
        Err(Error::DegenerateFibers)
    } else {
        Err(Error::ExtensionCapExceeded { cap: ext_cap })
    }
}

/// Deck group computed inside a prescribed extension `w` of the map's field.
pub fn deck_group_over(h: &RationalMap1D, w: &Field) -> Result<FiniteProjectivityGroup> {
    let k = h.field();
    if w.p() != k.p() || !w.k().is_multiple_of(k.k()) {
        return Err(Error::IncompatibleFields(format!("{w:?} does not contain {k:?}")));
    }
    if h.degree() <= 1 {
        return deck_group(&h.lift(w)?, 1);
    }
    let l = w.k() / k.k();
    let base: Vec<UPoly> = base_fibers(h)
        .into_iter()
        .filter(|(_, e)| l.is_multiple_of(*e))
        .map(|(u, _)| u)
        .take(2)
        .collect();
    if let [a, b] = &base[..] {
        return deck_in(h, w, [a.clone(), b.clone()]);
    }
    match split_fibers_in(h, w)? {
        Some(fibers) => deck_in(&h.lift(w)?, w, fibers),
        None => Err(Error::DegenerateFibers),
    }
}

/// An affine rational parametrization `t ↦ (x(t), y(t))` of a plane curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Parametrization {
    pub x: RationalMap1D,
    pub y: RationalMap1D,
}

impl Parametrization {
    pub fn new(x: RationalMap1D, y: RationalMap1D) -> Result<Parametrization> {
        if x.field() != y.field() {
            return Err(Error::IncompatibleFields("parametrization components".into()));
        }
        Ok(Parametrization { x, y })
    }

    pub fn field(&self) -> &Field {
        self.x.field()
    }

    pub fn lift(&self, dst: &Field) -> Result<Parametrization> {
        Parametrization::new(self.x.lift(dst)?, self.y.lift(dst)?)
    }

    /// Coprime `(X(t), Y(t), Z(t))`.
    pub fn homogeneous(&self) -> [UPoly; 3] {
        let (xd, yd) = (self.x.den(), self.y.den());
        let g = xd.gcd(yd);
        let d = xd.mul(&yd.div_exact(&g).unwrap());
        let xs = self.x.num().mul(&d.div_exact(xd).unwrap());
        let ys = self.y.num().mul(&d.div_exact(yd).unwrap());
        [xs, ys, d]
    }

    /// Image of `t` (`None` is ∞) in P².
    pub fn point_at(&self, t: Option<Fq>) -> ProjPoint {
        let h = self.homogeneous();
        let f = self.field();
        let coords: Vec<Fq> = match t {
            Some(t) => h.iter().map(|u| u.eval(t)).collect(),
            None => {
                let m = h.iter().map(|u| u.degree()).max().unwrap();
                h.iter().map(|u| u.coeff(m)).collect()
            }
        };
        ProjPoint::new(f, &coords).expect("coprime components never vanish together")
    }

    /// Whether the curve's form vanishes identically along the parametrization.
    pub fn lies_on(&self, curve: &PlaneCurve) -> Result<bool> {
        let f = common_field(self.field(), curve.field())?;
        let h = self.lift(&f)?.homogeneous();
        Ok(curve.lift(&f)?.form().eval_upoly(&h).is_zero())
    }

    /// Composition of the parametrization with the projection from `center`:
    /// `ℓ1(φ) / ℓ2(φ)` for two linear forms through `center`.
    pub fn projection_from(&self, center: &ProjPoint) -> Result<RationalMap1D> {
        let f = common_field(self.field(), center.field())?;
        let c = center.lift(&f)?;
        let phi = self.lift(&f)?.homogeneous();
        let cc = c.coords();
        let mut forms: Vec<[Fq; 3]> = Vec::new();
        for i in [2, 0, 1] {
            let mut e = [f.zero(); 3];
            e[i] = f.one();
            let l = [
                f.sub(f.mul(cc[1], e[2]), f.mul(cc[2], e[1])),
                f.sub(f.mul(cc[2], e[0]), f.mul(cc[0], e[2])),
                f.sub(f.mul(cc[0], e[1]), f.mul(cc[1], e[0])),
            ];
            if l.iter().all(|a| a.is_zero()) {
                continue;
            }
            let independent = forms.iter().all(|m| {
                (0..3).any(|a| (0..3).any(|b| f.sub(f.mul(m[a], l[b]), f.mul(m[b], l[a])) != f.zero()))
            });
            if independent {
                forms.push(l);
            }
            if forms.len() == 2 {
                break;
            }
        }
        let apply = |l: &[Fq; 3]| {
            (0..3).fold(UPoly::zero(&f), |acc, i| acc.add(&phi[i].scale(l[i])))
        };
        RationalMap1D::new(apply(&forms[1]), apply(&forms[0]))
    }
}
