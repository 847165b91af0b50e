//! Points, lines and projectivities of P¹ and P², finite groups generated by
//! them, and orbit divisors.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{embed, restrict, Field, Fq};

/// Smallest field containing both, when one is a subfield of the other.
pub fn common_field(a: &Field, b: &Field) -> Result<Field> {
    if a == b {
        return Ok(a.clone());
    }
    if a.p() == b.p() {
        if b.k().is_multiple_of(a.k()) {
            return Ok(b.clone());
        }
        if a.k().is_multiple_of(b.k()) {
            return Ok(a.clone());
        }
    }
    Err(Error::IncompatibleFields(format!("{a:?} and {b:?}")))
}

fn lift_vec(src: &Field, dst: &Field, v: &[Fq]) -> Result<Vec<Fq>> {
    v.iter().map(|&a| embed(src, dst, a)).collect()
}

/// Scales so that the first nonzero entry is one; `None` for the zero vector.
fn normalize(field: &Field, v: &mut [Fq]) -> Option<()> {
    let first = *v.iter().find(|a| !a.is_zero())?;
    let inv = field.inv(first).unwrap();
    for a in v.iter_mut() {
        *a = field.mul(*a, inv);
    }
    Some(())
}

/// A point of P¹ (`(t : 1)` or `∞ = (1 : 0)`) or of P².
#[derive(Clone)]
pub struct ProjPoint {
    field: Field,
    coords: Vec<Fq>,
}

impl PartialEq for ProjPoint {
    fn eq(&self, o: &ProjPoint) -> bool {
        self.coords == o.coords && self.field == o.field
    }
}

impl Eq for ProjPoint {}

impl Hash for ProjPoint {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.coords.hash(h);
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, o: &ProjPoint) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for ProjPoint {
    fn cmp(&self, o: &ProjPoint) -> std::cmp::Ordering {
        self.coords.cmp(&o.coords)
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|&a| self.field.fmt_elem(a)).collect();
        write!(f, "({})", parts.join(":"))
    }
}

impl ProjPoint {
    pub fn new(field: &Field, coords: &[Fq]) -> Result<ProjPoint> {
        if !(2..=3).contains(&coords.len()) {
            return Err(Error::DimensionMismatch(format!("{} homogeneous coordinates", coords.len())));
        }
        let mut c = coords.to_vec();
        normalize(field, &mut c).ok_or_else(|| Error::InvalidInput("all coordinates are zero".into()))?;
        Ok(ProjPoint {
            field: field.clone(),
            coords: c,
        })
    }

    pub fn from_i64s(field: &Field, coords: &[i64]) -> Result<ProjPoint> {
        let c: Vec<Fq> = coords.iter().map(|&v| field.from_i64(v)).collect();
        ProjPoint::new(field, &c)
    }

    /// The point `t = a` of P¹.
    pub fn affine_line(field: &Field, a: Fq) -> ProjPoint {
        ProjPoint::new(field, &[a, field.one()]).unwrap()
    }

    pub fn infinity_p1(field: &Field) -> ProjPoint {
        ProjPoint::new(field, &[field.one(), field.zero()]).unwrap()
    }

    /// The affine point `(a : b : 1)` of P².
    pub fn affine_plane(field: &Field, a: Fq, b: Fq) -> ProjPoint {
        ProjPoint::new(field, &[a, b, field.one()]).unwrap()
    }

    /// Parses `"x:y:z"` or `"t:s"` with entries in the field's text syntax.
    pub fn parse(s: &str, field: &Field) -> Result<ProjPoint> {
        let parts: Vec<&str> = s.split(':').collect();
        let mut coords = Vec::new();
        for part in &parts {
            // no variables: the empty name can never be lexed
            let p = crate::polyring::parse_polynomial_vars(part, field, &[""])?;
            let v = p
                .constant_value()
                .ok_or_else(|| Error::InvalidInput(format!("coordinate '{part}' is not a constant")))?;
            coords.push(v);
        }
        ProjPoint::new(field, &coords)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[Fq] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// `t` for a finite point `(t : 1)` of P¹, `None` at infinity.
    pub fn affine_t(&self) -> Option<Fq> {
        assert_eq!(self.dim(), 1);
        if self.coords[1].is_zero() {
            None
        } else {
            Some(self.field.div(self.coords[0], self.coords[1]))
        }
    }

    /// `(x, y)` for a point with `z ≠ 0`.
    pub fn affine_xy(&self) -> Option<(Fq, Fq)> {
        assert_eq!(self.dim(), 2);
        let z = self.coords[2];
        let f = &self.field;
        (!z.is_zero()).then(|| (f.div(self.coords[0], z), f.div(self.coords[1], z)))
    }

    pub fn lift(&self, dst: &Field) -> Result<ProjPoint> {
        ProjPoint::new(dst, &lift_vec(&self.field, dst, &self.coords)?)
    }

    /// Least subfield degree `d` (dividing `k`) containing all coordinates.
    pub fn field_of_definition_degree(&self) -> usize {
        let k = self.field.k();
        (1..=k)
            .filter(|d| k.is_multiple_of(*d))
            .find(|&d| {
                let q = self.field.p().pow(d as u32) as u128;
                self.coords.iter().all(|&a| self.field.pow(a, q) == a)
            })
            .unwrap_or(k)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|&a| self.field.fmt_elem(a)).collect()
    }
}

/// A line `a X + b Y + c Z = 0` of P².
#[derive(Clone, PartialEq, Eq)]
pub struct ProjLine {
    field: Field,
    coeffs: [Fq; 3],
}

impl fmt::Debug for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coeffs.iter().map(|&a| self.field.fmt_elem(a)).collect();
        write!(f, "[{}]", c.join(":"))
    }
}

impl ProjLine {
    pub fn new(field: &Field, coeffs: [Fq; 3]) -> Result<ProjLine> {
        let mut c = coeffs;
        normalize(field, &mut c).ok_or_else(|| Error::InvalidInput("zero line".into()))?;
        Ok(ProjLine {
            field: field.clone(),
            coeffs: c,
        })
    }

    pub fn from_i64s(field: &Field, c: [i64; 3]) -> Result<ProjLine> {
        ProjLine::new(field, c.map(|v| field.from_i64(v)))
    }

    /// The line through two distinct points.
    pub fn through(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine> {
        let field = common_field(&p.field, &q.field)?;
        let (a, b) = (p.lift(&field)?, q.lift(&field)?);
        let (a, b) = (&a.coords, &b.coords);
        if a.len() != 3 || b.len() != 3 {
            return Err(Error::DimensionMismatch("lines live in P²".into()));
        }
        let f = &field;
        let cross = [
            f.sub(f.mul(a[1], b[2]), f.mul(a[2], b[1])),
            f.sub(f.mul(a[2], b[0]), f.mul(a[0], b[2])),
            f.sub(f.mul(a[0], b[1]), f.mul(a[1], b[0])),
        ];
        ProjLine::new(f, cross).map_err(|_| Error::InvalidInput("points coincide".into()))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fq; 3] {
        &self.coeffs
    }

    pub fn contains(&self, p: &ProjPoint) -> Result<bool> {
        let field = common_field(&self.field, &p.field)?;
        let l = lift_vec(&self.field, &field, &self.coeffs)?;
        let c = lift_vec(&p.field, &field, &p.coords)?;
        let f = &field;
        let s = (0..3).fold(f.zero(), |acc, i| f.add(acc, f.mul(l[i], c[i])));
        Ok(s.is_zero())
    }

    pub fn lift(&self, dst: &Field) -> Result<ProjLine> {
        let c = lift_vec(&self.field, dst, &self.coeffs)?;
        ProjLine::new(dst, [c[0], c[1], c[2]])
    }

    /// Two distinct points spanning the line.
    pub fn basis_points(&self) -> (ProjPoint, ProjPoint) {
        let f = &self.field;
        let [a, b, c] = self.coeffs;
        let z = f.zero();
        // a kernel basis of the 1×3 matrix [a b c]
        let (u, v) = if !a.is_zero() {
            ([f.neg(b), a, z], [f.neg(c), z, a])
        } else if !b.is_zero() {
            ([f.one(), z, z], [z, f.neg(c), b])
        } else {
            ([f.one(), z, z], [z, f.one(), z])
        };
        (ProjPoint::new(f, &u).unwrap(), ProjPoint::new(f, &v).unwrap())
    }
}

/// Behaviour shared by the elements of explicitly closed finite groups.
pub trait GroupElement: Clone + Eq + Hash {
    fn identity_like(&self) -> Self;
    /// `self ∘ other` (apply `other` first).
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;

    fn is_identity(&self) -> bool {
        *self == self.identity_like()
    }

    fn order(&self) -> u64 {
        let id = self.identity_like();
        let mut x = self.clone();
        let mut n = 1;
        while x != id {
            x = x.compose(self);
            n += 1;
        }
        n
    }
}

/// An invertible 2×2 or 3×3 matrix up to scalars, acting on column vectors.
#[derive(Clone)]
pub struct Projectivity {
    field: Field,
    n: usize,
    mat: Vec<Fq>,
}

impl PartialEq for Projectivity {
    fn eq(&self, o: &Projectivity) -> bool {
        self.n == o.n && self.mat == o.mat && self.field == o.field
    }
}

impl Eq for Projectivity {}

impl Hash for Projectivity {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.mat.hash(h);
    }
}

impl fmt::Debug for Projectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|&a| self.field.fmt_elem(a)).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl Serialize for Projectivity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

fn det(field: &Field, n: usize, m: &[Fq]) -> Fq {
    let f = field;
    match n {
        2 => f.sub(f.mul(m[0], m[3]), f.mul(m[1], m[2])),
        3 => {
            let t1 = f.mul(m[0], f.sub(f.mul(m[4], m[8]), f.mul(m[5], m[7])));
            let t2 = f.mul(m[1], f.sub(f.mul(m[3], m[8]), f.mul(m[5], m[6])));
            let t3 = f.mul(m[2], f.sub(f.mul(m[3], m[7]), f.mul(m[4], m[6])));
            f.add(f.sub(t1, t2), t3)
        }
        _ => unreachable!(),
    }
}

impl Projectivity {
    /// Row-major entries; fails on a singular matrix.
    pub fn new(field: &Field, n: usize, entries: &[Fq]) -> Result<Projectivity> {
        if !(2..=3).contains(&n) || entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} entries for a {n}×{n} matrix", entries.len())));
        }
        if det(field, n, entries).is_zero() {
            return Err(Error::InvalidInput("singular matrix".into()));
        }
        let mut mat = entries.to_vec();
        normalize(field, &mut mat);
        Ok(Projectivity {
            field: field.clone(),
            n,
            mat,
        })
    }

    pub fn from_i64s(field: &Field, n: usize, entries: &[i64]) -> Result<Projectivity> {
        let e: Vec<Fq> = entries.iter().map(|&v| field.from_i64(v)).collect();
        Projectivity::new(field, n, &e)
    }

    pub fn identity(field: &Field, n: usize) -> Projectivity {
        let mut e = vec![field.zero(); n * n];
        for i in 0..n {
            e[i * n + i] = field.one();
        }
        Projectivity::new(field, n, &e).unwrap()
    }

    /// `t ↦ (a t + b) / (c t + d)`.
    pub fn mobius(field: &Field, a: Fq, b: Fq, c: Fq, d: Fq) -> Result<Projectivity> {
        Projectivity::new(field, 2, &[a, b, c, d])
    }

    pub fn diag(field: &Field, d: &[Fq]) -> Result<Projectivity> {
        let n = d.len();
        let mut e = vec![field.zero(); n * n];
        for i in 0..n {
            e[i * n + i] = d[i];
        }
        Projectivity::new(field, n, &e)
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Projectivity {
        loop {
            let e: Vec<Fq> = (0..n * n).map(|_| field.random(rng)).collect();
            if let Ok(p) = Projectivity::new(field, n, &e) {
                return p;
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Fq] {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Fq {
        self.mat[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<Fq>> {
        self.mat.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.mat.iter().map(|&a| self.field.fmt_elem(a)).collect()
    }

    pub fn lift(&self, dst: &Field) -> Result<Projectivity> {
        Projectivity::new(dst, self.n, &lift_vec(&self.field, dst, &self.mat)?)
    }

    pub fn conjugate_by(&self, h: &Projectivity) -> Projectivity {
        h.compose(self).compose(&h.inverse())
    }

    pub fn apply(&self, x: &ProjPoint) -> Result<ProjPoint> {
        if x.coords.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} matrix applied to a point of P^{}",
                self.n,
                self.n,
                x.dim()
            )));
        }
        let field = common_field(&self.field, &x.field)?;
        let m = lift_vec(&self.field, &field, &self.mat)?;
        let v = lift_vec(&x.field, &field, &x.coords)?;
        let f = &field;
        let out: Vec<Fq> = (0..self.n)
            .map(|i| (0..self.n).fold(f.zero(), |acc, j| f.add(acc, f.mul(m[i * self.n + j], v[j]))))
            .collect();
        ProjPoint::new(f, &out)
    }

    /// Möbius action on a finite parameter value; `None` means infinity.
    pub fn apply_t(&self, t: Option<Fq>) -> Option<Fq> {
        assert_eq!(self.n, 2);
        let f = &self.field;
        let pt = match t {
            Some(a) => ProjPoint::affine_line(f, a),
            None => ProjPoint::infinity_p1(f),
        };
        self.apply(&pt).unwrap().affine_t()
    }
}

impl GroupElement for Projectivity {
    fn identity_like(&self) -> Projectivity {
        Projectivity::identity(&self.field, self.n)
    }

    fn compose(&self, o: &Projectivity) -> Projectivity {
        assert!(self.n == o.n && self.field == o.field, "incompatible projectivities");
        let f = &self.field;
        let n = self.n;
        let mut m = vec![f.zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = (0..n).fold(f.zero(), |acc, k| f.add(acc, f.mul(self.mat[i * n + k], o.mat[k * n + j])));
            }
        }
        Projectivity::new(f, n, &m).unwrap()
    }

    fn inverse(&self) -> Projectivity {
        let f = &self.field;
        let m = &self.mat;
        let adj: Vec<Fq> = match self.n {
            2 => vec![m[3], f.neg(m[1]), f.neg(m[2]), m[0]],
            _ => {
                let c = |r0: usize, c0: usize, r1: usize, c1: usize| {
                    f.sub(f.mul(m[r0 * 3 + c0], m[r1 * 3 + c1]), f.mul(m[r0 * 3 + c1], m[r1 * 3 + c0]))
                };
                vec![
                    c(1, 1, 2, 2),
                    f.neg(c(0, 1, 2, 2)),
                    c(0, 1, 1, 2),
                    f.neg(c(1, 0, 2, 2)),
                    c(0, 0, 2, 2),
                    f.neg(c(0, 0, 1, 2)),
                    c(1, 0, 2, 1),
                    f.neg(c(0, 0, 2, 1)),
                    c(0, 0, 1, 1),
                ]
            }
        };
        Projectivity::new(f, self.n, &adj).unwrap()
    }
}

/// A permutation of `0..n`, composed right to left.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Perm(pub Vec<u32>);

impl GroupElement for Perm {
    fn identity_like(&self) -> Perm {
        Perm((0..self.0.len() as u32).collect())
    }

    fn compose(&self, o: &Perm) -> Perm {
        Perm(o.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }
}

/// An explicitly enumerated finite group.
#[derive(Clone, Debug)]
pub struct FiniteGroup<T: GroupElement> {
    elements: Vec<T>,
    generators: Vec<T>,
    index: HashMap<T, usize>,
}

pub type FiniteProjectivityGroup = FiniteGroup<Projectivity>;

pub const DEFAULT_CLOSURE_CAP: usize = 4096;

/// Closure of `gens` under composition. The identity comes first.
pub fn generate_group<T: GroupElement>(identity: &T, gens: &[T], cap: usize) -> Result<FiniteGroup<T>> {
    let id = identity.identity_like();
    let mut elements = vec![id.clone()];
    let mut index = HashMap::new();
    index.insert(id.clone(), 0);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.compose(g);
            if !index.contains_key(&y) {
                if elements.len() >= cap {
                    return Err(Error::ClosureCapExceeded { cap });
                }
                index.insert(y.clone(), elements.len());
                elements.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(FiniteGroup {
        elements,
        generators: gens.to_vec(),
        index,
    })
}

impl<T: GroupElement> FiniteGroup<T> {
    pub fn trivial(identity: &T) -> FiniteGroup<T> {
        generate_group(identity, &[], 1).unwrap()
    }

    /// Wraps a list already known to be a group; fails if it is not closed.
    pub fn from_elements(elements: Vec<T>) -> Result<FiniteGroup<T>> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidInput("empty group".into()));
        };
        let id = first.identity_like();
        let mut els = vec![id.clone()];
        els.extend(elements.iter().filter(|e| **e != id).cloned());
        let mut index = HashMap::new();
        for (i, e) in els.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::InvalidInput("repeated group element".into()));
            }
        }
        let g = FiniteGroup {
            generators: els.clone(),
            elements: els,
            index,
        };
        if !g.is_closed() {
            return Err(Error::InvalidInput("element list is not closed under composition".into()));
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn generators(&self) -> &[T] {
        &self.generators
    }

    pub fn identity(&self) -> &T {
        &self.elements[0]
    }

    pub fn contains(&self, x: &T) -> bool {
        self.index.contains_key(x)
    }

    pub fn position(&self, x: &T) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        g.iter().all(|a| g.iter().all(|b| a.compose(b) == b.compose(a)))
    }

    pub fn is_closed(&self) -> bool {
        self.elements.iter().all(|a| {
            self.contains(&a.inverse()) && self.elements.iter().all(|b| self.contains(&a.compose(b)))
        })
    }

    /// Whether `self` is normalized by every element of `big`.
    pub fn is_normal_in(&self, big: &FiniteGroup<T>) -> bool {
        big.generators.iter().all(|g| {
            let gi = g.inverse();
            self.generators.iter().all(|h| self.contains(&g.compose(h).compose(&gi)))
        })
    }

    pub fn order_histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for e in &self.elements {
            *h.entry(e.order()).or_insert(0) += 1;
        }
        h
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        identify_group(self)
    }

    pub fn map_elements<U: GroupElement>(&self, f: impl Fn(&T) -> U) -> Result<FiniteGroup<U>> {
        FiniteGroup::from_elements(self.elements.iter().map(f).collect())
    }
}

impl FiniteGroup<Projectivity> {
    pub fn lift(&self, dst: &Field) -> Result<FiniteProjectivityGroup> {
        let gens: Vec<Projectivity> = self.generators.iter().map(|g| g.lift(dst)).collect::<Result<_>>()?;
        let id = self.identity().lift(dst)?;
        generate_group(&id, &gens, self.order().max(1))
    }

    pub fn conjugate_by(&self, h: &Projectivity) -> FiniteProjectivityGroup {
        let gens: Vec<Projectivity> = self.generators.iter().map(|g| g.conjugate_by(h)).collect();
        generate_group(self.identity(), &gens, self.order().max(1)).unwrap()
    }
    /// The same group over the smallest field between `base` and its own
    /// field that holds every normalized matrix entry.
    pub fn descend(&self, base: &Field) -> Result<FiniteProjectivityGroup> {
        let w = self.identity().field().clone();
        if w.p() != base.p() || !w.k().is_multiple_of(base.k()) {
            return Err(Error::IncompatibleFields(format!("{w:?} does not contain {base:?}")));
        }
        let d = (base.k()..w.k())
            .filter(|d| d % base.k() == 0 && w.k().is_multiple_of(*d))
            .find(|&d| {
                let q = (w.p() as u128).pow(d as u32);
                self.elements.iter().all(|e| e.mat.iter().all(|&a| w.pow(a, q) == a))
            });
        let Some(d) = d else { return Ok(self.clone()) };
        let sub = Field::new(w.p(), d)?;
        let down = |e: &Projectivity| -> Result<Projectivity> {
            let m: Vec<Fq> = e.mat.iter().map(|&a| restrict(&sub, &w, a).map(|x| x.unwrap())).collect::<Result<_>>()?;
            Projectivity::new(&sub, e.n, &m)
        };
        let gens: Vec<Projectivity> = self.generators.iter().map(down).collect::<Result<_>>()?;
        generate_group(&Projectivity::identity(&sub, self.identity().dim()), &gens, self.order().max(1))
    }
}

/// Structural tag from the catalogue of groups that show up here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupTag {
    Trivial,
    Cyclic,
    Klein,
    ElementaryAbelian { p: u64, e: u32 },
    S3,
    A4,
    SemidirectPCyclic { p: u64 },
    Other,
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::Trivial => write!(f, "trivial"),
            GroupTag::Cyclic => write!(f, "cyclic"),
            GroupTag::Klein => write!(f, "klein"),
            GroupTag::ElementaryAbelian { p, e } => write!(f, "elementary_abelian({p},{e})"),
            GroupTag::S3 => write!(f, "s3"),
            GroupTag::A4 => write!(f, "a4"),
            GroupTag::SemidirectPCyclic { p } => write!(f, "semidirect_p_cyclic({p})"),
            GroupTag::Other => write!(f, "other"),
        }
    }
}

impl Serialize for GroupTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupDescriptor {
    pub order: u64,
    pub abelian: bool,
    pub element_order_histogram: BTreeMap<u64, u64>,
    pub tag: GroupTag,
}

impl GroupDescriptor {
    /// `(p, e)` if the group is `(Z/p)^e` with `e ≥ 1`.
    pub fn elementary_abelian(&self) -> Option<(u64, u32)> {
        if !self.abelian || self.order < 2 {
            return None;
        }
        let f = crate::arith::factorize(self.order);
        match f.as_slice() {
            [(p, e)] if self.element_order_histogram.keys().all(|&o| o == 1 || o == *p) => Some((*p, *e)),
            _ => None,
        }
    }
}

/// Order, abelianness, element-order histogram and a catalogue tag.
pub fn identify_group<T: GroupElement>(g: &FiniteGroup<T>) -> GroupDescriptor {
    let order = g.order() as u64;
    let abelian = g.is_abelian();
    let hist = g.order_histogram();
    let mut d = GroupDescriptor {
        order,
        abelian,
        element_order_histogram: hist.clone(),
        tag: GroupTag::Other,
    };
    let h = |o: u64| hist.get(&o).copied().unwrap_or(0);
    d.tag = if order == 1 {
        GroupTag::Trivial
    } else if h(order) > 0 {
        GroupTag::Cyclic
    } else if let Some((p, e)) = d.elementary_abelian() {
        if p == 2 && e == 2 {
            GroupTag::Klein
        } else {
            GroupTag::ElementaryAbelian { p, e }
        }
    } else if !abelian && order == 6 {
        GroupTag::S3
    } else if order == 12 && h(1) == 1 && h(2) == 3 && h(3) == 8 {
        GroupTag::A4
    } else if !abelian {
        semidirect_tag(order, &hist)
    } else {
        GroupTag::Other
    };
    d
}

/// `(Z/p)^e ⋊ Z/m`: a unique, elementary abelian Sylow `p`-subgroup and an
/// element of order `m`.
fn semidirect_tag(order: u64, hist: &BTreeMap<u64, u64>) -> GroupTag {
    for (p, e) in crate::arith::factorize(order) {
        let pe = p.pow(e);
        let m = order / pe;
        let p_elements: u64 = hist.iter().filter(|(o, _)| pe % **o == 0).map(|(_, c)| c).sum();
        let exponent_p = hist.keys().all(|&o| o == 1 || pe % o != 0 || o == p);
        if p_elements == pe && exponent_p && hist.contains_key(&m) {
            return GroupTag::SemidirectPCyclic { p };
        }
    }
    GroupTag::Other
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Direct,
    LeftSemidirect,
    RightSemidirect,
    Neither,
    NotAProduct,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Direct => "direct",
            Classification::LeftSemidirect => "left_semidirect",
            Classification::RightSemidirect => "right_semidirect",
            Classification::Neither => "neither",
            Classification::NotAProduct => "not_a_product",
        })
    }
}

impl Classification {
    pub fn is_semidirect(self) -> bool {
        matches!(self, Classification::LeftSemidirect | Classification::RightSemidirect)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    pub order_g1: u64,
    pub order_g2: u64,
    pub joint_order: u64,
    pub intersection_order: u64,
    pub product_set_is_joint: bool,
    pub g1_normal: bool,
    pub g2_normal: bool,
    pub all_commute: bool,
    /// Indices `(i, j)` into the two groups' element lists with `g1_i g2_j ≠ g2_j g1_i`.
    pub noncommuting_pair: Option<(usize, usize)>,
    pub joint_descriptor: GroupDescriptor,
    pub classification: Classification,
}

/// How the group generated by `g1 ∪ g2` decomposes.
pub fn product_structure<T: GroupElement>(
    g1: &FiniteGroup<T>,
    g2: &FiniteGroup<T>,
    cap: usize,
) -> Result<(ProductReport, FiniteGroup<T>)> {
    let mut gens: Vec<T> = g1.generators().to_vec();
    gens.extend(g2.generators().iter().cloned());
    let joint = generate_group(g1.identity(), &gens, cap)?;
    let inter = g1.elements().iter().filter(|x| g2.contains(x)).count() as u64;
    let (o1, o2) = (g1.order() as u64, g2.order() as u64);
    let jo = joint.order() as u64;
    let product_set_is_joint = o1 * o2 == jo * inter;
    let g1_normal = g1.is_normal_in(&joint);
    let g2_normal = g2.is_normal_in(&joint);
    let mut noncommuting_pair = None;
    'outer: for (i, a) in g1.elements().iter().enumerate() {
        for (j, b) in g2.elements().iter().enumerate() {
            if a.compose(b) != b.compose(a) {
                noncommuting_pair = Some((i, j));
                break 'outer;
            }
        }
    }
    let all_commute = noncommuting_pair.is_none();
    let classification = if !product_set_is_joint {
        Classification::NotAProduct
    } else if all_commute && inter == 1 {
        Classification::Direct
    } else if g1_normal && !g2_normal {
        Classification::LeftSemidirect
    } else if g2_normal && !g1_normal {
        Classification::RightSemidirect
    } else {
        Classification::Neither
    };
    let report = ProductReport {
        order_g1: o1,
        order_g2: o2,
        joint_order: jo,
        intersection_order: inter,
        product_set_is_joint,
        g1_normal,
        g2_normal,
        all_commute,
        noncommuting_pair,
        joint_descriptor: identify_group(&joint),
        classification,
    };
    Ok((report, joint))
}

/// Effective divisor: points with positive multiplicities, sorted by coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointDivisor {
    points: Vec<(ProjPoint, u32)>,
}

impl PointDivisor {
    pub fn new(points: impl IntoIterator<Item = (ProjPoint, u32)>) -> Result<PointDivisor> {
        let mut merged: BTreeMap<ProjPoint, u32> = BTreeMap::new();
        let mut field: Option<Field> = None;
        for (p, m) in points {
            if m == 0 {
                continue;
            }
            match &field {
                None => field = Some(p.field().clone()),
                Some(f) if f != p.field() => {
                    return Err(Error::IncompatibleFields("divisor points over different fields".into()))
                }
                _ => {}
            }
            *merged.entry(p).or_insert(0) += m;
        }
        Ok(PointDivisor {
            points: merged.into_iter().collect(),
        })
    }

    pub fn points(&self) -> &[(ProjPoint, u32)] {
        &self.points
    }

    pub fn degree(&self) -> u64 {
        self.points.iter().map(|(_, m)| *m as u64).sum()
    }

    pub fn support_size(&self) -> usize {
        self.points.len()
    }

    pub fn multiplicity(&self, p: &ProjPoint) -> u32 {
        self.points.iter().find(|(q, _)| q == p).map(|(_, m)| *m).unwrap_or(0)
    }

    pub fn field(&self) -> Option<&Field> {
        self.points.first().map(|(p, _)| p.field())
    }

    pub fn lift(&self, dst: &Field) -> Result<PointDivisor> {
        PointDivisor::new(
            self.points
                .iter()
                .map(|(p, m)| Ok((p.lift(dst)?, *m)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn add(&self, o: &PointDivisor) -> Result<PointDivisor> {
        let (a, b) = self.to_common(o)?;
        PointDivisor::new(a.points.into_iter().chain(b.points))
    }

    /// Equality after moving both divisors to a common field.
    pub fn same_as(&self, o: &PointDivisor) -> Result<bool> {
        let (a, b) = self.to_common(o)?;
        Ok(a == b)
    }

    fn to_common(&self, o: &PointDivisor) -> Result<(PointDivisor, PointDivisor)> {
        match (self.field(), o.field()) {
            (Some(f1), Some(f2)) => {
                let f = common_field(f1, f2)?;
                Ok((self.lift(&f)?, o.lift(&f)?))
            }
            _ => Ok((self.clone(), o.clone())),
        }
    }

    pub fn to_json(&self) -> Vec<(Vec<String>, u32)> {
        self.points.iter().map(|(p, m)| (p.to_strings(), *m)).collect()
    }
}

/// `Σ_{g ∈ G} g(x)`: each orbit point carries the stabilizer order.
pub fn orbit(g: &FiniteProjectivityGroup, x: &ProjPoint) -> Result<PointDivisor> {
    let field = common_field(g.identity().field(), x.field())?;
    let x = x.lift(&field)?;
    let pts = g
        .elements()
        .iter()
        .map(|s| Ok((s.apply(&x)?.lift(&field)?, 1)))
        .collect::<Result<Vec<_>>>()?;
    PointDivisor::new(pts)
}
