//! Sparse multivariate polynomials over a finite field, plus the univariate
//! machinery (factorization, splitting roots) every other module leans on.

mod dense;
mod resultant;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub use dense::{cmp_poly, UPoly};
pub use resultant::{resultant, subresultant_resultant, sylvester_resultant};
pub use text::{parse_polynomial, parse_polynomial_vars, DEFAULT_VARS};

use crate::arith;
use crate::error::{Error, Result};
use crate::gf::{embed, Field, Fq};

pub const MAX_VARS: usize = 6;

/// Exponent vector; entries past `nvars` are zero.
pub type Mono = [u16; MAX_VARS];

/// Sparse polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Mono, Fq>,
}

pub(crate) fn mono_add(a: &Mono, b: &Mono) -> Mono {
    let mut m = [0u16; MAX_VARS];
    for i in 0..MAX_VARS {
        m[i] = a[i] + b[i];
    }
    m
}

fn mono_deg(a: &Mono) -> u32 {
    a.iter().map(|&e| e as u32).sum()
}

fn grlex(a: &Mono, b: &Mono) -> std::cmp::Ordering {
    mono_deg(a).cmp(&mono_deg(b)).then_with(|| a.cmp(b))
}

impl Polynomial {
    pub fn zero(field: &Field, nvars: usize) -> Polynomial {
        assert!((1..=MAX_VARS).contains(&nvars), "unsupported variable count {nvars}");
        Polynomial {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, nvars: usize, a: Fq) -> Polynomial {
        let mut p = Polynomial::zero(field, nvars);
        p.add_term([0; MAX_VARS], a);
        p
    }

    pub fn one(field: &Field, nvars: usize) -> Polynomial {
        Polynomial::constant(field, nvars, field.one())
    }

    pub fn var(field: &Field, nvars: usize, i: usize) -> Polynomial {
        assert!(i < nvars);
        let mut m = [0; MAX_VARS];
        m[i] = 1;
        Polynomial::monomial(field, nvars, m, field.one())
    }

    pub fn monomial(field: &Field, nvars: usize, m: Mono, a: Fq) -> Polynomial {
        let mut p = Polynomial::zero(field, nvars);
        p.add_term(m, a);
        p
    }

    pub fn from_terms(field: &Field, nvars: usize, terms: impl IntoIterator<Item = (Mono, Fq)>) -> Polynomial {
        let mut p = Polynomial::zero(field, nvars);
        for (m, a) in terms {
            p.add_term(m, a);
        }
        p
    }

    /// Embeds a univariate polynomial as a polynomial in variable `var`.
    pub fn from_upoly(u: &UPoly, nvars: usize, var: usize) -> Polynomial {
        let mut p = Polynomial::zero(u.field(), nvars);
        for (i, &a) in u.coeffs().iter().enumerate() {
            let mut m = [0; MAX_VARS];
            m[var] = i as u16;
            p.add_term(m, a);
        }
        p
    }

    /// The univariate polynomial in `var`, if no other variable occurs.
    pub fn to_upoly(&self, var: usize) -> Option<UPoly> {
        let mut c = Vec::new();
        for (m, &a) in &self.terms {
            if m.iter().enumerate().any(|(i, &e)| i != var && e != 0) {
                return None;
            }
            let d = m[var] as usize;
            if c.len() <= d {
                c.resize(d + 1, Fq::ZERO);
            }
            c[d] = a;
        }
        Some(UPoly::new(&self.field, c))
    }

    pub(crate) fn add_term(&mut self, m: Mono, a: Fq) {
        if a.is_zero() {
            return;
        }
        let f = self.field.clone();
        match self.terms.get_mut(&m) {
            Some(c) => {
                *c = f.add(*c, a);
                if c.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, a);
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Fq)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Mono) -> Fq {
        self.terms.get(m).copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| mono_deg(m) == 0)
    }

    pub fn constant_value(&self) -> Option<Fq> {
        self.is_constant().then(|| self.coeff(&[0; MAX_VARS]))
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(mono_deg).max().unwrap_or(0) as usize
    }

    pub fn degree_in(&self, var: usize) -> usize {
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0) as usize
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m[var] != 0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(mono_deg);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Lex-leading term (variable 0 most significant).
    pub fn leading_term(&self) -> Option<(Mono, Fq)> {
        self.terms.iter().next_back().map(|(m, a)| (*m, *a))
    }

    /// Leading term in graded-lex order.
    pub fn grlex_leading(&self) -> Option<(Mono, Fq)> {
        self.terms
            .iter()
            .max_by(|a, b| grlex(a.0, b.0))
            .map(|(m, a)| (*m, *a))
    }

    /// Scales so that the graded-lex leading coefficient is one.
    pub fn normalized(&self) -> Polynomial {
        match self.grlex_leading() {
            None => self.clone(),
            Some((_, a)) => self.scale(self.field.inv(a).unwrap()),
        }
    }

    pub fn scale(&self, a: Fq) -> Polynomial {
        let f = &self.field;
        Polynomial::from_terms(f, self.nvars, self.terms.iter().map(|(m, &c)| (*m, f.mul(a, c))))
    }

    fn check_compat(&self, o: &Polynomial) {
        assert!(
            self.field == o.field && self.nvars == o.nvars,
            "mixing polynomials from different rings ({:?}/{} vs {:?}/{})",
            self.field,
            self.nvars,
            o.field,
            o.nvars
        );
    }

    pub fn pow(&self, mut e: u64) -> Polynomial {
        let mut base = self.clone();
        let mut r = Polynomial::one(&self.field, self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        r
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let f = &self.field;
        let p = f.p();
        Polynomial::from_terms(
            f,
            self.nvars,
            self.terms.iter().filter(|(m, _)| m[var] > 0).map(|(m, &a)| {
                let mut m2 = *m;
                m2[var] -= 1;
                (m2, f.mul(f.from_i64((m[var] as u64 % p) as i64), a))
            }),
        )
    }

    pub fn eval(&self, point: &[Fq]) -> Fq {
        assert_eq!(point.len(), self.nvars);
        let f = &self.field;
        let mut acc = Fq::ZERO;
        for (m, &a) in &self.terms {
            let mut t = a;
            for (i, &x) in point.iter().enumerate() {
                if m[i] > 0 {
                    t = f.mul(t, f.pow(x, m[i] as u128));
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Substitutes `subs[i]` for variable `i`; the results live in the ring of
    /// the substituted polynomials.
    pub fn compose(&self, subs: &[Polynomial]) -> Polynomial {
        assert_eq!(subs.len(), self.nvars);
        let target = &subs[0];
        let mut cache: Vec<Vec<Polynomial>> = subs
            .iter()
            .map(|s| vec![Polynomial::one(&target.field, target.nvars), s.clone()])
            .collect();
        let mut acc = Polynomial::zero(&target.field, target.nvars);
        for (m, &a) in &self.terms {
            let mut t = Polynomial::constant(&target.field, target.nvars, a);
            for i in 0..self.nvars {
                let e = m[i] as usize;
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e {
                    let next = &cache[i][cache[i].len() - 1] * &subs[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][e];
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Substitutes univariate polynomials for every variable.
    pub fn eval_upoly(&self, subs: &[UPoly]) -> UPoly {
        assert_eq!(subs.len(), self.nvars);
        let f = &self.field;
        let mut cache: Vec<Vec<UPoly>> = subs.iter().map(|s| vec![UPoly::one(f), s.clone()]).collect();
        let mut acc = UPoly::zero(f);
        for (m, &a) in &self.terms {
            let mut t = UPoly::constant(f, a);
            for i in 0..self.nvars {
                let e = m[i] as usize;
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e {
                    let next = cache[i][cache[i].len() - 1].mul(&subs[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][e]);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Sets variable `var` to the constant `a` (the variable stays in the ring).
    pub fn eval_var(&self, var: usize, a: Fq) -> Polynomial {
        let f = &self.field;
        Polynomial::from_terms(
            f,
            self.nvars,
            self.terms.iter().map(|(m, &c)| {
                let mut m2 = *m;
                m2[var] = 0;
                (m2, f.mul(c, f.pow(a, m[var] as u128)))
            }),
        )
    }

    /// Coefficients with respect to `var`: entry `i` multiplies `var^i`.
    pub fn coeffs_in(&self, var: usize) -> Vec<Polynomial> {
        let mut out = vec![Polynomial::zero(&self.field, self.nvars); self.degree_in(var) + 1];
        if self.is_zero() {
            return Vec::new();
        }
        for (m, &a) in &self.terms {
            let mut m2 = *m;
            let e = m2[var] as usize;
            m2[var] = 0;
            out[e].add_term(m2, a);
        }
        out
    }

    pub fn from_coeffs_in(field: &Field, nvars: usize, var: usize, coeffs: &[Polynomial]) -> Polynomial {
        let mut p = Polynomial::zero(field, nvars);
        for (i, c) in coeffs.iter().enumerate() {
            for (m, &a) in &c.terms {
                let mut m2 = *m;
                m2[var] += i as u16;
                p.add_term(m2, a);
            }
        }
        p
    }

    /// Homogenizes by the variable `hvar`, which must not occur.
    pub fn homogenize(&self, hvar: usize) -> Polynomial {
        let d = self.total_degree() as u16;
        let f = &self.field;
        Polynomial::from_terms(
            f,
            self.nvars,
            self.terms.iter().map(|(m, &a)| {
                let mut m2 = *m;
                m2[hvar] += d - mono_deg(m) as u16;
                (m2, a)
            }),
        )
    }

    /// Sets `var = 1`.
    pub fn dehomogenize(&self, var: usize) -> Polynomial {
        self.eval_var(var, self.field.one())
    }

    /// Changes the number of variables; `map[i]` is the new index of variable `i`.
    pub fn remap_vars(&self, nvars: usize, map: &[usize]) -> Polynomial {
        let f = &self.field;
        Polynomial::from_terms(
            f,
            nvars,
            self.terms.iter().map(|(m, &a)| {
                let mut m2 = [0; MAX_VARS];
                for (i, &j) in map.iter().enumerate() {
                    m2[j] += m[i];
                }
                (m2, a)
            }),
        )
    }

    pub fn lift(&self, dst: &Field) -> Result<Polynomial> {
        let mut p = Polynomial::zero(dst, self.nvars);
        for (m, &a) in &self.terms {
            p.add_term(*m, embed(&self.field, dst, a)?);
        }
        Ok(p)
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        self.check_compat(d);
        let (dm, da) = d.leading_term()?;
        let f = &self.field;
        let inv = f.inv(da).unwrap();
        let mut q = Polynomial::zero(f, self.nvars);
        let mut r = self.clone();
        while let Some((rm, ra)) = r.leading_term() {
            if (0..MAX_VARS).any(|i| rm[i] < dm[i]) {
                return None;
            }
            let mut tm = [0u16; MAX_VARS];
            for i in 0..MAX_VARS {
                tm[i] = rm[i] - dm[i];
            }
            let tc = f.mul(ra, inv);
            q.add_term(tm, tc);
            for (m, &a) in &d.terms {
                r.add_term(mono_add(m, &tm), f.neg(f.mul(tc, a)));
            }
        }
        Some(q)
    }

    /// Remainder of division by `d` with respect to lex order; zero iff `d | self`.
    pub fn rem_lex(&self, d: &Polynomial) -> Polynomial {
        self.check_compat(d);
        let (dm, da) = d.leading_term().expect("division by zero polynomial");
        let f = &self.field;
        let inv = f.inv(da).unwrap();
        let mut r = self.clone();
        let mut rem = Polynomial::zero(f, self.nvars);
        while let Some((rm, ra)) = r.leading_term() {
            if (0..MAX_VARS).any(|i| rm[i] < dm[i]) {
                rem.add_term(rm, ra);
                r.terms.remove(&rm);
                continue;
            }
            let mut tm = [0u16; MAX_VARS];
            for i in 0..MAX_VARS {
                tm[i] = rm[i] - dm[i];
            }
            let tc = f.mul(ra, inv);
            for (m, &a) in &d.terms {
                r.add_term(mono_add(m, &tm), f.neg(f.mul(tc, a)));
            }
        }
        rem
    }

    /// Bivariate squarefree test: some line restriction is squarefree of full
    /// degree. Lines are drawn over small extensions.
    pub fn is_squarefree_bivariate(&self, seed: u64) -> Result<bool> {
        use rand::SeedableRng;
        assert_eq!(self.nvars, 2);
        if self.is_zero() {
            return Ok(false);
        }
        let d = self.total_degree();
        if d == 0 {
            return Ok(true);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for j in 1..=6 {
            let ext = match self.field.extension(j) {
                Ok(e) if j == 1 || e.order() <= 1 << 32 => e,
                _ => break,
            };
            let lifted = self.lift(&ext)?;
            for _ in 0..12 {
                // x = a0 + a1 t, y = b0 + b1 t
                let (a0, a1, b0, b1) = (ext.random(&mut rng), ext.random(&mut rng), ext.random(&mut rng), ext.random(&mut rng));
                let g = lifted.eval_upoly(&[
                    UPoly::new(&ext, vec![a0, a1]),
                    UPoly::new(&ext, vec![b0, b1]),
                ]);
                if g.degree() == d && g.is_squarefree() {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        self.check_compat(o);
        let mut r = self.clone();
        for (m, &a) in &o.terms {
            r.add_term(*m, a);
        }
        r
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        self.check_compat(o);
        let mut r = self.clone();
        for (m, &a) in &o.terms {
            r.add_term(*m, self.field.neg(a));
        }
        r
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let f = &self.field;
        Polynomial::from_terms(f, self.nvars, self.terms.iter().map(|(m, &a)| (*m, f.neg(a))))
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        self.check_compat(o);
        let f = &self.field;
        let mut acc: BTreeMap<Mono, Fq> = BTreeMap::new();
        for (ma, &a) in &self.terms {
            for (mb, &b) in &o.terms {
                let m = mono_add(ma, mb);
                let v = f.mul(a, b);
                let e = acc.entry(m).or_insert(Fq::ZERO);
                *e = f.add(*e, v);
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Polynomial {
            field: f.clone(),
            nvars: self.nvars,
            terms: acc,
        }
    }
}

/// `factor_univariate`: monic irreducible factors with exponents.
pub fn factor_univariate(f: &Polynomial, seed: u64) -> Result<Vec<(UPoly, u32)>> {
    let u = univariate_of(f)?;
    if u.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(u.factor(seed))
}

/// `squarefree_part` of a univariate polynomial (in whichever variable it uses).
pub fn squarefree_part(f: &Polynomial) -> Result<Polynomial> {
    let var = (0..f.nvars()).find(|&v| f.uses_var(v)).unwrap_or(0);
    let u = f.to_upoly(var).ok_or_else(|| Error::InvalidInput("expected a univariate polynomial".into()))?;
    if u.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(Polynomial::from_upoly(&u.squarefree_part(), f.nvars(), var))
}

fn univariate_of(f: &Polynomial) -> Result<UPoly> {
    let var = (0..f.nvars()).find(|&v| f.uses_var(v)).unwrap_or(0);
    f.to_upoly(var)
        .ok_or_else(|| Error::InvalidInput("expected a univariate polynomial".into()))
}

/// Roots of a univariate polynomial in its splitting extension.
#[derive(Clone, Debug)]
pub struct RootMultiset {
    pub ext: Field,
    /// `(root, multiplicity)` sorted by root.
    pub roots: Vec<(Fq, u32)>,
}

impl RootMultiset {
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|(_, m)| *m as usize).sum()
    }
}

/// Finds the least `e <= ext_cap` such that `f` splits over `F_{q^e}` and
/// returns all roots there.
pub fn splitting_roots(f: &UPoly, ext_cap: usize) -> Result<RootMultiset> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let e = f.splitting_degree();
    if e > ext_cap {
        return Err(Error::ExtensionCapExceeded { cap: ext_cap });
    }
    let ext = f.field().extension(e)?;
    roots_over(f, &ext)
}

/// All roots of `f` over a given extension, which must split it.
pub fn roots_over(f: &UPoly, ext: &Field) -> Result<RootMultiset> {
    let lifted = f.lift(ext)?;
    let roots = lifted.roots_with_multiplicity();
    let total: usize = roots.iter().map(|(_, m)| *m as usize).sum();
    if total != f.degree() {
        return Err(Error::ExtensionCapExceeded { cap: ext.k() / f.field().k() });
    }
    Ok(RootMultiset { ext: ext.clone(), roots })
}

/// Least common extension degree (over `base`) that splits all of `polys`.
pub fn common_splitting_degree(polys: &[UPoly]) -> usize {
    polys
        .iter()
        .filter(|p| !p.is_zero())
        .fold(1u64, |acc, p| arith::lcm(acc, p.splitting_degree() as u64)) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    #[test]
    fn splitting_examples() {
        let f13 = make_field(13, 1).unwrap();
        let u = UPoly::from_i64s(&f13, &[-2, 1]).pow(3).mul(&UPoly::from_i64s(&f13, &[1, 1]));
        let r = splitting_roots(&u, 12).unwrap();
        assert_eq!(r.ext.k(), 1);
        assert_eq!(r.roots, vec![(f13.from_i64(2), 3), (f13.from_i64(-1), 1)]);

        let f5 = make_field(5, 1).unwrap();
        assert!((0..5).all(|r| (r * r) % 5 != 2));
        let r = splitting_roots(&UPoly::from_i64s(&f5, &[-27, 0, 1]), 12).unwrap();
        assert_eq!(r.ext.order(), 25);
        assert_eq!(r.roots.len(), 2);
        for (x, m) in &r.roots {
            assert_eq!(*m, 1);
            assert_eq!(r.ext.square(*x), r.ext.from_i64(27));
        }

        let r = splitting_roots(&UPoly::from_i64s(&f13, &[64, 0, 0, 1]), 12).unwrap();
        assert_eq!(r.degree(), 3);
        assert!(r.roots.iter().any(|(x, _)| *x == r.ext.from_i64(-4)));
        for (x, _) in &r.roots {
            assert_eq!(r.ext.pow(*x, 3), r.ext.from_i64(-64));
        }
    }

    #[test]
    fn extension_cap_enforced() {
        let f2 = make_field(2, 1).unwrap();
        // x^5 + x^2 + 1 is irreducible over F_2
        let u = UPoly::from_i64s(&f2, &[1, 0, 1, 0, 0, 1]);
        assert_eq!(splitting_roots(&u, 4).unwrap_err(), Error::ExtensionCapExceeded { cap: 4 });
    }

    #[test]
    fn multivariate_exact_division() {
        let f = make_field(7, 1).unwrap();
        let x = Polynomial::var(&f, 2, 0);
        let y = Polynomial::var(&f, 2, 1);
        let a = &(&x * &y) + &Polynomial::one(&f, 2);
        let b = &(&x * &x) - &y;
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.rem_lex(&b), Polynomial::zero(&f, 2));
        assert!((&prod + &x).div_exact(&a).is_none());
    }

    #[test]
    fn homogenize_round_trip() {
        let f = make_field(13, 1).unwrap();
        let g = parse_polynomial("y^2*x+(x+1)^2*(x-8)", &f, 3).unwrap();
        let h = g.homogenize(2);
        assert!(h.is_homogeneous());
        assert_eq!(h.total_degree(), 3);
        assert_eq!(h.dehomogenize(2), g);
    }

    #[test]
    fn squarefree_bivariate() {
        let f = make_field(7, 1).unwrap();
        let g = parse_polynomial("y^2-x^3-x-1", &f, 2).unwrap();
        assert!(g.is_squarefree_bivariate(0).unwrap());
        let sq = &g * &g;
        assert!(!sq.is_squarefree_bivariate(0).unwrap());
    }
}
