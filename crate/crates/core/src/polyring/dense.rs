//! Dense univariate polynomials over a [`Field`].
//!
//! Factorization follows the usual squarefree / distinct-degree /
//! equal-degree pipeline. Equal-degree splitting is randomized; every entry
//! point that needs randomness takes an explicit seed.

use std::cmp::Ordering;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::gf::{embed, Field, Fq};
use crate::error::Result;

/// Coefficients low-to-high; never has a trailing zero.
#[derive(Clone, PartialEq, Eq)]
pub struct UPoly {
    field: Field,
    c: Vec<Fq>,
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly[")?;
        for (i, a) in self.c.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.field.fmt_elem(*a))?;
        }
        write!(f, "]")
    }
}

impl UPoly {
    pub fn new(field: &Field, mut c: Vec<Fq>) -> UPoly {
        while c.last().is_some_and(|a| a.is_zero()) {
            c.pop();
        }
        UPoly { field: field.clone(), c }
    }

    pub fn zero(field: &Field) -> UPoly {
        UPoly::new(field, Vec::new())
    }

    pub fn constant(field: &Field, a: Fq) -> UPoly {
        UPoly::new(field, vec![a])
    }

    pub fn one(field: &Field) -> UPoly {
        UPoly::constant(field, field.one())
    }

    /// The polynomial `t`.
    pub fn x(field: &Field) -> UPoly {
        UPoly::new(field, vec![field.zero(), field.one()])
    }

    pub fn monomial(field: &Field, a: Fq, deg: usize) -> UPoly {
        let mut c = vec![field.zero(); deg + 1];
        c[deg] = a;
        UPoly::new(field, c)
    }

    /// `t - a`
    pub fn linear(field: &Field, root: Fq) -> UPoly {
        UPoly::new(field, vec![field.neg(root), field.one()])
    }

    pub fn from_i64s(field: &Field, c: &[i64]) -> UPoly {
        UPoly::new(field, c.iter().map(|&v| field.from_i64(v)).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.c.get(i).copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    /// Degree; `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with `deg 0 = 0`.
    pub fn degree(&self) -> usize {
        self.deg().unwrap_or(0)
    }

    pub fn lc(&self) -> Fq {
        self.c.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let f = &self.field;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect();
        UPoly::new(f, c)
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let f = &self.field;
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect();
        UPoly::new(f, c)
    }

    pub fn neg(&self) -> UPoly {
        let f = &self.field;
        UPoly::new(f, self.c.iter().map(|&a| f.neg(a)).collect())
    }

    pub fn scale(&self, a: Fq) -> UPoly {
        let f = &self.field;
        UPoly::new(f, self.c.iter().map(|&b| f.mul(a, b)).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero(&self.field);
        }
        let f = &self.field;
        let mut c = vec![Fq::ZERO; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        UPoly::new(f, c)
    }

    pub fn pow(&self, mut e: u64) -> UPoly {
        let mut base = self.clone();
        let mut r = UPoly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        r
    }

    /// Shift by `t^s`.
    pub fn shift(&self, s: usize) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![Fq::ZERO; s];
        c.extend_from_slice(&self.c);
        UPoly::new(&self.field, c)
    }

    /// Euclidean division. Panics if `d` is zero.
    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let f = &self.field;
        if self.c.len() < d.c.len() {
            return (UPoly::zero(f), self.clone());
        }
        let inv = f.inv(d.lc()).unwrap();
        let mut r = self.c.clone();
        let dn = d.c.len() - 1;
        let mut q = vec![Fq::ZERO; r.len() - dn];
        for i in (dn..r.len()).rev() {
            let c = r[i];
            if c.is_zero() {
                continue;
            }
            let m = f.mul(c, inv);
            q[i - dn] = m;
            for j in 0..=dn {
                r[i - dn + j] = f.sub(r[i - dn + j], f.mul(m, d.c[j]));
            }
        }
        r.truncate(dn);
        (UPoly::new(f, q), UPoly::new(f, r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.divrem(d).1
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn div_exact(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lc()).unwrap();
        self.scale(inv)
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UPoly {
        let f = &self.field;
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| f.mul(f.from_i64((i as u64 % f.p()) as i64), a))
            .collect();
        UPoly::new(f, c)
    }

    pub fn eval(&self, x: Fq) -> Fq {
        let f = &self.field;
        self.c.iter().rev().fold(Fq::ZERO, |acc, &a| f.add(f.mul(acc, x), a))
    }

    /// `self(g(t))`
    pub fn compose(&self, g: &UPoly) -> UPoly {
        let mut acc = UPoly::zero(&self.field);
        for &a in self.c.iter().rev() {
            acc = acc.mul(g).add(&UPoly::constant(&self.field, a));
        }
        acc
    }

    /// `self(t)^e mod m`
    pub fn powmod(&self, mut e: u128, m: &UPoly) -> UPoly {
        let mut base = self.rem(m);
        let mut r = UPoly::one(&self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m);
            }
        }
        r
    }

    /// Coefficients mapped along the fixed embedding into `dst`.
    pub fn lift(&self, dst: &Field) -> Result<UPoly> {
        let c = self
            .c
            .iter()
            .map(|&a| embed(&self.field, dst, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(UPoly::new(dst, c))
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_constant()
    }

    /// Coefficient-wise `p`-th root of a polynomial in `t^p`.
    fn pth_root(&self) -> UPoly {
        let f = &self.field;
        let p = f.p() as usize;
        let c = self.c.iter().step_by(p).map(|&a| f.pth_root(a)).collect();
        UPoly::new(f, c)
    }

    /// Squarefree decomposition: monic pairwise coprime `(g_i, e_i)` with
    /// `self = lc · Π g_i^{e_i}`.
    pub fn squarefree_decomposition(&self) -> Vec<(UPoly, u32)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let p = self.field.p() as u32;
        self.sqf_rec(1, p, &mut out);
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| cmp_poly(&a.0, &b.0)));
        out
    }

    fn sqf_rec(&self, mult: u32, p: u32, out: &mut Vec<(UPoly, u32)>) {
        let f = self.monic();
        let d = f.derivative();
        if d.is_zero() {
            if !f.is_constant() {
                f.pth_root().sqf_rec(mult * p, p, out);
            }
            return;
        }
        let mut c = f.gcd(&d);
        let mut w = f.div_exact(&c).unwrap();
        let mut i = 1u32;
        while !w.is_constant() {
            let y = w.gcd(&c);
            let z = w.div_exact(&y).unwrap();
            if !z.is_constant() {
                push_factor(out, z.monic(), i * mult);
            }
            i += 1;
            w = y;
            c = c.div_exact(&w).unwrap();
        }
        if !c.is_constant() {
            c.pth_root().sqf_rec(mult * p, p, out);
        }
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> UPoly {
        self.squarefree_decomposition()
            .into_iter()
            .fold(UPoly::one(&self.field), |acc, (g, _)| acc.mul(&g))
    }

    /// `t^{q^i} mod self` for `i = 0..=n`.
    fn frobenius_powers(&self, n: usize) -> Vec<UPoly> {
        let q = self.field.order() as u128;
        let mut v = Vec::with_capacity(n + 1);
        let mut h = UPoly::x(&self.field).rem(self);
        v.push(h.clone());
        for _ in 0..n {
            h = h.powmod(q, self);
            v.push(h.clone());
        }
        v
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.deg() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let frob = f.frobenius_powers(n);
        let x = UPoly::x(&f.field);
        if !frob[n].sub(&x).rem(&f).is_zero() {
            return false;
        }
        arith::factorize(n as u64)
            .iter()
            .all(|(r, _)| frob[n / *r as usize].sub(&x).gcd(&f).is_constant())
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    fn ddf(&self) -> Vec<(UPoly, usize)> {
        let mut out = Vec::new();
        let mut f = self.clone();
        let q = self.field.order() as u128;
        let x = UPoly::x(&self.field);
        let mut h = x.rem(&f);
        let mut d = 0;
        while let Some(n) = f.deg() {
            if n < 2 * (d + 1) {
                if n > 0 {
                    out.push((f.monic(), n));
                }
                break;
            }
            d += 1;
            h = h.powmod(q, &f);
            let g = h.sub(&x).gcd(&f);
            if !g.is_constant() {
                f = f.div_exact(&g).unwrap();
                h = h.rem(&f);
                out.push((g, d));
            }
        }
        out
    }

    /// Splits a monic squarefree product of degree-`d` irreducibles.
    fn edf(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<UPoly> {
        let n = self.degree();
        if n == d {
            return vec![self.clone()];
        }
        let field = &self.field;
        let q = field.order() as u128;
        loop {
            let a = UPoly::new(field, (0..n).map(|_| field.random(rng)).collect());
            if a.is_constant() {
                continue;
            }
            let b = if field.p() == 2 {
                // absolute trace to F_2 of F_{q^d}
                let mut t = a.rem(self);
                let mut acc = t.clone();
                for _ in 1..(field.k() * d) {
                    t = t.mul(&t).rem(self);
                    acc = acc.add(&t);
                }
                acc
            } else {
                let mut t = a.rem(self);
                let mut acc = t.clone();
                for _ in 1..d {
                    t = t.powmod(q, self);
                    acc = acc.mul(&t).rem(self);
                }
                acc.powmod((q - 1) / 2, self).sub(&UPoly::one(field))
            };
            let g = b.gcd(self);
            if !g.is_constant() && g.degree() < n {
                let h = self.div_exact(&g).unwrap();
                let mut out = g.edf(d, rng);
                out.extend(h.edf(d, rng));
                return out;
            }
        }
    }

    /// Monic irreducible factors with multiplicities, sorted by
    /// `(degree, coefficients)`. The leading coefficient is dropped.
    pub fn factor(&self, seed: u64) -> Vec<(UPoly, u32)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for (g, e) in self.squarefree_decomposition() {
            for (h, d) in g.ddf() {
                for irr in h.edf(d, &mut rng) {
                    out.push((irr, e));
                }
            }
        }
        out.sort_by(|a, b| cmp_poly(&a.0, &b.0).then(a.1.cmp(&b.1)));
        out
    }

    /// Degrees of the irreducible factors of a squarefree polynomial, via
    /// distinct-degree factorization only.
    pub fn factor_degrees(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for (h, d) in self.monic().ddf() {
            v.extend(std::iter::repeat_n(d, h.degree() / d));
        }
        v.sort_unstable();
        v
    }

    /// Distinct roots lying in the coefficient field, sorted.
    pub fn roots_in_field(&self) -> Vec<Fq> {
        self.roots_with_multiplicity()
            .into_iter()
            .map(|(r, _)| r)
            .collect()
    }

    /// Roots in the coefficient field with multiplicities, sorted by root.
    pub fn roots_with_multiplicity(&self) -> Vec<(Fq, u32)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let q = self.field.order() as u128;
        let x = UPoly::x(&self.field);
        for (g, e) in self.squarefree_decomposition() {
            let lin = x.powmod(q, &g).sub(&x).gcd(&g);
            if lin.is_constant() {
                continue;
            }
            for l in lin.edf(1, &mut rng) {
                out.push((self.field.neg(l.coeff(0)), e));
            }
        }
        out.sort();
        out
    }

    /// Least `e` such that every factor splits over `F_{q^e}`.
    pub fn splitting_degree(&self) -> usize {
        let mut deg = 1u64;
        for (g, _) in self.squarefree_decomposition() {
            for (_, d) in g.ddf() {
                deg = arith::lcm(deg, d as u64);
            }
        }
        deg as usize
    }

    /// Resultant `Res(f, g) = lc(g)^{deg f} Π_{g(β)=0} f(β)`, so that
    /// `Res(t - a, t - b) = b - a`. This is the Sylvester determinant with
    /// the rows of `g` on top.
    pub fn resultant(&self, o: &UPoly) -> Fq {
        let r = self.resultant_std(o);
        if self.degree() * o.degree() % 2 == 1 {
            self.field.neg(r)
        } else {
            r
        }
    }

    /// Textbook orientation `lc(f)^{deg g} Π_{f(α)=0} g(α)` (Euclidean algorithm).
    fn resultant_std(&self, o: &UPoly) -> Fq {
        let f = &self.field;
        if self.is_zero() || o.is_zero() {
            return Fq::ZERO;
        }
        let (mut a, mut b) = (self.clone(), o.clone());
        let mut res = f.one();
        loop {
            let (da, db) = (a.degree(), b.degree());
            if db == 0 {
                return f.mul(res, f.pow(b.lc(), da as u128));
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return Fq::ZERO;
            }
            let dr = r.degree();
            // Res(a,b) = (-1)^{da db} lc(b)^{da-dr} Res(b, r)
            if da * db % 2 == 1 {
                res = f.neg(res);
            }
            res = f.mul(res, f.pow(b.lc(), (da - dr) as u128));
            a = b;
            b = r;
        }
    }
}

fn push_factor(out: &mut Vec<(UPoly, u32)>, g: UPoly, e: u32) {
    if let Some(slot) = out.iter_mut().find(|(h, _)| *h == g) {
        slot.1 += e;
    } else {
        out.push((g, e));
    }
}

/// Order by degree, then coefficients from the top down.
pub fn cmp_poly(a: &UPoly, b: &UPoly) -> Ordering {
    a.c.len()
        .cmp(&b.c.len())
        .then_with(|| a.c.iter().rev().cmp(b.c.iter().rev()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn p(f: &Field, c: &[i64]) -> UPoly {
        UPoly::from_i64s(f, c)
    }

    #[test]
    fn cube_roots_of_unity_mod_7() {
        let f = make_field(7, 1).unwrap();
        let fac = p(&f, &[-1, 0, 0, 1]).factor(1);
        let roots: Vec<u64> = fac.iter().map(|(g, _)| f.neg(g.coeff(0)).index()).collect();
        let brute: Vec<u64> = (0..7u64).filter(|r| (r * r * r) % 7 == 1).collect();
        let mut sorted = roots.clone();
        sorted.sort();
        assert_eq!(sorted, brute);
        assert_eq!(brute, vec![1, 2, 4]);
    }

    #[test]
    fn x2_plus_1_irreducible_mod_7() {
        let f = make_field(7, 1).unwrap();
        assert!((0..7u64).all(|r| (r * r + 1) % 7 != 0));
        let fac = p(&f, &[1, 0, 1]).factor(0);
        assert_eq!(fac.len(), 1);
        assert_eq!(fac[0].0.degree(), 2);
    }

    #[test]
    fn repeated_linear_factor() {
        let f = make_field(13, 1).unwrap();
        let g = p(&f, &[-2, 1]).pow(3);
        assert_eq!(g.factor(9), vec![(p(&f, &[-2, 1]), 3)]);
    }

    #[test]
    fn inseparable_squarefree_part() {
        // x^5 - 3 over F_5 = (x - 3)^5
        let f = make_field(5, 1).unwrap();
        let g = p(&f, &[-3, 0, 0, 0, 0, 1]);
        assert_eq!(g.squarefree_part(), p(&f, &[-3, 1]));
        assert_eq!(g.squarefree_decomposition(), vec![(p(&f, &[-3, 1]), 5)]);
    }

    #[test]
    fn univariate_resultant_matches_evaluation() {
        let f = make_field(7, 1).unwrap();
        let a = p(&f, &[-2, 0, 0, 1]);
        let b = p(&f, &[-3, 1]);
        assert_eq!(a.resultant(&b), f.from_i64(4));
    }

    #[test]
    fn rabin_agrees_with_root_free_quadratics() {
        let f = make_field(11, 1).unwrap();
        for b in 0..11 {
            for c in 0..11 {
                let g = p(&f, &[c, b, 1]);
                let has_root = (0..11i64).any(|r| (r * r + b * r + c) % 11 == 0);
                assert_eq!(g.is_irreducible(), !has_root);
            }
        }
    }
}
