//! Resultants with respect to one variable, with coefficients in the
//! polynomial ring of the remaining variables.
//!
//! Orientation: `Res(f, g) = lc(g)^{deg f} Π_{g(β)=0} f(β)`, which is the
//! textbook Sylvester determinant times `(-1)^{deg f · deg g}`. With this
//! choice `Res_t(t - a, t - b) = b - a`.

use super::Polynomial;
use crate::error::{Error, Result};

/// Above this degree in the eliminated variable the subresultant sequence is used.
const SYLVESTER_MAX_DEGREE: usize = 6;

pub fn resultant(f: &Polynomial, g: &Polynomial, var: usize) -> Result<Polynomial> {
    check(f, g, var)?;
    if f.degree_in(var).max(g.degree_in(var)) <= SYLVESTER_MAX_DEGREE {
        sylvester_resultant(f, g, var)
    } else {
        subresultant_resultant(f, g, var)
    }
}

fn check(f: &Polynomial, g: &Polynomial, var: usize) -> Result<()> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroInput);
    }
    if var >= f.nvars() || f.nvars() != g.nvars() || f.field() != g.field() {
        return Err(Error::DimensionMismatch(format!(
            "resultant in variable {var} of polynomials in {} and {} variables",
            f.nvars(),
            g.nvars()
        )));
    }
    Ok(())
}

fn flip(r: Polynomial, m: usize, n: usize) -> Polynomial {
    if m * n % 2 == 1 {
        -&r
    } else {
        r
    }
}

/// Sylvester determinant by fraction-free (Bareiss) elimination.
pub fn sylvester_resultant(f: &Polynomial, g: &Polynomial, var: usize) -> Result<Polynomial> {
    check(f, g, var)?;
    let (fc, gc) = (f.coeffs_in(var), g.coeffs_in(var));
    let (m, n) = (fc.len() - 1, gc.len() - 1);
    let zero = Polynomial::zero(f.field(), f.nvars());
    if m == 0 && n == 0 {
        return Ok(Polynomial::one(f.field(), f.nvars()));
    }
    let size = m + n;
    // rows of f (n of them) then rows of g (m of them), highest coefficient first
    let mut mat: Vec<Vec<Polynomial>> = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (j, c) in fc.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        mat.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (j, c) in gc.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        mat.push(row);
    }
    Ok(flip(bareiss_det(mat), m, n))
}

fn bareiss_det(mut a: Vec<Vec<Polynomial>>) -> Polynomial {
    let n = a.len();
    let field = a[0][0].field().clone();
    let nvars = a[0][0].nvars();
    let mut negate = false;
    let mut prev = Polynomial::one(&field, nvars);
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Polynomial::zero(&field, nvars);
        };
        if piv != k {
            a.swap(piv, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = Polynomial::zero(&field, nvars);
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

type Coeffs = Vec<Polynomial>;

fn trim(c: &mut Coeffs) {
    while c.last().is_some_and(|p| p.is_zero()) {
        c.pop();
    }
}

/// `lc(b)^{deg a - deg b + 1} a mod b`.
fn prem(a: &Coeffs, b: &Coeffs) -> Coeffs {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut e = a.len() - b.len() + 1;
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            let t = &lr * bc;
            let idx = dr - db + i;
            r[idx] = &r[idx] - &t;
        }
        trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let s = lb.pow(e as u64);
        for c in r.iter_mut() {
            *c = &*c * &s;
        }
    }
    r
}

/// Subresultant polynomial remainder sequence, without content removal.
pub fn subresultant_resultant(f: &Polynomial, g: &Polynomial, var: usize) -> Result<Polynomial> {
    check(f, g, var)?;
    let field = f.field().clone();
    let nv = f.nvars();
    let one = Polynomial::one(&field, nv);
    let (m, n) = (f.degree_in(var), g.degree_in(var));
    let (mut a, mut b) = (f.coeffs_in(var), g.coeffs_in(var));
    let mut s_neg = false;
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
        if (a.len() - 1) % 2 == 1 && (b.len() - 1) % 2 == 1 {
            s_neg = !s_neg;
        }
    }
    if b.len() == 1 {
        let r = b[0].pow((a.len() - 1) as u64);
        return Ok(flip(if s_neg { -&r } else { r }, m, n));
    }
    let mut gg = one.clone();
    let mut h = one.clone();
    loop {
        let (da, db) = (a.len() - 1, b.len() - 1);
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s_neg = !s_neg;
        }
        let r = prem(&a, &b);
        if r.is_empty() {
            return Ok(Polynomial::zero(&field, nv));
        }
        let denom = &gg * &h.pow(delta as u64);
        a = b;
        b = r
            .iter()
            .map(|c| c.div_exact(&denom).expect("subresultant division is exact"))
            .collect();
        gg = a[a.len() - 1].clone();
        if delta > 0 {
            let num = gg.pow(delta as u64);
            h = num
                .div_exact(&h.pow(delta as u64 - 1))
                .expect("subresultant division is exact");
        }
        if b.len() == 1 {
            let da = (a.len() - 1) as u64;
            let num = b[0].pow(da);
            let res = num
                .div_exact(&h.pow(da - 1))
                .expect("subresultant division is exact");
            return Ok(flip(if s_neg { -&res } else { res }, m, n));
        }
    }
}
