//! Central collineations: projectivities fixing a center and every line
//! through it. After moving the center to `(0:1:0)` they read
//! `(X : Y : Z) ↦ (X : βX + λY + δZ : Z)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fiber::{align, classify_center, frame_for, transform_form, PointClass};
use crate::arith;
use crate::curve::PlaneCurve;
use crate::error::{Error, Result};
use crate::gf::{Field, Fq};
use crate::polyring::{Polynomial, UPoly};
use crate::projective::{FiniteProjectivityGroup, ProjPoint, Projectivity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CollineationMode {
    Exact,
    Brute { q_cap: u64 },
}

pub const DEFAULT_BRUTE_Q_CAP: u64 = 64;

/// The normalized problem: `form` has its center at `(0:1:0)`.
struct Normalized {
    frame: Projectivity,
    form: Polynomial,
    /// Degree in `Y`; a solution satisfies `form∘σ = λ^D·form`.
    d_y: usize,
}

fn normalize(curve: &PlaneCurve, center: &ProjPoint) -> Result<Normalized> {
    let (c, p) = align(curve, center)?;
    if classify_center(&c, &p)? == PointClass::Invalid {
        return Err(Error::CenterSingular);
    }
    let frame = frame_for(&p, 1);
    let form = transform_form(c.form(), &frame);
    let d_y = form.degree_in(1);
    Ok(Normalized { frame, form, d_y })
}

fn sigma_subs(f: &Field, beta: Fq, lambda: Fq, delta: Fq) -> [Polynomial; 3] {
    let v = |i| Polynomial::var(f, 3, i);
    let y = &(&v(0).scale(beta) + &v(1).scale(lambda)) + &v(2).scale(delta);
    [v(0), y, v(2)]
}

fn is_solution(n: &Normalized, beta: Fq, lambda: Fq, delta: Fq) -> bool {
    let f = n.form.field();
    let c = f.pow(lambda, n.d_y as u128);
    n.form.compose(&sigma_subs(f, beta, lambda, delta)) == n.form.scale(c)
}

fn to_group(n: &Normalized, sols: &[(Fq, Fq, Fq)]) -> Result<FiniteProjectivityGroup> {
    let f = n.form.field();
    let (o, l) = (f.zero(), f.one());
    let mut els = Vec::with_capacity(sols.len());
    for &(beta, lambda, delta) in sols {
        let s = Projectivity::new(f, 3, &[l, o, o, beta, lambda, delta, o, o, l])?;
        els.push(s.conjugate_by(&n.frame));
    }
    els.sort_by_key(|e| e.entries().iter().map(|a| a.index()).collect::<Vec<_>>());
    els.dedup();
    FiniteProjectivityGroup::from_elements(els)
}

/// Restriction of the normalized form to the line `X = a·Z` (or `Z = 0` for
/// `a = None`), as a polynomial in `Y`.
fn chart(form: &Polynomial, a: Option<Fq>) -> UPoly {
    let f = form.field();
    let y = UPoly::x(f);
    match a {
        Some(a) => form.eval_upoly(&[UPoly::constant(f, a), y, UPoly::one(f)]),
        None => form.eval_upoly(&[UPoly::one(f), y, UPoly::zero(f)]),
    }
}

/// All `s` in the field with `H(λY + s) = c·H(Y)`.
fn slice_shifts(h: &UPoly, lambda: Fq, c: Fq) -> Vec<Fq> {
    let f = h.field();
    let p = f.p();
    let m = h.degree();
    let mut g = UPoly::zero(f);
    let mut lam_j = f.one();
    for j in 0..=m {
        // P_j(s) = Σ_{i≥j} h_i C(i,j) λ^j s^{i−j} − c h_j
        let mut coeffs = vec![f.zero(); m - j + 1];
        for i in j..=m {
            let b = f.from_i64(arith::binomial_mod(i as u64, j as u64, p) as i64);
            coeffs[i - j] = f.mul(f.mul(h.coeff(i), b), lam_j);
        }
        coeffs[0] = f.sub(coeffs[0], f.mul(c, h.coeff(j)));
        g = g.gcd(&UPoly::new(f, coeffs));
        lam_j = f.mul(lam_j, lambda);
    }
    if g.is_zero() {
        return f.elements().collect();
    }
    g.roots_in_field()
}

fn solve_exact(n: &Normalized, degree: usize) -> Result<Vec<(Fq, Fq, Fq)>> {
    let f = n.form.field();
    let charts: Vec<(Option<Fq>, UPoly)> = std::iter::once(None)
        .chain(f.elements().map(Some))
        .map(|a| (a, chart(&n.form, a)))
        .filter(|(_, h)| !h.is_constant())
        .take(3)
        .collect();
    if charts.len() < 2 {
        return Err(Error::ExactModeDegenerate(
            "fewer than two lines through the center carry a nonconstant restriction".into(),
        ));
    }
    let n_roots = (degree * degree.saturating_sub(1)).max(1) as u64;
    let shift_at = |a: Option<Fq>, beta: Fq, delta: Fq| match a {
        Some(a) => f.add(f.mul(beta, a), delta),
        None => beta,
    };
    let mut sols = Vec::new();
    for lambda in f.roots_of_unity(n_roots) {
        let c = f.pow(lambda, n.d_y as u128);
        let sets: Vec<Vec<Fq>> = charts.iter().map(|(_, h)| slice_shifts(h, lambda, c)).collect();
        let (a1, a2) = (charts[0].0, charts[1].0);
        for &s1 in &sets[0] {
            for &s2 in &sets[1] {
                let (beta, delta) = match (a1, a2) {
                    (None, Some(a2)) => (s1, f.sub(s2, f.mul(s1, a2))),
                    (Some(a1), Some(a2)) => {
                        let beta = f.div(f.sub(s1, s2), f.sub(a1, a2));
                        (beta, f.sub(s1, f.mul(beta, a1)))
                    }
                    _ => unreachable!("charts are distinct and only the first can be at infinity"),
                };
                if let Some((a3, _)) = charts.get(2) {
                    if sets[2].binary_search(&shift_at(*a3, beta, delta)).is_err() {
                        continue;
                    }
                }
                if is_solution(n, beta, lambda, delta) {
                    sols.push((beta, lambda, delta));
                }
            }
        }
    }
    Ok(sols)
}

fn solve_brute(n: &Normalized, q_cap: u64) -> Result<Vec<(Fq, Fq, Fq)>> {
    let f = n.form.field();
    if f.order() > q_cap {
        return Err(Error::BruteCapExceeded { q: f.order(), cap: q_cap });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xb7u64);
    let probes: Vec<([Fq; 3], Fq)> = (0..6)
        .map(|_| {
            let v = [f.random(&mut rng), f.random(&mut rng), f.random(&mut rng)];
            (v, n.form.eval(&v))
        })
        .collect();
    let mut sols = Vec::new();
    for lambda in f.elements().filter(|a| !a.is_zero()) {
        let c = f.pow(lambda, n.d_y as u128);
        for beta in f.elements() {
            for delta in f.elements() {
                let pass = probes.iter().all(|(v, val)| {
                    let y = f.add(f.add(f.mul(beta, v[0]), f.mul(lambda, v[1])), f.mul(delta, v[2]));
                    n.form.eval(&[v[0], y, v[2]]) == f.mul(c, *val)
                });
                if pass && is_solution(n, beta, lambda, delta) {
                    sols.push((beta, lambda, delta));
                }
            }
        }
    }
    Ok(sols)
}

/// All central collineations with the given center that preserve the curve.
pub fn central_collineation_group(
    curve: &PlaneCurve,
    center: &ProjPoint,
    mode: CollineationMode,
) -> Result<FiniteProjectivityGroup> {
    let n = normalize(curve, center)?;
    let sols = match mode {
        CollineationMode::Exact => solve_exact(&n, curve.degree())?,
        CollineationMode::Brute { q_cap } => solve_brute(&n, q_cap)?,
    };
    to_group(&n, &sols)
}

/// Whether `σ` fixes `center` and every line through it.
pub fn is_central_with_center(s: &Projectivity, center: &ProjPoint) -> Result<bool> {
    if s.apply(center)? != center.lift(s.field())? {
        return Ok(false);
    }
    let f = s.field();
    // σ fixes every line through c iff σ(x) ∈ line(c, x) for three generic x
    for coords in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]] {
        let x = ProjPoint::from_i64s(f, &coords)?;
        let c = center.lift(f)?;
        if x == c {
            continue;
        }
        let y = s.apply(&x)?;
        let det = det3(f, c.coords(), x.coords(), y.coords());
        if !det.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn det3(f: &Field, a: &[Fq], b: &[Fq], c: &[Fq]) -> Fq {
    let m = |x, y| f.mul(x, y);
    let t0 = f.sub(m(b[1], c[2]), m(b[2], c[1]));
    let t1 = f.sub(m(b[0], c[2]), m(b[2], c[0]));
    let t2 = f.sub(m(b[0], c[1]), m(b[1], c[0]));
    f.add(f.sub(m(a[0], t0), m(a[1], t1)), m(a[2], t2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_from_affine;
    use crate::gf::make_field;
    use crate::polyring::parse_polynomial;

    fn curve(s: &str, p: u64, k: usize) -> PlaneCurve {
        let f = make_field(p, k).unwrap();
        curve_from_affine(&parse_polynomial(s, &f, 2).unwrap()).unwrap()
    }

    #[test]
    fn cubic_inner_group_is_the_reflection() {
        let c = curve("y^2*x+(x+1)^2*(x-8)", 13, 1);
        let f = c.field().clone();
        let p = ProjPoint::from_i64s(&f, &[0, 1, 0]).unwrap();
        let g = central_collineation_group(&c, &p, CollineationMode::Exact).unwrap();
        assert_eq!(g.order(), 2);
        let refl = Projectivity::diag(&f, &[f.one(), f.from_i64(-1), f.one()]).unwrap();
        assert!(g.contains(&refl));
        let b = central_collineation_group(&c, &p, CollineationMode::Brute { q_cap: 13 }).unwrap();
        assert_eq!(b.elements().len(), g.elements().len());
        assert!(b.elements().iter().all(|e| g.contains(e)));
    }

    #[test]
    fn fermat_outer_group_is_cyclic_of_order_five() {
        let c = curve("x^4+y^5+1", 11, 1);
        let f = c.field().clone();
        let q = ProjPoint::from_i64s(&f, &[0, 1, 0]).unwrap();
        let g = central_collineation_group(&c, &q, CollineationMode::Exact).unwrap();
        assert_eq!(g.order(), 5);
        assert!(g.elements().iter().all(|s| is_central_with_center(s, &q).unwrap()));
        let z5 = f.nth_root_of_unity(5).unwrap().unwrap();
        // y ↦ ζ5 y, checked by direct substitution
        let x = Polynomial::var(&f, 3, 0);
        let y = Polynomial::var(&f, 3, 1).scale(z5);
        let z = Polynomial::var(&f, 3, 2);
        assert_eq!(c.form().compose(&[x, y, z]), *c.form());
        assert!(g.contains(&Projectivity::diag(&f, &[f.one(), z5, f.one()]).unwrap()));
    }

    #[test]
    fn perturbed_curve_has_trivial_group() {
        let c = curve("y^2*x+x^3+x+1+3*x*y", 7, 1);
        let f = c.field().clone();
        let p = ProjPoint::from_i64s(&f, &[2, 5, 1]).unwrap();
        let e = central_collineation_group(&c, &p, CollineationMode::Exact).unwrap();
        let b = central_collineation_group(&c, &p, CollineationMode::Brute { q_cap: 7 }).unwrap();
        assert_eq!((e.order(), b.order()), (1, 1));
    }

    #[test]
    fn brute_cap_enforced() {
        let c = curve("x^4+y^5+1", 11, 1);
        let q = ProjPoint::from_i64s(c.field(), &[0, 1, 0]).unwrap();
        assert_eq!(
            central_collineation_group(&c, &q, CollineationMode::Brute { q_cap: 7 }).unwrap_err(),
            Error::BruteCapExceeded { q: 11, cap: 7 }
        );
    }

    #[test]
    fn translations_found_by_exact_mode() {
        // x^3 + y^4 + y over F_4: y ↦ y + α for α in F_4 with α^4 + α = 0
        let c = curve("x^3+y^4+y", 2, 2);
        let q = ProjPoint::from_i64s(c.field(), &[0, 1, 0]).unwrap();
        let e = central_collineation_group(&c, &q, CollineationMode::Exact).unwrap();
        let b = central_collineation_group(&c, &q, CollineationMode::Brute { q_cap: 4 }).unwrap();
        assert_eq!(e.order(), b.order());
        assert!(e.order() >= 4);
    }
}
