//! Statistical screen: in a Galois cover every unramified fiber splits into
//! factors of one common degree, so two distinct degrees refute Galois-ness.
//!
//! A cover can be Galois over the algebraic closure while its automorphisms
//! are only defined over an extension `F_{q^m}` (`y²x + (x+1)³` over F_3 from
//! `(1:0:0)` needs √−1). Over `F_q` its fibers then split unevenly, so the
//! screen only specializes over extensions whose degree is a multiple of
//! every possible `m`; see [`constant_field_bound`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::fiber::ProjectionFiber;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::polyring::UPoly;

/// A specialization `t = t0` whose fiber has factors of distinct degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub t0: String,
    pub t0_index: u64,
    pub field: String,
    pub factor_degrees: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct MonteCarloOutcome {
    pub witness: Option<Witness>,
    /// Specializations actually factored.
    pub used: u32,
    pub skipped: u32,
}

const EXTENSION_CYCLE: [u64; 3] = [1, 2, 3];

/// A multiple of `m = [F_{q^m} : F_q]` for every cover of degree `n` that is
/// Galois over the algebraic closure, `F_{q^m}` being the constant field of
/// its Galois closure.
///
/// The geometric group `G` acts regularly and the arithmetic group is
/// `G ⋊ C` with `C ≤ Aut(G)` cyclic of order `m`; a Frobenius at
/// `t0 ∈ F_{q^j}` lies in `G` as soon as `m | j`. So `m` divides the exponent
/// of `Aut(G)` for some group of order `n`, and is the order of an element
/// of `S_{n−1}` (the stabilizer of a point).
pub fn constant_field_bound(n: usize) -> u64 {
    match n {
        0..=2 => 1,
        // Aut(V4) = S3
        4 => 6,
        // Aut(S3) = S3, Aut(Z6) = Z2
        6 => 6,
        // GL(3, 2) has element orders 1, 2, 3, 4, 7; Aut(Q8) = S4
        8 => 84,
        // GL(2, 3) has exponent 24; Aut(Z9) = Z6
        9 => 24,
        // Aut(D5) = Z5 ⋊ Z4, Aut(Z10) = Z4
        10 => 20,
        _ if crate::arith::is_prime(n as u64) => n as u64 - 1,
        _ => (1..n as u64).fold(1, crate::arith::lcm),
    }
}

/// Specializes the fiber polynomial at `t0 ∈ ext`; `None` unless the result is
/// squarefree of full degree.
fn specialize(fib: &ProjectionFiber, ext: &Field, t0: crate::gf::Fq) -> Result<Option<UPoly>> {
    let lifted = fib.poly.lift(ext)?;
    let u = lifted
        .eval_var(0, t0)
        .to_upoly(1)
        .expect("specialized fiber is univariate in s");
    if u.degree() != fib.degree || u.is_zero() || !u.is_squarefree() {
        return Ok(None);
    }
    Ok(Some(u))
}

pub fn monte_carlo_screen(fib: &ProjectionFiber, trials: u32, seed: u64) -> Result<MonteCarloOutcome> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let base = fib.field().clone();
    let bound = constant_field_bound(fib.degree);
    let exts: Vec<Field> = EXTENSION_CYCLE
        .iter()
        .filter_map(|&j| usize::try_from(j * bound).ok())
        .filter_map(|j| base.extension(j).ok())
        .collect();
    if exts.is_empty() {
        return Err(Error::NoScreeningField { degree: bound });
    }
    let lifted: Vec<_> = exts.iter().map(|e| fib.poly.lift(e)).collect::<Result<_>>()?;
    let (mut used, mut skipped) = (0, 0);
    for trial in 0..trials {
        let slot = trial as usize % exts.len();
        let ext = &exts[slot];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let t0 = ext.random(&mut rng);
        let u = lifted[slot].eval_var(0, t0).to_upoly(1).expect("univariate in s");
        if u.degree() != fib.degree || !u.is_squarefree() {
            skipped += 1;
            continue;
        }
        used += 1;
        let mut degrees: Vec<usize> = u.factor(seed ^ trial as u64).iter().map(|(g, _)| g.degree()).collect();
        degrees.sort_unstable();
        if degrees.first() != degrees.last() {
            return Ok(MonteCarloOutcome {
                witness: Some(Witness {
                    t0: ext.fmt_elem(t0),
                    t0_index: t0.index(),
                    field: ext.spec(),
                    factor_degrees: degrees,
                }),
                used,
                skipped,
            });
        }
    }
    if used == 0 {
        return Err(Error::AllSpecializationsRamified);
    }
    Ok(MonteCarloOutcome { witness: None, used, skipped })
}

/// Re-derives the witness from scratch with distinct-degree factorization.
pub fn verify_witness(fib: &ProjectionFiber, w: &Witness) -> Result<bool> {
    let ext = Field::parse_spec(&w.field)?;
    let Some(t0) = ext.from_index(w.t0_index) else {
        return Ok(false);
    };
    let Some(u) = specialize(fib, &ext, t0)? else {
        return Ok(false);
    };
    let degrees = u.factor_degrees();
    Ok(degrees == w.factor_degrees && degrees.first() != degrees.last())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{curve_from_affine, PlaneCurve};
    use crate::galois::fiber::fiber_polynomial;
    use crate::gf::make_field;
    use crate::polyring::parse_polynomial;
    use crate::projective::ProjPoint;

    #[test]
    fn generic_cubic_has_witness() {
        let f = make_field(7, 1).unwrap();
        let c = curve_from_affine(&parse_polynomial("y^2*x+x^3+x+1", &f, 2).unwrap()).unwrap();
        let center = ProjPoint::from_i64s(&f, &[2, 3, 1]).unwrap();
        assert!(!c.contains(&center).unwrap());
        let fib = fiber_polynomial(&c, &center).unwrap();
        let out = monte_carlo_screen(&fib, 64, 1).unwrap();
        let w = out.witness.expect("witness");
        assert!(verify_witness(&fib, &w).unwrap());
        // oracle: the same polynomial factored by brute root counting
        let ext = Field::parse_spec(&w.field).unwrap();
        let t0 = ext.from_index(w.t0_index).unwrap();
        let u = fib.poly.lift(&ext).unwrap().eval_var(0, t0).to_upoly(1).unwrap();
        let linear = ext.elements().filter(|&a| u.eval(a).is_zero()).count();
        assert_eq!(linear, w.factor_degrees.iter().filter(|&&d| d == 1).count());
    }

    #[test]
    fn fermat_type_outer_point_is_uniform() {
        let f = make_field(11, 1).unwrap();
        let c = curve_from_affine(&parse_polynomial("x^4+y^5+1", &f, 2).unwrap()).unwrap();
        let q = ProjPoint::from_i64s(&f, &[0, 1, 0]).unwrap();
        let fib = fiber_polynomial(&c, &q).unwrap();
        assert_eq!(fib.degree, 5);
        let out = monte_carlo_screen(&fib, 32, 7).unwrap();
        assert!(out.witness.is_none());
        assert!(out.used > 0);
    }

    #[test]
    fn twisted_galois_cover_is_not_refuted() {
        // x³ + t²x + 1 over F_3: Galois over F_9, whose translations x ↦ x ± √−1·t
        // are missing over F_3
        let f = make_field(3, 1).unwrap();
        let c = curve_from_affine(&parse_polynomial("y^2*x+(x+1)^3", &f, 2).unwrap()).unwrap();
        let fib = fiber_polynomial(&c, &ProjPoint::from_i64s(&f, &[1, 0, 0]).unwrap()).unwrap();
        assert_eq!(fib.degree, 3);
        let uneven = f.elements().any(|t0| {
            let u = fib.poly.eval_var(0, t0).to_upoly(1).unwrap();
            let d = u.factor_degrees();
            u.degree() == 3 && u.is_squarefree() && d.first() != d.last()
        });
        assert!(uneven);
        assert_eq!(constant_field_bound(3), 2);
        let out = monte_carlo_screen(&fib, 256, 0).unwrap();
        assert!(out.witness.is_none(), "{:?}", out.witness);
    }

    #[test]
    fn constant_field_bounds() {
        // m is the order of an element of S_{n−1}
        for n in 1..=12usize {
            let b = constant_field_bound(n);
            let s = (1..n.max(2) as u64).fold(1, crate::arith::lcm);
            assert_eq!(s % b, 0, "n = {n}");
        }
        assert_eq!(constant_field_bound(5), 4);
        assert_eq!(constant_field_bound(7), 6);
        assert_eq!(constant_field_bound(12), 27720);
    }

    #[test]
    fn degree_one_fiber_is_trivially_uniform() {
        let f = make_field(7, 1).unwrap();
        let c = PlaneCurve::from_form(parse_polynomial("x*z-y^2", &f, 3).unwrap()).unwrap();
        let fib = fiber_polynomial(&c, &ProjPoint::from_i64s(&f, &[0, 0, 1]).unwrap()).unwrap();
        let out = monte_carlo_screen(&fib, 8, 0).unwrap();
        assert!(out.witness.is_none());
    }
}
