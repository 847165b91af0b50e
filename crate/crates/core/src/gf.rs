//! Finite fields `F_{p^k}` presented as `F_p[x]/(m(x))`.
//!
//! Elements are packed into a single `u64`: the coefficient vector
//! `(c_0, .., c_{k-1})` of the residue class is stored as `Σ c_i p^i`.
//! A [`Field`] is a cheap handle (an `Arc`) to the immutable context that
//! knows how to do arithmetic on those packed values. Small extension fields
//! get log/antilog tables; everything else goes through polynomial
//! multiplication modulo `m`.
//!
//! Canonical fields are memoized, so `Field::new(p, k)` always returns the
//! same modulus (the lowest irreducible one in the order of
//! `Σ c_i p^i`), and embeddings between canonical fields are fixed once
//! computed.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::polyring::UPoly;

/// Largest field order that gets log/antilog tables.
const TABLE_LIMIT: u64 = 1 << 20;
const MODULUS_SEARCH_BUDGET: u64 = 1 << 22;

/// A field element in packed base-`p` form. Meaningless without its [`Field`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Fq(pub(crate) u64);

impl Fq {
    pub const ZERO: Fq = Fq(0);

    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    /// `exp[i] = g^i` for `i < 2(q-1)`.
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub struct FieldCtx {
    p: u64,
    k: usize,
    q: u64,
    modulus: Vec<u64>,
    ppow: Vec<u64>,
    mod_bits: u64,
    tables: Option<Tables>,
    primitive: OnceLock<Fq>,
}

/// Shared handle to a finite field context.
#[derive(Clone)]
pub struct Field(Arc<FieldCtx>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.spec())
    }
}

type FieldKey = (u64, Vec<u64>);

fn field_cache() -> &'static Mutex<HashMap<FieldKey, Field>> {
    static CACHE: OnceLock<Mutex<HashMap<FieldKey, Field>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn canonical_cache() -> &'static Mutex<HashMap<(u64, usize), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Field>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `make_field(p, k)`: the canonical field of order `p^k`.
pub fn make_field(p: u64, k: usize) -> Result<Field> {
    Field::new(p, k)
}

impl Field {
    /// Canonical field of order `p^k`.
    pub fn new(p: u64, k: usize) -> Result<Field> {
        if !arith::is_prime(p) {
            return Err(Error::NonPrimeCharacteristic(p));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be >= 1".into()));
        }
        if arith::checked_pow(p, k).is_none() {
            return Err(Error::FieldTooLarge { p, k });
        }
        if let Some(f) = canonical_cache().lock().unwrap().get(&(p, k)) {
            return Ok(f.clone());
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            find_lowest_irreducible(p, k)?
        };
        let field = Self::build(p, modulus)?;
        canonical_cache()
            .lock()
            .unwrap()
            .insert((p, k), field.clone());
        Ok(field)
    }

    /// Field with a caller-chosen monic modulus (low-to-high coefficients).
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Field> {
        if !arith::is_prime(p) {
            return Err(Error::NonPrimeCharacteristic(p));
        }
        let mut m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        while m.last() == Some(&0) {
            m.pop();
        }
        let k = m.len().saturating_sub(1);
        if k == 0 || m[k] != 1 {
            return Err(Error::InvalidInput("modulus must be monic of degree >= 1".into()));
        }
        if arith::checked_pow(p, k).is_none() {
            return Err(Error::FieldTooLarge { p, k });
        }
        if k > 1 {
            let fp = Field::new(p, 1)?;
            let poly = UPoly::new(&fp, m.iter().map(|&c| Fq(c)).collect());
            if !poly.is_irreducible() {
                return Err(Error::ReducibleModulus { p, k });
            }
        }
        Self::build(p, m)
    }

    fn build(p: u64, modulus: Vec<u64>) -> Result<Field> {
        let key = (p, modulus.clone());
        if let Some(f) = field_cache().lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let k = modulus.len() - 1;
        let q = arith::checked_pow(p, k).ok_or(Error::FieldTooLarge { p, k })?;
        let ppow = (0..=k).map(|i| p.pow(i as u32)).collect();
        let mod_bits = if p == 2 {
            modulus.iter().enumerate().map(|(i, &c)| c << i).sum()
        } else {
            0
        };
        let mut ctx = FieldCtx {
            p,
            k,
            q,
            modulus,
            ppow,
            mod_bits,
            tables: None,
            primitive: OnceLock::new(),
        };
        if k > 1 && q <= TABLE_LIMIT {
            ctx.tables = Some(build_tables(&ctx));
        }
        let field = Field(Arc::new(ctx));
        field_cache().lock().unwrap().insert(key, field.clone());
        Ok(field)
    }

    /// Parses a field spec `"p^k"` or `"p"`.
    pub fn parse_spec(spec: &str) -> Result<Field> {
        let bad = || Error::Parse {
            pos: 0,
            msg: format!("bad field spec {spec:?}, expected \"p^k\""),
        };
        let s = spec.trim();
        let (p, k) = match s.split_once('^') {
            Some((p, k)) => (
                p.trim().parse::<u64>().map_err(|_| bad())?,
                k.trim().parse::<usize>().map_err(|_| bad())?,
            ),
            None => (s.parse::<u64>().map_err(|_| bad())?, 1),
        };
        Field::new(p, k)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn k(&self) -> usize {
        self.0.k
    }

    /// Number of elements `p^k`.
    pub fn order(&self) -> u64 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn spec(&self) -> String {
        if self.k() == 1 {
            self.p().to_string()
        } else {
            format!("{}^{}", self.p(), self.k())
        }
    }

    pub fn is_canonical(&self) -> bool {
        Field::new(self.p(), self.k()).map(|f| f == *self).unwrap_or(false)
    }

    /// Canonical field of degree `k * j` over `F_p`.
    pub fn extension(&self, j: usize) -> Result<Field> {
        Field::new(self.p(), self.k() * j)
    }

    pub fn zero(&self) -> Fq {
        Fq(0)
    }

    pub fn one(&self) -> Fq {
        Fq(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i64(&self, v: i64) -> Fq {
        Fq(v.rem_euclid(self.p() as i64) as u64)
    }

    /// The class of `x` modulo the defining polynomial.
    pub fn generator(&self) -> Fq {
        if self.k() == 1 {
            // modulus x: the class of x is 0
            Fq(0)
        } else {
            Fq(self.p())
        }
    }

    pub fn from_index(&self, i: u64) -> Option<Fq> {
        (i < self.order()).then_some(Fq(i))
    }

    pub fn digits(&self, a: Fq) -> Vec<u64> {
        let p = self.p();
        let mut v = a.0;
        (0..self.k())
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u64]) -> Fq {
        let p = self.p();
        let mut acc = 0u64;
        for (i, &c) in d.iter().enumerate().take(self.k()) {
            acc += (c % p) * self.0.ppow[i];
        }
        Fq(acc)
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        let ctx = &*self.0;
        if ctx.k == 1 {
            let s = a.0 + b.0;
            return Fq(if s >= ctx.p { s - ctx.p } else { s });
        }
        if ctx.p == 2 {
            return Fq(a.0 ^ b.0);
        }
        let p = ctx.p;
        let (mut x, mut y, mut acc) = (a.0, b.0, 0u64);
        for i in 0..ctx.k {
            let mut d = x % p + y % p;
            if d >= p {
                d -= p;
            }
            acc += d * ctx.ppow[i];
            x /= p;
            y /= p;
        }
        Fq(acc)
    }

    pub fn neg(&self, a: Fq) -> Fq {
        let ctx = &*self.0;
        if a.0 == 0 || ctx.p == 2 {
            return a;
        }
        if ctx.k == 1 {
            return Fq(ctx.p - a.0);
        }
        let p = ctx.p;
        let (mut x, mut acc) = (a.0, 0u64);
        for i in 0..ctx.k {
            let d = x % p;
            if d != 0 {
                acc += (p - d) * ctx.ppow[i];
            }
            x /= p;
        }
        Fq(acc)
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        let ctx = &*self.0;
        if a.0 == 0 || b.0 == 0 {
            return Fq(0);
        }
        if ctx.k == 1 {
            return Fq(arith::mul_mod(a.0, b.0, ctx.p));
        }
        if let Some(t) = &ctx.tables {
            let i = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            return Fq(t.exp[i] as u64);
        }
        if ctx.p == 2 {
            return Fq(clmul_reduce(a.0, b.0, ctx.mod_bits, ctx.k));
        }
        Fq(slow_mul(ctx, a.0, b.0))
    }

    pub fn square(&self, a: Fq) -> Fq {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Fq, e: u128) -> Fq {
        if e == 0 {
            return Fq(1);
        }
        if a.0 == 0 {
            return Fq(0);
        }
        let ctx = &*self.0;
        let e = e % (ctx.q - 1) as u128;
        if let Some(t) = &ctx.tables {
            let l = (t.log[a.0 as usize] as u128 * e) % (ctx.q - 1) as u128;
            return Fq(t.exp[l as usize] as u64);
        }
        let (mut base, mut e, mut r) = (a, e, Fq(1));
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fq) -> Option<Fq> {
        if a.0 == 0 {
            return None;
        }
        let ctx = &*self.0;
        if let Some(t) = &ctx.tables {
            let l = (ctx.q - 1) as usize - t.log[a.0 as usize] as usize;
            return Some(Fq(t.exp[l] as u64));
        }
        Some(self.pow(a, (ctx.q - 2) as u128))
    }

    /// `a / b`. Panics on division by zero, which is always a logic error here.
    pub fn div(&self, a: Fq, b: Fq) -> Fq {
        self.mul(a, self.inv(b).expect("division by zero in finite field"))
    }

    pub fn frobenius(&self, a: Fq) -> Fq {
        self.pow(a, self.p() as u128)
    }

    /// Unique `p`-th root (Frobenius is bijective on a finite field).
    pub fn pth_root(&self, a: Fq) -> Fq {
        self.pow(a, (self.order() / self.p()) as u128)
    }

    pub fn is_in_prime_field(&self, a: Fq) -> bool {
        a.0 < self.p()
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.order()).map(Fq)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fq {
        Fq(rng.gen_range(0..self.order()))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fq {
        Fq(rng.gen_range(1..self.order()))
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Fq) -> u64 {
        assert!(!a.is_zero(), "zero has no multiplicative order");
        let mut ord = self.order() - 1;
        for (r, _) in arith::factorize(ord) {
            while ord.is_multiple_of(r) && self.pow(a, (ord / r) as u128) == Fq(1) {
                ord /= r;
            }
        }
        ord
    }

    /// Smallest (by packed index) generator of the multiplicative group.
    pub fn primitive_element(&self) -> Fq {
        *self.0.primitive.get_or_init(|| {
            if let Some(t) = &self.0.tables {
                return Fq(t.exp[1] as u64);
            }
            find_primitive(self)
        })
    }

    /// Element of exact multiplicative order `n`, or `None` when `n ∤ q - 1`.
    pub fn nth_root_of_unity(&self, n: u64) -> Result<Option<Fq>> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if n.is_multiple_of(self.p()) {
            return Err(Error::PDividesN { p: self.p(), n });
        }
        let q1 = self.order() - 1;
        if !q1.is_multiple_of(n) {
            return Ok(None);
        }
        Ok(Some(self.pow(self.primitive_element(), (q1 / n) as u128)))
    }

    /// All `λ` with `λ^n = 1`, ordered by exponent of the primitive element.
    pub fn roots_of_unity(&self, n: u64) -> Vec<Fq> {
        let g = arith::gcd(n, self.order() - 1);
        let z = self.pow(self.primitive_element(), ((self.order() - 1) / g) as u128);
        let mut out = Vec::with_capacity(g as usize);
        let mut cur = Fq(1);
        for _ in 0..g {
            out.push(cur);
            cur = self.mul(cur, z);
        }
        out
    }

    /// Elements of the subfield `F_{p^d}` (requires `d | k`).
    pub fn subfield_elements(&self, d: usize) -> Result<Vec<Fq>> {
        if !self.k().is_multiple_of(d) {
            return Err(Error::IncompatibleFields(format!(
                "F_{}^{} is not a subfield of {:?}",
                self.p(),
                d,
                self
            )));
        }
        let sub = Field::new(self.p(), d)?;
        let mut v: Vec<Fq> = sub.elements().map(|a| embed(&sub, self, a)).collect::<Result<_>>()?;
        v.sort();
        Ok(v)
    }

    /// Text form: an integer for prime fields, otherwise a polynomial in `g`.
    pub fn fmt_elem(&self, a: Fq) -> String {
        if self.k() == 1 {
            return a.0.to_string();
        }
        let d = self.digits(a);
        let mut parts = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

fn clmul_reduce(a: u64, b: u64, modulus: u64, k: usize) -> u64 {
    let mut r: u128 = 0;
    let mut x = a;
    let mut i = 0;
    while x != 0 {
        if x & 1 == 1 {
            r ^= (b as u128) << i;
        }
        x >>= 1;
        i += 1;
    }
    let mut top = 128 - r.leading_zeros() as usize;
    while top > k {
        let shift = top - 1 - k;
        r ^= (modulus as u128) << shift;
        top = 128 - r.leading_zeros() as usize;
    }
    r as u64
}

fn slow_mul(ctx: &FieldCtx, a: u64, b: u64) -> u64 {
    let (p, k) = (ctx.p, ctx.k);
    let mut da = [0u64; 64];
    let mut db = [0u64; 64];
    let (mut x, mut y) = (a, b);
    for i in 0..k {
        da[i] = x % p;
        db[i] = y % p;
        x /= p;
        y /= p;
    }
    let mut prod = [0u64; 128];
    for i in 0..k {
        if da[i] == 0 {
            continue;
        }
        for j in 0..k {
            prod[i + j] = (prod[i + j] + arith::mul_mod(da[i], db[j], p)) % p;
        }
    }
    for i in (k..(2 * k - 1)).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..k {
            let t = arith::mul_mod(c, ctx.modulus[j], p);
            prod[i - k + j] = (prod[i - k + j] + p - t) % p;
        }
    }
    let mut acc = 0u64;
    for i in (0..k).rev() {
        acc = acc * p + prod[i];
    }
    acc
}

fn generic_mul(ctx: &FieldCtx, a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    if ctx.p == 2 {
        clmul_reduce(a, b, ctx.mod_bits, ctx.k)
    } else {
        slow_mul(ctx, a, b)
    }
}

fn generic_pow(ctx: &FieldCtx, a: u64, mut e: u64) -> u64 {
    let (mut base, mut r) = (a, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            r = generic_mul(ctx, r, base);
        }
        base = generic_mul(ctx, base, base);
        e >>= 1;
    }
    r
}

fn build_tables(ctx: &FieldCtx) -> Tables {
    let q1 = ctx.q - 1;
    let factors = arith::factorize(q1);
    let is_primitive = |g: u64| factors.iter().all(|(r, _)| generic_pow(ctx, g, q1 / r) != 1);
    let g = (2..ctx.q).find(|&g| is_primitive(g)).expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; 2 * q1 as usize];
    let mut log = vec![0u32; ctx.q as usize];
    let mut cur = 1u64;
    for i in 0..q1 as usize {
        exp[i] = cur as u32;
        exp[i + q1 as usize] = cur as u32;
        log[cur as usize] = i as u32;
        cur = generic_mul(ctx, cur, g);
    }
    Tables { exp, log }
}

fn find_primitive(field: &Field) -> Fq {
    let q1 = field.order() - 1;
    if q1 == 1 {
        return Fq(1);
    }
    let factors = arith::factorize(q1);
    (1..field.order())
        .map(Fq)
        .find(|&g| factors.iter().all(|(r, _)| field.pow(g, (q1 / r) as u128) != Fq(1)))
        .expect("multiplicative group is cyclic")
}

fn find_lowest_irreducible(p: u64, k: usize) -> Result<Vec<u64>> {
    let fp = Field::new(p, 1)?;
    let span = arith::checked_pow(p, k).ok_or(Error::FieldTooLarge { p, k })?;
    for idx in 0..span.min(MODULUS_SEARCH_BUDGET) {
        let mut c = Vec::with_capacity(k + 1);
        let mut v = idx;
        for _ in 0..k {
            c.push(v % p);
            v /= p;
        }
        if c[0] == 0 {
            continue;
        }
        c.push(1);
        let poly = UPoly::new(&fp, c.iter().map(|&x| Fq(x)).collect());
        if poly.is_irreducible() {
            return Ok(c);
        }
    }
    Err(Error::IrreducibleSearchExhausted { p, k })
}

type EmbeddingCache = Mutex<HashMap<(FieldKey, FieldKey), Arc<Vec<Fq>>>>;

fn embedding_cache() -> &'static EmbeddingCache {
    static CACHE: OnceLock<EmbeddingCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Images of `1, x, .., x^{k-1}` under the fixed embedding `src -> dst`.
fn embedding_basis(src: &Field, dst: &Field) -> Result<Arc<Vec<Fq>>> {
    let key = (
        (src.p(), src.modulus().to_vec()),
        (dst.p(), dst.modulus().to_vec()),
    );
    if let Some(b) = embedding_cache().lock().unwrap().get(&key) {
        return Ok(b.clone());
    }
    let lifted = UPoly::new(dst, src.modulus().iter().map(|&c| Fq(c)).collect());
    let root = lifted
        .roots_in_field()
        .into_iter()
        .min()
        .ok_or_else(|| Error::IncompatibleFields("modulus has no root in target".into()))?;
    let mut basis = Vec::with_capacity(src.k());
    let mut cur = dst.one();
    for _ in 0..src.k() {
        basis.push(cur);
        cur = dst.mul(cur, root);
    }
    let basis = Arc::new(basis);
    embedding_cache().lock().unwrap().insert(key, basis.clone());
    Ok(basis)
}

/// Image of `a ∈ src` under the fixed homomorphism `src -> dst`.
pub fn embed(src: &Field, dst: &Field, a: Fq) -> Result<Fq> {
    if src == dst {
        return Ok(a);
    }
    if src.p() != dst.p() || !dst.k().is_multiple_of(src.k()) {
        return Err(Error::IncompatibleFields(format!(
            "cannot embed {src:?} into {dst:?}"
        )));
    }
    if src.k() == 1 {
        return Ok(Fq(a.0));
    }
    let basis = embedding_basis(src, dst)?;
    let mut acc = dst.zero();
    for (d, &b) in src.digits(a).iter().zip(basis.iter()) {
        if *d != 0 {
            acc = dst.add(acc, dst.mul(Fq(*d), b));
        }
    }
    Ok(acc)
}

/// Pulls `a ∈ dst` back to `src` when it lies in the image of `embed`.
pub fn restrict(src: &Field, dst: &Field, a: Fq) -> Result<Option<Fq>> {
    if src == dst {
        return Ok(Some(a));
    }
    if src.k() == 1 {
        return Ok(dst.is_in_prime_field(a).then_some(a));
    }
    if src.order() <= 1 << 16 {
        for x in src.elements() {
            if embed(src, dst, x)? == a {
                return Ok(Some(x));
            }
        }
        return Ok(None);
    }
    Err(Error::InvalidInput("restriction from large subfields is not supported".into()))
}
