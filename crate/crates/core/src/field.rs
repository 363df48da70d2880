//! Exact arithmetic in the tower `F_p ⊆ F_q = F_{p^e} ⊆ K = F_{q^t}`.
//!
//! Every element is identified by its index in the canonical enumeration of
//! its field: coefficient vectors over the next-lower field, read
//! lexicographically with the constant term most significant, recursively
//! down the tower. Index `0` is always the zero element. Because the digits
//! flatten to base-`p` digits, addition is digitwise addition modulo `p`.
//!
//! Fields of order up to 2^16 get exp/log tables for multiplication; larger
//! fields (up to the 2^32 cap) fall back to schoolbook polynomial arithmetic.

use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use serde::Serialize;

use crate::linalg;

/// Largest admissible order of the top field.
pub const MAX_FIELD_ORDER: u64 = 1 << 32;

const TABLE_LIMIT: u64 = 1 << 16;

static NEXT_TOWER_ID: AtomicU32 = AtomicU32::new(0);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degrees must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^({e}*{t}) exceeds 2^32")]
    TooLarge { p: u64, e: usize, t: usize },
    #[error("expected an element of the {expected} field, found one of the {found} field")]
    WrongLevel { expected: Level, found: Level },
    #[error("element belongs to a different field tower")]
    ForeignElement,
    #[error("index {index} is out of range for a field of order {order}")]
    IndexOutOfRange { index: u64, order: u64 },
    #[error("zero has no multiplicative inverse")]
    DivisionByZero,
    #[error("expected {expected} elements, got {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("elements are linearly dependent over F_q")]
    DependentBasis,
    #[error("the trace kernel of a zero multiplier is all of K")]
    ZeroMultiplier,
    #[error("trivial kernel: K = F_q, so the only trace-kernel element is 0")]
    TrivialKernel,
    #[error("no canonical choice with rank {0} exists")]
    ChoiceUnavailable(usize),
}

/// Which field of the tower an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Level {
    /// The prime field `F_p`.
    Base,
    /// The subsymbol field `F_q`.
    Mid,
    /// The symbol field `K = F_{q^t}`.
    Top,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Base => "prime",
            Level::Mid => "subsymbol",
            Level::Top => "symbol",
        })
    }
}

/// An element of one level of a [`FieldTower`].
///
/// Ordering follows the canonical enumeration within a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    tower: u32,
    level: Level,
    index: u64,
}

impl Element {
    pub fn level(self) -> Level {
        self.level
    }

    /// Position in the canonical enumeration; also the serialized form.
    pub fn index(self) -> u64 {
        self.index
    }

    pub fn is_zero(self) -> bool {
        self.index == 0
    }
}

/// Serialized as the canonical index.
impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.index)
    }
}

/// Field operations on canonical indices.
pub trait FieldArith: Send + Sync {
    fn order(&self) -> u64;
    fn characteristic(&self) -> u64;
    fn one(&self) -> u64;
    fn add(&self, a: u64, b: u64) -> u64;
    fn neg(&self, a: u64) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;
    fn inv(&self, a: u64) -> Option<u64>;

    fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    fn pow(&self, a: u64, mut exp: u64) -> u64 {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

fn digit_add(mut a: u64, mut b: u64, p: u64) -> u64 {
    if p == 2 {
        return a ^ b;
    }
    let (mut out, mut place) = (0, 1);
    while a > 0 || b > 0 {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

fn digit_neg(mut a: u64, p: u64) -> u64 {
    if p == 2 {
        return a;
    }
    let (mut out, mut place) = (0, 1);
    while a > 0 {
        out += ((p - a % p) % p) * place;
        a /= p;
        place *= p;
    }
    out
}

#[derive(Debug, Clone)]
struct PrimeField {
    p: u64,
}

impl FieldArith for PrimeField {
    fn order(&self) -> u64 {
        self.p
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }
    fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }
    fn inv(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.pow(a, self.p - 2))
    }
}

#[derive(Debug, Clone)]
struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// `B[y] / (g)` for a monic irreducible `g` of degree `degree`.
#[derive(Debug, Clone)]
struct ExtensionField<B> {
    base: B,
    degree: usize,
    base_order: u64,
    order: u64,
    one: u64,
    /// Non-leading coefficients of the monic modulus, constant term first.
    modulus: Vec<u64>,
    tables: Option<LogTables>,
}

impl<B: FieldArith> ExtensionField<B> {
    fn new(base: B, modulus: Vec<u64>) -> Self {
        let degree = modulus.len();
        let base_order = base.order();
        let order = base_order.pow(degree as u32);
        let one = base.one() * base_order.pow(degree as u32 - 1);
        let mut field = Self { base, degree, base_order, order, one, modulus, tables: None };
        if order <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        field
    }

    fn coeffs(&self, mut index: u64) -> Vec<u64> {
        let mut out = vec![0; self.degree];
        for slot in out.iter_mut().rev() {
            *slot = index % self.base_order;
            index /= self.base_order;
        }
        out
    }

    fn pack_coeffs(&self, coeffs: &[u64]) -> u64 {
        coeffs.iter().fold(0, |acc, &c| acc * self.base_order + c)
    }

    fn mul_poly(&self, a: u64, b: u64) -> u64 {
        let d = self.degree;
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = self.base.add(prod[i + j], self.base.mul(x, y));
            }
        }
        for k in (d..2 * d - 1).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &m) in self.modulus.iter().enumerate() {
                prod[k - d + i] = self.base.sub(prod[k - d + i], self.base.mul(lead, m));
            }
        }
        self.pack_coeffs(&prod[..d])
    }

    fn pow_poly(&self, a: u64, mut exp: u64) -> u64 {
        let mut base = a;
        let mut acc = self.one;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            exp >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> LogTables {
        let group = self.order - 1;
        let factors = prime_factors(group);
        let generator = (1..self.order)
            .find(|&g| factors.iter().all(|&l| self.pow_poly(g, group / l) != self.one))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = Vec::with_capacity(group as usize);
        let mut log = vec![0u32; self.order as usize];
        let mut x = self.one;
        for i in 0..group {
            exp.push(x as u32);
            log[x as usize] = i as u32;
            x = self.mul_poly(x, generator);
        }
        LogTables { exp, log }
    }
}

impl<B: FieldArith> FieldArith for ExtensionField<B> {
    fn order(&self) -> u64 {
        self.order
    }
    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
    fn one(&self) -> u64 {
        self.one
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        digit_add(a, b, self.characteristic())
    }
    fn neg(&self, a: u64) -> u64 {
        digit_neg(a, self.characteristic())
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => {
                let group = self.order - 1;
                let e = (t.log[a as usize] as u64 + t.log[b as usize] as u64) % group;
                t.exp[e as usize] as u64
            }
            None => self.mul_poly(a, b),
        }
    }
    fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        match &self.tables {
            Some(t) => {
                let group = self.order - 1;
                let e = (group - t.log[a as usize] as u64) % group;
                Some(t.exp[e as usize] as u64)
            }
            None => Some(self.pow_poly(a, self.order - 2)),
        }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Remainder of `num` modulo the monic `den`; both low-degree first.
fn poly_rem(field: &dyn FieldArith, num: &[u64], den: &[u64]) -> Vec<u64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    while rem.len() > dd {
        let lead = rem.pop().unwrap_or(0);
        if lead == 0 {
            continue;
        }
        let shift = rem.len() - dd;
        for (i, &c) in den[..dd].iter().enumerate() {
            rem[shift + i] = field.sub(rem[shift + i], field.mul(lead, c));
        }
    }
    rem
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_mul_mod(field: &dyn FieldArith, a: &[u64], b: &[u64], modulus: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    trim(poly_rem(field, &out, modulus))
}

/// `gcd(a, b)` up to a unit; `b` may be any nonzero polynomial.
fn poly_gcd(field: &dyn FieldArith, a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let inv = field.inv(*b.last().expect("nonempty")).expect("leading coefficient is nonzero");
        let monic: Vec<u64> = b.iter().map(|&c| field.mul(c, inv)).collect();
        let r = trim(poly_rem(field, &a, &monic));
        a = monic;
        b = r;
    }
    a
}

/// Ben-Or: a monic `f` of degree `d` is irreducible iff
/// `gcd(x^(r^i) - x, f) = 1` for every `1 ≤ i ≤ d/2`.
fn is_irreducible(field: &dyn FieldArith, poly: &[u64]) -> bool {
    let deg = poly.len() - 1;
    if deg > 1 && poly[0] == 0 {
        return false;
    }
    let r = field.order();
    let x = trim(poly_rem(field, &[0, field.one()], poly));
    let mut h = x.clone();
    for _ in 1..=deg / 2 {
        let mut acc = vec![field.one()];
        let mut base = h.clone();
        let mut e = r;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mul_mod(field, &acc, &base, poly);
            }
            base = poly_mul_mod(field, &base, &base, poly);
            e >>= 1;
        }
        h = acc;
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = field.sub(diff[1], field.one());
        if poly_gcd(field, poly.to_vec(), diff).len() != 1 {
            return false;
        }
    }
    true
}

/// The canonical monic irreducible of the given degree: the one whose
/// coefficient tuple (constant term first, each coefficient read as its
/// canonical index) is lexicographically smallest.
fn canonical_irreducible(field: &dyn FieldArith, degree: usize) -> Vec<u64> {
    let r = field.order();
    // Above degree one, a zero constant term means a factor of x.
    let start = if degree > 1 { r.pow(degree as u32 - 1) } else { 0 };
    for n in start..r.pow(degree as u32) {
        let mut coeffs = vec![0u64; degree];
        let mut x = n;
        for slot in coeffs.iter_mut().rev() {
            *slot = x % r;
            x /= r;
        }
        let mut poly = coeffs.clone();
        poly.push(field.one());
        if is_irreducible(field, &poly) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Tower parameters and defining polynomials, as emitted by `inspect`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerInfo {
    pub p: u64,
    pub e: usize,
    pub t: usize,
    /// Monic modulus of `F_q` over `F_p`, constant term first, leading 1 included.
    pub subfield_modulus: Vec<u64>,
    /// Monic modulus of `K` over `F_q` as canonical `F_q` indices.
    pub extension_modulus: Vec<u64>,
}

/// The chain `F_p ⊆ F_q ⊆ K` with canonical defining polynomials.
///
/// Arithmetic methods panic when handed elements from another tower or of
/// mismatched levels; those are programming errors. Operations whose level
/// is part of the contract (such as [`FieldTower::trace`]) return errors.
#[derive(Debug, Clone)]
pub struct FieldTower {
    id: u32,
    p: u64,
    e: usize,
    t: usize,
    prime: PrimeField,
    top: ExtensionField<ExtensionField<PrimeField>>,
    /// `Tr(y^i)` for the polynomial basis of `K`, as `F_q` indices.
    basis_traces: Vec<u64>,
}

impl FieldTower {
    pub fn new(p: u64, e: usize, t: usize) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if e == 0 || t == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (e * t).try_into().ok().and_then(|exp: u32| p.checked_pow(exp)).filter(|&o| o <= MAX_FIELD_ORDER);
        if order.is_none() {
            return Err(FieldError::TooLarge { p, e, t });
        }
        let prime = PrimeField { p };
        let mid = ExtensionField::new(prime.clone(), canonical_irreducible(&prime, e));
        let g_k = canonical_irreducible(&mid, t);
        let top = ExtensionField::new(mid, g_k);
        let mut tower =
            Self { id: NEXT_TOWER_ID.fetch_add(1, Ordering::Relaxed), p, e, t, prime, top, basis_traces: Vec::new() };
        tower.basis_traces = (0..t)
            .map(|i| {
                let y_i = tower.monomial(i);
                let tr = tower.trace_power_sum(y_i).expect("top-level element");
                tower.project(tr).expect("power-sum trace lies in the subfield").index
            })
            .collect();
        Ok(tower)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Order of the subsymbol field `F_q`.
    pub fn q(&self) -> u64 {
        self.top.base_order
    }

    pub fn order(&self, level: Level) -> u64 {
        self.arith(level).order()
    }

    pub fn info(&self) -> TowerInfo {
        let mut subfield_modulus = self.top.base.modulus.clone();
        subfield_modulus.push(1);
        let mut extension_modulus = self.top.modulus.clone();
        extension_modulus.push(self.top.base.one);
        TowerInfo { p: self.p, e: self.e, t: self.t, subfield_modulus, extension_modulus }
    }

    /// Index operations for one level, for use with [`crate::linalg`].
    pub fn arith(&self, level: Level) -> &dyn FieldArith {
        match level {
            Level::Base => &self.prime,
            Level::Mid => &self.top.base,
            Level::Top => &self.top,
        }
    }

    fn wrap(&self, level: Level, index: u64) -> Element {
        Element { tower: self.id, level, index }
    }

    fn check(&self, x: Element, level: Level) -> Result<(), FieldError> {
        if x.tower != self.id {
            return Err(FieldError::ForeignElement);
        }
        if x.level != level {
            return Err(FieldError::WrongLevel { expected: level, found: x.level });
        }
        Ok(())
    }

    fn same(&self, a: Element, b: Element) -> Level {
        assert_eq!(a.tower, self.id, "element from a different tower");
        assert_eq!(b.tower, self.id, "element from a different tower");
        assert_eq!(a.level, b.level, "operands live in different fields");
        a.level
    }

    pub fn element(&self, level: Level, index: u64) -> Result<Element, FieldError> {
        let order = self.order(level);
        if index >= order {
            return Err(FieldError::IndexOutOfRange { index, order });
        }
        Ok(self.wrap(level, index))
    }

    pub fn zero(&self, level: Level) -> Element {
        self.wrap(level, 0)
    }

    pub fn one(&self, level: Level) -> Element {
        self.wrap(level, self.arith(level).one())
    }

    /// All elements of a level in canonical order.
    pub fn elements(&self, level: Level) -> impl Iterator<Item = Element> + '_ {
        (0..self.order(level)).map(move |i| self.wrap(level, i))
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        let level = self.same(a, b);
        self.wrap(level, self.arith(level).add(a.index, b.index))
    }

    pub fn sub(&self, a: Element, b: Element) -> Element {
        let level = self.same(a, b);
        self.wrap(level, self.arith(level).sub(a.index, b.index))
    }

    pub fn neg(&self, a: Element) -> Element {
        let level = self.same(a, a);
        self.wrap(level, self.arith(level).neg(a.index))
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        let level = self.same(a, b);
        self.wrap(level, self.arith(level).mul(a.index, b.index))
    }

    pub fn inv(&self, a: Element) -> Result<Element, FieldError> {
        let level = self.same(a, a);
        self.arith(level).inv(a.index).map(|i| self.wrap(level, i)).ok_or(FieldError::DivisionByZero)
    }

    pub fn div(&self, a: Element, b: Element) -> Result<Element, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Element, exp: u64) -> Element {
        let level = self.same(a, a);
        self.wrap(level, self.arith(level).pow(a.index, exp))
    }

    pub fn sum<I: IntoIterator<Item = Element>>(&self, level: Level, items: I) -> Element {
        items.into_iter().fold(self.zero(level), |acc, x| self.add(acc, x))
    }

    /// `y^i` where `y` is the class of the indeterminate in `K = F_q[y]/(g_K)`.
    pub fn monomial(&self, i: usize) -> Element {
        let mut coeffs = vec![0; self.t];
        coeffs[i] = self.top.base.one;
        self.wrap(Level::Top, self.top.pack_coeffs(&coeffs))
    }

    /// The polynomial basis `{1, y, ..., y^(t-1)}` of `K` over `F_q`.
    pub fn polynomial_basis(&self) -> Vec<Element> {
        (0..self.t).map(|i| self.monomial(i)).collect()
    }

    /// Coordinates of `x ∈ K` in the polynomial basis, as `F_q` elements.
    pub fn coordinates(&self, x: Element) -> Result<Vec<Element>, FieldError> {
        self.check(x, Level::Top)?;
        Ok(self.top.coeffs(x.index).into_iter().map(|c| self.wrap(Level::Mid, c)).collect())
    }

    pub fn from_coordinates(&self, coords: &[Element]) -> Result<Element, FieldError> {
        if coords.len() != self.t {
            return Err(FieldError::WrongCount { expected: self.t, found: coords.len() });
        }
        let mut raw = Vec::with_capacity(self.t);
        for &c in coords {
            self.check(c, Level::Mid)?;
            raw.push(c.index);
        }
        Ok(self.wrap(Level::Top, self.top.pack_coeffs(&raw)))
    }

    /// Coefficients of an `F_q` element over `F_p`.
    pub fn subfield_coordinates(&self, x: Element) -> Result<Vec<Element>, FieldError> {
        self.check(x, Level::Mid)?;
        Ok(self.top.base.coeffs(x.index).into_iter().map(|c| self.wrap(Level::Base, c)).collect())
    }

    /// The inclusion `F_q ↪ K`.
    pub fn embed(&self, x: Element) -> Result<Element, FieldError> {
        self.check(x, Level::Mid)?;
        Ok(self.wrap(Level::Top, x.index * self.q().pow(self.t as u32 - 1)))
    }

    /// Inverse of [`FieldTower::embed`]; `None` when `x ∉ F_q`.
    pub fn project(&self, x: Element) -> Option<Element> {
        self.check(x, Level::Top).ok()?;
        let scale = self.q().pow(self.t as u32 - 1);
        x.index.is_multiple_of(scale).then(|| self.wrap(Level::Mid, x.index / scale))
    }

    /// `x ↦ x^q`.
    pub fn frobenius(&self, x: Element) -> Result<Element, FieldError> {
        self.check(x, Level::Top)?;
        Ok(self.pow(x, self.q()))
    }

    /// `Tr_{K/F_q}(x)`, computed through the traces of the polynomial basis.
    pub fn trace(&self, x: Element) -> Result<Element, FieldError> {
        self.check(x, Level::Top)?;
        let mid = &self.top.base;
        let coeffs = self.top.coeffs(x.index);
        let value = coeffs.iter().zip(&self.basis_traces).fold(0, |acc, (&c, &tr)| mid.add(acc, mid.mul(c, tr)));
        Ok(self.wrap(Level::Mid, value))
    }

    /// `x + x^q + ... + x^(q^(t-1))` evaluated in `K`.
    pub fn trace_power_sum(&self, x: Element) -> Result<Element, FieldError> {
        self.check(x, Level::Top)?;
        let mut acc = self.zero(Level::Top);
        let mut term = x;
        for _ in 0..self.t {
            acc = self.add(acc, term);
            term = self.pow(term, self.q());
        }
        Ok(acc)
    }

    /// `Tr(x)` embedded back into `K`.
    pub fn trace_in_k(&self, x: Element) -> Result<Element, FieldError> {
        self.embed(self.trace(x)?)
    }

    /// Multiply a `K` element by an `F_q` scalar.
    pub fn scale(&self, c: Element, x: Element) -> Result<Element, FieldError> {
        Ok(self.mul(self.embed(c)?, x))
    }

    fn coordinate_rows(&self, elements: &[Element]) -> Result<Vec<Vec<u64>>, FieldError> {
        elements
            .iter()
            .map(|&z| {
                self.check(z, Level::Top)?;
                Ok(self.top.coeffs(z.index))
            })
            .collect()
    }

    /// Rank over `F_q` of a list of `K` elements.
    pub fn rank_over_subfield(&self, elements: &[Element]) -> Result<usize, FieldError> {
        let rows = self.coordinate_rows(elements)?;
        Ok(linalg::rank(self.arith(Level::Mid), rows))
    }

    /// The trace-dual of an `F_q`-basis of `K`.
    pub fn dual_basis(&self, basis: &[Element]) -> Result<TraceBasis, FieldError> {
        if basis.len() != self.t {
            return Err(FieldError::WrongCount { expected: self.t, found: basis.len() });
        }
        if self.rank_over_subfield(basis)? != self.t {
            return Err(FieldError::DependentBasis);
        }
        let gram: Vec<Vec<u64>> = basis
            .iter()
            .map(|&a| basis.iter().map(|&b| self.trace(self.mul(a, b)).map(|x| x.index)).collect())
            .collect::<Result<_, _>>()?;
        let inverse = linalg::invert(self.arith(Level::Mid), &gram).ok_or(FieldError::DependentBasis)?;
        let dual = (0..self.t)
            .map(|j| {
                let terms = basis
                    .iter()
                    .enumerate()
                    .map(|(k, &z)| self.mul(self.embed(self.wrap(Level::Mid, inverse[k][j])).expect("mid"), z));
                self.sum(Level::Top, terms)
            })
            .collect();
        Ok(TraceBasis { basis: basis.to_vec(), dual })
    }

    /// An `F_q`-basis of `{α ∈ K : Tr(αβ) = 0}` (dimension `t - 1`).
    pub fn trace_kernel_basis(&self, beta: Element) -> Result<Vec<Element>, FieldError> {
        self.check(beta, Level::Top)?;
        if beta.is_zero() {
            return Err(FieldError::ZeroMultiplier);
        }
        if self.t == 1 {
            return Err(FieldError::TrivialKernel);
        }
        let functional: Vec<u64> = (0..self.t)
            .map(|i| self.trace(self.mul(self.monomial(i), beta)).map(|x| x.index))
            .collect::<Result<_, _>>()?;
        let mid = self.arith(Level::Mid);
        Ok(linalg::kernel(mid, &[functional], self.t)
            .into_iter()
            .map(|v| {
                let terms = v
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| self.mul(self.embed(self.wrap(Level::Mid, c)).expect("mid"), self.monomial(i)));
                self.sum(Level::Top, terms)
            })
            .collect())
    }

    /// Extend an independent list to an `F_q`-basis of `K`.
    ///
    /// An empty prefix yields the polynomial basis; otherwise each added
    /// element is the first in canonical order that raises the rank.
    pub fn complete_basis(&self, partial: &[Element]) -> Result<Vec<Element>, FieldError> {
        if partial.is_empty() {
            return Ok(self.polynomial_basis());
        }
        self.complete_basis_with_offset(partial, 0)
    }

    /// Like [`FieldTower::complete_basis`] but skips the first `skip`
    /// rank-raising candidates for the first added element. Used to
    /// exercise alternative valid choices.
    pub fn complete_basis_with_offset(&self, partial: &[Element], skip: usize) -> Result<Vec<Element>, FieldError> {
        if partial.len() > self.t {
            return Err(FieldError::DependentBasis);
        }
        if self.rank_over_subfield(partial)? != partial.len() {
            return Err(FieldError::DependentBasis);
        }
        let mid = self.arith(Level::Mid);
        let mut out = partial.to_vec();
        let mut skipped = 0;
        let mut candidates = 1..self.order(Level::Top);
        while out.len() < self.t {
            let rows = self.coordinate_rows(&out)?;
            let base_rank = out.len();
            let pick = candidates.by_ref().find(|&c| {
                let mut trial = rows.clone();
                trial.push(self.top.coeffs(c));
                if linalg::rank(mid, trial) == base_rank + 1 {
                    if out.len() == partial.len() && skipped < skip {
                        skipped += 1;
                        return false;
                    }
                    true
                } else {
                    false
                }
            });
            match pick {
                Some(c) => out.push(self.wrap(Level::Top, c)),
                None => return Err(FieldError::ChoiceUnavailable(skip)),
            }
        }
        Ok(out)
    }

    /// The `rank`-th (0-based) nonzero element of `ker Tr` in canonical order.
    pub fn trace_kernel_element(&self, rank: usize) -> Result<Element, FieldError> {
        if self.t == 1 {
            return Err(FieldError::TrivialKernel);
        }
        self.elements(Level::Top)
            .skip(1)
            .filter(|&x| self.trace(x).map(|v| v.is_zero()).unwrap_or(false))
            .nth(rank)
            .ok_or(FieldError::ChoiceUnavailable(rank))
    }
}

/// An `F_q`-basis of `K` together with its trace-dual basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceBasis {
    basis: Vec<Element>,
    dual: Vec<Element>,
}

impl TraceBasis {
    pub fn basis(&self) -> &[Element] {
        &self.basis
    }

    pub fn dual(&self) -> &[Element] {
        &self.dual
    }

    /// `[Tr(x z_1), ..., Tr(x z_t)]`.
    pub fn traces(&self, tower: &FieldTower, x: Element) -> Result<Vec<Element>, FieldError> {
        self.basis.iter().map(|&z| tower.trace(tower.mul(x, z))).collect()
    }

    /// Recover `x = Σ Tr(x z_i) z'_i` from its traces against the basis.
    pub fn reconstruct(&self, tower: &FieldTower, traces: &[Element]) -> Result<Element, FieldError> {
        if traces.len() != self.dual.len() {
            return Err(FieldError::WrongCount { expected: self.dual.len(), found: traces.len() });
        }
        let mut acc = tower.zero(Level::Top);
        for (&tr, &z) in traces.iter().zip(&self.dual) {
            acc = tower.add(acc, tower.scale(tr, z)?);
        }
        Ok(acc)
    }

    /// Coefficients `c` with `x = Σ c_i z_i`, i.e. `c_i = Tr(x z'_i)`.
    pub fn coefficients(&self, tower: &FieldTower, x: Element) -> Result<Vec<Element>, FieldError> {
        self.dual.iter().map(|&z| tower.trace(tower.mul(x, z))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_uses_x2_plus_x_plus_1() {
        let tower = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!(tower.info().extension_modulus, vec![1, 1, 1]);
        assert_eq!(tower.info().subfield_modulus, vec![0, 1]);
    }

    /// No monic factor of degree `1..=deg/2`, by exhaustive division.
    fn brute_force_irreducible(field: &dyn FieldArith, poly: &[u64]) -> bool {
        let deg = poly.len() - 1;
        let r = field.order();
        (1..=deg / 2).all(|k| {
            (0..r.pow(k as u32)).all(|n| {
                let mut factor: Vec<u64> = (0..k).map(|i| (n / r.pow(i as u32)) % r).collect();
                factor.push(field.one());
                poly_rem(field, poly, &factor).iter().any(|&c| c != 0)
            })
        })
    }

    #[test]
    fn irreducibility_matches_exhaustive_division() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let tower = FieldTower::new(p, e, 1).unwrap();
            let f = tower.arith(Level::Mid);
            let r = f.order();
            for deg in 1..=4u32 {
                for n in 0..r.pow(deg).min(700) {
                    let mut poly: Vec<u64> = (0..deg).map(|i| (n / r.pow(i)) % r).collect();
                    poly.push(f.one());
                    assert_eq!(is_irreducible(f, &poly), brute_force_irreducible(f, &poly), "{poly:?} over {p}^{e}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FieldTower::new(4, 1, 2).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(FieldTower::new(2, 0, 2).unwrap_err(), FieldError::ZeroDegree);
        assert_eq!(FieldTower::new(2, 1, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(FieldTower::new(2, 3, 11), Err(FieldError::TooLarge { .. })));
        assert!(FieldTower::new(2, 4, 8).is_ok());
    }

    #[test]
    fn degree_one_trace_is_identity() {
        let tower = FieldTower::new(3, 1, 1).unwrap();
        for x in tower.elements(Level::Top) {
            assert_eq!(tower.embed(tower.trace(x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn trace_of_one_in_f4_is_zero() {
        let tower = FieldTower::new(2, 1, 2).unwrap();
        let one = tower.one(Level::Top);
        assert!(tower.trace(one).unwrap().is_zero());
        assert!(tower.trace(tower.zero(Level::Top)).unwrap().is_zero());
    }

    #[test]
    fn trace_rejects_wrong_level() {
        let tower = FieldTower::new(2, 1, 2).unwrap();
        let err = tower.trace(tower.one(Level::Mid)).unwrap_err();
        assert_eq!(err, FieldError::WrongLevel { expected: Level::Top, found: Level::Mid });
        let other = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!(other.trace(tower.one(Level::Top)).unwrap_err(), FieldError::ForeignElement);
    }

    #[test]
    fn table_and_schoolbook_multiplication_agree() {
        let tower = FieldTower::new(3, 2, 2).unwrap();
        let top = &tower.top;
        for a in 0..top.order {
            for b in (0..top.order).step_by(7) {
                assert_eq!(top.mul(a, b), top.mul_poly(a, b));
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        // 2^20 > TABLE_LIMIT, so this path is schoolbook-only.
        let tower = FieldTower::new(2, 4, 5).unwrap();
        assert!(tower.top.tables.is_none());
        let x = tower.element(Level::Top, 123_457).unwrap();
        let y = tower.inv(x).unwrap();
        assert_eq!(tower.mul(x, y), tower.one(Level::Top));
        assert_eq!(tower.trace_in_k(x).unwrap(), tower.trace_power_sum(x).unwrap());
    }

    #[test]
    fn kernel_of_zero_and_trivial_kernel() {
        let tower = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!(tower.trace_kernel_basis(tower.zero(Level::Top)).unwrap_err(), FieldError::ZeroMultiplier);
        let flat = FieldTower::new(5, 1, 1).unwrap();
        assert_eq!(flat.trace_kernel_basis(flat.one(Level::Top)).unwrap_err(), FieldError::TrivialKernel);
    }

    #[test]
    fn dual_basis_rejects_dependent_input() {
        let tower = FieldTower::new(3, 1, 2).unwrap();
        let one = tower.one(Level::Top);
        let two = tower.add(one, one);
        assert_eq!(tower.dual_basis(&[one, two]).unwrap_err(), FieldError::DependentBasis);
        assert!(matches!(tower.dual_basis(&[one]), Err(FieldError::WrongCount { .. })));
    }

    #[test]
    fn complete_basis_edge_cases() {
        let tower = FieldTower::new(2, 1, 3).unwrap();
        assert_eq!(tower.complete_basis(&[]).unwrap(), tower.polynomial_basis());
        let one = tower.one(Level::Top);
        assert_eq!(tower.complete_basis(&[one, one]).unwrap_err(), FieldError::DependentBasis);
    }
}
