//! Monomial-Cartesian evaluation codes `C(S, A)` and the augmented families.
//!
//! A code is fixed by a Cartesian grid `S = S_1 × ... × S_m ⊆ K^m` and a
//! finite exponent set `A`; codewords are evaluations of polynomials spanned
//! by `{x^a : a ∈ A}` at the grid points. Points are ordered row-major with
//! the last axis fastest. Subsets are sorted canonically and axes reordered
//! so that `n_1 ≤ ... ≤ n_m`; every per-axis parameter (k-vectors, explicit
//! exponents, repair axes) refers to that normalized order.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::field::{Element, FieldError, FieldTower, Level};
use crate::linalg;

pub mod spec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("a Cartesian set needs at least one axis")]
    NoAxes,
    #[error("subset {0} is empty")]
    EmptySubset(usize),
    #[error("subset {axis} repeats element {index}")]
    DuplicatePoint { axis: usize, index: u64 },
    #[error("exponent arity {found} does not match {expected} axes")]
    ArityMismatch { expected: usize, found: usize },
    #[error("exponent {point:?} exceeds the degree box on axis {axis}")]
    ExponentOutsideBox { point: Vec<usize>, axis: usize },
    #[error("k = {k} on axis {axis} is outside 0..={max}")]
    InvalidK { axis: usize, k: usize, max: usize },
    #[error("axis {axis} has {size} points, fewer than q^(t-1) = {edge}")]
    AxisTooShort { axis: usize, size: usize, edge: usize },
    #[error("the exponent set is empty (k-vector is all zero)")]
    ZeroCode,
    #[error("axis {axis} is out of range for {arity} axes")]
    AxisOutOfRange { axis: usize, arity: usize },
    #[error("exponent set is not closed under divisibility")]
    NotDecreasing,
    #[error("polynomial support {0:?} is not contained in the exponent set")]
    SupportOutsideExponents(Vec<usize>),
    #[error("expected {expected} coefficients, got {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("position {position} is out of range for length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("invalid code spec: {0}")]
    Spec(String),
}

/// An evaluation grid `S_1 × ... × S_m` in normalized order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartesianSet {
    subsets: Vec<Vec<Element>>,
    axis_origin: Vec<usize>,
    strides: Vec<usize>,
}

impl CartesianSet {
    /// Sort each subset canonically and order axes by size (stable).
    pub fn new(subsets: Vec<Vec<Element>>) -> Result<Self, CodeError> {
        if subsets.is_empty() {
            return Err(CodeError::NoAxes);
        }
        let mut indexed: Vec<(usize, Vec<Element>)> = Vec::with_capacity(subsets.len());
        for (axis, mut subset) in subsets.into_iter().enumerate() {
            if subset.is_empty() {
                return Err(CodeError::EmptySubset(axis));
            }
            if let Some(x) = subset.iter().find(|x| x.level() != Level::Top) {
                return Err(FieldError::WrongLevel { expected: Level::Top, found: x.level() }.into());
            }
            subset.sort();
            if let Some(w) = subset.windows(2).find(|w| w[0] == w[1]) {
                return Err(CodeError::DuplicatePoint { axis, index: w[0].index() });
            }
            indexed.push((axis, subset));
        }
        indexed.sort_by_key(|(_, s)| s.len());
        let axis_origin = indexed.iter().map(|(a, _)| *a).collect();
        let subsets: Vec<Vec<Element>> = indexed.into_iter().map(|(_, s)| s).collect();
        let mut strides = vec![1; subsets.len()];
        for i in (0..subsets.len() - 1).rev() {
            strides[i] = strides[i + 1] * subsets[i + 1].len();
        }
        Ok(Self { subsets, axis_origin, strides })
    }

    /// `K^m`.
    pub fn full(tower: &FieldTower, m: usize) -> Result<Self, CodeError> {
        Self::new(vec![tower.elements(Level::Top).collect(); m])
    }

    pub fn arity(&self) -> usize {
        self.subsets.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.subsets.iter().map(Vec::len).collect()
    }

    /// Number of points `n`.
    pub fn len(&self) -> usize {
        self.strides[0] * self.subsets[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn subset(&self, axis: usize) -> &[Element] {
        &self.subsets[axis]
    }

    /// Normalized axis `i` was input axis `axis_origin()[i]`.
    pub fn axis_origin(&self) -> &[usize] {
        &self.axis_origin
    }

    /// Per-axis indices into the subsets for a point position.
    pub fn coordinate_indices(&self, position: usize) -> Vec<usize> {
        self.strides.iter().zip(&self.subsets).map(|(&stride, s)| (position / stride) % s.len()).collect()
    }

    pub fn position(&self, indices: &[usize]) -> usize {
        indices.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coordinate(&self, position: usize, axis: usize) -> Element {
        let s = &self.subsets[axis];
        s[(position / self.strides[axis]) % s.len()]
    }

    pub fn point(&self, position: usize) -> Vec<Element> {
        (0..self.arity()).map(|axis| self.coordinate(position, axis)).collect()
    }
}

/// A finite set of lattice points `A ⊂ Z_{≥0}^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExponentSet {
    arity: usize,
    points: BTreeSet<Vec<usize>>,
}

impl ExponentSet {
    pub fn new<I>(arity: usize, points: I) -> Result<Self, CodeError>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let points: BTreeSet<Vec<usize>> = points.into_iter().collect();
        if let Some(p) = points.iter().find(|p| p.len() != arity) {
            return Err(CodeError::ArityMismatch { expected: arity, found: p.len() });
        }
        Ok(Self { arity, points })
    }

    pub fn empty(arity: usize) -> Self {
        Self { arity, points: BTreeSet::new() }
    }

    /// Every point of `{0..n_1-1} × ... × {0..n_m-1}`.
    pub fn full_box(sizes: &[usize]) -> Self {
        Self::from_box_filter(sizes, |_| true)
    }

    fn from_box_filter(sizes: &[usize], keep: impl Fn(&[usize]) -> bool) -> Self {
        let mut points = BTreeSet::new();
        let total: usize = sizes.iter().product();
        let mut a = vec![0; sizes.len()];
        for _ in 0..total {
            if keep(&a) {
                points.insert(a.clone());
            }
            for i in (0..sizes.len()).rev() {
                a[i] += 1;
                if a[i] < sizes[i] {
                    break;
                }
                a[i] = 0;
            }
        }
        Self { arity: sizes.len(), points }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, a: &[usize]) -> bool {
        self.points.contains(a)
    }

    /// Points in lexicographic order; generator rows follow this order.
    pub fn iter(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.points.iter()
    }

    /// Closed under divisibility: every componentwise-smaller point is present.
    /// Checking the unit decrements suffices, by induction on the degree.
    pub fn is_decreasing(&self) -> bool {
        self.points.iter().all(|a| {
            (0..a.len()).filter(|&i| a[i] > 0).all(|i| {
                let mut b = a.clone();
                b[i] -= 1;
                self.points.contains(&b)
            })
        })
    }

    pub fn check_box(&self, sizes: &[usize]) -> Result<(), CodeError> {
        if self.arity != sizes.len() {
            return Err(CodeError::ArityMismatch { expected: sizes.len(), found: self.arity });
        }
        for p in &self.points {
            if let Some(axis) = (0..sizes.len()).find(|&i| p[i] >= sizes[i]) {
                return Err(CodeError::ExponentOutsideBox { point: p.clone(), axis });
            }
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Self {
        Self { arity: self.arity, points: self.points.union(&other.points).cloned().collect() }
    }
}

/// `{(n_1-1-a_1, ..., n_m-1-a_m) : a in the box, a ∉ A}`.
pub fn complement_exponents(a: &ExponentSet, sizes: &[usize]) -> Result<ExponentSet, CodeError> {
    a.check_box(sizes)?;
    let points = ExponentSet::full_box(sizes)
        .points
        .into_iter()
        .filter(|p| !a.contains(p))
        .map(|p| p.iter().zip(sizes).map(|(&x, &n)| n - 1 - x).collect());
    ExponentSet::new(sizes.len(), points)
}

/// `A_Car(k) = {a in the box : Σ a_i ≤ k}`.
pub fn car_exponents(sizes: &[usize], k: usize) -> ExponentSet {
    ExponentSet::from_box_filter(sizes, |a| a.iter().sum::<usize>() <= k)
}

/// `k⊥ = Σ(n_i - 1) - k - 1`; negative when the dual is zero.
pub fn car_dual_degree(sizes: &[usize], k: usize) -> i64 {
    sizes.iter().map(|&n| n as i64 - 1).sum::<i64>() - k as i64 - 1
}

fn check_augmented_k(sizes: &[usize], k: &[usize], edge: usize) -> Result<(), CodeError> {
    if k.len() != sizes.len() {
        return Err(CodeError::ArityMismatch { expected: sizes.len(), found: k.len() });
    }
    for (axis, (&n, &ki)) in sizes.iter().zip(k).enumerate() {
        if n < edge {
            return Err(CodeError::AxisTooShort { axis, size: n, edge });
        }
        if ki > n - edge {
            return Err(CodeError::InvalidK { axis, k: ki, max: n - edge });
        }
    }
    Ok(())
}

/// The box minus its top corner block `Π{k_i..n_i-1}`.
pub fn acar1_exponents(sizes: &[usize], k: &[usize], edge: usize) -> Result<ExponentSet, CodeError> {
    check_augmented_k(sizes, k, edge)?;
    let set = ExponentSet::from_box_filter(sizes, |a| a.iter().zip(k).any(|(&x, &ki)| x < ki));
    if set.is_empty() {
        return Err(CodeError::ZeroCode);
    }
    Ok(set)
}

/// The box minus the edge lines `L_j = {k_j ≤ a_j, a_i = n_i - 1 for i ≠ j}`.
pub fn acar2_exponents(sizes: &[usize], k: &[usize], edge: usize) -> Result<ExponentSet, CodeError> {
    check_augmented_k(sizes, k, edge)?;
    let on_line = |a: &[usize], j: usize| a[j] >= k[j] && (0..a.len()).all(|i| i == j || a[i] == sizes[i] - 1);
    Ok(ExponentSet::from_box_filter(sizes, |a| !(0..a.len()).any(|j| on_line(a, j))))
}

/// `Π{0..n_i-k_i-1}`.
pub fn dual_exponents_acar1(sizes: &[usize], k: &[usize]) -> ExponentSet {
    let dims: Vec<usize> = sizes.iter().zip(k).map(|(&n, &ki)| n - ki).collect();
    ExponentSet::full_box(&dims)
}

/// `∪_j {a : a_j ≤ n_j - k_j - 1, a_i = 0 for i ≠ j}`.
pub fn dual_exponents_acar2(sizes: &[usize], k: &[usize]) -> ExponentSet {
    let m = sizes.len();
    let points = (0..m).flat_map(|j| {
        (0..sizes[j] - k[j]).map(move |d| {
            let mut a = vec![0; m];
            a[j] = d;
            a
        })
    });
    ExponentSet::new(m, points).expect("arity matches")
}

/// The trace edge `L_j = {n_j - q^(t-1) ≤ a_j < n_j, a_i = n_i - 1 for i ≠ j}`.
pub fn trace_edge(sizes: &[usize], edge: usize, axis: usize) -> Result<ExponentSet, CodeError> {
    let m = sizes.len();
    if axis >= m {
        return Err(CodeError::AxisOutOfRange { axis, arity: m });
    }
    if sizes[axis] < edge {
        return Err(CodeError::AxisTooShort { axis, size: sizes[axis], edge });
    }
    let points = (sizes[axis] - edge..sizes[axis]).map(|d| {
        let mut a: Vec<usize> = sizes.iter().map(|&n| n - 1).collect();
        a[axis] = d;
        a
    });
    ExponentSet::new(m, points)
}

/// `λ_s = (Π_i Π_{s'_i ∈ S_i \ {s_i}} (s_i - s'_i))^{-1}` for every point.
pub fn lambda_weights(tower: &FieldTower, set: &CartesianSet) -> Result<Vec<Element>, CodeError> {
    let one = tower.one(Level::Top);
    let axis_factors: Vec<Vec<Element>> = (0..set.arity())
        .map(|axis| {
            let s = set.subset(axis);
            s.iter()
                .map(|&x| s.iter().filter(|&&y| y != x).fold(one, |acc, &y| tower.mul(acc, tower.sub(x, y))))
                .collect()
        })
        .collect();
    (0..set.len())
        .map(|pos| {
            let idx = set.coordinate_indices(pos);
            let prod = idx.iter().enumerate().fold(one, |acc, (axis, &i)| tower.mul(acc, axis_factors[axis][i]));
            tower.inv(prod).map_err(CodeError::from)
        })
        .collect()
}

/// A polynomial supported on lattice points, with `K` coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<usize>, Element>,
}

impl Poly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(exponent: Vec<usize>, coefficient: Element) -> Self {
        let mut p = Self::new();
        p.set(exponent, coefficient);
        p
    }

    pub fn set(&mut self, exponent: Vec<usize>, coefficient: Element) {
        if coefficient.is_zero() {
            self.terms.remove(&exponent);
        } else {
            self.terms.insert(exponent, coefficient);
        }
    }

    pub fn coefficient(&self, exponent: &[usize]) -> Option<Element> {
        self.terms.get(exponent).copied()
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.terms.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Element)> {
        self.terms.iter()
    }

    pub fn evaluate(&self, tower: &FieldTower, point: &[Element]) -> Element {
        let mut acc = tower.zero(Level::Top);
        for (a, &c) in &self.terms {
            let term = a.iter().zip(point).fold(c, |v, (&d, &x)| tower.mul(v, tower.pow(x, d as u64)));
            acc = tower.add(acc, term);
        }
        acc
    }
}

/// Which construction produced a code, with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Generic,
    Car { k: usize },
    Rm { k: usize },
    Acar1 { k: Vec<usize> },
    Acar2 { k: Vec<usize> },
    Arm1 { k: usize },
    Arm2 { k: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Generic => "generic",
            Family::Car { .. } => "car",
            Family::Rm { .. } => "rm",
            Family::Acar1 { .. } => "acar1",
            Family::Acar2 { .. } => "acar2",
            Family::Arm1 { .. } => "arm1",
            Family::Arm2 { .. } => "arm2",
        }
    }

    /// ACar1 or its Reed-Muller specialization ARM1.
    pub fn is_acar1(&self) -> bool {
        matches!(self, Family::Acar1 { .. } | Family::Arm1 { .. })
    }

    /// ACar2 or its Reed-Muller specialization ARM2.
    pub fn is_acar2(&self) -> bool {
        matches!(self, Family::Acar2 { .. } | Family::Arm2 { .. })
    }

    /// The k-vector of an augmented family, one entry per axis.
    pub fn k_vector(&self, arity: usize) -> Option<Vec<usize>> {
        match self {
            Family::Acar1 { k } | Family::Acar2 { k } => Some(k.clone()),
            Family::Arm1 { k } | Family::Arm2 { k } => Some(vec![*k; arity]),
            _ => None,
        }
    }

    /// Closed-form dimension where the family has one.
    pub fn closed_form_dimension(&self, sizes: &[usize]) -> Option<usize> {
        let k = self.k_vector(sizes.len())?;
        let n: usize = sizes.iter().product();
        Some(if self.is_acar1() {
            n - sizes.iter().zip(&k).map(|(&ni, &ki)| ni - ki).product::<usize>()
        } else {
            n - sizes.iter().zip(&k).map(|(&ni, &ki)| ni - ki - 1).sum::<usize>() - 1
        })
    }
}

/// A monomial-Cartesian code `C(S, A)` over a field tower.
#[derive(Debug, Clone)]
pub struct MccCode {
    tower: Arc<FieldTower>,
    set: CartesianSet,
    exponents: ExponentSet,
    lambda: Vec<Element>,
    family: Family,
}

impl MccCode {
    pub fn new(tower: Arc<FieldTower>, set: CartesianSet, exponents: ExponentSet) -> Result<Self, CodeError> {
        Self::with_family(tower, set, exponents, Family::Generic)
    }

    fn with_family(
        tower: Arc<FieldTower>,
        set: CartesianSet,
        exponents: ExponentSet,
        family: Family,
    ) -> Result<Self, CodeError> {
        for axis in 0..set.arity() {
            for &x in set.subset(axis) {
                tower.coordinates(x)?;
            }
        }
        exponents.check_box(&set.sizes())?;
        let lambda = lambda_weights(&tower, &set)?;
        Ok(Self { tower, set, exponents, lambda, family })
    }

    /// Cartesian code with total degree at most `k`.
    pub fn car(tower: Arc<FieldTower>, set: CartesianSet, k: usize) -> Result<Self, CodeError> {
        let a = car_exponents(&set.sizes(), k);
        Self::with_family(tower, set, a, Family::Car { k })
    }

    /// Reed-Muller code `RM(K^m, k)`.
    pub fn rm(tower: Arc<FieldTower>, m: usize, k: usize) -> Result<Self, CodeError> {
        let set = CartesianSet::full(&tower, m)?;
        let a = car_exponents(&set.sizes(), k);
        Self::with_family(tower, set, a, Family::Rm { k })
    }

    pub fn acar1(tower: Arc<FieldTower>, set: CartesianSet, k: Vec<usize>) -> Result<Self, CodeError> {
        let a = acar1_exponents(&set.sizes(), &k, edge_length(&tower))?;
        Self::with_family(tower, set, a, Family::Acar1 { k })
    }

    pub fn acar2(tower: Arc<FieldTower>, set: CartesianSet, k: Vec<usize>) -> Result<Self, CodeError> {
        let a = acar2_exponents(&set.sizes(), &k, edge_length(&tower))?;
        Self::with_family(tower, set, a, Family::Acar2 { k })
    }

    /// `ARM1(K^m, k) = ACar1(K^m, (k, ..., k))`.
    pub fn arm1(tower: Arc<FieldTower>, m: usize, k: usize) -> Result<Self, CodeError> {
        let set = CartesianSet::full(&tower, m)?;
        let a = acar1_exponents(&set.sizes(), &vec![k; m], edge_length(&tower))?;
        Self::with_family(tower, set, a, Family::Arm1 { k })
    }

    /// `ARM2(K^m, k) = ACar2(K^m, (k, ..., k))`.
    pub fn arm2(tower: Arc<FieldTower>, m: usize, k: usize) -> Result<Self, CodeError> {
        let set = CartesianSet::full(&tower, m)?;
        let a = acar2_exponents(&set.sizes(), &vec![k; m], edge_length(&tower))?;
        Self::with_family(tower, set, a, Family::Arm2 { k })
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn shared_tower(&self) -> Arc<FieldTower> {
        Arc::clone(&self.tower)
    }

    pub fn set(&self) -> &CartesianSet {
        &self.set
    }

    pub fn exponents(&self) -> &ExponentSet {
        &self.exponents
    }

    pub fn lambda(&self) -> &[Element] {
        &self.lambda
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.set.sizes()
    }

    pub fn arity(&self) -> usize {
        self.set.arity()
    }

    /// `|A|`, equal to the dimension because every exponent lies in the box.
    pub fn dimension(&self) -> usize {
        self.exponents.len()
    }

    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.len() as f64
    }

    /// `q^(t-1)`, the length of every trace edge.
    pub fn edge_length(&self) -> usize {
        edge_length(&self.tower)
    }

    pub fn trace_edge(&self, axis: usize) -> Result<ExponentSet, CodeError> {
        trace_edge(&self.sizes(), self.edge_length(), axis)
    }

    /// `A ∩ L_j = ∅`.
    pub fn edge_disjoint(&self, axis: usize) -> Result<bool, CodeError> {
        Ok(self.trace_edge(axis)?.iter().all(|a| !self.exponents.contains(a)))
    }

    /// Evaluate a polynomial supported on `A` at every grid point.
    pub fn evaluate(&self, f: &Poly) -> Result<Vec<Element>, CodeError> {
        if let Some(a) = f.support().find(|a| !self.exponents.contains(a)) {
            return Err(CodeError::SupportOutsideExponents(a.clone()));
        }
        Ok(self.evaluate_terms(f.terms().map(|(a, &c)| (a.as_slice(), c))))
    }

    fn evaluate_terms<'a>(&self, terms: impl Iterator<Item = (&'a [usize], Element)>) -> Vec<Element> {
        let tower = &*self.tower;
        let terms: Vec<(&[usize], Element)> = terms.filter(|(_, c)| !c.is_zero()).collect();
        let powers: Vec<Vec<Vec<Element>>> = (0..self.arity())
            .map(|axis| {
                let n = self.set.subset(axis).len();
                self.set
                    .subset(axis)
                    .iter()
                    .map(|&x| {
                        let mut row = Vec::with_capacity(n);
                        let mut v = tower.one(Level::Top);
                        for _ in 0..n {
                            row.push(v);
                            v = tower.mul(v, x);
                        }
                        row
                    })
                    .collect()
            })
            .collect();
        (0..self.len())
            .map(|pos| {
                let idx = self.set.coordinate_indices(pos);
                terms.iter().fold(tower.zero(Level::Top), |acc, &(a, c)| {
                    let mono = a.iter().enumerate().fold(c, |v, (axis, &d)| tower.mul(v, powers[axis][idx[axis]][d]));
                    tower.add(acc, mono)
                })
            })
            .collect()
    }

    /// Encode a message given as one coefficient per exponent, in exponent order.
    pub fn encode(&self, message: &[Element]) -> Result<Vec<Element>, CodeError> {
        if message.len() != self.dimension() {
            return Err(CodeError::CoefficientCount { expected: self.dimension(), found: message.len() });
        }
        Ok(self.evaluate_terms(self.exponents.iter().map(Vec::as_slice).zip(message.iter().copied())))
    }

    pub fn random_message<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Element> {
        let order = self.tower.order(Level::Top);
        (0..self.dimension())
            .map(|_| self.tower.element(Level::Top, rng.gen_range(0..order)).expect("in range"))
            .collect()
    }

    pub fn random_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Element> {
        let msg = self.random_message(rng);
        self.encode(&msg).expect("message has the right length")
    }

    /// Rows `ev_S(x^a)` for `a ∈ A` in exponent order.
    pub fn generator_matrix(&self) -> Vec<Vec<Element>> {
        let one = self.tower.one(Level::Top);
        self.exponents.iter().map(|a| self.evaluate_terms(std::iter::once((a.as_slice(), one)))).collect()
    }

    /// Rank of the generator matrix over `K`.
    pub fn generator_rank(&self) -> usize {
        let rows = self.generator_matrix().into_iter().map(|r| r.into_iter().map(Element::index).collect()).collect();
        linalg::rank(self.tower.arith(Level::Top), rows)
    }

    /// `C(S, A)^⊥ = D_S C(S, A^∁_S)`, valid when `A` is decreasing.
    pub fn dual_code(&self) -> Result<DualCode, CodeError> {
        if !self.exponents.is_decreasing() {
            return Err(CodeError::NotDecreasing);
        }
        let complement = complement_exponents(&self.exponents, &self.sizes())?;
        let code = Self {
            tower: Arc::clone(&self.tower),
            set: self.set.clone(),
            exponents: complement,
            lambda: self.lambda.clone(),
            family: Family::Generic,
        };
        Ok(DualCode { code, twist: self.lambda.clone() })
    }

    pub fn inner_product(&self, a: &[Element], b: &[Element]) -> Element {
        let tower = &*self.tower;
        a.iter().zip(b).fold(tower.zero(Level::Top), |acc, (&x, &y)| tower.add(acc, tower.mul(x, y)))
    }
}

/// The dual of a decreasing code: `D_S · C(S, A^∁_S)`.
#[derive(Debug, Clone)]
pub struct DualCode {
    code: MccCode,
    twist: Vec<Element>,
}

impl DualCode {
    /// The untwisted code `C(S, A^∁_S)`.
    pub fn code(&self) -> &MccCode {
        &self.code
    }

    /// The diagonal of `D_S`.
    pub fn twist(&self) -> &[Element] {
        &self.twist
    }

    pub fn dimension(&self) -> usize {
        self.code.dimension()
    }

    /// Rows `D_S · ev_S(x^b)` for `b ∈ A^∁_S`.
    pub fn generator_matrix(&self) -> Vec<Vec<Element>> {
        twisted_rows(self.code.tower(), self.code.generator_matrix(), &self.twist)
    }
}

pub(crate) fn twisted_rows(tower: &FieldTower, rows: Vec<Vec<Element>>, twist: &[Element]) -> Vec<Vec<Element>> {
    rows.into_iter().map(|row| row.into_iter().zip(twist).map(|(x, &l)| tower.mul(x, l)).collect()).collect()
}

fn edge_length(tower: &FieldTower) -> usize {
    tower.q().pow(tower.t() as u32 - 1) as usize
}
