//! Trace repair of one or two erased symbols through subsymbol queries.
//!
//! Every repair polynomial has the shape `g_i(x) = c · Tr(z_i u) / u` with
//! `u = (x_j - a) · w`, a univariate polynomial of degree `q^(t-1) - 1` in
//! `x_j`. It lies in the dual code whenever `A` misses the trace edge `L_j`,
//! so `Σ_s λ_s g_i(s) f(s) = 0` for every codeword. Taking traces splits
//! that identity into `F_q`-valued downloads:
//!
//! * at a helper with `u(s) ≠ 0`, `Tr(λ_s g_i(s) f(s)) = Tr(z_i u(s)) · Tr(λ_s c f(s) / u(s))`,
//!   one download serving every `i`;
//! * at a helper with `u(s) = 0`, `g_i(s) = c z_i` and `t` downloads are needed.
//!
//! Plans are built from the code description alone. [`execute`] is the only
//! place that touches data, and it does so through a [`HelperOracle`].

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::codes::{CodeError, MccCode};
use crate::field::{Element, FieldError, FieldTower, Level, TraceBasis};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepairError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("A ∩ L_{axis} ≠ ∅: the exponent set meets the trace edge on axis {axis}")]
    EdgeNotDisjoint { axis: usize },
    #[error("no axis has a trace edge disjoint from A")]
    NoValidAxis,
    #[error("no axis separates positions {0} and {1} with a disjoint trace edge")]
    NoSeparatingAxis(usize, usize),
    #[error("the exponent set is not decreasing")]
    NotDecreasing,
    #[error("position {position} is out of range for length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("positions {0} and {1} coincide on axis {2}")]
    SameCoordinate(usize, usize, usize),
    #[error("two-erasure repair needs t ≥ 2")]
    NeedsExtension,
    #[error("erased positions must be distinct")]
    RepeatedPosition,
    #[error("scheme {scheme} does not apply to a {family} code")]
    WrongFamily { scheme: Scheme, family: &'static str },
    #[error("position {0} is erased and cannot be queried")]
    ErasedPosition(usize),
    #[error("reconstruction references query {0}, which was never issued")]
    PlanIncomplete(usize),
    #[error("kernel basis does not satisfy the scheme's requirements")]
    InvalidKernelBasis,
    #[error("scheme {scheme} repairs a fixed number of erasures, got {found}")]
    ErasureCount { scheme: Scheme, found: usize },
    #[error("repair identity {0} failed during planning")]
    BrokenIdentity(&'static str),
}

/// Repair scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Single,
    TwoDmcc,
    TwoAcar2,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Single => "single",
            Scheme::TwoDmcc => "two-dmcc",
            Scheme::TwoAcar2 => "two-acar2",
        })
    }
}

/// The download interface to the surviving nodes.
///
/// A query returns `Tr(μ · c_position) ∈ F_q`; there is no way to read a
/// `K`-valued symbol.
pub trait HelperOracle {
    fn query(&mut self, position: usize, multiplier: Element) -> Result<Element, RepairError>;
}

/// An oracle over a stored codeword that refuses erased positions and
/// counts every call.
#[derive(Debug)]
pub struct CodewordOracle<'a> {
    tower: &'a FieldTower,
    word: Vec<Element>,
    erased: BTreeSet<usize>,
    calls: usize,
    per_helper: BTreeMap<usize, usize>,
}

impl<'a> CodewordOracle<'a> {
    pub fn new(tower: &'a FieldTower, word: Vec<Element>, erased: &[usize]) -> Self {
        Self { tower, word, erased: erased.iter().copied().collect(), calls: 0, per_helper: BTreeMap::new() }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn per_helper(&self) -> &BTreeMap<usize, usize> {
        &self.per_helper
    }
}

impl HelperOracle for CodewordOracle<'_> {
    fn query(&mut self, position: usize, multiplier: Element) -> Result<Element, RepairError> {
        if position >= self.word.len() {
            return Err(RepairError::PositionOutOfRange { position, len: self.word.len() });
        }
        if self.erased.contains(&position) {
            return Err(RepairError::ErasedPosition(position));
        }
        let answer = self.tower.trace(self.tower.mul(multiplier, self.word[position]))?;
        self.calls += 1;
        *self.per_helper.entry(position).or_default() += 1;
        Ok(answer)
    }
}

/// A download `Tr(μ · c_position)` with `μ` scaled so its first nonzero
/// `F_q`-coordinate is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SubsymbolQuery {
    pub position: usize,
    pub multiplier: Element,
}

/// Split `μ ≠ 0` as `scale · normalized` with `scale ∈ F_q^*`.
pub fn normalize_multiplier(tower: &FieldTower, mu: Element) -> Result<(Element, Element), FieldError> {
    let coords = tower.coordinates(mu)?;
    let lead = coords.into_iter().find(|c| !c.is_zero()).ok_or(FieldError::ZeroMultiplier)?;
    Ok((tower.scale(tower.inv(lead)?, mu)?, lead))
}

/// `Σ coeff · answer[query]` with `F_q` coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LinearForm {
    pub terms: Vec<(usize, Element)>,
}

/// Tuning knobs for the deterministic choices a plan makes. The defaults
/// reproduce the canonical choices; alternatives exist to test that the
/// recovered values do not depend on them.
#[derive(Debug, Clone, Default)]
pub struct PlanOptions {
    /// Basis `z_1..z_t` for single-erasure repair (default: polynomial basis).
    pub basis: Option<Vec<Element>>,
    /// Basis `z_1..z_{t-1}` of the relevant trace kernel for two erasures.
    pub kernel_basis: Option<Vec<Element>>,
    /// Which nonzero element of `ker Tr` serves as `τ` (0 = first).
    pub tau_rank: usize,
    /// How many rank-raising candidates to skip when choosing `z_t`.
    pub completion_rank: usize,
}

/// One family of repair polynomials `c · Tr(z_i u) / u`, `u = (x_j - a) w`.
#[derive(Debug, Clone, Copy)]
struct PolyFamily {
    c: Element,
    a: Element,
    w: Element,
}

impl PolyFamily {
    fn u(&self, tower: &FieldTower, x: Element) -> Element {
        tower.mul(tower.sub(x, self.a), self.w)
    }

    /// `g_i` evaluated at a point whose axis-`j` coordinate is `x`.
    fn value(&self, tower: &FieldTower, z: Element, x: Element) -> Result<Element, FieldError> {
        let u = self.u(tower, x);
        if u.is_zero() {
            return Ok(tower.mul(self.c, z));
        }
        let tr = tower.trace(tower.mul(z, u))?;
        tower.scale(tr, tower.div(self.c, u)?)
    }
}

/// Which symbols a plan recovers and how.
#[derive(Debug, Clone, Serialize)]
pub struct RepairPlan {
    pub scheme: Scheme,
    pub erased: Vec<usize>,
    pub axis: usize,
    pub basis: Vec<Element>,
    pub dual_basis: Vec<Element>,
    pub tau: Option<Element>,
    /// `F_q` coefficients `β_i` with `p_t(s') = Σ β_i z_i` (two erasures).
    pub expansion: Vec<Element>,
    pub queries: Vec<SubsymbolQuery>,
    /// `T_i = -Σ_helpers Tr(λ_s p_i(s) f(s))` for the first family.
    first: Vec<LinearForm>,
    /// Same for the second family (two erasures).
    second: Vec<LinearForm>,
    /// `p_i(s*) = c z_i`.
    first_scale: Element,
    /// `q_i(s*)`, needed to peel `f(s*)` out of the second family.
    cross: Vec<Element>,
    lambda: Vec<Element>,
}

impl RepairPlan {
    /// Distinct normalized downloads.
    pub fn bandwidth(&self) -> usize {
        self.queries.len()
    }

    /// Downloads per helper position.
    pub fn per_helper(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for q in &self.queries {
            *out.entry(q.position).or_default() += 1;
        }
        out
    }

    /// Drop all but the first `keep` queries. Executing the result fails
    /// unless the dropped queries were never needed.
    pub fn truncated(&self, keep: usize) -> Self {
        let mut plan = self.clone();
        plan.queries.truncate(keep);
        plan
    }
}

/// Recovered symbols and download accounting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepairResult {
    pub recovered: Vec<(usize, Element)>,
    pub bandwidth: usize,
    pub bitwidth: f64,
    pub per_helper: BTreeMap<usize, usize>,
}

struct PlanBuilder<'a> {
    code: &'a MccCode,
    axis: usize,
    erased: Vec<usize>,
    index: BTreeMap<SubsymbolQuery, usize>,
    queries: Vec<SubsymbolQuery>,
}

impl<'a> PlanBuilder<'a> {
    fn new(code: &'a MccCode, axis: usize, erased: Vec<usize>) -> Self {
        Self { code, axis, erased, index: BTreeMap::new(), queries: Vec::new() }
    }

    fn push(&mut self, position: usize, mu: Element) -> Result<(usize, Element), FieldError> {
        let (multiplier, scale) = normalize_multiplier(self.code.tower(), mu)?;
        let q = SubsymbolQuery { position, multiplier };
        let id = *self.index.entry(q).or_insert_with(|| {
            self.queries.push(q);
            self.queries.len() - 1
        });
        Ok((id, scale))
    }

    /// Linear forms for `T_i = -Σ_{helpers} Tr(λ_s g_i(s) f(s))`.
    fn family_forms(&mut self, family: PolyFamily, basis: &[Element]) -> Result<Vec<LinearForm>, FieldError> {
        let code = self.code;
        let tower = code.tower();
        let minus_one = tower.neg(tower.one(Level::Mid));
        let mut forms = vec![LinearForm::default(); basis.len()];
        for pos in 0..code.len() {
            if self.erased.contains(&pos) {
                continue;
            }
            let lambda = code.lambda()[pos];
            let u = family.u(tower, code.set().coordinate(pos, self.axis));
            if u.is_zero() {
                for (i, &z) in basis.iter().enumerate() {
                    let (id, scale) = self.push(pos, tower.mul(lambda, tower.mul(family.c, z)))?;
                    forms[i].terms.push((id, tower.mul(minus_one, scale)));
                }
            } else {
                let (id, scale) = self.push(pos, tower.div(tower.mul(lambda, family.c), u)?)?;
                for (i, &z) in basis.iter().enumerate() {
                    let factor = tower.trace(tower.mul(z, u))?;
                    if !factor.is_zero() {
                        forms[i].terms.push((id, tower.mul(minus_one, tower.mul(factor, scale))));
                    }
                }
            }
        }
        Ok(forms)
    }
}

fn check_position(code: &MccCode, position: usize) -> Result<(), RepairError> {
    if position >= code.len() {
        return Err(RepairError::PositionOutOfRange { position, len: code.len() });
    }
    Ok(())
}

fn check_axis(code: &MccCode, axis: usize) -> Result<(), RepairError> {
    if !code.exponents().is_decreasing() {
        return Err(RepairError::NotDecreasing);
    }
    if !code.edge_disjoint(axis)? {
        return Err(RepairError::EdgeNotDisjoint { axis });
    }
    Ok(())
}

/// Axes whose trace edge misses `A`, largest `n_j` first, ties toward larger `j`.
pub fn valid_axes(code: &MccCode) -> Vec<usize> {
    let sizes = code.sizes();
    let mut axes: Vec<usize> = (0..code.arity()).filter(|&j| code.edge_disjoint(j).unwrap_or(false)).collect();
    axes.sort_by(|&a, &b| (sizes[b], b).cmp(&(sizes[a], a)));
    axes
}

/// The preferred single-erasure axis.
pub fn choose_axis(code: &MccCode) -> Result<usize, RepairError> {
    valid_axes(code).first().copied().ok_or(RepairError::NoValidAxis)
}

/// The preferred axis on which two positions differ.
pub fn choose_axis_pair(code: &MccCode, first: usize, second: usize) -> Result<usize, RepairError> {
    check_position(code, first)?;
    check_position(code, second)?;
    if first == second {
        return Err(RepairError::RepeatedPosition);
    }
    let set = code.set();
    valid_axes(code)
        .into_iter()
        .find(|&j| set.coordinate(first, j) != set.coordinate(second, j))
        .ok_or(RepairError::NoSeparatingAxis(first, second))
}

/// Single-erasure repair along `axis`.
pub fn plan_single(code: &MccCode, erased: usize, axis: usize) -> Result<RepairPlan, RepairError> {
    plan_single_with(code, erased, axis, &PlanOptions::default())
}

pub fn plan_single_with(
    code: &MccCode,
    erased: usize,
    axis: usize,
    options: &PlanOptions,
) -> Result<RepairPlan, RepairError> {
    check_position(code, erased)?;
    check_axis(code, axis)?;
    let tower = code.tower();
    let basis = match &options.basis {
        Some(b) => b.clone(),
        None => tower.polynomial_basis(),
    };
    let dual = tower.dual_basis(&basis)?;
    let one = tower.one(Level::Top);
    let family = PolyFamily { c: one, a: code.set().coordinate(erased, axis), w: one };
    let mut builder = PlanBuilder::new(code, axis, vec![erased]);
    let first = builder.family_forms(family, &basis)?;
    Ok(RepairPlan {
        scheme: Scheme::Single,
        erased: vec![erased],
        axis,
        basis,
        dual_basis: dual.dual().to_vec(),
        tau: None,
        expansion: Vec::new(),
        queries: builder.queries,
        first,
        second: Vec::new(),
        first_scale: one,
        cross: Vec::new(),
        lambda: vec![code.lambda()[erased]],
    })
}

/// Two-erasure repair for any decreasing code, along an axis separating the
/// positions.
pub fn plan_two_dmcc(code: &MccCode, first: usize, second: usize, axis: usize) -> Result<RepairPlan, RepairError> {
    plan_two_dmcc_with(code, first, second, axis, &PlanOptions::default())
}

fn check_pair(code: &MccCode, first: usize, second: usize, axis: usize) -> Result<(Element, Element), RepairError> {
    check_position(code, first)?;
    check_position(code, second)?;
    if first == second {
        return Err(RepairError::RepeatedPosition);
    }
    if code.tower().t() < 2 {
        return Err(RepairError::NeedsExtension);
    }
    check_axis(code, axis)?;
    let s_star = code.set().coordinate(first, axis);
    let s_prime = code.set().coordinate(second, axis);
    if s_star == s_prime {
        return Err(RepairError::SameCoordinate(first, second, axis));
    }
    Ok((s_star, s_prime))
}

pub fn plan_two_dmcc_with(
    code: &MccCode,
    first: usize,
    second: usize,
    axis: usize,
    options: &PlanOptions,
) -> Result<RepairPlan, RepairError> {
    let (s_star, s_prime) = check_pair(code, first, second, axis)?;
    let tower = code.tower();
    let diff = tower.sub(s_prime, s_star);
    let kernel = match &options.kernel_basis {
        Some(k) => validated_kernel(tower, k, diff)?,
        None => tower.trace_kernel_basis(diff)?,
    };
    let tau = tower.trace_kernel_element(options.tau_rank)?;
    let one = tower.one(Level::Top);
    let p = PolyFamily { c: tau, a: s_star, w: one };
    let q = PolyFamily { c: one, a: s_prime, w: one };
    build_two(code, first, second, axis, Scheme::TwoDmcc, &kernel, options.completion_rank, p, q, Some(tau))
}

/// Two erasures in an ACar1 (or ARM1) code: the general scheme on the
/// preferred separating axis.
pub fn plan_two_acar1(code: &MccCode, first: usize, second: usize) -> Result<RepairPlan, RepairError> {
    if !code.family().is_acar1() {
        return Err(RepairError::WrongFamily { scheme: Scheme::TwoDmcc, family: code.family().name() });
    }
    let axis = choose_axis_pair(code, first, second)?;
    plan_two_dmcc(code, first, second, axis)
}

/// The ACar2-specific two-erasure scheme, with `z_1..z_{t-1}` spanning `ker Tr`.
pub fn plan_two_acar2(code: &MccCode, first: usize, second: usize) -> Result<RepairPlan, RepairError> {
    let axis = choose_axis_pair(code, first, second)?;
    plan_two_acar2_with(code, first, second, axis, &PlanOptions::default())
}

pub fn plan_two_acar2_with(
    code: &MccCode,
    first: usize,
    second: usize,
    axis: usize,
    options: &PlanOptions,
) -> Result<RepairPlan, RepairError> {
    if !code.family().is_acar2() {
        return Err(RepairError::WrongFamily { scheme: Scheme::TwoAcar2, family: code.family().name() });
    }
    let (s_star, s_prime) = check_pair(code, first, second, axis)?;
    let tower = code.tower();
    let one = tower.one(Level::Top);
    let kernel = match &options.kernel_basis {
        Some(k) => validated_kernel(tower, k, one)?,
        None => tower.trace_kernel_basis(one)?,
    };
    let p = PolyFamily { c: kernel[0], a: s_star, w: tower.inv(tower.sub(s_prime, s_star))? };
    let q = PolyFamily { c: one, a: s_prime, w: tower.inv(tower.sub(s_star, s_prime))? };
    build_two(code, first, second, axis, Scheme::TwoAcar2, &kernel, options.completion_rank, p, q, None)
}

/// Plan `scheme` for the given erasures on the preferred axis.
///
/// `TwoDmcc` on an ACar1-family code is the ACar1 two-erasure scheme.
pub fn plan(code: &MccCode, scheme: Scheme, erased: &[usize]) -> Result<RepairPlan, RepairError> {
    match (scheme, erased) {
        (Scheme::Single, &[e]) => plan_single(code, e, choose_axis(code)?),
        (Scheme::TwoDmcc, &[a, b]) => plan_two_dmcc(code, a, b, choose_axis_pair(code, a, b)?),
        (Scheme::TwoAcar2, &[a, b]) => plan_two_acar2(code, a, b),
        _ => Err(RepairError::ErasureCount { scheme, found: erased.len() }),
    }
}

/// Number of erasures a scheme repairs.
pub fn erasure_count(scheme: Scheme) -> usize {
    if scheme == Scheme::Single {
        1
    } else {
        2
    }
}

fn validated_kernel(tower: &FieldTower, kernel: &[Element], beta: Element) -> Result<Vec<Element>, RepairError> {
    let in_kernel = kernel.iter().all(|&z| tower.trace(tower.mul(z, beta)).map(|v| v.is_zero()).unwrap_or(false));
    if kernel.len() + 1 != tower.t() || !in_kernel || tower.rank_over_subfield(kernel)? != kernel.len() {
        return Err(RepairError::InvalidKernelBasis);
    }
    Ok(kernel.to_vec())
}

#[allow(clippy::too_many_arguments)]
fn build_two(
    code: &MccCode,
    first: usize,
    second: usize,
    axis: usize,
    scheme: Scheme,
    kernel: &[Element],
    completion_rank: usize,
    p: PolyFamily,
    q: PolyFamily,
    tau: Option<Element>,
) -> Result<RepairPlan, RepairError> {
    let tower = code.tower();
    let t = tower.t();
    let basis = tower.complete_basis_with_offset(kernel, completion_rank)?;
    let dual = tower.dual_basis(&basis)?;
    let s_star = code.set().coordinate(first, axis);
    let s_prime = code.set().coordinate(second, axis);

    // p_i(s') and q_i(s*) vanish for i < t; p_t(s') lies in span(z_1..z_{t-1}).
    for &z in &basis[..t - 1] {
        if !p.value(tower, z, s_prime)?.is_zero() {
            return Err(RepairError::BrokenIdentity("p_i(s') = 0"));
        }
        if !q.value(tower, z, s_star)?.is_zero() {
            return Err(RepairError::BrokenIdentity("q_i(s*) = 0"));
        }
    }
    let p_t = p.value(tower, basis[t - 1], s_prime)?;
    let expansion = coefficients(&dual, tower, p_t)?;
    if !expansion[t - 1].is_zero() {
        return Err(RepairError::BrokenIdentity("p_t(s') ∈ span(z_1..z_{t-1})"));
    }
    let cross = basis.iter().map(|&z| q.value(tower, z, s_star)).collect::<Result<Vec<_>, _>>()?;

    let mut builder = PlanBuilder::new(code, axis, vec![first, second]);
    let first_forms = builder.family_forms(p, &basis)?;
    let second_forms = builder.family_forms(q, &basis)?;
    Ok(RepairPlan {
        scheme,
        erased: vec![first, second],
        axis,
        basis,
        dual_basis: dual.dual().to_vec(),
        tau,
        expansion,
        queries: builder.queries,
        first: first_forms,
        second: second_forms,
        first_scale: p.c,
        cross,
        lambda: vec![code.lambda()[first], code.lambda()[second]],
    })
}

/// `x = Σ β_i z_i` with `β_i = Tr(x z'_i)`.
fn coefficients(dual: &TraceBasis, tower: &FieldTower, x: Element) -> Result<Vec<Element>, FieldError> {
    dual.coefficients(tower, x)
}

fn evaluate_form(tower: &FieldTower, form: &LinearForm, answers: &[Element]) -> Result<Element, RepairError> {
    form.terms.iter().try_fold(tower.zero(Level::Mid), |acc, &(id, c)| {
        let a = answers.get(id).ok_or(RepairError::PlanIncomplete(id))?;
        Ok(tower.add(acc, tower.mul(c, *a)))
    })
}

/// `Σ v_i z'_i`.
fn combine(tower: &FieldTower, values: &[Element], dual: &[Element]) -> Result<Element, FieldError> {
    values.iter().zip(dual).try_fold(tower.zero(Level::Top), |acc, (&v, &d)| Ok(tower.add(acc, tower.scale(v, d)?)))
}

/// Issue the plan's downloads and reconstruct the erased symbols.
pub fn execute<O: HelperOracle + ?Sized>(
    tower: &FieldTower,
    plan: &RepairPlan,
    oracle: &mut O,
) -> Result<RepairResult, RepairError> {
    let mut answers = Vec::with_capacity(plan.queries.len());
    let mut per_helper = BTreeMap::new();
    for q in &plan.queries {
        answers.push(oracle.query(q.position, q.multiplier)?);
        *per_helper.entry(q.position).or_default() += 1;
    }
    let t = plan.basis.len();
    let first: Vec<Element> = plan.first.iter().map(|f| evaluate_form(tower, f, &answers)).collect::<Result<_, _>>()?;
    let second: Vec<Element> =
        plan.second.iter().map(|f| evaluate_form(tower, f, &answers)).collect::<Result<_, _>>()?;

    // Tr(λ* c z_i f*) for every i.
    let mut star_traces = first.clone();
    if !second.is_empty() {
        let correction = plan.expansion[..t - 1]
            .iter()
            .zip(&second)
            .fold(tower.zero(Level::Mid), |acc, (&b, &v)| tower.add(acc, tower.mul(b, v)));
        star_traces[t - 1] = tower.sub(first[t - 1], correction);
    }
    let scaled = combine(tower, &star_traces, &plan.dual_basis)?;
    let f_star = tower.div(scaled, tower.mul(plan.lambda[0], plan.first_scale))?;
    let mut recovered = vec![(plan.erased[0], f_star)];

    if !second.is_empty() {
        let lam_f = tower.mul(plan.lambda[0], f_star);
        let prime_traces = second
            .iter()
            .zip(&plan.cross)
            .map(|(&v, &g)| Ok(tower.sub(v, tower.trace(tower.mul(g, lam_f))?)))
            .collect::<Result<Vec<_>, FieldError>>()?;
        let scaled = combine(tower, &prime_traces, &plan.dual_basis)?;
        recovered.push((plan.erased[1], tower.div(scaled, plan.lambda[1])?));
    }
    let bandwidth = answers.len();
    Ok(RepairResult { recovered, bandwidth, bitwidth: bitwidth(bandwidth as u64, tower.q()), per_helper })
}

/// `b · log2(q)`.
pub fn bitwidth(bandwidth: u64, q: u64) -> f64 {
    bandwidth as f64 * (q as f64).log2()
}

/// `n - 1 + (t - 1)(n/n_j - 1)`.
pub fn single_bound(n: u64, n_j: u64, t: u64) -> u64 {
    n - 1 + (t - 1) * (n / n_j - 1)
}

/// `2[(n - 2) + (t - 1)(n/n_j - 1)]`, from counting helpers per column.
pub fn two_bound(n: u64, n_j: u64, t: u64) -> u64 {
    2 * ((n - 2) + (t - 1) * (n / n_j - 1))
}

/// `2[n - 2 + (t - 1)(n/n_j - 2)]`, the tighter expression quoted in the
/// literature; can be smaller than what the scheme downloads.
pub fn two_bound_printed(n: u64, n_j: u64, t: u64) -> i64 {
    2 * ((n as i64 - 2) + (t as i64 - 1) * (n as i64 / n_j as i64 - 2))
}

/// The closed-form bound for `scheme` on `axis`.
pub fn bandwidth_bound(scheme: Scheme, code: &MccCode, axis: usize) -> Result<u64, RepairError> {
    check_axis(code, axis)?;
    let t = code.tower().t() as u64;
    if scheme != Scheme::Single && t < 2 {
        return Err(RepairError::NeedsExtension);
    }
    if scheme == Scheme::TwoAcar2 && !code.family().is_acar2() {
        return Err(RepairError::WrongFamily { scheme, family: code.family().name() });
    }
    let n = code.len() as u64;
    let n_j = code.sizes()[axis] as u64;
    Ok(match scheme {
        Scheme::Single => single_bound(n, n_j, t),
        _ => two_bound(n, n_j, t),
    })
}

/// Single-erasure bandwidth of `ARM(K^m, k)`: `q^{tm} - 1 + (t - 1)(q^{t(m-1)} - 1)`.
pub fn arm_bandwidth(q: u64, t: u32, m: u32) -> u64 {
    let qt = q.pow(t);
    single_bound(qt.pow(m), qt, t as u64)
}

/// An externally published repair scheme, evaluated by formula only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Baseline {
    pub name: &'static str,
    pub length: u64,
    pub dimension: u64,
    pub bandwidth: u64,
}

/// Reed-Solomon with trace repair (`b = n - 1`), over the smallest
/// `t ≥ 2` whose field admits dimension `k ≤ n - q^{t-1}` with `n ≤ q^t`.
/// Returns `(t, baseline)`.
pub fn gw_baseline(q: u64, k: u64) -> Option<(u32, Baseline)> {
    (2..=64u32).find_map(|t| {
        let qt = q.checked_pow(t)?;
        let edge = q.pow(t - 1);
        (k + edge <= qt).then(|| {
            let n = k + edge;
            (t, Baseline { name: "rs-gw", length: n, dimension: k, bandwidth: n - 1 })
        })
    })
}

/// Whether trace repair applies to `RS(q^t, k)` over the full field.
pub fn gw_applicable(q: u64, t: u32, k: u64) -> bool {
    k <= q.pow(t) - q.pow(t - 1)
}

/// The Reed-Muller trace repair baseline `b = (q^t - 1) t`, valid for
/// `k ≤ q^t - 2`.
pub fn rm_baseline(q: u64, t: u32, k: u64) -> Option<u64> {
    let qt = q.pow(t);
    (k + 2 <= qt).then(|| (qt - 1) * t as u64)
}

/// Quoted bandwidth of a scheme not simulated here.
pub const PRIOR_ARM1_F27_SQUARED: u64 = 837;
/// Quoted bitwidth of a scheme not simulated here.
pub const PRIOR_ARM1_F8_CUBED: u64 = 847;
/// Quoted bitwidth of a Hermitian-code scheme not simulated here.
pub const HERMITIAN_BITWIDTH: u64 = 1533;

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn normalization_is_scale_invariant() {
        let tower = FieldTower::new(3, 1, 2).unwrap();
        let mu = tower.element(Level::Top, 7).unwrap();
        let two = tower.element(Level::Mid, 2).unwrap();
        let (a, s) = normalize_multiplier(&tower, mu).unwrap();
        let (b, s2) = normalize_multiplier(&tower, tower.scale(two, mu).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(tower.mul(s, two), s2);
        assert!(normalize_multiplier(&tower, tower.zero(Level::Top)).is_err());
    }

    #[test]
    fn erased_positions_are_unqueryable() {
        let tower = FieldTower::new(2, 1, 2).unwrap();
        let word = vec![tower.one(Level::Top); 4];
        let mut oracle = CodewordOracle::new(&tower, word, &[1]);
        assert_eq!(oracle.query(1, tower.one(Level::Top)), Err(RepairError::ErasedPosition(1)));
        assert_eq!(oracle.calls(), 0);
        assert_eq!(oracle.query(0, tower.one(Level::Top)).unwrap().level(), Level::Mid);
    }

    #[test]
    fn two_erasure_needs_extension() {
        let tower = Arc::new(FieldTower::new(5, 1, 1).unwrap());
        let code = MccCode::arm1(tower, 1, 3).unwrap();
        assert_eq!(plan_two_dmcc(&code, 0, 1, 0).unwrap_err(), RepairError::NeedsExtension);
    }

    #[test]
    fn full_box_has_no_valid_axis() {
        let tower = Arc::new(FieldTower::new(2, 1, 2).unwrap());
        let code = MccCode::rm(tower, 1, 3).unwrap();
        assert_eq!(choose_axis(&code).unwrap_err(), RepairError::NoValidAxis);
        assert_eq!(plan_single(&code, 0, 0).unwrap_err(), RepairError::EdgeNotDisjoint { axis: 0 });
    }

    #[test]
    fn formula_values() {
        assert_eq!(arm_bandwidth(2, 3, 2), 77);
        assert_eq!(single_bound(32, 8, 3), 37);
        assert_eq!(arm_bandwidth(5, 4, 3), 245_312_496);
        assert_eq!(
            gw_baseline(3, 648).unwrap(),
            (7, Baseline { name: "rs-gw", length: 1377, dimension: 648, bandwidth: 1376 })
        );
        assert_eq!(rm_baseline(5, 4, 623), Some(2496));
        assert_eq!(rm_baseline(5, 4, 624), None);
    }
}
