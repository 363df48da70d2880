//! Brute-force verifiers, independent of the closed forms they check.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codes::{twisted_rows, MccCode};
use crate::field::{Element, Level};
use crate::repair::{self, CodewordOracle, RepairPlan, Scheme};

/// Largest length for which generator-matrix checks run.
pub const MAX_CHECK_LENGTH: usize = 512;
/// Enumerate every codeword when there are at most this many.
pub const ENUMERATION_LIMIT: u64 = 4096;
/// Codewords drawn when enumeration is too large.
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of one check. Failures always carry a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub instance: String,
    pub status: Status,
    pub detail: String,
    pub witness: Option<String>,
}

impl CheckReport {
    fn pass(name: &str, instance: String, detail: String) -> Self {
        Self { name: name.into(), instance, status: Status::Pass, detail, witness: None }
    }

    fn fail(name: &str, instance: String, witness: String) -> Self {
        Self { name: name.into(), instance, status: Status::Fail, detail: String::new(), witness: Some(witness) }
    }

    fn skipped(name: &str, instance: String, detail: String) -> Self {
        Self { name: name.into(), instance, status: Status::Skipped, detail, witness: None }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// A short description of a code for reports.
pub fn describe(code: &MccCode) -> String {
    let tower = code.tower();
    format!(
        "{} over GF({}^{})^{} sizes={:?} n={} dim={}",
        code.family().name(),
        tower.q(),
        tower.t(),
        code.arity(),
        code.sizes(),
        code.len(),
        code.dimension()
    )
}

/// Every generator of `C` is orthogonal to every generator of its dual.
pub fn check_dual_orthogonality(code: &MccCode) -> CheckReport {
    check_dual_orthogonality_with_twist(code, code.lambda())
}

/// As [`check_dual_orthogonality`] with an explicit diagonal twist in place
/// of `λ`; a corrupted twist must fail.
pub fn check_dual_orthogonality_with_twist(code: &MccCode, twist: &[Element]) -> CheckReport {
    const NAME: &str = "dual-orthogonality";
    let instance = describe(code);
    if code.len() > MAX_CHECK_LENGTH {
        return CheckReport::skipped(NAME, instance, format!("n > {MAX_CHECK_LENGTH}"));
    }
    let dual = match code.dual_code() {
        Ok(d) => d,
        Err(e) => return CheckReport::fail(NAME, instance, e.to_string()),
    };
    let rows = code.generator_matrix();
    let dual_rows = twisted_rows(code.tower(), dual.code().generator_matrix(), twist);
    let a: Vec<_> = code.exponents().iter().collect();
    let b: Vec<_> = dual.code().exponents().iter().collect();
    for (i, r) in rows.iter().enumerate() {
        for (k, d) in dual_rows.iter().enumerate() {
            let ip = code.inner_product(r, d);
            if !ip.is_zero() {
                return CheckReport::fail(
                    NAME,
                    instance,
                    format!("<ev(x^{:?}), D·ev(x^{:?})> = {}", a[i], b[k], ip.index()),
                );
            }
        }
    }
    CheckReport::pass(NAME, instance, format!("{} x {} products vanish", rows.len(), dual_rows.len()))
}

/// `rank(G) = |A|`, and both equal the family's closed form when it has one.
pub fn check_dimension(code: &MccCode) -> CheckReport {
    let expected = code.family().closed_form_dimension(&code.sizes()).unwrap_or(code.dimension());
    check_dimension_against(code, expected)
}

pub fn check_dimension_against(code: &MccCode, expected: usize) -> CheckReport {
    const NAME: &str = "dimension";
    let instance = describe(code);
    let count = code.dimension();
    if count != expected {
        return CheckReport::fail(NAME, instance, format!("|A| = {count}, expected {expected}"));
    }
    if code.len() > MAX_CHECK_LENGTH {
        return CheckReport::pass(NAME, instance, format!("|A| = {count}; rank skipped for n > {MAX_CHECK_LENGTH}"));
    }
    let rank = code.generator_rank();
    if rank != count {
        return CheckReport::fail(NAME, instance, format!("rank {rank} != |A| = {count}"));
    }
    CheckReport::pass(NAME, instance, format!("rank = |A| = {count}"))
}

/// All erasure patterns a scheme can attempt on this code.
pub fn erasure_patterns(code: &MccCode, scheme: Scheme) -> Vec<Vec<usize>> {
    let n = code.len();
    if scheme == Scheme::Single {
        (0..n).map(|p| vec![p]).collect()
    } else {
        (0..n).flat_map(|a| (a + 1..n).map(move |b| vec![a, b])).collect()
    }
}

/// Codewords for exhaustive checks: every codeword when few, otherwise a
/// seeded sample that always includes the zero word.
pub fn test_codewords(code: &MccCode, samples: usize, seed: u64) -> (Vec<Vec<Element>>, bool) {
    let tower = code.tower();
    let order = tower.order(Level::Top);
    let dim = code.dimension() as u32;
    let total = order.checked_pow(dim).filter(|&c| c <= ENUMERATION_LIMIT);
    if let Some(total) = total {
        let words = (0..total)
            .map(|mut idx| {
                let msg: Vec<Element> = (0..dim)
                    .map(|_| {
                        let e = tower.element(Level::Top, idx % order).expect("in range");
                        idx /= order;
                        e
                    })
                    .collect();
                code.encode(&msg).expect("length matches")
            })
            .collect();
        return (words, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words = vec![vec![tower.zero(Level::Top); code.len()]];
    words.extend((1..samples).map(|_| code.random_codeword(&mut rng)));
    (words, false)
}

/// Run one plan against one codeword; fails on any mismatch or miscount.
pub fn check_plan(code: &MccCode, plan: &RepairPlan, word: &[Element]) -> CheckReport {
    const NAME: &str = "repair";
    let instance = format!("{} erased={:?} axis={}", describe(code), plan.erased, plan.axis);
    let mut oracle = CodewordOracle::new(code.tower(), word.to_vec(), &plan.erased);
    let result = match repair::execute(code.tower(), plan, &mut oracle) {
        Ok(r) => r,
        Err(e) => return CheckReport::fail(NAME, instance, e.to_string()),
    };
    for &(pos, value) in &result.recovered {
        if value != word[pos] {
            return CheckReport::fail(
                NAME,
                instance,
                format!("position {pos}: recovered {} but stored {}", value.index(), word[pos].index()),
            );
        }
    }
    if oracle.calls() != plan.bandwidth() || result.bandwidth != plan.bandwidth() {
        return CheckReport::fail(
            NAME,
            instance,
            format!("{} oracle calls for a plan of bandwidth {}", oracle.calls(), plan.bandwidth()),
        );
    }
    CheckReport::pass(NAME, instance, format!("bandwidth {}", result.bandwidth))
}

/// Options for [`check_repair_exhaustive`].
#[derive(Debug, Clone)]
pub struct RepairCheck {
    pub scheme: Scheme,
    pub samples: usize,
    pub seed: u64,
    /// Cap on erasure patterns; a seeded subset is used above it.
    pub max_patterns: Option<usize>,
}

impl RepairCheck {
    pub fn new(scheme: Scheme) -> Self {
        Self { scheme, samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED, max_patterns: None }
    }
}

/// Every (codeword, erasure pattern) pair recovers exactly, and the
/// bandwidth of a pattern does not depend on the codeword.
pub fn check_repair_exhaustive(code: &MccCode, check: &RepairCheck) -> CheckReport {
    const NAME: &str = "repair-exactness";
    let instance = format!("{} scheme={}", describe(code), check.scheme);
    let mut patterns = erasure_patterns(code, check.scheme);
    if let Some(cap) = check.max_patterns.filter(|&c| c < patterns.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
        patterns.shuffle(&mut rng);
        patterns.truncate(cap);
        patterns.sort();
    }
    let (words, exhaustive) = test_codewords(code, check.samples, check.seed);
    let mut planned = 0;
    let mut unplannable = 0;
    for erased in &patterns {
        let plan = match repair::plan(code, check.scheme, erased) {
            Ok(p) => p,
            Err(repair::RepairError::NoSeparatingAxis(..)) => {
                unplannable += 1;
                continue;
            }
            Err(e) => return CheckReport::fail(NAME, instance, format!("erased {erased:?}: {e}")),
        };
        planned += 1;
        for word in &words {
            let report = check_plan(code, &plan, word);
            if !report.passed() {
                return CheckReport::fail(NAME, instance, report.witness.unwrap_or_default());
            }
        }
    }
    if planned == 0 {
        return CheckReport::fail(NAME, instance, "no erasure pattern admits a plan".into());
    }
    CheckReport::pass(
        NAME,
        instance,
        format!(
            "{planned} patterns x {} {} codewords exact; {unplannable} patterns without a separating axis",
            words.len(),
            if exhaustive { "(all)" } else { "sampled" }
        ),
    )
}

/// Measured bandwidth never exceeds the closed-form bound on `axis`;
/// single-erasure equality is required when every subset is all of `K`.
pub fn check_bound_consistency(code: &MccCode, scheme: Scheme, axis: usize, max_patterns: usize) -> CheckReport {
    const NAME: &str = "bound-consistency";
    let instance = format!("{} scheme={scheme} axis={axis}", describe(code));
    let bound = match repair::bandwidth_bound(scheme, code, axis) {
        Ok(b) => b,
        Err(e) => return CheckReport::fail(NAME, instance, e.to_string()),
    };
    let full_grid = (0..code.arity()).all(|i| code.set().subset(i).len() as u64 == code.tower().order(Level::Top));
    let set = code.set();
    let mut patterns: Vec<Vec<usize>> = erasure_patterns(code, scheme)
        .into_iter()
        .filter(|p| p.len() == 1 || set.coordinate(p[0], axis) != set.coordinate(p[1], axis))
        .collect();
    if patterns.len() > max_patterns {
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
        patterns.shuffle(&mut rng);
        patterns.truncate(max_patterns);
    }
    let mut worst = 0;
    for erased in &patterns {
        let plan = match scheme {
            Scheme::Single => repair::plan_single(code, erased[0], axis),
            Scheme::TwoDmcc => repair::plan_two_dmcc(code, erased[0], erased[1], axis),
            Scheme::TwoAcar2 => repair::plan_two_acar2_with(code, erased[0], erased[1], axis, &Default::default()),
        };
        let plan = match plan {
            Ok(p) => p,
            Err(e) => return CheckReport::fail(NAME, instance, format!("erased {erased:?}: {e}")),
        };
        let b = plan.bandwidth() as u64;
        worst = worst.max(b);
        if b > bound {
            return CheckReport::fail(NAME, instance, format!("erased {erased:?}: bandwidth {b} > bound {bound}"));
        }
        if scheme == Scheme::Single && full_grid && b != bound {
            return CheckReport::fail(
                NAME,
                instance,
                format!("erased {erased:?}: bandwidth {b} != bound {bound} on a full grid"),
            );
        }
    }
    CheckReport::pass(NAME, instance, format!("{} patterns, max bandwidth {worst} <= {bound}", patterns.len()))
}

/// The standard suite run by `verify`.
pub fn full_suite(code: &MccCode, max_patterns: usize) -> Vec<CheckReport> {
    let mut reports = vec![check_dimension(code), check_dual_orthogonality(code)];
    let axis = repair::choose_axis(code);
    let t = code.tower().t();
    let mut schemes = vec![Scheme::Single];
    if t >= 2 {
        schemes.push(Scheme::TwoDmcc);
        if code.family().is_acar2() {
            schemes.push(Scheme::TwoAcar2);
        }
    }
    match axis {
        Ok(axis) => {
            for &scheme in &schemes {
                let check = RepairCheck { max_patterns: Some(max_patterns), samples: 10, ..RepairCheck::new(scheme) };
                reports.push(check_repair_exhaustive(code, &check));
                reports.push(check_bound_consistency(code, scheme, axis, max_patterns));
            }
        }
        Err(e) => reports.push(CheckReport::skipped("repair-exactness", describe(code), e.to_string())),
    }
    reports
}
