//! Rate/bandwidth tables: parameter sweeps, asymptotics and dimension-matched
//! comparisons, all in one CSV schema.
//!
//! Bandwidths are labelled by provenance: `measured` values come from
//! executing a plan against an oracle, `formula` values from the closed
//! forms, and `external-reference` values from schemes that are not
//! simulated here.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codes::{CartesianSet, CodeError, MccCode};
use crate::field::{FieldError, FieldTower, Level};
use crate::repair::{self, CodewordOracle, RepairError};

pub const CSV_HEADER: [&str; 12] = [
    "family",
    "q",
    "t",
    "sizes",
    "k",
    "length",
    "dimension",
    "rate",
    "bandwidth",
    "source",
    "bandwidth_rate",
    "bitwidth",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Measured,
    Formula,
    ExternalReference,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Measured => "measured",
            Source::Formula => "formula",
            Source::ExternalReference => "external-reference",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub q: u64,
    pub t: u32,
    pub sizes: Vec<u64>,
    pub k: Vec<u64>,
    pub length: u64,
    pub dimension: u64,
    pub bandwidth: Option<u64>,
    pub source: Source,
    /// Set only when no bandwidth is known but a bitwidth is.
    pub bitwidth_override: Option<f64>,
}

impl SweepRow {
    pub fn rate(&self) -> f64 {
        self.dimension as f64 / self.length as f64
    }

    /// `b / (n t)`.
    pub fn bandwidth_rate(&self) -> Option<f64> {
        self.bandwidth.map(|b| b as f64 / (self.length as f64 * self.t as f64))
    }

    /// `b · log2(q)`.
    pub fn bitwidth(&self) -> Option<f64> {
        self.bandwidth.map(|b| repair::bitwidth(b, self.q)).or(self.bitwidth_override)
    }

    fn record(&self) -> [String; 12] {
        let join = |v: &[u64], sep: &str| v.iter().map(u64::to_string).collect::<Vec<_>>().join(sep);
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.family.clone(),
            self.q.to_string(),
            self.t.to_string(),
            join(&self.sizes, "x"),
            join(&self.k, ";"),
            self.length.to_string(),
            self.dimension.to_string(),
            self.rate().to_string(),
            self.bandwidth.map(|b| b.to_string()).unwrap_or_default(),
            self.source.as_str().to_string(),
            opt(self.bandwidth_rate()),
            opt(self.bitwidth()),
        ]
    }
}

/// Rows plus free-text notes, emitted as trailing `#` lines.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub rows: Vec<SweepRow>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row.record()).expect("in-memory write");
        }
        let mut out = String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8");
        for note in &self.notes {
            out.push_str("# ");
            out.push_str(note);
            out.push('\n');
        }
        out
    }

    pub fn find(&self, family: &str) -> impl Iterator<Item = &SweepRow> {
        let family = family.to_string();
        self.rows.iter().filter(move |r| r.family == family)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Repair(#[from] RepairError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("parameters overflow 64-bit lengths")]
    Overflow,
    #[error("no family reaches dimension {0}")]
    NoMatch(u64),
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// `|{a in the box : Σ a_i ≤ k}|` by inclusion-exclusion over the box walls.
pub fn car_dimension(sizes: &[u64], k: u64) -> u64 {
    let m = sizes.len();
    let mut total: i128 = 0;
    for mask in 0u32..(1 << m) {
        let shift: u64 = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| sizes[i]).sum();
        if shift > k {
            continue;
        }
        let term = binomial((k - shift) as u128 + m as u128, m as u128) as i128;
        total += if mask.count_ones() % 2 == 0 { term } else { -term };
    }
    total as u64
}

/// `Πn - Π(n - k)`.
pub fn acar1_dimension(sizes: &[u64], k: &[u64]) -> u64 {
    sizes.iter().product::<u64>() - sizes.iter().zip(k).map(|(n, k)| n - k).product::<u64>()
}

/// `Πn - Σ(n_i - k_i - 1) - 1`.
pub fn acar2_dimension(sizes: &[u64], k: &[u64]) -> u64 {
    sizes.iter().product::<u64>() - sizes.iter().zip(k).map(|(n, k)| n - k - 1).sum::<u64>() - 1
}

/// Single-erasure bandwidth on the largest axis.
pub fn augmented_bandwidth(sizes: &[u64], t: u32) -> u64 {
    let n: u64 = sizes.iter().product();
    let n_j = *sizes.iter().max().expect("at least one axis");
    repair::single_bound(n, n_j, t as u64)
}

fn checked_pow(q: u64, e: u32) -> Result<u64, ReportError> {
    q.checked_pow(e).ok_or(ReportError::Overflow)
}

/// Rate against bandwidth over every valid `k` for RM, ARM1 and ARM2 over `K^m`.
///
/// RM rows use the external Reed-Muller repair formula (`k ≤ q^t - 2`);
/// augmented rows use the single-erasure formula (`k ≤ q^t - q^{t-1}`).
pub fn figure_sweep(q: u64, t: u32, m: u32) -> Result<Table, ReportError> {
    let qt = checked_pow(q, t)?;
    let n = checked_pow(qt, m)?;
    let edge = checked_pow(q, t - 1)?;
    let sizes = vec![qt; m as usize];
    let mut table = Table::default();
    let rm_b = repair::rm_baseline(q, t, 0).ok_or(ReportError::Overflow)?;
    for k in 0..=qt - 2 {
        table.rows.push(SweepRow {
            family: "rm".into(),
            q,
            t,
            sizes: sizes.clone(),
            k: vec![k],
            length: n,
            dimension: car_dimension(&sizes, k),
            bandwidth: Some(rm_b),
            source: Source::ExternalReference,
            bitwidth_override: None,
        });
    }
    let arm_b = augmented_bandwidth(&sizes, t);
    for (family, first) in [("arm1", 1), ("arm2", 0)] {
        for k in first..=qt - edge {
            let kv = vec![k; m as usize];
            let dimension = if family == "arm1" { acar1_dimension(&sizes, &kv) } else { acar2_dimension(&sizes, &kv) };
            table.rows.push(SweepRow {
                family: family.into(),
                q,
                t,
                sizes: sizes.clone(),
                k: vec![k],
                length: n,
                dimension,
                bandwidth: Some(arm_b),
                source: Source::Formula,
                bitwidth_override: None,
            });
        }
    }
    table.notes.push(format!("rm rows: k <= q^t - 2 = {}; bandwidth (q^t - 1) t", qt - 2));
    table.notes.push(format!(
        "augmented rows: k <= q^t - q^(t-1) = {}; arm1 starts at k = 1 (k = 0 is the zero code)",
        qt - edge
    ));
    Ok(table)
}

fn asymptotic_row(
    family: &str,
    q: u64,
    t: u32,
    sizes: Vec<u64>,
    k: Vec<u64>,
    dimension: u64,
    bandwidth: u64,
) -> SweepRow {
    SweepRow {
        family: family.into(),
        q,
        t,
        length: sizes.iter().product(),
        sizes,
        k,
        dimension,
        bandwidth: Some(bandwidth),
        source: Source::Formula,
        bitwidth_override: None,
    }
}

/// Maximum-`k` rows for every `t` in `ts`, for RS, RM, ARM1, ARM2 and two
/// ACar1 families: `n_j = q^{t-1} + 1` with `k = 1`, and
/// `n = (q^{t-1}, ..., q^{t-1}, 2q^{t-1})` with `k = (0, ..., 0, q^{t-1})`.
pub fn asymptotics(q: u64, m: u32, ts: std::ops::RangeInclusive<u32>) -> Result<Table, ReportError> {
    if q < 2 || m < 1 || *ts.start() < 1 {
        return Err(ReportError::Invalid("need q >= 2, m >= 1, t >= 1".into()));
    }
    let mu = m as usize;
    let mut table = Table::default();
    let last = *ts.end();
    for t in ts {
        let qt = checked_pow(q, t)?;
        let edge = checked_pow(q, t - 1)?;
        checked_pow(qt, m)?;
        checked_pow(2 * edge + 1, m)?;
        let k_star = qt - edge;
        table.rows.push(asymptotic_row("rs", q, t, vec![qt], vec![k_star], k_star, qt - 1));
        let full = vec![qt; mu];
        let rm_k = qt - 2;
        let rm_b = repair::rm_baseline(q, t, rm_k).ok_or(ReportError::Overflow)?;
        let mut row = asymptotic_row("rm", q, t, full.clone(), vec![rm_k], car_dimension(&full, rm_k), rm_b);
        row.source = Source::ExternalReference;
        table.rows.push(row);
        let kv = vec![k_star; mu];
        let b = augmented_bandwidth(&full, t);
        table.rows.push(asymptotic_row("arm1", q, t, full.clone(), vec![k_star], acar1_dimension(&full, &kv), b));
        table.rows.push(asymptotic_row("arm2", q, t, full.clone(), vec![k_star], acar2_dimension(&full, &kv), b));
        let thin = vec![edge + 1; mu];
        let ones = vec![1; mu];
        table.rows.push(asymptotic_row(
            "acar1-min",
            q,
            t,
            thin.clone(),
            ones.clone(),
            acar1_dimension(&thin, &ones),
            augmented_bandwidth(&thin, t),
        ));
        let mut half = vec![edge; mu];
        half[mu - 1] = 2 * edge;
        let mut kh = vec![0; mu];
        kh[mu - 1] = edge;
        if 2 * edge <= qt {
            table.rows.push(asymptotic_row(
                "acar1-half",
                q,
                t,
                half.clone(),
                kh.clone(),
                acar1_dimension(&half, &kh),
                augmented_bandwidth(&half, t),
            ));
        }
    }
    let factorial: f64 = (1..=m).map(f64::from).product();
    let limits = [
        ("rs", 1.0 - 1.0 / q as f64),
        ("rm", 1.0 / factorial),
        ("arm1", 1.0 - 1.0 / (q as f64).powi(m as i32)),
        ("arm2", 1.0),
        ("acar1-min", 0.0),
        ("acar1-half", 0.5),
    ];
    for (family, limit) in limits {
        let row = table.find(family).find(|r| r.t == last).cloned();
        if let Some(row) = row {
            table.notes.push(format!(
                "{family}: rate limit {limit}, rate at t={last} is {}, deviation {:e}; bandwidth rate {} (limit 0)",
                row.rate(),
                (row.rate() - limit).abs(),
                row.bandwidth_rate().unwrap_or(f64::NAN)
            ));
        }
    }
    Ok(table)
}

/// Execute a single-erasure plan on a seeded random codeword and return the
/// oracle's call count.
pub fn measure_single(code: &MccCode, position: usize, seed: u64) -> Result<u64, ReportError> {
    let axis = repair::choose_axis(code)?;
    let plan = repair::plan_single(code, position, axis)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let word = code.random_codeword(&mut rng);
    let mut oracle = CodewordOracle::new(code.tower(), word, &[position]);
    repair::execute(code.tower(), &plan, &mut oracle)?;
    Ok(oracle.calls() as u64)
}

/// Largest length for which compare builds the code and measures.
pub const MEASURE_LIMIT: u64 = 4096;

fn maybe_measure(
    row: &mut SweepRow,
    build: impl FnOnce() -> Result<MccCode, CodeError>,
    seed: u64,
) -> Result<(), ReportError> {
    if row.length > MEASURE_LIMIT {
        return Ok(());
    }
    let code = build()?;
    let measured = measure_single(&code, 0, seed)?;
    if Some(measured) != row.bandwidth {
        return Err(ReportError::Invalid(format!(
            "measured bandwidth {measured} differs from formula {:?} for {}",
            row.bandwidth, row.family
        )));
    }
    row.source = Source::Measured;
    Ok(())
}

/// Best ACar1 over `F_{q^t}` with `m` axes and dimension exactly `target`:
/// minimal single-erasure bandwidth, ties broken by lexicographically
/// smallest sizes then k.
pub fn best_acar1(q: u64, t: u32, m: usize, target: u64) -> Option<(Vec<u64>, Vec<u64>, u64)> {
    let qt = q.checked_pow(t)?;
    let edge = q.pow(t - 1);
    let mut best: Option<(u64, Vec<u64>, Vec<u64>)> = None;
    let mut sizes = vec![edge; m];
    loop {
        let n: u64 = sizes.iter().product();
        if n > target {
            if let Some(k) = acar1_k_for(&sizes, n - target, edge) {
                let b = augmented_bandwidth(&sizes, t);
                let better = match &best {
                    None => true,
                    Some((bb, bs, bk)) => (b, &sizes, &k) < (*bb, bs, bk),
                };
                if better {
                    best = Some((b, sizes.clone(), k));
                }
            }
        }
        // Next nondecreasing size vector in [edge, q^t]^m.
        let mut i = m;
        loop {
            if i == 0 {
                return best.map(|(b, s, k)| (s, k, b));
            }
            i -= 1;
            if sizes[i] < qt {
                sizes[i] += 1;
                let v = sizes[i];
                for s in sizes.iter_mut().skip(i + 1) {
                    *s = v;
                }
                break;
            }
        }
    }
}

/// Some `k` with `Π(n_i - k_i) = rest` and `edge ≤ n_i - k_i ≤ n_i`;
/// lexicographically smallest `k`.
fn acar1_k_for(sizes: &[u64], rest: u64, edge: u64) -> Option<Vec<u64>> {
    fn go(sizes: &[u64], rest: u64, edge: u64, out: &mut Vec<u64>) -> bool {
        let Some((&n, tail)) = sizes.split_first() else {
            return rest == 1;
        };
        // Largest factor first gives the smallest k_i.
        for d in (edge..=n).rev() {
            if rest.is_multiple_of(d) {
                out.push(n - d);
                if go(tail, rest / d, edge, out) {
                    return true;
                }
                out.pop();
            }
        }
        false
    }
    let mut out = Vec::new();
    (go(sizes, rest, edge, &mut out) && out.iter().any(|&k| k > 0)).then_some(out)
}

/// Codes of dimension `target` over characteristic `p` with `q = p^e`:
/// RS with trace repair on the smallest admissible field, ARM1 at maximal
/// `k`, the best exact-dimension ACar1 per `(t, m)`, and quoted references.
pub fn compare(target: u64, p: u64, e: u32, seed: u64) -> Result<Table, ReportError> {
    let q = checked_pow(p, e)?;
    let mut table = Table::default();
    let (t_rs, gw) = repair::gw_baseline(q, target).ok_or(ReportError::NoMatch(target))?;
    table.rows.push(SweepRow {
        family: "rs".into(),
        q,
        t: t_rs,
        sizes: vec![gw.length],
        k: vec![target],
        length: gw.length,
        dimension: target,
        bandwidth: Some(gw.bandwidth),
        source: Source::Formula,
        bitwidth_override: None,
    });
    for t in 2..t_rs {
        let qt = q.pow(t);
        if target <= qt && !repair::gw_applicable(q, t, target) {
            table.notes.push(format!(
                "rs over GF({q}^{t}) reaches dimension {target} but trace repair needs k <= {}",
                qt - q.pow(t - 1)
            ));
        }
    }
    for t in 2..=t_rs {
        for m in 2..=4u32 {
            if t * m > t_rs {
                continue;
            }
            let qt = q.pow(t);
            let k = qt - q.pow(t - 1);
            let sizes = vec![qt; m as usize];
            let dimension = acar1_dimension(&sizes, &vec![k; m as usize]);
            if dimension < target {
                continue;
            }
            let mut row = SweepRow {
                family: "arm1".into(),
                q,
                t,
                sizes,
                k: vec![k],
                length: qt.pow(m),
                dimension,
                bandwidth: Some(augmented_bandwidth(&vec![qt; m as usize], t)),
                source: Source::Formula,
                bitwidth_override: None,
            };
            if p.pow(e) == q && row.length <= MEASURE_LIMIT {
                let tower = Arc::new(FieldTower::new(p, e as usize, t as usize)?);
                maybe_measure(&mut row, || MccCode::arm1(tower, m as usize, k as usize), seed)?;
            }
            table.rows.push(row);
        }
        for m in 2..=3usize {
            if t as usize * m > t_rs as usize {
                continue;
            }
            if let Some((sizes, k, b)) = best_acar1(q, t, m, target) {
                let mut row = SweepRow {
                    family: "acar1".into(),
                    q,
                    t,
                    length: sizes.iter().product(),
                    sizes: sizes.clone(),
                    k: k.clone(),
                    dimension: target,
                    bandwidth: Some(b),
                    source: Source::Formula,
                    bitwidth_override: None,
                };
                if row.length <= MEASURE_LIMIT {
                    let tower = Arc::new(FieldTower::new(p, e as usize, t as usize)?);
                    let build = || {
                        let top: Vec<_> = tower.elements(Level::Top).collect();
                        let subsets = sizes.iter().map(|&n| top[top.len() - n as usize..].to_vec()).collect();
                        let set = CartesianSet::new(subsets)?;
                        MccCode::acar1(Arc::clone(&tower), set, k.iter().map(|&x| x as usize).collect())
                    };
                    maybe_measure(&mut row, build, seed)?;
                }
                table.rows.push(row);
            }
        }
    }
    push_references(&mut table, target, q);
    if table.rows.len() == 1 && table.rows[0].family == "rs" && table.notes.is_empty() {
        table.notes.push("only the RS baseline reaches this dimension".into());
    }
    Ok(table)
}

fn push_references(table: &mut Table, target: u64, q: u64) {
    let reference =
        |family: &str, t: u32, side: u64, m: u32, k: Vec<u64>, bandwidth: Option<u64>, bits: Option<f64>| SweepRow {
            family: family.into(),
            q,
            t,
            sizes: vec![side; m as usize],
            k,
            length: side.pow(m),
            dimension: target,
            bandwidth,
            source: Source::ExternalReference,
            bitwidth_override: bits,
        };
    match (target, q) {
        (648, 3) => {
            table.rows.push(reference("arm1-prior", 3, 27, 2, vec![18], Some(repair::PRIOR_ARM1_F27_SQUARED), None));
        }
        (621, 3) => {
            table.notes.push(
                "arm1 GF(3^2)^3 k=6: dimension 729 - 3^3 = 702; a quoted value of 721 does not match the dimension formula"
                    .into(),
            );
            table.notes.push(
                "acar1 26x27 k=(17;18): bandwidth 702 - 1 + 2(26 - 1) = 751 is authoritative; a quoted 670 uses the dimension 621 in place of the length 702"
                    .into(),
            );
        }
        (448, 2) => {
            table.rows.push(reference("arm1-prior", 3, 8, 3, vec![4], None, Some(repair::PRIOR_ARM1_F8_CUBED as f64)));
            table.rows.push(reference(
                "hermitian",
                6,
                512,
                1,
                Vec::new(),
                None,
                Some(repair::HERMITIAN_BITWIDTH as f64),
            ));
            table.notes.push("arm1 GF(2^3)^3: dimension 448 = 512 - 4^3 needs k = 4 (k = 3 gives 387); with q = 2 the bitwidth 637 equals the bandwidth".into());
            table.notes.push("hermitian: length 512 over GF(2^6); only its bitwidth is quoted".into());
        }
        _ => {}
    }
}
