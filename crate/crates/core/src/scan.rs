//! Monte Carlo survey of the measures, bound envelopes, and the search for
//! state pairs that two measures rank in opposite order.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::measures::{
    concurrence_from_formation, formation_from_concurrence, nonlocality, MeasureError,
    MeasureRecord, ReeMethod, PURE_THRESHOLD,
};
use crate::ree::{
    ree_bell_diagonal, ree_horodecki, ree_hprime, ree_numeric, ree_pure, ree_pure_css,
    ReeError, ReeSolverConfig,
};
use crate::states::{
    bell_diagonal, generalized_horodecki, horodecki, horodecki_p_for_negativity, hprime,
    pure_css_mixture, sample_at, schmidt_singlet, BellDiagonalSpectrum, DensityMatrix, Origin,
    Sample, SamplerConfig, StateError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("no records to work on")]
    EmptyInput,
    #[error("pair falls between the equality and strict tolerances on {measure} (Δ = {delta:.3e})")]
    DeadZone { measure: &'static str, delta: f64 },
    #[error("record lacks an REE value")]
    MissingRee,
    #[error("no separable pair found (largest B gap {margin:.3e})")]
    NotFound { margin: f64 },
    #[error("invalid worker count {0}")]
    BadWorkers(usize),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Ree(#[from] ReeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub state_id: u64,
    pub family_tag: &'static str,
    pub purity: f64,
    pub measures: MeasureRecord,
}

/// How REE values are filled during a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    /// Run the numerical solver on states without a closed form.
    pub with_ree: bool,
    pub solver: ReeSolverConfig,
    /// Most numerical solves per scan, spent on the lowest state ids first.
    pub numeric_budget: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            with_ree: false,
            solver: ReeSolverConfig::default(),
            numeric_budget: 200,
        }
    }
}

/// Result of [`run_scan`]: one record per sample in id order, plus ids whose
/// closed-form measures failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub records: Vec<ScanRecord>,
    pub failures: Vec<(u64, String)>,
}

/// Closed-form REE for origins that have one.
pub fn analytic_ree(origin: &Origin) -> Option<f64> {
    match origin {
        Origin::HaarPure(psi) => Some(ree_pure(psi)),
        Origin::Horodecki { p } => ree_horodecki(*p).ok(),
        Origin::Hprime { p, n } => ree_hprime(*p, *n).ok(),
        Origin::BellDiagonal(spec) => Some(ree_bell_diagonal(spec)),
        Origin::Werner { p, .. } => {
            let top = p + (1.0 - p) / 4.0;
            let spec = BellDiagonalSpectrum::new([top, (1.0 - p) / 4.0, (1.0 - p) / 4.0, (1.0 - p) / 4.0]).ok()?;
            Some(ree_bell_diagonal(&spec))
        }
        Origin::PureCss { a, x } => ree_pure_css(*a, *x).ok(),
        Origin::Ginibre | Origin::Induced { .. } | Origin::GeneralizedHorodecki { .. } => None,
    }
}

fn closed_record(sample: &Sample) -> Result<ScanRecord, MeasureError> {
    let rho = &sample.state;
    let mut m = MeasureRecord::closed_form(rho)?;
    let purity = rho.purity();
    if let Some(e) = analytic_ree(&sample.origin) {
        m = m.with_ree(e, ReeMethod::Analytic, None);
    } else if purity > PURE_THRESHOLD {
        m = m.with_ree(m.formation, ReeMethod::Analytic, None);
    }
    Ok(ScanRecord {
        state_id: sample.index,
        family_tag: sample.origin.tag(),
        purity,
        measures: m,
    })
}

/// Runs `f` on a pool with `workers` threads; `0` uses rayon's default.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, ScanError> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|_| ScanError::BadWorkers(workers))?;
    Ok(pool.install(f))
}

/// Samples and measures `cfg.count` states. Output order and content depend
/// only on `cfg` and `opts`, never on thread count.
pub fn run_scan(cfg: &SamplerConfig, opts: &ScanOptions) -> Result<ScanOutput, ScanError> {
    cfg.validate()?;
    let results: Vec<(Sample, Result<ScanRecord, MeasureError>)> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let s = sample_at(cfg, i);
            let r = closed_record(&s);
            (s, r)
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    let mut states = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (s, r) in results {
        match r {
            Ok(rec) => {
                records.push(rec);
                states.push(s.state);
            }
            Err(e) => failures.push((s.index, e.to_string())),
        }
    }
    if opts.with_ree {
        let todo: Vec<usize> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.measures.ree.is_none())
            .map(|(k, _)| k)
            .take(opts.numeric_budget)
            .collect();
        let solved: Vec<(usize, Result<(f64, bool), ReeError>)> = todo
            .par_iter()
            .map(|&k| {
                let out = ree_numeric(&states[k], &opts.solver).map(|c| (c.value, c.converged));
                (k, out)
            })
            .collect();
        for (k, out) in solved {
            match out {
                Ok((v, conv)) => {
                    let m = records[k].measures;
                    records[k].measures = m.with_ree(v.clamp(0.0, 1.0), ReeMethod::Numeric, Some(conv));
                }
                Err(e) => failures.push((records[k].state_id, e.to_string())),
            }
        }
    }
    failures.sort_by_key(|f| f.0);
    Ok(ScanOutput { records, failures })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12}")).unwrap_or_default()
}

pub fn write_scan_csv<W: Write>(out: &mut W, records: &[ScanRecord]) -> std::io::Result<()> {
    writeln!(out, "state_id,family_tag,purity,C,E_F,N,E_PPT,B,E_R,ree_method,ree_converged")?;
    for r in records {
        let m = &r.measures;
        writeln!(
            out,
            "{},{},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{},{},{}",
            r.state_id,
            r.family_tag,
            r.purity,
            m.concurrence,
            m.formation,
            m.negativity,
            m.ppt_cost,
            m.nonlocality,
            opt(m.ree),
            m.ree_method.name(),
            m.ree_converged.map(|b| b.to_string()).unwrap_or_default()
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Dominance
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DominanceReport {
    pub checked: usize,
    pub n_above_c: usize,
    pub b_above_n: usize,
    pub b_above_c: usize,
    /// Largest excess over any of the three bounds.
    pub max_excess: f64,
}

impl DominanceReport {
    pub fn violations(&self) -> usize {
        self.n_above_c + self.b_above_n + self.b_above_c
    }
}

/// Counts breaches of `N ≤ C`, `B ≤ N` and `B ≤ C` beyond `tol`.
pub fn dominance_report(records: &[ScanRecord], tol: f64) -> DominanceReport {
    let mut rep = DominanceReport {
        checked: records.len(),
        ..Default::default()
    };
    for r in records {
        let m = &r.measures;
        let gaps = [
            m.negativity - m.concurrence,
            m.nonlocality - m.negativity,
            m.nonlocality - m.concurrence,
        ];
        rep.max_excess = gaps.iter().copied().fold(rep.max_excess, f64::max);
        rep.n_above_c += (gaps[0] > tol) as usize;
        rep.b_above_n += (gaps[1] > tol) as usize;
        rep.b_above_c += (gaps[2] > tol) as usize;
    }
    rep
}

// ---------------------------------------------------------------------------
// Envelopes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    C,
    EF,
    N,
    EPpt,
    B,
    ER,
}

impl Measure {
    pub const ALL: [Measure; 6] = [Measure::C, Measure::EF, Measure::N, Measure::EPpt, Measure::B, Measure::ER];

    pub fn name(self) -> &'static str {
        match self {
            Measure::C => "C",
            Measure::EF => "E_F",
            Measure::N => "N",
            Measure::EPpt => "E_PPT",
            Measure::B => "B",
            Measure::ER => "E_R",
        }
    }

    pub fn parse(s: &str) -> Option<Measure> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
    }

    pub fn get(self, m: &MeasureRecord) -> Option<f64> {
        match self {
            Measure::C => Some(m.concurrence),
            Measure::EF => Some(m.formation),
            Measure::N => Some(m.negativity),
            Measure::EPpt => Some(m.ppt_cost),
            Measure::B => Some(m.nonlocality),
            Measure::ER => m.ree,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Extreme value in a bin with the id of the state attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub state_id: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub lower: Option<Extremum>,
    pub upper: Option<Extremum>,
}

impl EnvelopeBin {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub x: Measure,
    pub y: Measure,
    pub bins: Vec<EnvelopeBin>,
}

/// Per-bin extrema of `y` over records binned by `x` on `[0, 1]`. Records
/// lacking either value are skipped; empty bins stay empty.
pub fn extract_envelope(records: &[ScanRecord], x: Measure, y: Measure, bins: usize) -> Result<Envelope, ScanError> {
    let usable: Vec<(f64, f64, u64)> = records
        .iter()
        .filter_map(|r| Some((x.get(&r.measures)?, y.get(&r.measures)?, r.state_id)))
        .collect();
    if usable.is_empty() || bins == 0 {
        return Err(ScanError::EmptyInput);
    }
    let width = 1.0 / bins as f64;
    let mut out: Vec<EnvelopeBin> = (0..bins)
        .map(|k| EnvelopeBin {
            lo: k as f64 * width,
            hi: (k + 1) as f64 * width,
            count: 0,
            lower: None,
            upper: None,
        })
        .collect();
    for (xv, yv, id) in usable {
        let k = ((xv / width) as usize).min(bins - 1);
        let b = &mut out[k];
        b.count += 1;
        let e = Extremum { value: yv, state_id: id };
        if b.lower.is_none_or(|l| yv < l.value) {
            b.lower = Some(e);
        }
        if b.upper.is_none_or(|u| yv > u.value) {
            b.upper = Some(e);
        }
    }
    Ok(Envelope { x, y, bins: out })
}

/// `√((1-C)² + C²) - (1-C)`, the smallest negativity at given concurrence.
pub fn verstraete_lower_bound(c: f64) -> f64 {
    ((1.0 - c).powi(2) + c * c).sqrt() - (1.0 - c)
}

fn pure_concurrence_from(m: Measure, v: f64) -> Option<f64> {
    match m {
        Measure::C | Measure::N | Measure::B => Some(v),
        Measure::EF | Measure::ER => Some(concurrence_from_formation(v)),
        Measure::EPpt => Some(2f64.powf(v) - 1.0),
    }
}

fn pure_value(m: Measure, c: f64) -> f64 {
    match m {
        Measure::C | Measure::N | Measure::B => c,
        Measure::EF | Measure::ER => formation_from_concurrence(c),
        Measure::EPpt => (1.0 + c).log2(),
    }
}

/// Curve traced by pure states in the `(x, y)` plane.
pub fn pure_curve(x: Measure, y: Measure, xv: f64) -> Option<f64> {
    pure_concurrence_from(x, xv).map(|c| pure_value(y, c.clamp(0.0, 1.0)))
}

fn horodecki_value(m: Measure, p: f64) -> Option<f64> {
    let n = verstraete_lower_bound(p);
    match m {
        Measure::C => Some(p),
        Measure::EF => Some(formation_from_concurrence(p)),
        Measure::N => Some(n),
        Measure::EPpt => Some((1.0 + n).log2()),
        Measure::B => nonlocality(&horodecki(p).ok()?).ok(),
        Measure::ER => ree_horodecki(p).ok(),
    }
}

fn horodecki_p_from(m: Measure, v: f64) -> Option<f64> {
    let p = match m {
        Measure::C => v,
        Measure::EF => concurrence_from_formation(v),
        Measure::N => horodecki_p_for_negativity(v),
        Measure::EPpt => horodecki_p_for_negativity(2f64.powf(v) - 1.0),
        Measure::ER => {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if ree_horodecki(mid).ok()? < v {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
        Measure::B => return None,
    };
    Some(p.clamp(0.0, 1.0))
}

/// Curve traced by the Horodecki family in the `(x, y)` plane.
pub fn horodecki_curve(x: Measure, y: Measure, xv: f64) -> Option<f64> {
    horodecki_value(y, horodecki_p_from(x, xv)?)
}

/// Rows `bin_lo,bin_hi,count,lower,lower_id,upper,upper_id,pure,horodecki,verstraete`.
pub fn write_envelope_csv<W: Write>(out: &mut W, env: &Envelope) -> std::io::Result<()> {
    writeln!(out, "bin_lo,bin_hi,count,lower,lower_id,upper,upper_id,pure,horodecki,verstraete")?;
    for b in &env.bins {
        let ext = |e: Option<Extremum>| match e {
            Some(e) => (format!("{:.12}", e.value), e.state_id.to_string()),
            None => (String::new(), String::new()),
        };
        let (lo, lo_id) = ext(b.lower);
        let (hi, hi_id) = ext(b.upper);
        let mid = b.mid();
        let vers = if (env.x, env.y) == (Measure::C, Measure::N) {
            Some(verstraete_lower_bound(mid))
        } else {
            None
        };
        writeln!(
            out,
            "{:.6},{:.6},{},{},{},{},{},{},{},{}",
            b.lo,
            b.hi,
            b.count,
            lo,
            lo_id,
            hi,
            hi_id,
            opt(pure_curve(env.x, env.y, mid)),
            opt(horodecki_curve(env.x, env.y, mid)),
            opt(vers)
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Ordering classes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Lt,
    Eq,
    Gt,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Lt => "<",
            Sign::Eq => "=",
            Sign::Gt => ">",
        }
    }
}

/// Signs of `(ΔC, ΔN, ΔE_R)` for `ρ'` relative to `ρ''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderingClass {
    pub signs: [Sign; 3],
}

impl OrderingClass {
    pub const fn new(c: Sign, n: Sign, e: Sign) -> Self {
        OrderingClass { signs: [c, n, e] }
    }

    /// All three agree, or all three are equalities.
    pub fn is_consistent(&self) -> bool {
        self.signs[0] == self.signs[1] && self.signs[1] == self.signs[2]
    }

    pub fn reversed(&self) -> Self {
        let flip = |s: Sign| match s {
            Sign::Lt => Sign::Gt,
            Sign::Gt => Sign::Lt,
            Sign::Eq => Sign::Eq,
        };
        OrderingClass {
            signs: self.signs.map(flip),
        }
    }
}

impl fmt::Display for OrderingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "C{} N{} E_R{}",
            self.signs[0].symbol(),
            self.signs[1].symbol(),
            self.signs[2].symbol()
        )
    }
}

use Sign::{Eq as E, Gt as G, Lt as L};

/// The nine mixed relation patterns, in the order they are usually listed.
pub const PARADOX_PATTERNS: [OrderingClass; 9] = [
    OrderingClass::new(L, L, G),
    OrderingClass::new(L, G, L),
    OrderingClass::new(G, L, L),
    OrderingClass::new(E, L, G),
    OrderingClass::new(L, E, G),
    OrderingClass::new(L, G, E),
    OrderingClass::new(E, E, L),
    OrderingClass::new(E, L, E),
    OrderingClass::new(L, E, E),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `|Δ| ≤ eq` counts as equal.
    pub eq: f64,
    /// `|Δ| > strict` counts as ordered.
    pub strict: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eq: 1e-4, strict: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairClassification {
    pub class: OrderingClass,
    pub consistent: bool,
    /// `B(ρ') - B(ρ'')`.
    pub b_difference: f64,
    /// The pair differs in `B` by more than the strict tolerance.
    pub b_witness: bool,
}

fn sign_of(measure: &'static str, d: f64, tol: &Tolerances) -> Result<Sign, ScanError> {
    if d.abs() <= tol.eq {
        Ok(Sign::Eq)
    } else if d.abs() > tol.strict {
        Ok(if d < 0.0 { Sign::Lt } else { Sign::Gt })
    } else {
        Err(ScanError::DeadZone { measure, delta: d })
    }
}

pub fn classify_pair(a: &MeasureRecord, b: &MeasureRecord, tol: &Tolerances) -> Result<PairClassification, ScanError> {
    let (ea, eb) = match (a.ree, b.ree) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(ScanError::MissingRee),
    };
    let class = OrderingClass::new(
        sign_of("C", a.concurrence - b.concurrence, tol)?,
        sign_of("N", a.negativity - b.negativity, tol)?,
        sign_of("E_R", ea - eb, tol)?,
    );
    let db = a.nonlocality - b.nonlocality;
    Ok(PairClassification {
        class,
        consistent: class.is_consistent(),
        b_difference: db,
        b_witness: db.abs() > tol.strict,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessPair {
    pub first: ScanRecord,
    pub second: ScanRecord,
    pub classification: PairClassification,
}

/// Outcome of [`find_ordering_examples`]: witnesses per requested class plus
/// a tally of every paradoxical class met along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingSearch {
    pub witnesses: BTreeMap<OrderingClass, Vec<WitnessPair>>,
    pub paradoxical_counts: BTreeMap<OrderingClass, usize>,
    pub pairs_examined: usize,
}

impl OrderingSearch {
    pub fn found(&self, class: &OrderingClass) -> bool {
        self.witnesses.get(class).is_some_and(|w| !w.is_empty())
    }

    pub fn paradoxical_total(&self) -> usize {
        self.paradoxical_counts.values().sum()
    }
}

/// Neighbours compared after sorting by each measure, and far strides.
const WINDOW: usize = 24;
const STRIDES: [usize; 8] = [37, 101, 331, 1009, 3041, 9001, 27011, 81013];

/// Sort-and-bucket search: records are sorted by each of `C`, `N` and `E_R`,
/// every record is paired with its nearest neighbours and with a few distant
/// ones, and each pair is classified in both orders. Separable records are
/// skipped since they cannot take part in a paradox. Collected witnesses are
/// capped at `per_class`; the tally counts all hits.
pub fn find_ordering_examples(
    records: &[ScanRecord],
    targets: &[OrderingClass],
    tol: &Tolerances,
    per_class: usize,
) -> OrderingSearch {
    let pool: Vec<&ScanRecord> = records
        .iter()
        .filter(|r| r.measures.ree.is_some())
        .filter(|r| r.measures.concurrence > tol.eq || r.measures.negativity > tol.eq)
        .collect();
    let mut search = OrderingSearch {
        witnesses: targets.iter().map(|t| (*t, Vec::new())).collect(),
        paradoxical_counts: BTreeMap::new(),
        pairs_examined: 0,
    };
    let mut seen = std::collections::HashSet::new();
    for key in [Measure::C, Measure::N, Measure::ER] {
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by(|&i, &j| {
            let (a, b) = (key.get(&pool[i].measures), key.get(&pool[j].measures));
            a.partial_cmp(&b)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(pool[i].state_id.cmp(&pool[j].state_id))
        });
        for pos in 0..order.len() {
            let offsets = (1..=WINDOW).chain(STRIDES);
            for off in offsets {
                let Some(&other) = order.get(pos + off) else { continue };
                let i = order[pos];
                let pair = (i.min(other), i.max(other));
                if !seen.insert(pair) {
                    continue;
                }
                search.pairs_examined += 1;
                for (a, b) in [(pool[pair.0], pool[pair.1]), (pool[pair.1], pool[pair.0])] {
                    let Ok(cls) = classify_pair(&a.measures, &b.measures, tol) else { continue };
                    if cls.consistent {
                        continue;
                    }
                    // Count each unordered pair once, under the orientation
                    // that is listed first among the known patterns or
                    // otherwise the lexicographically smaller one.
                    let listed = PARADOX_PATTERNS.contains(&cls.class);
                    let reverse_listed = PARADOX_PATTERNS.contains(&cls.class.reversed());
                    if listed || (!reverse_listed && cls.class <= cls.class.reversed()) {
                        *search.paradoxical_counts.entry(cls.class).or_insert(0) += 1;
                    }
                    if let Some(list) = search.witnesses.get_mut(&cls.class) {
                        if list.len() < per_class {
                            list.push(WitnessPair {
                                first: a.clone(),
                                second: b.clone(),
                                classification: cls,
                            });
                        }
                    }
                }
            }
        }
    }
    search
}

// ---------------------------------------------------------------------------
// Constructed witnesses
// ---------------------------------------------------------------------------

/// Ids at or above this mark constructed (not sampled) states.
pub const CONSTRUCTED_ID_BASE: u64 = 1 << 62;

fn record_with(id: u64, tag: &'static str, rho: &DensityMatrix, ree: f64, method: ReeMethod, converged: Option<bool>) -> Result<ScanRecord, ScanError> {
    let m = MeasureRecord::closed_form(rho)?.with_ree(ree, method, converged);
    Ok(ScanRecord {
        state_id: id,
        family_tag: tag,
        purity: rho.purity(),
        measures: m,
    })
}

fn pure_record(id: u64, c: f64) -> Result<ScanRecord, ScanError> {
    // Schmidt weight a with 2√(a(1-a)) = c.
    let a = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    let psi = schmidt_singlet(a)?;
    record_with(id, "pure", &psi.density(), ree_pure(&psi), ReeMethod::Analytic, None)
}

fn bell_diagonal_record(id: u64, c: f64) -> Result<ScanRecord, ScanError> {
    let top = (1.0 + c) / 2.0;
    let spec = BellDiagonalSpectrum::new([top, 1.0 - top, 0.0, 0.0])?;
    record_with(id, "bell-diagonal", &bell_diagonal(&spec), ree_bell_diagonal(&spec), ReeMethod::Analytic, None)
}

fn horodecki_record(id: u64, p: f64) -> Result<ScanRecord, ScanError> {
    record_with(id, "horodecki", &horodecki(p)?, ree_horodecki(p)?, ReeMethod::Analytic, None)
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<f64, ScanError>) -> Result<f64, ScanError> {
    let f_lo = f(lo)?;
    if f_lo.signum() == f(hi)?.signum() {
        return Err(ScanError::NotFound { margin: f_lo });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `(1-x)|ψₐ⟩⟨ψₐ| + x σₐ` with concurrence `c` and REE `target`, found by
/// bisection on the Schmidt weight between the pure and Bell-diagonal ends.
fn pure_css_matching(id: u64, c: f64, target: f64) -> Result<ScanRecord, ScanError> {
    let a_pure = 0.5 * (1.0 + (1.0 - c * c).sqrt());
    let x_of = |a: f64| (1.0 - c / (2.0 * (a * (1.0 - a)).sqrt())).clamp(0.0, 1.0);
    let a = bisect(0.5, a_pure, |a| Ok(ree_pure_css(a, x_of(a))? - target))?;
    let x = x_of(a);
    record_with(id, "pure-css", &pure_css_mixture(a, x)?, ree_pure_css(a, x)?, ReeMethod::Analytic, None)
}

/// Explicit witness pairs for the nine patterns, built from families whose
/// REE is known in closed form or solved to high accuracy. Returned in
/// [`PARADOX_PATTERNS`] order.
pub fn constructed_witnesses(solver: &ReeSolverConfig) -> Result<Vec<(OrderingClass, ScanRecord, ScanRecord)>, ScanError> {
    let mut id = CONSTRUCTED_ID_BASE;
    let mut next = || {
        id += 1;
        id
    };
    let mut out = Vec::with_capacity(9);

    // C<, N<, E>: a purer state beats a Bell-diagonal one of higher C.
    out.push((PARADOX_PATTERNS[0], pure_record(next(), 0.5)?, bell_diagonal_record(next(), 0.6)?));
    // C<, N>, E<.
    out.push((PARADOX_PATTERNS[1], bell_diagonal_record(next(), 0.4)?, horodecki_record(next(), 0.6)?));
    // C>, N<, E<.
    out.push((PARADOX_PATTERNS[2], horodecki_record(next(), 0.6)?, bell_diagonal_record(next(), 0.55)?));

    // C=, N<, E>: a nearly pure generalized Horodecki state against the
    // Bell-diagonal state of equal concurrence.
    let (gp, ga) = (0.95, 0.3);
    let gh = generalized_horodecki(gp, ga)?;
    let gh_ree = ree_numeric(&gh, solver)?;
    let gh_rec = record_with(next(), "gen-horodecki", &gh, gh_ree.value, ReeMethod::Numeric, Some(gh_ree.converged))?;
    let c_gh = gh_rec.measures.concurrence;
    out.push((PARADOX_PATTERNS[3], gh_rec.clone(), bell_diagonal_record(next(), c_gh)?));

    // C<, N=, E>: above the crossing the pure state wins at equal N.
    let p6 = horodecki_p_for_negativity(0.6);
    out.push((PARADOX_PATTERNS[4], pure_record(next(), 0.6)?, horodecki_record(next(), p6)?));

    // C<, N>, E=: below the crossing, the pure state with the Horodecki REE.
    let e_h = ree_horodecki(0.5)?;
    out.push((PARADOX_PATTERNS[5], pure_record(next(), concurrence_from_formation(e_h))?, horodecki_record(next(), 0.5)?));

    // C=, N=, E<.
    out.push((PARADOX_PATTERNS[6], bell_diagonal_record(next(), 0.5)?, pure_record(next(), 0.5)?));

    // C=, N<, E=: the generalized Horodecki state against the pure/CSS
    // mixture with the same concurrence and REE.
    out.push((PARADOX_PATTERNS[7], gh_rec.clone(), pure_css_matching(next(), c_gh, gh_ree.value)?));

    // C<, N=, E=: pure state against the (p, N) family member with the same
    // negativity and REE.
    let n9 = 0.2;
    let w9 = formation_from_concurrence(n9);
    let p9 = bisect(horodecki_p_for_negativity(n9), 1.0, |p| Ok(ree_hprime(p, n9)? - w9))?;
    let hp = hprime(p9, n9)?;
    let hp_rec = record_with(next(), "hprime", &hp, ree_hprime(p9, n9)?, ReeMethod::Analytic, None)?;
    out.push((PARADOX_PATTERNS[8], pure_record(next(), n9)?, hp_rec));

    Ok(out)
}

// ---------------------------------------------------------------------------
// Bell-diagonal pairs with equal entanglement but different nonlocality
// ---------------------------------------------------------------------------

/// Two Bell-diagonal spectra sharing `λ_max` whose nonlocality differs by
/// more than 0.05. The concentrated and uniform tails are tried first, then
/// seeded random tails.
pub fn bell_diagonal_nonequivalence(lambda_max: f64, seed: u64) -> Result<(BellDiagonalSpectrum, BellDiagonalSpectrum), ScanError> {
    if !(lambda_max > 0.5 && lambda_max < 1.0) {
        return Err(ScanError::NotFound { margin: 0.0 });
    }
    let rest = 1.0 - lambda_max;
    let mut tails = vec![[rest, 0.0, 0.0], [rest / 3.0, rest / 3.0, rest - 2.0 * rest / 3.0]];
    let mut g = crate::states::index_stream(seed, 0);
    for _ in 0..64 {
        let e = [0; 3].map(|_| -(1.0 - g.uniform()).ln());
        let s: f64 = e.iter().sum();
        let t = e.map(|v| rest * v / s);
        tails.push([t[0], t[1], rest - t[0] - t[1]]);
    }
    let specs: Vec<BellDiagonalSpectrum> = tails
        .iter()
        .filter_map(|t| BellDiagonalSpectrum::new([lambda_max, t[0], t[1], t[2].max(0.0)]).ok())
        .collect();
    let b: Vec<f64> = specs
        .iter()
        .map(crate::measures::nonlocality_bell_diagonal)
        .collect();
    let (mut hi, mut lo) = (0, 0);
    for k in 0..b.len() {
        if b[k] > b[hi] {
            hi = k;
        }
        if b[k] < b[lo] {
            lo = k;
        }
    }
    let margin = b[hi] - b[lo];
    if margin <= 0.05 {
        return Err(ScanError::NotFound { margin });
    }
    Ok((specs[hi], specs[lo]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{FamilyQuotas, SamplerMethod};

    fn rec(c: f64, n: f64, e: f64) -> MeasureRecord {
        MeasureRecord {
            concurrence: c,
            formation: formation_from_concurrence(c),
            negativity: n,
            ppt_cost: (1.0 + n).log2(),
            nonlocality: 0.0,
            ree: Some(e),
            ree_method: ReeMethod::Analytic,
            ree_converged: None,
        }
    }

    #[test]
    fn classify_basic() {
        let t = Tolerances::default();
        let a = rec(0.3, 0.3, formation_from_concurrence(0.3));
        let r = classify_pair(&a, &a, &t).unwrap();
        assert_eq!(r.class, OrderingClass::new(E, E, E));
        assert!(r.consistent);
        let b = rec(0.6, 0.6, formation_from_concurrence(0.6));
        let r = classify_pair(&a, &b, &t).unwrap();
        assert_eq!(r.class, OrderingClass::new(L, L, L));
        assert!(r.consistent);
        let c = rec(0.3005, 0.2, 0.1);
        assert!(matches!(classify_pair(&a, &c, &t), Err(ScanError::DeadZone { measure: "C", .. })));
    }

    #[test]
    fn horodecki_vs_pure_is_paradoxical() {
        let t = Tolerances::default();
        let p = horodecki_p_for_negativity(0.2);
        let h = horodecki_record(1, p).unwrap().measures;
        let psi = pure_record(2, 0.21).unwrap().measures;
        let r = classify_pair(&h, &psi, &t).unwrap();
        assert!(!r.consistent);
        assert_eq!(r.class.signs[1], Sign::Lt);
        assert_eq!(r.class.signs[2], Sign::Gt);
    }

    #[test]
    fn constructed_witnesses_classify_as_labelled() {
        let solver = ReeSolverConfig {
            restarts: 3,
            ..ReeSolverConfig::default()
        };
        let t = Tolerances::default();
        for (class, a, b) in constructed_witnesses(&solver).unwrap() {
            let got = classify_pair(&a.measures, &b.measures, &t).unwrap();
            assert_eq!(got.class, class, "{class}: {:?} vs {:?}", a.measures, b.measures);
        }
    }

    #[test]
    fn nonequivalent_bell_pair() {
        let (a, b) = bell_diagonal_nonequivalence(0.7, 1).unwrap();
        let l = a.lambdas();
        assert!(l[0] == 0.7 && (l[1] - 0.3).abs() < 1e-12 && l[2] == 0.0 && l[3] == 0.0);
        let l = b.lambdas();
        assert!((l[1] - 0.1).abs() < 1e-12 && (l[2] - 0.1).abs() < 1e-12 && (l[3] - 0.1).abs() < 1e-12);
        assert!(matches!(bell_diagonal_nonequivalence(0.999, 1), Err(ScanError::NotFound { .. })));
        assert!(bell_diagonal_nonequivalence(0.4, 1).is_err());
    }

    #[test]
    fn pure_scan_is_consistent() {
        let cfg = SamplerConfig::new(SamplerMethod::HaarPure, 21, 1000).unwrap();
        let out = run_scan(&cfg, &ScanOptions::default()).unwrap();
        assert!(out.failures.is_empty());
        for r in &out.records {
            assert!((r.measures.negativity - r.measures.concurrence).abs() <= 1e-8);
        }
        let search = find_ordering_examples(&out.records, &PARADOX_PATTERNS, &Tolerances::default(), 1);
        assert!(PARADOX_PATTERNS.iter().all(|p| !search.found(p)));
    }

    #[test]
    fn envelope_of_pure_states_is_the_diagonal() {
        let cfg = SamplerConfig::new(SamplerMethod::HaarPure, 22, 2000).unwrap();
        let out = run_scan(&cfg, &ScanOptions::default()).unwrap();
        let env = extract_envelope(&out.records, Measure::C, Measure::N, 20).unwrap();
        for b in env.bins.iter().filter(|b| b.count > 0) {
            let (lo, hi) = (b.lower.unwrap().value, b.upper.unwrap().value);
            assert!(lo >= b.lo - 1e-8 && hi <= b.hi + 1e-8);
        }
        assert!(matches!(extract_envelope(&[], Measure::C, Measure::N, 10), Err(ScanError::EmptyInput)));
    }

    #[test]
    fn scan_independent_of_workers() {
        let cfg = SamplerConfig::new(SamplerMethod::FamilyMix(FamilyQuotas::default()), 23, 300).unwrap();
        let one = with_workers(1, || run_scan(&cfg, &ScanOptions::default())).unwrap().unwrap();
        let three = with_workers(3, || run_scan(&cfg, &ScanOptions::default())).unwrap().unwrap();
        assert_eq!(one, three);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_scan_csv(&mut a, &one.records).unwrap();
        write_scan_csv(&mut b, &three.records).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn analytic_curves() {
        assert!((pure_curve(Measure::C, Measure::ER, 0.6).unwrap() - 0.468996).abs() < 1e-6);
        assert!((horodecki_curve(Measure::C, Measure::N, 0.5).unwrap() - verstraete_lower_bound(0.5)).abs() < 1e-15);
        let p = horodecki_p_for_negativity(0.2);
        assert!((horodecki_curve(Measure::N, Measure::ER, 0.2).unwrap() - ree_horodecki(p).unwrap()).abs() < 1e-12);
        assert!((horodecki_curve(Measure::ER, Measure::C, ree_horodecki(0.7).unwrap()).unwrap() - 0.7).abs() < 1e-9);
    }

    #[test]
    fn reversed_class() {
        let c = OrderingClass::new(L, E, G);
        assert_eq!(c.reversed(), OrderingClass::new(G, E, L));
        assert_eq!(c.to_string(), "C< N= E_R>");
    }
}
