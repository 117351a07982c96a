mod output;
mod source;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use entm_core::decay::{
    check_mes_ordering, evolve, uniform_grid, werner_robustness, write_trajectory_csv,
    DecayConfig, InitialState, Trajectory,
};
use entm_core::measures::{all_measures, MeasureRecord, ReeMethod};
use entm_core::ree::{ree_crossing, ree_numeric, write_trace_csv, ReeSolverConfig};
use entm_core::scan::{
    constructed_witnesses, dominance_report, extract_envelope, find_ordering_examples,
    run_scan, with_workers, write_envelope_csv, write_scan_csv, Measure, OrderingClass,
    ScanOptions, ScanRecord, Tolerances, PARADOX_PATTERNS,
};
use entm_core::states::{FamilyQuotas, SamplerConfig, SamplerMethod};

use output::{opt, sink, Meta};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  I/O or internal error
  2  invalid input: malformed arguments, or a state that fails validation
  3  REE solver budget exhausted before convergence (best value still printed)
  4  a checked property failed: dominance breach (scan), broken ordering
     chain or missing Werner crossing (decay), missing pattern witness
     (ordering)

Stochastic subcommands need --seed or ENTM_SEED; there is no clock seeding.";

#[derive(Parser)]
#[command(
    name = "entm",
    version,
    about = "Two-qubit entanglement measures, REE solver, decay trajectories and Monte Carlo surveys",
    after_help = EXIT_CODES
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every measure of one state.
    Measure {
        #[command(flatten)]
        source: StateSource,
        /// Solve the REE numerically when no closed form applies.
        #[arg(long)]
        with_ree: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Numerical REE with its closest separable state.
    Ree {
        #[command(flatten)]
        source: StateSource,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the closest separable state as JSON.
        #[arg(long)]
        dump_css: Option<PathBuf>,
        /// Write the per-restart solver trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sample states and write one CSV row of measures per state.
    Scan {
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Amplitude-damping trajectories of the three maximally entangled
    /// states or three Werner states.
    Decay {
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        /// Final time; γt runs to gamma·tmax.
        #[arg(long, default_value_t = 30.0)]
        tmax: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Initial::Mes)]
        initial: Initial,
        /// Werner mixing parameter.
        #[arg(long, default_value_t = 0.8)]
        p: f64,
        #[arg(long)]
        with_ree: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Search for state pairs that C, N and E_R rank differently.
    Ordering {
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Patterns to report: `all`, or comma-separated indices 1-9 in the
        /// order C<N<E>, C<N>E<, C>N<E<, C=N<E>, C<N=E>, C<N>E=, C=N=E<,
        /// C=N<E=, C<N=E=.
        #[arg(long, default_value = "all")]
        classes: String,
        #[arg(long, default_value_t = 1e-4)]
        tol_eq: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol_strict: f64,
        /// Witnesses kept per pattern from the scan.
        #[arg(long, default_value_t = 1)]
        per_class: usize,
        /// Skip the constructed witness pairs.
        #[arg(long)]
        no_constructed: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Negativity where the Horodecki REE meets the pure-state curve.
    Crossing {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Per-bin lower and upper bounds of one measure against another.
    Envelope {
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long, default_value = "C")]
        x: String,
        #[arg(long, default_value = "N")]
        y: String,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct StateSource {
    /// JSON state file: {"entries": [[re, im], ...]} with 16 row-major entries.
    #[arg(long)]
    file: Option<PathBuf>,
    /// bell k | werner k p | horodecki p | hprime p N | belldiag l1 l2 l3 l4 | tildepsi p
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    family: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Objective evaluations per restart.
    #[arg(long, default_value_t = 40_000)]
    budget: usize,
    /// Simplex value spread that counts as converged.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, env = "ENTM_SEED")]
    seed: Option<u64>,
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 1000)]
    count: u64,
    /// ginibre | haar-pure | induced:K | family-mix
    #[arg(long, default_value = "ginibre")]
    sampler: String,
    /// Solve the REE numerically for states without a closed form.
    #[arg(long)]
    with_ree: bool,
    /// Most numerical REE solves in one run.
    #[arg(long, default_value_t = 200)]
    ree_budget: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum Initial {
    Mes,
    Werner,
}

enum Failure {
    Io(String),
    Invalid(String),
    Budget,
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Budget => 3,
            Failure::Check(_) => 4,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn invalid(e: impl ToString) -> Failure {
    Failure::Invalid(e.to_string())
}

impl SolverArgs {
    fn config(&self, seed: u64) -> Result<ReeSolverConfig, Failure> {
        let cfg = ReeSolverConfig {
            restarts: self.restarts,
            max_evaluations: self.budget,
            simplex_tolerance: self.tol,
            seed,
            ..ReeSolverConfig::default()
        };
        cfg.validate().map_err(invalid)?;
        Ok(cfg)
    }

    fn require_seed(&self) -> Result<u64, Failure> {
        self.seed
            .ok_or_else(|| invalid("this command is stochastic: pass --seed or set ENTM_SEED"))
    }

    fn describe(&self) -> String {
        format!("restarts={} budget={} tol={:e}", self.restarts, self.budget, self.tol)
    }
}

impl SamplingArgs {
    fn sampler(&self, seed: u64) -> Result<SamplerConfig, Failure> {
        let method = match self.sampler.as_str() {
            "ginibre" => SamplerMethod::Ginibre,
            "haar-pure" => SamplerMethod::HaarPure,
            "family-mix" => SamplerMethod::FamilyMix(FamilyQuotas::default()),
            s => match s.strip_prefix("induced:").map(str::parse::<usize>) {
                Some(Ok(k)) => SamplerMethod::Induced { ancilla: k },
                _ => return Err(invalid(format!("unknown sampler `{s}`"))),
            },
        };
        SamplerConfig::new(method, seed, self.count).map_err(invalid)
    }

    fn options(&self, seed: u64) -> Result<ScanOptions, Failure> {
        Ok(ScanOptions {
            with_ree: self.with_ree,
            solver: self.solver.config(seed)?,
            numeric_budget: self.ree_budget,
        })
    }

    fn describe(&self) -> String {
        format!(
            "count={} sampler={} with_ree={} ree_budget={} {}",
            self.count,
            self.sampler,
            self.with_ree,
            self.ree_budget,
            self.solver.describe()
        )
    }

    fn scan(&self) -> Result<(u64, Vec<ScanRecord>), Failure> {
        let seed = self.solver.require_seed()?;
        let cfg = self.sampler(seed)?;
        let opts = self.options(seed)?;
        let out = with_workers(self.workers, || run_scan(&cfg, &opts))
            .map_err(invalid)?
            .map_err(invalid)?;
        for (id, msg) in &out.failures {
            eprintln!("state {id}: {msg}");
        }
        Ok((seed, out.records))
    }
}

fn resolve(source: &StateSource) -> Result<source::Resolved, Failure> {
    let r = match (&source.file, &source.family) {
        (Some(path), _) => source::from_file(path),
        (None, Some(words)) => source::from_family(words),
        (None, None) => Err("give --file or --family".to_string()),
    };
    r.map_err(|e| Failure::Invalid(format!("invalid state: {e}")))
}

fn record_json(m: &MeasureRecord) -> serde_json::Value {
    json!({
        "C": m.concurrence,
        "E_F": m.formation,
        "N": m.negativity,
        "E_PPT": m.ppt_cost,
        "B": m.nonlocality,
        "E_R": m.ree,
        "ree_method": m.ree_method.name(),
        "ree_converged": m.ree_converged,
    })
}

fn write_json<W: Write>(out: &mut W, meta: &Meta, body: serde_json::Value) -> std::io::Result<()> {
    let doc = json!({ "meta": meta.json(), "result": body });
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

fn cmd_measure(source: &StateSource, with_ree: bool, solver: &SolverArgs, out: &OutputArgs) -> Outcome {
    let r = resolve(source)?;
    let (seed, cfg) = if with_ree && r.analytic_ree.is_none() {
        let seed = solver.require_seed()?;
        (Some(seed), Some(solver.config(seed)?))
    } else {
        (None, None)
    };
    let mut rec = all_measures(&r.state, cfg.as_ref()).map_err(invalid)?;
    if let (Some(e), ReeMethod::Absent) = (r.analytic_ree, rec.ree_method) {
        rec = rec.with_ree(e, ReeMethod::Analytic, None);
    }
    let meta = Meta::new(seed, format!("measure source={} with_ree={with_ree} {}", r.label, solver.describe()));
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Json => write_json(&mut w, &meta, json!({ "source": r.label, "measures": record_json(&rec) }))?,
        Format::Csv => {
            meta.write_comments(&mut w)?;
            writeln!(w, "source,C,E_F,N,E_PPT,B,E_R,ree_method,ree_converged")?;
            writeln!(
                w,
                "{},{:.12},{:.12},{:.12},{:.12},{:.12},{},{},{}",
                r.label,
                rec.concurrence,
                rec.formation,
                rec.negativity,
                rec.ppt_cost,
                rec.nonlocality,
                opt(rec.ree),
                rec.ree_method.name(),
                rec.ree_converged.map(|b| b.to_string()).unwrap_or_default()
            )?;
        }
    }
    w.flush()?;
    if rec.ree_converged == Some(false) {
        return Err(Failure::Budget);
    }
    Ok(())
}

fn cmd_ree(source: &StateSource, solver: &SolverArgs, dump: Option<&PathBuf>, trace: Option<&PathBuf>, out: &OutputArgs) -> Outcome {
    let r = resolve(source)?;
    let seed = solver.require_seed()?;
    let cfg = solver.config(seed)?;
    let css = ree_numeric(&r.state, &cfg).map_err(invalid)?;
    let meta = Meta::new(Some(seed), format!("ree source={} {}", r.label, solver.describe()));
    if let Some(path) = dump {
        std::fs::write(path, css.state.to_json() + "\n")?;
    }
    if let Some(path) = trace {
        let mut w = sink(Some(path))?;
        meta.write_comments(&mut w)?;
        write_trace_csv(&mut w, &css.trace)?;
        w.flush()?;
    }
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Json => write_json(
            &mut w,
            &meta,
            json!({
                "source": r.label,
                "value": css.value,
                "converged": css.converged,
                "evaluations": css.evaluations,
                "restart": css.restart,
                "analytic": r.analytic_ree,
            }),
        )?,
        Format::Csv => {
            meta.write_comments(&mut w)?;
            writeln!(w, "source,E_R,converged,evaluations,restart,analytic,difference")?;
            writeln!(
                w,
                "{},{:.12},{},{},{},{},{}",
                r.label,
                css.value,
                css.converged,
                css.evaluations,
                css.restart,
                opt(r.analytic_ree),
                opt(r.analytic_ree.map(|a| css.value - a))
            )?;
        }
    }
    w.flush()?;
    if !css.converged {
        return Err(Failure::Budget);
    }
    Ok(())
}

fn cmd_scan(sampling: &SamplingArgs, out: &OutputArgs) -> Outcome {
    let (seed, records) = sampling.scan()?;
    let meta = Meta::new(Some(seed), format!("scan {}", sampling.describe()));
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Csv => {
            meta.write_comments(&mut w)?;
            write_scan_csv(&mut w, &records)?;
        }
        Format::Json => {
            let rows: Vec<_> = records
                .iter()
                .map(|r| json!({ "state_id": r.state_id, "family_tag": r.family_tag, "purity": r.purity, "measures": record_json(&r.measures) }))
                .collect();
            write_json(&mut w, &meta, json!(rows))?;
        }
    }
    w.flush()?;
    let dom = dominance_report(&records, 1e-9);
    eprintln!(
        "{} states; dominance violations: N>C {}, B>N {}, B>C {}",
        dom.checked, dom.n_above_c, dom.b_above_n, dom.b_above_c
    );
    if dom.violations() > 0 {
        return Err(Failure::Check("dominance breach".into()));
    }
    if records.iter().any(|r| r.measures.ree_converged == Some(false)) {
        eprintln!("some numerical REE values did not converge (ree_converged=false)");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_decay(gamma: f64, tmax: f64, points: usize, initial: Initial, p: f64, with_ree: bool, solver: &SolverArgs, out: &OutputArgs) -> Outcome {
    if points == 0 {
        return Err(invalid("--points must be positive"));
    }
    let (seed, cfg) = if with_ree {
        let seed = solver.require_seed()?;
        (Some(seed), Some(solver.config(seed)?))
    } else {
        (None, None)
    };
    let grid = uniform_grid(tmax, points);
    let trajs: Vec<Trajectory> = (1..=3)
        .map(|k| {
            let start = match initial {
                Initial::Mes => InitialState::Bell(k),
                Initial::Werner => InitialState::Werner { k, p },
            };
            let dc = DecayConfig::new(gamma, grid.clone(), start).map_err(invalid)?;
            evolve(&dc, cfg.as_ref()).map_err(invalid)
        })
        .collect::<Result<_, _>>()?;
    let meta = Meta::new(
        seed,
        format!("decay gamma={gamma} tmax={tmax} points={points} initial={initial:?} p={p} with_ree={with_ree} {}", solver.describe()),
    );
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Csv => {
            meta.write_comments(&mut w)?;
            write_trajectory_csv(&mut w, &trajs)?;
        }
        Format::Json => {
            let body: Vec<_> = trajs
                .iter()
                .map(|t| {
                    json!({
                        "label": t.label,
                        "t": t.times,
                        "gamma_t": t.gamma_t,
                        "eta": t.eta,
                        "records": t.records.iter().map(record_json).collect::<Vec<_>>(),
                    })
                })
                .collect();
            write_json(&mut w, &meta, json!(body))?;
        }
    }
    w.flush()?;
    let three: [Trajectory; 3] = trajs.try_into().map_err(|_| Failure::Io("trajectory count".into()))?;
    match initial {
        Initial::Mes => {
            let rep = check_mes_ordering(&three).map_err(invalid)?;
            for c in &rep.chains {
                eprintln!("{}: {} violating points, max violation {:.3e}", c.name, c.violating_points, c.max_violation);
            }
            for (m, k) in rep.most_fragile {
                eprintln!("most fragile by {m}: Psi_{k}");
            }
            if !rep.holds() {
                return Err(Failure::Check("ordering chain violated".into()));
            }
        }
        Initial::Werner => {
            let rep = werner_robustness(&three, p).map_err(invalid)?;
            eprintln!("initial negativity spread {:.3e}", rep.initial_spread);
            for c in &rep.crossings {
                eprintln!("N_{} - N_{} changes sign near gamma*t = {:.4}", c.j, c.k, c.gamma_t);
            }
            if rep.crossings.is_empty() {
                return Err(Failure::Check("no negativity crossing".into()));
            }
        }
    }
    Ok(())
}

fn parse_classes(spec: &str) -> Result<Vec<OrderingClass>, Failure> {
    if spec == "all" {
        return Ok(PARADOX_PATTERNS.to_vec());
    }
    spec.split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(k @ 1..=9) => Ok(PARADOX_PATTERNS[k - 1]),
            _ => Err(invalid(format!("bad class `{s}` (use 1-9 or all)"))),
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_ordering(sampling: &SamplingArgs, classes: &str, tol_eq: f64, tol_strict: f64, per_class: usize, no_constructed: bool, out: &OutputArgs) -> Outcome {
    let targets = parse_classes(classes)?;
    if !(tol_eq >= 0.0 && tol_strict >= tol_eq) {
        return Err(invalid("need 0 <= --tol-eq <= --tol-strict"));
    }
    let tol = Tolerances { eq: tol_eq, strict: tol_strict };
    let (seed, records) = sampling.scan()?;
    let search = find_ordering_examples(&records, &targets, &tol, per_class);
    let constructed = if no_constructed {
        Vec::new()
    } else {
        constructed_witnesses(&sampling.solver.config(seed)?).map_err(invalid)?
    };
    let meta = Meta::new(
        Some(seed),
        format!("ordering {} classes={classes} tol_eq={tol_eq:e} tol_strict={tol_strict:e} per_class={per_class} constructed={}", sampling.describe(), !no_constructed),
    );
    let mut rows: Vec<(OrderingClass, &'static str, &ScanRecord, &ScanRecord)> = Vec::new();
    for t in &targets {
        for wp in &search.witnesses[t] {
            rows.push((*t, "scan", &wp.first, &wp.second));
        }
        for (c, a, b) in &constructed {
            if c == t {
                rows.push((*t, "constructed", a, b));
            }
        }
    }
    let mut w = sink(out.output.as_deref())?;
    let side = |r: &ScanRecord| {
        let m = &r.measures;
        (r.state_id, r.family_tag, m.concurrence, m.negativity, m.ree.unwrap_or(f64::NAN), m.nonlocality)
    };
    match out.format {
        Format::Csv => {
            meta.write_comments(&mut w)?;
            writeln!(w, "pattern,source,id_a,family_a,C_a,N_a,E_R_a,B_a,id_b,family_b,C_b,N_b,E_R_b,B_b")?;
            for (c, src, a, b) in &rows {
                let (ia, fa, ca, na, ea, ba) = side(a);
                let (ib, fb, cb, nb, eb, bb) = side(b);
                writeln!(
                    w,
                    "{c},{src},{ia},{fa},{ca:.12},{na:.12},{ea:.12},{ba:.12},{ib},{fb},{cb:.12},{nb:.12},{eb:.12},{bb:.12}"
                )?;
            }
        }
        Format::Json => {
            let body: Vec<_> = rows
                .iter()
                .map(|(c, src, a, b)| {
                    json!({
                        "pattern": c.to_string(),
                        "source": src,
                        "a": { "id": a.state_id, "family": a.family_tag, "measures": record_json(&a.measures) },
                        "b": { "id": b.state_id, "family": b.family_tag, "measures": record_json(&b.measures) },
                    })
                })
                .collect();
            write_json(&mut w, &meta, json!(body))?;
        }
    }
    w.flush()?;
    eprintln!("{} pairs examined", search.pairs_examined);
    let mut missing = Vec::new();
    for t in &targets {
        let from_scan = search.witnesses[t].len();
        let built = constructed.iter().any(|(c, _, _)| c == t);
        eprintln!("{t}: {from_scan} from scan{}", if built { ", plus constructed" } else { "" });
        if from_scan == 0 && !built {
            missing.push(t.to_string());
        }
    }
    if !missing.is_empty() {
        return Err(Failure::Check(format!("no witness for {}", missing.join("; "))));
    }
    Ok(())
}

fn cmd_crossing(out: &OutputArgs) -> Outcome {
    let (n, e) = ree_crossing().map_err(invalid)?;
    let meta = Meta::new(None, "crossing".into());
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Csv => {
            meta.write_comments(&mut w)?;
            writeln!(w, "N_Y,E_Y")?;
            writeln!(w, "{n:.10},{e:.10}")?;
        }
        Format::Json => write_json(&mut w, &meta, json!({ "N_Y": n, "E_Y": e }))?,
    }
    w.flush()?;
    Ok(())
}

fn cmd_envelope(sampling: &SamplingArgs, x: &str, y: &str, bins: usize, out: &OutputArgs) -> Outcome {
    let xm = Measure::parse(x).ok_or_else(|| invalid(format!("unknown measure `{x}`")))?;
    let ym = Measure::parse(y).ok_or_else(|| invalid(format!("unknown measure `{y}`")))?;
    if bins == 0 {
        return Err(invalid("--bins must be positive"));
    }
    let (seed, records) = sampling.scan()?;
    let env = extract_envelope(&records, xm, ym, bins).map_err(|e| {
        invalid(format!("{e}: no record carries both {xm} and {ym} (E_R needs --with-ree or a closed-form family)"))
    })?;
    let meta = Meta::new(Some(seed), format!("envelope {} x={xm} y={ym} bins={bins}", sampling.describe()));
    let mut w = sink(out.output.as_deref())?;
    match out.format {
        Format::Csv => {
            meta.write_comments(&mut w)?;
            write_envelope_csv(&mut w, &env)?;
        }
        Format::Json => {
            let body: Vec<_> = env
                .bins
                .iter()
                .map(|b| {
                    json!({
                        "lo": b.lo,
                        "hi": b.hi,
                        "count": b.count,
                        "lower": b.lower.map(|e| json!({ "value": e.value, "id": e.state_id })),
                        "upper": b.upper.map(|e| json!({ "value": e.value, "id": e.state_id })),
                    })
                })
                .collect();
            write_json(&mut w, &meta, json!({ "x": xm.name(), "y": ym.name(), "bins": body }))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Measure { source, with_ree, solver, out } => cmd_measure(source, *with_ree, solver, out),
        Command::Ree { source, solver, dump_css, trace, out } => cmd_ree(source, solver, dump_css.as_ref(), trace.as_ref(), out),
        Command::Scan { sampling, out } => cmd_scan(sampling, out),
        Command::Decay { gamma, tmax, points, initial, p, with_ree, solver, out } => {
            cmd_decay(*gamma, *tmax, *points, *initial, *p, *with_ree, solver, out)
        }
        Command::Ordering { sampling, classes, tol_eq, tol_strict, per_class, no_constructed, out } => {
            cmd_ordering(sampling, classes, *tol_eq, *tol_strict, *per_class, *no_constructed, out)
        }
        Command::Crossing { out } => cmd_crossing(out),
        Command::Envelope { sampling, x, y, bins, out } => cmd_envelope(sampling, x, y, *bins, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Io(m) | Failure::Invalid(m) | Failure::Check(m) => eprintln!("error: {m}"),
                Failure::Budget => eprintln!("warning: REE budget exhausted; value above is the best found"),
            }
            ExitCode::from(f.code())
        }
    }
}
