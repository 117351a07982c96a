//! Acceptance gate: one PASS/FAIL line per criterion. Run with
//! `cargo test --test acceptance`; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use entm_core::decay::{
    check_mes_ordering, evolve, uniform_grid, werner_robustness, DecayConfig, InitialState,
    Trajectory,
};
use entm_core::measures::{concurrence, formation_from_concurrence, negativity, nonlocality};
use entm_core::ree::{
    ree_bell_diagonal, ree_crossing, ree_horodecki, ree_hprime, ree_numeric, relative_entropy,
    ReeSolverConfig,
};
use entm_core::scan::{
    constructed_witnesses, dominance_report, extract_envelope, find_ordering_examples, run_scan,
    verstraete_lower_bound, Measure, ScanOptions, ScanRecord, Tolerances, PARADOX_PATTERNS,
};
use entm_core::states::{
    bell_diagonal, haar_pure, horodecki, horodecki_css, horodecki_p_for_negativity, hprime,
    index_stream, BellDiagonalSpectrum, FamilyKind, FamilyQuotas, SamplerConfig, SamplerMethod,
};

type Verdict = Result<(bool, String), String>;

fn scan(method: SamplerMethod, seed: u64, count: u64) -> Vec<ScanRecord> {
    let cfg = SamplerConfig::new(method, seed, count).unwrap();
    let out = run_scan(&cfg, &ScanOptions::default()).unwrap();
    assert!(out.failures.is_empty(), "{:?}", out.failures);
    out.records
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

fn c1_pure_identity() -> Verdict {
    let t = Instant::now();
    let (mut db, mut dn) = (0.0f64, 0.0f64);
    for i in 0..10_000u64 {
        let rho = haar_pure(&mut index_stream(1, i)).density();
        let c = concurrence(&rho).map_err(|e| e.to_string())?;
        db = db.max((nonlocality(&rho).map_err(|e| e.to_string())? - c).abs());
        dn = dn.max((negativity(&rho).map_err(|e| e.to_string())? - c).abs());
    }
    let el = t.elapsed();
    Ok((
        db <= 1e-8 && dn <= 1e-8 && within(Duration::from_secs(5), el),
        format!("max|B-C| = {db:.2e}, max|N-C| = {dn:.2e}, {:.2} s (limit 5 s)", el.as_secs_f64()),
    ))
}

fn c2_pure_ree() -> Verdict {
    let t = Instant::now();
    let cfg = ReeSolverConfig::default();
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let psi = haar_pure(&mut index_stream(2, i));
        let rho = psi.density();
        let w = formation_from_concurrence(concurrence(&rho).map_err(|e| e.to_string())?);
        let v = ree_numeric(&rho, &cfg).map_err(|e| e.to_string())?.value;
        worst = worst.max((v - w).abs());
    }
    let el = t.elapsed();
    Ok((
        worst <= 1e-3 && within(Duration::from_secs(600), el),
        format!("max|E_R - W(C)| = {worst:.2e} over 50 states, {:.1} s (limit 600 s)", el.as_secs_f64()),
    ))
}

fn c3_horodecki() -> Verdict {
    let cfg = ReeSolverConfig::default();
    let (mut dn, mut dnum, mut dcss) = (0.0f64, 0.0f64, 0.0f64);
    for i in 1..=10 {
        let p = i as f64 / 10.0;
        let rho = horodecki(p).map_err(|e| e.to_string())?;
        let closed = ((1.0 - p).powi(2) + p * p).sqrt() - (1.0 - p);
        dn = dn.max((negativity(&rho).map_err(|e| e.to_string())? - closed).abs());
        let e = ree_horodecki(p).map_err(|e| e.to_string())?;
        let num = ree_numeric(&rho, &cfg).map_err(|e| e.to_string())?.value;
        dnum = dnum.max((num - e).abs());
        let css = horodecki_css(p).map_err(|e| e.to_string())?;
        dcss = dcss.max((relative_entropy(&rho, &css) - e).abs());
    }
    Ok((
        dn <= 1e-12 && dnum <= 1e-3 && dcss <= 1e-10,
        format!("negativity {dn:.1e}, numeric REE {dnum:.1e}, closed-form CSS {dcss:.1e}"),
    ))
}

fn c4_crossing() -> Verdict {
    let t = Instant::now();
    let (n, e) = ree_crossing().map_err(|e| e.to_string())?;
    let el = t.elapsed();
    Ok((
        (n - 0.3770).abs() <= 5e-4 && (e - 0.2279).abs() <= 5e-4 && within(Duration::from_secs(1), el),
        format!("N_Y = {n:.5}, E_Y = {e:.5}, {:.3} s (limit 1 s)", el.as_secs_f64()),
    ))
}

fn c5_mixed_beats_pure(mix: &[ScanRecord]) -> Verdict {
    let n = 0.2;
    let w = formation_from_concurrence(n);
    let p_min = horodecki_p_for_negativity(n);
    let (p, closed) = (0..=200)
        .map(|j| p_min + (1.0 - p_min) * j as f64 / 200.0)
        .filter_map(|p| ree_hprime(p, n).ok().map(|e| (p, e)))
        .fold((f64::NAN, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let rho = hprime(p, n).map_err(|e| e.to_string())?;
    let num = ree_numeric(&rho, &ReeSolverConfig::default()).map_err(|e| e.to_string())?.value;

    let (y, _) = ree_crossing().map_err(|e| e.to_string())?;
    let witnesses: Vec<f64> = mix
        .iter()
        .filter_map(|r| {
            let m = &r.measures;
            let e = m.ree?;
            (e > formation_from_concurrence(m.negativity) + 2e-3).then_some(m.negativity)
        })
        .collect();
    let max_n = witnesses.iter().copied().fold(0.0f64, f64::max);
    Ok((
        (num - closed).abs() <= 1e-3 && closed - w >= 0.03 && !witnesses.is_empty() && max_n <= y + 0.01,
        format!(
            "hprime(p={p:.4}, N=0.2): closed {closed:.5}, numeric {num:.5}, W(0.2) = {w:.5}, margin {:.4}; \
             {} scan witnesses, max N {max_n:.4} vs N_Y + 0.01 = {:.4}",
            closed - w,
            witnesses.len(),
            y + 0.01
        ),
    ))
}

fn c6_dominance() -> Verdict {
    let t = Instant::now();
    let recs = scan(SamplerMethod::Ginibre, 6, 100_000);
    let rep = dominance_report(&recs, 1e-9);
    let el = t.elapsed();
    Ok((
        rep.violations() == 0 && rep.checked == 100_000 && within(Duration::from_secs(30), el),
        format!(
            "{} states, violations N>C {} B>C {} B>N {}, {:.1} s (limit 30 s)",
            rep.checked,
            rep.n_above_c,
            rep.b_above_c,
            rep.b_above_n,
            el.as_secs_f64()
        ),
    ))
}

fn c7_lower_envelope() -> Verdict {
    let quotas = FamilyQuotas {
        weights: vec![(FamilyKind::Ginibre, 0.8), (FamilyKind::Horodecki, 0.2)],
    };
    let recs = scan(SamplerMethod::FamilyMix(quotas), 7, 100_000);
    let env = extract_envelope(&recs, Measure::C, Measure::N, 50).map_err(|e| e.to_string())?;
    let by_id: std::collections::HashMap<u64, f64> =
        recs.iter().map(|r| (r.state_id, r.measures.concurrence)).collect();
    let (mut worst, mut worst_mid, mut below, mut used) = (0.0f64, 0.0f64, 0.0f64, 0);
    for b in env.bins.iter().filter(|b| b.count >= 20) {
        let Some(lo) = b.lower else { continue };
        used += 1;
        let c = by_id[&lo.state_id];
        worst = worst.max((lo.value - verstraete_lower_bound(c)).abs());
        worst_mid = worst_mid.max((lo.value - verstraete_lower_bound(b.mid())).abs());
        below = below.max(verstraete_lower_bound(b.lo) - lo.value);
    }
    Ok((
        used > 0 && worst <= 0.02 && below <= 1e-9,
        format!(
            "{used} bins with >= 20 samples, max |lower - bound(C)| = {worst:.2e} \
             (against bin midpoints {worst_mid:.4}), max dip below bound(lo) = {below:.1e}"
        ),
    ))
}

fn trajectories(initial: impl Fn(usize) -> InitialState) -> Result<[Trajectory; 3], String> {
    let grid = uniform_grid(30.0, 61);
    let ts: Vec<Trajectory> = (1..=3)
        .map(|k| {
            let cfg = DecayConfig::new(0.1, grid.clone(), initial(k)).map_err(|e| e.to_string())?;
            evolve(&cfg, None).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    ts.try_into().map_err(|_| "three trajectories".to_string())
}

fn c8_decay_orderings() -> Verdict {
    let ts = trajectories(InitialState::Bell)?;
    let rep = check_mes_ordering(&ts).map_err(|e| e.to_string())?;
    let mut dev = 0.0f64;
    for (s, &eta) in ts[0].states.iter().zip(&ts[0].eta) {
        let h = horodecki(eta).map_err(|e| e.to_string())?;
        dev = dev.max(s.matrix().max_abs_diff(h.matrix()));
    }
    let chains: Vec<String> = rep
        .chains
        .iter()
        .map(|c| format!("{} max gap {:.1e}", c.name, c.max_violation))
        .collect();
    Ok((
        rep.holds() && dev <= 1e-12,
        format!("{}; Psi_1 vs horodecki(e^-gt) {dev:.1e}", chains.join(", ")),
    ))
}

fn c9_werner_crossing() -> Verdict {
    let ts = trajectories(|k| InitialState::Werner { k, p: 0.8 })?;
    let rep = werner_robustness(&ts, 0.8).map_err(|e| e.to_string())?;
    let inside: Vec<String> = rep
        .crossings
        .iter()
        .filter(|c| c.gamma_t > 0.0 && c.gamma_t <= 3.0)
        .map(|c| format!("N{}-N{} at gt~{:.2}", c.j, c.k, c.gamma_t))
        .collect();
    Ok((
        rep.initial_spread <= 1e-9 && !inside.is_empty(),
        format!("initial spread {:.1e}; {}", rep.initial_spread, inside.join(", ")),
    ))
}

fn c10_paradoxes(mix: &[ScanRecord]) -> Verdict {
    let t = Instant::now();
    let tol = Tolerances { eq: 1e-4, strict: 1e-3 };
    let search = find_ordering_examples(mix, &PARADOX_PATTERNS, &tol, 1);
    let built = constructed_witnesses(&ReeSolverConfig::default()).map_err(|e| e.to_string())?;
    let mut missing = Vec::new();
    let mut from_scan = 0;
    for c in &PARADOX_PATTERNS {
        let s = search.found(c);
        from_scan += s as usize;
        if !s && !built.iter().any(|(b, _, _)| b == c) {
            missing.push(c.to_string());
        }
    }
    let pure = scan(SamplerMethod::HaarPure, 10, 10_000);
    let pure_search = find_ordering_examples(&pure, &PARADOX_PATTERNS, &tol, 1);
    let el = t.elapsed();
    Ok((
        missing.is_empty() && pure_search.paradoxical_total() == 0 && within(Duration::from_secs(1200), el),
        format!(
            "{from_scan}/9 patterns from the scan, {} constructed pairs, missing [{}]; pure scan: {} paradoxical of {} pairs; {:.1} s (limit 1200 s)",
            built.len(),
            missing.join("; "),
            pure_search.paradoxical_total(),
            pure_search.pairs_examined,
            el.as_secs_f64()
        ),
    ))
}

fn c11_bell_pair() -> Verdict {
    let a = BellDiagonalSpectrum::new([0.7, 0.3, 0.0, 0.0]).map_err(|e| e.to_string())?;
    let b = BellDiagonalSpectrum::new([0.7, 0.1, 0.1, 0.1]).map_err(|e| e.to_string())?;
    let (ra, rb) = (bell_diagonal(&a), bell_diagonal(&b));
    let m = |r| -> Result<(f64, f64, f64), String> {
        Ok((
            concurrence(r).map_err(|e| e.to_string())?,
            negativity(r).map_err(|e| e.to_string())?,
            nonlocality(r).map_err(|e| e.to_string())?,
        ))
    };
    let ((ca, na, ba), (cb, nb, bb)) = (m(&ra)?, m(&rb)?);
    let cfg = ReeSolverConfig::default();
    let ea = ree_numeric(&ra, &cfg).map_err(|e| e.to_string())?.value;
    let eb = ree_numeric(&rb, &cfg).map_err(|e| e.to_string())?.value;
    let same = [ca, na, cb, nb].iter().all(|x| (x - ca).abs() <= 1e-12);
    Ok((
        same && (ea - eb).abs() <= 1e-3 && (ba - 0.4).abs() <= 1e-10 && bb.abs() <= 1e-10,
        format!(
            "C = N = {ca:.12}; E_R {ea:.6} vs {eb:.6} (closed form {:.6}); B {ba:.10} vs {bb:.10}",
            ree_bell_diagonal(&a)
        ),
    ))
}

fn main() -> ExitCode {
    // Family-mix scan shared by the two criteria that read it.
    let mix = scan(SamplerMethod::FamilyMix(FamilyQuotas::default()), 10, 100_000);
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("pure-state identity", Box::new(c1_pure_identity)),
        ("pure-state REE", Box::new(c2_pure_ree)),
        ("Horodecki suite", Box::new(c3_horodecki)),
        ("crossing point", Box::new(c4_crossing)),
        ("mixed beats pure", Box::new(|| c5_mixed_beats_pure(&mix))),
        ("dominance", Box::new(c6_dominance)),
        ("lower envelope", Box::new(c7_lower_envelope)),
        ("decay orderings", Box::new(c8_decay_orderings)),
        ("Werner crossing", Box::new(c9_werner_crossing)),
        ("ordering paradoxes", Box::new(|| c10_paradoxes(&mix))),
        ("Bell-diagonal pair", Box::new(c11_bell_pair)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !ok as usize;
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
