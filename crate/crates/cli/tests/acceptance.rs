//! Acceptance suite. One `PASS`/`FAIL` line per criterion; exits non-zero if any fails.
//!
//! `cargo test -p tcsim --test acceptance` runs all nine; trailing numbers select a subset,
//! e.g. `cargo test -p tcsim --test acceptance -- 3 7`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use tcsim::output::csv_body;
use tcsim_core::captable::{
    design_search, DesignProblem, DesignTargets, GeometryLUT, SyntheticPair,
};
use tcsim_core::device::{load_device, DeviceGraph};
use tcsim_core::dynamics::{
    calibrate_cz, coherence_limit, readout_stark_chevron, simultaneous_rb, single_qubit_rb,
    CzDesign, EvolveOptions, RbConfig, ReadoutSpec,
};
use tcsim_core::parity::{
    defect_rate_vs_bias, leak_markov_chain, run_parity, DefectCurve, ErrorChannelSet,
    ParityExperiment,
};
use tcsim_core::spectrum::{find_null, interaction_profile, EdgeProbe, Manifold, Quantity};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
/// Capacitance matrix of a table as a function of its dimensions.
type Truth<'a> = &'a dyn Fn(&[f64]) -> DMatrix<f64>;

const EDGES: [&str; 4] = ["C01", "C02", "C03", "C04"];
const SPAN: f64 = 0.65;
const PROFILE_POINTS: usize = 27;
/// Coupler bracket of the CZ calibration, rad.
const SEARCH_BOX: (f64, f64) = (0.15, 1.4);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn window(dev: &DeviceGraph, coupler: &str) -> (f64, f64) {
    let f_ss = dev.mode(coupler).expect("coupler exists").f_sweetspot;
    (f_ss - SPAN, f_ss)
}

fn shipped_device() -> Result<DeviceGraph, String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/five_qubit_star.toml");
    load_device(&path)
        .map(|d| d.graph)
        .map_err(|e| e.to_string())
}

fn nulling_structure() -> Outcome {
    let dev = shipped_device()?;
    let mut worst = Duration::ZERO;
    let mut lines = Vec::new();
    for edge in EDGES {
        let e = dev.edge(edge).map_err(|e| e.to_string())?;
        ensure(
            e.g_qq == 6.0 && e.g_qc_a == 70.0 && e.g_qc_b == 70.0,
            || format!("{edge}: couplings differ from 6/70 MHz"),
        )?;
        let t = Instant::now();
        let p = interaction_profile(&dev, edge, window(&dev, edge), PROFILE_POINTS)
            .map_err(|e| e.to_string())?;
        worst = worst.max(t.elapsed());
        ensure(p.nulls.pairwise_distinct(1e-3), || {
            format!("{edge}: nulls not pairwise distinct: {:?}", p.nulls)
        })?;
        let f_xi = p.nulls.xi_zz.frequency.expect("distinct nulls exist");
        let f_j1 = p.nulls.j1.frequency.expect("distinct nulls exist");
        let f_q = dev
            .mode(&e.qubit_a)
            .unwrap()
            .f_sweetspot
            .max(dev.mode(&e.qubit_b).unwrap().f_sweetspot);
        let above = (f_xi - f_q) * 1e3;
        ensure((400.0..=1000.0).contains(&above), || {
            format!("{edge}: xi null {above:.0} MHz above the qubits")
        })?;
        let probe = EdgeProbe::new(&dev, edge).map_err(|e| e.to_string())?;
        let xi = probe
            .evaluate(Quantity::XiZz, f_j1)
            .map_err(|e| e.to_string())?;
        ensure(xi.abs() < 100.0, || {
            format!("{edge}: |xi_zz| = {xi:.1} kHz at the J1 null")
        })?;
        lines.push(format!("{edge} +{above:.0} MHz, xi(J1=0) {xi:.1} kHz"));
    }
    ensure(worst < Duration::from_secs(120), || {
        format!("slowest edge took {worst:.1?}")
    })?;
    Ok(format!("{}; slowest edge {worst:.1?}", lines.join("; ")))
}

fn truncation() -> Outcome {
    let dev = DeviceGraph::reference();
    let mut worst = 0.0f64;
    for edge in EDGES {
        let w = window(&dev, edge);
        let a = interaction_profile(&dev.clone().with_levels(4), edge, w, PROFILE_POINTS)
            .map_err(|e| e.to_string())?;
        let b = interaction_profile(&dev.clone().with_levels(5), edge, w, PROFILE_POINTS)
            .map_err(|e| e.to_string())?;
        for (k, (x, y)) in a.xi_zz.iter().zip(&b.xi_zz).enumerate() {
            match (x, y) {
                (Some(x), Some(y)) => worst = worst.max((x - y).abs()),
                _ => return Err(format!("{edge}: sample {k} masked")),
            }
        }
    }
    ensure(worst < 1.0, || {
        format!("max |xi(4) - xi(5)| = {worst:.3} kHz")
    })?;
    Ok(format!(
        "max |xi(4) - xi(5)| = {worst:.3} kHz over {} samples",
        EDGES.len() * PROFILE_POINTS
    ))
}

fn cz_calibration() -> Outcome {
    let t = Instant::now();
    let dev = DeviceGraph::reference();
    let opts = EvolveOptions::default();
    let design = CzDesign::new(&dev, "C02").map_err(|e| e.to_string())?;
    let cal = calibrate_cz(&dev, &design, 60.0, SEARCH_BOX, &opts).map_err(|e| e.to_string())?;
    let m = cal.metrics;
    let noisy = design
        .metrics(&dev, &cal.spec, Some(&dev.noise), &opts)
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let detail = format!(
        "cp {:.3} deg, coherent error {:.2e}, L1 {:.2e}; noisy error {:.3}%",
        m.conditional_phase,
        m.gate_error,
        m.leakage_l1,
        100.0 * noisy.gate_error
    );
    ensure((m.conditional_phase.abs() - 180.0).abs() <= 0.1, || {
        detail.clone()
    })?;
    ensure(m.gate_error < 2e-3 && m.leakage_l1 < 1e-3, || {
        detail.clone()
    })?;
    ensure((3e-3..=1.5e-2).contains(&noisy.gate_error), || {
        detail.clone()
    })?;
    ensure(elapsed < Duration::from_secs(300), || {
        format!("{detail}; took {elapsed:.1?}")
    })?;
    Ok(format!("{detail} ({elapsed:.1?})"))
}

fn adiabaticity() -> Outcome {
    let dev = DeviceGraph::reference();
    let design = CzDesign::new(&dev, "C02").map_err(|e| e.to_string())?;
    let mut l1 = Vec::new();
    for t_p in [40.0, 60.0, 120.0, 300.0] {
        let cal = calibrate_cz(&dev, &design, t_p, SEARCH_BOX, &EvolveOptions::default())
            .map_err(|e| e.to_string())?;
        l1.push((t_p, cal.metrics.leakage_l1));
    }
    let detail = l1
        .iter()
        .map(|(t, l)| format!("{t} ns {l:.2e}"))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(l1.windows(2).all(|w| w[1].1 <= w[0].1), || {
        format!("L1 not monotone: {detail}")
    })?;
    Ok(format!("L1 {detail}"))
}

fn randomized_benchmarking() -> Outcome {
    let dev = DeviceGraph::reference();
    let cfg = RbConfig {
        gate_time: 20.0,
        lengths: vec![1, 10, 25, 50, 100, 200, 400, 800],
        n_seq: 30,
        seed: 7,
    };
    let ideal = single_qubit_rb(None, &cfg)
        .map_err(|e| e.to_string())?
        .error_per_gate;
    ensure(ideal < 1e-6, || format!("noise-free r = {ideal:.2e}"))?;
    let mut worst_ratio = 1.0f64;
    let mut individual = Vec::new();
    for q in dev.transmons() {
        let noise = dev
            .noise_for(&q.label)
            .ok_or_else(|| format!("{} has no coherence times", q.label))?;
        let r = single_qubit_rb(Some(noise), &cfg)
            .map_err(|e| e.to_string())?
            .error_per_gate;
        let limit = coherence_limit(noise, cfg.gate_time);
        let ratio = (r / limit).max(limit / r);
        ensure(ratio <= 2.0, || {
            format!("{}: r {r:.2e} vs limit {limit:.2e}", q.label)
        })?;
        worst_ratio = worst_ratio.max(ratio);
        individual.push((q.label.clone(), noise, r));
    }
    let (a, b) = (&individual[0], &individual[1]);
    let sim = simultaneous_rb([Some(a.1), Some(b.1)], 500.0, &cfg).map_err(|e| e.to_string())?;
    let detail = format!(
        "noise-free {ideal:.1e}; worst ratio to the coherence limit {worst_ratio:.2}; {} {:.2e} -> {:.2e}, {} {:.2e} -> {:.2e} at 500 kHz",
        a.0, a.2, sim[0].error_per_gate, b.0, b.2, sim[1].error_per_gate
    );
    ensure(
        sim[0].error_per_gate > a.2 && sim[1].error_per_gate > b.2,
        || detail.clone(),
    )?;
    Ok(detail)
}

fn readout_exchange() -> Outcome {
    let dev = DeviceGraph::reference();
    let readout = ReadoutSpec::default();
    let mut worst = 0.0f64;
    let mut contrast = f64::INFINITY;
    for edge in EDGES {
        let w = window(&dev, edge);
        for (manifold, q) in [
            (Manifold::OneExcitation, Quantity::J1),
            (Manifold::TwoExcitation, Quantity::J2),
        ] {
            let f0 = find_null(&dev, edge, q, w, PROFILE_POINTS)
                .map_err(|e| e.to_string())?
                .frequency
                .ok_or_else(|| format!("{edge}: no {} null", q.name()))?;
            let off = f0 - 0.2;
            let map = readout_stark_chevron(&dev, edge, "Q0", &readout, manifold, &[off, f0])
                .map_err(|e| e.to_string())?;
            let column: Vec<f64> = map.transfer[1].iter().map(|t| t.unwrap_or(0.0)).collect();
            let at_null = column.iter().copied().fold(0.0, f64::max);
            ensure(at_null < 0.01, || {
                format!("{edge} {manifold:?}: transfer {at_null:.3} at the null")
            })?;
            worst = worst.max(at_null);
            contrast = contrast.min(map.max_transfer_near(off).unwrap_or(0.0));
        }
    }
    Ok(format!(
        "max transfer at the nulls {worst:.1e} over {} amplitudes; off-null (-200 MHz) peak >= {:.1}%",
        readout.amplitudes.len(),
        100.0 * contrast
    ))
}

/// OLS slope over rounds `first..=last` and its standard error from the per-round binomial errors.
fn slope_with_error(c: &DefectCurve, first: usize, last: usize) -> (f64, f64) {
    let rounds: Vec<usize> = (first..=last).collect();
    let mean = rounds.iter().sum::<usize>() as f64 / rounds.len() as f64;
    let sxx: f64 = rounds.iter().map(|&r| (r as f64 - mean).powi(2)).sum();
    let var: f64 = rounds
        .iter()
        .map(|&r| ((r as f64 - mean) / sxx).powi(2) * c.std_error(r).powi(2))
        .sum();
    (c.slope(first, last), var.sqrt())
}

fn parity() -> Outcome {
    const ROUNDS: usize = 100;
    const SHOTS: usize = 20_000;
    let dev = DeviceGraph::reference();

    let mut clean = ParityExperiment::reference(ROUNDS, 2000, 1);
    clean.error_params = ErrorChannelSet::default();
    clean.toggle_spectator = true;
    let curve = run_parity(&clean).map_err(|e| e.to_string())?.curve();
    ensure(
        curve.defect_rate.iter().flatten().all(|&d| d == 0.0),
        || "error-free run has defects".into(),
    )?;

    let t = Instant::now();
    let template = ParityExperiment::reference(ROUNDS, SHOTS, 2024);
    let profile = interaction_profile(&dev, "C04", window(&dev, "C04"), PROFILE_POINTS)
        .map_err(|e| e.to_string())?;
    let grid: Vec<f64> = profile.coupler_freqs.iter().step_by(2).copied().collect();
    let readout = ReadoutSpec {
        amplitudes: vec![3.0],
        ..ReadoutSpec::default()
    };
    let chevron =
        readout_stark_chevron(&dev, "C04", "Q0", &readout, Manifold::TwoExcitation, &grid)
            .map_err(|e| e.to_string())?;
    let scan = defect_rate_vs_bias(&template, &grid, &profile, Some(&chevron), 3.0)
        .map_err(|e| e.to_string())?;
    let per_point = t.elapsed() / grid.len() as u32;

    let mut baseline = 0.0f64;
    for p in &scan.points {
        let rates = p.untoggled.defect_rate.iter().flatten().copied();
        baseline = baseline.max(rates.fold(0.0, f64::max));
        let s = p.untoggled.slope(20, ROUNDS);
        ensure(s.abs() <= 1e-4, || {
            format!("untoggled slope {s:.1e} per round at {:.3} GHz", p.bias)
        })?;
    }
    ensure(baseline < 0.12, || {
        format!("untoggled defect rate reaches {baseline:.4}")
    })?;

    let best = scan.toggled_argmin().expect("grid is non-empty");
    ensure(best.xi_zz.abs() < 200.0, || {
        format!(
            "toggled minimum at {:.3} GHz where xi = {:.0} kHz",
            best.bias, best.xi_zz
        )
    })?;

    let far = scan
        .points
        .iter()
        .max_by(|a, b| a.xi_zz.abs().total_cmp(&b.xi_zz.abs()))
        .expect("grid is non-empty");
    let (s_tog, se) = slope_with_error(&far.toggled, 20, ROUNDS);
    let s_untog = far.untoggled.slope(20, ROUNDS);
    ensure(s_tog > 3.0 * se && s_tog > s_untog, || {
        format!(
            "toggled slope {s_tog:.2e} +- {se:.1e} vs untoggled {s_untog:.2e} at xi = {:.0} kHz",
            far.xi_zz
        )
    })?;

    let markov = ParityExperiment::reference(ROUNDS, 100_000, 99);
    let p = markov.error_params;
    let l = 1.0 - (1.0 - p.l1_cz).powi(2) * (1.0 - p.p_leak_meas);
    let expected = leak_markov_chain(l, p.seepage, ROUNDS);
    let observed = run_parity(&markov)
        .map_err(|e| e.to_string())?
        .leak_population;
    let mut worst_sigma = 0.0f64;
    for (r, (&o, &q)) in observed.iter().zip(&expected).enumerate() {
        let sigma = (q * (1.0 - q) / markov.n_shots as f64).sqrt();
        let z = (o - q).abs() / sigma;
        ensure(z <= 3.0, || {
            format!(
                "round {}: leak {o:.5} vs chain {q:.5} ({z:.1} sigma)",
                r + 1
            )
        })?;
        worst_sigma = worst_sigma.max(z);
    }

    ensure(per_point < Duration::from_secs(60), || {
        format!("{per_point:.1?} per bias point")
    })?;
    Ok(format!(
        "untoggled <= {:.2}%; toggled minimum at {:.3} GHz (xi {:.0} kHz); slope {:.1e} = {:.0} sigma at xi {:.0} kHz; \
         leak chain within {worst_sigma:.1} sigma; {per_point:.1?} per bias point",
        100.0 * baseline,
        best.bias,
        best.xi_zz,
        s_tog,
        s_tog / se,
        far.xi_zz
    ))
}

/// Well-spread points of the unit cube.
fn probe_points(n_dims: usize, n: usize) -> Vec<Vec<f64>> {
    let alpha: Vec<f64> = (0..n_dims)
        .map(|k| ((k + 2) as f64).sqrt().fract())
        .collect();
    (1..=n)
        .map(|i| alpha.iter().map(|a| (i as f64 * a).fract()).collect())
        .collect()
}

fn scaled(lut: &GeometryLUT, u: &[f64]) -> Vec<f64> {
    lut.dims
        .iter()
        .zip(u)
        .map(|(d, t)| d.low + t * (d.high - d.low))
        .collect()
}

fn max_rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .filter(|(_, y)| **y != 0.0)
        .map(|(x, y)| ((x - y) / y).abs())
        .fold(0.0, f64::max)
}

fn lookup_tables() -> Outcome {
    let pair = SyntheticPair::default();
    let luts = pair.luts(0.0, 0);
    let truths: [Truth; 3] = [&|x| pair.q_i.matrix(x), &|x| pair.coupler.matrix(x), &|x| {
        pair.q_j.matrix(x)
    }];
    let (mut corner, mut inside) = (0.0f64, 0.0f64);
    for (lut, truth) in luts.iter().zip(truths) {
        let n = lut.n_dims();
        for (k, c) in lut.corner_capacitances.iter().enumerate() {
            let u: Vec<f64> = (0..n).map(|a| (k >> a & 1) as f64).collect();
            let m = lut
                .interpolate(&scaled(lut, &u))
                .map_err(|e| e.to_string())?
                .matrix;
            corner = corner.max((m - c).amax());
        }
        for u in probe_points(n, 200) {
            let x = scaled(lut, &u);
            inside = inside
                .max((lut.interpolate(&x).map_err(|e| e.to_string())?.matrix - truth(&x)).amax());
        }
    }
    ensure(corner <= 1e-12 && inside <= 1e-12, || {
        format!("corner error {corner:.1e} fF, interior {inside:.1e} fF")
    })?;

    let mut midpoint = 0.0f64;
    for seed in 0..20 {
        let [qi, c, qj] = pair.luts(0.003, seed);
        for (lut, truth, centre) in [
            (&qi, pair.q_i.matrix(&pair.q_i.centre()), pair.q_i.centre()),
            (
                &c,
                pair.coupler.matrix(&pair.coupler.centre()),
                pair.coupler.centre(),
            ),
            (&qj, pair.q_j.matrix(&pair.q_j.centre()), pair.q_j.centre()),
        ] {
            midpoint = midpoint.max(max_rel(
                &lut.interpolate(&centre).map_err(|e| e.to_string())?.matrix,
                &truth,
            ));
        }
    }
    ensure(midpoint <= 0.003, || {
        format!("midpoint error {:.3}%", 100.0 * midpoint)
    })?;

    let josephson = [("Q1", 14.4), ("C12", 21.5), ("Q2", 14.4)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let [qi, c, qj] = luts;
    let problem = DesignProblem::new(qi, c, qj, josephson);
    let targets = DesignTargets {
        g_qq: 6.0,
        g_qc: 70.0,
        e_c: None,
    };
    let result = design_search(&targets, &problem).map_err(|e| e.to_string())?;
    let g = result.couplings;
    let residual = [
        (g.g_qq - 6.0) / 6.0,
        (g.g_qc_i - 70.0) / 70.0,
        (g.g_qc_j - 70.0) / 70.0,
    ]
    .iter()
    .fold(0.0f64, |a, r| a.max(r.abs()));
    ensure(residual <= 0.01, || {
        format!(
            "design reaches {:.3}/{:.3}/{:.3} MHz",
            g.g_qq, g.g_qc_i, g.g_qc_j
        )
    })?;
    Ok(format!(
        "corner {corner:.1e} fF, interior {inside:.1e} fF; midpoint {:.3}% over 20 seeds; design {:.3}/{:.3} MHz (residual {residual:.1e})",
        100.0 * midpoint,
        g.g_qq,
        g.g_qc_i
    ))
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).into_iter().flatten().flatten() {
            let p = entry.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let quick_evolve =
        "evolve = { substep = 0.2, adaptive = false, tolerance = 1e-6, max_refinements = 0 }";
    let runs: [(&str, String, &[&str]); 8] = [
        ("sweep", "[sweep_interactions]\nedges = [\"C03\"]\nn_points = 13\n".into(), &["sweep-interactions"]),
        ("cz", format!("[cz]\nedge = \"C02\"\nnoisy = false\n{quick_evolve}\n"), &["cz"]),
        (
            "landscape",
            format!(
                "[cz]\nmode = \"landscape\"\ntheta_f = {{ start = 0.4, stop = 0.8, n = 3 }}\n\
                 t_p_grid = {{ start = 50.0, stop = 70.0, n = 2 }}\n{quick_evolve}\n"
            ),
            &["cz"],
        ),
        (
            "readout",
            "[readout_exchange]\nmanifold = \"two_excitation\"\ncoupler = { start = 5.8, stop = 6.2, n = 5 }\n".into(),
            &["readout-exchange"],
        ),
        ("bias", "[parity]\nn_rounds = 20\nn_shots = 500\nprofile_points = 9\n".into(), &["parity"]),
        ("detuning", "[parity]\nmode = \"detuning\"\nn_rounds = 20\nn_shots = 500\n".into(), &["parity"]),
        ("amplitude", "[parity]\nmode = \"amplitude\"\nn_rounds = 20\nn_shots = 500\n".into(), &["parity"]),
        ("lut", "[lut_design.synthetic]\nperturbation = 0.003\n".into(), &["lut-design"]),
    ];
    let mut compared = 0;
    for (name, config, args) in &runs {
        let dir = tmp.path().join(name);
        fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let cfg = dir.join("run.toml");
        fs::write(&cfg, config).map_err(|e| e.to_string())?;
        let run = |tag: &str, jobs: &str| -> Result<PathBuf, String> {
            let out = dir.join(tag);
            let o = Command::new(env!("CARGO_BIN_EXE_tcsim"))
                .args([
                    "--config",
                    &cfg.display().to_string(),
                    "--out",
                    &out.display().to_string(),
                ])
                .args(["--seed", "17", "--jobs", jobs])
                .args(*args)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(o.status.success(), || {
                format!("{name}: {}", String::from_utf8_lossy(&o.stderr).trim())
            })?;
            Ok(out)
        };
        let (a, b) = (run("a", "1")?, run("b", "2")?);
        let files = files_under(&a);
        ensure(!files.is_empty() && files == files_under(&b), || {
            format!("{name}: output sets differ")
        })?;
        for f in files {
            let (x, y) = (
                fs::read_to_string(a.join(&f)),
                fs::read_to_string(b.join(&f)),
            );
            let (x, y) = (x.map_err(|e| e.to_string())?, y.map_err(|e| e.to_string())?);
            ensure(csv_body(&x) == csv_body(&y), || {
                format!("{name}: {} differs", f.display())
            })?;
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} files identical across {} subcommand runs at 1 and 2 threads",
        runs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("nulling structure", nulling_structure),
        ("truncation convergence", truncation),
        ("CZ calibration", cz_calibration),
        ("adiabaticity", adiabaticity),
        ("randomized benchmarking", randomized_benchmarking),
        ("readout exchange", readout_exchange),
        ("parity Monte Carlo", parity),
        ("lookup tables", lookup_tables),
        ("determinism", determinism),
    ];
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let n = k + 1;
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let outcome = check();
        let elapsed = t.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {n} {name}: {detail} [{elapsed:.1?}]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {n} {name}: {detail} [{elapsed:.1?}]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
