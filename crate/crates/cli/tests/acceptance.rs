// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! Release gate. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails. Runs without the libtest harness so the lines are always
//! visible under `cargo test`.

use std::time::{Duration, Instant};

use oqs_core::channels::DensityMatrix;
use oqs_core::circuit::{run_channel_via_dilation, DilationMethod};
use oqs_core::dilation::{stinespring_stack, svd_dilate, sz_nagy, unitary_decomposition};
use oqs_core::lindblad::{propagate_exact, propagate_exact_grid};
use oqs_core::models::{exciton_transfer_model, radical_pair_model, ExcitonParams};
use oqs_core::numerics::{eigh, paulis, spectral_norm, unitarity_defect};
use oqs_core::solvers::monte_carlo::enumerate_branches;
use oqs_core::solvers::variational::{finite_difference_check, DEFAULT_LAMBDA};
use oqs_core::solvers::{
    mc_observables, variational_evolve, Ansatz, EomScheme, EomVariant, MixedUnitaryChannel, PauliString,
};
use oqs_core::testing::{random_channel, random_density, random_lindbladian, random_matrix};
use oqs_lab::validate::{compare_to_oracle, kraus_step_error, log_log_slope, qite_trajectory_error, rk4_global_error};
use oqs_lab::{parse_config, run_experiment, simulate};

struct Outcome {
    passed: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            detail: Vec::new(),
        }
    }

    fn at_most(&mut self, label: &str, measured: f64, limit: f64) {
        let ok = measured <= limit;
        self.passed &= ok;
        self.detail.push(format!("{label} {measured:.2e}{}{limit:.0e}", if ok { " ≤ " } else { " > " }));
    }

    fn at_least(&mut self, label: &str, measured: f64, limit: f64) {
        let ok = measured >= limit;
        self.passed &= ok;
        self.detail.push(format!("{label} {measured:.3e}{}{limit:e}", if ok { " ≥ " } else { " < " }));
    }

    fn within(&mut self, label: &str, measured: f64, lo: f64, hi: f64) {
        let ok = (lo..=hi).contains(&measured);
        self.passed &= ok;
        self.detail.push(format!("{label} {measured:.3} {} [{lo}, {hi}]", if ok { "in" } else { "outside" }));
    }

    fn holds(&mut self, label: &str, ok: bool) {
        self.passed &= ok;
        self.detail.push(format!("{label}: {}", if ok { "yes" } else { "NO" }));
    }

    fn error(&mut self, label: &str, e: impl std::fmt::Display) {
        self.passed = false;
        self.detail.push(format!("{label}: error {e}"));
    }

    fn runtime(&mut self, elapsed: Duration, limit: Duration) {
        let ok = elapsed <= limit;
        self.passed &= ok;
        self.detail.push(format!(
            "runtime {:.1}s{}{}s",
            elapsed.as_secs_f64(),
            if ok { " < " } else { " > " },
            limit.as_secs()
        ));
    }
}

fn oracle_gap(text: &str) -> Result<f64, String> {
    let cfg = parse_config(text).map_err(|e| e.to_string())?;
    let series = simulate(&cfg).map_err(|e| e.to_string())?;
    Ok(series
        .records
        .iter()
        .map(|r| (r.value - (-r.time).exp()).abs())
        .fold(0.0, f64::max))
}

fn amplitude_damping_law() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let base = r#""model": {"name": "amplitude_damping", "gamma": 1.0}, "observables": ["excited_population"]"#;
    match oracle_gap(&format!(r#"{{{base}, "method": "oracle_exact", "t_final": 5, "dt": 0.05}}"#)) {
        Ok(g) => o.at_most("oracle_exact", g, 1e-9),
        Err(e) => o.error("oracle_exact", e),
    }
    match oracle_gap(&format!(r#"{{{base}, "method": "oracle_rk4", "t_final": 5, "dt": 0.001}}"#)) {
        Ok(g) => o.at_most("oracle_rk4", g, 1e-6),
        Err(e) => o.error("oracle_rk4", e),
    }
    for m in ["dilation_sznagy", "dilation_stinespring", "dilation_svd", "lcu"] {
        let text = format!(r#"{{{base}, "method": "{m}", "t_final": 1, "dt": 0.05}}"#);
        let at_one = parse_config(&text)
            .map_err(|e| e.to_string())
            .and_then(|c| simulate(&c).map_err(|e| e.to_string()))
            .map(|s| (s.records.last().expect("grid").value - (-1f64).exp()).abs());
        match at_one {
            Ok(g) => o.at_most(m, g, 2e-2),
            Err(e) => o.error(m, e),
        }
    }
    o.runtime(start.elapsed(), Duration::from_secs(10));
    o
}

fn cross_method_equivalence() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let models = ["amplitude_damping", "dephasing", "dissipative_tfim"];
    let methods: [(&str, f64, &str); 6] = [
        ("dilation_sznagy", 0.05, ""),
        ("dilation_stinespring", 0.05, ""),
        ("dilation_svd", 0.05, ""),
        ("lcu", 0.05, ""),
        ("qite", 0.01, ""),
        ("monte_carlo", 0.05, r#", "shots": 10000, "seed": 0"#),
    ];
    for model in models {
        for (method, dt, extra) in methods {
            let text = format!(
                r#"{{"model": {{"name": "{model}"}}, "method": "{method}", "t_final": 2, "dt": {dt}{extra}}}"#
            );
            let label = format!("{method}/{model}");
            match parse_config(&text).map_err(|e| e.to_string()).and_then(|c| compare_to_oracle(&c)) {
                Ok(c) => o.at_most(&label, c.max_ratio, 1.0),
                Err(e) => o.error(&label, e),
            }
        }
    }
    let text = r#"{"model": {"name": "exchange_purification"}, "method": "purification", "t_final": 10, "dt": 0.05}"#;
    match parse_config(text).map_err(|e| e.to_string()).and_then(|c| compare_to_oracle(&c)) {
        Ok(c) => o.at_most("purification/exchange_purification", c.max_ratio, 1.0),
        Err(e) => o.error("purification", e),
    }
    // Only the worst few entries are worth printing.
    let worst = o.detail.clone();
    o.detail = vec![format!("{} method/model pairs, deviation/budget ratios ≤ 1", worst.len())];
    o.detail.extend(worst.into_iter().filter(|d| d.contains('>') || d.contains("error")));
    o.runtime(start.elapsed(), Duration::from_secs(300));
    o
}

fn cptp_suite() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let (mut herm, mut trace, mut lo, mut choi): (f64, f64, f64, f64) = (0.0, 0.0, f64::INFINITY, f64::INFINITY);
    let mut fail = None;
    for s in 0..100u64 {
        let d = 2 + (s as usize % 4);
        let k = 1 + (s as usize % 5).min(d * d - 1);
        let ch = random_channel(10_000 + s, d, k);
        let rho = random_density(20_000 + s, d);
        match ch.apply_matrix(rho.matrix()) {
            Ok(out) => {
                herm = herm.max(out.hermiticity_defect());
                trace = trace.max((out.trace().re - 1.0).abs());
                lo = lo.min(eigh(&out.hermitian_part(), 1e-9).map(|e| e.values[0]).unwrap_or(f64::NEG_INFINITY));
            }
            Err(e) => fail = Some(e.to_string()),
        }
        choi = choi.min(eigh(&ch.choi_matrix_b(), 1e-9).map(|e| e.values[0]).unwrap_or(f64::NEG_INFINITY));
    }
    let (mut lherm, mut ltrace, mut llo): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    for s in 0..100u64 {
        let d = 2 + (s as usize % 3);
        let lind = random_lindbladian(30_000 + s, d, 1 + (s as usize % 3));
        let rho = random_density(40_000 + s, d);
        let times: Vec<f64> = (0..=10).map(|k| 0.3 * k as f64).collect();
        match propagate_exact_grid(&lind, &rho, &times) {
            Ok(states) => {
                for r in states {
                    lherm = lherm.max(r.matrix().hermiticity_defect());
                    ltrace = ltrace.max((r.matrix().trace().re - 1.0).abs());
                    llo = llo.min(eigh(r.matrix(), 1e-9).map(|e| e.values[0]).unwrap_or(f64::NEG_INFINITY));
                }
            }
            Err(e) => fail = Some(e.to_string()),
        }
    }
    if let Some(e) = fail {
        o.error("propagation", e);
    }
    o.at_most("channel Hermiticity", herm, 1e-10);
    o.at_most("channel trace", trace, 1e-10);
    o.at_least("channel min eigenvalue", lo, -1e-9);
    o.at_least("Choi min eigenvalue", choi, -1e-9);
    o.at_most("trajectory Hermiticity", lherm, 1e-10);
    o.at_most("trajectory trace", ltrace, 1e-10);
    o.at_least("trajectory min eigenvalue", llo, -1e-9);
    o.runtime(start.elapsed(), Duration::from_secs(60));
    o
}

fn dilation_unitarity() -> Outcome {
    let mut o = Outcome::new();
    let mut worst: f64 = 0.0;
    let mut repro: f64 = 0.0;
    for s in 0..50u64 {
        let d = 2 + (s as usize % 3);
        let ch = random_channel(50_000 + s, d, 1 + (s as usize % 4));
        for m in ch.kraus_ops() {
            let a = sz_nagy(m).map(|u| unitarity_defect(&u.matrix)).unwrap_or(f64::INFINITY);
            let b = svd_dilate(m).map(|(_, u, _)| unitarity_defect(&u.matrix)).unwrap_or(f64::INFINITY);
            worst = worst.max(a).max(b);
        }
        worst = worst.max(stinespring_stack(&ch).map(|u| unitarity_defect(&u.matrix)).unwrap_or(f64::INFINITY));
        let rho = random_density(60_000 + s, d);
        let via = run_channel_via_dilation(&rho, &ch, DilationMethod::Stinespring);
        let direct = ch.apply(&rho);
        repro = match (via, direct) {
            (Ok(a), Ok(b)) => repro.max(a.matrix().max_abs_diff(b.matrix())),
            _ => f64::INFINITY,
        };
    }
    o.at_most("max ‖U†U − I‖", worst, 1e-10);
    o.at_most("Stinespring reproduction", repro, 1e-9);
    let (mut rlo, mut rhi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in 0..20u64 {
        let m = random_matrix(70_000 + s, 3);
        let err = |e: f64| {
            unitary_decomposition(&m, e)
                .map(|dec| spectral_norm(&(&dec.reconstruct() - &m)))
                .unwrap_or(f64::NAN)
        };
        let ratio = err(0.04) / err(0.02);
        rlo = rlo.min(ratio);
        rhi = rhi.max(ratio);
    }
    o.within("LCU error ratio min", rlo, 3.5, 4.5);
    o.within("LCU error ratio max", rhi, 3.5, 4.5);
    o
}

fn convergence_orders() -> Outcome {
    let mut o = Outcome::new();
    let lind = random_lindbladian(77, 2, 2);
    let rho = random_density(78, 2);
    let dts = [0.01, 0.005, 0.0025, 0.00125];
    match dts.iter().map(|&dt| kraus_step_error(&lind, &rho, dt)).collect::<Result<Vec<_>, _>>() {
        Ok(e) => o.within("kraus_step slope", log_log_slope(&dts, &e), 1.8, 2.2),
        Err(e) => o.error("kraus_step", e),
    }
    let dts = [0.1, 0.05, 0.025, 0.0125];
    match dts.iter().map(|&dt| rk4_global_error(&lind, &rho, 1.0, dt)).collect::<Result<Vec<_>, _>>() {
        Ok(e) => o.within("RK4 slope", log_log_slope(&dts, &e), 3.7, 4.3),
        Err(e) => o.error("RK4", e),
    }
    let ad = oqs_core::models::amplitude_damping_model(1.0, 0.0).expect("valid").lindbladian;
    let dts = [0.02, 0.01];
    match dts
        .iter()
        .map(|&dt| qite_trajectory_error(&ad, &DensityMatrix::basis(2, 1), 1.0, dt))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(e) => o.within("QITE slope", log_log_slope(&dts, &e), 0.8, 1.2),
        Err(e) => o.error("QITE", e),
    }
    o
}

fn variational_closed_form() -> Outcome {
    let mut o = Outcome::new();
    let x = PauliString::parse("X").expect("label");
    let ansatz = Ansatz::single_rotation(x, 0.0).expect("ansatz");
    let chi = |_t: f64| paulis::x().scale(num_complex::Complex64::new(0.0, -1.0));
    let scheme = EomScheme::new(EomVariant::McLachlan, DEFAULT_LAMBDA).expect("scheme");
    match variational_evolve(&ansatz, &chi, num_complex::Complex64::new(1.0, 0.0), &scheme, 1.0, 1e-3) {
        Ok(traj) => {
            o.at_most("|θ(1) − 2|", (traj.thetas.last().expect("steps")[0] - 2.0).abs(), 1e-6);
            o.at_most("M Hermiticity defect", traj.max_m_hermiticity_defect, 1e-10);
            o.at_least("M min eigenvalue", traj.min_m_eigenvalue, -1e-10);
        }
        Err(e) => o.error("evolution", e),
    }
    let mut worst: f64 = 0.0;
    for (n, layers) in [(1, 1), (2, 3), (3, 2)] {
        let a = Ansatz::hardware_efficient(n, layers).expect("ansatz");
        let theta: Vec<f64> = (0..a.n_params()).map(|k| 0.2 + 0.31 * k as f64).collect();
        worst = worst.max(finite_difference_check(&a, &theta, 1e-5).unwrap_or(f64::INFINITY));
    }
    worst = worst.max(finite_difference_check(&ansatz, &[0.7], 1e-5).unwrap_or(f64::INFINITY));
    o.at_most("finite-difference relative error", worst, 1e-7);
    o
}

fn monte_carlo_statistics() -> Outcome {
    let mut o = Outcome::new();
    let model = oqs_core::models::dephasing_model(0.5).expect("model");
    let dt = 0.1;
    let ch = match MixedUnitaryChannel::from_lindbladian(&model.lindbladian, dt) {
        Ok(c) => c,
        Err(e) => {
            o.error("channel", e);
            return o;
        }
    };
    o.holds("sampled channel has ≥ 2 branches", ch.branches().len() >= 2);
    let n_steps = 10;
    let enumerated = enumerate_branches(&ch, &model.initial_state, n_steps);
    let exact = propagate_exact(&model.lindbladian, &model.initial_state, n_steps as f64 * dt);
    match (enumerated, exact) {
        (Ok(a), Ok(b)) => o.at_most("enumerated mean vs exact", a.max_abs_diff(b.matrix()), 1e-12),
        _ => o.error("enumeration", "failed"),
    }
    let obs = [paulis::x()];
    let ns = [1_000usize, 4_000, 16_000, 64_000];
    let mut errs = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        match mc_observables(&ch, &model.initial_state, &obs, 5, n, 900 + i as u64) {
            Ok(s) => errs.push(s.stderrs.last().expect("steps")[0]),
            Err(e) => o.error("sampling", e),
        }
    }
    if errs.len() == ns.len() {
        let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        o.within("stderr exponent", log_log_slope(&x, &errs), -0.55, -0.45);
    }
    o
}

fn application_sanity() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    match exciton_transfer_model(&ExcitonParams::chain(3)) {
        Ok(m) => {
            let times: Vec<f64> = (0..=600).map(|k| m.default_horizon * k as f64 / 600.0).collect();
            match propagate_exact_grid(&m.lindbladian, &m.initial_state, &times) {
                Ok(states) => {
                    let sink = &m.observable("sink_population").expect("observable").matrix;
                    let values: Vec<f64> = states.iter().map(|r| r.expectation(sink)).collect();
                    let drop = values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
                    let trace = states
                        .iter()
                        .map(|r| (r.matrix().trace().re - 1.0).abs())
                        .fold(0.0, f64::max);
                    o.at_most("sink largest decrease", drop, 1e-12);
                    o.at_least("sink at horizon", *values.last().expect("grid"), 0.99);
                    o.at_most("exciton trace error", trace, 1e-10);
                }
                Err(e) => o.error("exciton", e),
            }
        }
        Err(e) => o.error("exciton", e),
    }
    let rp = r#"{"model": {"name": "radical_pair"}, "method": "oracle_rk4", "dt": 0.001, "observables": ["singlet_yield"]}"#;
    match radical_pair_model(0.5, 1.0, 1.0, 1.0) {
        Ok(m) => o.holds("radical pair register ≤ 4 qubits", m.dim() <= 16),
        Err(e) => o.error("radical pair", e),
    }
    let runs = parse_config(rp).map_err(|e| e.to_string()).and_then(|cfg| {
        let rk4 = simulate(&cfg).map_err(|e| e.to_string())?;
        let mut exact_cfg = cfg.clone();
        exact_cfg.method = oqs_lab::Method::OracleExact;
        exact_cfg.dt = 0.05;
        let exact = simulate(&exact_cfg).map_err(|e| e.to_string())?;
        Ok((rk4, exact))
    });
    match runs {
        Ok((rk4, exact)) => {
            let ys: Vec<f64> = exact.records.iter().chain(&rk4.records).map(|r| r.value).collect();
            o.holds("singlet yield in [0, 1]", ys.iter().all(|y| (0.0..=1.0).contains(y)));
            // Compare on the shared 0.05 grid.
            let gap = exact
                .records
                .iter()
                .map(|e| {
                    let k = (e.time / 0.001).round() as usize;
                    (rk4.records[k].value - e.value).abs()
                })
                .fold(0.0, f64::max);
            o.at_most("RK4 vs exact singlet yield", gap, 1e-6);
            let last = exact.records.last().expect("grid").value;
            o.detail.push(format!("yield(∞) ≈ {last:.4}"));
        }
        Err(e) => o.error("radical pair", e),
    }
    o.runtime(start.elapsed(), Duration::from_secs(120));
    o
}

fn determinism() -> Outcome {
    let mut o = Outcome::new();
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => {
            o.error("tempdir", e);
            return o;
        }
    };
    let configs = [
        r#""model": {"name": "dephasing"}, "method": "monte_carlo", "t_final": 1, "dt": 0.05, "shots": 5000, "seed": 42"#,
        r#""model": {"name": "dissipative_tfim"}, "method": "dilation_sznagy", "t_final": 1, "dt": 0.05, "shots": 200, "seed": 7"#,
        r#""model": {"name": "amplitude_damping"}, "method": "qite", "t_final": 0.5, "dt": 0.01"#,
    ];
    for (i, body) in configs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (run, threads) in [(0, 1), (1, 1), (2, 4)] {
            let path = dir.path().join(format!("c{i}_r{run}.csv"));
            let text = format!(r#"{{{body}, "output_path": "{}"}}"#, path.display());
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("pool");
            let result = pool.install(|| {
                parse_config(&text)
                    .map_err(|e| e.to_string())
                    .and_then(|c| run_experiment(&c).map_err(|e| e.to_string()))
            });
            match result.and_then(|_| std::fs::read(&path).map_err(|e| e.to_string())) {
                Ok(bytes) => outputs.push(bytes),
                Err(e) => o.error("run", e),
            }
        }
        if outputs.len() == 3 {
            o.holds(
                &format!("config {i} byte-identical (2 runs, 1 vs 4 threads)"),
                outputs[0] == outputs[1] && outputs[1] == outputs[2],
            );
        }
    }
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("amplitude-damping analytic law", amplitude_damping_law),
        ("cross-method oracle equivalence", cross_method_equivalence),
        ("CPTP invariant suite", cptp_suite),
        ("dilation unitarity and reconstruction", dilation_unitarity),
        ("convergence orders", convergence_orders),
        ("variational single-qubit closed form", variational_closed_form),
        ("Monte Carlo statistics", monte_carlo_statistics),
        ("application sanity", application_sanity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        if !outcome.passed {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail.join("; ")
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
