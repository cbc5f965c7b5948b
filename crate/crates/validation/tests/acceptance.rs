//! Acceptance suite. Prints one line per criterion and exits with status 1 if
//! any criterion fails. Runtime budgets are part of each criterion.
//!
//! Criterion ids given as arguments (`-- C1 C9`) restrict the run to those.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use butterfly::calibration::{
    distort, flux_noise_sigma, gamma_from_sigma_f, predistort, simulate_ramsey_envelope,
    StepResponseModel,
};
use butterfly::lattice::{cross_lattice_9, two_coloring, HamiltonianTerms};
use butterfly::metrology::{
    analytic_expectation, default_time_grid, moments, scaling_sweep, scrambled_branch,
    taylor_expectation, FourierDesign, ProtocolSpec, ScalingConfig, ScalingMode,
};
use butterfly::noise::{default_levels, noisy_butterfly_with, NoiseConfig, NoiseKind};
use butterfly::scrambling::{
    loschmidt_echo, otoc_c_decomposed, otoc_sensitivity_oracle, qubit_resolved_otoc,
    DetuningDisorder, LatticeDynamics,
};
use butterfly::{propagate, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<(bool, String), butterfly::Error>;

/// Rank correlation; the inputs here have no ties.
fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        for (rank, &i) in idx.iter().enumerate() {
            r[i] = rank as f64;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

fn cross_dynamics() -> Arc<LatticeDynamics> {
    let g = cross_lattice_9();
    let terms = HamiltonianTerms::uniform(&g, 5.0);
    Arc::new(LatticeDynamics::new(g, terms).unwrap())
}

fn c1_time_reversal() -> Outcome {
    let d = cross_dynamics();
    let b = two_coloring(d.graph())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let psi = StateVector::random(9, &mut rng)?;
        for t in [10.0, 50.0, 100.0, 200.0] {
            let mut x = propagate(&psi, d.propagator(), t)?;
            x = x.apply_sublattice_z(&b.color_a)?;
            x = propagate(&x, d.propagator(), t)?;
            x = x.apply_sublattice_z(&b.color_a)?;
            worst = worst.max(x.distance(&psi));
        }
    }
    Ok((worst <= 1e-9, format!("max residual {worst:.3e} (≤ 1e-9)")))
}

fn c2_loschmidt() -> Outcome {
    let g = cross_lattice_9();
    let terms = HamiltonianTerms::uniform(&g, 5.0);
    let times = default_time_grid();
    let disorder = DetuningDisorder { sigma_mhz: 3.0, realizations: 200, seed: 2 };
    let curve = loschmidt_echo(&g, &terms, &times, 0, Some(disorder))?;
    let ideal_dev = curve.fidelity_ideal.iter().map(|f| (f - 1.0).abs()).fold(0.0, f64::max);
    let last = *curve.fidelity_mean.last().unwrap();
    let rho = spearman(&times, &curve.fidelity_mean);
    let pass = ideal_dev <= 1e-9 && last < 0.95 && rho < -0.8;
    Ok((
        pass,
        format!(
            "ideal |F-1| {ideal_dev:.1e} (≤ 1e-9), disordered F(200 ns) {last:.4} (< 0.95), Spearman {rho:.3} (< -0.8)"
        ),
    ))
}

fn c3_decomposition() -> Outcome {
    let d = cross_dynamics();
    let worst = (0..100u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(300 + k);
            let psi = StateVector::random(9, &mut rng)?;
            let t = rng.random_range(0.0..=500.0);
            let i = rng.random_range(0..9);
            let j = rng.random_range(0..9);
            let r = otoc_c_decomposed(&d, t, i, j, &psi)?;
            Ok((r.c - (2.0 + r.c_minus - r.c_plus)).abs())
        })
        .collect::<Result<Vec<f64>, butterfly::Error>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((worst <= 1e-9, format!("max |C - (2 + C- - C+)| {worst:.3e} (≤ 1e-9)")))
}

fn c4_oracle_triangle() -> Outcome {
    let base = ProtocolSpec::new(cross_dynamics(), 0.0);
    let design = FourierDesign::new(&base.phi_grid, 9)?;
    let rows = default_time_grid()
        .into_par_iter()
        .map(|t| {
            let spec = base.at_time(t);
            let fringe = butterfly::metrology::run_fringe(&spec)?;
            let slope = design.fit(&fringe.expectations)?.slope.abs();
            let mu = moments(&scrambled_branch(&spec)?.polarization_distribution()).mu;
            let c = qubit_resolved_otoc(&spec.dynamics, t, spec.v_op, &spec.initial_state()?)?;
            let oracle = otoc_sensitivity_oracle(&c)?;
            Ok([slope, 4.5 - mu, oracle])
        })
        .collect::<Result<Vec<[f64; 3]>, butterfly::Error>>()?;
    let worst = rows
        .iter()
        .map(|[a, b, c]| (a - b).abs().max((a - c).abs()).max((b - c).abs()))
        .fold(0.0, f64::max);
    let peak = rows.iter().map(|r| r[0]).fold(f64::MIN, f64::max);
    Ok((
        worst <= 1e-6,
        format!("{} times, max pairwise gap {worst:.3e} (≤ 1e-6), peak |slope| {peak:.6}", rows.len()),
    ))
}

fn fixed_rows(n_list: Vec<usize>) -> Result<Vec<butterfly::metrology::ScalingRow>, butterfly::Error> {
    scaling_sweep(&ScalingConfig::new(n_list, ScalingMode::Fixed(Vec::new())))
}

fn c5_beyond_sql() -> Outcome {
    let row = &fixed_rows(vec![9])?[0];
    let m = row.inv_eta_max;
    Ok((
        m > 3.0 && m <= 4.5,
        format!("max 1/η {m:.6} at t = {} ns (need > 3.0 and ≤ 4.5)", row.t_opt),
    ))
}

fn c6_scaling() -> Outcome {
    let rows = fixed_rows((5..=9).collect())?;
    let above = rows.iter().all(|r| r.inv_eta_max > r.sql);
    let monotone = rows.windows(2).all(|w| w[1].inv_eta_max >= w[0].inv_eta_max - 1e-9);
    let listing: Vec<String> = rows
        .iter()
        .map(|r| format!("N={}: {:.4} vs √N {:.4}", r.n, r.inv_eta_max, r.sql))
        .collect();
    Ok((
        above && monotone,
        format!("{}; above √N: {above}, non-decreasing: {monotone}", listing.join(", ")),
    ))
}

fn c7_taylor_order() -> Outcome {
    let base = ProtocolSpec::new(cross_dynamics(), 0.0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in default_time_grid() {
        let spec = base.at_time(t);
        let m = moments(&scrambled_branch(&spec)?.polarization_distribution());
        let residual = |phi: f64| -> Result<f64, butterfly::Error> {
            Ok((analytic_expectation(&spec, phi)? - taylor_expectation(&m, 9, phi)?).abs())
        };
        let ratio = residual(0.1)? / residual(0.05)?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((
        lo >= 20.0 && hi <= 45.0,
        format!("residual ratio φ=0.1 vs 0.05 over the time grid in [{lo:.3}, {hi:.3}] (need [20, 45])"),
    ))
}

struct LevelPeak {
    sigma: f64,
    peak: f64,
    stderr: f64,
}

fn peaks(kind: NoiseKind, base: &ProtocolSpec, design: &FourierDesign) -> Result<Vec<LevelPeak>, butterfly::Error> {
    let noise = NoiseConfig { realizations: 200, seed: 8, ..NoiseConfig::default() };
    default_levels()
        .into_iter()
        .map(|sigma| {
            let cfg = kind.config(&noise, sigma);
            let curve = default_time_grid()
                .into_iter()
                .map(|t| noisy_butterfly_with(&base.at_time(t), &cfg, design))
                .collect::<Result<Vec<_>, _>>()?;
            let best = curve
                .iter()
                .fold(&curve[0], |b, p| if p.inv_eta_mean > b.inv_eta_mean { p } else { b });
            Ok(LevelPeak { sigma, peak: best.inv_eta_mean, stderr: best.inv_eta_stderr })
        })
        .collect()
}

fn bracket(kind: NoiseKind, levels: &[LevelPeak]) -> (bool, String) {
    let first = &levels[0];
    let last = levels.last().unwrap();
    // Each step may rise by at most the combined 95% bootstrap interval.
    let monotone = levels.windows(2).all(|w| {
        let slack = 1.96 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        w[1].peak <= w[0].peak + slack
    });
    let pass = first.peak > 3.0 && last.peak < 3.0 && monotone;
    let listing: Vec<String> = levels
        .iter()
        .map(|l| format!("{}: {:.4}±{:.4}", l.sigma, l.peak, l.stderr))
        .collect();
    (
        pass,
        format!(
            "{} [{}], > 3.0 at {}: {}, < 3.0 at {}: {}, monotone: {monotone}",
            kind.name(),
            listing.join(", "),
            first.sigma,
            first.peak > 3.0,
            last.sigma,
            last.peak < 3.0
        ),
    )
}

fn c8_robustness() -> Outcome {
    let base = ProtocolSpec::new(cross_dynamics(), 0.0);
    let design = FourierDesign::new(&base.phi_grid, 9)?;
    let (fp, fd) = bracket(NoiseKind::Frequency, &peaks(NoiseKind::Frequency, &base, &design)?);
    let (pp, pd) = bracket(NoiseKind::Phase, &peaks(NoiseKind::Phase, &base, &design)?);
    Ok((fp && pp, format!("{fd}; {pd}")))
}

const FLUX_TABLE: [(&str, f64, f64, f64); 8] = [
    ("Q1", 15.01, 24.525, 137.747),
    ("Q2", 3.74, 27.298, 30.835),
    ("Q3", 3.98, 27.089, 33.049),
    ("Q4", 4.10, 26.153, 35.312),
    ("Q5", 2.39, 26.086, 20.619),
    ("Q6", 2.33, 25.783, 20.348),
    ("Q7", 2.70, 25.866, 23.510),
    ("Q8", 3.60, 24.899, 32.530),
];

fn c9_flux_table() -> Outcome {
    let mut worst = (0.0f64, "");
    for (name, k, a, sigma) in FLUX_TABLE {
        let rel = (flux_noise_sigma(k, a)? / sigma - 1.0).abs();
        if rel > worst.0 {
            worst = (rel, name);
        }
    }
    Ok((
        worst.0 <= 1.5e-3,
        format!("worst relative error {:.3e} ({}) (≤ 1.5e-3)", worst.0, worst.1),
    ))
}

fn c10_ramsey() -> Outcome {
    let times: Vec<f64> = (0..=40).map(|k| 10.0 * k as f64).collect();
    let env = simulate_ramsey_envelope(1.0, &times, 100_000, 10)?;
    let expected = gamma_from_sigma_f(1.0);
    let rel = (env.gamma_per_us / expected - 1.0).abs();
    Ok((
        rel <= 0.03,
        format!("Γ {:.5} vs {expected:.5} /μs, relative {rel:.3e} (≤ 0.03)", env.gamma_per_us),
    ))
}

fn c11_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let model = StepResponseModel::new(rng.random_range(0.0..=0.9), rng.random_range(10.0..=500.0))?;
        let dt = rng.random_range(0.1..2.0);
        let len = rng.random_range(1..=600);
        let wave: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        let back = distort(&predistort(&wave, dt, &model)?, dt, &model)?;
        let scale = wave.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        let err = wave.iter().zip(&back).fold(0.0f64, |m, (w, b)| m.max((w - b).abs()));
        worst = worst.max(err / scale);
    }
    Ok((worst <= 1e-9, format!("max relative error {worst:.3e} (≤ 1e-9)")))
}

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: "C1", title: "time-reversal identity", budget: secs(5), run: c1_time_reversal },
        Criterion { id: "C2", title: "Loschmidt echo, ideal vs disordered", budget: secs(120), run: c2_loschmidt },
        Criterion { id: "C3", title: "OTOC decomposition identity", budget: secs(120), run: c3_decomposition },
        Criterion { id: "C4", title: "slope / moment / OTOC agreement", budget: secs(600), run: c4_oracle_triangle },
        Criterion { id: "C5", title: "beyond-SQL peak sensitivity, N = 9", budget: secs(600), run: c5_beyond_sql },
        Criterion { id: "C6", title: "scaling sweep N = 5..9", budget: secs(1800), run: c6_scaling },
        Criterion { id: "C7", title: "Taylor residual order", budget: secs(60), run: c7_taylor_order },
        Criterion { id: "C8", title: "robustness bracketing", budget: secs(7200), run: c8_robustness },
        Criterion { id: "C9", title: "flux-noise table", budget: secs(1), run: c9_flux_table },
        Criterion { id: "C10", title: "Ramsey dephasing envelope", budget: secs(60), run: c10_ramsey },
        Criterion { id: "C11", title: "predistortion round trip", budget: secs(1), run: c11_round_trip },
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected: Vec<&Criterion> = criteria
        .iter()
        .filter(|c| only.is_empty() || only.iter().any(|o| o.eq_ignore_ascii_case(c.id)))
        .collect();
    let mut failed = Vec::new();
    for c in &selected {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = format!("{:.2} s of {} s", elapsed.as_secs_f64(), c.budget.as_secs());
        let timing = if in_time { timing } else { format!("{timing}, over budget") };
        println!(
            "[{}] {} {}: {} ({})",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            detail,
            timing
        );
        if !ok {
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", selected.len());
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {} of {} criteria failed: {}",
            failed.len(),
            selected.len(),
            failed.join(", ")
        );
        ExitCode::FAILURE
    }
}
