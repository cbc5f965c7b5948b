//! Device calibration fits: flux-line step response, Ramsey dephasing
//! envelopes, dephasing versus flux bias, flux-noise amplitude and the
//! pulse-count phase calibration of `Z` gates.
//!
//! Units: time in ns for waveforms and phase traces, frequencies in MHz for
//! noise widths, dephasing rates in 1/μs, flux in Φ₀.

use std::f64::consts::{PI, SQRT_2, TAU};

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{argument, Error, Result};

const MAX_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-10;

/// Single-pole flux-line response `V_qubit(t) = (1 + A e^{−t/τ}) V_AWG(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResponseModel {
    pub a_coef: f64,
    /// ns
    pub tau: f64,
}

impl StepResponseModel {
    pub fn new(a_coef: f64, tau: f64) -> Result<Self> {
        let m = Self { a_coef, tau };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(argument(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.a_coef.abs() < 1.0) {
            return Err(argument(format!("|A| must be < 1, got {}", self.a_coef)));
        }
        Ok(())
    }

    pub fn gain(&self, t: f64) -> f64 {
        1.0 + self.a_coef * (-t / self.tau).exp()
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(argument(format!("sample spacing must be positive, got {dt}")));
    }
    Ok(())
}

/// Waveform as seen by the qubit when `waveform` is played with spacing `dt`.
pub fn distort(waveform: &[f64], dt: f64, model: &StepResponseModel) -> Result<Vec<f64>> {
    check_dt(dt)?;
    if !(model.tau > 0.0) {
        return Err(argument("tau must be positive"));
    }
    Ok(waveform
        .iter()
        .enumerate()
        .map(|(k, v)| v * model.gain(k as f64 * dt))
        .collect())
}

/// Waveform to play so that the qubit sees `waveform`.
pub fn predistort(waveform: &[f64], dt: f64, model: &StepResponseModel) -> Result<Vec<f64>> {
    check_dt(dt)?;
    model.validate()?;
    Ok(waveform
        .iter()
        .enumerate()
        .map(|(k, v)| v / model.gain(k as f64 * dt))
        .collect())
}

/// Accumulated Ramsey phase `2π s [t + Aτ(1 − e^{−t/τ})]` for nominal
/// detuning `s` in GHz and `t` in ns.
pub fn step_phase(model: &StepResponseModel, sensitivity_ghz: f64, t: f64) -> f64 {
    TAU * sensitivity_ghz * (t + model.a_coef * model.tau * (1.0 - (-t / model.tau).exp()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResponseFit {
    pub model: StepResponseModel,
    pub a_stderr: f64,
    pub tau_stderr: f64,
    /// Correlation between the `A` and `τ` estimates.
    pub correlation: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Residual vector and Jacobian in `(A, ln τ)` for the step-response model.
fn step_residuals(
    t: &[f64],
    phi: &[f64],
    s: f64,
    a: f64,
    log_tau: f64,
) -> (Vec<f64>, Vec<[f64; 2]>) {
    let tau = log_tau.exp();
    let mut r = Vec::with_capacity(t.len());
    let mut j = Vec::with_capacity(t.len());
    for (&ti, &yi) in t.iter().zip(phi) {
        let e = (-ti / tau).exp();
        let model = TAU * s * (ti + a * tau * (1.0 - e));
        r.push(yi - model);
        let d_a = TAU * s * tau * (1.0 - e);
        let d_tau = TAU * s * a * ((1.0 - e) - ti / tau * e);
        j.push([d_a, d_tau * tau]);
    }
    (r, j)
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn normal_equations(r: &[f64], j: &[[f64; 2]]) -> (Matrix2<f64>, Vector2<f64>) {
    let mut jtj = Matrix2::zeros();
    let mut jtr = Vector2::zeros();
    for (ri, ji) in r.iter().zip(j) {
        for p in 0..2 {
            jtr[p] += ji[p] * ri;
            for q in 0..2 {
                jtj[(p, q)] += ji[p] * ji[q];
            }
        }
    }
    (jtj, jtr)
}

/// Damped Gauss–Newton (Levenberg–Marquardt) on a two-parameter model.
///
/// `eval` returns residuals and Jacobian rows at a parameter point. Stops when
/// the relative step falls below [`STEP_TOLERANCE`].
fn levenberg_marquardt(
    mut p: Vector2<f64>,
    eval: impl Fn(&Vector2<f64>) -> (Vec<f64>, Vec<[f64; 2]>),
) -> Result<(Vector2<f64>, usize)> {
    let (mut r, mut j) = eval(&p);
    let mut cost = sum_sq(&r);
    let mut lambda = 1e-3;
    let mut trace = Vec::new();
    for it in 1..=MAX_ITERATIONS {
        trace.push(cost.sqrt());
        if cost == 0.0 {
            return Ok((p, it));
        }
        let (jtj, jtr) = normal_equations(&r, &j);
        loop {
            let mut damped = jtj;
            for d in 0..2 {
                damped[(d, d)] += lambda * jtj[(d, d)].max(1e-300);
            }
            let Some(step) = damped.lu().solve(&jtr) else {
                lambda *= 10.0;
                if lambda > 1e16 {
                    return Ok((p, it));
                }
                continue;
            };
            let candidate = p + step;
            let (rc, jc) = eval(&candidate);
            let cc = sum_sq(&rc);
            let small = step.norm() <= STEP_TOLERANCE * (p.norm() + STEP_TOLERANCE);
            if cc.is_finite() && cc <= cost {
                p = candidate;
                r = rc;
                j = jc;
                cost = cc;
                lambda = (lambda / 10.0).max(1e-12);
                if small {
                    return Ok((p, it));
                }
                break;
            }
            if small {
                return Ok((p, it));
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                // No downhill direction left at this resolution.
                return Ok((p, it));
            }
        }
    }
    Err(Error::Fit(format!(
        "no convergence after {MAX_ITERATIONS} iterations; residual norms {:?}",
        &trace[trace.len().saturating_sub(5)..]
    )))
}

/// Fits `(A, τ)` to a Ramsey phase trace `(t_ns, φ_rad)` recorded during a
/// flux step of nominal detuning `sensitivity_ghz`.
pub fn fit_step_response(t: &[f64], phi: &[f64], sensitivity_ghz: f64) -> Result<StepResponseFit> {
    if t.len() != phi.len() {
        return Err(argument("time and phase columns differ in length"));
    }
    if t.len() < 10 {
        return Err(argument("step-response fit needs at least 10 samples"));
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(argument("sample times must be strictly increasing"));
    }
    if !(sensitivity_ghz != 0.0 && sensitivity_ghz.is_finite()) {
        return Err(argument("nominal sensitivity must be non-zero"));
    }
    let s = sensitivity_ghz;
    // Grid over τ with A solved linearly at each node.
    let t_span = t[t.len() - 1] - t[0];
    let dt_min = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let (lo, hi) = ((dt_min / 10.0).ln(), (t_span * 10.0).ln());
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for k in 0..=400 {
        let log_tau = lo + (hi - lo) * k as f64 / 400.0;
        let tau = log_tau.exp();
        let (mut num, mut den) = (0.0, 0.0);
        for (&ti, &yi) in t.iter().zip(phi) {
            let g = TAU * s * tau * (1.0 - (-ti / tau).exp());
            num += g * (yi - TAU * s * ti);
            den += g * g;
        }
        let a = if den > 0.0 { num / den } else { 0.0 };
        let cost = sum_sq(&step_residuals(t, phi, s, a, log_tau).0);
        if cost < best.0 {
            best = (cost, a, log_tau);
        }
    }
    let eval = |p: &Vector2<f64>| step_residuals(t, phi, s, p[0], p[1]);
    let (p, iterations) = levenberg_marquardt(Vector2::new(best.1, best.2), eval)?;
    let (r, j) = eval(&p);
    let cost = sum_sq(&r);
    let tau = p[1].exp();
    let model = StepResponseModel { a_coef: p[0], tau };
    model
        .validate()
        .map_err(|e| Error::Fit(format!("step response converged outside the model domain: {e}")))?;
    let dof = (t.len() - 2) as f64;
    let (jtj, _) = normal_equations(&r, &j);
    let (a_stderr, tau_stderr, correlation) = match jtj.try_inverse() {
        Some(inv) => {
            let cov = inv * (cost / dof);
            let sa = cov[(0, 0)].max(0.0).sqrt();
            let sl = cov[(1, 1)].max(0.0).sqrt();
            let corr = if sa > 0.0 && sl > 0.0 { cov[(0, 1)] / (sa * sl) } else { 0.0 };
            (sa, sl * tau, corr)
        }
        None => (f64::NAN, f64::NAN, f64::NAN),
    };
    Ok(StepResponseFit {
        model,
        a_stderr,
        tau_stderr,
        correlation,
        residual_norm: cost.sqrt(),
        iterations,
    })
}

/// Monte Carlo Ramsey decay under quasi-static Gaussian frequency noise.
#[derive(Debug, Clone, PartialEq)]
pub struct RamseyEnvelope {
    pub times: Vec<f64>,
    pub envelope: Vec<f64>,
    /// `Γ` of the best `exp(−Γ² t²)` fit, in 1/μs.
    pub gamma_per_us: f64,
}

/// Averages `cos(2π δf t)` over `samples` draws `δf ~ N(0, σ_f²)` and fits
/// `exp(−Γ² t²)` to the points above 0.05 by least squares on the logarithm.
pub fn simulate_ramsey_envelope(
    sigma_f_mhz: f64,
    times: &[f64],
    samples: usize,
    seed: u64,
) -> Result<RamseyEnvelope> {
    if samples < 1000 {
        return Err(argument("Ramsey Monte Carlo needs at least 1000 samples"));
    }
    if !(sigma_f_mhz >= 0.0 && sigma_f_mhz.is_finite()) {
        return Err(argument("sigma_f must be finite and ≥ 0"));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(argument("Ramsey times must be finite and ≥ 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // rad/ns
    let omegas: Vec<f64> = (0..samples)
        .map(|_| TAU * sigma_f_mhz * 1e-3 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let envelope: Vec<f64> = times
        .iter()
        .map(|&t| omegas.iter().map(|w| (w * t).cos()).sum::<f64>() / samples as f64)
        .collect();
    let gamma_per_us = fit_gaussian_decay(times, &envelope)?;
    Ok(RamseyEnvelope {
        times: times.to_vec(),
        envelope,
        gamma_per_us,
    })
}

/// `Γ` in 1/μs from `ln y = −Γ² t²` through the origin.
pub fn fit_gaussian_decay(times_ns: &[f64], envelope: &[f64]) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (&t, &y) in times_ns.iter().zip(envelope) {
        if y > 0.05 && t > 0.0 {
            let tu = t * 1e-3;
            num -= tu * tu * y.ln();
            den += tu.powi(4);
        }
    }
    if den == 0.0 {
        return Err(Error::Fit("no usable points above the 0.05 envelope floor".into()));
    }
    Ok((num / den).max(0.0).sqrt())
}

/// `Γ_φ = 2π σ_f / √2` in 1/μs for `σ_f` in MHz.
pub fn gamma_from_sigma_f(sigma_f_mhz: f64) -> f64 {
    TAU * sigma_f_mhz / SQRT_2
}

/// `Γ_φ(Φ) = √(Γ_i² + (k|Φ|)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingFitModel {
    /// Intrinsic rate, 1/μs.
    pub gamma_i: f64,
    /// MHz per Φ₀.
    pub k: f64,
    pub residual_norm: f64,
}

impl DephasingFitModel {
    pub fn rate(&self, flux: f64) -> f64 {
        self.gamma_i.hypot(self.k * flux)
    }
}

/// Least squares of `Γ_φ = √(Γ_i² + (k|Φ|)²)` to `(Φ, Γ)` points.
///
/// A linear fit of `Γ²` against `Φ²` supplies the starting point.
pub fn fit_gamma_vs_flux(flux: &[f64], gamma: &[f64]) -> Result<DephasingFitModel> {
    if flux.len() != gamma.len() {
        return Err(argument("flux and rate columns differ in length"));
    }
    if flux.len() < 3 {
        return Err(argument("dephasing fit needs at least 3 points"));
    }
    let x: Vec<f64> = flux.iter().map(|f| f * f).collect();
    let mean_x = x.iter().sum::<f64>() / x.len() as f64;
    let sxx: f64 = x.iter().map(|v| (v - mean_x).powi(2)).sum();
    if !(sxx > 1e-12 * mean_x.max(1e-300).powi(2)) {
        return Err(Error::Fit("all points share the same |Φ|".into()));
    }
    let y: Vec<f64> = gamma.iter().map(|g| g * g).collect();
    let mean_y = y.iter().sum::<f64>() / y.len() as f64;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mean_x) * (b - mean_y)).sum();
    let slope = (sxy / sxx).max(0.0);
    let intercept = (mean_y - slope * mean_x).max(0.0);

    let eval = |p: &Vector2<f64>| {
        let mut r = Vec::with_capacity(flux.len());
        let mut j = Vec::with_capacity(flux.len());
        for (&f, &g) in flux.iter().zip(gamma) {
            let m = p[0].hypot(p[1] * f).max(1e-300);
            r.push(g - m);
            j.push([p[0] / m, p[1] * f * f / m]);
        }
        (r, j)
    };
    let (p, _) = levenberg_marquardt(Vector2::new(intercept.sqrt(), slope.sqrt()), eval)?;
    let residual_norm = sum_sq(&eval(&p).0).sqrt();
    Ok(DephasingFitModel {
        gamma_i: p[0].abs(),
        k: p[1].abs(),
        residual_norm,
    })
}

/// Inverted parabola `f(Φ) = −(A/2)Φ² + c` around the sweet spot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxDispersion {
    /// GHz/Φ₀²
    pub a_curv: f64,
    /// GHz
    pub c: f64,
}

impl FluxDispersion {
    pub fn frequency(&self, flux: f64) -> f64 {
        -0.5 * self.a_curv * flux * flux + self.c
    }

    /// `|∂f/∂Φ| = A|Φ|` in GHz/Φ₀.
    pub fn slope(&self, flux: f64) -> f64 {
        self.a_curv * flux.abs()
    }
}

/// `σ_Φ = √2 k / (2π A)` in μΦ₀, for `k` in MHz/Φ₀ and `A` in GHz/Φ₀².
pub fn flux_noise_sigma(k_mhz: f64, a_curv_ghz: f64) -> Result<f64> {
    if !(a_curv_ghz > 0.0) {
        return Err(argument(format!("curvature must be positive, got {a_curv_ghz}")));
    }
    let a_mhz = a_curv_ghz * 1e3;
    Ok(SQRT_2 * k_mhz / (TAU * a_mhz) * 1e6)
}

/// Folds an angle into `(−π, π]`. Values within round-off of `−π` map to `π`.
pub fn fold_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    let y = if y > PI { y - TAU } else { y };
    if (y + PI).abs() < 1e-12 {
        PI
    } else {
        y
    }
}

/// Phase-per-pulse estimate for one pulse count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZGatePoint {
    pub n_pulses: usize,
    /// Fitted total phase, folded to `(−π, π]`.
    pub accumulated_phase: f64,
    /// Folded to `(−π, π]`.
    pub phase_per_pulse: f64,
}

/// Optional readout noise for [`zgate_phase_series`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeNoise {
    /// Standard deviation of additive Gaussian noise on each probability.
    pub sigma: f64,
    pub seed: u64,
}

const ZGATE_FRINGE_POINTS: usize = 24;

/// Simulates Ramsey fringes `P(θ) = ½(1 + cos(θ − Nφ))` for each odd pulse
/// count `N`, fits the fringe phase, and unwraps `Nφ` against the previous
/// per-pulse estimate so that the series converges to `φ` folded to `(−π, π]`.
pub fn zgate_phase_series(
    n_pulses_list: &[usize],
    phase_per_pulse: f64,
    noise: Option<FringeNoise>,
) -> Result<Vec<ZGatePoint>> {
    if let Some(n) = n_pulses_list.iter().find(|n| *n % 2 == 0) {
        return Err(argument(format!("pulse counts must be odd, got {n}")));
    }
    if !phase_per_pulse.is_finite() {
        return Err(argument("phase per pulse must be finite"));
    }
    let mut rng = noise.map(|n| ChaCha8Rng::seed_from_u64(n.seed));
    let thetas: Vec<f64> = (0..ZGATE_FRINGE_POINTS)
        .map(|k| TAU * k as f64 / ZGATE_FRINGE_POINTS as f64)
        .collect();
    let mut previous: Option<f64> = None;
    let mut out = Vec::with_capacity(n_pulses_list.len());
    for &n in n_pulses_list {
        let total = n as f64 * phase_per_pulse;
        // Projections onto cos θ and sin θ; the grid is uniform so the basis
        // is orthogonal and these are the least-squares amplitudes.
        let (mut b, mut c) = (0.0, 0.0);
        for &th in &thetas {
            let mut p = 0.5 * (1.0 + (th - total).cos());
            if let (Some(r), Some(nz)) = (rng.as_mut(), noise) {
                p += nz.sigma * r.sample::<f64, _>(StandardNormal);
            }
            b += p * th.cos();
            c += p * th.sin();
        }
        let acc = c.atan2(b);
        let nf = n as f64;
        let estimate = match previous {
            None => acc / nf,
            Some(prev) => {
                let m = ((prev * nf - acc) / TAU).round();
                (acc + TAU * m) / nf
            }
        };
        previous = Some(estimate);
        out.push(ZGatePoint {
            n_pulses: n,
            accumulated_phase: fold_phase(acc),
            phase_per_pulse: fold_phase(estimate),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distortion_examples() {
        let m = StepResponseModel::new(0.1, 50.0).unwrap();
        let step = vec![1.0; 2000];
        let d = distort(&step, 1.0, &m).unwrap();
        assert!((d[0] - 1.1).abs() < 1e-15);
        assert!((d[1999] - 1.0).abs() < 1e-15);
        let p = predistort(&step, 1.0, &m).unwrap();
        assert!((p[0] - 1.0 / 1.1).abs() < 1e-15);
        let id = StepResponseModel::new(0.0, 50.0).unwrap();
        assert_eq!(distort(&step, 1.0, &id).unwrap(), step);
        assert_eq!(distort(&[0.0; 5], 1.0, &m).unwrap(), vec![0.0; 5]);
        assert!(StepResponseModel::new(1.0, 50.0).is_err());
        assert!(predistort(&step, 0.0, &m).is_err());
    }

    #[test]
    fn flux_noise_rows() {
        assert!((flux_noise_sigma(3.74, 27.298).unwrap() - 30.835).abs() / 30.835 < 1e-3);
        assert!((flux_noise_sigma(2.33, 25.783).unwrap() - 20.348).abs() / 20.348 < 1e-3);
        assert_eq!(flux_noise_sigma(0.0, 25.0).unwrap(), 0.0);
        assert!(flux_noise_sigma(1.0, 0.0).is_err());
    }

    #[test]
    fn step_fit_round_trip() {
        let truth = StepResponseModel::new(0.08, 120.0).unwrap();
        let s = 0.01;
        let t: Vec<f64> = (0..=100).map(|k| 4.0 * k as f64).collect();
        let phi: Vec<f64> = t.iter().map(|&ti| step_phase(&truth, s, ti)).collect();
        let fit = fit_step_response(&t, &phi, s).unwrap();
        assert!((fit.model.a_coef - 0.08).abs() / 0.08 < 0.01);
        assert!((fit.model.tau - 120.0).abs() / 120.0 < 0.01);

        let flat = StepResponseModel::new(0.0, 120.0).unwrap();
        let phi0: Vec<f64> = t.iter().map(|&ti| step_phase(&flat, s, ti)).collect();
        assert!(fit_step_response(&t, &phi0, s).unwrap().model.a_coef.abs() <= 0.005);
        assert!(fit_step_response(&t[..5], &phi0[..5], s).is_err());
        // No phase at all is only matched by A → −1, τ → ∞.
        let zero = vec![0.0; t.len()];
        assert!(matches!(fit_step_response(&t, &zero, s), Err(Error::Fit(_))));
    }

    #[test]
    fn gamma_fit_round_trip() {
        let flux: Vec<f64> = (1..=12).map(|k| 0.01 * k as f64).collect();
        let truth = DephasingFitModel { gamma_i: 0.1, k: 3.74, residual_norm: 0.0 };
        let gamma: Vec<f64> = flux.iter().map(|&f| truth.rate(f)).collect();
        let fit = fit_gamma_vs_flux(&flux, &gamma).unwrap();
        assert!((fit.gamma_i - 0.1).abs() / 0.1 < 0.01);
        assert!((fit.k - 3.74).abs() / 3.74 < 0.01);

        let line: Vec<f64> = flux.iter().map(|f| 2.5 * f).collect();
        let fit = fit_gamma_vs_flux(&flux, &line).unwrap();
        assert!((fit.k - 2.5).abs() < 1e-6);
        assert!(fit.gamma_i < 1e-3);

        assert!(fit_gamma_vs_flux(&[0.1, -0.1, 0.1], &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn ramsey_quiet_and_gaussian() {
        let times: Vec<f64> = (0..=40).map(|k| 10.0 * k as f64).collect();
        let flat = simulate_ramsey_envelope(0.0, &times, 1000, 1).unwrap();
        assert!(flat.envelope.iter().all(|&e| (e - 1.0).abs() < 1e-15));
        assert!(simulate_ramsey_envelope(1.0, &times, 10, 1).is_err());
    }

    #[test]
    fn zgate_series() {
        let ns = [1, 3, 5, 7, 9, 11];
        for p in zgate_phase_series(&ns, PI, None).unwrap() {
            assert!((p.phase_per_pulse - PI).abs() < 1e-9, "{p:?}");
        }
        for p in zgate_phase_series(&ns, 0.0, None).unwrap() {
            assert!(p.phase_per_pulse.abs() < 1e-12);
        }
        let target = fold_phase(PI + 0.02);
        let series = zgate_phase_series(&ns, PI + 0.02, None).unwrap();
        assert!((series.last().unwrap().phase_per_pulse - target).abs() < 1e-9);
        assert!(zgate_phase_series(&[1, 2], PI, None).is_err());
    }

    #[test]
    fn folding() {
        assert_eq!(fold_phase(-PI), PI);
        assert!((fold_phase(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
        assert!((fold_phase(0.5) - 0.5).abs() < 1e-15);
    }
}
