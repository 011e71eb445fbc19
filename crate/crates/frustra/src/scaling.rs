//! Coupling sweeps, power-law fits, critical-exponent reports and
//! finite-difference diagnostics of the ground-state energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::model::{energy_hessian, HoppingSign, ModelParams};
use crate::solver::{critical_modes_of, solve_ground_state, CriticalModes, Phase, SolverOptions};
use crate::spectra::{
    build_quadratic_hamiltonian, covariance, photon_number, squeezing_variance,
    williamson_diagonalize,
};

/// Minimum coefficient of determination for an accepted fit.
pub const MIN_R_SQUARED: f64 = 0.995;
pub const MIN_FIT_POINTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Gaps,
    PhotonNumbers,
    Squeezing,
    HessianEigenvalues,
    Energy,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::Gaps,
        Observable::PhotonNumbers,
        Observable::Squeezing,
        Observable::HessianEigenvalues,
        Observable::Energy,
    ];
}

/// Range of reduced coupling |g − g_c|/g_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::Validation(format!("window needs 0 < lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    /// Default sweep and fit range in reduced coupling.
    pub fn default_range() -> Self {
        Window { lo: 1e-4, hi: 1e-2 }
    }

    pub fn contains(&self, x: f64) -> bool {
        // tolerate the rounding of log-spaced grid points at the edges
        x >= self.lo * (1.0 - 1e-9) && x <= self.hi * (1.0 + 1e-9)
    }
}

/// Log-spaced reduced couplings from `lo` to `hi` inclusive.
pub fn log_grid(window: Window, per_decade: usize) -> Vec<f64> {
    let decades = (window.hi / window.lo).log10();
    let count = ((decades * per_decade as f64).round() as usize).max(1);
    (0..=count)
        .map(|i| window.lo * 10f64.powf(decades * i as f64 / count as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub params: ModelParams,
    pub hopping_sign: HoppingSign,
    pub grid: Vec<f64>,
    pub observables: Vec<Observable>,
}

impl SweepSpec {
    pub fn new(params: ModelParams, grid: Vec<f64>, observables: Vec<Observable>) -> Result<Self> {
        let gc = params.critical_coupling()?;
        if grid.is_empty() {
            return Err(Error::Validation("empty sweep grid".into()));
        }
        if grid.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::Validation("grid values must be finite and non-negative".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("grid must be strictly increasing".into()));
        }
        if grid.contains(&gc) {
            return Err(Error::Validation(format!("grid must exclude the critical point {gc}")));
        }
        Ok(SweepSpec { params, hopping_sign: params.hopping_sign(), grid, observables })
    }

    /// Log-spaced grid on both sides of g_c.
    pub fn around_critical(
        params: ModelParams,
        window: Window,
        per_decade: usize,
        observables: Vec<Observable>,
    ) -> Result<Self> {
        let gc = params.critical_coupling()?;
        let xs = log_grid(window, per_decade);
        let mut grid: Vec<f64> = xs.iter().rev().map(|x| gc * (1.0 - x)).collect();
        grid.extend(xs.iter().map(|x| gc * (1.0 + x)));
        Self::new(params, grid, observables)
    }
}

/// Everything computed at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    pub g: f64,
    pub reduced_coupling: f64,
    pub phase: Phase,
    pub energy: f64,
    pub alphas: Vec<f64>,
    pub gaps: Vec<f64>,
    pub photon_numbers: Vec<f64>,
    pub squeezing: Vec<f64>,
    pub hessian_eigenvalues: Vec<f64>,
    /// (λ_MF, λ_F) from the parity sectors, frustrated phase only.
    pub critical_curvatures: Option<(f64, f64)>,
    pub critical_regime: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub g: f64,
    pub reduced_coupling: f64,
    pub observable: String,
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingPoint {
    pub g: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub points: Vec<PointResult>,
    pub missing: Vec<MissingPoint>,
    pub warnings: Vec<String>,
    pub observables: Vec<Observable>,
}

fn evaluate_point(params: &ModelParams, gc: f64, warm: Option<Vec<f64>>) -> Result<(PointResult, Vec<String>)> {
    let opts = SolverOptions { warm_start: warm, ..Default::default() };
    let sol = solve_ground_state(params, &opts)?;
    let mut warnings = sol.warnings.clone();
    let form = build_quadratic_hamiltonian(&sol, params)?;
    let decomp = williamson_diagonalize(&form)?;
    let cov = covariance(&decomp);
    let n = params.n_sites();
    let photon_numbers = (0..n).map(|s| photon_number(&cov, s)).collect::<Result<Vec<_>>>()?;
    let squeezing = (0..n).map(|s| squeezing_variance(&cov, s)).collect::<Result<Vec<_>>>()?;
    let hess = energy_hessian(&sol.config.alphas, params.g(), params.jbar())?;
    let mut hessian_eigenvalues: Vec<f64> = eigh(hess)?.eigenvalues.iter().copied().collect();
    hessian_eigenvalues.sort_by(f64::total_cmp);
    let critical_curvatures = if sol.phase == Phase::FrustratedSuperradiant {
        let CriticalModes { lambda_mf, lambda_f, .. } = critical_modes_of(&sol, params)?;
        Some((lambda_mf, lambda_f))
    } else {
        None
    };
    if decomp.critical_regime {
        warnings.push(format!("g = {}: critical regime, smallest gap {:e}", params.g(), decomp.symplectic_eigenvalues[0]));
    }
    Ok((
        PointResult {
            g: params.g(),
            reduced_coupling: (params.g() - gc).abs() / gc,
            phase: sol.phase,
            energy: sol.config.energy,
            alphas: sol.config.alphas.clone(),
            gaps: decomp.symplectic_eigenvalues.clone(),
            photon_numbers,
            squeezing,
            hessian_eigenvalues,
            critical_curvatures,
            critical_regime: decomp.critical_regime,
        },
        warnings,
    ))
}

type SideOutcome = Vec<(f64, std::result::Result<(PointResult, Vec<String>), Error>)>;

/// Walks grid points in the given order, seeding each solve from the last
/// successful one.
fn run_chain(base: &ModelParams, gc: f64, gs: &[f64]) -> SideOutcome {
    let mut warm: Option<Vec<f64>> = None;
    let mut out = Vec::with_capacity(gs.len());
    for &g in gs {
        let res = base.with_g(g).and_then(|p| evaluate_point(&p, gc, warm.clone()));
        if let Ok((pt, _)) = &res {
            warm = Some(pt.alphas.clone());
        }
        out.push((g, res));
    }
    out
}

/// Solves and diagonalizes at every grid point. The two sides of g_c run
/// concurrently, each as an ordered chain moving towards the critical point.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let gc = spec.params.critical_coupling()?;
    let below: Vec<f64> = spec.grid.iter().copied().filter(|g| *g < gc).collect();
    let above: Vec<f64> = spec.grid.iter().rev().copied().filter(|g| *g > gc).collect();
    let (lo, hi) = rayon::join(
        || run_chain(&spec.params, gc, &below),
        || run_chain(&spec.params, gc, &above),
    );
    let mut all: SideOutcome = lo.into_iter().chain(hi).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut result = SweepResult {
        points: Vec::new(),
        missing: Vec::new(),
        warnings: Vec::new(),
        observables: spec.observables.clone(),
    };
    for (g, res) in all {
        match res {
            Ok((pt, w)) => {
                result.warnings.extend(w);
                result.points.push(pt);
            }
            Err(e) => result.missing.push(MissingPoint { g, reason: e.to_string() }),
        }
    }
    Ok(result)
}

impl SweepResult {
    /// Long-format table, one row per (g, observable, index). Indices of
    /// sites and modes are 1-based; scalar observables use index 0.
    pub fn rows(&self) -> Vec<Row> {
        let mut rows = Vec::new();
        for p in &self.points {
            let mut push = |name: &str, index: usize, value: f64| {
                rows.push(Row {
                    g: p.g,
                    reduced_coupling: p.reduced_coupling,
                    observable: name.to_string(),
                    index,
                    value,
                })
            };
            for obs in &self.observables {
                match obs {
                    Observable::Gaps => {
                        p.gaps.iter().enumerate().for_each(|(k, v)| push("gap", k + 1, *v));
                    }
                    Observable::PhotonNumbers => {
                        p.photon_numbers.iter().enumerate().for_each(|(k, v)| push("photon_number", k + 1, *v));
                    }
                    Observable::Squeezing => {
                        p.squeezing.iter().enumerate().for_each(|(k, v)| push("squeezing", k + 1, *v));
                    }
                    Observable::HessianEigenvalues => {
                        p.hessian_eigenvalues
                            .iter()
                            .enumerate()
                            .for_each(|(k, v)| push("hessian_eigenvalue", k + 1, *v));
                        if let Some((mf, f)) = p.critical_curvatures {
                            push("lambda_mf", 0, mf);
                            push("lambda_f", 0, f);
                        }
                    }
                    Observable::Energy => push("energy", 0, p.energy),
                }
            }
        }
        rows
    }

    /// Points strictly above (true) or below (false) the critical coupling.
    pub fn side(&self, above: bool, gc: f64) -> impl Iterator<Item = &PointResult> {
        self.points.iter().filter(move |p| (p.g > gc) == above)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub window: Window,
}

/// Least-squares line through (log x, log y) without the quality gate.
pub fn fit_log_log(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::Domain(format!(
            "need at least {MIN_FIT_POINTS} points, got {}",
            points.len()
        )));
    }
    if let Some((x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::Domain(format!("power-law fit needs positive data, got ({x}, {y})")));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(0.0, f64::max);
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
        window: Window { lo, hi },
    })
}

/// Fits y = A x^γ and rejects fits with r² below [`MIN_R_SQUARED`].
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let fit = fit_log_log(points)?;
    if fit.r_squared < MIN_R_SQUARED {
        return Err(Error::FitQuality { r_squared: fit.r_squared });
    }
    Ok(fit)
}

/// A critical exponent as a positive magnitude: gaps and curvatures vanish
/// as x^γ, populations and variances diverge as x^−γ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub quantity: String,
    pub index: usize,
    pub exponent: f64,
    pub fit: PowerLawFit,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteRole {
    Unpaired,
    Paired,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteExponent {
    pub site: usize,
    pub role: SiteRole,
    pub photon: ExponentFit,
    pub squeezing: ExponentFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            expected,
            tolerance,
            pass: (measured - expected).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    pub n_sites: usize,
    pub jbar: f64,
    pub window: Window,
    pub phase_above: Phase,
    /// Mean-field gap exponent on the superradiant side.
    pub gamma_mf: ExponentFit,
    /// Frustrated gap exponent, frustrated phase only.
    pub gamma_f: Option<ExponentFit>,
    /// Lowest gap on the normal side.
    pub normal_gap: ExponentFit,
    pub sites: Vec<SiteExponent>,
    pub hessian_mf: Option<ExponentFit>,
    pub hessian_f: Option<ExponentFit>,
    pub checks: Vec<Check>,
    /// Set for N > 7, beyond the lattice sizes with published exponents.
    pub unvalidated: bool,
    pub missing: Vec<MissingPoint>,
    pub warnings: Vec<String>,
}

impl ExponentReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn rejected_fits(&self) -> Vec<&ExponentFit> {
        let mut all: Vec<&ExponentFit> = vec![&self.gamma_mf, &self.normal_gap];
        all.extend(self.gamma_f.iter());
        all.extend(self.hessian_mf.iter());
        all.extend(self.hessian_f.iter());
        for s in &self.sites {
            all.push(&s.photon);
            all.push(&s.squeezing);
        }
        all.into_iter().filter(|f| !f.accepted).collect()
    }
}

/// Tolerance on the frustrated exponent (N−1)/2: 0.05 per unit of (N−1)/2.
pub fn frustrated_tolerance(n_sites: usize) -> f64 {
    0.05 * (n_sites - 1) as f64 / 2.0
}

pub const MEAN_FIELD_TOLERANCE: f64 = 0.03;

fn exponent_of<'a>(
    quantity: &str,
    index: usize,
    pts: impl Iterator<Item = &'a PointResult>,
    value: impl Fn(&PointResult) -> f64,
    diverging: bool,
) -> Result<ExponentFit> {
    let data: Vec<(f64, f64)> = pts.map(|p| (p.reduced_coupling, value(p))).collect();
    let fit = fit_log_log(&data)?;
    let exponent = if diverging { -fit.exponent } else { fit.exponent };
    Ok(ExponentFit {
        quantity: quantity.to_string(),
        index,
        exponent,
        accepted: fit.r_squared >= MIN_R_SQUARED,
        fit,
    })
}

/// Sweeps both sides of g_c across `window`, fits every observable and
/// checks the expected exponent structure.
pub fn extract_exponents(base: &ModelParams, window: Window, per_decade: usize) -> Result<ExponentReport> {
    let spec = SweepSpec::around_critical(*base, window, per_decade, Observable::ALL.to_vec())?;
    let sweep = run_sweep(&spec)?;
    let gc = base.critical_coupling()?;
    let n = base.n_sites();
    let above: Vec<&PointResult> = sweep.side(true, gc).filter(|p| window.contains(p.reduced_coupling)).collect();
    let below: Vec<&PointResult> = sweep.side(false, gc).filter(|p| window.contains(p.reduced_coupling)).collect();
    let phase_above = above
        .first()
        .map(|p| p.phase)
        .ok_or(Error::Convergence { residual: f64::NAN })?;
    let frustrated = phase_above == Phase::FrustratedSuperradiant;

    let normal_gap = exponent_of("normal_gap", 1, below.iter().copied(), |p| p.gaps[0], false)?;
    let (gamma_mf, gamma_f) = if frustrated {
        (
            exponent_of("gap_mf", 2, above.iter().copied(), |p| p.gaps[1], false)?,
            Some(exponent_of("gap_f", 1, above.iter().copied(), |p| p.gaps[0], false)?),
        )
    } else {
        (exponent_of("gap_mf", 1, above.iter().copied(), |p| p.gaps[0], false)?, None)
    };

    let mut sites = Vec::with_capacity(n);
    for s in 0..n {
        let role = match (frustrated, s) {
            (false, _) => SiteRole::Uniform,
            (true, 0) => SiteRole::Unpaired,
            (true, _) => SiteRole::Paired,
        };
        sites.push(SiteExponent {
            site: s + 1,
            role,
            photon: exponent_of("photon_number", s + 1, above.iter().copied(), |p| p.photon_numbers[s], true)?,
            squeezing: exponent_of("squeezing", s + 1, above.iter().copied(), |p| p.squeezing[s], true)?,
        });
    }

    let (hessian_mf, hessian_f) = if frustrated {
        let curv = |p: &PointResult| p.critical_curvatures.unwrap_or((f64::NAN, f64::NAN));
        (
            Some(exponent_of("lambda_mf", 0, above.iter().copied(), |p| curv(p).0, false)?),
            Some(exponent_of("lambda_f", 0, above.iter().copied(), |p| curv(p).1, false)?),
        )
    } else {
        (None, None)
    };

    let half_n = (n - 1) as f64 / 2.0;
    let tol_f = frustrated_tolerance(n);
    let mut checks = vec![
        Check::new("gamma_mf", gamma_mf.exponent, 0.5, MEAN_FIELD_TOLERANCE),
        Check::new("normal_gap", normal_gap.exponent, 0.5, MEAN_FIELD_TOLERANCE),
    ];
    if let Some(gf) = &gamma_f {
        checks.push(Check::new("gamma_f", gf.exponent, half_n, tol_f));
    }
    for s in &sites {
        let (expected, tol) = match s.role {
            SiteRole::Paired => (half_n, tol_f),
            _ => (0.5, MEAN_FIELD_TOLERANCE),
        };
        checks.push(Check::new(format!("photon_site{}", s.site), s.photon.exponent, expected, tol));
        checks.push(Check::new(format!("squeezing_site{}", s.site), s.squeezing.exponent, expected, tol));
    }
    if let (Some(hm), Some(hf), Some(gf)) = (&hessian_mf, &hessian_f, &gamma_f) {
        let tol_lf = 0.1 * half_n;
        checks.push(Check::new("lambda_mf", hm.exponent, 1.0, 0.05));
        checks.push(Check::new("lambda_f", hf.exponent, (n - 1) as f64, tol_lf));
        checks.push(Check::new("sqrt_lambda_mf_vs_gap", hm.exponent / 2.0, gamma_mf.exponent, MEAN_FIELD_TOLERANCE + 0.025));
        checks.push(Check::new("sqrt_lambda_f_vs_gap", hf.exponent / 2.0, gf.exponent, tol_f + tol_lf / 2.0));
    }

    Ok(ExponentReport {
        n_sites: n,
        jbar: base.jbar(),
        window,
        phase_above,
        gamma_mf,
        gamma_f,
        normal_gap,
        sites,
        hessian_mf,
        hessian_f,
        checks,
        unvalidated: n > 7,
        missing: sweep.missing,
        warnings: sweep.warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    G,
    Jbar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeRow {
    pub x: f64,
    pub energy: f64,
    pub first: f64,
    pub second: f64,
}

/// A jump in one derivative between its one-sided limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jump {
    pub location: f64,
    pub left_limit: f64,
    pub right_limit: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeDiagnostics {
    pub axis: Axis,
    pub rows: Vec<DerivativeRow>,
    /// Grid interval holding the largest change of the lowest discontinuous
    /// derivative.
    pub detected_interval: (f64, f64),
    /// 1 for a first-derivative jump, 2 for a second-derivative jump.
    pub order: u8,
    pub first: Jump,
    pub second: Jump,
}

/// Finite-difference step in the swept variable.
pub const FD_STEP: f64 = 1e-4;

fn energy_at(base: &ModelParams, axis: Axis, x: f64) -> Result<f64> {
    let p = match axis {
        Axis::G => base.with_g(x)?,
        Axis::Jbar => base.with_jbar(x)?,
    };
    Ok(solve_ground_state(&p, &SolverOptions::default())?.config.energy)
}

/// Central differences at step h and h/2, combined by one Richardson step.
fn derivatives(base: &ModelParams, axis: Axis, x: f64, h: f64) -> Result<DerivativeRow> {
    let e = |t: f64| energy_at(base, axis, t);
    let e0 = e(x)?;
    let (ep, em) = (e(x + h)?, e(x - h)?);
    let (ep2, em2) = (e(x + h / 2.0)?, e(x - h / 2.0)?);
    let d1_h = (ep - em) / (2.0 * h);
    let d1_h2 = (ep2 - em2) / h;
    let d2_h = (ep - 2.0 * e0 + em) / (h * h);
    let d2_h2 = (ep2 - 2.0 * e0 + em2) / (h * h / 4.0);
    Ok(DerivativeRow {
        x,
        energy: e0,
        first: (4.0 * d1_h2 - d1_h) / 3.0,
        second: (4.0 * d2_h2 - d2_h) / 3.0,
    })
}

/// Value at `at` of the least-squares line through (x, y).
fn extrapolate(points: &[(f64, f64)], at: f64) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    my + slope * (at - mx)
}

fn jump_at(rows_left: &[DerivativeRow], rows_right: &[DerivativeRow], at: f64, pick: fn(&DerivativeRow) -> f64) -> Jump {
    let l: Vec<(f64, f64)> = rows_left.iter().map(|r| (r.x, pick(r))).collect();
    let r: Vec<(f64, f64)> = rows_right.iter().map(|r| (r.x, pick(r))).collect();
    let left_limit = extrapolate(&l, at);
    let right_limit = extrapolate(&r, at);
    Jump { location: at, left_limit, right_limit, magnitude: right_limit - left_limit }
}

/// Scans the energy along `axis` around its phase boundary (the critical
/// coupling for the g axis, zero hopping for the J̄ axis), locates the
/// derivative discontinuity on a coarse grid, and estimates the one-sided
/// limits of the first and second derivatives by linear extrapolation from
/// stencils that stay on one side.
pub fn energy_derivative_diagnostics(base: &ModelParams, axis: Axis) -> Result<DerivativeDiagnostics> {
    let h = FD_STEP;
    let (center, spacing) = match axis {
        Axis::G => {
            let gc = base.critical_coupling()?;
            (gc, 1e-3 * gc)
        }
        Axis::Jbar => (0.0, 2.5e-3),
    };
    // offsets by half a spacing keep every stencil off the boundary
    let half = 20;
    let coarse: Vec<f64> = (-half..half).map(|i| center + (i as f64 + 0.5) * spacing).collect();
    let mut rows = coarse
        .iter()
        .map(|&x| derivatives(base, axis, x, h))
        .collect::<Result<Vec<_>>>()?;

    // the lowest-order derivative with an outlying jump decides the order
    let jumps = |pick: fn(&DerivativeRow) -> f64| -> (usize, f64, f64) {
        let diffs: Vec<f64> = rows.windows(2).map(|w| (pick(&w[1]) - pick(&w[0])).abs()).collect();
        let (i, biggest) = diffs
            .iter()
            .enumerate()
            .fold((0, 0.0), |b, (i, d)| if *d > b.1 { (i, *d) } else { b });
        let mut sorted = diffs.clone();
        sorted.sort_by(f64::total_cmp);
        (i, biggest, sorted[sorted.len() / 2])
    };
    let (i1, big1, med1) = jumps(|r| r.first);
    let (i2, _, _) = jumps(|r| r.second);
    let order = if big1 > 20.0 * med1.max(1e-12) { 1 } else { 2 };
    let i = if order == 1 { i1 } else { i2 };
    let detected_interval = (rows[i].x, rows[i + 1].x);
    let at = if center > detected_interval.0 && center < detected_interval.1 {
        center
    } else {
        0.5 * (detected_interval.0 + detected_interval.1)
    };

    // close one-sided samples for the limits
    let fine: Vec<f64> = (2..10).flat_map(|k| [at - k as f64 * h, at + k as f64 * h]).collect();
    for &x in &fine {
        rows.push(derivatives(base, axis, x, h)?);
    }
    rows.sort_by(|a, b| a.x.total_cmp(&b.x));
    let near = 10.0 * h;
    let left: Vec<DerivativeRow> = rows.iter().copied().filter(|r| r.x < at - h && r.x > at - near).collect();
    let right: Vec<DerivativeRow> = rows.iter().copied().filter(|r| r.x > at + h && r.x < at + near).collect();
    let first = jump_at(&left, &right, at, |r| r.first);
    let second = jump_at(&left, &right, at, |r| r.second);
    Ok(DerivativeDiagnostics { axis, rows, detected_interval, order, first, second })
}
