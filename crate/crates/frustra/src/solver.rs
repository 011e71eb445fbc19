//! Global minimization of the mean-field energy, phase classification,
//! reference solutions and the degenerate ground-state manifold.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::model::{
    critical_point, energy_gradient, energy_hessian, rescaled_energy, HoppingSign,
    MeanFieldConfiguration, ModelParams,
};

/// Two configurations are the same point when no coherence differs by more.
pub const SAME_POINT_TOL: f64 = 1e-8;
/// Energies closer than this are degenerate.
pub const DEGENERATE_ENERGY_TOL: f64 = 1e-10;
/// Smallest Hessian eigenvalue still accepted as a minimum.
pub const PSD_TOL: f64 = -1e-9;
/// Distance from g_c inside which the curvature is below f64 resolution.
pub const NEAR_CRITICAL_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Normal,
    NonFrustratedSuperradiant,
    FrustratedSuperradiant,
}

impl Phase {
    pub fn classify(params: &ModelParams) -> Result<Phase> {
        let gc = params.critical_coupling()?;
        Ok(if params.g() <= gc {
            Phase::Normal
        } else if params.jbar() > 0.0 {
            Phase::FrustratedSuperradiant
        } else {
            Phase::NonFrustratedSuperradiant
        })
    }

    /// Size of the ground-state manifold.
    pub fn degeneracy(self, params: &ModelParams) -> usize {
        let n = params.n_sites();
        match self {
            Phase::Normal => 1,
            // decoupled sites choose their signs independently
            Phase::NonFrustratedSuperradiant if params.jbar() == 0.0 => 1 << n,
            Phase::NonFrustratedSuperradiant => 2,
            Phase::FrustratedSuperradiant => 2 * n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedMode {
    /// One seed per symmetry class of the proven minimum structure.
    SymmetryOrbit,
    /// Additionally seed from every one of the 2^N sign patterns.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub seed_mode: SeedMode,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub warm_start: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            seed_mode: SeedMode::SymmetryOrbit,
            max_iterations: 500,
            gradient_tolerance: 1e-12,
            warm_start: None,
        }
    }
}

impl SolverOptions {
    pub fn exhaustive() -> Self {
        SolverOptions { seed_mode: SeedMode::Exhaustive, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStateSolution {
    pub config: MeanFieldConfiguration,
    pub phase: Phase,
    pub degeneracy: usize,
    pub canonical: bool,
    pub gradient_norm: f64,
    pub min_hessian_eigenvalue: f64,
    /// Set inside the band around g_c where the landscape is numerically flat.
    pub near_critical: bool,
    pub warnings: Vec<String>,
}

/// Magnitude of the uniform superradiant solution,
/// (1/2g) √((g/g_c)⁴ − 1) with g_c = √(1 + 2J̄).
pub fn nfsp_closed_form(g: f64, jbar: f64) -> Result<f64> {
    let gc = critical_point(jbar, 3, HoppingSign::Negative)?;
    uniform_amplitude(g, gc)
}

fn uniform_amplitude(g: f64, gc: f64) -> Result<f64> {
    if g < gc {
        return Err(Error::Domain(format!("g = {g} lies below the critical coupling {gc}")));
    }
    if g == gc {
        return Ok(0.0);
    }
    let r = g / gc;
    Ok((r.powi(4) - 1.0).sqrt() / (2.0 * g))
}

/// Leading two orders of the small-|g − g_c| expansion of the three-site
/// frustrated minimum: (unpaired amplitude, pair amplitude).
pub fn fsp_approximation(g: f64, jbar: f64) -> Result<(f64, f64)> {
    if jbar <= 0.0 {
        return Err(Error::Domain(format!("expansion needs positive hopping, got {jbar}")));
    }
    let gc = critical_point(jbar, 3, HoppingSign::Positive)?;
    if g < gc {
        return Err(Error::Domain(format!("g = {g} lies below the critical coupling {gc}")));
    }
    let d = (g - gc).abs();
    let s3 = 3f64.sqrt();
    let gc32 = gc.powf(1.5);
    let gc52 = gc.powf(2.5);
    let alpha1 = -2.0 * d.sqrt() / (s3 * gc32) - d.powf(1.5) / (6.0 * s3 * gc52);
    let alpha_pair =
        d.sqrt() / (s3 * gc32) + (8.0 - 7.0 * jbar) * d.powf(1.5) / (12.0 * s3 * jbar * gc52);
    Ok((alpha1, alpha_pair))
}

/// The stationary point (−a, a, 0) of the three-site ring above g_c.
pub fn saddle_configuration(g: f64, jbar: f64) -> Result<MeanFieldConfiguration> {
    if jbar <= 0.0 {
        return Err(Error::Domain(format!("saddle exists for positive hopping only, got {jbar}")));
    }
    let gc = critical_point(jbar, 3, HoppingSign::Positive)?;
    if g <= gc {
        return Err(Error::Domain(format!("g = {g} must exceed the critical coupling {gc}")));
    }
    let a = uniform_amplitude(g, gc)?;
    MeanFieldConfiguration::new(vec![-a, a, 0.0], g, jbar)
}

/// Result of one local descent.
#[derive(Debug, Clone)]
struct Descent {
    alphas: Vec<f64>,
    gradient_norm: f64,
    converged: bool,
}

/// Damped Newton on the energy restricted to the column space of `embed`
/// (full space when `embed` is the identity). Negative and tiny curvatures are
/// replaced by their magnitude so every step is a descent direction; a
/// backtracking line search falls back to steepest descent.
fn newton(
    start: &[f64],
    embed: &DMatrix<f64>,
    g: f64,
    jbar: f64,
    opts: &SolverOptions,
) -> Result<Descent> {
    let full = |z: &DVector<f64>| -> Vec<f64> { (embed * z).iter().copied().collect() };
    let restrict = |x: &[f64]| -> DVector<f64> {
        let p = embed.transpose() * embed;
        let rhs = embed.transpose() * DVector::from_column_slice(x);
        p.lu().solve(&rhs).unwrap_or(rhs)
    };
    let grad_of = |z: &DVector<f64>| -> Result<(DVector<f64>, f64)> {
        let x = full(z);
        let gx = energy_gradient(&x, g, jbar)?;
        let inf = gx.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok((embed.transpose() * DVector::from_vec(gx), inf))
    };
    let energy_of = |z: &DVector<f64>| rescaled_energy(&full(z), g, jbar);

    let mut z = restrict(start);
    let mut energy = energy_of(&z)?;
    let (mut grad, mut gnorm) = grad_of(&z)?;
    for _ in 0..opts.max_iterations {
        let hess = embed.transpose() * energy_hessian(&full(&z), g, jbar)? * embed;
        let eig = eigh(hess)?;
        let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let floor = 1e-15 * scale;
        let mut step = DVector::zeros(z.len());
        for (k, lam) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            step -= v * (v.dot(&grad) / lam.abs().max(floor));
        }
        let step_norm = step.amax();
        if gnorm < opts.gradient_tolerance && step_norm < 1e-6 {
            // Soft directions turn a tiny gradient into a sizeable error in
            // their curvature, so keep taking full steps while they still help.
            for _ in 0..10 {
                let hess = embed.transpose() * energy_hessian(&full(&z), g, jbar)? * embed;
                let eig = eigh(hess)?;
                let mut step = DVector::zeros(z.len());
                for (k, lam) in eig.eigenvalues.iter().enumerate() {
                    let v = eig.eigenvectors.column(k);
                    step -= v * (v.dot(&grad) / lam.abs().max(floor));
                }
                let trial = &z + step;
                let (g_trial, n_trial) = grad_of(&trial)?;
                if n_trial >= gnorm {
                    break;
                }
                z = trial;
                grad = g_trial;
                gnorm = n_trial;
            }
            return Ok(Descent { alphas: full(&z), gradient_norm: gnorm, converged: true });
        }

        let slope = step.dot(&grad);
        let mut accepted = None;
        let mut t = 1.0;
        for _ in 0..60 {
            let trial = &z + &step * t;
            let e_trial = energy_of(&trial)?;
            let (g_trial, n_trial) = grad_of(&trial)?;
            let armijo = e_trial <= energy + 1e-4 * t * slope;
            // below rounding the energy cannot rank points; trust the gradient
            let flat = (e_trial - energy).abs() <= 1e-14 * energy.abs().max(1.0) && n_trial < gnorm;
            if armijo || flat {
                accepted = Some((trial, e_trial, g_trial, n_trial));
                break;
            }
            t *= 0.5;
        }
        if accepted.is_none() {
            let mut t = 1e-2;
            for _ in 0..60 {
                let trial = &z - &grad * t;
                let e_trial = energy_of(&trial)?;
                if e_trial < energy {
                    let (g_trial, n_trial) = grad_of(&trial)?;
                    accepted = Some((trial, e_trial, g_trial, n_trial));
                    break;
                }
                t *= 0.5;
            }
        }
        match accepted {
            Some((nz, ne, ng, nn)) => {
                z = nz;
                energy = ne;
                grad = ng;
                gnorm = nn;
            }
            None => break,
        }
    }
    Ok(Descent {
        alphas: full(&z),
        gradient_norm: gnorm,
        converged: gnorm < opts.gradient_tolerance,
    })
}

fn identity(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n)
}

/// Embedding of the subspace symmetric under reflection about `site`:
/// column 0 is the site itself, column j the pair (site + j, site − j).
fn mirror_embedding(n: usize, site: usize) -> DMatrix<f64> {
    let m = (n - 1) / 2;
    let mut p = DMatrix::zeros(n, m + 1);
    p[(site, 0)] = 1.0;
    for j in 1..=m {
        p[((site + j) % n, j)] = 1.0;
        p[((site + n - j) % n, j)] = 1.0;
    }
    p
}

/// Orthonormal basis of the subspace antisymmetric under the same reflection.
fn mirror_antisymmetric_basis(n: usize, site: usize) -> DMatrix<f64> {
    let m = (n - 1) / 2;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut p = DMatrix::zeros(n, m);
    for j in 1..=m {
        p[((site + j) % n, j - 1)] = r;
        p[((site + n - j) % n, j - 1)] = -r;
    }
    p
}

fn mirror_symmetric_basis(n: usize, site: usize) -> DMatrix<f64> {
    let mut p = mirror_embedding(n, site);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for j in 1..p.ncols() {
        p.column_mut(j).scale_mut(r);
    }
    p
}

/// The unique unpaired site of a frustrated sign pattern: the site opposite
/// the single bond whose two ends share a sign.
pub fn unpaired_site(alphas: &[f64]) -> Option<usize> {
    let n = alphas.len();
    let aligned: Vec<usize> = (0..n)
        .filter(|&i| {
            let (a, b) = (alphas[i], alphas[(i + 1) % n]);
            a != 0.0 && b != 0.0 && a.signum() == b.signum()
        })
        .collect();
    if aligned.len() != 1 || n.is_multiple_of(2) {
        return None;
    }
    let m = (n - 1) / 2;
    Some((aligned[0] + n - m) % n)
}

/// Largest deviation from reflection symmetry about `site`.
pub fn mirror_asymmetry(alphas: &[f64], site: usize) -> f64 {
    let n = alphas.len();
    (1..=(n - 1) / 2)
        .map(|j| (alphas[(site + j) % n] - alphas[(site + n - j) % n]).abs())
        .fold(0.0, f64::max)
}

fn rotate(alphas: &[f64], shift: usize) -> Vec<f64> {
    let n = alphas.len();
    (0..n).map(|i| alphas[(i + shift) % n]).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn canonicalize(alphas: &[f64], phase: Phase) -> Vec<f64> {
    match phase {
        Phase::Normal => alphas.to_vec(),
        Phase::NonFrustratedSuperradiant => {
            if alphas.iter().all(|a| *a <= 0.0) {
                alphas.iter().map(|a| -a).collect()
            } else if alphas.iter().any(|a| *a < 0.0) {
                // decoupled ring: every sign pattern is degenerate
                alphas.iter().map(|a| a.abs()).collect()
            } else {
                alphas.to_vec()
            }
        }
        Phase::FrustratedSuperradiant => match unpaired_site(alphas) {
            Some(u) => {
                let r = rotate(alphas, u);
                if r[0] > 0.0 {
                    r.iter().map(|a| -a).collect()
                } else {
                    r
                }
            }
            None => alphas.to_vec(),
        },
    }
}

/// Mode shape of the critical circulant eigenvector for positive hopping,
/// arranged so that site 0 is the unpaired site with a negative coherence.
fn frustrated_shape(n: usize) -> Vec<f64> {
    let k = PI * (n - 1) as f64 / n as f64;
    (0..n).map(|j| -(k * j as f64).cos()).collect()
}

/// Amplitude minimizing the energy along a fixed direction, by a coarse scan
/// followed by golden-section refinement.
fn line_minimum(shape: &[f64], g: f64, jbar: f64, max_amp: f64) -> Result<f64> {
    let e = |s: f64| -> Result<f64> {
        let x: Vec<f64> = shape.iter().map(|v| v * s).collect();
        rescaled_energy(&x, g, jbar)
    };
    let samples = 400;
    let mut best = (0.0, e(0.0)?);
    for i in 1..=samples {
        let s = max_amp * i as f64 / samples as f64;
        let v = e(s)?;
        if v < best.1 {
            best = (s, v);
        }
    }
    let h = max_amp / samples as f64;
    let (mut lo, mut hi) = ((best.0 - h).max(0.0), best.0 + h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if e(a)? < e(b)? {
            hi = b;
        } else {
            lo = a;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn frustrated_seed(params: &ModelParams, gc: f64) -> Result<Vec<f64>> {
    let (g, jbar, n) = (params.g(), params.jbar(), params.n_sites());
    if n == 3 {
        let (a1, a2) = fsp_approximation(g, jbar)?;
        // the expansion overshoots far from g_c; fall back to the line scan
        if (g - gc) / gc < 0.05 {
            return Ok(vec![a1, a2, a2]);
        }
    }
    let shape = frustrated_shape(n);
    let cap = 2.0 * g.max(1.0);
    let s = line_minimum(&shape, g, jbar, cap)?;
    Ok(shape.iter().map(|v| v * s).collect())
}

fn seeds(params: &ModelParams, opts: &SolverOptions, gc: f64) -> Result<Vec<Vec<f64>>> {
    let (g, jbar, n) = (params.g(), params.jbar(), params.n_sites());
    let mut out = vec![vec![0.0; n]];
    if let Some(w) = &opts.warm_start {
        if w.len() == n && w.iter().all(|v| v.is_finite()) {
            out.push(w.clone());
        }
    }
    let g_uniform = (1.0 + 2.0 * jbar).sqrt();
    if g > g_uniform {
        let a = uniform_amplitude(g, g_uniform)?;
        out.push(vec![a; n]);
        out.push(vec![-a; n]);
    }
    let mut typical = if g > 1.0 { (g * g - 1.0 / (g * g)).sqrt() / 2.0 } else { 0.0 };
    if jbar > 0.0 && g > gc {
        let base = frustrated_seed(params, gc)?;
        typical = base.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for r in 0..n {
            let rot = rotate(&base, n - r);
            out.push(rot.iter().map(|v| -v).collect());
            out.push(rot);
        }
    }
    if opts.seed_mode == SeedMode::Exhaustive {
        let amp = if typical > 0.0 { typical } else { 0.1 };
        for mask in 0..(1u32 << n) {
            out.push((0..n).map(|i| if mask >> i & 1 == 1 { -amp } else { amp }).collect());
        }
    }
    Ok(out)
}

/// A verified local minimum.
#[derive(Debug, Clone)]
struct Minimum {
    alphas: Vec<f64>,
    energy: f64,
    gradient_norm: f64,
    min_eigenvalue: f64,
}

/// Descends from one seed, then re-solves exactly inside the mirror-symmetric
/// subspace when the unconstrained result carries the frustrated pattern.
fn descend(
    seed: &[f64],
    params: &ModelParams,
    opts: &SolverOptions,
    warnings: &mut Vec<String>,
) -> Result<(Option<Minimum>, f64)> {
    let (g, jbar, n) = (params.g(), params.jbar(), params.n_sites());
    let d = newton(seed, &identity(n), g, jbar, opts)?;
    let mut alphas = d.alphas;
    let mut gnorm = d.gradient_norm;
    let mut converged = d.converged;

    if jbar > 0.0 {
        if let Some(u) = unpaired_site(&alphas) {
            let scale = alphas.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let asym = mirror_asymmetry(&alphas, u);
            if asym <= 1e-3 * scale {
                let p = mirror_embedding(n, u);
                let r = newton(&alphas, &p, g, jbar, opts)?;
                let e_old = rescaled_energy(&alphas, g, jbar)?;
                let e_new = rescaled_energy(&r.alphas, g, jbar)?;
                if r.converged && e_new <= e_old + 1e-14 {
                    alphas = r.alphas;
                    gnorm = r.gradient_norm;
                    converged = true;
                }
            } else if converged {
                warnings.push(format!(
                    "frustrated stationary point without mirror symmetry (asymmetry {asym:e}): {alphas:?}"
                ));
            }
        }
    }
    if !converged {
        return Ok((None, gnorm));
    }
    let hess = energy_hessian(&alphas, g, jbar)?;
    let min_eig = eigh(hess)?.eigenvalues.min();
    if min_eig <= PSD_TOL {
        return Ok((None, gnorm));
    }
    let energy = rescaled_energy(&alphas, g, jbar)?;
    Ok((Some(Minimum { alphas, energy, gradient_norm: gnorm, min_eigenvalue: min_eig }), gnorm))
}

fn minima_from_seeds(
    params: &ModelParams,
    opts: &SolverOptions,
    seeds: &[Vec<f64>],
    warnings: &mut Vec<String>,
) -> Result<(Vec<Minimum>, f64)> {
    let mut found = Vec::new();
    let mut best_residual = f64::INFINITY;
    for seed in seeds {
        let (m, residual) = descend(seed, params, opts, warnings)?;
        best_residual = best_residual.min(residual);
        if let Some(m) = m {
            found.push(m);
        }
    }
    Ok((found, best_residual))
}

pub fn solve_ground_state(params: &ModelParams, opts: &SolverOptions) -> Result<GroundStateSolution> {
    let gc = params.critical_coupling()?;
    let phase = Phase::classify(params)?;
    let (g, jbar, n) = (params.g(), params.jbar(), params.n_sites());
    let near_critical = (g - gc).abs() < NEAR_CRITICAL_BAND;
    let degeneracy = phase.degeneracy(params);

    if phase == Phase::Normal && near_critical {
        let config = MeanFieldConfiguration::new(vec![0.0; n], g, jbar)?;
        let min_eig = eigh(energy_hessian(&config.alphas, g, jbar)?)?.eigenvalues.min();
        return Ok(GroundStateSolution {
            config,
            phase,
            degeneracy,
            canonical: true,
            gradient_norm: 0.0,
            min_hessian_eigenvalue: min_eig,
            near_critical,
            warnings: vec![],
        });
    }

    let mut warnings = Vec::new();
    let seed_list = seeds(params, opts, gc)?;
    let (found, best_residual) = minima_from_seeds(params, opts, &seed_list, &mut warnings)?;
    let best = found
        .into_iter()
        .min_by(|a, b| a.energy.total_cmp(&b.energy))
        .ok_or(Error::Convergence { residual: best_residual })?;

    let alphas = canonicalize(&best.alphas, phase);
    if phase == Phase::FrustratedSuperradiant {
        let asym = mirror_asymmetry(&alphas, 0);
        if unpaired_site(&alphas) != Some(0) || asym > 1e-10 {
            warnings.push(format!(
                "minimum lacks the single-unpaired-site mirror structure (asymmetry {asym:e})"
            ));
        }
    }
    let config = MeanFieldConfiguration::new(alphas, g, jbar)?;
    Ok(GroundStateSolution {
        config,
        phase,
        degeneracy,
        canonical: true,
        gradient_norm: best.gradient_norm,
        min_hessian_eigenvalue: best.min_eigenvalue,
        near_critical,
        warnings,
    })
}

fn push_unique(list: &mut Vec<Vec<f64>>, x: Vec<f64>) {
    if !list.iter().any(|y| max_abs_diff(y, &x) < SAME_POINT_TOL) {
        list.push(x);
    }
}

/// All global minimizers, canonical representative first.
pub fn enumerate_degenerate_ground_states(
    params: &ModelParams,
    opts: &SolverOptions,
) -> Result<Vec<MeanFieldConfiguration>> {
    let sol = solve_ground_state(params, opts)?;
    let (g, jbar, n) = (params.g(), params.jbar(), params.n_sites());
    let base = sol.config.alphas.clone();
    let mut points: Vec<Vec<f64>> = vec![base.clone()];

    match opts.seed_mode {
        SeedMode::SymmetryOrbit => match sol.phase {
            Phase::Normal => {}
            Phase::NonFrustratedSuperradiant if jbar == 0.0 => {
                for mask in 0..(1u32 << n) {
                    let x = (0..n)
                        .map(|i| if mask >> i & 1 == 1 { -base[i] } else { base[i] })
                        .collect();
                    push_unique(&mut points, x);
                }
            }
            Phase::NonFrustratedSuperradiant => {
                push_unique(&mut points, base.iter().map(|v| -v).collect());
            }
            Phase::FrustratedSuperradiant => {
                for sign in [1.0, -1.0] {
                    for r in 0..n {
                        let x = rotate(&base, n - r).iter().map(|v| sign * v).collect();
                        push_unique(&mut points, x);
                    }
                }
            }
        },
        SeedMode::Exhaustive => {
            let mut warnings = Vec::new();
            let gc = params.critical_coupling()?;
            let seed_list = seeds(params, opts, gc)?;
            let (found, _) = minima_from_seeds(params, opts, &seed_list, &mut warnings)?;
            let mut rest: Vec<Vec<f64>> = Vec::new();
            for m in found {
                if (m.energy - sol.config.energy).abs() < DEGENERATE_ENERGY_TOL
                    && max_abs_diff(&m.alphas, &base) >= SAME_POINT_TOL
                {
                    push_unique(&mut rest, m.alphas);
                }
            }
            rest.sort_by(|a, b| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            for x in rest {
                push_unique(&mut points, x);
            }
        }
    }
    points
        .into_iter()
        .map(|x| MeanFieldConfiguration::new(x, g, jbar))
        .collect()
}

/// Softest curvatures of the frustrated minimum, split by parity under the
/// reflection about the unpaired site.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalModes {
    pub lambda_mf: f64,
    pub lambda_f: f64,
    pub y_mf: Vec<f64>,
    pub y_f: Vec<f64>,
}

fn lowest_in_sector(hess: &DMatrix<f64>, basis: &DMatrix<f64>) -> Result<(f64, Vec<f64>)> {
    let eig = eigh(basis.transpose() * hess * basis)?;
    let k = eig.eigenvalues.imin();
    let v = basis * eig.eigenvectors.column(k);
    let mut v: Vec<f64> = v.iter().copied().collect();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok((eig.eigenvalues[k], v))
}

/// Hessian curvature of the mean-field (symmetric) and frustrated
/// (antisymmetric) critical directions at the canonical ground state.
pub fn hessian_critical_modes(params: &ModelParams) -> Result<CriticalModes> {
    let sol = solve_ground_state(params, &SolverOptions::default())?;
    critical_modes_of(&sol, params)
}

pub fn critical_modes_of(sol: &GroundStateSolution, params: &ModelParams) -> Result<CriticalModes> {
    if sol.phase != Phase::FrustratedSuperradiant {
        return Err(Error::Phase(format!("critical modes need the frustrated phase, got {:?}", sol.phase)));
    }
    let alphas = &sol.config.alphas;
    let n = alphas.len();
    let asym = mirror_asymmetry(alphas, 0);
    if unpaired_site(alphas) != Some(0) || asym > 1e-10 {
        return Err(Error::Contract(format!(
            "ground state is not mirror symmetric about site 1 (asymmetry {asym:e})"
        )));
    }
    let hess = energy_hessian(alphas, params.g(), params.jbar())?;
    let (lambda_mf, y_mf) = lowest_in_sector(&hess, &mirror_symmetric_basis(n, 0))?;
    let (lambda_f, y_f) = lowest_in_sector(&hess, &mirror_antisymmetric_basis(n, 0))?;
    Ok(CriticalModes { lambda_mf, lambda_f, y_mf, y_f })
}
