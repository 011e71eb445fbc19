//! Quadratic fluctuation Hamiltonian, Williamson normal form, covariance
//! matrix and derived observables, plus closed-form reference spectra.

use std::io::Write;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::model::{energy_gradient, ModelParams};
use crate::solver::GroundStateSolution;

/// Below this smallest symplectic eigenvalue (in units of ω₀) results are
/// flagged as critical-regime.
pub const CRITICAL_REGIME_THRESHOLD: f64 = 1e-8;

const QUADRATURES: [&str; 4] = ["q", "p", "Q", "P"];

/// Index of quadrature `k` (0..4, ordered q, p, Q, P) at `site`.
pub fn quadrature_index(site: usize, k: usize) -> usize {
    4 * site + k
}

/// Block-diagonal canonical form with [[0, 1], [-1, 0]] on each (x, p) pair.
pub fn symplectic_form(dim: usize) -> DMatrix<f64> {
    let mut om = DMatrix::zeros(dim, dim);
    for i in (0..dim).step_by(2) {
        om[(i, i + 1)] = 1.0;
        om[(i + 1, i)] = -1.0;
    }
    om
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub matrix: DMatrix<f64>,
    pub symplectic_form: DMatrix<f64>,
    /// ω₀, used as the energy scale for conditioning flags.
    pub energy_scale: f64,
}

impl QuadraticForm {
    pub fn new(matrix: DMatrix<f64>, energy_scale: f64) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || dim != matrix.ncols() || !dim.is_multiple_of(2) {
            return Err(Error::Domain(format!("quadratic form must be square of even size, got {}x{}", dim, matrix.ncols())));
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-12 * matrix.amax().max(1.0) {
            return Err(Error::Domain(format!("quadratic form not symmetric (deviation {asym:e})")));
        }
        Ok(QuadraticForm { symplectic_form: symplectic_form(dim), matrix, energy_scale })
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Row-major CSV dump with a header naming the quadrature ordering.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let sites = self.matrix.nrows() / 4;
        let header: Vec<String> = (1..=sites)
            .flat_map(|n| QUADRATURES.iter().map(move |q| format!("{q}{n}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.matrix.nrows() {
            let row: Vec<String> = self.matrix.row(i).iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Fluctuation Hamiltonian around a converged mean-field minimum,
/// H = ½ rᵀ M r over r = (q₁, p₁, Q₁, P₁, …).
pub fn build_quadratic_hamiltonian(
    solution: &GroundStateSolution,
    params: &ModelParams,
) -> Result<QuadraticForm> {
    let alphas = &solution.config.alphas;
    let n = params.n_sites();
    if alphas.len() != n {
        return Err(Error::Contract(format!("solution has {} sites, parameters {}", alphas.len(), n)));
    }
    let grad = energy_gradient(alphas, params.g(), params.jbar())?;
    let residual = grad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if residual > 1e-8 {
        return Err(Error::Contract(format!(
            "mean field is not stationary (gradient {residual:e}); linear terms would survive"
        )));
    }
    let (w0, om, g) = (params.omega0(), params.omega(), params.g());
    let hop = params.hopping();
    let coupling = g * (w0 * om).sqrt();
    let mut m = DMatrix::zeros(4 * n, 4 * n);
    for site in 0..n {
        let (theta, phi) = (solution.config.thetas[site], solution.config.phis[site]);
        let q = quadrature_index(site, 0);
        let p = quadrature_index(site, 1);
        let qa = quadrature_index(site, 2);
        let pa = quadrature_index(site, 3);
        m[(q, q)] = w0;
        m[(p, p)] = w0;
        let atom = -om / theta.cos();
        m[(qa, qa)] = atom;
        m[(pa, pa)] = atom;
        let c = coupling * theta.cos() * phi.cos();
        m[(q, qa)] = c;
        m[(qa, q)] = c;

        let next = (site + 1) % n;
        let (qn, pn) = (quadrature_index(next, 0), quadrature_index(next, 1));
        m[(q, qn)] += hop;
        m[(qn, q)] += hop;
        m[(p, pn)] += hop;
        m[(pn, p)] += hop;
    }
    QuadraticForm::new(m, w0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilliamsonDecomposition {
    /// Normal-mode energies in ascending order.
    pub symplectic_eigenvalues: Vec<f64>,
    /// Rows (2k, 2k+1) map r to the k-th normal-mode pair.
    pub symplectic_matrix: DMatrix<f64>,
    /// max |S Ω₀ Sᵀ − Ω₀|.
    pub symplectic_residual: f64,
    /// max |S H Sᵀ − diag(ε, ε)|.
    pub diagonal_residual: f64,
    pub critical_regime: bool,
}

/// Names the quadrature carrying the largest weight of `v`.
fn dominant_quadrature(v: &[f64]) -> String {
    let (i, _) = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (i, x)| if x.abs() > best.1 { (i, x.abs()) } else { best });
    format!("{}{}", QUADRATURES[i % 4], i / 4 + 1)
}

/// Symplectic diagonalization of a positive-definite quadratic form.
pub fn williamson_diagonalize(form: &QuadraticForm) -> Result<WilliamsonDecomposition> {
    let h = &form.matrix;
    let dim = h.nrows();
    let n = dim / 2;
    let chol = match h.clone().cholesky() {
        Some(c) => c,
        None => {
            let eig = eigh(h.clone())?;
            let k = eig.eigenvalues.imin();
            let v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            return Err(Error::Instability(format!(
                "quadratic form not positive definite: eigenvalue {:e} along a direction dominated by {}",
                eig.eigenvalues[k],
                dominant_quadrature(&v)
            )));
        }
    };
    let l = chol.l();
    let l_inv = l
        .solve_lower_triangular(&DMatrix::identity(dim, dim))
        .ok_or_else(|| Error::Instability("singular Cholesky factor".into()))?;
    let om = &form.symplectic_form;
    let a = &l_inv * om * l_inv.transpose();
    // iA is Hermitian; its eigenvalues come in ± pairs
    let ia = a.map(|x| Complex::new(0.0, x));
    let eig = eigh(ia)?;
    let mut order: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] > 0.0).collect();
    if order.len() != n {
        return Err(Error::Instability(format!(
            "expected {n} positive symplectic pairs, found {}",
            order.len()
        )));
    }
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut o = DMatrix::zeros(dim, dim);
    let mut eps = Vec::with_capacity(n);
    let r2 = std::f64::consts::SQRT_2;
    for (k, &i) in order.iter().enumerate() {
        let u = eig.eigenvectors.column(i);
        for row in 0..dim {
            o[(row, 2 * k)] = r2 * u[row].im;
            o[(row, 2 * k + 1)] = r2 * u[row].re;
        }
        eps.push(1.0 / eig.eigenvalues[i]);
    }
    let mut s = o.transpose() * &l_inv;
    for (k, e) in eps.iter().enumerate() {
        let f = e.sqrt();
        s.row_mut(2 * k).scale_mut(f);
        s.row_mut(2 * k + 1).scale_mut(f);
    }
    fix_mode_phases(&mut s);

    let symplectic_residual = (&s * om * s.transpose() - om).amax();
    let mut d = DMatrix::zeros(dim, dim);
    for k in 0..n {
        d[(2 * k, 2 * k)] = eps[k];
        d[(2 * k + 1, 2 * k + 1)] = eps[k];
    }
    let diagonal_residual = (&s * h * s.transpose() - d).amax();
    let critical_regime = eps[0] < CRITICAL_REGIME_THRESHOLD * form.energy_scale;
    Ok(WilliamsonDecomposition {
        symplectic_eigenvalues: eps,
        symplectic_matrix: s,
        symplectic_residual,
        diagonal_residual,
        critical_regime,
    })
}

/// S⁻ᵀ of a symplectic S, computed as −Ω₀ S Ω₀.
fn inverse_transpose(s: &DMatrix<f64>) -> DMatrix<f64> {
    let om = symplectic_form(s.nrows());
    -(&om * s * &om)
}

fn is_position(col: usize) -> bool {
    col.is_multiple_of(2)
}

/// Rotates each normal-mode pair so its coordinate row is built from
/// position quadratures only, then fixes the overall sign so that the first
/// non-negligible position weight is positive.
fn fix_mode_phases(s: &mut DMatrix<f64>) {
    let t = inverse_transpose(s);
    let dim = s.nrows();
    for k in 0..dim / 2 {
        let (ra, rb) = (t.row(2 * k), t.row(2 * k + 1));
        let (mut aa, mut ab, mut bb) = (0.0, 0.0, 0.0);
        for c in (0..dim).filter(|&c| is_position(c)) {
            aa += ra[c] * ra[c];
            ab += ra[c] * rb[c];
            bb += rb[c] * rb[c];
        }
        // leading eigenvector of [[aa, ab], [ab, bb]]
        let angle = 0.5 * (2.0 * ab).atan2(aa - bb);
        let (mut c, mut sn) = (angle.cos(), angle.sin());
        let lead: Vec<f64> = (0..dim)
            .filter(|&col| is_position(col))
            .map(|col| c * ra[col] + sn * rb[col])
            .collect();
        let scale = lead.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(first) = lead.iter().find(|v| v.abs() > 1e-6 * scale) {
            if *first < 0.0 {
                c = -c;
                sn = -sn;
            }
        }
        let row_a = s.row(2 * k).clone_owned();
        let row_b = s.row(2 * k + 1).clone_owned();
        s.set_row(2 * k, &(&row_a * c + &row_b * sn));
        s.set_row(2 * k + 1, &(&row_b * c - &row_a * sn));
    }
}

/// Independent route to the moduli of the eigenvalues of iΩ₀H. With the
/// spectral square root of H, iΩ₀H is similar to the Hermitian
/// i H^{1/2}Ω₀H^{1/2}, whose eigenvalues are ±ε. No Cholesky factor is
/// involved.
pub fn symplectic_eigenvalues_direct(form: &QuadraticForm) -> Result<Vec<f64>> {
    let h = &form.matrix;
    let om = &form.symplectic_form;
    let eig = eigh(h.clone())?;
    if eig.eigenvalues.min() <= 0.0 {
        return Err(Error::Instability("quadratic form not positive definite".into()));
    }
    let root = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let k = &root * om * &root;
    let herm = k.map(|v| Complex::new(0.0, v));
    let mut eps: Vec<f64> = eigh(herm)?
        .eigenvalues
        .iter()
        .copied()
        .filter(|v| *v > 0.0)
        .collect();
    if eps.len() != form.n_modes() {
        return Err(Error::Instability("spectrum of iΩ₀H is not paired ±ε".into()));
    }
    eps.sort_by(f64::total_cmp);
    Ok(eps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub matrix: DMatrix<f64>,
    /// Estimated absolute error on entries, present in the critical regime.
    pub error_bound: Option<f64>,
}

pub fn covariance(decomp: &WilliamsonDecomposition) -> CovarianceMatrix {
    let s = &decomp.symplectic_matrix;
    let matrix = (s.transpose() * s) * 0.5;
    let error_bound = decomp.critical_regime.then(|| {
        let eps_min = decomp.symplectic_eigenvalues[0].max(f64::MIN_POSITIVE);
        matrix.amax() * (decomp.symplectic_residual + decomp.diagonal_residual / eps_min)
    });
    CovarianceMatrix { matrix, error_bound }
}

fn check_site(cov: &CovarianceMatrix, site: usize) -> Result<()> {
    let len = cov.matrix.nrows() / 4;
    if site >= len {
        return Err(Error::OutOfRange { index: site, len });
    }
    Ok(())
}

/// Fluctuation occupation of cavity `site` (0-based) in the displaced frame.
pub fn photon_number(cov: &CovarianceMatrix, site: usize) -> Result<f64> {
    check_site(cov, site)?;
    let q = quadrature_index(site, 0);
    let p = quadrature_index(site, 1);
    Ok((cov.matrix[(q, q)] + cov.matrix[(p, p)] - 1.0) / 2.0)
}

/// Position variance of cavity `site` (0-based).
pub fn squeezing_variance(cov: &CovarianceMatrix, site: usize) -> Result<f64> {
    check_site(cov, site)?;
    let q = quadrature_index(site, 0);
    Ok(cov.matrix[(q, q)])
}

/// Smallest eigenvalue of the Hermitian matrix C + (i/2)Ω₀; non-negative for
/// a physical Gaussian state.
pub fn physicality_margin(cov: &CovarianceMatrix) -> Result<f64> {
    let dim = cov.matrix.nrows();
    let om = symplectic_form(dim);
    let m = DMatrix::from_fn(dim, dim, |i, j| Complex::new(cov.matrix[(i, j)], 0.5 * om[(i, j)]));
    Ok(eigh(m)?.eigenvalues.min())
}

/// Position-quadrature weights of one normal mode: cavity weights `v` and
/// atomic weights `w` per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeWeights {
    pub cavity: Vec<f64>,
    pub atom: Vec<f64>,
}

impl ModeWeights {
    /// Interleaved (v₁, w₁, …, v_N, w_N).
    pub fn interleaved(&self) -> Vec<f64> {
        self.cavity.iter().zip(&self.atom).flat_map(|(v, w)| [*v, *w]).collect()
    }
}

pub fn mode_weights(decomp: &WilliamsonDecomposition, mode_index: usize) -> Result<ModeWeights> {
    let n_modes = decomp.symplectic_eigenvalues.len();
    if mode_index >= n_modes {
        return Err(Error::OutOfRange { index: mode_index, len: n_modes });
    }
    let t = inverse_transpose(&decomp.symplectic_matrix);
    let row = t.row(2 * mode_index);
    let sites = n_modes / 2;
    let mut cavity: Vec<f64> = (0..sites).map(|n| row[quadrature_index(n, 0)]).collect();
    let mut atom: Vec<f64> = (0..sites).map(|n| row[quadrature_index(n, 2)]).collect();
    let norm = cavity.iter().chain(&atom).map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        cavity.iter_mut().chain(atom.iter_mut()).for_each(|v| *v /= norm);
    }
    Ok(ModeWeights { cavity, atom })
}

/// Lower and upper branch of a cavity mode (frequency `cavity`) coupled to an
/// atomic mode, given the squared-coupling term of the closed forms. All in
/// units of ω₀.
fn two_branch(cavity_sq: f64, atom_sq: f64, mixing: f64) -> Result<(f64, f64)> {
    let root = ((cavity_sq - atom_sq).powi(2) + 4.0 * mixing).sqrt();
    let sum = cavity_sq + atom_sq;
    let mut lower = sum - root;
    if lower < 0.0 {
        if lower < -1e-13 * sum {
            return Err(Error::Domain(format!(
                "lower branch is imaginary (radicand {lower:e}); coupling past the critical point"
            )));
        }
        lower = 0.0;
    }
    Ok(((lower / 2.0).sqrt(), ((sum + root) / 2.0).sqrt()))
}

/// Three-site momentum-space spectrum in units of ω₀: the zero-momentum pair
/// and the doubly degenerate pair at k = ±2π/3, each as (lower, upper).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimerSpectrum {
    pub zero_momentum: (f64, f64),
    pub finite_momentum: (f64, f64),
}

impl TrimerSpectrum {
    /// All six energies ascending, the finite-momentum ones listed twice.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = vec![
            self.zero_momentum.0,
            self.zero_momentum.1,
            self.finite_momentum.0,
            self.finite_momentum.0,
            self.finite_momentum.1,
            self.finite_momentum.1,
        ];
        v.sort_by(f64::total_cmp);
        v
    }
}

fn check_analytic(g: f64, jbar: f64, omegabar: f64) -> Result<()> {
    if !(g >= 0.0 && g.is_finite()) || !(omegabar > 0.0 && omegabar.is_finite()) {
        return Err(Error::Domain(format!("need g >= 0 and omegabar > 0, got {g}, {omegabar}")));
    }
    if !(jbar > -0.5 && jbar < 1.0) {
        return Err(Error::Domain(format!("jbar = {jbar} outside the stability window")));
    }
    Ok(())
}

/// Normal-phase spectrum of the three-site ring, in units of ω₀.
pub fn analytic_np_spectrum(g: f64, jbar: f64, omegabar: f64) -> Result<TrimerSpectrum> {
    check_analytic(g, jbar, omegabar)?;
    let branch = |w: f64| two_branch(w * w, omegabar * omegabar, omegabar * omegabar * w * g * g);
    Ok(TrimerSpectrum {
        zero_momentum: branch(1.0 + 2.0 * jbar)?,
        finite_momentum: branch(1.0 - jbar)?,
    })
}

/// Spectrum of the uniform superradiant phase of the three-site ring, in
/// units of ω₀.
pub fn analytic_nfsp_spectrum(g: f64, jbar: f64, omegabar: f64) -> Result<TrimerSpectrum> {
    check_analytic(g, jbar, omegabar)?;
    if jbar >= 0.0 {
        return Err(Error::Domain(format!("uniform superradiant phase needs jbar < 0, got {jbar}")));
    }
    let gc2 = 1.0 + 2.0 * jbar;
    if g < gc2.sqrt() {
        return Err(Error::Domain(format!("g = {g} lies below the critical coupling {}", gc2.sqrt())));
    }
    let atom_sq = g.powi(4) * omegabar * omegabar / (gc2 * gc2);
    let branch = |w: f64| two_branch(w * w, atom_sq, omegabar * omegabar * gc2 * w);
    Ok(TrimerSpectrum {
        zero_momentum: branch(gc2)?,
        finite_momentum: branch(1.0 - jbar)?,
    })
}

/// Energy of the frustrated mode of the three-site ring in units of ω₀,
/// from the amplitude of the ferromagnetic pair.
pub fn fsp_frustrated_mode_energy(g: f64, jbar: f64, omegabar: f64, alpha_pair: f64) -> Result<f64> {
    check_analytic(g, jbar, omegabar)?;
    if jbar <= 0.0 {
        return Err(Error::Domain(format!("frustrated mode needs jbar > 0, got {jbar}")));
    }
    let gc = (1.0 - jbar).sqrt();
    let s = 1.0 + 4.0 * g * g * alpha_pair * alpha_pair;
    let a_plus = 0.5 * (gc.powi(4) + omegabar * omegabar * s);
    let a_minus = 0.5 * (gc.powi(4) - omegabar * omegabar * s);
    let inner = a_minus * a_minus + (omegabar * gc * g).powi(2) / s.sqrt();
    let outer = a_plus - inner.sqrt();
    if outer < 0.0 {
        if outer < -1e-13 * a_plus {
            return Err(Error::Instability(format!("frustrated-mode radicand negative ({outer:e})")));
        }
        return Ok(0.0);
    }
    Ok(outer.sqrt())
}
