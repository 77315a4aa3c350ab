//! Dirichlet-to-Neumann map for the surface potential.
//!
//! Over a flat bed of reference depth the map is the Fourier multiplier
//! `μ‖k‖ tanh(μ‖k‖)`. Over variable topography the bulk potential is written
//!
//! ```text
//! φ(x, z) = q̂(0) + Σ_k e^{ik·x} [ q̂(k) cosh(μk(z+1))/cosh(μk) + X_k sinh(μkz)/(k cosh²(μk)) ]
//! ```
//!
//! and the topographic coefficients `X_k` are fixed by requiring the
//! no-flux bottom condition to hold in the Galerkin sense: the residual
//! `B_M[X] - A[q̂]` is orthogonal to every exponential with `‖w‖ ≤ M`.
//! Inside the hyperbolic factors the bottom enters through the depth
//! excess `b(x) = H(x) - 1` over the reference depth, so a bed at the
//! reference depth produces `X = 0` exactly.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{Fft2d, FourierBasis, GridField, SpectralField};
use crate::topography::Topography;

/// Largest accepted 1-norm condition number of the column-equilibrated
/// Galerkin matrix.
pub const MAX_CONDITION: f64 = 1e12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `μk tanh(μk d)` for a flat bed of relative depth `d`.
pub fn flat_multiplier(mu: f64, k: f64, depth: f64) -> f64 {
    mu * k * (mu * k * depth).tanh()
}

/// Flat-bed DtN at the reference depth. The zero mode maps to zero.
pub fn dtn_flat(q: &SpectralField, basis: &FourierBasis, mu: f64) -> SpectralField {
    FlatDtn::new(basis, mu, 1.0).apply(q)
}

/// Precomputed flat-bed multiplier table.
#[derive(Debug, Clone)]
pub struct FlatDtn {
    multiplier: Vec<f64>,
}

impl FlatDtn {
    pub fn new(basis: &FourierBasis, mu: f64, depth: f64) -> Self {
        FlatDtn {
            multiplier: basis.kmag.iter().map(|&k| flat_multiplier(mu, k, depth)).collect(),
        }
    }

    pub fn apply(&self, q: &SpectralField) -> SpectralField {
        let mut out = q.clone();
        for (c, m) in out.coeffs.iter_mut().zip(&self.multiplier) {
            *c *= *m;
        }
        out.coeffs[0] = Complex64::new(0.0, 0.0);
        out
    }
}

/// `X_k` for each mode of the Galerkin index set.
#[derive(Debug, Clone, PartialEq)]
pub struct TopographicCoefficients {
    /// Flat indices of the modes, in the operator's truncated order.
    pub modes: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl TopographicCoefficients {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

// Stable forms of the hyperbolic factors for large μk.

/// `sinh(a b) / cosh(a)`
fn sinh_ratio(a: f64, b: f64) -> f64 {
    ((a * (b - 1.0)).exp() - (-a * (b + 1.0)).exp()) / (1.0 + (-2.0 * a).exp())
}

/// `cosh(a (1 + b)) / cosh²(a)`
fn cosh_ratio2(a: f64, b: f64) -> f64 {
    let d = 1.0 + (-2.0 * a).exp();
    2.0 * ((a * (b - 1.0)).exp() + (-a * (b + 3.0)).exp()) / (d * d)
}

/// `cosh(a (z + 1)) / cosh(a)`
fn surface_decay(a: f64, z: f64) -> f64 {
    ((a * z).exp() + (-a * (z + 2.0)).exp()) / (1.0 + (-2.0 * a).exp())
}

/// `sinh(a z) / cosh²(a)`
fn topographic_decay(a: f64, z: f64) -> f64 {
    let d = 1.0 + (-2.0 * a).exp();
    2.0 * ((a * (z - 2.0)).exp() - (-a * (z + 2.0)).exp()) / (d * d)
}

/// `sech²(a)`
fn sech2(a: f64) -> f64 {
    let c = (-2.0 * a).exp();
    4.0 * c / ((1.0 + c) * (1.0 + c))
}

/// Galerkin DtN operator for a fixed topography.
pub struct DtnOperator {
    basis: FourierBasis,
    mu: f64,
    radius: usize,
    max_depth: f64,
    /// Test/trial index set `0 < ‖k‖ ≤ M`, excluding Nyquist modes.
    truncated: Vec<usize>,
    /// Every nonzero non-Nyquist mode.
    active: Vec<usize>,
    /// `⟨A[e_k], e_w⟩`, rows over `truncated`, columns over `active`.
    a: Vec<Complex64>,
    /// `⟨B_M[e_k], e_w⟩`, square over `truncated`.
    b: DMatrix<Complex64>,
    /// LU of `B_M` with columns scaled by `cosh(μk)`.
    lu: LU<Complex64, Dyn, Dyn>,
    col_scale: Vec<f64>,
    condition: f64,
    flat: FlatDtn,
    /// `μ sech²(μk) X` as a dense map from active to truncated modes, once
    /// [`DtnOperator::precompute`] has run.
    dense: Option<DenseCorrection>,
}

impl std::fmt::Debug for DtnOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DtnOperator")
            .field("n", &self.basis.n())
            .field("mu", &self.mu)
            .field("radius", &self.radius)
            .field("modes", &self.truncated.len())
            .field("condition", &self.condition)
            .finish()
    }
}

/// Modes with `0 < ‖n‖ ≤ radius` (mode-number units), skipping Nyquist.
pub fn galerkin_modes(basis: &FourierBasis, radius: usize) -> Vec<usize> {
    let r2 = (radius * radius) as i64;
    (0..basis.len())
        .filter(|&i| {
            let [a, b] = basis.modes(i);
            basis.is_active(i) && a * a + b * b <= r2
        })
        .collect()
}

/// Default Galerkin radius: one third of the grid size.
pub fn default_radius(n: usize) -> usize {
    n / 3
}

impl DtnOperator {
    /// Builds the `A` and `B_M` matrices by projecting the grid-sampled
    /// divergence terms onto each test exponential with a forward FFT, then
    /// factorizes `B_M`.
    pub fn assemble(topo: &Topography, basis: &FourierBasis, mu: f64, radius: usize) -> Result<Self> {
        let n = basis.n();
        if topo.grid != basis.grid {
            return Err(Error::SizeMismatch {
                expected: basis.len(),
                found: topo.grid.len(),
            });
        }
        if radius == 0 || radius >= n / 2 {
            return Err(Error::config(format!(
                "M_galerkin = {radius} shells must lie in 1..{} for a {n}-point grid",
                n / 2
            )));
        }
        let truncated = galerkin_modes(basis, radius);
        let active: Vec<usize> = (0..basis.len()).filter(|&i| basis.is_active(i)).collect();
        let excess: Vec<f64> = topo.depth.values.iter().map(|h| h - 1.0).collect();

        // The hyperbolic factors depend on k only through ‖k‖; group modes by
        // the integer ‖n‖² so each magnitude needs one transform.
        let mut shells: BTreeMap<i64, f64> = BTreeMap::new();
        for &i in &active {
            let [a, b] = basis.modes(i);
            shells.insert(a * a + b * b, basis.kmag[i]);
        }
        let r2 = (radius * radius) as i64;
        let fft = Fft2d::new(n);
        let transformed: BTreeMap<i64, (Vec<Complex64>, Option<Vec<Complex64>>)> = shells
            .par_iter()
            .map(|(&key, &k)| {
                let a = mu * k;
                let mut f: Vec<Complex64> = excess.iter().map(|&b| Complex64::new(sinh_ratio(a, b), 0.0)).collect();
                fft.forward_complex(&mut f);
                let g = (key <= r2).then(|| {
                    let mut g: Vec<Complex64> = excess.iter().map(|&b| Complex64::new(cosh_ratio2(a, b), 0.0)).collect();
                    fft.forward_complex(&mut g);
                    g
                });
                (key, (f, g))
            })
            .collect();

        let shell_of = |i: usize| {
            let [a, b] = basis.modes(i);
            a * a + b * b
        };
        let diff_index = |w: usize, k: usize| {
            let mw = basis.modes(w);
            let mk = basis.modes(k);
            basis.index_of([mw[0] - mk[0], mw[1] - mk[1]])
        };
        let dot = |w: usize, k: usize| {
            let kw = basis.wavevector(w);
            let kk = basis.wavevector(k);
            kw[0] * kk[0] + kw[1] * kk[1]
        };

        let cols = active.len();
        let mut a_mat = vec![Complex64::new(0.0, 0.0); truncated.len() * cols];
        a_mat.par_chunks_mut(cols).zip(truncated.par_iter()).for_each(|(row, &w)| {
            for (entry, &k) in row.iter_mut().zip(&active) {
                let f = &transformed[&shell_of(k)].0;
                *entry = I * (dot(w, k) / basis.kmag[k]) * f[diff_index(w, k)];
            }
        });

        let m = truncated.len();
        let mut b = DMatrix::<Complex64>::zeros(m, m);
        for (r, &w) in truncated.iter().enumerate() {
            for (c, &k) in truncated.iter().enumerate() {
                let g = transformed[&shell_of(k)].1.as_ref().expect("truncated shells carry g");
                b[(r, c)] = I * (dot(w, k) / basis.k2[k]) * g[diff_index(w, k)];
            }
        }

        let col_scale: Vec<f64> = truncated.iter().map(|&k| (mu * basis.kmag[k]).cosh()).collect();
        let mut scaled = b.clone();
        for (c, s) in col_scale.iter().enumerate() {
            scaled.column_mut(c).scale_mut(*s);
        }
        let norm1 = one_norm(&scaled);
        let lu = scaled.clone().lu();
        let condition = if lu.is_invertible() {
            norm1 * inverse_one_norm_estimate(&lu, &scaled)
        } else {
            f64::INFINITY
        };
        if !(condition.is_finite() && condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned { radius, condition });
        }

        Ok(DtnOperator {
            basis: basis.clone(),
            mu,
            radius,
            max_depth: topo.max_depth(),
            truncated,
            active,
            a: a_mat,
            b,
            lu,
            col_scale,
            condition,
            flat: FlatDtn::new(basis, mu, 1.0),
            dense: None,
        })
    }

    pub fn basis(&self) -> &FourierBasis {
        &self.basis
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Galerkin radius in mode-number units.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Truncation wavenumber `M` in nondimensional units.
    pub fn cutoff(&self) -> f64 {
        self.radius as f64 * 2.0 * std::f64::consts::PI / self.basis.grid.length
    }

    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    pub fn truncated_modes(&self) -> &[usize] {
        &self.truncated
    }

    pub fn active_modes(&self) -> &[usize] {
        &self.active
    }

    /// Entry `⟨A[e_k], e_w⟩` by positions in the truncated and active lists.
    pub fn a_entry(&self, row: usize, col: usize) -> Complex64 {
        self.a[row * self.active.len() + col]
    }

    pub fn b_matrix(&self) -> &DMatrix<Complex64> {
        &self.b
    }

    /// `A q̂` restricted to the test space.
    pub fn project_dirichlet(&self, q: &SpectralField) -> Vec<Complex64> {
        let cols = self.active.len();
        let qa: Vec<Complex64> = self.active.iter().map(|&k| q.coeffs[k]).collect();
        self.a
            .chunks(cols)
            .map(|row| row.iter().zip(&qa).map(|(a, q)| a * q).sum())
            .collect()
    }

    pub fn solve_coefficients(&self, q: &SpectralField) -> Result<TopographicCoefficients> {
        if q.n != self.basis.n() {
            return Err(Error::SizeMismatch {
                expected: self.basis.len(),
                found: q.coeffs.len(),
            });
        }
        let rhs = DVector::from_vec(self.project_dirichlet(q));
        let y = self.lu.solve(&rhs).ok_or(Error::IllConditioned {
            radius: self.radius,
            condition: f64::INFINITY,
        })?;
        Ok(TopographicCoefficients {
            modes: self.truncated.clone(),
            values: y.iter().zip(&self.col_scale).map(|(v, s)| v * *s).collect(),
        })
    }

    /// Full DtN: flat multiplier on every mode plus `μ X_k sech²(μk)` on the
    /// Galerkin modes.
    pub fn apply_with(&self, q: &SpectralField, x: &TopographicCoefficients) -> SpectralField {
        let mut out = self.flat.apply(q);
        for (&k, xk) in x.modes.iter().zip(&x.values) {
            out.coeffs[k] += self.mu * xk * sech2(self.mu * self.basis.kmag[k]);
        }
        out
    }

    pub fn dtn_variable(&self, q: &SpectralField) -> Result<SpectralField> {
        let Some(dense) = &self.dense else {
            let x = self.solve_coefficients(q)?;
            return Ok(self.apply_with(q, &x));
        };
        if q.n != self.basis.n() {
            return Err(Error::SizeMismatch {
                expected: self.basis.len(),
                found: q.coeffs.len(),
            });
        }
        let qr: Vec<f64> = self.active.iter().map(|&k| q.coeffs[k].re).collect();
        let qi: Vec<f64> = self.active.iter().map(|&k| q.coeffs[k].im).collect();
        let cols = self.active.len();
        let mut out = self.flat.apply(q);
        for (r, &(k, kc)) in dense.rows.iter().enumerate() {
            let span = r * cols..(r + 1) * cols;
            let c = complex_dot(&dense.re[span.clone()], &dense.im[span], &qr, &qi);
            out.coeffs[k] += c;
            out.coeffs[kc] += c.conj();
        }
        Ok(out)
    }

    /// Folds the solve into one dense matrix so that [`Self::dtn_variable`]
    /// costs a single matrix-vector product. Worth it when the operator is
    /// applied many times, as in time stepping. Only one row of each
    /// conjugate pair is stored; real input gives exactly Hermitian output.
    pub fn precompute(&mut self) {
        let m = self.truncated.len();
        let cols = self.active.len();
        let a = DMatrix::from_row_slice(m, cols, &self.a);
        let Some(y) = self.lu.solve(&a) else {
            return;
        };
        let mut dense = DenseCorrection {
            rows: Vec::with_capacity(m / 2),
            re: Vec::with_capacity(m / 2 * cols),
            im: Vec::with_capacity(m / 2 * cols),
        };
        for (r, &k) in self.truncated.iter().enumerate() {
            let kc = self.basis.conjugate_index(k);
            if kc < k {
                continue;
            }
            let s = self.col_scale[r] * self.mu * sech2(self.mu * self.basis.kmag[k]);
            dense.rows.push((k, kc));
            for c in 0..cols {
                let v = y[(r, c)] * s;
                dense.re.push(v.re);
                dense.im.push(v.im);
            }
        }
        self.dense = Some(dense);
    }

    /// Spectrum of the bulk potential at height `z` (units of the reference
    /// depth). No range check: above the surface this is the harmonic
    /// continuation of the same mode sum.
    pub fn potential_spectrum(&self, q: &SpectralField, x: &TopographicCoefficients, z: f64) -> SpectralField {
        let mut out = q.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate().skip(1) {
            *c *= surface_decay(self.mu * self.basis.kmag[i], z);
        }
        for (&k, xk) in x.modes.iter().zip(&x.values) {
            let kk = self.basis.kmag[k];
            out.coeffs[k] += xk * topographic_decay(self.mu * kk, z) / kk;
        }
        out
    }

    /// Bulk potential on the grid at height `z ∈ [-H_max, 0]`.
    pub fn reconstruct_potential(&self, q: &SpectralField, x: &TopographicCoefficients, z: f64) -> Result<GridField> {
        if !(z <= 0.0 && z >= -self.max_depth) {
            return Err(Error::config(format!(
                "depth z = {z} outside [-{}, 0]",
                self.max_depth
            )));
        }
        Fft2d::new(self.basis.n()).inverse(&self.potential_spectrum(q, x, z))
    }
}

#[derive(Debug, Clone)]
struct DenseCorrection {
    /// `(mode, conjugate mode)` per stored row.
    rows: Vec<(usize, usize)>,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// `Σ (ar + i ai)(br + i bi)` over split real/imaginary slices, with four
/// independent partial sums so the loop vectorizes.
fn complex_dot(ar: &[f64], ai: &[f64], br: &[f64], bi: &[f64]) -> Complex64 {
    let mut sr = [0.0f64; 4];
    let mut si = [0.0f64; 4];
    let lanes = ar
        .chunks_exact(4)
        .zip(ai.chunks_exact(4))
        .zip(br.chunks_exact(4).zip(bi.chunks_exact(4)));
    for ((a, b), (c, d)) in lanes {
        for l in 0..4 {
            sr[l] += a[l] * c[l] - b[l] * d[l];
            si[l] += a[l] * d[l] + b[l] * c[l];
        }
    }
    let mut re = sr.iter().sum::<f64>();
    let mut im = si.iter().sum::<f64>();
    let tail = ar.len() / 4 * 4;
    for j in tail..ar.len() {
        re += ar[j] * br[j] - ai[j] * bi[j];
        im += ar[j] * bi[j] + ai[j] * br[j];
    }
    Complex64::new(re, im)
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Hager–Higham estimate of `‖M⁻¹‖₁` from the LU factors.
fn inverse_one_norm_estimate(lu: &LU<Complex64, Dyn, Dyn>, m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    // P M = L U, so M^H z = b unwinds as U^H, then L^H, then P^-1.
    let (l, u) = (lu.l(), lu.u());
    let adjoint_solve = |b: &DVector<Complex64>| {
        let y = u.ad_solve_upper_triangular(b)?;
        let mut z = l.ad_solve_lower_triangular(&y)?;
        lu.p().inv_permute_rows(&mut z);
        Some(z)
    };
    let mut x = DVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
    let mut estimate = 0.0;
    for _ in 0..5 {
        let Some(y) = lu.solve(&x) else {
            return f64::INFINITY;
        };
        estimate = y.iter().map(|v| v.norm()).sum::<f64>();
        let xi = y.map(|v| {
            let a = v.norm();
            if a == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                v / a
            }
        });
        let Some(z) = adjoint_solve(&xi) else {
            return f64::INFINITY;
        };
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.norm()))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let zx: f64 = z.iter().zip(x.iter()).map(|(a, b)| (a.conj() * b).re).sum();
        if zmax <= zx {
            break;
        }
        x = DVector::from_element(n, Complex64::new(0.0, 0.0));
        x[j] = Complex64::new(1.0, 0.0);
    }
    estimate
}

/// DtN closure used by the time stepper.
#[derive(Debug)]
pub enum DtnModel {
    Flat(FlatDtn),
    Variable(Box<DtnOperator>),
}

impl DtnModel {
    pub fn apply(&self, q: &SpectralField) -> Result<SpectralField> {
        match self {
            DtnModel::Flat(f) => Ok(f.apply(q)),
            DtnModel::Variable(op) => op.dtn_variable(q),
        }
    }
}
