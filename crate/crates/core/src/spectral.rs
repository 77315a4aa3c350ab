//! Fourier bookkeeping on the periodic square `[0, L)²`.
//!
//! Fields are stored row-major with index `iy * n + ix`. The forward
//! transform carries the `1/N²` factor so the zero mode is the field mean and
//! the inverse transform is a plain sum `f(x) = Σ f̂(k) e^{i k·x}`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid on the nondimensional square of side `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub length: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::config(format!("domain length must be positive (got {length})")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::config(format!("grid size must be a power of two >= 8 (got {n})")));
        }
        Ok(Grid { length, n })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Coordinates of the grid point with flat index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let dx = self.dx();
        [(idx % self.n) as f64 * dx, (idx / self.n) as f64 * dx]
    }

    /// Wraps a position into `[0, L)²`.
    pub fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        let w = |v: f64| {
            let r = v.rem_euclid(self.length);
            if r >= self.length {
                0.0
            } else {
                r
            }
        };
        [w(p[0]), w(p[1])]
    }

    /// Flat index of the grid cell nearest to `p`.
    pub fn nearest(&self, p: [f64; 2]) -> usize {
        let p = self.wrap(p);
        let dx = self.dx();
        let ix = ((p[0] / dx).round() as usize) % self.n;
        let iy = ((p[1] / dx).round() as usize) % self.n;
        iy * self.n + ix
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> GridField {
        let values = (0..self.len())
            .map(|i| {
                let [x, y] = self.point(i);
                f(x, y)
            })
            .collect();
        GridField { n: self.n, values }
    }
}

/// Real scalar field sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub n: usize,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn zeros(n: usize) -> Self {
        GridField {
            n,
            values: vec![0.0; n * n],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Complex Fourier coefficients on the FFT index set.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub n: usize,
    pub coeffs: Vec<Complex64>,
    /// Set when the coefficients represent a real field (Hermitian symmetric).
    pub real: bool,
}

impl SpectralField {
    pub fn zeros(n: usize) -> Self {
        SpectralField {
            n,
            coeffs: vec![Complex64::new(0.0, 0.0); n * n],
            real: true,
        }
    }

    /// Largest violation of `f̂(-k) = conj f̂(k)`, relative to the largest
    /// coefficient magnitude.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut scale = 0.0f64;
        let mut defect = 0.0f64;
        for iy in 0..n {
            for ix in 0..n {
                let a = self.coeffs[iy * n + ix];
                let b = self.coeffs[((n - iy) % n) * n + (n - ix) % n];
                scale = scale.max(a.norm());
                defect = defect.max((a - b.conj()).norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// `Σ |f̂|²`, equal to the mean of `|f|²` under the forward normalization.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.coeffs {
            *c *= s;
        }
    }

    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += a * o;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Signed mode number for FFT index `i` on an `n`-point axis. The Nyquist
/// index `n/2` maps to `-n/2`.
pub fn mode_number(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Wavevector tables for a grid.
#[derive(Debug, Clone)]
pub struct FourierBasis {
    pub grid: Grid,
    /// Wavenumber along one axis per FFT index.
    pub axis: Vec<f64>,
    /// `‖k‖²` per flat index.
    pub k2: Vec<f64>,
    /// `‖k‖` per flat index.
    pub kmag: Vec<f64>,
}

impl FourierBasis {
    pub fn new(grid: Grid) -> Self {
        let n = grid.n;
        let dk = 2.0 * PI / grid.length;
        let axis: Vec<f64> = (0..n).map(|i| dk * mode_number(i, n) as f64).collect();
        let mut k2 = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..n {
                k2[iy * n + ix] = axis[ix] * axis[ix] + axis[iy] * axis[iy];
            }
        }
        let kmag = k2.iter().map(|v| v.sqrt()).collect();
        FourierBasis { grid, axis, k2, kmag }
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 2] {
        let n = self.n();
        [self.axis[idx % n], self.axis[idx / n]]
    }

    pub fn modes(&self, idx: usize) -> [i64; 2] {
        let n = self.n();
        [mode_number(idx % n, n), mode_number(idx / n, n)]
    }

    /// Flat index of the mode with numbers `(m1, m2)`.
    pub fn index_of(&self, m: [i64; 2]) -> usize {
        let n = self.n() as i64;
        (m[1].rem_euclid(n) * n + m[0].rem_euclid(n)) as usize
    }

    /// Index of `-k`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n();
        let (ix, iy) = (idx % n, idx / n);
        ((n - iy) % n) * n + (n - ix) % n
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        let n = self.n();
        idx % n == n / 2 || idx / n == n / 2
    }

    /// The nonzero, non-Nyquist wavevectors: those whose partner `-k` is a
    /// distinct entry of the index set.
    pub fn is_active(&self, idx: usize) -> bool {
        idx != 0 && !self.is_nyquist(idx)
    }

    /// Mask of modes kept by the 2/3 dealiasing rule.
    pub fn dealias_mask(&self) -> Vec<bool> {
        let n = self.n() as i64;
        (0..self.len())
            .map(|i| {
                let [a, b] = self.modes(i);
                3 * a.abs() < n && 3 * b.abs() < n
            })
            .collect()
    }
}

/// Two-dimensional complex FFT with the forward `1/N²` normalization.
#[derive(Clone)]
pub struct Fft2d {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2d").field("n", &self.n).finish()
    }
}

impl Fft2d {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2d {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        plan.process(data);
        transpose(data, n);
        plan.process(data);
        transpose(data, n);
    }

    pub fn forward_complex(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
        let s = 1.0 / (self.n * self.n) as f64;
        for c in data.iter_mut() {
            *c *= s;
        }
    }

    pub fn inverse_complex(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    pub fn forward(&self, field: &GridField) -> Result<SpectralField> {
        if field.n != self.n || field.values.len() != self.n * self.n {
            return Err(Error::SizeMismatch {
                expected: self.n * self.n,
                found: field.values.len(),
            });
        }
        let mut coeffs: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_complex(&mut coeffs);
        Ok(SpectralField {
            n: self.n,
            coeffs,
            real: true,
        })
    }

    /// Inverse transform; the imaginary part is discarded.
    pub fn inverse(&self, field: &SpectralField) -> Result<GridField> {
        if field.n != self.n || field.coeffs.len() != self.n * self.n {
            return Err(Error::SizeMismatch {
                expected: self.n * self.n,
                found: field.coeffs.len(),
            });
        }
        let mut data = field.coeffs.clone();
        self.inverse_complex(&mut data);
        Ok(GridField {
            n: self.n,
            values: data.into_iter().map(|c| c.re).collect(),
        })
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Multiplies every mode by `-‖k‖²`.
pub fn laplacian_spectral(f: &SpectralField, basis: &FourierBasis) -> SpectralField {
    SpectralField {
        n: f.n,
        coeffs: f.coeffs.iter().zip(&basis.k2).map(|(c, k2)| -k2 * c).collect(),
        real: f.real,
    }
}

/// Five-point Laplacian with periodic wrap.
pub fn laplacian_cd2(f: &GridField, dx: f64) -> GridField {
    let n = f.n;
    let inv = 1.0 / (dx * dx);
    let v = &f.values;
    let mut out = vec![0.0; n * n];
    for iy in 0..n {
        let up = ((iy + 1) % n) * n;
        let down = ((iy + n - 1) % n) * n;
        let row = iy * n;
        for ix in 0..n {
            let right = (ix + 1) % n;
            let left = (ix + n - 1) % n;
            out[row + ix] =
                (v[row + right] + v[row + left] + v[up + ix] + v[down + ix] - 4.0 * v[row + ix]) * inv;
        }
    }
    GridField { n, values: out }
}

/// Per-axis phase factors `e^{i k x}` and their derivatives for off-grid
/// evaluation. The Nyquist column uses `cos(k x)` so real fields stay real.
fn axis_factors(basis: &FourierBasis, x: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = basis.n();
    let mut e = Vec::with_capacity(n);
    let mut de = Vec::with_capacity(n);
    for i in 0..n {
        let k = basis.axis[i];
        if i == n / 2 {
            e.push(Complex64::new((k * x).cos(), 0.0));
            de.push(Complex64::new(-k * (k * x).sin(), 0.0));
        } else {
            let p = Complex64::from_polar(1.0, k * x);
            e.push(p);
            de.push(Complex64::new(0.0, k) * p);
        }
    }
    (e, de)
}

/// Value of the band-limited field at an arbitrary point by direct Fourier
/// summation.
pub fn eval_at(f: &SpectralField, basis: &FourierBasis, p: [f64; 2]) -> f64 {
    let n = basis.n();
    let (ex, _) = axis_factors(basis, p[0]);
    let (ey, _) = axis_factors(basis, p[1]);
    let mut sum = Complex64::new(0.0, 0.0);
    for iy in 0..n {
        let mut row = Complex64::new(0.0, 0.0);
        for ix in 0..n {
            row += f.coeffs[iy * n + ix] * ex[ix];
        }
        sum += row * ey[iy];
    }
    sum.re
}

/// Gradient of the band-limited field at an arbitrary point.
pub fn grad_at(f: &SpectralField, basis: &FourierBasis, p: [f64; 2]) -> [f64; 2] {
    let n = basis.n();
    let (ex, dex) = axis_factors(basis, p[0]);
    let (ey, dey) = axis_factors(basis, p[1]);
    let mut gx = Complex64::new(0.0, 0.0);
    let mut gy = Complex64::new(0.0, 0.0);
    for iy in 0..n {
        let mut row_dx = Complex64::new(0.0, 0.0);
        let mut row = Complex64::new(0.0, 0.0);
        for ix in 0..n {
            let c = f.coeffs[iy * n + ix];
            row_dx += c * dex[ix];
            row += c * ex[ix];
        }
        gx += row_dx * ey[iy];
        gy += row * dey[iy];
    }
    [gx.re, gy.re]
}

/// Gradient by bilinear interpolation of centred differences on the grid.
/// Cheaper than [`grad_at`] and only second-order accurate.
pub fn grad_bilinear(f: &GridField, grid: &Grid, p: [f64; 2]) -> [f64; 2] {
    let n = grid.n;
    let dx = grid.dx();
    let p = grid.wrap(p);
    let fx = p[0] / dx;
    let fy = p[1] / dx;
    let ix = fx.floor() as usize % n;
    let iy = fy.floor() as usize % n;
    let tx = fx - fx.floor();
    let ty = fy - fy.floor();
    let v = |i: usize, j: usize| f.values[(j % n) * n + (i % n)];
    let grad = |i: usize, j: usize| {
        [
            (v(i + 1, j) - v(i + n - 1, j)) / (2.0 * dx),
            (v(i, j + 1) - v(i, j + n - 1)) / (2.0 * dx),
        ]
    };
    let g00 = grad(ix, iy);
    let g10 = grad(ix + 1, iy);
    let g01 = grad(ix, iy + 1);
    let g11 = grad(ix + 1, iy + 1);
    let mut out = [0.0; 2];
    for c in 0..2 {
        out[c] = (1.0 - tx) * (1.0 - ty) * g00[c] + tx * (1.0 - ty) * g10[c] + (1.0 - tx) * ty * g01[c] + tx * ty * g11[c];
    }
    out
}
