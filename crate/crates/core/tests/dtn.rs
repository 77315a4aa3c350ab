mod common;

use common::{cosine_mode, max_diff, random_real, rng, silicone};
use num_complex::Complex64;
use pilotwave::dtn::{dtn_flat, flat_multiplier, DtnOperator, FlatDtn};
use pilotwave::spectral::{Fft2d, FourierBasis, Grid, GridField, SpectralField};
use pilotwave::topography::{self, CavitySpec, Topography};
use proptest::prelude::*;

fn mu() -> f64 {
    silicone(0.0).groups.mu
}

fn topo_from(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Topography {
    Topography::from_field(grid, grid.sample(f)).unwrap()
}

fn two_cavities(n: usize) -> Topography {
    let grid = Grid::new(8.0, n).unwrap();
    topography::cavities(
        grid,
        CavitySpec {
            rows: 1,
            cols: 2,
            well_width: 2.0,
            barrier_width: 0.5,
            deep_depth: 1.0,
            shallow_depth: 1.0 / 12.0,
            smoothing: 0.5,
        },
    )
    .unwrap()
}

/// Weak-form inner product `⟨∇·(v e^{ik·x}), e^{iw·x}⟩` by direct trapezoidal
/// summation, after moving the divergence onto the test function:
/// `(1/N²) Σ_j (i w·v) f(x_j) e^{i(k-w)·x_j}` for a direction `v` and
/// pointwise weight `f`.
fn quadrature(basis: &FourierBasis, f: &[f64], v: [f64; 2], k: usize, w: usize) -> Complex64 {
    let grid = basis.grid;
    let kk = basis.wavevector(k);
    let kw = basis.wavevector(w);
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, fj) in f.iter().enumerate() {
        let x = grid.point(j);
        let phase = (kk[0] - kw[0]) * x[0] + (kk[1] - kw[1]) * x[1];
        sum += fj * Complex64::from_polar(1.0, phase);
    }
    Complex64::new(0.0, kw[0] * v[0] + kw[1] * v[1]) * sum / grid.len() as f64
}

#[test]
fn galerkin_matrices_match_quadrature() {
    let grid = Grid::new(4.0, 8).unwrap();
    let basis = FourierBasis::new(grid);
    let mu = mu();
    let topo = topo_from(grid, |x, y| {
        1.0 + 0.3 * (std::f64::consts::TAU * x / 4.0).cos() * (std::f64::consts::TAU * y / 4.0).sin() - 0.1
    });
    let op = DtnOperator::assemble(&topo, &basis, mu, 2).unwrap();
    let b_excess: Vec<f64> = topo.depth.values.iter().map(|h| h - 1.0).collect();
    let mut worst: f64 = 0.0;
    for (r, &w) in op.truncated_modes().iter().enumerate() {
        for (c, &k) in op.active_modes().iter().enumerate() {
            let km = basis.kmag[k];
            let kv = basis.wavevector(k);
            let f: Vec<f64> = b_excess.iter().map(|b| (mu * km * b).sinh() / (mu * km).cosh()).collect();
            let expected = quadrature(&basis, &f, [kv[0] / km, kv[1] / km], k, w);
            worst = worst.max((op.a_entry(r, c) - expected).norm());
        }
        for (c, &k) in op.truncated_modes().iter().enumerate() {
            let km = basis.kmag[k];
            let kv = basis.wavevector(k);
            let g: Vec<f64> = b_excess
                .iter()
                .map(|b| (mu * km * (1.0 + b)).cosh() / (mu * km).cosh().powi(2))
                .collect();
            let expected = quadrature(&basis, &g, [kv[0] / (km * km), kv[1] / (km * km)], k, w);
            worst = worst.max((op.b_matrix()[(r, c)] - expected).norm());
        }
    }
    assert!(worst < 1e-10, "largest entry mismatch {worst:e}");
}

#[test]
fn reference_depth_reduces_to_flat() {
    let grid = Grid::new(8.0, 32).unwrap();
    let basis = FourierBasis::new(grid);
    let op = DtnOperator::assemble(&topography::flat(grid, 1.0).unwrap(), &basis, mu(), 10).unwrap();
    let mut r = rng(1);
    for _ in 0..5 {
        let q = random_real(&basis, 15.0, &mut r);
        assert!(op.solve_coefficients(&q).unwrap().max_abs() < 1e-10);
        assert!(max_diff(&op.dtn_variable(&q).unwrap(), &dtn_flat(&q, &basis, mu())) < 1e-10);
    }
}

#[test]
fn constant_depth_matches_flat_multiplier_at_that_depth() {
    let grid = Grid::new(8.0, 32).unwrap();
    let basis = FourierBasis::new(grid);
    let radius = 10;
    for h0 in [0.4, 0.75, 1.3] {
        let op = DtnOperator::assemble(&topography::flat(grid, h0).unwrap(), &basis, mu(), radius).unwrap();
        let q = random_real(&basis, radius as f64, &mut rng(2));
        let out = op.dtn_variable(&q).unwrap();
        let expected = FlatDtn::new(&basis, mu(), h0).apply(&q);
        let scale = expected.max_abs();
        assert!(max_diff(&out, &expected) < 1e-9 * scale, "h0 = {h0}");
    }
}

#[test]
fn transposition_symmetric_bed_commutes_with_transposition() {
    let grid = Grid::new(8.0, 16).unwrap();
    let basis = FourierBasis::new(grid);
    let topo = topo_from(grid, |x, y| {
        let t = std::f64::consts::TAU / 8.0;
        1.0 - 0.2 * (t * x).cos() - 0.2 * (t * y).cos() + 0.1 * (t * (x + y)).sin()
    });
    let op = DtnOperator::assemble(&topo, &basis, mu(), 5).unwrap();
    let modes = op.truncated_modes();
    let pos = |i: usize| modes.iter().position(|&m| m == i).unwrap();
    let swap: Vec<usize> = modes
        .iter()
        .map(|&i| {
            let [a, b] = basis.modes(i);
            pos(basis.index_of([b, a]))
        })
        .collect();
    let b = op.b_matrix();
    let mut worst: f64 = 0.0;
    for r in 0..modes.len() {
        for c in 0..modes.len() {
            worst = worst.max((b[(r, c)] - b[(swap[r], swap[c])]).norm());
        }
    }
    assert!(worst < 1e-10, "{worst:e}");
}

#[test]
fn zero_data_gives_zero_coefficients() {
    let topo = two_cavities(32);
    let basis = FourierBasis::new(topo.grid);
    let op = DtnOperator::assemble(&topo, &basis, mu(), 10).unwrap();
    let x = op.solve_coefficients(&SpectralField::zeros(32)).unwrap();
    assert_eq!(x.max_abs(), 0.0);
}

#[test]
fn coefficients_and_output_are_linear() {
    let topo = two_cavities(32);
    let basis = FourierBasis::new(topo.grid);
    let op = DtnOperator::assemble(&topo, &basis, mu(), 10).unwrap();
    let mut r = rng(3);
    let q1 = random_real(&basis, 15.0, &mut r);
    let q2 = random_real(&basis, 15.0, &mut r);
    let mut sum = q1.clone();
    sum.axpy(1.0, &q2);
    let x1 = op.solve_coefficients(&q1).unwrap();
    let x2 = op.solve_coefficients(&q2).unwrap();
    let xs = op.solve_coefficients(&sum).unwrap();
    let scale = xs.max_abs().max(1.0);
    for i in 0..xs.values.len() {
        assert!((xs.values[i] - x1.values[i] - x2.values[i]).norm() < 1e-11 * scale);
    }
    let (a, b) = (0.7, -2.3);
    let mut combo = q1.clone();
    combo.scale(a);
    combo.axpy(b, &q2);
    let mut expected = op.dtn_variable(&q1).unwrap();
    expected.scale(a);
    expected.axpy(b, &op.dtn_variable(&q2).unwrap());
    let out = op.dtn_variable(&combo).unwrap();
    assert!(max_diff(&out, &expected) < 1e-11 * expected.max_abs());
}

#[test]
fn real_data_over_real_bed_gives_real_output() {
    let topo = two_cavities(32);
    let basis = FourierBasis::new(topo.grid);
    let mut op = DtnOperator::assemble(&topo, &basis, mu(), 10).unwrap();
    let q = random_real(&basis, 15.0, &mut rng(4));
    let direct = op.dtn_variable(&q).unwrap();
    assert!(direct.hermitian_defect() < 1e-11, "{:e}", direct.hermitian_defect());
    op.precompute();
    let dense = op.dtn_variable(&q).unwrap();
    assert!(dense.hermitian_defect() < 1e-11);
    assert!(max_diff(&direct, &dense) < 1e-10 * direct.max_abs());
}

#[test]
fn gentle_bed_deviation_scales_linearly() {
    let grid = Grid::new(8.0, 32).unwrap();
    let basis = FourierBasis::new(grid);
    let q = random_real(&basis, 8.0, &mut rng(5));
    let flat = dtn_flat(&q, &basis, mu());
    let eps = [0.005, 0.01, 0.02];
    let dev: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let topo = topo_from(grid, |x, _| 1.0 + e * (std::f64::consts::TAU * x / 8.0).cos());
            let op = DtnOperator::assemble(&topo, &basis, mu(), 10).unwrap();
            max_diff(&op.dtn_variable(&q).unwrap(), &flat)
        })
        .collect();
    let n = eps.len() as f64;
    let mx = eps.iter().sum::<f64>() / n;
    let my = dev.iter().sum::<f64>() / n;
    let sxy: f64 = eps.iter().zip(&dev).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = eps.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = dev.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    assert!(dev[0] > 0.0 && dev[0] < 0.1 * flat.max_abs());
    assert!(r2 > 0.999, "R^2 = {r2}");
}

#[test]
fn surface_trace_and_flat_closed_form() {
    let grid = Grid::new(8.0, 32).unwrap();
    let basis = FourierBasis::new(grid);
    let fft = Fft2d::new(32);
    let topo = two_cavities(32);
    let op = DtnOperator::assemble(&topo, &basis, mu(), 10).unwrap();
    let q = random_real(&basis, 12.0, &mut rng(6));
    let x = op.solve_coefficients(&q).unwrap();
    let at_surface = op.reconstruct_potential(&q, &x, 0.0).unwrap();
    let qg = fft.inverse(&q).unwrap();
    let err = at_surface.values.iter().zip(&qg.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err < 1e-12 * qg.max_abs());
    assert!(op.reconstruct_potential(&q, &x, 0.1).is_err());
    assert!(op.reconstruct_potential(&q, &x, -1.5).is_err());

    let flat_op = DtnOperator::assemble(&topography::flat(grid, 1.0).unwrap(), &basis, mu(), 10).unwrap();
    let m = [2, 1];
    let q = cosine_mode(&basis, m);
    let x = flat_op.solve_coefficients(&q).unwrap();
    let k = basis.kmag[basis.index_of(m)];
    let z = -0.4;
    let phi: GridField = flat_op.reconstruct_potential(&q, &x, z).unwrap();
    let amp = (mu() * k * (z + 1.0)).cosh() / (mu() * k).cosh();
    let kv = basis.wavevector(basis.index_of(m));
    for (j, v) in phi.values.iter().enumerate() {
        let p = grid.point(j);
        let expected = amp * (kv[0] * p[0] + kv[1] * p[1]).cos();
        assert!((v - expected).abs() < 1e-12);
    }
}

#[test]
fn vertical_derivative_of_bulk_potential_is_the_dtn() {
    let topo = two_cavities(32);
    let basis = FourierBasis::new(topo.grid);
    let fft = Fft2d::new(32);
    let op = DtnOperator::assemble(&topo, &basis, mu(), 10).unwrap();
    let q = random_real(&basis, 10.0, &mut rng(7));
    let x = op.solve_coefficients(&q).unwrap();
    let h = 1e-5;
    let up = fft.inverse(&op.potential_spectrum(&q, &x, h)).unwrap();
    let down = fft.inverse(&op.potential_spectrum(&q, &x, -h)).unwrap();
    let dtn = fft.inverse(&op.dtn_variable(&q).unwrap()).unwrap();
    let scale = dtn.max_abs();
    for j in 0..dtn.values.len() {
        let fd = (up.values[j] - down.values[j]) / (2.0 * h);
        assert!((fd - dtn.values[j]).abs() < 1e-5 * scale);
    }
}

#[test]
fn truncation_differences_shrink_beyond_bed_bandwidth() {
    let topo = two_cavities(32);
    let basis = FourierBasis::new(topo.grid);
    let q = random_real(&basis, 6.0, &mut rng(8));
    let outs: Vec<SpectralField> = (6..=12)
        .map(|r| DtnOperator::assemble(&topo, &basis, mu(), r).unwrap().dtn_variable(&q).unwrap())
        .collect();
    let steps: Vec<f64> = outs.windows(2).map(|w| max_diff(&w[1], &w[0])).collect();
    for w in steps.windows(2) {
        assert!(w[1] < w[0], "{steps:?}");
    }
}

#[test]
fn ill_conditioned_bed_is_rejected() {
    // A bed far deeper than the reference depth makes the shallowest and
    // deepest rows of B_M differ by many decades.
    let grid = Grid::new(4.0, 32).unwrap();
    let basis = FourierBasis::new(grid);
    let topo = topo_from(grid, |x, _| if (x - 2.0).abs() < 1.0 { 40.0 } else { 0.05 });
    match DtnOperator::assemble(&topo, &basis, mu(), 10) {
        Err(pilotwave::Error::IllConditioned { radius, .. }) => assert_eq!(radius, 10),
        other => panic!("expected conditioning failure, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn flat_multiplier_per_mode(a in -15i64..16, b in -15i64..16, depth in 0.1f64..3.0) {
        prop_assume!(a != 0 || b != 0);
        let grid = Grid::new(8.0, 32).unwrap();
        let basis = FourierBasis::new(grid);
        let q = cosine_mode(&basis, [a, b]);
        let out = FlatDtn::new(&basis, mu(), depth).apply(&q);
        let i = basis.index_of([a, b]);
        let k = basis.kmag[i];
        let expected = mu() * k * (mu() * k * depth).tanh();
        prop_assert!((out.coeffs[i].re - 0.5 * expected).abs() <= 1e-13 * expected);
        prop_assert!((flat_multiplier(mu(), k, depth) - expected).abs() <= 1e-13 * expected);
    }
}
