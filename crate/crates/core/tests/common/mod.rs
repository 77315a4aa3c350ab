//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use pilotwave::io::SimConfig;
use pilotwave::params::{FluidParams, ForcingParams, ModelConstants};
use pilotwave::spectral::{FourierBasis, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DROP_MASS: &str = "2.6e-7";

/// Silicone oil at 80 Hz over a 6 mm layer.
pub fn silicone(gamma: f64) -> ModelConstants {
    let fluid = FluidParams::from_dynamic_viscosity(965.0, 0.0209, 2e-2, 2.6e-7, 1.0);
    let forcing = ForcingParams {
        frequency: 80.0,
        gamma,
        gravity: 9.81,
    };
    ModelConstants::new(&fluid, &forcing, 6e-3).unwrap()
}

/// Preset configuration with the mandatory droplet constants filled in,
/// followed by `extra`.
pub fn config(extra: &[(&str, &str)]) -> SimConfig {
    let mut pairs = vec![
        ("preset", "silicone_80hz"),
        ("fluid.drop_mass", DROP_MASS),
        ("fluid.drop_damping", "1"),
    ];
    for (k, v) in extra {
        pairs.retain(|(key, _)| key != k);
        pairs.push((k, v));
    }
    SimConfig::from_pairs(&pairs).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real field with nonzero coefficients only for `0 < ‖n‖ ≤ band`
/// (mode-number units), Hermitian symmetric by construction.
pub fn random_real(basis: &FourierBasis, band: f64, rng: &mut impl Rng) -> SpectralField {
    let n = basis.n();
    let mut f = SpectralField::zeros(n);
    for i in 0..basis.len() {
        let j = basis.conjugate_index(i);
        let [a, b] = basis.modes(i);
        let r = ((a * a + b * b) as f64).sqrt();
        if j < i || i == 0 || !basis.is_active(i) || r > band {
            continue;
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        f.coeffs[i] = c;
        f.coeffs[j] = c.conj();
    }
    f
}

/// Unit-amplitude cosine `cos(k·x)` for mode numbers `m`.
pub fn cosine_mode(basis: &FourierBasis, m: [i64; 2]) -> SpectralField {
    let mut f = SpectralField::zeros(basis.n());
    let i = basis.index_of(m);
    f.coeffs[i] += Complex64::new(0.5, 0.0);
    f.coeffs[basis.conjugate_index(i)] += Complex64::new(0.5, 0.0);
    f
}

pub fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs.iter().zip(&b.coeffs).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}
