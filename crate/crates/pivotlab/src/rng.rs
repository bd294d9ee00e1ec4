use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// The crate-wide random stream. ChaCha is a keyed counter-mode generator,
/// so independently keyed streams can be derived per trial (see
/// [`crate::experiments::seed_stream`]).
pub type RandomStream = rand_chacha::ChaCha12Rng;

pub fn standard_normal(rng: &mut RandomStream) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian, (Z1 + i Z2)/sqrt(2).
pub fn standard_complex_normal(rng: &mut RandomStream) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn uniform_angle(rng: &mut RandomStream) -> f64 {
    rng.gen::<f64>() * std::f64::consts::TAU
}
