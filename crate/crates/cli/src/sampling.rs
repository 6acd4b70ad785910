//! Seeded random instances. Every sample owns a ChaCha stream selected by
//! its index, so results do not depend on scheduling.

use pcw::numerics::dyadic_round;
use pcw::{Breakpoints, MapDescriptor, Rational, Scalar};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Denominator exponent used when rationalizing draws.
pub const DYADIC_BITS: u32 = 32;

pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Affine map with slope uniform on `[−κ, κ]` and image of `[0, 1]` inside
/// `(margin, 1 − margin)`.
pub fn draw_affine(rng: &mut ChaCha8Rng, kappa: f64, margin: f64, bits: u32) -> MapDescriptor<Rational> {
    loop {
        let s = dyadic_round(rng.gen_range(-kappa..=kappa), bits);
        let sf = s.to_f64();
        let lo = margin - sf.min(0.0);
        let hi = 1.0 - margin - sf.max(0.0);
        let b = dyadic_round(rng.gen_range(lo..hi), bits);
        if let Ok(m) = MapDescriptor::affine(s, b) {
            return m;
        }
    }
}

/// `n − 1` sorted uniforms on `(margin, 1 − margin)`, redrawn until every
/// gap (edges included) is at least `margin`.
pub fn draw_breakpoints(rng: &mut ChaCha8Rng, n: usize, margin: f64, bits: u32) -> Breakpoints<Rational> {
    let floor = Rational::from_f64(margin);
    loop {
        let mut xs: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(margin..1.0 - margin)).collect();
        xs.sort_by(f64::total_cmp);
        let rounded: Vec<Rational> = xs.iter().map(|&x| dyadic_round(x, bits)).collect();
        if let Ok(bp) = Breakpoints::new(rounded) {
            if bp.min_gap() >= floor {
                return bp;
            }
        }
    }
}

/// A uniformly drawn dyadic point of `[0, 1)`.
pub fn draw_point(rng: &mut ChaCha8Rng, bits: u32) -> Rational {
    let k: u64 = rng.gen_range(0..1u64 << bits);
    Rational::new(k.into(), (1u64 << bits).into())
}
