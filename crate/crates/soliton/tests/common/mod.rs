//! Shared helpers for the integration suites: a tiny deterministic RNG and
//! the randomized-but-valid spec generator (seeds are fixed by each suite
//! and echoed in its output).

use soliton::bundle::BundleSpec;
use soliton::polyalg::{rat, Rational};
use num_traits::Zero;

/// SplitMix64: deterministic, dependency-free.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// uniform integer in [lo, hi]
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }
}

/// A random valid spec: line bundles with rational Ricci eigenvalues in
/// [0, 3], or vector bundles with base eigenvalues in [-3/4, 0] (validity
/// forces them inside (-1, 0], and staying away from -1 keeps the series
/// radius workable); mu rational in [-4, -1/4]; total degree <= 6; K = 0.
pub fn random_valid_spec(rng: &mut SplitMix64) -> BundleSpec {
    let den = rng.int_in(1, 4);
    let num = rng.int_in(1, 4 * den);
    let mu = rat(-num, den); // in [-4, -1/4]

    if rng.next_f64() < 0.5 {
        let n = rng.int_in(0, 6) as usize;
        let eigs: Vec<Rational> = (0..n)
            .map(|_| {
                let d = rng.int_in(1, 4);
                rat(rng.int_in(0, 3 * d), d)
            })
            .collect();
        BundleSpec::line(eigs, mu, Rational::zero()).expect("valid line spec")
    } else {
        let m = rng.int_in(2, 5) as u32;
        let d_max = 6 - (m as i64 - 1);
        let d = rng.int_in(0, d_max) as usize;
        let eigs: Vec<Rational> = (0..d)
            .map(|_| {
                let den = rng.int_in(2, 8);
                rat(-rng.int_in(0, 3 * den / 4), den)
            })
            .collect();
        BundleSpec::vector(m, eigs, mu).expect("valid vector spec")
    }
}

pub fn log_grid(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..samples)
        .map(|i| (llo + (lhi - llo) * i as f64 / (samples - 1) as f64).exp())
        .collect()
}

/// The five in-repo presets as specs (kept in sync with presets/*.json by
/// the CLI suite, which loads the files themselves).
pub fn preset_specs() -> Vec<(&'static str, BundleSpec)> {
    use soliton::polyalg::rat_int;
    vec![
        (
            "c2_cao",
            BundleSpec::vector(2, vec![], rat_int(-1)).unwrap(),
        ),
        (
            "cp1_canonical",
            BundleSpec::line(vec![rat_int(2)], rat_int(-1), Rational::zero()).unwrap(),
        ),
        (
            "flat_line",
            BundleSpec::line(vec![rat_int(0), rat_int(0)], rat_int(-1), Rational::zero())
                .unwrap(),
        ),
        (
            "product_mixed",
            BundleSpec::line(
                vec![rat_int(1), rat_int(2), rat_int(0)],
                rat_int(-1),
                Rational::zero(),
            )
            .unwrap(),
        ),
        (
            "vb_sum_lines",
            BundleSpec::vector(2, vec![rat(-1, 2)], rat_int(-1)).unwrap(),
        ),
    ]
}
