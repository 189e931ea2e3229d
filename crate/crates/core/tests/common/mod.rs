#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use steiner_core::ambiguity::random_configuration;
use steiner_core::topology::enumerate_full_types;
use steiner_core::{realize_full, CombinatorialType, Configuration, RealizedTree};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cfg(xy: &[(f64, f64)]) -> Configuration {
    Configuration::from_xy(xy).unwrap()
}

pub fn rect(w: f64, h: f64) -> Configuration {
    cfg(&[(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)])
}

pub fn equilateral() -> Configuration {
    cfg(&[(0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 2.0)])
}

/// `count` (full type, configuration, realization) triples with n cycling through `ns`.
pub fn realizable_full_samples(
    seed: u64,
    ns: &[usize],
    count: usize,
) -> Vec<(CombinatorialType, Configuration, RealizedTree)> {
    let mut r = rng(seed);
    let types: Vec<Vec<CombinatorialType>> = ns.iter().map(|&n| enumerate_full_types(n).unwrap()).collect();
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    while out.len() < count {
        let which = k % ns.len();
        k += 1;
        let p = random_configuration(&mut r, ns[which]);
        for t in &types[which] {
            if let Ok(rt) = realize_full(t, &p) {
                out.push((t.clone(), p.clone(), rt));
                break;
            }
        }
    }
    out
}
