//! Fixtures shared by the benchmarks.

use adsmass::charges::EnergyMomentum;
use adsmass::initial_data::{builtin_family, FamilyParams, InitialData};
use adsmass::verify::suite_rng;
use rand::Rng;

/// A built-in family with `key=value` parameters.
pub fn family(name: &str, params: &[(&str, &str)]) -> InitialData {
    let params: FamilyParams = params
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    builtin_family(name, &params).expect("valid built-in family")
}

/// Seeded timelike energy-momenta with random angular parts.
pub fn energy_momenta(count: usize, seed: u64) -> Vec<EnergyMomentum> {
    let mut rng = suite_rng(seed, 0);
    (0..count)
        .map(|_| {
            let m: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let m0 = 1.0 + m.iter().map(|v| v * v).sum::<f64>().sqrt();
            let n = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let r = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            EnergyMomentum::from_vectors([m0, m[0], m[1], m[2]], n, r)
                .expect("trace-free by construction")
        })
        .collect()
}
