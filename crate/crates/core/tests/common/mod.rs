#![allow(dead_code)]

use grav_core::catalog::{self, CatalogEntry, Params};
use grav_core::verification::{random_event, random_observer};
use grav_core::{Event, LocalMetric, Observer, SpacetimeChart};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn chart(name: &str) -> SpacetimeChart {
    catalog::get_metric(name, &Params::new()).unwrap()
}

pub fn entry(name: &str) -> CatalogEntry {
    catalog::entry(name, &Params::new()).unwrap()
}

/// Random interior event of `name` with a boosted static observer there.
pub fn random_setup(name: &str, rng: &mut ChaCha8Rng) -> (SpacetimeChart, Event, LocalMetric, Observer) {
    let chart = chart(name);
    let x = random_event(name, rng);
    let metric = chart.local(&x).unwrap();
    let obs = random_observer(&metric, 1.5, rng).unwrap();
    (chart, x, metric, obs)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
