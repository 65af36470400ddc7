//! Shared fixtures for the linkage benchmarks.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use arclink::config::MU_SUN;
use arclink::synth::{
    heliocentric_observer, random_elliptic_elements, scenario_from_elements, Scenario,
};
use arclink::{Epoch, UnitMode};

/// Deterministic batch of synthetic heliocentric linkage problems.
pub fn scenarios(n: usize, seed: u64) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let el = random_elliptic_elements(&mut rng, Epoch::new(54000.0));
        let t1 = 54000.0 + rng.gen_range(0.0..300.0);
        let t2 = t1 + rng.gen_range(30.0..600.0);
        if let Ok(sc) =
            scenario_from_elements(&el, t1, t2, UnitMode::Heliocentric, MU_SUN, 1e-8, |t| {
                heliocentric_observer(t, 0.0)
            })
        {
            out.push(sc);
        }
    }
    out
}
