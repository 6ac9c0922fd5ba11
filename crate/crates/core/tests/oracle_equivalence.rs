mod common;

use common::*;
use fence_patrol::verify;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn verifier_agrees_with_sampling() {
    for seed in 0..30 {
        let s = random_small_schedule(&mut ChaCha8Rng::seed_from_u64(seed));
        let v = verify(&s).unwrap();
        let gap = grid_uncovered(&s, 200, 200);
        if v.patrols() {
            assert_eq!(gap, None, "seed {seed}");
        } else {
            let w = v.witness.as_ref().unwrap();
            assert!(!point_covered(&s, &w.x, &w.t_star), "seed {seed}");
        }
    }
}
