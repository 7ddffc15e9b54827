mod common;

use bfasp::random::{array_program, scalar_program};
use common::Outcome;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Default, Debug)]
struct Tally {
    agree: usize,
    skipped: std::collections::BTreeMap<&'static str, usize>,
}

impl Tally {
    fn add(&mut self, o: Outcome, seed: u64) {
        match o {
            Outcome::Agree => self.agree += 1,
            Outcome::Skip(s) => *self.skipped.entry(s).or_default() += 1,
            Outcome::Disagree(d) => panic!("seed {seed}: {d}"),
        }
    }
}

#[test]
fn flattening_preserves_stable_solutions() {
    let mut t = Tally::default();
    for seed in 0..150 {
        let p = scalar_program(&mut ChaCha8Rng::seed_from_u64(seed));
        t.add(common::flattening_preserves_stable_sets(&p), seed);
    }
    eprintln!("{t:?}");
    assert!(t.agree >= 60, "{t:?}");
}

#[test]
fn grounding_modes_agree_and_nest() {
    let mut sound = Tally::default();
    let mut relevant = Tally::default();
    for seed in 0..120 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = array_program(&mut rng, seed % 2 == 1);
        let m = match common::compile_all(&p) {
            Ok(m) => m,
            Err(s) => {
                sound.add(Outcome::Skip(s), seed);
                continue;
            }
        };
        assert!(common::contained(&m), "seed {seed}");
        sound.add(common::bottom_up_sound(&m), seed);
        relevant.add(common::magic_sound(&m), seed);
    }
    eprintln!("{sound:?} {relevant:?}");
    assert!(sound.agree >= 50 && relevant.agree >= 50);
}
