use coopsynt::checker::{input_words, BobbleQuery, Checker};
use coopsynt::maxcoop::{synthesize_from_bases, SynthesisError};
use coopsynt::tree::AcceptanceMode;
use coopsynt::{Alphabet, BaseAutomata, CombinationOverrides, Lattice, RabinPair, RabinWordAutomaton, Ruleset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_buchi(rng: &mut ChaCha8Rng, ab: &Alphabet) -> RabinWordAutomaton {
    let n = rng.gen_range(1..=3);
    let states = (0..n).map(|k| format!("q{k}")).collect();
    let delta = (0..n * ab.num_letters()).map(|_| rng.gen_range(0..n)).collect();
    let inf: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    RabinWordAutomaton::new("random", ab.clone(), states, delta, 0, vec![RabinPair::new([], inf)]).unwrap()
}

/// Synthesizes 25 random instances and returns how many were realizable
/// along with every bobble tree (depth <= 3) that misses its annotation.
fn violations(seed: u64, mode: AcceptanceMode) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut synthesized = 0;
    let mut bad = Vec::new();
    for _ in 0..25 {
        let ab = Alphabet::numbered(2, 2);
        let base =
            BaseAutomata::derive(random_buchi(&mut rng, &ab), random_buchi(&mut rng, &ab), CombinationOverrides::default(), false).unwrap();
        let lat = Lattice::enumerate(Ruleset::Base);
        let s = match synthesize_from_bases(&base, lat.clone(), mode) {
            Ok(s) => s,
            Err(SynthesisError::NoRealizableLevel) => continue,
            Err(e) => panic!("{e}"),
        };
        synthesized += 1;
        let m = &s.machine;
        for d in 0..=3 {
            for split in input_words(2, d) {
                let st = m.state_after(&split);
                let level = m.level_of(st).unwrap();
                let mut ck = Checker::new(BobbleQuery { machine: m, split_inputs: &split }, &base);
                if !ck.level(level).unwrap().satisfied {
                    bad.push(format!("instance {synthesized}, after {split:?}: {level}"));
                }
                if let Some((last, prefix)) = split.split_last() {
                    let before = m.state_after(prefix);
                    let (i, j) = (s.level_index(before), s.level_index(m.next_state(before, *last)));
                    assert!(lat.at_least(j, i), "level drops after {split:?}");
                }
            }
        }
    }
    (synthesized, bad)
}

#[test]
fn latched_machines_meet_their_annotations() {
    for seed in 11..15 {
        let (n, bad) = violations(seed, AcceptanceMode::Latched);
        assert!(n > 10);
        assert!(bad.is_empty(), "seed {seed}: {bad:?}");
    }
}

// The literal product only asks F_1 x ... x F_n to be visited finitely
// often, which is weaker than each F_i being visited finitely often. Levels
// with A->G have non-empty finite sets, so the literal mode can annotate a
// machine with a level it misses.
#[test]
fn literal_machines_can_miss_their_annotations() {
    let (n, bad) = violations(12, AcceptanceMode::Literal);
    assert!(n > 10);
    assert!(!bad.is_empty());
}
