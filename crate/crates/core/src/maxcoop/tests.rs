use super::*;
use crate::checker::{input_words, BobbleQuery, Checker};
use crate::fixtures;
use crate::hierarchy::Ruleset;

fn base_of(a: RabinWordAutomaton, g: RabinWordAutomaton) -> BaseAutomata {
    BaseAutomata::derive(a, g, CombinationOverrides::default(), false).unwrap()
}

fn run(base: &BaseAutomata) -> Synthesis {
    synthesize_from_bases(base, Lattice::enumerate(Ruleset::Base), AcceptanceMode::Latched).unwrap()
}

fn level_names(s: &Synthesis) -> Vec<String> {
    (0..s.machine.num_states()).map(|k| s.machine.level_of(k).unwrap().to_string()).collect()
}

/// Level indices along every input word of length `depth`.
fn level_runs(s: &Synthesis, depth: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let ni = s.machine.alphabet().num_inputs();
    input_words(ni, depth)
        .map(|word| {
            let mut st = s.machine.initial();
            let mut levels = vec![s.level_index(st)];
            for &i in &word {
                st = s.machine.next_state(st, i);
                levels.push(s.level_index(st));
            }
            (word, levels)
        })
        .collect()
}

fn assert_invariants(s: &Synthesis, base: &BaseAutomata, depth: usize) {
    let lat = &s.levels.lattice;
    // monotone, finitely many switches
    for (word, levels) in level_runs(s, depth) {
        let switches = levels.windows(2).filter(|w| w[0] != w[1]).count();
        assert!(switches < lat.len(), "{word:?}");
        for w in levels.windows(2) {
            assert!(lat.at_least(w[1], w[0]), "level drops along {word:?}: {levels:?}");
        }
    }
    // every machine step lands on the most preferred level still reachable
    let t = &s.combined.automaton;
    for m in s.machine.reachable() {
        let c = s.tree_state[m] as usize;
        for i in 0..s.machine.alphabet().num_inputs() {
            let c2 = s.tree_state[s.machine.next_state(m, i)] as usize;
            let (k, _) = s.levels.best_target(s.combined.level_of(c), &t.unpack(c2)).expect("successor is realizable");
            assert_eq!(s.combined.level_of(c2), k);
        }
    }
    // the bobble tree at every split node meets the annotated level
    for d in 0..=3 {
        for split in input_words(s.machine.alphabet().num_inputs(), d) {
            let st = s.machine.state_after(&split);
            let level = s.machine.level_of(st).unwrap();
            let mut ck = Checker::new(BobbleQuery { machine: &s.machine, split_inputs: &split }, base);
            assert!(ck.level(level).unwrap().satisfied, "after {split:?}: {level}");
        }
    }
}

#[test]
fn hub_assembles_fourteen_levels() {
    let base = base_of(fixtures::hub_assumptions(), fixtures::hub_guarantees());
    let ix = assemble(Lattice::enumerate(Ruleset::Base), &base, AcceptanceMode::Latched).unwrap();
    assert_eq!(ix.automata.len(), 14);
    assert_eq!(ix.nonempty.len(), 14);
    let top = ix.lattice.index_of(&LevelSpec::parse("A*G", Ruleset::Base).unwrap()).unwrap();
    assert!(ix.realizable(top));
    let unpacked: Vec<usize> = ix.automata.iter().map(|t| t.unpack(t.initial()).len()).collect();
    assert!(unpacked.iter().all(|&u| u == 4), "{unpacked:?}");
}

#[test]
fn hub_stays_at_the_top_level() {
    let base = base_of(fixtures::hub_assumptions(), fixtures::hub_guarantees());
    let s = run(&base);
    assert_eq!(s.report.initial_level, "A*G");
    assert!(level_names(&s).iter().all(|l| l == "A*G"));
    assert!(s.combined.origin.iter().all(|&(j, _)| j == s.combined.origin[0].0));
    assert!(s.report.switch_edges.is_empty());
    let lat = Lattice::enumerate(Ruleset::Base);
    let got = crate::checker::classify(&s.machine, &lat, &base).unwrap();
    assert_eq!(got.iter().map(ToString::to_string).collect::<Vec<_>>(), ["A*G"]);
    assert_invariants(&s, &base, 6);
}

#[test]
fn trigger_ack_switches_once() {
    let base = base_of(fixtures::trigger_ack_assumptions(), fixtures::trigger_ack_guarantees());
    let s = run(&base);
    let initial = LevelSpec::parse(&s.report.initial_level, Ruleset::Base).unwrap();
    let ge_a = LevelSpec::parse("GE(A)", Ruleset::Base).unwrap();
    assert!(!initial.implies(&ge_a), "initial level {initial}");
    assert_eq!(s.report.switch_edges.len(), 1, "{:?}", s.report.switch_edges);
    let edge = &s.report.switch_edges[0];
    assert_eq!(edge.input, "ack");
    let upper = LevelSpec::parse(&edge.to_level, Ruleset::Base).unwrap();
    assert!(upper.strictly_implies(&initial));
    assert!(upper.implies(&ge_a));
    // the first output is the trigger; an ack right after it switches
    for (word, levels) in level_runs(&s, 6) {
        let switches = levels.windows(2).filter(|w| w[0] != w[1]).count();
        let acked_first = word[0] == 0;
        assert_eq!(switches, usize::from(acked_first), "{word:?} {levels:?}");
    }
    assert_invariants(&s, &base, 8);
}

#[test]
fn unsatisfiable_guarantee_keeps_a_weak_level() {
    let base = base_of(fixtures::fair_input_assumptions(), fixtures::unsatisfiable_guarantees());
    let s = run(&base);
    assert_eq!(s.report.initial_level, "GE(A) & GE(A->G)");
    let init = LevelSpec::parse(&s.report.initial_level, Ruleset::Base).unwrap();
    assert!(!init.is_graylevel());
    assert_invariants(&s, &base, 6);
}

#[test]
fn narrow_fixture_starts_at_the_bottom_level() {
    let base = base_of(fixtures::narrow_assumptions(), fixtures::narrow_guarantees());
    let s = run(&base);
    let realizable: Vec<&str> = s.report.levels.iter().filter(|l| l.realizable).map(|l| l.level.as_str()).collect();
    assert_eq!(realizable, ["GE(A->G)"]);
    assert_eq!(s.report.initial_level, "GE(A->G)");
    // the environment decides at q6: x0 keeps the level, x1 reaches q13
    // where G holds, x2 traps A in q5 where A->G holds
    let after = |w: &[usize]| s.machine.level_of(s.machine.state_after(w)).unwrap().to_string();
    assert_eq!(after(&[0, 0, 0, 0]), "GE(A->G)");
    assert!(LevelSpec::parse(&after(&[0, 0, 1]), Ruleset::Base).unwrap().implies(&LevelSpec::parse("G", Ruleset::Base).unwrap()));
    assert!(LevelSpec::parse(&after(&[0, 0, 2]), Ruleset::Base).unwrap().implies(&LevelSpec::parse("A->G", Ruleset::Base).unwrap()));
    assert_invariants(&s, &base, 6);
}

#[test]
fn exists_levels_are_rejected() {
    let base =
        BaseAutomata::derive(fixtures::hub_assumptions(), fixtures::hub_guarantees(), CombinationOverrides::default(), true).unwrap();
    let err = assemble(Lattice::enumerate(Ruleset::FullE), &base, AcceptanceMode::Latched).err().unwrap();
    assert!(matches!(err, SynthesisError::ExistsUnsupported(_)));
}

#[test]
fn or_extended_synthesis_on_hub() {
    let s = synthesize_max_coop(
        fixtures::hub_assumptions(),
        fixtures::hub_guarantees(),
        Lattice::enumerate(Ruleset::OrExtended),
        CombinationOverrides::default(),
        AcceptanceMode::Latched,
    )
    .unwrap();
    let top = LevelSpec::parse(&s.report.initial_level, Ruleset::OrExtended).unwrap();
    assert!(top.implies(&LevelSpec::parse("A*G", Ruleset::OrExtended).unwrap()));
}

#[test]
fn unsatisfiable_assumptions_empty_every_level_with_a() {
    let unsat = fixtures::unsatisfiable_guarantees();
    let base = base_of(unsat.clone(), fixtures::fair_input_assumptions());
    let ix = assemble(Lattice::enumerate(Ruleset::Base), &base, AcceptanceMode::Latched).unwrap();
    let a = LevelSpec::parse("A", Ruleset::Base).unwrap();
    for j in 0..ix.lattice.len() {
        if ix.lattice.level(j).implies(&a) {
            assert!(ix.nonempty[j].is_clear(), "{}", ix.lattice.level(j));
        }
    }
}
