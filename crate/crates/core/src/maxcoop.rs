//! Maximally cooperative synthesis: one tree automaton per cooperation
//! level, glued so that every transition moves to the most preferred level
//! that is still realizable after the prefix read so far.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dra::{BaseAutomata, CombinationOverrides, RabinWordAutomaton};
use crate::error::ModelError;
use crate::games::{self, extract_strategy, solve_membership_with_components, GameError, GameStats};
use crate::hierarchy::{Lattice, LevelSpec, Modality};
use crate::mealy::MealyStrategy;
use crate::tree::{build_level_automaton, AcceptanceMode, RabinTreeAutomaton, TreeError, TreePair, TreeState, Unpacked};

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("level `{0}` has an E conjunct; maximally cooperative synthesis supports plain and GE conjuncts only")]
    ExistsUnsupported(String),
    #[error("no cooperation level is realizable from the initial state")]
    NoRealizableLevel,
}

/// Tree automata for every level of a lattice, each tracking all base
/// automata, with their non-empty states.
pub struct LevelIndexedAutomata {
    pub lattice: Lattice,
    pub automata: Vec<RabinTreeAutomaton>,
    pub nonempty: Vec<FixedBitSet>,
    /// Per level: non-empty states grouped by unpacked word states.
    by_unpack: Vec<HashMap<Unpacked, Vec<u32>>>,
}

impl LevelIndexedAutomata {
    /// Non-empty states of level `k` whose unpacked word states are `u`.
    pub fn matching(&self, k: usize, u: &Unpacked) -> &[u32] {
        self.by_unpack[k].get(u).map_or(&[], Vec::as_slice)
    }

    /// Whether the initial state of level `j` has a non-empty language.
    pub fn realizable(&self, j: usize) -> bool {
        self.nonempty[j][self.automata[j].initial()]
    }

    /// Most preferred level `k` implying level `j` that has a non-empty state
    /// unpacking to `u`, with the state chosen there.
    pub fn best_target(&self, j: usize, u: &Unpacked) -> Option<(usize, u32)> {
        (0..self.lattice.len()).filter(|&k| self.lattice.at_least(k, j)).find_map(|k| {
            let cands = self.matching(k, u);
            let pick = cands.iter().copied().find(|&q| self.automata[k].state(q as usize).is_canonical()).or(cands.first().copied());
            pick.map(|q| (k, q))
        })
    }
}

/// Builds and solves the automaton of every level.
pub fn assemble(lattice: Lattice, base: &BaseAutomata, mode: AcceptanceMode) -> Result<LevelIndexedAutomata, SynthesisError> {
    if let Some(l) = lattice.levels().iter().find(|l| l.conjuncts().iter().any(|c| c.modality == Modality::Exists)) {
        return Err(SynthesisError::ExistsUnsupported(l.to_string()));
    }
    let built: Vec<(RabinTreeAutomaton, FixedBitSet)> = lattice
        .levels()
        .par_iter()
        .map(|l| {
            let t = build_level_automaton(l, base, true, mode)?;
            let w = games::nonempty_states(&t);
            Ok((t, w))
        })
        .collect::<Result<_, TreeError>>()?;
    let (automata, nonempty): (Vec<_>, Vec<_>) = built.into_iter().unzip();
    let by_unpack = automata
        .iter()
        .zip(&nonempty)
        .map(|(t, w)| {
            let mut m: HashMap<Unpacked, Vec<u32>> = HashMap::new();
            for q in w.ones() {
                m.entry(t.unpack(q)).or_default().push(q as u32);
            }
            m
        })
        .collect();
    Ok(LevelIndexedAutomata { lattice, automata, nonempty, by_unpack })
}

/// The combined automaton. State `s` stands for state `origin[s].1` of level
/// `origin[s].0`.
pub struct MaxCoopAutomaton {
    pub automaton: RabinTreeAutomaton,
    pub origin: Vec<(u32, u32)>,
    pub pair_level: Vec<u32>,
}

impl MaxCoopAutomaton {
    pub fn level_of(&self, s: usize) -> usize {
        self.origin[s].0 as usize
    }
}

/// Glues the level automata. Only states reachable from the initial state
/// are kept.
pub fn build_max_coop(ix: &LevelIndexedAutomata) -> Result<MaxCoopAutomaton, SynthesisError> {
    let lat = &ix.lattice;
    let first = (0..lat.len()).find(|&j| ix.realizable(j)).ok_or(SynthesisError::NoRealizableLevel)?;
    let ab = ix.automata[first].alphabet().clone();
    let no = ab.num_outputs();

    let mut index: HashMap<(u32, u32), u32> = HashMap::new();
    let mut origin: Vec<(u32, u32)> = Vec::new();
    let mut queue = VecDeque::new();
    let start = (first as u32, ix.automata[first].initial() as u32);
    index.insert(start, 0);
    origin.push(start);
    queue.push_back(0u32);
    let mut delta: Vec<Vec<Vec<u32>>> = Vec::new();
    // successors are memoised per (level, state in that level)
    let mut route: HashMap<(u32, u32), Option<(u32, u32)>> = HashMap::new();
    while let Some(s) = queue.pop_front() {
        let (j, q) = origin[s as usize];
        let t = &ix.automata[j as usize];
        let mut rows = Vec::with_capacity(no);
        for o in 0..no {
            let mut row = Vec::new();
            for f in t.functions(q as usize, o) {
                let dests: Option<Vec<(u32, u32)>> = f
                    .iter()
                    .map(|&target| {
                        *route.entry((j, target)).or_insert_with(|| {
                            ix.best_target(j as usize, &t.unpack(target as usize)).map(|(k, alt)| {
                                if k == j as usize {
                                    (j, target)
                                } else {
                                    (k as u32, alt)
                                }
                            })
                        })
                    })
                    .collect();
                // no level is realizable after this step
                let Some(dests) = dests else { continue };
                for dest in dests {
                    let id = *index.entry(dest).or_insert_with(|| {
                        origin.push(dest);
                        queue.push_back(origin.len() as u32 - 1);
                        origin.len() as u32 - 1
                    });
                    row.push(id);
                }
            }
            rows.push(row);
        }
        if delta.len() < origin.len() {
            delta.resize(origin.len(), Vec::new());
        }
        delta[s as usize] = rows;
    }
    let n = origin.len();
    let mut pairs = Vec::new();
    let mut pair_level = Vec::new();
    for (j, t) in ix.automata.iter().enumerate() {
        for p in t.pairs() {
            let mut fin = FixedBitSet::with_capacity(n);
            let mut inf = FixedBitSet::with_capacity(n);
            for (s, &(lj, q)) in origin.iter().enumerate() {
                if lj as usize == j {
                    fin.set(s, p.fin[q as usize]);
                    inf.set(s, p.inf[q as usize]);
                }
            }
            if inf.is_clear() {
                continue;
            }
            pairs.push(TreePair { fin, inf });
            pair_level.push(j as u32);
        }
    }
    let states: Vec<TreeState> = origin
        .iter()
        .map(|&(j, q)| {
            let mut st = ix.automata[j as usize].state(q as usize).clone();
            st.level = Some(j);
            st
        })
        .collect();
    let automaton = RabinTreeAutomaton::from_parts(
        ab,
        states,
        delta.into_iter().flatten().collect(),
        0,
        pairs,
        ix.automata[first].factor_origin().to_vec(),
        ix.automata[first].factor_tops().to_vec(),
        vec![true; ix.automata[first].num_factors()],
    );
    Ok(MaxCoopAutomaton { automaton, origin, pair_level })
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSummary {
    pub index: usize,
    pub level: String,
    pub gray: bool,
    pub realizable: bool,
    pub states: usize,
    pub nonempty_states: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SwitchEdge {
    pub from_state: String,
    pub input: String,
    pub to_state: String,
    pub from_level: String,
    pub to_level: String,
}

/// Summary of a synthesis run, written as JSON by the command line.
#[derive(Clone, Debug, Serialize)]
pub struct SynthesisReport {
    pub ruleset: String,
    pub acceptance_mode: String,
    pub levels: Vec<LevelSummary>,
    pub initial_level: String,
    pub automaton_states: usize,
    pub machine_states: usize,
    pub switch_edges: Vec<SwitchEdge>,
    pub game: GameStats,
}

pub struct Synthesis {
    pub machine: MealyStrategy,
    /// Combined-automaton state of each machine state.
    pub tree_state: Vec<u32>,
    pub levels: LevelIndexedAutomata,
    pub combined: MaxCoopAutomaton,
    pub report: SynthesisReport,
}

impl Synthesis {
    /// Preference index of the level of machine state `s`.
    pub fn level_index(&self, s: usize) -> usize {
        self.combined.level_of(self.tree_state[s] as usize)
    }
}

/// Synthesizes from already derived base automata.
pub fn synthesize_from_bases(base: &BaseAutomata, lattice: Lattice, mode: AcceptanceMode) -> Result<Synthesis, SynthesisError> {
    let levels = assemble(lattice, base, mode)?;
    let combined = build_max_coop(&levels)?;
    let t = &combined.automaton;
    let nlev = levels.lattice.len() as u32;
    let state_component: Vec<u32> = combined.origin.iter().map(|&(j, _)| nlev - 1 - j).collect();
    let pair_component: Vec<u32> = combined.pair_level.iter().map(|&j| nlev - 1 - j).collect();
    let solved = solve_membership_with_components(t, &state_component, &pair_component)?;
    let extracted = extract_strategy(t, &solved).map_err(|e| match e {
        GameError::Unrealizable => SynthesisError::NoRealizableLevel,
        other => SynthesisError::Game(other),
    })?;
    let lat = &levels.lattice;
    let level_specs: Vec<LevelSpec> = extracted.tree_state.iter().map(|&s| *lat.level(combined.level_of(s as usize))).collect();
    let machine = extracted.machine.with_levels(level_specs)?;

    let ab = machine.alphabet();
    let mut switch_edges = Vec::new();
    for s in 0..machine.num_states() {
        for i in 0..ab.num_inputs() {
            let t2 = machine.next_state(s, i);
            let (a, b) = (machine.level_of(s).unwrap(), machine.level_of(t2).unwrap());
            if a != b {
                switch_edges.push(SwitchEdge {
                    from_state: machine.state_name(s).to_string(),
                    input: ab.inputs()[i].clone(),
                    to_state: machine.state_name(t2).to_string(),
                    from_level: a.to_string(),
                    to_level: b.to_string(),
                });
            }
        }
    }
    let report = SynthesisReport {
        ruleset: lat.ruleset().to_string(),
        acceptance_mode: match mode {
            AcceptanceMode::Latched => "latched".into(),
            AcceptanceMode::Literal => "literal".into(),
        },
        levels: (0..lat.len())
            .map(|j| LevelSummary {
                index: j,
                level: lat.level(j).to_string(),
                gray: lat.level(j).is_graylevel(),
                realizable: levels.realizable(j),
                states: levels.automata[j].num_states(),
                nonempty_states: levels.nonempty[j].count_ones(..),
            })
            .collect(),
        initial_level: machine.level_of(machine.initial()).unwrap().to_string(),
        automaton_states: t.num_states(),
        machine_states: machine.num_states(),
        switch_edges,
        game: solved.stats(),
    };
    Ok(Synthesis { machine, tree_state: extracted.tree_state, levels, combined, report })
}

/// End-to-end pipeline from assumption and guarantee automata.
pub fn synthesize_max_coop(
    a: RabinWordAutomaton,
    g: RabinWordAutomaton,
    lattice: Lattice,
    overrides: CombinationOverrides,
    mode: AcceptanceMode,
) -> Result<Synthesis, SynthesisError> {
    let with_or = lattice.ruleset().bases().len() > 4;
    let base = BaseAutomata::derive(a, g, overrides, with_or)?;
    synthesize_from_bases(&base, lattice, mode)
}

#[cfg(test)]
mod tests;
