//! Non-deterministic Rabin tree automata built from word automata: one lift
//! per modality and a product that keeps every factor's word state visible.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::slice::ChunksExact;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::dra::{BaseAutomata, RabinWordAutomaton};
use crate::error::ModelError;
use crate::hierarchy::{BaseProp, LevelSpec, Modality};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("product of an empty factor list")]
    EmptyProduct,
    #[error("factors use different alphabets")]
    AlphabetMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How the product combines the factors' acceptance conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum AcceptanceMode {
    /// Cartesian products of the factors' finite and infinite sets.
    Literal,
    /// Conjunction of the factor conditions via a round-robin latch.
    #[default]
    Latched,
}

/// A factor's component: a word state, possibly with the flag of the
/// globally-exists lift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorState {
    Plain(u32),
    Flagged(u32, bool),
}

impl FactorState {
    pub fn word_state(self) -> u32 {
        match self {
            FactorState::Plain(q) | FactorState::Flagged(q, _) => q,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeState {
    pub factors: Vec<FactorState>,
    pub latch: Vec<u8>,
    /// Set on states of the combined multi-level automaton.
    pub level: Option<u32>,
}

impl TreeState {
    /// All flags set and every latch counter reset.
    pub fn is_canonical(&self) -> bool {
        self.latch.iter().all(|&c| c == 0) && self.factors.iter().all(|f| !matches!(f, FactorState::Flagged(_, false)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePair {
    pub fin: FixedBitSet,
    pub inf: FixedBitSet,
}

/// Word states of a tree state, tagged with the base property each factor
/// tracks. Sorted, without duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Unpacked(Vec<(Option<BaseProp>, u32)>);

impl Unpacked {
    pub fn entries(&self) -> &[(Option<BaseProp>, u32)] {
        &self.0
    }

    pub fn states_of(&self, origin: Option<BaseProp>) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().filter(move |e| e.0 == origin).map(|e| e.1)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct RabinTreeAutomaton {
    alphabet: Alphabet,
    states: Vec<TreeState>,
    // per state*|outputs|+output: successor functions of length |inputs|, concatenated
    delta: Vec<Vec<u32>>,
    initial: u32,
    pairs: Vec<TreePair>,
    factor_origin: Vec<Option<BaseProp>>,
    factor_top: Vec<u32>,
    factor_constrained: Vec<bool>,
}

impl RabinTreeAutomaton {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        alphabet: Alphabet,
        states: Vec<TreeState>,
        delta: Vec<Vec<u32>>,
        initial: u32,
        pairs: Vec<TreePair>,
        factor_origin: Vec<Option<BaseProp>>,
        factor_top: Vec<u32>,
        factor_constrained: Vec<bool>,
    ) -> Self {
        debug_assert_eq!(delta.len(), states.len() * alphabet.num_outputs());
        RabinTreeAutomaton { alphabet, states, delta, initial, pairs, factor_origin, factor_top, factor_constrained }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, q: usize) -> &TreeState {
        &self.states[q]
    }

    pub fn initial(&self) -> usize {
        self.initial as usize
    }

    pub fn pairs(&self) -> &[TreePair] {
        &self.pairs
    }

    pub fn num_factors(&self) -> usize {
        self.factor_origin.len()
    }

    pub fn factor_origin(&self) -> &[Option<BaseProp>] {
        &self.factor_origin
    }

    pub(crate) fn factor_tops(&self) -> &[u32] {
        &self.factor_top
    }

    /// Number of factors whose acceptance condition is not trivially true.
    pub fn acceptance_factor_count(&self) -> usize {
        self.factor_constrained.iter().filter(|&&c| c).count()
    }

    /// The successor functions for state `q` and output `o`; each function
    /// maps input `i` to the state at position `i`.
    pub fn functions(&self, q: usize, o: usize) -> ChunksExact<'_, u32> {
        self.delta[q * self.alphabet.num_outputs() + o].chunks_exact(self.alphabet.num_inputs())
    }

    pub fn num_functions(&self, q: usize, o: usize) -> usize {
        self.delta[q * self.alphabet.num_outputs() + o].len() / self.alphabet.num_inputs()
    }

    pub fn unpack(&self, q: usize) -> Unpacked {
        let mut v: Vec<(Option<BaseProp>, u32)> =
            self.states[q].factors.iter().zip(&self.factor_origin).map(|(f, &o)| (o, f.word_state())).collect();
        v.sort_unstable();
        v.dedup();
        Unpacked(v)
    }

    /// Marks every factor as tracking `origin`.
    pub fn tagged(mut self, origin: BaseProp) -> Self {
        self.factor_origin.iter_mut().for_each(|o| *o = Some(origin));
        self
    }

    /// Same transitions, acceptance replaced by "always accept".
    pub fn accept_all(mut self) -> Self {
        let n = self.num_states();
        let mut all = FixedBitSet::with_capacity(n);
        all.insert_range(..);
        self.pairs = vec![TreePair { fin: FixedBitSet::with_capacity(n), inf: all }];
        self.factor_constrained.iter_mut().for_each(|c| *c = false);
        self
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree_automaton {\n  node [shape=box];\n");
        for (q, s) in self.states.iter().enumerate() {
            let mut label = String::new();
            for (k, f) in s.factors.iter().enumerate() {
                if k > 0 {
                    label.push(' ');
                }
                let origin = self.factor_origin[k].map_or("?", |b| b.symbol());
                match f {
                    FactorState::Plain(w) => {
                        let _ = write!(label, "{origin}:{w}");
                    }
                    FactorState::Flagged(w, b) => {
                        let _ = write!(label, "{origin}:{w}{}", if *b { "+" } else { "-" });
                    }
                }
            }
            if !s.latch.is_empty() {
                let _ = write!(label, " latch{:?}", s.latch);
            }
            if let Some(l) = s.level {
                let _ = write!(label, " level {l}");
            }
            let shape = if q == self.initial() { ", peripheries=2" } else { "" };
            let _ = writeln!(out, "  s{q} [label=\"{label}\"{shape}];");
        }
        for q in 0..self.num_states() {
            for o in 0..self.alphabet.num_outputs() {
                for (k, f) in self.functions(q, o).enumerate() {
                    for (i, &t) in f.iter().enumerate() {
                        let _ =
                            writeln!(out, "  s{q} -> s{t} [label=\"{}/{}#{k}\"];", self.alphabet.outputs()[o], self.alphabet.inputs()[i]);
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn bitset(n: usize, members: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    members.into_iter().for_each(|k| b.insert(k));
    b
}

fn plain_states(n: usize) -> Vec<TreeState> {
    (0..n).map(|q| TreeState { factors: vec![FactorState::Plain(q as u32)], latch: vec![], level: None }).collect()
}

fn word_pairs(w: &RabinWordAutomaton) -> Vec<TreePair> {
    let n = w.num_states();
    w.pairs().iter().map(|p| TreePair { fin: bitset(n, p.fin.iter().copied()), inf: bitset(n, p.inf.iter().copied()) }).collect()
}

fn single(w: &RabinWordAutomaton, states: Vec<TreeState>, delta: Vec<Vec<u32>>, initial: u32, pairs: Vec<TreePair>) -> RabinTreeAutomaton {
    RabinTreeAutomaton::from_parts(w.alphabet().clone(), states, delta, initial, pairs, vec![None], vec![w.top() as u32], vec![true])
}

/// Every branch of the tree has to satisfy `w`.
pub fn lift_universal(w: &RabinWordAutomaton) -> RabinTreeAutomaton {
    let ab = w.alphabet();
    let mut delta = Vec::with_capacity(w.num_states() * ab.num_outputs());
    for q in 0..w.num_states() {
        for o in 0..ab.num_outputs() {
            delta.push((0..ab.num_inputs()).map(|i| w.successor(q, crate::Letter::new(i, o)) as u32).collect());
        }
    }
    single(w, plain_states(w.num_states()), delta, w.initial() as u32, word_pairs(w))
}

fn push_unique(row: &mut Vec<u32>, seen: &mut HashSet<Vec<u32>>, f: Vec<u32>) {
    if seen.insert(f.clone()) {
        row.extend(f);
    }
}

/// Some branch has to satisfy `w`; the others are sent to its full-language
/// sink.
pub fn lift_exists(w: &RabinWordAutomaton) -> RabinTreeAutomaton {
    let ab = w.alphabet();
    let ni = ab.num_inputs();
    let top = w.top() as u32;
    let mut delta = Vec::with_capacity(w.num_states() * ab.num_outputs());
    for q in 0..w.num_states() {
        for o in 0..ab.num_outputs() {
            let mut row = Vec::new();
            let mut seen = HashSet::new();
            for chosen in 0..ni {
                let f = (0..ni).map(|i| if i == chosen { w.successor(q, crate::Letter::new(i, o)) as u32 } else { top }).collect();
                push_unique(&mut row, &mut seen, f);
            }
            delta.push(row);
        }
    }
    single(w, plain_states(w.num_states()), delta, w.initial() as u32, word_pairs(w))
}

/// From every node some branch has to satisfy `w`. State `(q, b)` has index
/// `2q` when `b` holds and `2q + 1` otherwise.
pub fn lift_globally_exists(w: &RabinWordAutomaton) -> RabinTreeAutomaton {
    let ab = w.alphabet();
    let ni = ab.num_inputs();
    let n = w.num_states();
    let id = |q: usize, b: bool| (2 * q + usize::from(!b)) as u32;
    let mut states = Vec::with_capacity(2 * n);
    let mut delta = Vec::with_capacity(2 * n * ab.num_outputs());
    for q in 0..n {
        for b in [true, false] {
            states.push(TreeState { factors: vec![FactorState::Flagged(q as u32, b)], latch: vec![], level: None });
            for o in 0..ab.num_outputs() {
                let mut row = Vec::new();
                let mut seen = HashSet::new();
                for chosen in 0..ni {
                    let f = (0..ni).map(|i| id(w.successor(q, crate::Letter::new(i, o)), i == chosen)).collect();
                    push_unique(&mut row, &mut seen, f);
                }
                delta.push(row);
            }
        }
    }
    let mut pairs: Vec<TreePair> = w
        .pairs()
        .iter()
        .map(|p| TreePair {
            fin: bitset(2 * n, p.fin.iter().map(|&q| id(q, true) as usize)),
            inf: bitset(2 * n, p.inf.iter().map(|&q| id(q, true) as usize)),
        })
        .collect();
    pairs.push(TreePair { fin: FixedBitSet::with_capacity(2 * n), inf: bitset(2 * n, (0..n).map(|q| id(q, false) as usize)) });
    single(w, states, delta, id(w.initial(), true), pairs)
}

/// Lift for one modality.
pub fn lift(w: &RabinWordAutomaton, modality: Modality) -> RabinTreeAutomaton {
    match modality {
        Modality::Plain => lift_universal(w),
        Modality::Exists => lift_exists(w),
        Modality::GloballyExists => lift_globally_exists(w),
    }
}

/// A set of factor-local sets, one per involved factor.
type Local = Vec<(usize, FixedBitSet)>;

struct Tuple {
    fin: Local,
    obligations: Local,
    latch_slot: Option<usize>,
}

fn is_full(b: &FixedBitSet) -> bool {
    b.count_ones(..) == b.len()
}

fn plan_latched(factors: &[RabinTreeAutomaton]) -> (Vec<Tuple>, usize) {
    let mut per_factor: Vec<(usize, Vec<TreePair>)> = Vec::new();
    for (k, f) in factors.iter().enumerate() {
        if f.pairs.iter().any(|p| p.fin.is_clear() && is_full(&p.inf)) {
            continue;
        }
        let n = f.num_states();
        let mut merged = FixedBitSet::with_capacity(n);
        let mut any_buchi = false;
        let mut pairs = Vec::new();
        for p in &f.pairs {
            if p.fin.is_clear() {
                merged.union_with(&p.inf);
                any_buchi = true;
            } else {
                pairs.push(p.clone());
            }
        }
        if any_buchi {
            pairs.insert(0, TreePair { fin: FixedBitSet::with_capacity(n), inf: merged });
        }
        per_factor.push((k, pairs));
    }
    let mut tuples: Vec<Vec<(usize, &TreePair)>> = vec![vec![]];
    for (k, pairs) in &per_factor {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                pairs.iter().map(move |p| {
                    let mut t = t.clone();
                    t.push((*k, p));
                    t
                })
            })
            .collect();
    }
    let mut slots = 0;
    let tuples = tuples
        .into_iter()
        .map(|t| {
            let fin: Local = t.iter().filter(|(_, p)| !p.fin.is_clear()).map(|(k, p)| (*k, p.fin.clone())).collect();
            let obligations: Local = t.iter().filter(|(_, p)| !is_full(&p.inf)).map(|(k, p)| (*k, p.inf.clone())).collect();
            let latch_slot = (obligations.len() > 1).then(|| {
                slots += 1;
                slots - 1
            });
            Tuple { fin, obligations, latch_slot }
        })
        .collect();
    (tuples, slots)
}

/// Synchronous product. Transitions combine one function per factor
/// pointwise; acceptance follows `mode`.
pub fn product(factors: &[RabinTreeAutomaton], mode: AcceptanceMode) -> Result<RabinTreeAutomaton, TreeError> {
    let first = factors.first().ok_or(TreeError::EmptyProduct)?;
    if factors.iter().any(|f| f.alphabet != first.alphabet) {
        return Err(TreeError::AlphabetMismatch);
    }
    if factors.len() == 1 {
        return Ok(first.clone());
    }
    let ab = first.alphabet.clone();
    let ni = ab.num_inputs();
    let no = ab.num_outputs();
    let (tuples, slots) = match mode {
        AcceptanceMode::Latched => plan_latched(factors),
        AcceptanceMode::Literal => (Vec::new(), 0),
    };

    type Key = (Vec<u32>, Vec<u8>);
    let mut index: HashMap<Key, u32> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut queue = VecDeque::new();
    let init: Key = (factors.iter().map(|f| f.initial).collect(), vec![0; slots]);
    index.insert(init.clone(), 0);
    keys.push(init);
    queue.push_back(0u32);
    let mut delta: Vec<Vec<Vec<u32>>> = Vec::new();
    while let Some(q) = queue.pop_front() {
        let (comps, latch) = keys[q as usize].clone();
        let mut next_latch = latch.clone();
        for t in &tuples {
            if let Some(s) = t.latch_slot {
                let c = latch[s] as usize;
                let (k, ref g) = t.obligations[c];
                if g[comps[k] as usize] {
                    next_latch[s] = ((c + 1) % t.obligations.len()) as u8;
                }
            }
        }
        let mut rows = Vec::with_capacity(no);
        for o in 0..no {
            let choices: Vec<Vec<&[u32]>> = factors.iter().zip(&comps).map(|(f, &c)| f.functions(c as usize, o).collect()).collect();
            let mut row = Vec::new();
            if choices.iter().all(|c| !c.is_empty()) {
                let mut seen = HashSet::new();
                let mut pick = vec![0usize; factors.len()];
                loop {
                    let mut func = Vec::with_capacity(ni);
                    for i in 0..ni {
                        let target: Key = (choices.iter().zip(&pick).map(|(c, &p)| c[p][i]).collect(), next_latch.clone());
                        let id = match index.get(&target) {
                            Some(&id) => id,
                            None => {
                                let id = keys.len() as u32;
                                index.insert(target.clone(), id);
                                keys.push(target);
                                queue.push_back(id);
                                id
                            }
                        };
                        func.push(id);
                    }
                    push_unique(&mut row, &mut seen, func);
                    // odometer over the factors' function lists
                    let mut k = 0;
                    while k < pick.len() {
                        pick[k] += 1;
                        if pick[k] < choices[k].len() {
                            break;
                        }
                        pick[k] = 0;
                        k += 1;
                    }
                    if k == pick.len() {
                        break;
                    }
                }
            }
            rows.push(row);
        }
        if delta.len() <= q as usize {
            delta.resize(q as usize + 1, Vec::new());
        }
        delta[q as usize] = rows;
    }
    let n = keys.len();
    let in_set = |k: usize, set: &FixedBitSet, q: usize| set[keys[q].0[k] as usize];
    let pairs = match mode {
        AcceptanceMode::Latched => tuples
            .iter()
            .map(|t| {
                let fin = bitset(n, (0..n).filter(|&q| t.fin.iter().any(|(k, f)| in_set(*k, f, q))));
                let inf = match (t.obligations.len(), t.latch_slot) {
                    (0, _) => bitset(n, 0..n),
                    (1, _) => bitset(n, (0..n).filter(|&q| in_set(t.obligations[0].0, &t.obligations[0].1, q))),
                    (m, Some(s)) => {
                        let (k, ref g) = t.obligations[m - 1];
                        bitset(n, (0..n).filter(|&q| keys[q].1[s] as usize == m - 1 && in_set(k, g, q)))
                    }
                    (_, None) => unreachable!("several obligations always get a latch"),
                };
                TreePair { fin, inf }
            })
            .collect(),
        AcceptanceMode::Literal => {
            let mut combos: Vec<Vec<usize>> = vec![vec![]];
            for f in factors {
                combos = combos
                    .into_iter()
                    .flat_map(|c| {
                        (0..f.pairs.len()).map(move |p| {
                            let mut c = c.clone();
                            c.push(p);
                            c
                        })
                    })
                    .collect();
            }
            combos
                .iter()
                .map(|c| {
                    let all = |pick: &dyn Fn(&TreePair) -> &FixedBitSet| {
                        bitset(n, (0..n).filter(|&q| factors.iter().enumerate().all(|(k, f)| in_set(k, pick(&f.pairs[c[k]]), q))))
                    };
                    TreePair { fin: all(&|p| &p.fin), inf: all(&|p| &p.inf) }
                })
                .collect()
        }
    };
    let states = keys
        .iter()
        .map(|(comps, latch)| {
            let mut factors_out = Vec::new();
            let mut latch_out = Vec::new();
            for (f, &c) in factors.iter().zip(comps) {
                let s = &f.states[c as usize];
                factors_out.extend_from_slice(&s.factors);
                latch_out.extend_from_slice(&s.latch);
            }
            latch_out.extend_from_slice(latch);
            TreeState { factors: factors_out, latch: latch_out, level: None }
        })
        .collect();
    Ok(RabinTreeAutomaton::from_parts(
        ab,
        states,
        delta.into_iter().flatten().collect(),
        0,
        pairs,
        factors.iter().flat_map(|f| f.factor_origin.iter().copied()).collect(),
        factors.iter().flat_map(|f| f.factor_top.iter().copied()).collect(),
        factors.iter().flat_map(|f| f.factor_constrained.iter().copied()).collect(),
    ))
}

/// Tree automaton for a cooperation level. With `track_all`, every base
/// property of the level's ruleset contributes a factor so that unpack
/// exposes all base automata; only the level's own conjuncts constrain
/// acceptance.
pub fn build_level_automaton(
    level: &LevelSpec,
    base: &BaseAutomata,
    track_all: bool,
    mode: AcceptanceMode,
) -> Result<RabinTreeAutomaton, TreeError> {
    let basis = level.basis();
    let mut factors = Vec::new();
    if track_all {
        for &b in level.ruleset().bases() {
            let w = base.get(b)?;
            let f = match basis.iter().find(|c| c.base == b) {
                Some(c) => lift(w, c.modality),
                None => lift_universal(w).accept_all(),
            };
            factors.push(f.tagged(b));
        }
    } else {
        for c in &basis {
            factors.push(lift(base.get(c.base)?, c.modality).tagged(c.base));
        }
    }
    product(&factors, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dra::{CombinationOverrides, RabinPair};
    use crate::fixtures;
    use crate::hierarchy::Ruleset;

    fn hub_bases() -> BaseAutomata {
        BaseAutomata::derive(fixtures::hub_assumptions(), fixtures::hub_guarantees(), CombinationOverrides::default(), false).unwrap()
    }

    fn universal(ab: &Alphabet) -> RabinWordAutomaton {
        RabinWordAutomaton::new("u", ab.clone(), vec!["s".into()], vec![0; ab.num_letters()], 0, vec![RabinPair::new([], [0])]).unwrap()
    }

    #[test]
    fn lift_shapes() {
        let a = fixtures::hub_assumptions();
        let u = lift_universal(&a);
        let e = lift_exists(&a);
        let g = lift_globally_exists(&a);
        assert_eq!(u.num_states(), a.num_states());
        assert_eq!(g.num_states(), 2 * a.num_states());
        assert_eq!(g.pairs().len(), a.pairs().len() + 1);
        for q in 0..a.num_states() {
            for o in 0..13 {
                assert_eq!(u.num_functions(q, o), 1);
                assert!(e.num_functions(q, o) <= 3);
            }
        }
        // from q2 with output y0 all three inputs lead to q0, so the
        // existential functions are distinct only in which branch goes to top
        let q2 = a.state_index("q2").unwrap();
        assert_eq!(e.num_functions(q2, 0), 3);
        assert_eq!(g.state(g.initial()).factors, vec![FactorState::Flagged(a.initial() as u32, true)]);
    }

    #[test]
    fn exists_equals_universal_on_one_input() {
        let ab = Alphabet::numbered(1, 2);
        let w = RabinWordAutomaton::new("w", ab, vec!["a".into(), "b".into()], vec![1, 0, 1, 1], 0, vec![RabinPair::new([], [1])]).unwrap();
        let u = lift_universal(&w);
        let e = lift_exists(&w);
        for q in 0..w.num_states() {
            for o in 0..2 {
                assert_eq!(u.functions(q, o).collect::<Vec<_>>(), e.functions(q, o).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn single_factor_product_is_identity() {
        let a = lift_globally_exists(&fixtures::hub_assumptions());
        for mode in [AcceptanceMode::Literal, AcceptanceMode::Latched] {
            let p = product(std::slice::from_ref(&a), mode).unwrap();
            assert_eq!(p.num_states(), a.num_states());
            assert_eq!(p.pairs(), a.pairs());
        }
        assert_eq!(product(&[], AcceptanceMode::Latched).unwrap_err(), TreeError::EmptyProduct);
    }

    #[test]
    fn product_state_counts() {
        // two independent two-state automata over one output: all pairs reachable
        let ab = Alphabet::numbered(2, 1);
        let flip =
            RabinWordAutomaton::new("f", ab.clone(), vec!["a".into(), "b".into()], vec![0, 1, 1, 0], 0, vec![RabinPair::new([], [0])])
                .unwrap();
        let other =
            RabinWordAutomaton::new("g", ab, vec!["c".into(), "d".into()], vec![1, 0, 0, 1], 0, vec![RabinPair::new([], [1])]).unwrap();
        let (f, g) = (lift_universal(&flip), lift_universal(&other));
        let lit = product(&[f.clone(), g.clone()], AcceptanceMode::Literal).unwrap();
        let lat = product(&[f, g], AcceptanceMode::Latched).unwrap();
        // the appended top states are unreachable here
        assert_eq!(lit.num_states(), 4);
        assert_eq!(lat.num_states(), 4 * 2);
        for q in 0..lat.num_states() {
            assert_eq!(lat.state(q).latch.len(), 1);
        }
    }

    #[test]
    fn unpack_examples() {
        let bases = hub_bases();
        let a = bases.get(BaseProp::A).unwrap();
        let u = lift_universal(a).tagged(BaseProp::A);
        assert_eq!(u.unpack(3).entries(), &[(Some(BaseProp::A), 3)]);
        let ge = lift_globally_exists(a).tagged(BaseProp::A);
        assert_eq!(ge.unpack(4), ge.unpack(5));
        let level = LevelSpec::parse("A->G & GE(A)", Ruleset::Base).unwrap();
        let t = build_level_automaton(&level, &bases, true, AcceptanceMode::Latched).unwrap();
        for q in 0..t.num_states() {
            let up = t.unpack(q);
            for &b in Ruleset::Base.bases() {
                assert_eq!(up.states_of(Some(b)).count(), 1, "state {q} base {b:?}");
            }
        }
    }

    #[test]
    fn acceptance_factor_count_follows_basis() {
        let bases = hub_bases();
        let level = LevelSpec::parse("A->G & GE(A)", Ruleset::Base).unwrap();
        for track in [true, false] {
            let t = build_level_automaton(&level, &bases, track, AcceptanceMode::Latched).unwrap();
            assert_eq!(t.acceptance_factor_count(), 2);
        }
        let single = LevelSpec::parse("A->G", Ruleset::Base).unwrap();
        let t = build_level_automaton(&single, &bases, false, AcceptanceMode::Latched).unwrap();
        assert_eq!(t.num_factors(), 1);
        assert_eq!(t.pairs().len(), bases.get(BaseProp::Implies).unwrap().pairs().len());
    }

    #[test]
    fn projection_property() {
        let bases = hub_bases();
        let level = LevelSpec::parse("G & GE(A)", Ruleset::Base).unwrap();
        let parts = [lift_universal(bases.get(BaseProp::G).unwrap()), lift_globally_exists(bases.get(BaseProp::A).unwrap())];
        let t = product(&parts, AcceptanceMode::Latched).unwrap();
        let _ = level;
        let local = |k: usize, q: usize| -> usize {
            let fs = &t.state(q).factors[k];
            match (k, fs) {
                (0, FactorState::Plain(w)) => *w as usize,
                (1, FactorState::Flagged(w, b)) => 2 * *w as usize + usize::from(!*b),
                _ => unreachable!(),
            }
        };
        for q in 0..t.num_states() {
            for o in 0..13 {
                for f in t.functions(q, o) {
                    for (k, part) in parts.iter().enumerate() {
                        let proj: Vec<u32> = f.iter().map(|&s| local(k, s as usize) as u32).collect();
                        assert!(part.functions(local(k, q), o).any(|g| g == proj.as_slice()));
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_factors_do_not_add_latches() {
        let ab = Alphabet::numbered(2, 2);
        let u = lift_universal(&universal(&ab)).accept_all();
        let w = lift_universal(&universal(&ab));
        let p = product(&[u, w], AcceptanceMode::Latched).unwrap();
        assert!(p.state(0).latch.is_empty());
        assert_eq!(p.pairs().len(), 1);
    }
}
