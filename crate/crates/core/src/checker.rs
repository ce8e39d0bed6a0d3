//! Model checking of Mealy machines against cooperation levels.
//!
//! A machine and a word automaton form a product graph whose paths are the
//! runs of the automaton on the machine's traces. Plain conjuncts ask that
//! every trace is accepted, `E` that one is, and `GE` that every reachable
//! product node still has an accepted continuation. The last one is exact
//! because the word automaton is deterministic: a trace prefix determines
//! the product node.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;

use crate::alphabet::{Alphabet, Letter};
use crate::dra::{BaseAutomata, RabinWordAutomaton};
use crate::error::ModelError;
use crate::graph::Graph;
use crate::hierarchy::{BaseProp, Conjunct, Lattice, LevelSpec, Modality};
use crate::mealy::MealyStrategy;

/// Ultimately periodic word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl Lasso {
    pub fn render(&self, ab: &Alphabet) -> (Vec<String>, Vec<String>) {
        let names = |ls: &[Letter]| ls.iter().map(|&l| ab.letter_name(l)).collect();
        (names(&self.prefix), names(&self.cycle))
    }
}

/// Outcome of one check. Witnesses are given for satisfied `E` checks (an
/// accepted trace) and for violated plain and `GE` checks (a trace that is
/// rejected, or that passes a point with no accepted continuation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub satisfied: bool,
    pub witness: Option<Lasso>,
}

/// Machine states paired with automaton states, reachable from a root.
pub struct ProductGraph {
    nodes: Vec<(u32, u32)>,
    /// `succ[v][i]` is the successor under input `i`.
    succ: Vec<Vec<u32>>,
    graph: Graph,
    /// Letters read before the root.
    lead: Vec<Letter>,
    output: Vec<usize>,
}

impl ProductGraph {
    pub fn new(m: &MealyStrategy, w: &RabinWordAutomaton) -> Result<Self, ModelError> {
        ProductGraph::rooted(m, w, &[])
    }

    /// Product rooted after the machine has read `split_inputs`.
    pub fn rooted(m: &MealyStrategy, w: &RabinWordAutomaton, split_inputs: &[usize]) -> Result<Self, ModelError> {
        if m.alphabet() != w.alphabet() {
            return Err(ModelError::AlphabetMismatch);
        }
        let ni = m.alphabet().num_inputs();
        if split_inputs.iter().any(|&i| i >= ni) {
            return Err(ModelError::LetterOutOfRange);
        }
        let mut ms = m.initial();
        let mut q = w.initial();
        let mut lead = Vec::new();
        for &i in split_inputs {
            let l = m.letter(ms, i);
            lead.push(l);
            q = w.successor(q, l);
            ms = m.next_state(ms, i);
        }
        let mut index: HashMap<(u32, u32), u32> = HashMap::from([((ms as u32, q as u32), 0)]);
        let mut nodes = vec![(ms as u32, q as u32)];
        let mut succ = Vec::new();
        let mut k = 0;
        while k < nodes.len() {
            let (ms, q) = nodes[k];
            k += 1;
            let row = (0..ni)
                .map(|i| {
                    let l = m.letter(ms as usize, i);
                    let key = (m.next_state(ms as usize, i) as u32, w.successor(q as usize, l) as u32);
                    *index.entry(key).or_insert_with(|| {
                        nodes.push(key);
                        nodes.len() as u32 - 1
                    })
                })
                .collect();
            succ.push(row);
        }
        let output = nodes.iter().map(|&(ms, _)| m.output_of(ms as usize)).collect();
        let graph = Graph::new(
            succ.iter()
                .map(|row: &Vec<u32>| {
                    let mut r = row.clone();
                    r.sort_unstable();
                    r.dedup();
                    r
                })
                .collect(),
        );
        Ok(ProductGraph { nodes, succ, graph, lead, output })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Machine state and automaton state of node `v`; node 0 is the root.
    pub fn node(&self, v: usize) -> (usize, usize) {
        (self.nodes[v].0 as usize, self.nodes[v].1 as usize)
    }

    pub fn successor(&self, v: usize, input: usize) -> usize {
        self.succ[v][input] as usize
    }

    fn word_state(&self, v: usize) -> usize {
        self.nodes[v].1 as usize
    }

    fn edge_letter(&self, u: usize, w: usize) -> Letter {
        let i = self.succ[u].iter().position(|&x| x as usize == w).expect("edge exists");
        Letter::new(i, self.output[u])
    }

    fn letters(&self, walk: &[usize]) -> Vec<Letter> {
        walk.windows(2).map(|e| self.edge_letter(e[0], e[1])).collect()
    }

    fn full_mask(&self) -> FixedBitSet {
        let mut all = FixedBitSet::with_capacity(self.num_nodes());
        all.insert_range(..);
        all
    }

    /// Lasso through the root that loops around the strongly connected set.
    fn lasso_into(&self, scc: &[usize]) -> Lasso {
        let mut target = FixedBitSet::with_capacity(self.num_nodes());
        target.insert(scc[0]);
        let path = self.graph.path(0, &target, None).expect("every node is reachable");
        let mut prefix = self.lead.clone();
        prefix.extend(self.letters(&path));
        Lasso { prefix, cycle: self.letters(&self.graph.covering_cycle(scc)) }
    }

    /// Lasso through `v` that loops wherever the input-0 walk from `v` loops.
    fn lasso_through(&self, v: usize) -> Lasso {
        let mut target = FixedBitSet::with_capacity(self.num_nodes());
        target.insert(v);
        let mut walk = self.graph.path(0, &target, None).expect("every node is reachable");
        let mut seen: HashMap<usize, usize> = walk.iter().enumerate().map(|(k, &x)| (x, k)).collect();
        let start = loop {
            let next = self.successor(*walk.last().unwrap(), 0);
            if let Some(&k) = seen.get(&next) {
                walk.push(next);
                break k;
            }
            seen.insert(next, walk.len());
            walk.push(next);
        };
        let mut prefix = self.lead.clone();
        prefix.extend(self.letters(&walk[..=start]));
        Lasso { prefix, cycle: self.letters(&walk[start..]) }
    }

    /// Strongly connected sets satisfying some pair of `w`.
    fn accepting_sccs(&self, w: &RabinWordAutomaton) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for p in w.pairs() {
            let mut mask = self.full_mask();
            (0..self.num_nodes()).filter(|&v| p.fin.contains(&self.word_state(v))).for_each(|v| mask.set(v, false));
            out.extend(self.graph.cyclic_sccs(&mask).into_iter().filter(|scc| scc.iter().any(|&v| p.inf.contains(&self.word_state(v)))));
        }
        out
    }

    /// A strongly connected set on which every pair fails: each pair either
    /// has a finite-set node inside or no infinite-set node.
    fn rejecting_scc(&self, w: &RabinWordAutomaton) -> Option<Vec<usize>> {
        let mut work = vec![self.full_mask()];
        while let Some(mask) = work.pop() {
            for scc in self.graph.cyclic_sccs(&mask) {
                let mut keep = FixedBitSet::with_capacity(self.num_nodes());
                scc.iter().for_each(|&v| keep.insert(v));
                let mut pruned = false;
                for p in w.pairs() {
                    let states = |v: &usize| self.word_state(*v);
                    if !scc.iter().map(states).any(|q| p.fin.contains(&q)) {
                        for &v in scc.iter().filter(|&&v| p.inf.contains(&self.word_state(v))) {
                            keep.set(v, false);
                            pruned = true;
                        }
                    }
                }
                if !pruned {
                    return Some(scc);
                }
                work.push(keep);
            }
        }
        None
    }

    pub fn universal(&self, w: &RabinWordAutomaton) -> Verdict {
        match self.rejecting_scc(w) {
            Some(scc) => Verdict { satisfied: false, witness: Some(self.lasso_into(&scc)) },
            None => Verdict { satisfied: true, witness: None },
        }
    }

    pub fn exists(&self, w: &RabinWordAutomaton) -> Verdict {
        match self.accepting_sccs(w).into_iter().next() {
            Some(scc) => Verdict { satisfied: true, witness: Some(self.lasso_into(&scc)) },
            None => Verdict { satisfied: false, witness: None },
        }
    }

    pub fn globally_exists(&self, w: &RabinWordAutomaton) -> Verdict {
        let good = self.graph.co_reachable(self.accepting_sccs(w).into_iter().flatten());
        match (0..self.num_nodes()).find(|&v| !good[v]) {
            Some(v) => Verdict { satisfied: false, witness: Some(self.lasso_through(v)) },
            None => Verdict { satisfied: true, witness: None },
        }
    }

    pub fn check(&self, modality: Modality, w: &RabinWordAutomaton) -> Verdict {
        match modality {
            Modality::Plain => self.universal(w),
            Modality::GloballyExists => self.globally_exists(w),
            Modality::Exists => self.exists(w),
        }
    }
}

/// Every trace of `m` is accepted by `w`.
pub fn check_universal(m: &MealyStrategy, w: &RabinWordAutomaton) -> Result<bool, ModelError> {
    Ok(ProductGraph::new(m, w)?.universal(w).satisfied)
}

/// Some trace of `m` is accepted by `w`.
pub fn check_exists(m: &MealyStrategy, w: &RabinWordAutomaton) -> Result<bool, ModelError> {
    Ok(ProductGraph::new(m, w)?.exists(w).satisfied)
}

/// Every prefix of a trace of `m` extends to a trace accepted by `w`.
pub fn check_globally_exists(m: &MealyStrategy, w: &RabinWordAutomaton) -> Result<bool, ModelError> {
    Ok(ProductGraph::new(m, w)?.globally_exists(w).satisfied)
}

/// Machine together with a split word; its traces are those of the machine
/// that start with the split word.
#[derive(Clone, Copy, Debug)]
pub struct BobbleQuery<'a> {
    pub machine: &'a MealyStrategy,
    pub split_inputs: &'a [usize],
}

impl<'a> BobbleQuery<'a> {
    pub fn full(machine: &'a MealyStrategy) -> Self {
        BobbleQuery { machine, split_inputs: &[] }
    }
}

/// Per-conjunct verdicts for one level.
#[derive(Clone, Debug)]
pub struct LevelReport {
    pub level: LevelSpec,
    pub satisfied: bool,
    pub conjuncts: Vec<(Conjunct, Verdict)>,
}

/// Memoised checks of one machine (or bobble tree) against base automata.
pub struct Checker<'a> {
    query: BobbleQuery<'a>,
    base: &'a BaseAutomata,
    products: BTreeMap<BaseProp, ProductGraph>,
    verdicts: BTreeMap<Conjunct, Verdict>,
}

impl<'a> Checker<'a> {
    pub fn new(query: BobbleQuery<'a>, base: &'a BaseAutomata) -> Self {
        Checker { query, base, products: BTreeMap::new(), verdicts: BTreeMap::new() }
    }

    pub fn conjunct(&mut self, c: Conjunct) -> Result<&Verdict, ModelError> {
        if !self.verdicts.contains_key(&c) {
            let w = self.base.get(c.base)?;
            if !self.products.contains_key(&c.base) {
                let pg = ProductGraph::rooted(self.query.machine, w, self.query.split_inputs)?;
                self.products.insert(c.base, pg);
            }
            let v = self.products[&c.base].check(c.modality, w);
            self.verdicts.insert(c, v);
        }
        Ok(&self.verdicts[&c])
    }

    /// Checks every conjunct of the level's closed set.
    pub fn level(&mut self, level: &LevelSpec) -> Result<LevelReport, ModelError> {
        let mut conjuncts = Vec::new();
        for c in level.conjuncts() {
            conjuncts.push((c, self.conjunct(c)?.clone()));
        }
        let satisfied = conjuncts.iter().all(|(_, v)| v.satisfied);
        Ok(LevelReport { level: *level, satisfied, conjuncts })
    }

    /// Maximal satisfied levels, in preference order. Empty when only the
    /// trivial level holds.
    pub fn classify(&mut self, lat: &Lattice) -> Result<Vec<LevelSpec>, ModelError> {
        let mut sat = Vec::with_capacity(lat.len());
        for l in lat.levels() {
            sat.push(self.level(l)?.satisfied);
        }
        Ok((0..lat.len())
            .filter(|&j| sat[j] && !(0..lat.len()).any(|k| k != j && sat[k] && lat.level(k).strictly_implies(lat.level(j))))
            .map(|j| *lat.level(j))
            .collect())
    }
}

pub fn check_conjunct(m: &MealyStrategy, c: Conjunct, base: &BaseAutomata) -> Result<Verdict, ModelError> {
    Ok(Checker::new(BobbleQuery::full(m), base).conjunct(c)?.clone())
}

pub fn check_level(m: &MealyStrategy, level: &LevelSpec, base: &BaseAutomata) -> Result<bool, ModelError> {
    Ok(Checker::new(BobbleQuery::full(m), base).level(level)?.satisfied)
}

pub fn classify(m: &MealyStrategy, lat: &Lattice, base: &BaseAutomata) -> Result<Vec<LevelSpec>, ModelError> {
    Checker::new(BobbleQuery::full(m), base).classify(lat)
}

/// Maximal levels satisfied by the bobble tree of the query.
pub fn bobble_level(q: BobbleQuery<'_>, lat: &Lattice, base: &BaseAutomata) -> Result<Vec<LevelSpec>, ModelError> {
    Checker::new(q, base).classify(lat)
}

/// Input sequences of length `depth` in lexicographic order.
pub fn input_words(num_inputs: usize, depth: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = num_inputs.pow(depth as u32);
    (0..total).map(move |mut k| {
        let mut w = vec![0; depth];
        for slot in w.iter_mut().rev() {
            *slot = k % num_inputs;
            k /= num_inputs;
        }
        w
    })
}
