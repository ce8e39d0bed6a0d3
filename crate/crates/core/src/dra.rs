//! Deterministic Rabin word automata over input/output letter pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::hash::Hash;

use fixedbitset::FixedBitSet;

use crate::alphabet::{Alphabet, Letter};
use crate::error::{ModelError, ParseError};
use crate::graph::Graph;
use crate::hierarchy::BaseProp;
use crate::text::{is_identifier, tokenize, Line};

pub const TOP_NAME: &str = "top";

/// One Rabin pair: accept when `fin` is visited finitely often and `inf`
/// infinitely often.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RabinPair {
    pub fin: BTreeSet<usize>,
    pub inf: BTreeSet<usize>,
}

impl RabinPair {
    pub fn new(fin: impl IntoIterator<Item = usize>, inf: impl IntoIterator<Item = usize>) -> Self {
        RabinPair { fin: fin.into_iter().collect(), inf: inf.into_iter().collect() }
    }
}

/// Result of running an automaton on a lasso word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub visited_infinitely: BTreeSet<usize>,
    pub accepting: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RabinWordAutomaton {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    delta: Vec<u32>,
    initial: usize,
    pairs: Vec<RabinPair>,
    top: usize,
}

impl RabinWordAutomaton {
    /// Builds and validates an automaton. `delta` is indexed by
    /// `state * |letters| + alphabet.letter_index(letter)`.
    ///
    /// A state named `top` is used as the full-language sink; if there is
    /// none, one is appended and added to an acceptance pair.
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        states: Vec<String>,
        delta: Vec<usize>,
        initial: usize,
        pairs: Vec<RabinPair>,
    ) -> Result<Self, ModelError> {
        let top = states.iter().position(|s| s == TOP_NAME);
        Self::build(name.into(), alphabet, states, delta, initial, pairs, top)
    }

    /// Like [`RabinWordAutomaton::new`] with an explicitly designated sink.
    pub fn with_top(
        name: impl Into<String>,
        alphabet: Alphabet,
        states: Vec<String>,
        delta: Vec<usize>,
        initial: usize,
        pairs: Vec<RabinPair>,
        top: usize,
    ) -> Result<Self, ModelError> {
        Self::build(name.into(), alphabet, states, delta, initial, pairs, Some(top))
    }

    fn build(
        name: String,
        alphabet: Alphabet,
        mut states: Vec<String>,
        delta: Vec<usize>,
        initial: usize,
        mut pairs: Vec<RabinPair>,
        top: Option<usize>,
    ) -> Result<Self, ModelError> {
        let n = states.len();
        let nl = alphabet.num_letters();
        if delta.len() != n * nl {
            return Err(ModelError::TableSize { expected: n * nl, found: delta.len() });
        }
        if let Some(&bad) = delta.iter().find(|&&t| t >= n) {
            return Err(ModelError::StateOutOfRange(bad));
        }
        if initial >= n {
            return Err(ModelError::StateOutOfRange(initial));
        }
        for p in &pairs {
            if let Some(&bad) = p.fin.iter().chain(&p.inf).find(|&&s| s >= n) {
                return Err(ModelError::StateOutOfRange(bad));
            }
        }
        let mut delta: Vec<u32> = delta.into_iter().map(|t| t as u32).collect();
        let top = match top {
            Some(t) => {
                if t >= n {
                    return Err(ModelError::StateOutOfRange(t));
                }
                if !is_full_sink(&delta, nl, &pairs, t) {
                    return Err(ModelError::InvalidTop(states[t].clone()));
                }
                t
            }
            None => {
                let t = n;
                let mut name = TOP_NAME.to_string();
                while states.contains(&name) {
                    name.push('\'');
                }
                states.push(name);
                delta.extend(std::iter::repeat_n(t as u32, nl));
                attach_top(&mut pairs, t);
                t
            }
        };
        Ok(RabinWordAutomaton { name, alphabet, states, delta, initial, pairs, top })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn pairs(&self) -> &[RabinPair] {
        &self.pairs
    }

    pub fn successor(&self, q: usize, l: Letter) -> usize {
        self.delta[q * self.alphabet.num_letters() + self.alphabet.letter_index(l)] as usize
    }

    /// Same automaton started from a different state.
    pub fn with_initial(&self, q: usize) -> Result<Self, ModelError> {
        if q >= self.num_states() {
            return Err(ModelError::StateOutOfRange(q));
        }
        let mut a = self.clone();
        a.initial = q;
        Ok(a)
    }

    /// True when every pair has an empty finite set, so that the condition
    /// is a Buchi condition on the union of the infinite sets.
    pub fn is_buchi_shaped(&self) -> bool {
        self.pairs.iter().all(|p| p.fin.is_empty())
    }

    /// Union of the infinite sets of all pairs, as a membership vector.
    fn buchi_set(&self) -> Vec<bool> {
        let mut v = vec![false; self.num_states()];
        for p in &self.pairs {
            for &s in &p.inf {
                v[s] = true;
            }
        }
        v
    }

    pub fn accepts_set(&self, inf: &BTreeSet<usize>) -> bool {
        self.pairs.iter().any(|p| p.fin.is_disjoint(inf) && !p.inf.is_disjoint(inf))
    }

    pub fn run_lasso(&self, prefix: &[Letter], cycle: &[Letter]) -> Result<RunOutcome, ModelError> {
        if cycle.is_empty() {
            return Err(ModelError::EmptyCycle);
        }
        if !prefix.iter().chain(cycle).all(|&l| self.alphabet.contains(l)) {
            return Err(ModelError::LetterOutOfRange);
        }
        let mut q = self.initial;
        for &l in prefix {
            q = self.successor(q, l);
        }
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut trace = Vec::new();
        let mut pos = 0;
        let start = loop {
            if let Some(&at) = seen.get(&(q, pos)) {
                break at;
            }
            seen.insert((q, pos), trace.len());
            trace.push(q);
            q = self.successor(q, cycle[pos]);
            pos = (pos + 1) % cycle.len();
        };
        let visited_infinitely: BTreeSet<usize> = trace[start..].iter().copied().collect();
        let accepting = self.accepts_set(&visited_infinitely);
        Ok(RunOutcome { visited_infinitely, accepting })
    }

    /// Acceptance of the word `prefix · cycle^ω`.
    pub fn accepts_lasso(&self, prefix: &[Letter], cycle: &[Letter]) -> Result<bool, ModelError> {
        Ok(self.run_lasso(prefix, cycle)?.accepting)
    }

    fn state_graph(&self) -> Graph {
        let nl = self.alphabet.num_letters();
        Graph::new(
            (0..self.num_states())
                .map(|q| {
                    let mut s = self.delta[q * nl..(q + 1) * nl].to_vec();
                    s.sort_unstable();
                    s.dedup();
                    s
                })
                .collect(),
        )
    }

    /// States from which some word is accepted.
    pub fn nonempty_states(&self) -> FixedBitSet {
        let g = self.state_graph();
        let mut good = Vec::new();
        for p in &self.pairs {
            let mut mask = FixedBitSet::with_capacity(self.num_states());
            mask.insert_range(..);
            p.fin.iter().for_each(|&s| mask.set(s, false));
            for scc in g.cyclic_sccs(&mask) {
                if scc.iter().any(|s| p.inf.contains(s)) {
                    good.extend(scc);
                }
            }
        }
        g.co_reachable(good)
    }

    pub fn nonempty_from(&self, q: usize) -> bool {
        q < self.num_states() && self.nonempty_states()[q]
    }

    /// Text form accepted by [`parse_dra`].
    pub fn render(&self) -> String {
        let ab = &self.alphabet;
        let mut out = String::new();
        let _ = writeln!(out, "dra {}", self.name);
        let _ = writeln!(out, "inputs: {}", ab.inputs().join(" "));
        let _ = writeln!(out, "outputs: {}", ab.outputs().join(" "));
        let _ = writeln!(out, "states: {} initial {}", self.states.join(" "), self.states[self.initial]);
        for q in 0..self.num_states() {
            for (i, o, t) in self.compressed_rules(q) {
                let i = i.map_or("*", |i| ab.inputs()[i].as_str());
                let o = o.map_or("*", |o| ab.outputs()[o].as_str());
                let _ = writeln!(out, "trans: {} {i} {o} -> {}", self.states[q], self.states[t]);
            }
        }
        for p in &self.pairs {
            let names = |set: &BTreeSet<usize>| set.iter().map(|&s| format!(" {}", self.states[s])).collect::<String>();
            let _ = writeln!(out, "pair: {{{} }} {{{} }}", names(&p.fin), names(&p.inf));
        }
        out
    }

    fn compressed_rules(&self, q: usize) -> Vec<(Option<usize>, Option<usize>, usize)> {
        let ab = &self.alphabet;
        let t = |i, o| self.successor(q, Letter::new(i, o));
        let t0 = t(0, 0);
        if ab.letters().all(|l| self.successor(q, l) == t0) {
            return vec![(None, None, t0)];
        }
        let by_input: Vec<_> = (0..ab.num_inputs())
            .flat_map(|i| {
                let first = t(i, 0);
                if (0..ab.num_outputs()).all(|o| t(i, o) == first) {
                    vec![(Some(i), None, first)]
                } else {
                    (0..ab.num_outputs()).map(|o| (Some(i), Some(o), t(i, o))).collect()
                }
            })
            .collect();
        let by_output: Vec<_> = (0..ab.num_outputs())
            .flat_map(|o| {
                let first = t(0, o);
                if (0..ab.num_inputs()).all(|i| t(i, o) == first) {
                    vec![(None, Some(o), first)]
                } else {
                    (0..ab.num_inputs()).map(|i| (Some(i), Some(o), t(i, o))).collect()
                }
            })
            .collect();
        if by_output.len() < by_input.len() {
            by_output
        } else {
            by_input
        }
    }
}

fn is_full_sink(delta: &[u32], nl: usize, pairs: &[RabinPair], t: usize) -> bool {
    delta[t * nl..(t + 1) * nl].iter().all(|&s| s as usize == t) && pairs.iter().any(|p| !p.fin.contains(&t) && p.inf.contains(&t))
}

struct Rule {
    state: usize,
    input: Option<usize>,
    output: Option<usize>,
    target: usize,
}

fn identifiers<'a>(line: &Line<'a>, from: usize) -> Result<Vec<&'a str>, ParseError> {
    line.tokens[from..]
        .iter()
        .map(|t| if is_identifier(t.text) { Ok(t.text) } else { Err(line.error(t.column, format!("invalid name `{}`", t.text))) })
        .collect()
}

pub(crate) struct Header {
    pub name: String,
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub initial: usize,
}

/// Reads the shared `<kind> name`, `inputs:`, `outputs:`, `states:` lines
/// and returns the remaining lines.
pub(crate) fn parse_header<'a>(
    kind: &'static str,
    lines: &'a [Line<'a>],
    implicit_top: bool,
) -> Result<(Header, Vec<&'a Line<'a>>), ParseError> {
    let mut name = None;
    let mut inputs = None;
    let mut outputs = None;
    let mut states: Option<(Vec<String>, usize)> = None;
    let mut rest = Vec::new();
    for line in lines {
        let head = line.tokens[0];
        match head.text {
            k if k == kind => {
                if name.is_some() {
                    return Err(line.error(head.column, format!("duplicate `{kind}` line")));
                }
                let t = line.token(1, "a name")?;
                line.expect_len(2)?;
                name = Some(t.text.to_string());
            }
            "inputs:" | "outputs:" => {
                let ids = identifiers(line, 1)?;
                if ids.is_empty() {
                    return Err(line.error(line.end_column(), "expected at least one letter"));
                }
                let slot = if head.text == "inputs:" { &mut inputs } else { &mut outputs };
                if slot.is_some() {
                    return Err(line.error(head.column, format!("duplicate `{}` line", head.text)));
                }
                *slot = Some(ids.into_iter().map(String::from).collect::<Vec<String>>());
            }
            "states:" => {
                if states.is_some() {
                    return Err(line.error(head.column, "duplicate `states:` line"));
                }
                let k = line
                    .tokens
                    .iter()
                    .position(|t| t.text == "initial")
                    .ok_or_else(|| line.error(line.end_column(), "expected `initial <state>`"))?;
                let names: Vec<String> = identifiers(&Line { number: line.number, tokens: line.tokens[..k].to_vec() }, 1)?
                    .into_iter()
                    .map(String::from)
                    .collect();
                if names.is_empty() {
                    return Err(line.error(line.tokens[k].column, "expected at least one state"));
                }
                for (j, n) in names.iter().enumerate() {
                    if names[..j].contains(n) {
                        return Err(line.error(line.tokens[j + 1].column, format!("duplicate state `{n}`")));
                    }
                }
                let init = line.token(k + 1, "initial state")?;
                line.expect_len(k + 2)?;
                let idx = names.iter().position(|n| n == init.text).ok_or_else(|| ParseError::UnknownName {
                    line: line.number,
                    column: init.column,
                    kind: "state",
                    name: init.text.to_string(),
                })?;
                states = Some((names, idx));
            }
            _ => {
                if name.is_none() || inputs.is_none() || outputs.is_none() || states.is_none() {
                    let missing = if name.is_none() {
                        kind
                    } else if inputs.is_none() {
                        "inputs:"
                    } else if outputs.is_none() {
                        "outputs:"
                    } else {
                        "states:"
                    };
                    return Err(line.error(head.column, format!("`{}` before `{missing}` declaration", head.text)));
                }
                rest.push(line);
            }
        }
    }
    let name = name.ok_or(ParseError::MissingHeader(kind))?;
    let inputs = inputs.ok_or(ParseError::MissingHeader("inputs:"))?;
    let outputs = outputs.ok_or(ParseError::MissingHeader("outputs:"))?;
    let (mut states, initial) = states.ok_or(ParseError::MissingHeader("states:"))?;
    let alphabet = Alphabet::new(inputs, outputs)?;
    if implicit_top && !states.iter().any(|s| s == TOP_NAME) {
        states.push(TOP_NAME.to_string());
    }
    Ok((Header { name, alphabet, states, initial }, rest))
}

pub(crate) fn lookup(line: &Line<'_>, k: usize, kind: &'static str, names: &[String], what: &str) -> Result<usize, ParseError> {
    let t = line.token(k, what)?;
    names.iter().position(|n| n == t.text).ok_or_else(|| ParseError::UnknownName {
        line: line.number,
        column: t.column,
        kind,
        name: t.text.to_string(),
    })
}

pub(crate) fn lookup_or_any(
    line: &Line<'_>,
    k: usize,
    kind: &'static str,
    names: &[String],
    what: &str,
) -> Result<Option<usize>, ParseError> {
    if line.token(k, what)?.text == "*" {
        Ok(None)
    } else {
        lookup(line, k, kind, names, what).map(Some)
    }
}

/// Reads the DRA text format. Transition rules are tried in order and the
/// first matching one wins; `*` matches any letter. A state named `top` may
/// be referenced without being declared, in which case it is added as the
/// full-language sink.
pub fn parse_dra(text: &str) -> Result<RabinWordAutomaton, ParseError> {
    let lines = tokenize(text);
    let (header, rest) = parse_header("dra", &lines, true)?;
    let Header { name, alphabet, states, initial } = header;
    let mut rules = Vec::new();
    let mut pairs = Vec::new();
    for line in rest {
        let head = line.tokens[0];
        match head.text {
            "trans:" => {
                let state = lookup(line, 1, "state", &states, "source state")?;
                let input = lookup_or_any(line, 2, "input", alphabet.inputs(), "input letter or `*`")?;
                let output = lookup_or_any(line, 3, "output", alphabet.outputs(), "output letter or `*`")?;
                line.expect(4, "->")?;
                let target = lookup(line, 5, "state", &states, "target state")?;
                line.expect_len(6)?;
                rules.push(Rule { state, input, output, target });
            }
            "pair:" => {
                let mut k = 1;
                let mut sets = Vec::new();
                for _ in 0..2 {
                    line.expect(k, "{")?;
                    k += 1;
                    let mut set = BTreeSet::new();
                    while line.token(k, "`}`")?.text != "}" {
                        set.insert(lookup(line, k, "state", &states, "state")?);
                        k += 1;
                    }
                    k += 1;
                    sets.push(set);
                }
                line.expect_len(k)?;
                let inf = sets.pop().unwrap();
                let fin = sets.pop().unwrap();
                pairs.push(RabinPair { fin, inf });
            }
            other => return Err(line.error(head.column, format!("unknown directive `{other}`"))),
        }
    }
    let nl = alphabet.num_letters();
    let mut delta = vec![usize::MAX; states.len() * nl];
    for q in 0..states.len() {
        for l in alphabet.letters() {
            let hit = rules.iter().find(|r| r.state == q && r.input.is_none_or(|i| i == l.input) && r.output.is_none_or(|o| o == l.output));
            match hit {
                Some(r) => delta[q * nl + alphabet.letter_index(l)] = r.target,
                None if states[q] == TOP_NAME => delta[q * nl + alphabet.letter_index(l)] = q,
                None => return Err(ParseError::Missing { what: "transition", state: states[q].clone(), letter: alphabet.letter_name(l) }),
            }
        }
    }
    let top = states.iter().position(|s| s == TOP_NAME).unwrap();
    let declared = lines.iter().any(|l| l.tokens[0].text == "states:" && l.tokens.iter().any(|t| t.text == TOP_NAME));
    if !declared {
        attach_top(&mut pairs, top);
    }
    Ok(RabinWordAutomaton::with_top(name, alphabet, states, delta, initial, pairs, top)?)
}

/// Makes `top` accepting by adding it to a pair that does not forbid it.
fn attach_top(pairs: &mut Vec<RabinPair>, top: usize) {
    if pairs.iter().any(|p| !p.fin.contains(&top) && p.inf.contains(&top)) {
        return;
    }
    let slot = pairs.iter().position(|p| p.fin.is_empty()).or_else(|| pairs.iter().position(|p| !p.fin.contains(&top)));
    match slot {
        Some(k) => {
            pairs[k].inf.insert(top);
        }
        None => pairs.push(RabinPair::new([], [top])),
    }
}

/// Boolean combinations of two automata.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Combination {
    Implies,
    And,
    Or,
}

impl Combination {
    fn label(self) -> &'static str {
        match self {
            Combination::Implies => "implication",
            Combination::And => "conjunction",
            Combination::Or => "disjunction",
        }
    }
}

/// Breadth-first exploration of a product with a designated sink key.
struct Explored<K> {
    keys: Vec<K>,
    delta: Vec<usize>,
    top: usize,
}

fn explore<K: Clone + Eq + Hash>(nl: usize, init: K, top: K, succ: impl Fn(&K, usize) -> K) -> Explored<K> {
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut keys = Vec::new();
    let mut queue = VecDeque::new();
    for k in [init, top.clone()] {
        if !index.contains_key(&k) {
            index.insert(k.clone(), keys.len());
            keys.push(k.clone());
            queue.push_back(k);
        }
    }
    let mut delta = Vec::new();
    let mut order = Vec::new();
    while let Some(k) = queue.pop_front() {
        order.push(index[&k]);
        let mut row = Vec::with_capacity(nl);
        for l in 0..nl {
            let t = succ(&k, l);
            let id = match index.get(&t) {
                Some(&id) => id,
                None => {
                    let id = keys.len();
                    index.insert(t.clone(), id);
                    keys.push(t.clone());
                    queue.push_back(t);
                    id
                }
            };
            row.push(id);
        }
        delta.push(row);
    }
    let mut flat = vec![0; keys.len() * nl];
    for (row, &q) in delta.into_iter().zip(&order) {
        flat[q * nl..(q + 1) * nl].copy_from_slice(&row);
    }
    let top = index[&top];
    Explored { keys, delta: flat, top }
}

/// Product automaton recognizing `a → g`, `a ∧ g` or `a ∨ g`.
///
/// Implication and conjunction need Buchi-shaped operands; disjunction
/// works for any pair lists.
pub fn derive_combination(a: &RabinWordAutomaton, g: &RabinWordAutomaton, kind: Combination) -> Result<RabinWordAutomaton, ModelError> {
    if a.alphabet != g.alphabet {
        return Err(ModelError::AlphabetMismatch);
    }
    if kind != Combination::Or && !(a.is_buchi_shaped() && g.is_buchi_shaped()) {
        return Err(ModelError::NotBuchiShaped { kind: kind.label() });
    }
    let ab = a.alphabet.clone();
    let nl = ab.num_letters();
    let letter = |l: usize| ab.letter_at(l);
    let name = format!("{}_{}_{}", a.name, kind.label(), g.name);
    let pair_name = |qa: usize, qg: usize| {
        if qa == a.top && qg == g.top {
            TOP_NAME.to_string()
        } else {
            format!("{}.{}", a.states[qa], g.states[qg])
        }
    };
    match kind {
        Combination::Implies | Combination::Or => {
            let e = explore(nl, (a.initial, g.initial), (a.top, g.top), |&(qa, qg), l| {
                (a.successor(qa, letter(l)), g.successor(qg, letter(l)))
            });
            let lift_a = |set: &BTreeSet<usize>| -> BTreeSet<usize> { (0..e.keys.len()).filter(|&k| set.contains(&e.keys[k].0)).collect() };
            let lift_g = |set: &BTreeSet<usize>| -> BTreeSet<usize> { (0..e.keys.len()).filter(|&k| set.contains(&e.keys[k].1)).collect() };
            let pairs = if kind == Combination::Or {
                a.pairs
                    .iter()
                    .map(|p| RabinPair { fin: lift_a(&p.fin), inf: lift_a(&p.inf) })
                    .chain(g.pairs.iter().map(|p| RabinPair { fin: lift_g(&p.fin), inf: lift_g(&p.inf) }))
                    .collect()
            } else {
                let ga: BTreeSet<usize> = a.buchi_set().iter().enumerate().filter(|p| *p.1).map(|p| p.0).collect();
                let gg: BTreeSet<usize> = g.buchi_set().iter().enumerate().filter(|p| *p.1).map(|p| p.0).collect();
                vec![RabinPair { fin: lift_a(&ga), inf: (0..e.keys.len()).collect() }, RabinPair { fin: BTreeSet::new(), inf: lift_g(&gg) }]
            };
            let states = e.keys.iter().map(|&(qa, qg)| pair_name(qa, qg)).collect();
            RabinWordAutomaton::with_top(name, ab.clone(), states, e.delta, 0, pairs, e.top)
        }
        Combination::And => {
            let ga = a.buchi_set();
            let gg = g.buchi_set();
            let canon = |k: (usize, usize, u8)| if k.0 == a.top && k.1 == g.top { (k.0, k.1, 1) } else { k };
            let e = explore(nl, canon((a.initial, g.initial, 0)), (a.top, g.top, 1), |&(qa, qg, c), l| {
                let c2 = match c {
                    0 if ga[qa] => 1,
                    1 if gg[qg] => 0,
                    c => c,
                };
                canon((a.successor(qa, letter(l)), g.successor(qg, letter(l)), c2))
            });
            let inf = (0..e.keys.len())
                .filter(|&k| {
                    let (_, qg, c) = e.keys[k];
                    c == 1 && gg[qg]
                })
                .collect();
            let states = e
                .keys
                .iter()
                .map(
                    |&(qa, qg, c)| {
                        if qa == a.top && qg == g.top {
                            TOP_NAME.to_string()
                        } else {
                            format!("{}.{}.{c}", a.states[qa], g.states[qg])
                        }
                    },
                )
                .collect();
            RabinWordAutomaton::with_top(name, ab.clone(), states, e.delta, 0, vec![RabinPair { fin: BTreeSet::new(), inf }], e.top)
        }
    }
}

/// User-supplied automata replacing derived combinations.
#[derive(Clone, Debug, Default)]
pub struct CombinationOverrides {
    pub implies: Option<RabinWordAutomaton>,
    pub and: Option<RabinWordAutomaton>,
    pub or: Option<RabinWordAutomaton>,
}

/// The word automata for every base property a ruleset mentions.
#[derive(Clone, Debug)]
pub struct BaseAutomata {
    map: BTreeMap<BaseProp, RabinWordAutomaton>,
}

impl BaseAutomata {
    /// Derives the combined automata from `a` and `g`, preferring overrides.
    /// The disjunction is only built when `with_or` is set.
    pub fn derive(
        a: RabinWordAutomaton,
        g: RabinWordAutomaton,
        overrides: CombinationOverrides,
        with_or: bool,
    ) -> Result<Self, ModelError> {
        if a.alphabet != g.alphabet {
            return Err(ModelError::AlphabetMismatch);
        }
        let pick = |o: Option<RabinWordAutomaton>, kind| match o {
            Some(o) if o.alphabet != a.alphabet => Err(ModelError::AlphabetMismatch),
            Some(o) => Ok(o),
            None => derive_combination(&a, &g, kind),
        };
        let mut map = BTreeMap::new();
        map.insert(BaseProp::Implies, pick(overrides.implies, Combination::Implies)?);
        map.insert(BaseProp::And, pick(overrides.and, Combination::And)?);
        if with_or {
            map.insert(BaseProp::Or, pick(overrides.or, Combination::Or)?);
        }
        map.insert(BaseProp::A, a);
        map.insert(BaseProp::G, g);
        Ok(BaseAutomata { map })
    }

    /// Wraps an explicit map; every automaton must share one alphabet.
    pub fn from_map(map: BTreeMap<BaseProp, RabinWordAutomaton>) -> Result<Self, ModelError> {
        let mut it = map.values();
        if let Some(first) = it.next() {
            if it.any(|w| w.alphabet != first.alphabet) {
                return Err(ModelError::AlphabetMismatch);
            }
        }
        Ok(BaseAutomata { map })
    }

    pub fn get(&self, b: BaseProp) -> Result<&RabinWordAutomaton, ModelError> {
        self.map.get(&b).ok_or_else(|| ModelError::MissingBase(b.symbol().to_string()))
    }

    pub fn contains(&self, b: BaseProp) -> bool {
        self.map.contains_key(&b)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.map.values().next().expect("at least one base automaton").alphabet
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn l(i: usize, o: usize) -> Letter {
        Letter::new(i, o)
    }

    #[test]
    fn hub_fixture_shape() {
        let a = fixtures::hub_assumptions();
        assert_eq!(a.num_states(), 18);
        assert_eq!(a.state_name(a.top()), "top");
        assert_eq!(a.alphabet().num_inputs(), 3);
        assert_eq!(a.alphabet().num_outputs(), 13);
        let ga: BTreeSet<usize> = ["q0", "q6", "q7", "q8", "q9", "q11", "q12"].iter().map(|n| a.state_index(n).unwrap()).collect();
        assert!(a.pairs()[0].fin.is_empty());
        assert_eq!(a.pairs()[0].inf, ga.into_iter().chain([a.top()]).collect());
    }

    #[test]
    fn lasso_examples() {
        let a = fixtures::hub_assumptions();
        assert!(a.accepts_lasso(&[], &[l(0, 0), l(0, 0)]).unwrap());
        // y5 leads into the q5 trap
        assert!(!a.accepts_lasso(&[l(0, 0)], &[l(0, 5)]).unwrap());
        assert!(a.with_initial(a.top()).unwrap().accepts_lasso(&[], &[l(1, 3)]).unwrap());
        assert_eq!(a.accepts_lasso(&[], &[]), Err(ModelError::EmptyCycle));
        assert_eq!(a.accepts_lasso(&[], &[l(3, 0)]), Err(ModelError::LetterOutOfRange));
    }

    #[test]
    fn emptiness_examples() {
        let a = fixtures::hub_assumptions();
        let g = fixtures::hub_guarantees();
        assert!(a.nonempty_from(a.top()));
        assert!(!g.nonempty_from(g.state_index("q5").unwrap()));
        assert!(!a.nonempty_from(a.state_index("q13").unwrap()));
        assert!(a.nonempty_from(a.initial()));
    }

    #[test]
    fn missing_transition_is_reported() {
        let text = "dra m\ninputs: x0 x1\noutputs: y0\nstates: s initial s\ntrans: s x0 * -> s\npair: { } { s }\n";
        match parse_dra(text) {
            Err(ParseError::Missing { state, letter, .. }) => {
                assert_eq!(state, "s");
                assert_eq!(letter, "(x1,y0)");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let text = "dra m\ninputs: x0\noutputs: y0\nstates: s initial s\ntrans: s x0 y0 => s\n";
        assert!(matches!(parse_dra(text), Err(ParseError::Syntax { line: 5, column: 16, .. })));
        let text = "dra m\ninputs: x0\noutputs: y0\nstates: s initial s\ntrans: s x0 y0 -> nowhere\n";
        assert!(matches!(parse_dra(text), Err(ParseError::UnknownName { line: 5, column: 19, .. })));
    }

    #[test]
    fn one_state_universal_equals_its_top() {
        let text = "dra u\ninputs: x0 x1\noutputs: y0\nstates: s0 initial s0\ntrans: s0 * * -> s0\npair: { } { s0 }\n";
        let u = parse_dra(text).unwrap();
        assert_eq!(u.num_states(), 2);
        let top = u.with_initial(u.top()).unwrap();
        for cyc in [vec![l(0, 0)], vec![l(1, 0), l(0, 0)]] {
            assert_eq!(u.accepts_lasso(&[], &cyc), top.accepts_lasso(&[], &cyc));
            assert!(u.accepts_lasso(&[l(1, 0)], &cyc).unwrap());
        }
    }

    #[test]
    fn render_round_trips() {
        for w in [fixtures::hub_assumptions(), fixtures::trigger_ack_assumptions()] {
            let again = parse_dra(&w.render()).unwrap();
            assert_eq!(again, w);
        }
    }

    #[test]
    fn or_keeps_both_pair_lists() {
        let a = fixtures::hub_assumptions();
        let g = fixtures::hub_guarantees();
        let or = derive_combination(&a, &g, Combination::Or).unwrap();
        assert_eq!(or.pairs().len(), 2);
        assert_eq!(or.state_name(or.top()), "top");
    }

    #[test]
    fn and_requires_buchi_operands() {
        let a = fixtures::hub_assumptions();
        let g = fixtures::hub_guarantees();
        let or = derive_combination(&a, &g, Combination::Or).unwrap();
        let mut with_fin = or.clone();
        with_fin.pairs[0].fin.insert(0);
        assert!(matches!(derive_combination(&with_fin, &g, Combination::And), Err(ModelError::NotBuchiShaped { .. })));
        let other = parse_dra("dra u\ninputs: z\noutputs: y0\nstates: s initial s\ntrans: s * * -> s\npair: { } { s }\n").unwrap();
        assert_eq!(derive_combination(&a, &other, Combination::Or), Err(ModelError::AlphabetMismatch));
    }

    #[test]
    fn universal_premise_makes_implication_equal_conclusion() {
        let g = fixtures::hub_guarantees();
        let text = "dra t\ninputs: x0 x1 x2\noutputs: y0 y1 y2 y3 y4 y5 y6 y7 y8 y9 y10 y11 y12\nstates: s initial s\ntrans: s * * -> s\npair: { } { s }\n";
        let t = parse_dra(text).unwrap();
        let imp = derive_combination(&t, &g, Combination::Implies).unwrap();
        let outs = [0, 2, 3, 5, 6, 7, 11];
        for &o1 in &outs {
            for &o2 in &outs {
                for i in 0..3 {
                    let p = [l(0, 0), l(i, o1)];
                    let c = [l(i, o2), l((i + 1) % 3, 2), l(0, o1)];
                    assert_eq!(imp.accepts_lasso(&p, &c), g.accepts_lasso(&p, &c));
                }
            }
        }
    }

    #[test]
    fn undeclared_top_target() {
        let text = "dra t\ninputs: x0 x1\noutputs: y0\nstates: s initial s\ntrans: s x0 * -> s\ntrans: s x1 * -> top\npair: { } { s }\n";
        let w = parse_dra(text).unwrap();
        assert_eq!(w.num_states(), 2);
        assert!(w.accepts_lasso(&[l(1, 0)], &[l(0, 0)]).unwrap());
        let bad = "dra t\ninputs: x0\noutputs: y0\nstates: s top initial s\ntrans: s * * -> top\ntrans: top * * -> s\npair: { } { s }\n";
        assert!(matches!(parse_dra(bad), Err(ParseError::Model(ModelError::InvalidTop(_)))));
    }
}
