//! Finite-state implementations: output first, then read an input.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Letter};
use crate::dra::{lookup, lookup_or_any, parse_header, Header};
use crate::error::{ModelError, ParseError};
use crate::hierarchy::{LevelSpec, Ruleset};
use crate::text::tokenize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MealyStrategy {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    initial: usize,
    output: Vec<usize>,
    next: Vec<usize>,
    levels: Option<Vec<LevelSpec>>,
}

/// One step of a simulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub state: usize,
    pub output: usize,
    pub input: usize,
    pub next: usize,
}

impl MealyStrategy {
    /// `next` is indexed by `state * |inputs| + input`.
    pub fn new(
        name: impl Into<String>,
        alphabet: Alphabet,
        states: Vec<String>,
        initial: usize,
        output: Vec<usize>,
        next: Vec<usize>,
    ) -> Result<Self, ModelError> {
        let n = states.len();
        if output.len() != n {
            return Err(ModelError::TableSize { expected: n, found: output.len() });
        }
        if next.len() != n * alphabet.num_inputs() {
            return Err(ModelError::TableSize { expected: n * alphabet.num_inputs(), found: next.len() });
        }
        if initial >= n {
            return Err(ModelError::StateOutOfRange(initial));
        }
        if let Some(&bad) = next.iter().find(|&&t| t >= n) {
            return Err(ModelError::StateOutOfRange(bad));
        }
        if output.iter().any(|&o| o >= alphabet.num_outputs()) {
            return Err(ModelError::LetterOutOfRange);
        }
        Ok(MealyStrategy { name: name.into(), alphabet, states, initial, output, next, levels: None })
    }

    /// One-state machine that always emits `output`.
    pub fn constant(alphabet: Alphabet, output: usize) -> Result<Self, ModelError> {
        let name = format!("const_{}", alphabet.outputs().get(output).ok_or(ModelError::LetterOutOfRange)?);
        let ni = alphabet.num_inputs();
        MealyStrategy::new(name, alphabet, vec!["m0".into()], 0, vec![output], vec![0; ni])
    }

    pub fn with_levels(mut self, levels: Vec<LevelSpec>) -> Result<Self, ModelError> {
        if levels.len() != self.states.len() {
            return Err(ModelError::TableSize { expected: self.states.len(), found: levels.len() });
        }
        self.levels = Some(levels);
        Ok(self)
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

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn output_of(&self, s: usize) -> usize {
        self.output[s]
    }

    pub fn next_state(&self, s: usize, input: usize) -> usize {
        self.next[s * self.alphabet.num_inputs() + input]
    }

    pub fn level_of(&self, s: usize) -> Option<&LevelSpec> {
        self.levels.as_ref().map(|l| &l[s])
    }

    pub fn levels(&self) -> Option<&[LevelSpec]> {
        self.levels.as_deref()
    }

    /// Letter produced when the machine in state `s` reads `input`.
    pub fn letter(&self, s: usize, input: usize) -> Letter {
        Letter::new(input, self.output[s])
    }

    pub fn reachable(&self) -> Vec<usize> {
        let ni = self.alphabet.num_inputs();
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(s) = queue.pop_front() {
            for i in 0..ni {
                let t = self.next_state(s, i);
                if !seen[t] {
                    seen[t] = true;
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Drops unreachable states and renumbers in breadth-first order.
    pub fn normalized(&self) -> Self {
        let order = self.reachable();
        let mut map = vec![usize::MAX; self.num_states()];
        for (k, &s) in order.iter().enumerate() {
            map[s] = k;
        }
        let ni = self.alphabet.num_inputs();
        MealyStrategy {
            name: self.name.clone(),
            alphabet: self.alphabet.clone(),
            states: order.iter().map(|&s| self.states[s].clone()).collect(),
            initial: 0,
            output: order.iter().map(|&s| self.output[s]).collect(),
            next: order.iter().flat_map(|&s| (0..ni).map(move |i| (s, i))).map(|(s, i)| map[self.next_state(s, i)]).collect(),
            levels: self.levels.as_ref().map(|l| order.iter().map(|&s| l[s]).collect()),
        }
    }

    /// Runs the machine on an input sequence from the initial state.
    pub fn run(&self, inputs: &[usize]) -> Vec<Step> {
        let mut s = self.initial;
        inputs
            .iter()
            .map(|&i| {
                let next = self.next_state(s, i);
                let step = Step { state: s, output: self.output[s], input: i, next };
                s = next;
                step
            })
            .collect()
    }

    /// State reached after reading `inputs`.
    pub fn state_after(&self, inputs: &[usize]) -> usize {
        inputs.iter().fold(self.initial, |s, &i| self.next_state(s, i))
    }

    /// Text form accepted by [`parse_mealy`].
    pub fn render(&self) -> String {
        let ab = &self.alphabet;
        let mut out = String::new();
        let _ = writeln!(out, "mealy {}", self.name);
        let _ = writeln!(out, "inputs: {}", ab.inputs().join(" "));
        let _ = writeln!(out, "outputs: {}", ab.outputs().join(" "));
        let _ = writeln!(out, "states: {} initial {}", self.states.join(" "), self.states[self.initial]);
        for s in 0..self.num_states() {
            let _ = writeln!(out, "emit: {} {}", self.states[s], ab.outputs()[self.output[s]]);
        }
        for s in 0..self.num_states() {
            let first = self.next_state(s, 0);
            if (0..ab.num_inputs()).all(|i| self.next_state(s, i) == first) {
                let _ = writeln!(out, "next: {} * -> {}", self.states[s], self.states[first]);
            } else {
                for i in 0..ab.num_inputs() {
                    let t = self.next_state(s, i);
                    let _ = writeln!(out, "next: {} {} -> {}", self.states[s], ab.inputs()[i], self.states[t]);
                }
            }
        }
        if let Some(levels) = &self.levels {
            for (name, level) in self.states.iter().zip(levels) {
                let _ = writeln!(out, "level: {name} {level}");
            }
        }
        out
    }
}

/// Reads the Mealy text format; `level:` lines are interpreted under
/// `ruleset` and must then cover every state.
pub fn parse_mealy(text: &str, ruleset: Ruleset) -> Result<MealyStrategy, ParseError> {
    let lines = tokenize(text);
    let (header, rest) = parse_header("mealy", &lines, false)?;
    let Header { name, alphabet, states, initial } = header;
    let n = states.len();
    let mut output = vec![None; n];
    let mut rules = Vec::new();
    let mut levels: Vec<Option<LevelSpec>> = vec![None; n];
    let mut any_level = false;
    for line in rest {
        let head = line.tokens[0];
        match head.text {
            "emit:" => {
                let s = lookup(line, 1, "state", &states, "state")?;
                let o = lookup(line, 2, "output", alphabet.outputs(), "output letter")?;
                line.expect_len(3)?;
                if output[s].is_some() {
                    return Err(line.error(head.column, format!("second `emit:` for `{}`", states[s])));
                }
                output[s] = Some(o);
            }
            "next:" => {
                let s = lookup(line, 1, "state", &states, "state")?;
                let i = lookup_or_any(line, 2, "input", alphabet.inputs(), "input letter or `*`")?;
                line.expect(3, "->")?;
                let t = lookup(line, 4, "state", &states, "target state")?;
                line.expect_len(5)?;
                rules.push((s, i, t));
            }
            "level:" => {
                let s = lookup(line, 1, "state", &states, "state")?;
                let spec: Vec<&str> = line.tokens[2..].iter().map(|t| t.text).collect();
                let level = LevelSpec::parse(&spec.join(" "), ruleset).map_err(|source| ParseError::Level { line: line.number, source })?;
                levels[s] = Some(level);
                any_level = true;
            }
            other => return Err(line.error(head.column, format!("unknown directive `{other}`"))),
        }
    }
    let ni = alphabet.num_inputs();
    let mut next = vec![0; n * ni];
    for s in 0..n {
        for i in 0..ni {
            let hit = rules.iter().find(|r| r.0 == s && r.1.is_none_or(|x| x == i));
            match hit {
                Some(r) => next[s * ni + i] = r.2,
                None => {
                    return Err(ParseError::Missing {
                        what: "next rule",
                        state: states[s].clone(),
                        letter: format!("input {}", alphabet.inputs()[i]),
                    })
                }
            }
        }
    }
    let output = output
        .into_iter()
        .enumerate()
        .map(|(s, o)| o.ok_or_else(|| ParseError::Missing { what: "emit line", state: states[s].clone(), letter: "any input".into() }))
        .collect::<Result<Vec<_>, _>>()?;
    let m = MealyStrategy::new(name, alphabet, states, initial, output, next)?;
    if any_level {
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(s, l)| l.ok_or_else(|| ModelError::MissingLevel(m.states[s].clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(m.with_levels(levels)?)
    } else {
        Ok(m)
    }
}
