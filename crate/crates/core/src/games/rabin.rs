use std::collections::HashMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use super::{GameError, Player};
use crate::mealy::MealyStrategy;
use crate::tree::RabinTreeAutomaton;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GamePair {
    pub fin: FixedBitSet,
    pub inf: FixedBitSet,
}

/// Two-player game with a Rabin winning condition for [`Player::Even`].
///
/// Vertices carry a component number that never decreases along edges. A
/// play ends up in one component and is judged by that component's pairs.
#[derive(Clone, Debug)]
pub struct RabinGame {
    owner: Vec<Player>,
    offsets: Vec<u32>,
    edges: Vec<u32>,
    pairs: Vec<GamePair>,
    component: Vec<u32>,
    pair_component: Vec<u32>,
}

impl RabinGame {
    pub fn new(owner: Vec<Player>, succ: Vec<Vec<u32>>, pairs: Vec<GamePair>) -> Result<Self, GameError> {
        let n = owner.len();
        if succ.len() != n {
            return Err(GameError::Invalid(format!("{} successor lists for {n} vertices", succ.len())));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut edges = Vec::new();
        offsets.push(0);
        for (v, out) in succ.into_iter().enumerate() {
            if out.is_empty() {
                return Err(GameError::Invalid(format!("vertex {v} has no successor")));
            }
            if let Some(&w) = out.iter().find(|&&w| w as usize >= n) {
                return Err(GameError::Invalid(format!("edge {v} -> {w} leaves the game")));
            }
            edges.extend(out);
            offsets.push(edges.len() as u32);
        }
        for p in &pairs {
            if p.fin.len() != n || p.inf.len() != n {
                return Err(GameError::Invalid("pair sets must cover every vertex".into()));
            }
        }
        let np = pairs.len();
        Ok(RabinGame { owner, offsets, edges, pairs, component: vec![0; n], pair_component: vec![0; np] })
    }

    /// Assigns components to vertices and pairs.
    pub fn with_components(mut self, component: Vec<u32>, pair_component: Vec<u32>) -> Result<Self, GameError> {
        if component.len() != self.num_vertices() || pair_component.len() != self.pairs.len() {
            return Err(GameError::Invalid("component vector has the wrong length".into()));
        }
        for v in 0..self.num_vertices() {
            for &w in self.successors(v) {
                if component[w as usize] < component[v] {
                    return Err(GameError::Invalid(format!("edge {v} -> {w} decreases the component")));
                }
            }
        }
        for (p, &c) in self.pairs.iter().zip(&pair_component) {
            if p.inf.ones().any(|v| component[v] != c) {
                return Err(GameError::Invalid("a pair's infinite set leaves its component".into()));
            }
        }
        self.component = component;
        self.pair_component = pair_component;
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.owner.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn successors(&self, v: usize) -> &[u32] {
        &self.edges[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn pairs(&self) -> &[GamePair] {
        &self.pairs
    }

    pub fn component(&self, v: usize) -> u32 {
        self.component[v]
    }

    /// Pair indices judging plays that settle in component `c`.
    pub fn pairs_of_component(&self, c: u32) -> Vec<u32> {
        (0..self.pairs.len() as u32).filter(|&p| self.pair_component[p as usize] == c).collect()
    }

    pub fn to_dot(&self, even_region: Option<&FixedBitSet>) -> String {
        let mut out = String::from("digraph game {\n");
        for v in 0..self.num_vertices() {
            let shape = match self.owner[v] {
                Player::Even => "box",
                Player::Odd => "ellipse",
            };
            let colour = match even_region {
                Some(r) if r[v] => ", style=filled, fillcolor=palegreen",
                Some(_) => ", style=filled, fillcolor=lightpink",
                None => "",
            };
            let _ = writeln!(out, "  v{v} [shape={shape}{colour}];");
            for &w in self.successors(v) {
                let _ = writeln!(out, "  v{v} -> v{w};");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Role of a membership-game vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    /// The automaton player picks an output and a transition function.
    Automaton { state: u32 },
    /// The pathfinder picks an input direction.
    Choice { state: u32, output: u32, function: u32 },
    /// Reached from states without transitions; lost by the automaton player.
    Sink,
}

/// Emptiness game of a tree automaton; winning positions of
/// [`Player::Even`] are states with a non-empty language.
#[derive(Clone, Debug)]
pub struct MembershipGame {
    pub game: RabinGame,
    pub kind: Vec<VertexKind>,
    state_vertex: Vec<u32>,
}

impl MembershipGame {
    pub fn state_vertex(&self, q: usize) -> usize {
        self.state_vertex[q] as usize
    }
}

pub fn membership_game(t: &RabinTreeAutomaton) -> MembershipGame {
    build_membership(t, None).expect("single-component membership game is valid")
}

/// Membership game where the vertices of tree state `q` live in component
/// `state_component[q]` and pair `p` belongs to `pair_component[p]`.
pub fn membership_game_with_components(
    t: &RabinTreeAutomaton,
    state_component: &[u32],
    pair_component: &[u32],
) -> Result<MembershipGame, GameError> {
    build_membership(t, Some((state_component, pair_component)))
}

fn build_membership(t: &RabinTreeAutomaton, comps: Option<(&[u32], &[u32])>) -> Result<MembershipGame, GameError> {
    let n = t.num_states();
    let no = t.alphabet().num_outputs();
    let mut owner = vec![Player::Even; n];
    let mut kind: Vec<VertexKind> = (0..n as u32).map(|state| VertexKind::Automaton { state }).collect();
    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut sink_needed = false;
    for q in 0..n {
        for o in 0..no {
            for (k, f) in t.functions(q, o).enumerate() {
                let v = owner.len() as u32;
                owner.push(Player::Odd);
                kind.push(VertexKind::Choice { state: q as u32, output: o as u32, function: k as u32 });
                succ.push(f.to_vec());
                succ[q].push(v);
            }
        }
        sink_needed |= succ[q].is_empty();
    }
    if sink_needed {
        let sink = owner.len() as u32;
        owner.push(Player::Even);
        kind.push(VertexKind::Sink);
        succ.push(vec![sink]);
        for s in succ.iter_mut().take(n) {
            if s.is_empty() {
                s.push(sink);
            }
        }
    }
    let total = owner.len();
    let pairs = t
        .pairs()
        .iter()
        .map(|p| {
            let mut fin = FixedBitSet::with_capacity(total);
            let mut inf = FixedBitSet::with_capacity(total);
            p.fin.ones().for_each(|q| fin.insert(q));
            p.inf.ones().for_each(|q| inf.insert(q));
            GamePair { fin, inf }
        })
        .collect();
    let mut game = RabinGame::new(owner, succ, pairs)?;
    if let Some((state_component, pair_component)) = comps {
        let top = state_component.iter().copied().max().unwrap_or(0);
        let component = kind
            .iter()
            .map(|k| match *k {
                VertexKind::Automaton { state } | VertexKind::Choice { state, .. } => state_component[state as usize],
                VertexKind::Sink => top,
            })
            .collect();
        game = game.with_components(component, pair_component.to_vec())?;
    }
    Ok(MembershipGame { game, kind, state_vertex: (0..n as u32).collect() })
}

/// Game deciding whether the machine's computation tree is accepted:
/// positions pair a machine state with a tree state and the output is
/// fixed by the machine. Returns the game and the root vertex.
pub(crate) fn machine_membership_game(t: &RabinTreeAutomaton, m: &MealyStrategy) -> (RabinGame, usize) {
    let ni = t.alphabet().num_inputs();
    let mut index: HashMap<(u32, u32), u32> = HashMap::new();
    let mut keys: Vec<(u32, u32)> = vec![(m.initial() as u32, t.initial() as u32)];
    index.insert(keys[0], 0);
    let mut choices: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut next = 0;
    while next < keys.len() {
        let (ms, q) = keys[next];
        next += 1;
        let o = m.output_of(ms as usize);
        let mut here = Vec::new();
        for f in t.functions(q as usize, o) {
            let targets = (0..ni)
                .map(|i| {
                    let key = (m.next_state(ms as usize, i) as u32, f[i]);
                    *index.entry(key).or_insert_with(|| {
                        keys.push(key);
                        keys.len() as u32 - 1
                    })
                })
                .collect();
            here.push(targets);
        }
        choices.push(here);
    }
    let positions = keys.len();
    let mut owner = vec![Player::Even; positions];
    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); positions];
    for (v, cs) in choices.into_iter().enumerate() {
        for targets in cs {
            succ[v].push(owner.len() as u32);
            owner.push(Player::Odd);
            succ.push(targets);
        }
    }
    if succ[..positions].iter().any(Vec::is_empty) {
        let sink = owner.len() as u32;
        owner.push(Player::Even);
        succ.push(vec![sink]);
        for s in succ.iter_mut().take(positions) {
            if s.is_empty() {
                s.push(sink);
            }
        }
    }
    let total = owner.len();
    let pairs = t
        .pairs()
        .iter()
        .map(|p| {
            let mut fin = FixedBitSet::with_capacity(total);
            let mut inf = FixedBitSet::with_capacity(total);
            for (v, &(_, q)) in keys.iter().enumerate() {
                fin.set(v, p.fin[q as usize]);
                inf.set(v, p.inf[q as usize]);
            }
            GamePair { fin, inf }
        })
        .collect();
    (RabinGame::new(owner, succ, pairs).expect("machine game is total"), 0)
}
