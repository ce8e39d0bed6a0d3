//! Rabin and parity games, used to decide tree-automaton emptiness and to
//! extract finite-state implementations.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::mealy::MealyStrategy;
use crate::tree::RabinTreeAutomaton;

pub mod parity;
pub mod rabin;
mod zielonka;

use parity::{iar_to_parity, ParityGame};
use rabin::{machine_membership_game, membership_game, membership_game_with_components, MembershipGame, VertexKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    /// Wins the Rabin or parity condition; the automaton player.
    Even,
    /// The pathfinder.
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error("no implementation exists from the initial state")]
    Unrealizable,
    #[error("invalid game: {0}")]
    Invalid(String),
}

/// Solution of a parity game.
#[derive(Clone, Debug)]
pub struct WinningCertificate {
    pub region_even: FixedBitSet,
    pub region_odd: FixedBitSet,
    /// Move of each vertex owned by the player that wins it, else `u32::MAX`.
    pub strategy: Vec<u32>,
}

impl WinningCertificate {
    pub fn winner(&self, v: usize) -> Player {
        if self.region_even[v] {
            Player::Even
        } else {
            Player::Odd
        }
    }

    pub fn move_of(&self, v: usize) -> Option<usize> {
        (self.strategy[v] != zielonka::NO_MOVE).then_some(self.strategy[v] as usize)
    }
}

pub fn solve_parity(g: &ParityGame) -> WinningCertificate {
    let (region_even, region_odd, strategy) = zielonka::zielonka(g);
    WinningCertificate { region_even, region_odd, strategy }
}

/// Winning region of [`Player::Even`] in a Rabin game.
pub fn solve_rabin(g: &rabin::RabinGame) -> FixedBitSet {
    let p = iar_to_parity(g);
    let cert = solve_parity(&p);
    let mut out = FixedBitSet::with_capacity(g.num_vertices());
    for v in 0..g.num_vertices() {
        out.set(v, cert.region_even[p.entry_vertex(v)]);
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GameStats {
    pub rabin_vertices: usize,
    pub rabin_edges: usize,
    pub pairs: usize,
    pub parity_vertices: usize,
    pub parity_edges: usize,
    pub max_priority: u32,
    pub records: usize,
}

#[derive(Clone, Debug)]
pub struct SolvedMembership {
    pub membership: MembershipGame,
    pub parity: ParityGame,
    pub certificate: WinningCertificate,
}

impl SolvedMembership {
    fn new(membership: MembershipGame) -> Self {
        let parity = iar_to_parity(&membership.game);
        let certificate = solve_parity(&parity);
        SolvedMembership { membership, parity, certificate }
    }

    /// Whether tree state `q` has a non-empty language.
    pub fn is_nonempty(&self, q: usize) -> bool {
        self.certificate.region_even[self.parity.entry_vertex(self.membership.state_vertex(q))]
    }

    pub fn stats(&self) -> GameStats {
        let g = &self.membership.game;
        let p = &self.parity;
        GameStats {
            rabin_vertices: g.num_vertices(),
            rabin_edges: g.num_edges(),
            pairs: g.pairs().len(),
            parity_vertices: p.num_vertices(),
            parity_edges: p.num_edges(),
            max_priority: (0..p.num_vertices()).map(|v| p.priority(v)).max().unwrap_or(0),
            records: p.num_records(),
        }
    }
}

pub fn solve_membership(t: &RabinTreeAutomaton) -> SolvedMembership {
    SolvedMembership::new(membership_game(t))
}

pub fn solve_membership_with_components(
    t: &RabinTreeAutomaton,
    state_component: &[u32],
    pair_component: &[u32],
) -> Result<SolvedMembership, GameError> {
    Ok(SolvedMembership::new(membership_game_with_components(t, state_component, pair_component)?))
}

/// Tree states with a non-empty language.
pub fn nonempty_states(t: &RabinTreeAutomaton) -> FixedBitSet {
    let solved = solve_membership(t);
    let mut out = FixedBitSet::with_capacity(t.num_states());
    (0..t.num_states()).filter(|&q| solved.is_nonempty(q)).for_each(|q| out.insert(q));
    out
}

/// A machine read off a winning strategy, with the tree state each machine
/// state stands for.
#[derive(Clone, Debug)]
pub struct ExtractedStrategy {
    pub machine: MealyStrategy,
    pub tree_state: Vec<u32>,
}

/// Reads a Mealy machine off the automaton player's strategy, starting at
/// the initial state. Machine states are parity vertices in breadth-first
/// order.
pub fn extract_strategy(t: &RabinTreeAutomaton, solved: &SolvedMembership) -> Result<ExtractedStrategy, GameError> {
    let p = &solved.parity;
    let cert = &solved.certificate;
    let start = p.entry_vertex(solved.membership.state_vertex(t.initial()));
    if !cert.region_even[start] {
        return Err(GameError::Unrealizable);
    }
    let ni = t.alphabet().num_inputs();
    let mut index: HashMap<usize, usize> = HashMap::from([(start, 0)]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    let mut output = Vec::new();
    let mut next = Vec::new();
    let mut tree_state = Vec::new();
    while let Some(x) = queue.pop_front() {
        let VertexKind::Automaton { state } = solved.membership.kind[p.base_vertex(x)] else {
            return Err(GameError::Invalid("strategy left the automaton vertices".into()));
        };
        let y = cert.move_of(x).ok_or_else(|| GameError::Invalid(format!("no move at vertex {x}")))?;
        let VertexKind::Choice { output: o, .. } = solved.membership.kind[p.base_vertex(y)] else {
            return Err(GameError::Invalid("strategy moved to the sink".into()));
        };
        tree_state.push(state);
        output.push(o as usize);
        let targets = p.successors(y);
        debug_assert_eq!(targets.len(), ni);
        for &z in targets {
            let z = z as usize;
            let id = *index.entry(z).or_insert_with(|| {
                order.push(z);
                queue.push_back(z);
                order.len() - 1
            });
            next.push(id);
        }
    }
    let states = (0..order.len()).map(|k| format!("m{k}")).collect();
    let machine =
        MealyStrategy::new("strategy", t.alphabet().clone(), states, 0, output, next).map_err(|e| GameError::Invalid(e.to_string()))?;
    Ok(ExtractedStrategy { machine, tree_state })
}

/// Whether the computation tree of `m` is accepted from the initial state.
pub fn accepts_machine(t: &RabinTreeAutomaton, m: &MealyStrategy) -> Result<bool, GameError> {
    if m.alphabet() != t.alphabet() {
        return Err(GameError::Invalid("machine and automaton use different alphabets".into()));
    }
    let (g, root) = machine_membership_game(t, m);
    Ok(solve_rabin(&g)[root])
}
