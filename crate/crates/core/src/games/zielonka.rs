use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use super::parity::ParityGame;
use super::Player;

pub(super) const NO_MOVE: u32 = u32::MAX;

/// Attractor of `target` for `player` inside `sub`. Moves of `player` into
/// the attractor are written to `strategy`.
fn attractor(g: &ParityGame, sub: &FixedBitSet, target: &FixedBitSet, player: Player, strategy: &mut [u32]) -> FixedBitSet {
    let mut attr = target.clone();
    let mut remaining = vec![0u32; g.num_vertices()];
    let mut queue: VecDeque<usize> = target.ones().collect();
    while let Some(w) = queue.pop_front() {
        for &u in g.predecessors(w) {
            let u = u as usize;
            if !sub[u] || attr[u] {
                continue;
            }
            if g.owner(u) == player {
                strategy[u] = w as u32;
            } else {
                if remaining[u] == 0 {
                    remaining[u] = g.successors(u).iter().filter(|&&x| sub[x as usize]).count() as u32;
                }
                remaining[u] -= 1;
                if remaining[u] > 0 {
                    continue;
                }
            }
            attr.insert(u);
            queue.push_back(u);
        }
    }
    attr
}

fn index(p: Player) -> usize {
    match p {
        Player::Even => 0,
        Player::Odd => 1,
    }
}

/// Winning regions of `sub`, indexed by [`index`].
fn solve(g: &ParityGame, sub: FixedBitSet, strategy: &mut [u32]) -> [FixedBitSet; 2] {
    let n = g.num_vertices();
    let mut won = [FixedBitSet::with_capacity(n), FixedBitSet::with_capacity(n)];
    let mut sub = sub;
    loop {
        let Some(top) = sub.ones().map(|v| g.priority(v)).max() else {
            return won;
        };
        let alpha = if top % 2 == 0 { Player::Even } else { Player::Odd };
        let opp = alpha.opponent();
        let mut u = FixedBitSet::with_capacity(n);
        sub.ones().filter(|&v| g.priority(v) == top).for_each(|v| u.insert(v));
        let a = attractor(g, &sub, &u, alpha, strategy);
        let mut rest = sub.clone();
        rest.difference_with(&a);
        let inner = solve(g, rest, strategy);
        let lost = &inner[index(opp)];
        if lost.is_clear() {
            for v in u.ones().filter(|&v| g.owner(v) == alpha) {
                strategy[v] = *g.successors(v).iter().find(|&&w| sub[w as usize]).expect("subgames are traps");
            }
            won[index(alpha)].union_with(&sub);
            return won;
        }
        let b = attractor(g, &sub, lost, opp, strategy);
        won[index(opp)].union_with(&b);
        sub.difference_with(&b);
    }
}

/// Winning regions of both players and a positional strategy for each
/// vertex owned by the player winning it; other entries are [`NO_MOVE`].
pub(super) fn zielonka(g: &ParityGame) -> (FixedBitSet, FixedBitSet, Vec<u32>) {
    let n = g.num_vertices();
    let mut strategy = vec![NO_MOVE; n];
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    let [even, odd] = solve(g, all, &mut strategy);
    for (v, s) in strategy.iter_mut().enumerate() {
        let winner = if even[v] { Player::Even } else { Player::Odd };
        if g.owner(v) != winner {
            *s = NO_MOVE;
        }
    }
    (even, odd, strategy)
}
