use std::collections::{HashMap, VecDeque};

use super::rabin::RabinGame;
use super::{GameError, Player};

/// Max-parity game: [`Player::Even`] wins a play when the largest priority
/// seen infinitely often is even.
#[derive(Clone, Debug)]
pub struct ParityGame {
    owner: Vec<Player>,
    priority: Vec<u32>,
    offsets: Vec<u32>,
    edges: Vec<u32>,
    pred_offsets: Vec<u32>,
    preds: Vec<u32>,
    base: Vec<u32>,
    record: Vec<u32>,
    records: Vec<Vec<u32>>,
    entry: Vec<u32>,
}

impl ParityGame {
    pub fn new(owner: Vec<Player>, priority: Vec<u32>, succ: Vec<Vec<u32>>) -> Result<Self, GameError> {
        let n = owner.len();
        if priority.len() != n || succ.len() != n {
            return Err(GameError::Invalid("vertex vectors differ in length".into()));
        }
        for (v, out) in succ.iter().enumerate() {
            if out.is_empty() {
                return Err(GameError::Invalid(format!("vertex {v} has no successor")));
            }
            if out.iter().any(|&w| w as usize >= n) {
                return Err(GameError::Invalid(format!("vertex {v} has an edge leaving the game")));
            }
        }
        let base = (0..n as u32).collect();
        Ok(Self::assemble(owner, priority, succ, base, vec![0; n], vec![vec![]], (0..n as u32).collect()))
    }

    fn assemble(
        owner: Vec<Player>,
        priority: Vec<u32>,
        succ: Vec<Vec<u32>>,
        base: Vec<u32>,
        record: Vec<u32>,
        records: Vec<Vec<u32>>,
        entry: Vec<u32>,
    ) -> Self {
        let n = owner.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut edges = Vec::new();
        offsets.push(0);
        let mut indeg = vec![0u32; n];
        for out in &succ {
            edges.extend_from_slice(out);
            offsets.push(edges.len() as u32);
            for &w in out {
                indeg[w as usize] += 1;
            }
        }
        let mut pred_offsets = Vec::with_capacity(n + 1);
        pred_offsets.push(0);
        for d in &indeg {
            pred_offsets.push(pred_offsets.last().unwrap() + d);
        }
        let mut fill = pred_offsets.clone();
        let mut preds = vec![0; edges.len()];
        for (v, out) in succ.iter().enumerate() {
            for &w in out {
                preds[fill[w as usize] as usize] = v as u32;
                fill[w as usize] += 1;
            }
        }
        ParityGame { owner, priority, offsets, edges, pred_offsets, preds, base, record, records, entry }
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

    pub fn priority(&self, v: usize) -> u32 {
        self.priority[v]
    }

    pub fn successors(&self, v: usize) -> &[u32] {
        &self.edges[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn predecessors(&self, v: usize) -> &[u32] {
        &self.preds[self.pred_offsets[v] as usize..self.pred_offsets[v + 1] as usize]
    }

    /// Rabin-game vertex this vertex was built from.
    pub fn base_vertex(&self, v: usize) -> usize {
        self.base[v] as usize
    }

    /// Index appearance record carried by this vertex: a permutation of the
    /// pair indices of its component, most recently finitely-visited first.
    pub fn memory_tag(&self, v: usize) -> &[u32] {
        &self.records[self.record[v] as usize]
    }

    /// Number of distinct records in use.
    pub fn num_records(&self) -> usize {
        self.records.len()
    }

    /// The vertex for Rabin vertex `v` with its component's initial record.
    pub fn entry_vertex(&self, v: usize) -> usize {
        self.entry[v] as usize
    }
}

#[derive(Default)]
struct Records {
    ids: HashMap<Vec<u32>, u32>,
    list: Vec<Vec<u32>>,
}

impl Records {
    fn intern(&mut self, r: Vec<u32>) -> u32 {
        if let Some(&id) = self.ids.get(&r) {
            return id;
        }
        self.list.push(r.clone());
        self.ids.insert(r, self.list.len() as u32 - 1);
        self.list.len() as u32 - 1
    }
}

/// Priority of visiting `v` with record `rec`, and the updated record.
fn step(g: &RabinGame, rec: &[u32], v: usize) -> (u32, Vec<u32>) {
    let hit = |p: u32| g.pairs()[p as usize].fin[v];
    let b = rec.iter().rposition(|&p| hit(p));
    let mut next: Vec<u32> = rec.iter().copied().filter(|&p| hit(p)).collect();
    next.extend(rec.iter().copied().filter(|&p| !hit(p)));
    let gpos = next.iter().rposition(|&p| g.pairs()[p as usize].inf[v]);
    let priority = match (gpos, b) {
        (Some(gp), None) => 2 * gp as u32 + 2,
        (Some(gp), Some(b)) if gp > b => 2 * gp as u32 + 2,
        (_, Some(b)) => 2 * b as u32 + 3,
        (None, None) => 1,
    };
    (priority, next)
}

/// Index-appearance-record product. A vertex `(v, r)` gets the priority of
/// visiting `v` with record `r`; its successors carry the updated record,
/// or the initial record of their component when the component changes.
///
/// Highest even priority `2g+2` means pair `r[g]` saw its infinite set while
/// every finite-set hit of the step sat at a lower position; odd `2b+3`
/// means a finite set at position `b` was hit.
pub fn iar_to_parity(g: &RabinGame) -> ParityGame {
    let n = g.num_vertices();
    let mut records = Records::default();
    let mut initial_record: HashMap<u32, u32> = HashMap::new();
    for v in 0..n {
        let c = g.component(v);
        initial_record.entry(c).or_insert_with(|| records.intern(g.pairs_of_component(c)));
    }
    let init_of = |c: u32| initial_record[&c];
    let mut index: HashMap<(u32, u32), u32> = HashMap::new();
    let mut keys: Vec<(u32, u32)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut entry = vec![0u32; n];
    for (v, e) in entry.iter_mut().enumerate() {
        let r = init_of(g.component(v));
        let id = keys.len() as u32;
        index.insert((v as u32, r), id);
        keys.push((v as u32, r));
        queue.push_back(id);
        *e = id;
    }
    // record updates only depend on (vertex, record); cache them
    let mut cache: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    let mut priority = Vec::new();
    let mut succ: Vec<Vec<u32>> = Vec::new();
    while let Some(id) = queue.pop_front() {
        let (v, r) = keys[id as usize];
        let (p, next) = match cache.get(&(v, r)) {
            Some(&x) => x,
            None => {
                let (p, rec) = step(g, &records.list[r as usize], v as usize);
                let x = (p, records.intern(rec));
                cache.insert((v, r), x);
                x
            }
        };
        let mut out = Vec::with_capacity(g.successors(v as usize).len());
        for &w in g.successors(v as usize) {
            let rw = if g.component(w as usize) == g.component(v as usize) { next } else { init_of(g.component(w as usize)) };
            let key = (w, rw);
            let wid = match index.get(&key) {
                Some(&x) => x,
                None => {
                    let x = keys.len() as u32;
                    index.insert(key, x);
                    keys.push(key);
                    queue.push_back(x);
                    x
                }
            };
            out.push(wid);
        }
        let slot = id as usize;
        if priority.len() <= slot {
            priority.resize(slot + 1, 0);
            succ.resize(slot + 1, Vec::new());
        }
        priority[slot] = p;
        succ[slot] = out;
    }
    let owner = keys.iter().map(|&(v, _)| g.owner(v as usize)).collect();
    let base = keys.iter().map(|&(v, _)| v).collect();
    let record = keys.iter().map(|&(_, r)| r).collect();
    ParityGame::assemble(owner, priority, succ, base, record, records.list, entry)
}

#[cfg(test)]
mod tests {
    use fixedbitset::FixedBitSet;

    use super::*;
    use crate::games::rabin::GamePair;

    fn set(n: usize, members: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        members.iter().for_each(|&m| b.insert(m));
        b
    }

    #[test]
    fn single_pair_priorities() {
        // 0: in F, 1: in G, 2: neither
        let g =
            RabinGame::new(vec![Player::Even; 3], vec![vec![1], vec![2], vec![0]], vec![GamePair { fin: set(3, &[0]), inf: set(3, &[1]) }])
                .unwrap();
        let p = iar_to_parity(&g);
        assert_eq!(p.num_records(), 1);
        assert_eq!(p.num_vertices(), 3);
        let prio: Vec<u32> = (0..3).map(|v| p.priority(p.entry_vertex(v))).collect();
        assert_eq!(prio, [3, 2, 1]);
    }

    #[test]
    fn record_count_bound() {
        let n = 4;
        let g = RabinGame::new(
            vec![Player::Odd; n],
            vec![vec![1, 2, 3], vec![0, 2], vec![3, 0], vec![1]],
            vec![
                GamePair { fin: set(n, &[0]), inf: set(n, &[1]) },
                GamePair { fin: set(n, &[1]), inf: set(n, &[2]) },
                GamePair { fin: set(n, &[2]), inf: set(n, &[3, 0]) },
            ],
        )
        .unwrap();
        let p = iar_to_parity(&g);
        assert!(p.num_records() <= 6);
        assert!(p.num_vertices() <= n * 6);
        for v in 0..p.num_vertices() {
            let mut tag = p.memory_tag(v).to_vec();
            tag.sort();
            assert_eq!(tag, [0, 1, 2]);
        }
    }
}
