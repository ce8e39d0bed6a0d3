//! Cooperation levels: conjunct sets closed under implication rules, the
//! lattice they form, and preference orders over it.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use petgraph::algo::tred::{dag_to_toposorted_adjacency_list, dag_transitive_reduction_closure};
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("unknown level token `{0}`")]
    UnknownToken(String),
    #[error("conjunct {conjunct} is not available in the {ruleset} ruleset")]
    NotInRuleset { conjunct: String, ruleset: Ruleset },
    #[error("invalid preference order: {0}")]
    Preference(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BaseProp {
    A,
    G,
    Implies,
    And,
    Or,
}

impl BaseProp {
    pub const ALL: [BaseProp; 5] = [BaseProp::A, BaseProp::G, BaseProp::Implies, BaseProp::And, BaseProp::Or];

    pub fn symbol(self) -> &'static str {
        match self {
            BaseProp::A => "A",
            BaseProp::G => "G",
            BaseProp::Implies => "A->G",
            BaseProp::And => "A*G",
            BaseProp::Or => "A+G",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Modality {
    Plain,
    GloballyExists,
    Exists,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Conjunct {
    pub modality: Modality,
    pub base: BaseProp,
}

const fn plain(base: BaseProp) -> Conjunct {
    Conjunct { modality: Modality::Plain, base }
}
const fn ge(base: BaseProp) -> Conjunct {
    Conjunct { modality: Modality::GloballyExists, base }
}
const fn ex(base: BaseProp) -> Conjunct {
    Conjunct { modality: Modality::Exists, base }
}

impl Conjunct {
    pub const fn new(modality: Modality, base: BaseProp) -> Self {
        Conjunct { modality, base }
    }

    const fn bit(self) -> u16 {
        1 << (self.modality as u16 * 5 + self.base as u16)
    }

    fn from_bit(k: u32) -> Conjunct {
        let modality = match k / 5 {
            0 => Modality::Plain,
            1 => Modality::GloballyExists,
            _ => Modality::Exists,
        };
        Conjunct { modality, base: BaseProp::ALL[k as usize % 5] }
    }

    /// Position used when choosing among equally small generating sets.
    fn rank(self) -> u8 {
        const PLAIN: [u8; 5] = [0, 1, 3, u8::MAX, 2];
        match self.modality {
            Modality::Plain => PLAIN[self.base.index()],
            Modality::GloballyExists => 4 + [0, 1, 3, 4, 2][self.base.index()],
            Modality::Exists => 9 + [0, 1, 3, 4, 2][self.base.index()],
        }
    }
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.modality {
            Modality::Plain => f.write_str(self.base.symbol()),
            Modality::GloballyExists => write!(f, "GE({})", self.base.symbol()),
            Modality::Exists => write!(f, "E({})", self.base.symbol()),
        }
    }
}

/// Which conjunct alphabet and implication rules are in force.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub enum Ruleset {
    #[default]
    Base,
    OrExtended,
    FullE,
}

impl fmt::Display for Ruleset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ruleset::Base => "base",
            Ruleset::OrExtended => "or",
            Ruleset::FullE => "full-e",
        })
    }
}

impl FromStr for Ruleset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "base" => Ok(Ruleset::Base),
            "or" => Ok(Ruleset::OrExtended),
            "full-e" => Ok(Ruleset::FullE),
            _ => Err(format!("unknown ruleset `{s}` (expected base, or, full-e)")),
        }
    }
}

use BaseProp::{And, Implies, Or, A, G};

const BASE_ALPHABET: &[Conjunct] = &[plain(A), plain(G), plain(Implies), ge(A), ge(G), ge(Implies), ge(And)];
const OR_ALPHABET: &[Conjunct] = &[plain(Or), ge(Or)];
const E_ALPHABET: &[Conjunct] = &[ex(A), ex(G), ex(Implies), ex(And), ex(Or)];

type RuleRow = (&'static [Conjunct], Conjunct);

const BASE_RULES: &[RuleRow] = &[
    (&[plain(G)], plain(Implies)),
    (&[ge(And)], ge(A)),
    (&[ge(And)], ge(G)),
    (&[ge(G)], ge(Implies)),
    (&[plain(Implies), plain(A)], plain(G)),
    (&[plain(Implies), ge(A)], ge(And)),
    (&[plain(A), ge(G)], ge(And)),
    (&[ge(Implies), plain(A)], ge(G)),
    (&[plain(A)], ge(A)),
    (&[plain(G)], ge(G)),
    (&[plain(Implies)], ge(Implies)),
];

const OR_RULES: &[RuleRow] = &[
    (&[plain(G)], plain(Or)),
    (&[plain(A)], plain(Or)),
    (&[ge(G)], ge(Or)),
    (&[ge(A)], ge(Or)),
    (&[plain(Implies), plain(Or)], plain(G)),
    (&[plain(Implies), ge(Or)], ge(G)),
    (&[plain(Or)], ge(Or)),
];

const E_RULES: &[RuleRow] = &[
    (&[ge(A)], ex(A)),
    (&[ge(G)], ex(G)),
    (&[ge(Implies)], ex(Implies)),
    (&[ge(And)], ex(And)),
    (&[ge(Or)], ex(Or)),
    (&[ex(G)], ex(Implies)),
    (&[ex(And)], ex(A)),
    (&[ex(And)], ex(G)),
    (&[plain(Implies), ex(A)], ex(And)),
    (&[plain(A), ex(G)], ex(And)),
    (&[ex(Implies), plain(A)], ex(G)),
    (&[ex(G)], ex(Or)),
    (&[ex(A)], ex(Or)),
    (&[plain(Implies), ex(Or)], ex(G)),
];

/// An implication rule `premises ⊢ conclusion`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub premises: Vec<Conjunct>,
    pub conclusion: Conjunct,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.premises.iter().map(ToString::to_string).collect();
        write!(f, "{} |- {}", p.join(", "), self.conclusion)
    }
}

impl Ruleset {
    pub const ALL: [Ruleset; 3] = [Ruleset::Base, Ruleset::OrExtended, Ruleset::FullE];

    fn tables(self) -> (Vec<&'static [Conjunct]>, Vec<&'static [RuleRow]>) {
        match self {
            Ruleset::Base => (vec![BASE_ALPHABET], vec![BASE_RULES]),
            Ruleset::OrExtended => (vec![BASE_ALPHABET, OR_ALPHABET], vec![BASE_RULES, OR_RULES]),
            Ruleset::FullE => (vec![BASE_ALPHABET, OR_ALPHABET, E_ALPHABET], vec![BASE_RULES, OR_RULES, E_RULES]),
        }
    }

    /// Conjuncts a level of this ruleset may contain.
    pub fn alphabet(self) -> Vec<Conjunct> {
        self.tables().0.concat()
    }

    pub fn rules(self) -> Vec<Rule> {
        self.tables().1.concat().into_iter().map(|(p, c)| Rule { premises: p.to_vec(), conclusion: c }).collect()
    }

    /// Base properties whose automata a level of this ruleset may need.
    pub fn bases(self) -> &'static [BaseProp] {
        match self {
            Ruleset::Base => &[A, G, Implies, And],
            _ => &BaseProp::ALL,
        }
    }

    fn alphabet_mask(self) -> u16 {
        self.alphabet().iter().fold(0, |m, c| m | c.bit())
    }

    fn rule_masks(self) -> Vec<(u16, u16)> {
        self.tables().1.concat().into_iter().map(|(p, c)| (p.iter().fold(0, |m, c| m | c.bit()), c.bit())).collect()
    }
}

fn close_mask(mut m: u16, rules: &[(u16, u16)]) -> u16 {
    loop {
        let before = m;
        for &(p, c) in rules {
            if m & p == p {
                m |= c;
            }
        }
        if m == before {
            return m;
        }
    }
}

/// Least set containing `conjuncts` and closed under the ruleset's rules.
pub fn reduction_closure(conjuncts: impl IntoIterator<Item = Conjunct>, ruleset: Ruleset) -> Result<Vec<Conjunct>, LevelError> {
    Ok(LevelSpec::from_conjuncts(conjuncts, ruleset)?.conjuncts())
}

/// A cooperation level, stored as its closed conjunct set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LevelSpec {
    ruleset: Ruleset,
    mask: u16,
}

impl LevelSpec {
    pub fn from_conjuncts(conjuncts: impl IntoIterator<Item = Conjunct>, ruleset: Ruleset) -> Result<Self, LevelError> {
        let allowed = ruleset.alphabet_mask();
        let mut mask = 0;
        for c in conjuncts {
            if allowed & c.bit() == 0 {
                return Err(LevelError::NotInRuleset { conjunct: c.to_string(), ruleset });
            }
            mask |= c.bit();
        }
        Ok(LevelSpec { ruleset, mask: close_mask(mask, &ruleset.rule_masks()) })
    }

    /// The level satisfied by every tree.
    pub fn truth(ruleset: Ruleset) -> Self {
        LevelSpec { ruleset, mask: 0 }
    }

    /// Reads `A->G & GE(A*G)` style text. Whitespace is ignored; `true` or
    /// an empty string is the trivial level.
    pub fn parse(text: &str, ruleset: Ruleset) -> Result<Self, LevelError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "true" {
            return Ok(Self::truth(ruleset));
        }
        let mut conjuncts = Vec::new();
        for part in compact.split('&') {
            let (modality, atom) = if let Some(inner) = part.strip_prefix("GE(").and_then(|r| r.strip_suffix(')')) {
                (Modality::GloballyExists, inner)
            } else if let Some(inner) = part.strip_prefix("E(").and_then(|r| r.strip_suffix(')')) {
                (Modality::Exists, inner)
            } else {
                (Modality::Plain, part)
            };
            let base = BaseProp::ALL.into_iter().find(|b| b.symbol() == atom).ok_or_else(|| LevelError::UnknownToken(part.to_string()))?;
            if modality == Modality::Plain && base == And {
                conjuncts.extend([plain(A), plain(G)]);
            } else {
                conjuncts.push(Conjunct { modality, base });
            }
        }
        Self::from_conjuncts(conjuncts, ruleset)
    }

    pub fn ruleset(&self) -> Ruleset {
        self.ruleset
    }

    /// The closed conjunct set in canonical order.
    pub fn conjuncts(&self) -> Vec<Conjunct> {
        (0..15).filter(|k| self.mask & (1 << k) != 0).map(Conjunct::from_bit).collect()
    }

    pub fn contains(&self, c: Conjunct) -> bool {
        self.mask & c.bit() != 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_true(&self) -> bool {
        self.mask == 0
    }

    /// Whether this level implies `other` (closure superset).
    pub fn implies(&self, other: &LevelSpec) -> bool {
        self.mask & other.mask == other.mask
    }

    pub fn strictly_implies(&self, other: &LevelSpec) -> bool {
        self.mask != other.mask && self.implies(other)
    }

    /// True when the level enforces plain `A->G`.
    pub fn is_graylevel(&self) -> bool {
        self.contains(plain(Implies))
    }

    /// Smallest generating subset of the closure; ties go to the set whose
    /// sorted ranks are lexicographically smallest. Returned in display order.
    pub fn basis(&self) -> Vec<Conjunct> {
        let all = self.conjuncts();
        let rules = self.ruleset.rule_masks();
        let mut best: Option<(Vec<u8>, Vec<Conjunct>)> = None;
        for size in 0..=all.len() {
            for pick in combinations(all.len(), size) {
                let subset: Vec<Conjunct> = pick.iter().map(|&k| all[k]).collect();
                let m = subset.iter().fold(0, |m, c| m | c.bit());
                if close_mask(m, &rules) != self.mask {
                    continue;
                }
                let mut ranks: Vec<u8> = subset.iter().map(|c| c.rank()).collect();
                ranks.sort_unstable();
                if best.as_ref().is_none_or(|(r, _)| ranks < *r) {
                    best = Some((ranks, subset));
                }
            }
            if best.is_some() {
                break;
            }
        }
        let mut basis = best.map(|b| b.1).unwrap_or_default();
        basis.sort();
        basis
    }

    fn preference_key(&self) -> (bool, std::cmp::Reverse<usize>, Vec<u8>) {
        let mut ranks: Vec<u8> = self.conjuncts().iter().map(|c| c.rank()).collect();
        ranks.sort_unstable();
        (!self.is_graylevel(), std::cmp::Reverse(self.len()), ranks)
    }
}

impl fmt::Display for LevelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis = self.basis();
        if basis.is_empty() {
            return f.write_str("true");
        }
        let mut parts = Vec::new();
        let both = basis.contains(&plain(A)) && basis.contains(&plain(G));
        if both {
            parts.push("A*G".to_string());
        }
        for c in basis {
            if both && (c == plain(A) || c == plain(G)) {
                continue;
            }
            parts.push(c.to_string());
        }
        f.write_str(&parts.join(" & "))
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All distinct non-trivial levels of a ruleset, in preference order
/// (index 0 is the most preferred).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    ruleset: Ruleset,
    levels: Vec<LevelSpec>,
}

/// Number of distinct closed conjunct sets, including the trivial one.
pub fn count_with_true(ruleset: Ruleset) -> usize {
    distinct_masks(ruleset).len()
}

fn distinct_masks(ruleset: Ruleset) -> Vec<u16> {
    let alphabet: Vec<u16> = ruleset.alphabet().iter().map(|c| c.bit()).collect();
    let rules = ruleset.rule_masks();
    let mut seen = std::collections::BTreeSet::new();
    for subset in 0u32..(1 << alphabet.len()) {
        let m = alphabet.iter().enumerate().filter(|(k, _)| subset & (1 << k) != 0).fold(0, |m, (_, b)| m | b);
        seen.insert(close_mask(m, &rules));
    }
    seen.into_iter().collect()
}

impl Lattice {
    /// Enumerates every level with the default preference: levels enforcing
    /// `A->G` first, then larger closures, then a fixed conjunct order.
    pub fn enumerate(ruleset: Ruleset) -> Lattice {
        let mut levels: Vec<LevelSpec> =
            distinct_masks(ruleset).into_iter().filter(|&m| m != 0).map(|mask| LevelSpec { ruleset, mask }).collect();
        levels.sort_by_cached_key(|l| l.preference_key());
        Lattice { ruleset, levels }
    }

    /// Replaces the preference with an explicit order, which must list every
    /// level once and respect implication.
    pub fn with_preference(self, order: Vec<LevelSpec>) -> Result<Lattice, LevelError> {
        if order.len() != self.levels.len() {
            return Err(LevelError::Preference(format!("expected {} levels, got {}", self.levels.len(), order.len())));
        }
        for (k, l) in order.iter().enumerate() {
            if l.ruleset != self.ruleset || !self.levels.contains(l) {
                return Err(LevelError::Preference(format!("`{l}` is not a level of this lattice")));
            }
            if order[..k].contains(l) {
                return Err(LevelError::Preference(format!("`{l}` listed twice")));
            }
            if let Some(stricter) = order[k + 1..].iter().find(|m| m.strictly_implies(l)) {
                return Err(LevelError::Preference(format!("`{stricter}` implies `{l}` and must come first")));
            }
        }
        Ok(Lattice { ruleset: self.ruleset, levels: order })
    }

    /// Reads one level per line; blank lines and `#` comments are skipped.
    pub fn parse_preference(self, text: &str) -> Result<Lattice, LevelError> {
        let order = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| LevelSpec::parse(l, self.ruleset))
            .collect::<Result<Vec<_>, _>>()?;
        self.with_preference(order)
    }

    pub fn ruleset(&self) -> Ruleset {
        self.ruleset
    }

    pub fn levels(&self) -> &[LevelSpec] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, k: usize) -> &LevelSpec {
        &self.levels[k]
    }

    pub fn index_of(&self, l: &LevelSpec) -> Option<usize> {
        self.levels.iter().position(|m| m == l)
    }

    /// Whether level `i` implies level `j` (`H_j ≤_H H_i`).
    pub fn at_least(&self, i: usize, j: usize) -> bool {
        self.levels[i].implies(&self.levels[j])
    }

    /// Compares by implication; `None` for incomparable levels.
    pub fn compare(&self, i: usize, j: usize) -> Option<Ordering> {
        match (self.at_least(i, j), self.at_least(j, i)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Greater),
            (false, true) => Some(Ordering::Less),
            (false, false) => None,
        }
    }

    /// Covering pairs `(stricter, weaker)` sorted by preference index.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.levels.len();
        let mut g: DiGraph<(), (), u32> = DiGraph::with_capacity(n, 0);
        for _ in 0..n {
            g.add_node(());
        }
        for i in 0..n {
            for j in 0..n {
                if self.levels[i].strictly_implies(&self.levels[j]) {
                    g.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
                }
            }
        }
        // preference order is a linear extension, so identity is a topological order
        let topo: Vec<NodeIndex<u32>> = (0..n).map(NodeIndex::new).collect();
        let (adj, revmap) = dag_to_toposorted_adjacency_list::<_, u32>(&g, &topo);
        let (reduction, _) = dag_transitive_reduction_closure(&adj);
        let mut edges: Vec<(usize, usize)> = reduction
            .edge_indices()
            .map(|e| {
                let (a, b) = reduction.edge_endpoints(e).unwrap();
                let back = |x: u32| revmap.iter().position(|&r| r == x).unwrap();
                (back(a), back(b))
            })
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hierarchy {\n  rankdir=TB;\n  node [shape=box];\n");
        for (k, l) in self.levels.iter().enumerate() {
            let fill = if l.is_graylevel() { ", style=filled, fillcolor=gray80" } else { "" };
            out.push_str(&format!("  n{k} [label=\"{l}\"{fill}];\n"));
        }
        for (a, b) in self.hasse_edges() {
            out.push_str(&format!("  n{a} -> n{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(s: &str) -> LevelSpec {
        LevelSpec::parse(s, Ruleset::Base).unwrap()
    }

    /// Independent fixpoint: apply the printed rule list until stable.
    fn naive_closure(start: &[Conjunct], ruleset: Ruleset) -> Vec<Conjunct> {
        let mut set: Vec<Conjunct> = start.to_vec();
        loop {
            let mut grew = false;
            for r in ruleset.rules() {
                if r.premises.iter().all(|p| set.contains(p)) && !set.contains(&r.conclusion) {
                    set.push(r.conclusion);
                    grew = true;
                }
            }
            if !grew {
                set.sort();
                return set;
            }
        }
    }

    #[test]
    fn closure_examples() {
        let mut expect = vec![plain(G), plain(Implies), ge(G), ge(Implies)];
        expect.sort();
        assert_eq!(reduction_closure([plain(G)], Ruleset::Base).unwrap(), expect);
        assert_eq!(naive_closure(&[plain(G)], Ruleset::Base), expect);
        let ag = reduction_closure([plain(Implies), plain(A)], Ruleset::Base).unwrap();
        assert!(ag.contains(&plain(G)));
        assert_eq!(ag, reduction_closure([plain(A), plain(G)], Ruleset::Base).unwrap());
        assert!(reduction_closure([], Ruleset::Base).unwrap().is_empty());
        assert!(matches!(reduction_closure([ex(A)], Ruleset::Base), Err(LevelError::NotInRuleset { .. })));
    }

    #[test]
    fn closure_agrees_with_naive_fixpoint() {
        for rs in Ruleset::ALL {
            let alpha = rs.alphabet();
            for subset in 0u32..(1 << alpha.len()) {
                let pick: Vec<Conjunct> = (0..alpha.len()).filter(|k| subset & (1 << k) != 0).map(|k| alpha[k]).collect();
                assert_eq!(reduction_closure(pick.clone(), rs).unwrap(), naive_closure(&pick, rs));
            }
        }
    }

    #[test]
    fn closure_is_a_closure_operator() {
        let alpha = Ruleset::Base.alphabet();
        let close = |m: u32| {
            let pick = (0..alpha.len()).filter(|k| m & (1 << k) != 0).map(|k| alpha[k]);
            LevelSpec::from_conjuncts(pick, Ruleset::Base).unwrap()
        };
        for x in 0u32..128 {
            let cx = close(x);
            let again = LevelSpec::from_conjuncts(cx.conjuncts(), Ruleset::Base).unwrap();
            assert_eq!(cx, again, "idempotent");
            for (k, c) in alpha.iter().enumerate() {
                if x & (1 << k) != 0 {
                    assert!(cx.contains(*c), "extensive");
                }
            }
            for y in 0u32..128 {
                if x & y == x {
                    assert!(close(y).implies(&cx), "monotone");
                }
            }
        }
    }

    #[test]
    fn level_counts() {
        assert_eq!(count_with_true(Ruleset::Base), 15);
        assert_eq!(Lattice::enumerate(Ruleset::Base).len(), 14);
        assert_eq!(Lattice::enumerate(Ruleset::OrExtended).len(), 23);
        assert_eq!(Lattice::enumerate(Ruleset::FullE).len(), 77);
    }

    #[test]
    fn parse_and_render() {
        assert_eq!(lv("A*G").to_string(), "A*G");
        assert_eq!(lv(" A -> G & A ").to_string(), "A*G");
        assert_eq!(lv("G&GE(A)").to_string(), "G & GE(A)");
        assert_eq!(lv("GE(A) & GE(G) & GE(A->G)").to_string(), "GE(A) & GE(G)");
        assert_eq!(lv("true").to_string(), "true");
        assert_eq!(lv(""), LevelSpec::truth(Ruleset::Base));
        assert_eq!(LevelSpec::parse("GE(X)", Ruleset::Base), Err(LevelError::UnknownToken("GE(X)".into())));
        assert!(LevelSpec::parse("A+G", Ruleset::Base).is_err());
        assert!(LevelSpec::parse("E(A)", Ruleset::FullE).is_ok());
        for rs in Ruleset::ALL {
            for l in Lattice::enumerate(rs).levels() {
                assert_eq!(LevelSpec::parse(&l.to_string(), rs).unwrap(), *l, "{l}");
            }
        }
    }

    #[test]
    fn gray_levels() {
        assert!(lv("G").is_graylevel());
        assert!(!lv("GE(A->G)").is_graylevel());
        let lat = Lattice::enumerate(Ruleset::Base);
        assert_eq!(lat.levels().iter().filter(|l| l.is_graylevel()).count(), 6);
    }

    #[test]
    fn hasse_matches_brute_force_cover() {
        for rs in Ruleset::ALL {
            let lat = Lattice::enumerate(rs);
            let n = lat.len();
            let mut brute = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    let between =
                        (0..n).any(|z| lat.level(x).strictly_implies(lat.level(z)) && lat.level(z).strictly_implies(lat.level(y)));
                    if lat.level(x).strictly_implies(lat.level(y)) && !between {
                        brute.push((x, y));
                    }
                }
            }
            assert_eq!(lat.hasse_edges(), brute);
        }
        let base = Lattice::enumerate(Ruleset::Base);
        assert_eq!(base.hasse_edges().len(), 19);
        let idx = |s: &str| base.index_of(&lv(s)).unwrap();
        let edges = base.hasse_edges();
        assert!(edges.contains(&(idx("A*G"), idx("G & GE(A)"))));
        assert!(edges.contains(&(idx("A*G"), idx("A & GE(G)"))));
    }

    #[test]
    fn preference_is_linear_extension() {
        for rs in Ruleset::ALL {
            let lat = Lattice::enumerate(rs);
            for i in 0..lat.len() {
                for j in 0..lat.len() {
                    if lat.level(i).strictly_implies(lat.level(j)) {
                        assert!(i < j);
                    }
                }
            }
        }
        assert_eq!(Lattice::enumerate(Ruleset::Base).level(0).to_string(), "A*G");
    }

    #[test]
    fn preference_override_validation() {
        let lat = Lattice::enumerate(Ruleset::Base);
        let mut order: Vec<LevelSpec> = lat.levels().to_vec();
        order.reverse();
        assert!(lat.clone().with_preference(order).is_err());
        let mut order: Vec<LevelSpec> = lat.levels().to_vec();
        let k = (0..order.len() - 1).find(|&k| lat.compare(k, k + 1).is_none()).expect("some adjacent levels are incomparable");
        order.swap(k, k + 1);
        let text: String = order.iter().map(|l| format!("{l}\n")).collect();
        let custom = lat.clone().parse_preference(&text).unwrap();
        assert_eq!(custom.index_of(lat.level(k)), Some(k + 1));
        assert!(lat.clone().parse_preference("A*G\n").is_err());
    }
}
