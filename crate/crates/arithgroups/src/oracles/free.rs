//! Finitely generated subgroups of free groups via folded (Stallings)
//! automata: membership, conjugation, intersection, and canonical-form
//! equality.

use crate::word::Word;
use std::collections::{BTreeMap, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("word uses generators beyond rank {0}")]
    RankExceeded(usize),
}

/// Label of a directed edge: generator index 1..=rank, negative for
/// inverse letters.
type Label = i8;

/// Deterministic folded automaton over the free-group alphabet with
/// inverse-edge symmetry: an edge `u --x--> v` always coexists with
/// `v --x^-1--> u`. Accepts exactly the reduced words of the subgroup
/// it was folded from, read as closed walks at the base state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldedAutomaton {
    rank: usize,
    base: usize,
    /// edges[state][slot(label)] = target
    edges: Vec<BTreeMap<Label, usize>>,
}

impl FoldedAutomaton {
    /// Build from generator loops and fold to determinism, then trim
    /// hanging trees (states a reduced closed walk can never use).
    pub fn build(rank: usize, generators: &[Word]) -> Result<Self, FreeError> {
        for g in generators {
            if g.max_generator() > rank {
                return Err(FreeError::RankExceeded(rank));
            }
        }
        // bouquet of loops at the base
        let mut edges: Vec<Vec<(Label, usize)>> = vec![Vec::new()];
        for g in generators {
            if g.is_empty() {
                continue;
            }
            let letters = g.letters();
            let mut cur = 0usize;
            for (idx, &l) in letters.iter().enumerate() {
                let next = if idx + 1 == letters.len() {
                    0
                } else {
                    edges.push(Vec::new());
                    edges.len() - 1
                };
                edges[cur].push((l, next));
                edges[next].push((-l, cur));
                cur = next;
            }
        }
        let folded = fold(edges, 0);
        Ok(trim(folded, rank))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    /// Walk a reduced word from the base; `Some(path)` iff every edge
    /// exists and the walk closes up at the base. The path (sequence of
    /// visited states, starting and ending at base) is the membership
    /// certificate.
    pub fn accept_path(&self, w: &Word) -> Option<Vec<usize>> {
        let mut cur = self.base;
        let mut path = vec![cur];
        for &l in w.letters() {
            match self.edges[cur].get(&l) {
                Some(&next) => {
                    cur = next;
                    path.push(cur);
                }
                None => return None,
            }
        }
        if cur == self.base {
            Some(path)
        } else {
            None
        }
    }

    pub fn accepts(&self, w: &Word) -> bool {
        self.accept_path(w).is_some()
    }

    /// Replay a certificate path against the automaton.
    pub fn verify_path(&self, w: &Word, path: &[usize]) -> bool {
        if path.len() != w.len() + 1 || path[0] != self.base || *path.last().unwrap() != self.base {
            return false;
        }
        w.letters()
            .iter()
            .zip(path.windows(2))
            .all(|(&l, pair)| self.edges[pair[0]].get(&l) == Some(&pair[1]))
    }

    /// Canonical form: BFS relabeling from the base with edges explored
    /// in fixed label order. Two folded core automata are equal as
    /// subgroups iff their canonical tables agree.
    pub fn canonical_table(&self) -> Vec<Vec<Option<usize>>> {
        let labels = label_order(self.rank);
        let mut order: HashMap<usize, usize> = HashMap::new();
        order.insert(self.base, 0);
        let mut queue = VecDeque::from([self.base]);
        let mut bfs = vec![self.base];
        while let Some(s) = queue.pop_front() {
            for &l in &labels {
                if let Some(&t) = self.edges[s].get(&l) {
                    if !order.contains_key(&t) {
                        order.insert(t, bfs.len());
                        bfs.push(t);
                        queue.push_back(t);
                    }
                }
            }
        }
        bfs.iter()
            .map(|&s| {
                labels
                    .iter()
                    .map(|l| self.edges[s].get(l).map(|t| order[t]))
                    .collect()
            })
            .collect()
    }

    /// All accepted nontrivial reduced words of length at most `len`,
    /// sorted; a finite ball of the subgroup.
    pub fn accepted_ball(&self, len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut stack: Vec<(usize, Vec<Label>)> = vec![(self.base, Vec::new())];
        while let Some((state, prefix)) = stack.pop() {
            if prefix.len() >= len {
                continue;
            }
            for (&l, &t) in &self.edges[state] {
                if prefix.last().is_some_and(|&last| last == -l) {
                    continue; // only reduced words
                }
                let mut next = prefix.clone();
                next.push(l);
                if t == self.base {
                    out.push(Word::from_letters(next.clone()));
                }
                stack.push((t, next));
            }
        }
        out.sort_by_key(|w| (w.len(), w.to_string()));
        out.dedup();
        out
    }
}

fn label_order(rank: usize) -> Vec<Label> {
    let mut labels = Vec::with_capacity(2 * rank);
    for l in 1..=rank as Label {
        labels.push(l);
        labels.push(-l);
    }
    labels
}

/// Stallings folding with union-find: merge targets of same-labeled
/// edges until deterministic. The result is independent of merge order
/// up to isomorphism.
fn fold(raw: Vec<Vec<(Label, usize)>>, base: usize) -> (Vec<BTreeMap<Label, usize>>, usize) {
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }

    loop {
        // rebuild adjacency over representatives
        let mut adj: Vec<BTreeMap<Label, Vec<usize>>> = vec![BTreeMap::new(); n];
        for (s, out) in raw.iter().enumerate() {
            let rs = find(&mut parent, s);
            for &(l, t) in out {
                let rt = find(&mut parent, t);
                let targets = adj[rs].entry(l).or_default();
                if !targets.contains(&rt) {
                    targets.push(rt);
                }
            }
        }
        // find one conflict
        let mut merged = false;
        'outer: for s in 0..n {
            if find(&mut parent, s) != s {
                continue;
            }
            for targets in adj[s].values() {
                if targets.len() > 1 {
                    let a = find(&mut parent, targets[0]);
                    let b = find(&mut parent, targets[1]);
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                        merged = true;
                        break 'outer;
                    }
                }
            }
        }
        if !merged {
            // deterministic now: compact
            let mut ids: Vec<usize> = (0..n).filter(|&s| find(&mut parent, s) == s).collect();
            ids.sort_unstable();
            let remap: HashMap<usize, usize> =
                ids.iter().enumerate().map(|(i, &s)| (s, i)).collect();
            let mut edges: Vec<BTreeMap<Label, usize>> = vec![BTreeMap::new(); ids.len()];
            for (s, out) in raw.iter().enumerate() {
                let rs = find(&mut parent, s);
                for &(l, t) in out {
                    let rt = find(&mut parent, t);
                    edges[remap[&rs]].insert(l, remap[&rt]);
                }
            }
            let new_base = remap[&find(&mut parent, base)];
            return (edges, new_base);
        }
    }
}

/// Remove non-base states of degree one: a reduced closed walk would
/// have to backtrack to leave them.
fn trim(
    (mut edges, mut base): (Vec<BTreeMap<Label, usize>>, usize),
    rank: usize,
) -> FoldedAutomaton {
    loop {
        let leaf = (0..edges.len()).find(|&s| s != base && edges[s].len() <= 1);
        let leaf = match leaf {
            Some(l) => l,
            None => break,
        };
        // remove the leaf and its mirror edge
        if let Some((&l, &t)) = edges[leaf].iter().next() {
            edges[t].remove(&(-l));
        }
        edges.remove(leaf);
        for out in edges.iter_mut() {
            for target in out.values_mut() {
                if *target > leaf {
                    *target -= 1;
                }
            }
        }
        if base > leaf {
            base -= 1;
        }
    }
    FoldedAutomaton { rank, base, edges }
}

/// A finitely generated subgroup of the free group of the given rank,
/// with decidable membership through its folded automaton.
#[derive(Debug, Clone)]
pub struct FreeSubgroup {
    pub rank: usize,
    pub generators: Vec<Word>,
    automaton: FoldedAutomaton,
}

impl FreeSubgroup {
    pub fn new(rank: usize, generators: Vec<Word>) -> Result<Self, FreeError> {
        let automaton = FoldedAutomaton::build(rank, &generators)?;
        Ok(FreeSubgroup {
            rank,
            generators,
            automaton,
        })
    }

    pub fn automaton(&self) -> &FoldedAutomaton {
        &self.automaton
    }

    pub fn contains(&self, w: &Word) -> Result<bool, FreeError> {
        if w.max_generator() > self.rank {
            return Err(FreeError::RankExceeded(self.rank));
        }
        Ok(self.automaton.accepts(w))
    }

    pub fn membership_path(&self, w: &Word) -> Option<Vec<usize>> {
        self.automaton.accept_path(w)
    }

    /// `gamma * Delta * gamma^-1`.
    pub fn conjugated(&self, gamma: &Word) -> Result<Self, FreeError> {
        if gamma.max_generator() > self.rank {
            return Err(FreeError::RankExceeded(self.rank));
        }
        let generators: Vec<Word> = self.generators.iter().map(|g| gamma.conjugate(g)).collect();
        Self::new(self.rank, generators)
    }

    /// Product-automaton intersection, folded and trimmed.
    pub fn intersect(&self, other: &Self) -> Result<Self, FreeError> {
        if self.rank != other.rank {
            return Err(FreeError::RankMismatch(self.rank, other.rank));
        }
        let (a, b) = (&self.automaton, &other.automaton);
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut raw: Vec<Vec<(Label, usize)>> = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert((a.base, b.base), 0);
        raw.push(Vec::new());
        queue.push_back((a.base, b.base));
        while let Some((s1, s2)) = queue.pop_front() {
            let cur = ids[&(s1, s2)];
            for (&l, &t1) in &a.edges[s1] {
                if let Some(&t2) = b.edges[s2].get(&l) {
                    let next = *ids.entry((t1, t2)).or_insert_with(|| {
                        raw.push(Vec::new());
                        queue.push_back((t1, t2));
                        raw.len() - 1
                    });
                    raw[cur].push((l, next));
                }
            }
        }
        let automaton = trim(fold(raw, 0), self.rank);
        // read generators back off a spanning tree is unnecessary for an
        // oracle; keep the defining data as the canonical ball
        let generators = automaton.accepted_ball(2 * automaton.state_count().max(1));
        Ok(FreeSubgroup {
            rank: self.rank,
            generators,
            automaton,
        })
    }

    /// Subgroup equality via canonical folded automata.
    pub fn same_subgroup(&self, other: &Self) -> bool {
        self.rank == other.rank
            && self.automaton.canonical_table() == other.automaton.canonical_table()
    }

    /// Nontrivial members of reduced length at most `radius`.
    pub fn ball(&self, radius: usize) -> Vec<Word> {
        self.automaton.accepted_ball(radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 26).unwrap()
    }

    fn squares() -> FreeSubgroup {
        FreeSubgroup::new(2, vec![w("aa"), w("bb")]).unwrap()
    }

    /// Independent membership oracle for <a^2, b^2>: every maximal
    /// syllable of the reduced word must have even exponent.
    fn even_syllables(word: &Word) -> bool {
        let mut letters = word.letters().iter().peekable();
        while let Some(&&first) = letters.peek() {
            let mut run = 0;
            while letters.peek() == Some(&&first) {
                letters.next();
                run += 1;
            }
            if run % 2 != 0 {
                return false;
            }
        }
        true
    }

    #[test]
    fn squares_membership_matches_syllable_oracle() {
        let h = squares();
        for (word, expect) in [
            ("aa", true),
            ("ab", false),
            ("AAbb", true),
            ("abba", false),
            ("aabbAA", true),
            ("AAbbaa", true),
            ("a", false),
            ("", true),
        ] {
            let word = w(word);
            assert_eq!(h.contains(&word).unwrap(), expect, "word {word}");
            assert_eq!(even_syllables(&word), expect, "oracle disagrees on {word}");
        }
        // exhaustive cross-check on all reduced words of length <= 6
        let mut all = vec![Word::identity()];
        let mut frontier = vec![Word::identity()];
        for _ in 0..6 {
            let mut next = Vec::new();
            for word in &frontier {
                for l in [1i8, -1, 2, -2] {
                    let mut letters = word.letters().to_vec();
                    if letters.last() == Some(&-l) {
                        continue;
                    }
                    letters.push(l);
                    next.push(Word::from_letters(letters));
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        for word in all {
            assert_eq!(
                h.contains(&word).unwrap(),
                even_syllables(&word),
                "mismatch at {word}"
            );
        }
    }

    #[test]
    fn membership_certificates_replay() {
        let h = squares();
        let word = w("aabbAA");
        let path = h.membership_path(&word).unwrap();
        assert!(h.automaton().verify_path(&word, &path));
        assert!(!h.automaton().verify_path(&w("aa"), &path));
    }

    #[test]
    fn folding_is_confluent() {
        // same subgroup from generator lists in different orders and
        // with redundant generators
        let h1 = FreeSubgroup::new(2, vec![w("aa"), w("bb")]).unwrap();
        let h2 = FreeSubgroup::new(2, vec![w("bb"), w("aa"), w("aabb")]).unwrap();
        assert!(h1.same_subgroup(&h2));
        let h3 = FreeSubgroup::new(2, vec![w("aa"), w("bb"), w("ab")]).unwrap();
        assert!(!h1.same_subgroup(&h3));
    }

    #[test]
    fn conjugation() {
        let h = squares();
        let byid = h.conjugated(&Word::identity()).unwrap();
        assert!(h.same_subgroup(&byid));
        let bya = h.conjugated(&w("a")).unwrap();
        assert!(bya.contains(&w("aa")).unwrap()); // a a^2 a^-1 = a^2
        assert!(bya.contains(&w("abbA")).unwrap());
        assert!(!bya.contains(&w("bb")).unwrap());
        // membership transport: h contains g iff conj contains a g a^-1
        for g in ["aa", "bb", "ab", "aabb", "ba"] {
            let g = w(g);
            let moved = w("a").conjugate(&g);
            assert_eq!(h.contains(&g).unwrap(), bya.contains(&moved).unwrap());
        }
    }

    #[test]
    fn intersection_with_cyclic() {
        // <a^2, b^2> meet <a> = <a^2>
        let h = squares();
        let cyclic_a = FreeSubgroup::new(2, vec![w("a")]).unwrap();
        let meet = h.intersect(&cyclic_a).unwrap();
        let expect = FreeSubgroup::new(2, vec![w("aa")]).unwrap();
        assert!(meet.same_subgroup(&expect));
        // intersection is idempotent and commutative on membership
        let self_meet = h.intersect(&h).unwrap();
        assert!(self_meet.same_subgroup(&h));
        let other_way = cyclic_a.intersect(&h).unwrap();
        assert!(other_way.same_subgroup(&meet));
    }

    #[test]
    fn balls_list_short_members() {
        let h = squares();
        let ball = h.ball(2);
        let strings: Vec<String> = ball.iter().map(|x| x.to_string()).collect();
        assert_eq!(strings, vec!["AA", "BB", "aa", "bb"]);
        assert!(h.ball(3).iter().all(|x| even_syllables(x)));
    }

    #[test]
    fn rank_errors() {
        let h = squares();
        assert!(h.contains(&Word::parse("c", 26).unwrap()).is_err());
        assert!(FreeSubgroup::new(1, vec![w("ab")]).is_err());
    }
}
