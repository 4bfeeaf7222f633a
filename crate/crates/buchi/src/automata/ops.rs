//! Operations on digit-tuple DFAs.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{alphabet_size, symbol_digits, AutomataError, Dfa};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

impl Dfa {
    /// Renames tracks positionally, keeping the transition structure.
    pub fn rename_tracks(&self, names: &[&str]) -> Result<Dfa, AutomataError> {
        if names.len() != self.tracks.len() {
            return Err(AutomataError::Malformed("track count mismatch in rename".into()));
        }
        Dfa::from_parts(
            self.base,
            names.iter().map(|s| s.to_string()).collect(),
            self.initial,
            self.accepting.clone(),
            self.transitions.clone(),
        )
    }

    /// Cylindrifies/reorders onto `target`, which must contain every track of
    /// `self`. Digits of new tracks are ignored.
    pub fn align_to(&self, target: &[String]) -> Result<Dfa, AutomataError> {
        if target == self.tracks {
            return Ok(self.clone());
        }
        let positions: Vec<usize> = self
            .tracks
            .iter()
            .map(|t| {
                target
                    .iter()
                    .position(|u| u == t)
                    .ok_or_else(|| AutomataError::UnknownTrack(t.clone()))
            })
            .collect::<Result<_, _>>()?;
        let alpha = alphabet_size(self.base, target.len())?;
        let states = self.state_count();
        let mut transitions = Vec::with_capacity(states * alpha);
        let mut own_digits = vec![0u8; self.tracks.len()];
        for s in 0..states {
            for sym in 0..alpha {
                let digits = symbol_digits(sym, self.base, target.len());
                for (i, &pos) in positions.iter().enumerate() {
                    own_digits[i] = digits[pos];
                }
                let own_sym = self.symbol_index(&own_digits);
                transitions.push(self.step(s, own_sym));
            }
        }
        Dfa::from_parts(self.base, target.to_vec(), self.initial, self.accepting.clone(), transitions)
    }

    /// Merges duplicate track names: `names` gives the desired name of each
    /// existing track position; positions sharing a name read the same digit.
    pub fn contract_tracks(&self, names: &[&str]) -> Result<Dfa, AutomataError> {
        if names.len() != self.tracks.len() {
            return Err(AutomataError::Malformed("track count mismatch in contract".into()));
        }
        let mut merged: Vec<String> = Vec::new();
        for &n in names {
            if !merged.iter().any(|m| m == n) {
                merged.push(n.to_string());
            }
        }
        if merged.len() == names.len() {
            return self.rename_tracks(names);
        }
        let slot: Vec<usize> =
            names.iter().map(|n| merged.iter().position(|m| m == n).unwrap()).collect();
        let alpha = alphabet_size(self.base, merged.len())?;
        let states = self.state_count();
        let mut transitions = Vec::with_capacity(states * alpha);
        let mut full_digits = vec![0u8; names.len()];
        for s in 0..states {
            for sym in 0..alpha {
                let digits = symbol_digits(sym, self.base, merged.len());
                for (i, &sl) in slot.iter().enumerate() {
                    full_digits[i] = digits[sl];
                }
                let full_sym = self.symbol_index(&full_digits);
                transitions.push(self.step(s, full_sym));
            }
        }
        Dfa::from_parts(self.base, merged, self.initial, self.accepting.clone(), transitions)
    }

    /// Product construction for ∧/∨ after unifying the track lists
    /// (left tracks first, then the right-only tracks).
    pub fn boolean_combine(&self, other: &Dfa, op: BoolOp, cap: usize) -> Result<Dfa, AutomataError> {
        let f = match op {
            BoolOp::And => |a: bool, b: bool| a && b,
            BoolOp::Or => |a: bool, b: bool| a || b,
        };
        self.product(other, f, cap)
    }

    pub(crate) fn product(
        &self,
        other: &Dfa,
        f: impl Fn(bool, bool) -> bool,
        cap: usize,
    ) -> Result<Dfa, AutomataError> {
        if self.base != other.base {
            return Err(AutomataError::BaseMismatch(self.base, other.base));
        }
        let target = unify_tracks(&self.tracks, &other.tracks);
        let a = self.align_to(&target)?;
        let b = other.align_to(&target)?;
        let alpha = a.alpha;
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(a.initial, b.initial)];
        index.insert((a.initial, b.initial), 0);
        let mut transitions: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (sa, sb) = pairs[i];
            for sym in 0..alpha {
                let next = (a.step(sa, sym), b.step(sb, sym));
                let id = *index.entry(next).or_insert_with(|| {
                    pairs.push(next);
                    pairs.len() - 1
                });
                transitions.push(id);
            }
            if pairs.len() > cap {
                return Err(AutomataError::CapacityExceeded(cap));
            }
            i += 1;
        }
        let accepting = pairs.iter().map(|&(sa, sb)| f(a.accepting[sa], b.accepting[sb])).collect();
        Dfa::from_parts(self.base, target, 0, accepting, transitions)
    }

    /// Complement over the same tracks. Acceptance is first normalized along
    /// zero-successor chains (a state counts as accepting iff its zero-closure
    /// contains an accepting state), then flipped; flipping alone can break
    /// padding closure on automata that only accept canonical words.
    pub fn complement(&self) -> Dfa {
        let states = self.state_count();
        let mut closed = vec![false; states];
        for s in 0..states {
            let mut cur = s;
            for _ in 0..=states {
                if self.accepting[cur] {
                    closed[s] = true;
                    break;
                }
                cur = self.step(cur, 0);
            }
        }
        let accepting = closed.iter().map(|&a| !a).collect();
        Dfa {
            base: self.base,
            tracks: self.tracks.clone(),
            alpha: self.alpha,
            initial: self.initial,
            accepting,
            transitions: self.transitions.clone(),
        }
    }

    /// Existential projection: erases `track`; accepts `v̄` iff some natural
    /// on the erased track (possibly longer than the canonical encoding of
    /// `v̄`) makes the extended tuple accepted.
    pub fn project(&self, track: &str, cap: usize) -> Result<Dfa, AutomataError> {
        let nfa = ErasedNfa::new(self, track)?;
        nfa.determinize(cap, |dfa, subset| {
            // Zero-closure on the remaining tracks: the witness may keep
            // producing digits after v̄'s canonical word has ended.
            let mut seen = subset.to_vec();
            let mut queue = subset.to_vec();
            while let Some(s) = queue.pop() {
                if dfa.accepting[s] {
                    return true;
                }
                for t in nfa.successors(s, 0) {
                    if !seen.contains(&t) {
                        seen.push(t);
                        queue.push(t);
                    }
                }
            }
            false
        })
    }

    /// Infinitary projection: erases `track`; accepts `v̄` iff infinitely
    /// many naturals on the erased track make the extended tuple accepted.
    pub fn exists_inf(&self, track: &str, cap: usize) -> Result<Dfa, AutomataError> {
        let nfa = ErasedNfa::new(self, track)?;
        let infinite = self.infinite_residual_states(nfa.track_index);
        nfa.determinize(cap, |_, subset| subset.iter().any(|&s| infinite[s]))
    }

    /// For each state `s`: is the single-track language
    /// `{w : reading w's digits on `track` (zeros elsewhere) from s accepts}`
    /// infinite? Counted on canonical words so padded variants of one natural
    /// are not overcounted.
    fn infinite_residual_states(&self, track: usize) -> Vec<bool> {
        let states = self.state_count();
        let base = self.base as usize;
        // One-track successor on digit d, zeros on all other tracks.
        let shift = (0..self.tracks.len() - 1 - track).fold(1usize, |acc, _| acc * base);
        let succ = |s: usize, d: usize| self.step(s, d * shift);
        // Product with the canonicity tracker: node (s, z), z = last digit was 0.
        let node = |s: usize, z: usize| s * 2 + z;
        let n = states * 2;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in 0..states {
            for d in 0..base {
                let t = node(succ(s, d), usize::from(d == 0));
                adj[node(s, 0)].push(t);
                adj[node(s, 1)].push(t);
            }
        }
        // Nodes that can reach an accepting node (s ∈ F, last digit nonzero).
        let accepting: Vec<usize> =
            (0..states).filter(|&s| self.accepting[s]).map(|s| node(s, 0)).collect();
        let coreach = reverse_reachable(&adj, n, &accepting);
        // Productive cycles: on a cycle and co-reachable to acceptance.
        let cyclic = cyclic_nodes(&adj, n);
        let productive: Vec<usize> =
            (0..n).filter(|&v| cyclic[v] && coreach[v]).collect();
        let reaches_cycle = reverse_reachable(&adj, n, &productive);
        (0..states)
            .map(|s| (0..base).any(|d| reaches_cycle[node(succ(s, d), usize::from(d == 0))]))
            .collect()
    }

    /// Minimal complete DFA for the same language, with canonical BFS state
    /// numbering so equal languages yield structurally equal automata.
    pub fn minimize(&self) -> Dfa {
        // Restrict to reachable states.
        let mut order = vec![self.initial];
        let mut idx = vec![usize::MAX; self.state_count()];
        idx[self.initial] = 0;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for sym in 0..self.alpha {
                let t = self.step(s, sym);
                if idx[t] == usize::MAX {
                    idx[t] = order.len();
                    order.push(t);
                }
            }
            i += 1;
        }
        let n = order.len();
        let acc: Vec<bool> = order.iter().map(|&s| self.accepting[s]).collect();
        let mut trans: Vec<usize> = Vec::with_capacity(n * self.alpha);
        for &s in &order {
            for sym in 0..self.alpha {
                trans.push(idx[self.step(s, sym)]);
            }
        }
        // Moore partition refinement.
        let mut block: Vec<usize> = acc.iter().map(|&a| usize::from(a)).collect();
        let mut count = 2;
        loop {
            let mut sig_ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![0usize; n];
            for s in 0..n {
                let mut sig = Vec::with_capacity(self.alpha + 1);
                sig.push(block[s]);
                sig.extend((0..self.alpha).map(|sym| block[trans[s * self.alpha + sym]]));
                let fresh = sig_ids.len();
                next[s] = *sig_ids.entry(sig).or_insert(fresh);
            }
            let new_count = sig_ids.len();
            block = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // Quotient, then canonical BFS renumbering.
        let mut rep = vec![usize::MAX; count];
        for s in 0..n {
            if rep[block[s]] == usize::MAX {
                rep[block[s]] = s;
            }
        }
        let mut bfs_id = vec![usize::MAX; count];
        let mut bfs_order = vec![block[0]];
        bfs_id[block[0]] = 0;
        let mut i = 0;
        while i < bfs_order.len() {
            let b = bfs_order[i];
            for sym in 0..self.alpha {
                let tb = block[trans[rep[b] * self.alpha + sym]];
                if bfs_id[tb] == usize::MAX {
                    bfs_id[tb] = bfs_order.len();
                    bfs_order.push(tb);
                }
            }
            i += 1;
        }
        let accepting: Vec<bool> = bfs_order.iter().map(|&b| acc[rep[b]]).collect();
        let mut transitions: Vec<usize> = Vec::with_capacity(bfs_order.len() * self.alpha);
        for &b in &bfs_order {
            for sym in 0..self.alpha {
                transitions.push(bfs_id[block[trans[rep[b] * self.alpha + sym]]]);
            }
        }
        Dfa {
            base: self.base,
            tracks: self.tracks.clone(),
            alpha: self.alpha,
            initial: 0,
            accepting,
            transitions,
        }
    }

    /// True iff no accepting state is reachable.
    pub fn is_empty(&self) -> bool {
        let mut seen = vec![false; self.state_count()];
        seen[self.initial] = true;
        let mut queue = vec![self.initial];
        while let Some(s) = queue.pop() {
            if self.accepting[s] {
                return false;
            }
            for sym in 0..self.alpha {
                let t = self.step(s, sym);
                if !seen[t] {
                    seen[t] = true;
                    queue.push(t);
                }
            }
        }
        true
    }

    /// True iff the set of accepted tuples is finite, i.e. the language of
    /// accepted canonical words is finite.
    pub fn is_finite(&self) -> bool {
        let g = self.canonical_graph();
        let reach = g.reachable();
        let coreach = reverse_reachable(&g.adj, g.n, &g.accepting_nodes());
        let cyclic = cyclic_nodes_restricted(&g.adj, g.n, |v| reach[v] && coreach[v]);
        !cyclic.iter().any(|&c| c)
    }

    /// Same language test, via minimized canonical structures over unified
    /// tracks.
    pub fn equivalent(&self, other: &Dfa) -> Result<bool, AutomataError> {
        if self.base != other.base {
            return Err(AutomataError::BaseMismatch(self.base, other.base));
        }
        let target = unify_tracks(&self.tracks, &other.tracks);
        let a = self.align_to(&target)?.minimize();
        let b = other.align_to(&target)?.minimize();
        Ok(a == b)
    }

    /// First `limit` accepted tuples, ordered by canonical word length, ties
    /// broken lexicographically by digit tuples read LSD-first.
    pub fn enumerate(&self, limit: usize) -> Vec<Vec<BigUint>> {
        let mut out = Vec::new();
        if limit == 0 {
            return out;
        }
        let g = self.canonical_graph();
        let dist = min_distance_to(&g.adj, g.n, &g.accepting_nodes());
        let finite = self.is_finite();
        let init = g.node(self.initial, 0);
        if self.accepting[self.initial] {
            out.push(vec![BigUint::zero(); self.arity()]);
        }
        let mut length = 1usize;
        while out.len() < limit {
            if finite && length > g.n {
                break;
            }
            self.enumerate_at(&g, &dist, init, length, &mut Vec::new(), &mut out, limit);
            length += 1;
        }
        out
    }

    fn enumerate_at(
        &self,
        g: &CanonicalGraph,
        dist: &[usize],
        node: usize,
        remaining: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<BigUint>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if remaining == 0 {
            if g.accepting(node) {
                out.push(self.decode_symbols(prefix));
            }
            return;
        }
        if dist[node] > remaining {
            return;
        }
        for sym in 0..self.alpha {
            prefix.push(sym);
            self.enumerate_at(g, dist, g.adj[node][sym], remaining - 1, prefix, out, limit);
            prefix.pop();
            if out.len() >= limit {
                return;
            }
        }
    }

    fn decode_symbols(&self, symbols: &[usize]) -> Vec<BigUint> {
        let mut values = vec![BigUint::zero(); self.arity()];
        let mut power = BigUint::one();
        let big_base = BigUint::from(self.base);
        for &sym in symbols {
            for (i, d) in self.symbol_digits(sym).into_iter().enumerate() {
                values[i] += &power * BigUint::from(d);
            }
            power *= &big_base;
        }
        values
    }

    /// Number of accepted tuples, or `None` when infinite.
    pub fn count_tuples(&self) -> Option<BigUint> {
        if !self.is_finite() {
            return None;
        }
        let g = self.canonical_graph();
        let coreach = reverse_reachable(&g.adj, g.n, &g.accepting_nodes());
        // The useful subgraph is acyclic; count accepted canonical words by
        // memoized path counting.
        let mut memo: Vec<Option<BigUint>> = vec![None; g.n];
        let init = g.node(self.initial, 0);
        Some(count_from(&g, &coreach, &mut memo, init))
    }

    /// Product with the canonicity tracker (was the last symbol all-zero?).
    fn canonical_graph(&self) -> CanonicalGraph {
        let states = self.state_count();
        let n = states * 2;
        let mut adj = vec![Vec::with_capacity(self.alpha); n];
        for s in 0..states {
            for z in 0..2 {
                for sym in 0..self.alpha {
                    adj[s * 2 + z].push(self.step(s, sym) * 2 + usize::from(sym == 0));
                }
            }
        }
        CanonicalGraph { n, adj, accepting: self.accepting.clone(), initial: self.initial }
    }
}

fn count_from(g: &CanonicalGraph, coreach: &[bool], memo: &mut Vec<Option<BigUint>>, v: usize) -> BigUint {
    if let Some(c) = &memo[v] {
        return c.clone();
    }
    let mut total = if g.accepting(v) { BigUint::one() } else { BigUint::zero() };
    let succ = g.adj[v].clone();
    for t in succ {
        if coreach[t] {
            total += count_from(g, coreach, memo, t);
        }
    }
    memo[v] = Some(total.clone());
    total
}

struct CanonicalGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    accepting: Vec<bool>,
    initial: usize,
}

impl CanonicalGraph {
    fn node(&self, state: usize, last_zero: usize) -> usize {
        state * 2 + last_zero
    }

    /// Accepting nonempty canonical words end on (accepting, last nonzero).
    fn accepting(&self, node: usize) -> bool {
        self.accepting[node / 2] && node % 2 == 0
    }

    fn accepting_nodes(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.accepting(v)).collect()
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let start = self.node(self.initial, 0);
        seen[start] = true;
        let mut queue = vec![start];
        while let Some(v) = queue.pop() {
            for &t in &self.adj[v] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push(t);
                }
            }
        }
        seen
    }
}

/// Union of the track lists, left first-use order then right.
pub(crate) fn unify_tracks(left: &[String], right: &[String]) -> Vec<String> {
    let mut out = left.to_vec();
    for t in right {
        if !out.contains(t) {
            out.push(t.clone());
        }
    }
    out
}

/// The NFA obtained by erasing one track; nondeterminism ranges over the
/// erased digit.
struct ErasedNfa<'a> {
    dfa: &'a Dfa,
    track_index: usize,
    tracks: Vec<String>,
    alpha: usize,
}

impl<'a> ErasedNfa<'a> {
    fn new(dfa: &'a Dfa, track: &str) -> Result<Self, AutomataError> {
        let track_index = dfa
            .tracks
            .iter()
            .position(|t| t == track)
            .ok_or_else(|| AutomataError::UnknownTrack(track.to_string()))?;
        let tracks: Vec<String> =
            dfa.tracks.iter().filter(|t| t.as_str() != track).cloned().collect();
        let alpha = alphabet_size(dfa.base, tracks.len())?;
        Ok(ErasedNfa { dfa, track_index, tracks, alpha })
    }

    fn successors(&self, state: usize, reduced_sym: usize) -> Vec<usize> {
        let reduced = symbol_digits(reduced_sym, self.dfa.base, self.tracks.len());
        let mut full = Vec::with_capacity(self.dfa.tracks.len());
        full.extend_from_slice(&reduced[..self.track_index]);
        full.push(0);
        full.extend_from_slice(&reduced[self.track_index..]);
        (0..self.dfa.base as u8)
            .map(|d| {
                full[self.track_index] = d;
                self.dfa.step(state, self.dfa.symbol_index(&full))
            })
            .collect()
    }

    /// Subset construction; `accept` decides acceptance of a subset.
    fn determinize(
        &self,
        cap: usize,
        accept: impl Fn(&Dfa, &[usize]) -> bool,
    ) -> Result<Dfa, AutomataError> {
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let start = vec![self.dfa.initial];
        index.insert(start.clone(), 0);
        let mut subsets = vec![start];
        let mut transitions: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            for sym in 0..self.alpha {
                let mut next: Vec<usize> = Vec::new();
                for &s in &subsets[i] {
                    for t in self.successors(s, sym) {
                        if !next.contains(&t) {
                            next.push(t);
                        }
                    }
                }
                next.sort_unstable();
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        subsets.push(next.clone());
                        index.insert(next, subsets.len() - 1);
                        subsets.len() - 1
                    }
                };
                transitions.push(id);
            }
            if subsets.len() > cap {
                return Err(AutomataError::CapacityExceeded(cap));
            }
            i += 1;
        }
        let accepting = subsets.iter().map(|s| accept(self.dfa, s)).collect();
        Dfa::from_parts(self.dfa.base, self.tracks.clone(), 0, accepting, transitions)
    }
}

/// Nodes from which some node in `targets` is reachable (targets included).
fn reverse_reachable(adj: &[Vec<usize>], n: usize, targets: &[usize]) -> Vec<bool> {
    let mut radj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, succ) in adj.iter().enumerate() {
        for &t in succ {
            radj[t].push(v);
        }
    }
    let mut seen = vec![false; n];
    let mut queue: Vec<usize> = Vec::new();
    for &t in targets {
        if !seen[t] {
            seen[t] = true;
            queue.push(t);
        }
    }
    while let Some(v) = queue.pop() {
        for &p in &radj[v] {
            if !seen[p] {
                seen[p] = true;
                queue.push(p);
            }
        }
    }
    seen
}

/// BFS distance (in symbols) from each node to the nearest target;
/// `usize::MAX` when unreachable.
fn min_distance_to(adj: &[Vec<usize>], n: usize, targets: &[usize]) -> Vec<usize> {
    let mut radj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, succ) in adj.iter().enumerate() {
        for &t in succ {
            radj[t].push(v);
        }
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &t in targets {
        if dist[t] == usize::MAX {
            dist[t] = 0;
            queue.push_back(t);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &p in &radj[v] {
            if dist[p] == usize::MAX {
                dist[p] = dist[v] + 1;
                queue.push_back(p);
            }
        }
    }
    dist
}

fn cyclic_nodes(adj: &[Vec<usize>], n: usize) -> Vec<bool> {
    cyclic_nodes_restricted(adj, n, |_| true)
}

/// Marks nodes lying on a cycle within the induced subgraph, via iterative
/// Tarjan SCC (components of size > 1, or self-loops).
fn cyclic_nodes_restricted(adj: &[Vec<usize>], n: usize, active: impl Fn(usize) -> bool) -> Vec<bool> {
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut cyclic = vec![false; n];
    // Explicit DFS stack: (node, next child position).
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if !active(root) || index[root] != UNSET {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut child)) = call.last_mut() {
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if !active(w) {
                    continue;
                }
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    let big = comp.len() > 1;
                    for &w in &comp {
                        cyclic[w] = big || adj[w].iter().any(|&t| t == w && active(w));
                    }
                }
            }
        }
    }
    cyclic
}
