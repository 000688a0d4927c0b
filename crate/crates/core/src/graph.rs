//! Symbol-labelled complete digraphs: SCCs, shortest words and covering walks.

use std::collections::VecDeque;

/// A deterministic complete graph: every node has one successor per symbol.
#[derive(Clone, Debug)]
pub struct Digraph {
    k: usize,
    delta: Vec<usize>,
}

/// Strongly connected components in reverse topological order (every edge
/// leaving a component points to one listed earlier).
#[derive(Clone, Debug)]
pub struct Sccs {
    pub comp_of: Vec<usize>,
    pub comps: Vec<Vec<usize>>,
    /// Whether a component contains a cycle (size > 1 or a self-loop).
    pub nontrivial: Vec<bool>,
}

impl Digraph {
    pub fn new(k: usize, delta: Vec<usize>) -> Self {
        debug_assert!(k > 0 && delta.len().is_multiple_of(k));
        Digraph { k, delta }
    }

    pub fn len(&self) -> usize {
        self.delta.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    pub fn symbols(&self) -> usize {
        self.k
    }

    pub fn next(&self, v: usize, a: usize) -> usize {
        self.delta[v * self.k + a]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.delta[v * self.k..(v + 1) * self.k]
    }

    /// SCCs of the subgraph induced by `keep` (all nodes when `None`).
    /// Nodes outside `keep` get component `usize::MAX`.
    pub fn sccs(&self, keep: Option<&[bool]>) -> Sccs {
        let n = self.len();
        let kept = |v: usize| keep.is_none_or(|m| m[v]);
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut comp_of = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut counter = 0;
        // iterative Tarjan: frames hold (node, next symbol to explore)
        let mut frames: Vec<(usize, usize)> = Vec::new();
        for root in 0..n {
            if !kept(root) || index[root] != usize::MAX {
                continue;
            }
            frames.push((root, 0));
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut a)) = frames.last_mut() {
                if *a < self.k {
                    let w = self.next(v, *a);
                    *a += 1;
                    if !kept(w) {
                        continue;
                    }
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    frames.pop();
                    if let Some(&(u, _)) = frames.last() {
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let id = comps.len();
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp_of[w] = id;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        let nontrivial = comps
            .iter()
            .map(|c| c.len() > 1 || self.successors(c[0]).contains(&c[0]))
            .collect();
        Sccs { comp_of, comps, nontrivial }
    }

    /// Shortest word leading from `from` to a node satisfying `goal`, moving
    /// only through nodes allowed by `within`. Ties go to smaller symbols.
    pub fn word_to(
        &self,
        from: usize,
        goal: impl Fn(usize) -> bool,
        within: impl Fn(usize) -> bool,
    ) -> Option<(Vec<usize>, usize)> {
        if goal(from) {
            return Some((Vec::new(), from));
        }
        let n = self.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for a in 0..self.k {
                let w = self.next(v, a);
                if seen[w] || !within(w) {
                    continue;
                }
                seen[w] = true;
                parent[w] = Some((v, a));
                if goal(w) {
                    let mut word = Vec::new();
                    let mut cur = w;
                    while let Some((p, a)) = parent[cur] {
                        word.push(a);
                        cur = p;
                    }
                    word.reverse();
                    return Some((word, w));
                }
                queue.push_back(w);
            }
        }
        None
    }

    /// Shortest nonempty word from `v` back to `v` inside `within`.
    pub fn cycle_at(&self, v: usize, within: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let mut best: Option<Vec<usize>> = None;
        for a in 0..self.k {
            let w = self.next(v, a);
            if !within(w) {
                continue;
            }
            if let Some((rest, _)) = self.word_to(w, |x| x == v, &within) {
                let len = rest.len() + 1;
                if best.as_ref().is_none_or(|b| len < b.len()) {
                    let mut word = vec![a];
                    word.extend(rest);
                    best = Some(word);
                }
            }
        }
        best
    }

    /// A closed walk from `v` that visits every node of `set` and stays inside
    /// it. `set` must be strongly connected and contain a cycle.
    pub fn covering_walk(&self, v: usize, set: &[usize]) -> Option<Vec<usize>> {
        let n = self.len();
        let mut member = vec![false; n];
        for &x in set {
            member[x] = true;
        }
        let within = |x: usize| member[x];
        let mut walk: Vec<usize> = Vec::new();
        let mut visited = vec![false; n];
        visited[v] = true;
        let mut cur = v;
        while let Some((word, reached)) = self.word_to(cur, |x| member[x] && !visited[x], within) {
            for &a in &word {
                cur = self.next(cur, a);
                visited[cur] = true;
            }
            debug_assert_eq!(cur, reached);
            walk.extend(word);
        }
        if walk.is_empty() {
            return self.cycle_at(v, within);
        }
        let (back, _) = self.word_to(cur, |x| x == v, within)?;
        if back.is_empty() {
            // cur == v can only happen if the loop never moved
            return self.cycle_at(v, within);
        }
        walk.extend(back);
        Some(walk)
    }

    /// Nodes reachable from `v` (including `v`).
    pub fn reachable_from(&self, v: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        seen[v] = true;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &w in self.successors(x) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // 0 -a-> 1, 0 -b-> 0; 1 -a-> 2, 1 -b-> 0; 2 -a-> 2, 2 -b-> 2
    fn g() -> Digraph {
        Digraph::new(2, vec![1, 0, 2, 0, 2, 2])
    }

    #[test]
    fn sccs_in_reverse_topological_order() {
        let s = g().sccs(None);
        assert_eq!(s.comps, vec![vec![2], vec![0, 1]]);
        assert_eq!(s.nontrivial, vec![true, true]);
        assert_eq!(s.comp_of, vec![1, 1, 0]);
    }

    #[test]
    fn restricted_sccs() {
        let keep = [true, true, false];
        let s = g().sccs(Some(&keep));
        assert_eq!(s.comps, vec![vec![0, 1]]);
        assert_eq!(s.comp_of[2], usize::MAX);
        let keep = [false, true, true];
        let s = g().sccs(Some(&keep));
        assert_eq!(s.comps.len(), 2);
        let one = s.comp_of[1];
        assert!(!s.nontrivial[one]);
    }

    #[test]
    fn words_and_walks() {
        let g = g();
        assert_eq!(g.word_to(0, |x| x == 2, |_| true), Some((vec![0, 0], 2)));
        assert_eq!(g.cycle_at(0, |x| x < 2), Some(vec![1]));
        let w = g.covering_walk(0, &[0, 1]).unwrap();
        let mut cur = 0;
        let mut seen = [false; 3];
        for &a in &w {
            cur = g.next(cur, a);
            seen[cur] = true;
        }
        assert_eq!(cur, 0);
        assert!(seen[0] && seen[1] && !seen[2]);
    }
}
