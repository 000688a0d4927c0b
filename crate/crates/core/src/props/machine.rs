//! Deterministic complete Moore machines.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::domains::{Value, ValueDomain};
use crate::error::{Error, Result};
use crate::props::ValueFunction;
use crate::scalar::Scalar;
use crate::traces::Lasso;

/// A Moore machine whose output on a finite trace is the output of the state
/// reached on it. Transitions are stored as a flat `state * symbols + symbol` table.
#[derive(Clone, Debug)]
pub struct Machine<F> {
    num_symbols: usize,
    outputs: Vec<Value<F>>,
    names: Vec<String>,
    initial: usize,
    delta: Vec<usize>,
}

impl<F: Scalar> PartialEq for Machine<F> {
    fn eq(&self, other: &Self) -> bool {
        self.num_symbols == other.num_symbols
            && self.outputs == other.outputs
            && self.names == other.names
            && self.initial == other.initial
            && self.delta == other.delta
    }
}

impl<F: Scalar> Machine<F> {
    pub fn new(
        num_symbols: usize,
        outputs: Vec<Value<F>>,
        names: Vec<String>,
        initial: usize,
        delta: Vec<usize>,
    ) -> Result<Self> {
        let n = outputs.len();
        if n == 0 {
            return Err(Error::InvalidMachine("machine has no states".into()));
        }
        if num_symbols == 0 {
            return Err(Error::InvalidMachine("machine has no symbols".into()));
        }
        if names.len() != n {
            return Err(Error::InvalidMachine("state names and outputs differ in length".into()));
        }
        if initial >= n {
            return Err(Error::InvalidMachine(format!("initial state {initial} out of range")));
        }
        if delta.len() != n * num_symbols {
            return Err(Error::InvalidMachine("transition table is not complete".into()));
        }
        if let Some(bad) = delta.iter().find(|&&t| t >= n) {
            return Err(Error::InvalidMachine(format!("transition target {bad} out of range")));
        }
        Ok(Machine { num_symbols, outputs, names, initial, delta })
    }

    /// Single-state machine with output `value`.
    pub fn constant(num_symbols: usize, value: Value<F>) -> Self {
        Machine {
            num_symbols,
            outputs: vec![value],
            names: vec!["q0".into()],
            initial: 0,
            delta: vec![0; num_symbols],
        }
    }

    /// Builds the reachable part of an implicitly given machine by breadth-first
    /// exploration from `init`.
    pub fn explore<K, S, O, N>(num_symbols: usize, init: K, step: S, output: O, name: N) -> Self
    where
        K: Clone + Eq + Hash,
        S: Fn(&K, usize) -> K,
        O: Fn(&K) -> Value<F>,
        N: Fn(&K) -> String,
    {
        let mut index: HashMap<K, usize> = HashMap::new();
        let mut keys = vec![init.clone()];
        index.insert(init, 0);
        let mut queue = VecDeque::from([0usize]);
        let mut delta = Vec::new();
        while let Some(q) = queue.pop_front() {
            if delta.len() < (q + 1) * num_symbols {
                delta.resize((q + 1) * num_symbols, 0);
            }
            for a in 0..num_symbols {
                let next = step(&keys[q], a);
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = keys.len();
                        index.insert(next.clone(), id);
                        keys.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                delta[q * num_symbols + a] = id;
            }
        }
        delta.resize(keys.len() * num_symbols, 0);
        Machine {
            num_symbols,
            outputs: keys.iter().map(&output).collect(),
            names: keys.iter().map(&name).collect(),
            initial: 0,
            delta,
        }
    }

    pub fn num_states(&self) -> usize {
        self.outputs.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn output(&self, q: usize) -> &Value<F> {
        &self.outputs[q]
    }

    pub fn outputs(&self) -> &[Value<F>] {
        &self.outputs
    }

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn next(&self, q: usize, a: usize) -> usize {
        self.delta[q * self.num_symbols + a]
    }

    pub fn successors(&self, q: usize) -> &[usize] {
        &self.delta[q * self.num_symbols..(q + 1) * self.num_symbols]
    }

    pub fn run_from(&self, q: usize, word: &[usize]) -> usize {
        word.iter().fold(q, |q, &a| self.next(q, a))
    }

    pub fn run(&self, word: &[usize]) -> usize {
        self.run_from(self.initial, word)
    }

    /// Outputs on every prefix of `word`, the empty prefix first.
    pub fn prefix_outputs(&self, word: &[usize]) -> Vec<Value<F>> {
        let mut q = self.initial;
        let mut out = vec![self.outputs[q].clone()];
        for &a in word {
            q = self.next(q, a);
            out.push(self.outputs[q].clone());
        }
        out
    }

    /// Runs the stem and then whole cycles until the state at a cycle boundary
    /// repeats. Returns the states entered along the transient part (including
    /// the initial state) and along one period of the recurring orbit.
    pub fn orbit(&self, lasso: &Lasso) -> (Vec<usize>, Vec<usize>) {
        let mut transient = vec![self.initial];
        let mut q = self.initial;
        for &a in lasso.stem() {
            q = self.next(q, a);
            transient.push(q);
        }
        let mut boundary: Vec<usize> = vec![q];
        let mut walks: Vec<Vec<usize>> = Vec::new();
        loop {
            let mut walk = Vec::with_capacity(lasso.cycle().len());
            for &a in lasso.cycle() {
                q = self.next(q, a);
                walk.push(q);
            }
            walks.push(walk);
            if let Some(i) = boundary.iter().position(|&b| b == q) {
                for w in &walks[..i] {
                    transient.extend_from_slice(w);
                }
                let recurring = walks[i..].concat();
                return (transient, recurring);
            }
            boundary.push(q);
        }
    }

    /// Exact value of `(λ, vf)` on the lasso.
    pub fn eval_lasso(&self, lasso: &Lasso, vf: ValueFunction, domain: &ValueDomain) -> Value<F> {
        let (transient, recurring) = self.orbit(lasso);
        let out = |q: &usize| &self.outputs[*q];
        match vf {
            ValueFunction::Inf => domain.meet_all(transient.iter().chain(&recurring).map(out)),
            ValueFunction::Sup => domain.join_all(transient.iter().chain(&recurring).map(out)),
            ValueFunction::Liminf => domain.meet_all(recurring.iter().map(out)),
            ValueFunction::Limsup => domain.join_all(recurring.iter().map(out)),
        }
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            for &t in self.successors(q) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Same transition structure with mapped outputs.
    pub fn map_outputs(&self, f: impl Fn(&Value<F>) -> Value<F>) -> Machine<F> {
        Machine { outputs: self.outputs.iter().map(f).collect(), ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::ExtNat;

    fn nat(k: u64) -> Value<f64> {
        Value::Nat(ExtNat::Fin(k))
    }

    // counts a's modulo 3 over {a, b}
    fn mod3() -> Machine<f64> {
        Machine::new(
            2,
            vec![nat(0), nat(1), nat(2)],
            vec!["0".into(), "1".into(), "2".into()],
            0,
            vec![1, 0, 2, 1, 0, 2],
        )
        .unwrap()
    }

    #[test]
    fn rejects_incomplete_tables() {
        assert!(Machine::<f64>::new(2, vec![nat(0)], vec!["q".into()], 0, vec![0]).is_err());
        assert!(Machine::<f64>::new(1, vec![nat(0)], vec!["q".into()], 1, vec![0]).is_err());
        assert!(Machine::<f64>::new(1, vec![nat(0)], vec!["q".into()], 0, vec![3]).is_err());
    }

    #[test]
    fn orbit_finds_recurring_states() {
        let m = mod3();
        let l = Lasso::new(vec![1], vec![0]).unwrap();
        let (t, r) = m.orbit(&l);
        assert_eq!(t, vec![0, 0]);
        let mut r = r;
        r.sort();
        assert_eq!(r, vec![0, 1, 2]);
        let l = Lasso::new(vec![0], vec![1]).unwrap();
        let (_, r) = m.orbit(&l);
        assert_eq!(r, vec![1]);
    }

    #[test]
    fn lasso_values() {
        let m = mod3();
        let d = ValueDomain::extended_nat();
        let l = Lasso::new(vec![0, 0], vec![1]).unwrap();
        assert_eq!(m.eval_lasso(&l, ValueFunction::Liminf, &d), nat(2));
        assert_eq!(m.eval_lasso(&l, ValueFunction::Inf, &d), nat(0));
        assert_eq!(m.eval_lasso(&l, ValueFunction::Sup, &d), nat(2));
        let l = Lasso::new(vec![], vec![0]).unwrap();
        assert_eq!(m.eval_lasso(&l, ValueFunction::Liminf, &d), nat(0));
        assert_eq!(m.eval_lasso(&l, ValueFunction::Limsup, &d), nat(2));
    }

    #[test]
    fn explore_builds_reachable_part() {
        let m: Machine<f64> = Machine::explore(2, 0u64, |k, a| (k + a as u64 + 1) % 4, |k| nat(*k), |k| k.to_string());
        assert_eq!(m.num_states(), 4);
        assert_eq!(m.output(m.run(&[1, 1])), &nat(0));
    }
}
