//! Brute-force reference computations shared by the integration suites.
#![allow(dead_code)]

use qsl_core::domains::{Value, ValueDomain};
use qsl_core::props::{Machine, Property, ValueFunction};
use qsl_core::traces::Lasso;

/// Every lasso (normalized, deduplicated) with stem length ≤ `max_stem` and
/// cycle length in `1..=max_cycle`.
pub fn all_lassos(k: usize, max_stem: usize, max_cycle: usize) -> Vec<Lasso> {
    fn words(k: usize, n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w: Vec<usize>| (0..k).map(move |a| [w.clone(), vec![a]].concat()))
                .collect();
        }
        out
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for u in 0..=max_stem {
        for stem in words(k, u) {
            for c in 1..=max_cycle {
                for cycle in words(k, c) {
                    let l = Lasso::new(stem.clone(), cycle).unwrap().normalize();
                    if seen.insert(l.clone()) {
                        out.push(l);
                    }
                }
            }
        }
    }
    out
}

/// `Φ(prefix · l)` by running the machine over an explicit unrolling: after
/// `|u| + n·|c|` letters the cycle-boundary state is periodic with period at
/// most `n` cycles, so the next `n·|c|` positions show every recurring output.
pub fn brute_value(p: &Property<f64>, prefix: &[usize], l: &Lasso) -> Value<f64> {
    let m: &Machine<f64> = p.machine().expect("machine-backed");
    let d = p.domain();
    let n = m.num_states();
    let u = prefix.len() + l.stem().len();
    let c = l.cycle().len();
    let total = u + 2 * n * c;
    let mut q = m.initial();
    let mut outs = vec![m.output(q).clone()];
    for i in 0..total {
        let a = if i < prefix.len() { prefix[i] } else { l.at(i - prefix.len()) };
        q = m.next(q, a);
        outs.push(m.output(q).clone());
    }
    let tail = &outs[u + n * c + 1..];
    match p.value_function() {
        ValueFunction::Inf => d.meet_all(outs.iter()),
        ValueFunction::Sup => d.join_all(outs.iter()),
        ValueFunction::Liminf => d.meet_all(tail.iter()),
        ValueFunction::Limsup => d.join_all(tail.iter()),
    }
}

/// Values of `Φ(s·g)` over all enumerated continuations `g`, deduplicated.
pub fn brute_predictions(p: &Property<f64>, s: &[usize], conts: &[Lasso]) -> Vec<Value<f64>> {
    let d = p.domain();
    let mut vs: Vec<Value<f64>> = Vec::new();
    for g in conts {
        let v = brute_value(p, s, g);
        if !vs.iter().any(|w| d.eq_values(w, &v)) {
            vs.push(v);
        }
    }
    vs
}

pub fn same_set(d: &ValueDomain, a: &[Value<f64>], b: &[Value<f64>]) -> bool {
    a.iter().all(|x| b.iter().any(|y| d.eq_values(x, y))) && b.iter().all(|y| a.iter().any(|x| d.eq_values(x, y)))
}

/// Closure value `Φ*(l)`: meet over prefixes `s` of `l` of the join of
/// `Φ(s·g)` over continuations `g`. Prefixes up to `|u| + 2·n·|c|` suffice:
/// by then the run and its running aggregate are periodic.
pub fn brute_closure(p: &Property<f64>, l: &Lasso, conts: &[Lasso], upper: bool) -> Value<f64> {
    let d = p.domain();
    let n = p.machine().unwrap().num_states();
    let len = l.stem().len() + 2 * n * l.cycle().len();
    let mut acc = if upper { d.top() } else { d.bottom() };
    for i in 0..=len {
        let ps = brute_predictions(p, &l.unroll(i).0, conts);
        let b = if upper { d.join_all(ps.iter()) } else { d.meet_all(ps.iter()) };
        acc = if upper { d.meet(&acc, &b) } else { d.join(&acc, &b) };
    }
    acc
}

/// Every builtin and fixture property with the parameters used throughout the suites.
pub fn corpus() -> Vec<Property<f64>> {
    use qsl_core::props::builtins::*;
    use qsl_core::props::fixtures;
    let ab = qsl_core::Alphabet::new(["a", "b"]).unwrap();
    let mut out = vec![
        min_response(8).unwrap(),
        tail_min_response(8).unwrap(),
        skip_min_response(1, 8).unwrap(),
        max_response(8).unwrap(),
        avg_response(),
        bounded_avg(3).unwrap(),
        gf_a(),
        fg_b(),
        discounted_never(ab, "b").unwrap(),
    ];
    out.extend(fixtures::NAMES.iter().map(|n| fixtures::fixture(n).unwrap()));
    out
}
