//! Configuration graphs, continuation extremes, prediction sets and the
//! safety / co-safety closures.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::domains::{Value, ValueDomain};
use crate::error::{Error, Result};
use crate::graph::{Digraph, Sccs};
use crate::props::{Machine, Oracle, PredictionSet, Property, ValueFunction};
use crate::scalar::Scalar;
use crate::traces::Lasso;

/// A machine state together with the running meet (`inf`) or join (`sup`) of
/// the outputs seen so far, including the current one.
#[derive(Clone, Debug)]
pub struct Config<F> {
    pub state: usize,
    pub aggregate: Option<Value<F>>,
}

/// A set of nodes within one component whose infinitely repeated visits give
/// `value`.
#[derive(Clone, Debug)]
pub struct Atom<F> {
    pub value: Value<F>,
    pub nodes: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Component<F> {
    pub nodes: Vec<usize>,
    pub nontrivial: bool,
    /// Values achievable by staying in this component forever.
    pub atoms: Vec<Atom<F>>,
    /// Values achievable from any node of this component.
    pub predictions: Vec<Value<F>>,
    pub top: Value<F>,
    pub bottom: Value<F>,
    /// Join and meet of the finitary outputs reachable from this component.
    pub reach_join: Value<F>,
    pub reach_meet: Value<F>,
}

/// The reachable configurations of a machine-backed property.
#[derive(Clone, Debug)]
pub struct ConfigGraph<F> {
    domain: ValueDomain,
    value_function: ValueFunction,
    machine: Arc<Machine<F>>,
    states: Vec<usize>,
    aggs: Vec<Option<usize>>,
    table: Vec<Value<F>>,
    graph: Digraph,
    sccs: Sccs,
    comps: Vec<Component<F>>,
}

fn push_unique<F: Scalar>(d: &ValueDomain, vs: &mut Vec<Value<F>>, v: Value<F>) {
    if !vs.iter().any(|w| d.eq_values(w, &v)) {
        vs.push(v);
    }
}

/// Sorts values by their real embedding where available, keeping the
/// original order otherwise.
pub fn sort_values<F: Scalar>(d: &ValueDomain, vs: &mut [Value<F>]) {
    if d.is_total() && d.is_numeric() {
        vs.sort_by(|a, b| {
            let (x, y) = (d.to_real(a), d.to_real(b));
            x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
        });
    } else if d.is_total() {
        vs.sort_by(|a, b| match d.relation(a, b) {
            crate::domains::Relation::Less => std::cmp::Ordering::Less,
            crate::domains::Relation::Greater => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        });
    }
}

impl<F: Scalar> ConfigGraph<F> {
    pub fn build(p: &Property<F>) -> Result<Self> {
        let m = p.machine().ok_or_else(|| {
            Error::UnsupportedBackend(format!("{} is not machine-backed", p.name()))
        })?;
        let machine = Arc::new(m.clone());
        let d = p.domain().clone();
        let vf = p.value_function();
        let k = m.num_symbols();
        let combine = |a: &Value<F>, b: &Value<F>| match vf {
            ValueFunction::Inf => d.meet(a, b),
            _ => d.join(a, b),
        };

        let mut table: Vec<Value<F>> = Vec::new();
        let intern = |table: &mut Vec<Value<F>>, v: Value<F>| -> usize {
            match table.iter().position(|w| d.eq_values(w, &v)) {
                Some(i) => i,
                None => {
                    table.push(v);
                    table.len() - 1
                }
            }
        };
        let q0 = m.initial();
        let a0 = vf.is_prefix_aggregate().then(|| intern(&mut table, m.output(q0).clone()));
        let mut index: HashMap<(usize, Option<usize>), usize> = HashMap::new();
        let mut states = vec![q0];
        let mut aggs = vec![a0];
        index.insert((q0, a0), 0);
        let mut delta: Vec<usize> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            delta.resize((v + 1).max(delta.len() / k) * k, 0);
            for a in 0..k {
                let t = m.next(states[v], a);
                let agg = aggs[v].map(|i| {
                    let nv = combine(&table[i], m.output(t));
                    intern(&mut table, nv)
                });
                let id = *index.entry((t, agg)).or_insert_with(|| {
                    states.push(t);
                    aggs.push(agg);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                });
                delta[v * k + a] = id;
            }
        }
        delta.resize(states.len() * k, 0);
        let graph = Digraph::new(k, delta);
        let sccs = graph.sccs(None);

        let mut g = ConfigGraph {
            domain: d,
            value_function: vf,
            machine,
            states,
            aggs,
            table,
            graph,
            sccs,
            comps: Vec::new(),
        };
        g.comps = g.analyse();
        Ok(g)
    }

    fn node_output(&self, v: usize) -> &Value<F> {
        self.machine.output(self.states[v])
    }

    fn atoms_of(&self, comp: usize) -> Vec<Atom<F>> {
        let d = &self.domain;
        let nodes = &self.sccs.comps[comp];
        if !self.sccs.nontrivial[comp] {
            return Vec::new();
        }
        match self.value_function {
            ValueFunction::Inf | ValueFunction::Sup => {
                let v = self.table[self.aggs[nodes[0]].expect("aggregate")].clone();
                vec![Atom { value: v, nodes: nodes.clone() }]
            }
            ValueFunction::Liminf | ValueFunction::Limsup => {
                let lower = self.value_function == ValueFunction::Liminf;
                let mut thresholds: Vec<Value<F>> = Vec::new();
                for &v in nodes {
                    push_unique(d, &mut thresholds, self.node_output(v).clone());
                }
                // close under meet (liminf) or join (limsup)
                let mut i = 0;
                while i < thresholds.len() {
                    for j in 0..i {
                        let c = if lower {
                            d.meet(&thresholds[i], &thresholds[j])
                        } else {
                            d.join(&thresholds[i], &thresholds[j])
                        };
                        push_unique(d, &mut thresholds, c);
                    }
                    i += 1;
                }
                let mut atoms: Vec<Atom<F>> = Vec::new();
                let in_comp = |v: usize| self.sccs.comp_of[v] == comp;
                for t in &thresholds {
                    let keep: Vec<bool> = (0..self.graph.len())
                        .map(|v| {
                            in_comp(v)
                                && if lower {
                                    d.geq(self.node_output(v), t)
                                } else {
                                    d.leq(self.node_output(v), t)
                                }
                        })
                        .collect();
                    let sub = self.graph.sccs(Some(&keep));
                    for (c, sn) in sub.comps.iter().enumerate() {
                        if !sub.nontrivial[c] {
                            continue;
                        }
                        let outs = sn.iter().map(|&v| self.node_output(v));
                        let value = if lower { d.meet_all(outs) } else { d.join_all(outs) };
                        if !atoms.iter().any(|a| d.eq_values(&a.value, &value)) {
                            atoms.push(Atom { value, nodes: sn.clone() });
                        }
                    }
                }
                atoms
            }
        }
    }

    fn analyse(&self) -> Vec<Component<F>> {
        let d = &self.domain;
        let n = self.sccs.comps.len();
        let mut comps: Vec<Component<F>> = Vec::with_capacity(n);
        // reverse topological order: successors' components come first
        for c in 0..n {
            let nodes = self.sccs.comps[c].clone();
            let atoms = self.atoms_of(c);
            let mut predictions: Vec<Value<F>> = Vec::new();
            let mut rj = d.join_all(nodes.iter().map(|&v| self.node_output(v)));
            let mut rm = d.meet_all(nodes.iter().map(|&v| self.node_output(v)));
            for a in &atoms {
                push_unique(d, &mut predictions, a.value.clone());
            }
            let mut succ_comps: Vec<usize> = nodes
                .iter()
                .flat_map(|&v| self.graph.successors(v).iter().map(|&w| self.sccs.comp_of[w]))
                .filter(|&s| s != c)
                .collect();
            succ_comps.sort_unstable();
            succ_comps.dedup();
            for s in succ_comps {
                let sc: &Component<F> = &comps[s];
                for v in &sc.predictions {
                    push_unique(d, &mut predictions, v.clone());
                }
                rj = d.join(&rj, &sc.reach_join);
                rm = d.meet(&rm, &sc.reach_meet);
            }
            sort_values(d, &mut predictions);
            let top = d.join_all(&predictions);
            let bottom = d.meet_all(&predictions);
            comps.push(Component {
                nodes,
                nontrivial: self.sccs.nontrivial[c],
                atoms,
                predictions,
                top,
                bottom,
                reach_join: rj,
                reach_meet: rm,
            });
        }
        comps
    }

    pub fn domain(&self) -> &ValueDomain {
        &self.domain
    }

    pub fn value_function(&self) -> ValueFunction {
        self.value_function
    }

    pub fn machine(&self) -> &Machine<F> {
        &self.machine
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn config(&self, v: usize) -> Config<F> {
        Config { state: self.states[v], aggregate: self.aggs[v].map(|i| self.table[i].clone()) }
    }

    pub fn step(&self, v: usize, a: usize) -> usize {
        self.graph.next(v, a)
    }

    pub fn node_of(&self, word: &[usize]) -> usize {
        word.iter().fold(0, |v, &a| self.graph.next(v, a))
    }

    /// π on the prefix leading to `v`.
    pub fn output(&self, v: usize) -> &Value<F> {
        self.node_output(v)
    }

    pub fn components(&self) -> &[Component<F>] {
        &self.comps
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.sccs.comp_of[v]
    }

    pub fn component(&self, v: usize) -> &Component<F> {
        &self.comps[self.sccs.comp_of[v]]
    }

    /// Join of the values of all infinite continuations.
    pub fn top(&self, v: usize) -> &Value<F> {
        &self.component(v).top
    }

    pub fn bottom(&self, v: usize) -> &Value<F> {
        &self.component(v).bottom
    }

    pub fn prediction_set(&self, v: usize) -> &[Value<F>] {
        &self.component(v).predictions
    }

    /// Join of `π(s·r)` over finite continuations `r` (including the empty one).
    pub fn finite_join(&self, v: usize) -> &Value<F> {
        &self.component(v).reach_join
    }

    pub fn finite_meet(&self, v: usize) -> &Value<F> {
        &self.component(v).reach_meet
    }

    /// Shortest word reaching `v` from the initial configuration.
    pub fn word_to(&self, v: usize) -> Vec<usize> {
        self.graph.word_to(0, |x| x == v, |_| true).map(|(w, _)| w).unwrap_or_default()
    }

    /// A lasso that reaches the atom's nodes by a shortest word and then
    /// cycles through all of them forever.
    pub fn atom_lasso(&self, atom: &Atom<F>) -> Lasso {
        let member = |x: usize| atom.nodes.contains(&x);
        let (stem, entry) = self.graph.word_to(0, member, |_| true).expect("atoms are reachable");
        let cycle = self.graph.covering_walk(entry, &atom.nodes).expect("atoms contain a cycle");
        Lasso::new(stem, cycle).expect("nonempty cycle")
    }

    /// Continuations from `v`, one per achievable value (at most `limit`),
    /// each realising its value.
    pub fn continuations(&self, v: usize, limit: usize) -> Vec<Lasso> {
        let reach = self.graph.reachable_from(v);
        let mut out = Vec::new();
        for comp in &self.comps {
            if !reach[comp.nodes[0]] {
                continue;
            }
            for atom in &comp.atoms {
                if out.len() >= limit {
                    return out;
                }
                let member = |x: usize| atom.nodes.contains(&x);
                let Some((stem, entry)) = self.graph.word_to(v, member, |_| true) else { continue };
                if let Some(cycle) = self.graph.covering_walk(entry, &atom.nodes) {
                    out.push(Lasso::new(stem, cycle).expect("nonempty cycle"));
                }
            }
        }
        out
    }

    /// Every `(closure value, value)` pair realised by some infinite trace,
    /// with a lasso realising it.
    pub fn value_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (c, comp) in self.comps.iter().enumerate() {
            for i in 0..comp.atoms.len() {
                out.push((c, i));
            }
        }
        // components are stored sinks first; report in discovery order
        out.sort_by_key(|&(c, i)| (self.comps[c].nodes[0], i));
        out
    }

    /// Values of the safety closure as a machine: outputs `top` per node.
    pub fn top_machine(&self) -> Machine<F> {
        self.node_machine(|v| self.top(v).clone())
    }

    pub fn bottom_machine(&self) -> Machine<F> {
        self.node_machine(|v| self.bottom(v).clone())
    }

    fn node_machine(&self, out: impl Fn(usize) -> Value<F>) -> Machine<F> {
        let n = self.len();
        let k = self.graph.symbols();
        let names = (0..n)
            .map(|v| {
                let c = self.config(v);
                match c.aggregate {
                    Some(a) => format!("{}/{}", self.machine.name(c.state), self.domain.format(&a)),
                    None => self.machine.name(c.state).to_string(),
                }
            })
            .collect();
        let delta = (0..n).flat_map(|v| self.graph.successors(v).to_vec()).collect();
        Machine::new(k, (0..n).map(out).collect(), names, 0, delta).expect("config graph is complete")
    }
}

fn machine_or_hook<F: Scalar>(p: &Property<F>, hook: &str) -> Result<()> {
    if p.machine().is_some() {
        return Ok(());
    }
    let has = match hook {
        "sup_ext" => p.sup_ext(&[]).is_some(),
        _ => p.inf_ext(&[]).is_some(),
    };
    if has {
        Ok(())
    } else {
        Err(Error::UnsupportedBackend(format!("{} has neither a machine nor a {hook} hook", p.name())))
    }
}

/// Join of `Φ(s·g)` over infinite continuations `g`.
pub fn top_value<F: Scalar>(p: &Property<F>, s: &[usize]) -> Result<Value<F>> {
    machine_or_hook(p, "sup_ext")?;
    match p.machine() {
        Some(_) => {
            let g = ConfigGraph::build(p)?;
            Ok(g.top(g.node_of(s)).clone())
        }
        None => Ok(p.sup_ext(s).expect("checked hook")),
    }
}

/// Meet of `Φ(s·g)` over infinite continuations `g`.
pub fn bottom_value<F: Scalar>(p: &Property<F>, s: &[usize]) -> Result<Value<F>> {
    machine_or_hook(p, "inf_ext")?;
    match p.machine() {
        Some(_) => {
            let g = ConfigGraph::build(p)?;
            Ok(g.bottom(g.node_of(s)).clone())
        }
        None => Ok(p.inf_ext(s).expect("checked hook")),
    }
}

/// Values `Φ(s·f)` over infinite continuations `f`.
pub fn prediction_set<F: Scalar>(p: &Property<F>, s: &[usize]) -> Result<PredictionSet<F>> {
    if p.machine().is_some() {
        let g = ConfigGraph::build(p)?;
        return Ok(PredictionSet::finite(p.domain(), g.prediction_set(g.node_of(s)).to_vec()));
    }
    p.oracle()
        .and_then(|o| o.prediction_set(s))
        .ok_or_else(|| Error::UnsupportedBackend(format!("{} has no prediction sets", p.name())))
}

/// Meet (or join) of a prefix hook along a lasso, read far enough into the
/// cycle for the hooks of the builtins to settle.
pub(crate) fn settled_prefix_meet<F: Scalar>(
    d: &ValueDomain,
    l: &Lasso,
    hook: impl Fn(&[usize]) -> Option<Value<F>>,
    lower: bool,
) -> Option<Value<F>> {
    // exact hooks are monotone along prefixes; reading them at every cycle
    // boundary is enough
    let (u, c) = (l.stem().len(), l.cycle().len());
    let w = l.unroll(u + CLOSURE_HORIZON * c);
    let mut acc = hook(&[])?;
    for i in (0..=CLOSURE_HORIZON).map(|j| u + j * c) {
        let v = hook(&w.0[..i])?;
        acc = if lower { d.meet(&acc, &v) } else { d.join(&acc, &v) };
    }
    Some(acc)
}

/// Number of cycle repetitions read when evaluating an oracle closure on a lasso.
pub const CLOSURE_HORIZON: usize = 32;

struct SafetyClosure<F: Scalar> {
    inner: Arc<dyn Oracle<F>>,
    domain: ValueDomain,
}

impl<F: Scalar> Oracle<F> for SafetyClosure<F> {
    fn eval(&self, s: &[usize]) -> Value<F> {
        self.inner.sup_ext(s).expect("closure needs sup_ext")
    }

    fn eval_lasso(&self, l: &Lasso) -> Option<Value<F>> {
        settled_prefix_meet(&self.domain, l, |s| self.inner.sup_ext(s), true)
    }

    fn sup_ext(&self, s: &[usize]) -> Option<Value<F>> {
        self.inner.sup_ext(s)
    }
}

/// The least safety property above `p`.
pub fn safety_closure<F: Scalar>(p: &Property<F>) -> Result<Property<F>> {
    machine_or_hook(p, "sup_ext")?;
    let name = format!("safety_closure({})", p.name());
    if p.machine().is_some() {
        let g = ConfigGraph::build(p)?;
        return Property::from_machine(
            name,
            p.alphabet().clone(),
            p.domain().clone(),
            ValueFunction::Inf,
            g.top_machine(),
        );
    }
    let o = p.oracle().expect("checked hook").clone();
    let c = SafetyClosure { inner: o, domain: p.domain().clone() };
    Ok(Property::from_oracle(name, p.alphabet().clone(), p.domain().clone(), ValueFunction::Inf, Arc::new(c)))
}

/// The greatest co-safety property below `p`.
pub fn cosafety_closure<F: Scalar>(p: &Property<F>) -> Result<Property<F>> {
    machine_or_hook(p, "inf_ext")?;
    let c = safety_closure(&p.complement())?.complement();
    Ok(c.with_name(format!("cosafety_closure({})", p.name())))
}
