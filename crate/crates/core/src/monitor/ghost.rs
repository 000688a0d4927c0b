use std::fmt;
use std::sync::Arc;

use crate::closure::ConfigGraph;
use crate::domains::Value;
use crate::error::{Error, Result};
use crate::props::{BufferTracker, PrefixTracker, Property};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypKind {
    /// `Φ(f) ≥ v`.
    Ge,
    /// `Φ(f) ≤ v`.
    Le,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Open,
    /// Rejected after this many observations.
    Rejected(usize),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Open => f.write_str("Open"),
            Status::Rejected(k) => write!(f, "Rejected@{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis<F: Scalar> {
    pub kind: HypKind,
    pub value: Value<F>,
    pub status: Status,
}

impl<F: Scalar> Hypothesis<F> {
    /// Reads `ge:V` or `le:V` with `V` in the notation of `p`'s domain.
    pub fn parse(text: &str, p: &Property<F>) -> Result<Self> {
        let (kind, v) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("hypothesis {text:?} is not ge:V or le:V")))?;
        let kind = match kind.trim().to_ascii_lowercase().as_str() {
            "ge" => HypKind::Ge,
            "le" => HypKind::Le,
            k => return Err(Error::Parse(format!("unknown hypothesis kind {k:?}"))),
        };
        Ok(Hypothesis { kind, value: p.domain().parse_value(v)?, status: Status::Open })
    }

    pub fn label(&self, p: &Property<F>) -> String {
        let k = match self.kind {
            HypKind::Ge => "ge",
            HypKind::Le => "le",
        };
        format!("{k}:{}", p.domain().format(&self.value))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport<F: Scalar> {
    pub step: usize,
    pub symbol: usize,
    pub pi: Value<F>,
    pub lower: Value<F>,
    pub upper: Value<F>,
    /// Whether some infinite continuation attains `upper` (machine-backed only).
    pub sup_realizable: Option<bool>,
    /// Hypotheses rejected at this step, by index.
    pub rejected: Vec<usize>,
}

enum Cursor<F: Scalar> {
    Machine { graph: Arc<ConfigGraph<F>>, node: usize },
    Oracle(Box<dyn PrefixTracker<F>>),
}

/// Streaming monitor state: the configuration reached so far, the current
/// prediction bounds and the registered hypotheses.
pub struct GhostState<F: Scalar> {
    property: Property<F>,
    cursor: Cursor<F>,
    hypotheses: Vec<Hypothesis<F>>,
    step: usize,
}

impl<F: Scalar> GhostState<F> {
    pub fn new(p: &Property<F>) -> Result<Self> {
        let cursor = if p.machine().is_some() {
            let graph = Arc::new(ConfigGraph::build(p)?);
            Cursor::Machine { node: graph.initial(), graph }
        } else {
            let o = p
                .oracle()
                .filter(|o| o.sup_ext(&[]).is_some() && o.inf_ext(&[]).is_some())
                .ok_or_else(|| {
                    Error::UnsupportedBackend(format!("{} has no prediction bound hooks", p.name()))
                })?;
            Cursor::Oracle(o.tracker().unwrap_or_else(|| Box::new(BufferTracker::new(o.clone()))))
        };
        Ok(GhostState { property: p.clone(), cursor, hypotheses: Vec::new(), step: 0 })
    }

    pub fn property(&self) -> &Property<F> {
        &self.property
    }

    pub fn steps(&self) -> usize {
        self.step
    }

    pub fn hypotheses(&self) -> &[Hypothesis<F>] {
        &self.hypotheses
    }

    /// Registers a hypothesis; it is checked against the current bounds at once.
    pub fn add_hypothesis(&mut self, kind: HypKind, value: Value<F>) -> usize {
        let mut h = Hypothesis { kind, value, status: Status::Open };
        if self.refutes(&h) {
            h.status = Status::Rejected(self.step);
        }
        self.hypotheses.push(h);
        self.hypotheses.len() - 1
    }

    pub fn pi(&self) -> Value<F> {
        match &self.cursor {
            Cursor::Machine { graph, node } => graph.output(*node).clone(),
            Cursor::Oracle(t) => t.value(),
        }
    }

    /// Join of the values still possible.
    pub fn upper(&self) -> Value<F> {
        match &self.cursor {
            Cursor::Machine { graph, node } => graph.top(*node).clone(),
            Cursor::Oracle(t) => t.sup_ext().expect("checked hooks"),
        }
    }

    /// Meet of the values still possible.
    pub fn lower(&self) -> Value<F> {
        match &self.cursor {
            Cursor::Machine { graph, node } => graph.bottom(*node).clone(),
            Cursor::Oracle(t) => t.inf_ext().expect("checked hooks"),
        }
    }

    pub fn sup_realizable(&self) -> Option<bool> {
        match &self.cursor {
            Cursor::Machine { graph, node } => {
                let d = self.property.domain();
                let top = graph.top(*node);
                Some(graph.prediction_set(*node).iter().any(|v| d.eq_values(v, top)))
            }
            Cursor::Oracle(_) => None,
        }
    }

    fn refutes(&self, h: &Hypothesis<F>) -> bool {
        let d = self.property.domain();
        match h.kind {
            HypKind::Ge => d.not_geq(&self.upper(), &h.value),
            HypKind::Le => d.not_leq(&self.lower(), &h.value),
        }
    }

    pub fn step(&mut self, sym: usize) -> Result<StepReport<F>> {
        let k = self.property.alphabet().len();
        if sym >= k {
            return Err(Error::AlphabetMismatch(format!("symbol index {sym} outside an alphabet of {k}")));
        }
        match &mut self.cursor {
            Cursor::Machine { graph, node } => *node = graph.step(*node, sym),
            Cursor::Oracle(t) => t.push(sym),
        }
        self.step += 1;
        let mut rejected = Vec::new();
        for i in 0..self.hypotheses.len() {
            if self.hypotheses[i].status == Status::Open && self.refutes(&self.hypotheses[i]) {
                self.hypotheses[i].status = Status::Rejected(self.step);
                rejected.push(i);
            }
        }
        Ok(StepReport {
            step: self.step,
            symbol: sym,
            pi: self.pi(),
            lower: self.lower(),
            upper: self.upper(),
            sup_realizable: self.sup_realizable(),
            rejected,
        })
    }
}

pub fn ghost_step<F: Scalar>(g: &mut GhostState<F>, obs: usize) -> Result<StepReport<F>> {
    g.step(obs)
}
