use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::error::{Error, Result};
use crate::format::DomainSpec;
use crate::props::ValueFunction;
use crate::scalar::Scalar;
use crate::traces::Alphabet;

use super::synth::{AbstractMonitor, MonitorClass};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassRecord {
    pub id: usize,
    pub representative: Vec<String>,
    pub frozen: bool,
    pub gamma: Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRecord {
    pub from: usize,
    pub symbol: String,
    pub to: usize,
}

/// On-disk form of an [`AbstractMonitor`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorFile {
    pub delta: f64,
    pub alphabet: Vec<String>,
    pub initial: usize,
    pub classes: Vec<ClassRecord>,
    pub transitions: Vec<TransitionRecord>,
    pub value_function: String,
    pub domain: DomainSpec,
}

fn number_or_text<F: Scalar>(x: Option<F>, text: String) -> Json {
    match x.map(|x| x.to_f64_lossy()).filter(|x| x.is_finite()) {
        Some(x) => serde_json::Number::from_f64(x).map(Json::Number).unwrap_or(Json::String(text)),
        None => Json::String(text),
    }
}

impl MonitorFile {
    pub fn of<F: Scalar>(m: &AbstractMonitor<F>) -> MonitorFile {
        let a = &m.alphabet;
        let classes = m
            .classes
            .iter()
            .map(|c| ClassRecord {
                id: c.id,
                representative: c.representative.iter().map(|&s| a.label(s).to_string()).collect(),
                frozen: c.frozen,
                gamma: number_or_text(m.domain.to_real(&c.gamma), m.domain.format(&c.gamma)),
            })
            .collect();
        let transitions = (0..m.len())
            .flat_map(|c| (0..a.len()).map(move |s| (c, s)))
            .map(|(c, s)| TransitionRecord { from: c, symbol: a.label(s).to_string(), to: m.step(c, s) })
            .collect();
        MonitorFile {
            delta: m.delta.to_f64_lossy(),
            alphabet: a.symbols().to_vec(),
            initial: m.initial,
            classes,
            transitions,
            value_function: m.value_function.name().to_string(),
            domain: DomainSpec::of(&m.domain),
        }
    }

    pub fn build<F: Scalar>(&self) -> Result<AbstractMonitor<F>> {
        let alphabet = Alphabet::new(self.alphabet.clone())?;
        let domain = self.domain.build()?;
        let n = self.classes.len();
        let k = alphabet.len();
        if self.initial >= n {
            return Err(Error::Parse(format!("initial class {} does not exist", self.initial)));
        }
        let mut classes = Vec::with_capacity(n);
        for (i, c) in self.classes.iter().enumerate() {
            if c.id != i {
                return Err(Error::Parse(format!("class ids must be 0..{n} in order, found {}", c.id)));
            }
            let text = match &c.gamma {
                Json::Number(x) => x.to_string(),
                Json::String(s) => s.clone(),
                g => return Err(Error::Parse(format!("gamma {g} is not a number or string"))),
            };
            let representative =
                c.representative.iter().enumerate().map(|(j, s)| alphabet.lookup(s, j)).collect::<Result<_>>()?;
            classes.push(MonitorClass { id: i, representative, frozen: c.frozen, gamma: domain.parse_value(&text)? });
        }
        let mut next = vec![usize::MAX; n * k];
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from >= n || t.to >= n {
                return Err(Error::Parse(format!("transition {i} refers to a missing class")));
            }
            next[t.from * k + alphabet.lookup(&t.symbol, i)?] = t.to;
        }
        if next.contains(&usize::MAX) {
            return Err(Error::Parse("transitions are not total".into()));
        }
        Ok(AbstractMonitor {
            delta: F::from_f64_lossy(self.delta),
            alphabet,
            domain,
            value_function: ValueFunction::parse(&self.value_function)?,
            initial: self.initial,
            classes,
            next,
        })
    }
}

pub fn export_json<F: Scalar>(m: &AbstractMonitor<F>) -> String {
    let mut s = serde_json::to_string_pretty(&MonitorFile::of(m)).expect("serializable");
    s.push('\n');
    s
}

pub fn import_json<F: Scalar>(text: &str) -> Result<AbstractMonitor<F>> {
    let f: MonitorFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    f.build()
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// One node per class (frozen classes drawn as double circles) and one edge
/// per class and symbol.
pub fn export_dot<F: Scalar>(m: &AbstractMonitor<F>) -> String {
    let mut out = String::from("digraph monitor {\n  rankdir=LR;\n");
    for c in &m.classes {
        let rep = if c.representative.is_empty() { "ε".to_string() } else { m.alphabet.render(&c.representative) };
        let shape = if c.frozen { "doublecircle" } else { "circle" };
        out.push_str(&format!(
            "  c{} [shape={shape}, label=\"{}\\nγ={}\"];\n",
            c.id,
            dot_escape(&rep),
            dot_escape(&m.domain.format(&c.gamma))
        ));
    }
    for c in 0..m.len() {
        for a in 0..m.alphabet.len() {
            out.push_str(&format!(
                "  c{c} -> c{} [label=\"{}\"];\n",
                m.step(c, a),
                dot_escape(m.alphabet.label(a))
            ));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monitor::{synthesize, DEFAULT_MAX_DEPTH};
    use crate::props::builtins::discounted_never;

    fn monitor() -> AbstractMonitor<f64> {
        let p = discounted_never(Alphabet::new(["a", "b"]).unwrap(), "b").unwrap();
        synthesize(&p, 0.25, DEFAULT_MAX_DEPTH).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let m = monitor();
        let text = export_json(&m);
        let v: Json = serde_json::from_str(&text).unwrap();
        assert_eq!(v["classes"].as_array().unwrap().len(), 5);
        assert_eq!(import_json::<f64>(&text).unwrap(), m);
        let at: Vec<usize> = ["\"delta\"", "\"alphabet\"", "\"initial\"", "\"classes\"", "\"transitions\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(at.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn dot_has_one_node_per_class() {
        let m = monitor();
        let dot = export_dot(&m);
        assert_eq!(dot.lines().filter(|l| l.contains("[shape=")).count(), 5);
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 10);
        assert_eq!(dot.matches("doublecircle").count(), 3);
    }
}
