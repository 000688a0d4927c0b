//! Safety-liveness, co-safety-co-liveness and liveness-liveness
//! decompositions, and a checker for them.

use std::fmt;
use std::sync::Arc;

use crate::classify::{check, Check, Options, Verdict};
use crate::closure::{cosafety_closure, safety_closure, ConfigGraph};
use crate::domains::Value;
use crate::error::{Error, Result};
use crate::props::{Derived, HintFn, Property};
use crate::sample::{random_lasso, rng};
use crate::scalar::Scalar;
use crate::traces::Lasso;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `Φ = min(Φ*, Ψ)` with `Ψ` live.
    SafetyLiveness,
    /// `Φ = max(Φ_*, Ψ')` with `Ψ'` co-live.
    CosafetyColiveness,
    /// `Φ = min(Ψ1, Ψ2)` with both parts live.
    LivenessLiveness,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::SafetyLiveness => "safety-liveness",
            Mode::CosafetyColiveness => "cosafety-coliveness",
            Mode::LivenessLiveness => "live-live",
        }
    }

    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "safety-liveness" => Ok(Mode::SafetyLiveness),
            "cosafety-coliveness" => Ok(Mode::CosafetyColiveness),
            "live-live" | "liveness-liveness" => Ok(Mode::LivenessLiveness),
            _ => Err(Error::Parse(format!("unknown decomposition mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Continuations from the configuration reached by a prefix, one per
/// reachable value, for machine-backed properties.
fn machine_hints<F: Scalar>(p: &Property<F>) -> Option<Arc<HintFn>> {
    let g = Arc::new(ConfigGraph::build(p).ok()?);
    Some(Arc::new(move |s: &[usize]| g.continuations(g.node_of(s), 64)))
}

/// `l ↦ p(l)` where `closure(l) ≠ p(l)`, and `fallback` elsewhere.
fn residual<F: Scalar>(p: &Property<F>, closure: &Property<F>, fallback: Value<F>, rule: &str) -> Property<F> {
    let (pp, cc) = (p.clone(), closure.clone());
    let d = p.domain().clone();
    let lasso = move |l: &Lasso| -> Result<Value<F>> {
        let x = pp.eval_lasso(l)?;
        let c = cc.eval_lasso(l)?;
        Ok(if d.eq_values(&x, &c) { fallback.clone() } else { x })
    };
    let derived = Derived { rule: rule.to_string(), lasso: Arc::new(lasso), finitary: None, hints: machine_hints(p) };
    Property::from_derived(
        format!("{rule}({})", p.name()),
        p.alphabet().clone(),
        p.domain().clone(),
        p.value_function(),
        derived,
    )
}

/// The safety closure of `p` and the live part `Ψ` with `p = min(Φ*, Ψ)`.
pub fn safety_liveness<F: Scalar>(p: &Property<F>) -> Result<(Property<F>, Property<F>)> {
    let safe = safety_closure(p)?;
    let live = residual(p, &safe, p.top(), "liveness_part");
    Ok((safe, live))
}

/// The co-safety closure of `p` and the co-live part `Ψ'` with `p = max(Φ_*, Ψ')`.
pub fn cosafety_coliveness<F: Scalar>(p: &Property<F>) -> Result<(Property<F>, Property<F>)> {
    let cosafe = cosafety_closure(p)?;
    let colive = residual(p, &cosafe, p.bottom(), "coliveness_part");
    Ok((cosafe, colive))
}

/// Two live parts with `p = min(Ψ1, Ψ2)`: `Ψi` is top on traces ending in
/// `ai^ω` and agrees with `p` elsewhere.
pub fn liveness_liveness<F: Scalar>(p: &Property<F>, a1: &str, a2: &str) -> Result<(Property<F>, Property<F>)> {
    if a1 == a2 || p.alphabet().len() < 2 {
        return Err(Error::UnaryAlphabet);
    }
    let s1 = p.alphabet().lookup(a1, 0)?;
    let s2 = p.alphabet().lookup(a2, 0)?;
    Ok((tail_top(p, s1, a1), tail_top(p, s2, a2)))
}

fn tail_top<F: Scalar>(p: &Property<F>, a: usize, label: &str) -> Property<F> {
    let pp = p.clone();
    let top = p.top();
    let lasso = move |l: &Lasso| -> Result<Value<F>> {
        if l.normalize().cycle() == [a] {
            Ok(top.clone())
        } else {
            pp.eval_lasso(l)
        }
    };
    let hints = move |_: &[usize]| vec![Lasso::new(Vec::new(), vec![a]).expect("nonempty cycle")];
    let rule = format!("top_on_{label}_tail");
    let derived = Derived { rule: rule.clone(), lasso: Arc::new(lasso), finitary: None, hints: Some(Arc::new(hints)) };
    Property::from_derived(
        format!("{rule}({})", p.name()),
        p.alphabet().clone(),
        p.domain().clone(),
        p.value_function(),
        derived,
    )
}

/// The parts of `p` for `mode`. Live-live uses `symbols` or the first two letters.
pub fn decompose<F: Scalar>(p: &Property<F>, mode: Mode, symbols: Option<(&str, &str)>) -> Result<(Property<F>, Property<F>)> {
    match mode {
        Mode::SafetyLiveness => safety_liveness(p),
        Mode::CosafetyColiveness => cosafety_coliveness(p),
        Mode::LivenessLiveness => {
            let (a1, a2) = match symbols {
                Some(s) => s,
                None if p.alphabet().len() >= 2 => (p.alphabet().label(0), p.alphabet().label(1)),
                None => return Err(Error::UnaryAlphabet),
            };
            liveness_liveness(p, a1, a2)
        }
    }
}

/// A lasso on which the identity fails.
#[derive(Clone, Debug)]
pub struct Mismatch<F> {
    pub lasso: Lasso,
    pub expected: Value<F>,
    pub combined: Value<F>,
}

#[derive(Clone, Debug)]
pub struct DecompositionReport<F> {
    pub mode: Mode,
    pub lassos_checked: usize,
    pub mismatches: Vec<Mismatch<F>>,
    /// Liveness (or co-liveness) verdict of each non-closure part, by name.
    pub part_checks: Vec<(String, Check, Verdict)>,
}

impl<F> DecompositionReport<F> {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.part_checks.iter().all(|(_, _, v)| !v.is_no())
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    /// Bound on stem and cycle length of the random lassos.
    pub max_len: usize,
    /// Options for the liveness checks of the parts; `None` skips them.
    pub classify: Option<Options>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 100,
            seed: 0,
            max_len: 6,
            classify: Some(Options { budget: 4, derived_samples: 128, ..Options::default() }),
        }
    }
}

/// Checks the pointwise identity of `mode` on random lassos and on lassos
/// covering every reachable value of a machine-backed `p`, then checks the
/// non-closure parts for liveness (or co-liveness).
pub fn verify_decomposition<F: Scalar>(
    p: &Property<F>,
    parts: &(Property<F>, Property<F>),
    mode: Mode,
    opts: &VerifyOptions,
) -> Result<DecompositionReport<F>> {
    let d = p.domain();
    let k = p.alphabet().len();
    let mut r = rng(opts.seed);
    let mut lassos: Vec<Lasso> =
        (0..opts.samples).map(|_| random_lasso(&mut r, k, opts.max_len, opts.max_len).normalize()).collect();
    if p.machine().is_some() {
        let g = ConfigGraph::build(p)?;
        lassos.extend(g.value_pairs().into_iter().map(|(c, a)| g.atom_lasso(&g.components()[c].atoms[a])));
        lassos.extend(g.continuations(g.initial(), usize::MAX));
    }
    let mut mismatches = Vec::new();
    for l in &lassos {
        let x = p.eval_lasso(l)?;
        let (u, v) = (parts.0.eval_lasso(l)?, parts.1.eval_lasso(l)?);
        let combined = match mode {
            Mode::CosafetyColiveness => d.join(&u, &v),
            _ => d.meet(&u, &v),
        };
        if !d.eq_values(&combined, &x) {
            mismatches.push(Mismatch { lasso: l.clone(), expected: x, combined });
        }
    }
    let mut part_checks = Vec::new();
    if let Some(copts) = &opts.classify {
        let targets: Vec<(&Property<F>, Check)> = match mode {
            Mode::SafetyLiveness => vec![(&parts.1, Check::Live)],
            Mode::CosafetyColiveness => vec![(&parts.1, Check::Colive)],
            Mode::LivenessLiveness => vec![(&parts.0, Check::Live), (&parts.1, Check::Live)],
        };
        for (q, c) in targets {
            let e = check(q, c, copts)?;
            part_checks.push((q.name().to_string(), c, e.verdict));
        }
    }
    Ok(DecompositionReport { mode, lassos_checked: lassos.len(), mismatches, part_checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::props::builtins::{gf_a, max_response, min_response};
    use crate::props::fixtures::multilive_not_live;

    fn lasso(stem: &[usize], cycle: &[usize]) -> Lasso {
        Lasso::new(stem.to_vec(), cycle.to_vec()).unwrap()
    }

    #[test]
    fn safe_property_has_top_liveness_part() {
        let p = min_response::<f64>(8).unwrap();
        let parts = safety_liveness(&p).unwrap();
        let mut r = rng(1);
        for _ in 0..100 {
            let l = random_lasso(&mut r, 4, 5, 5);
            assert_eq!(parts.1.eval_lasso(&l).unwrap(), p.top());
        }
        let rep = verify_decomposition(&p, &parts, Mode::SafetyLiveness, &VerifyOptions::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn max_response_splits_into_top_and_itself() {
        let p = max_response::<f64>(8).unwrap();
        let (safe, live) = safety_liveness(&p).unwrap();
        let mut r = rng(2);
        for _ in 0..100 {
            let l = random_lasso(&mut r, 4, 5, 5);
            let x = p.eval_lasso(&l).unwrap();
            assert_eq!(safe.eval_lasso(&l).unwrap(), p.top());
            if x != p.top() {
                assert_eq!(live.eval_lasso(&l).unwrap(), x);
            }
        }
    }

    #[test]
    fn cosafe_property_has_bottom_coliveness_part() {
        let p = max_response::<f64>(8).unwrap();
        let parts = cosafety_coliveness(&p).unwrap();
        let mut r = rng(3);
        for _ in 0..100 {
            let l = random_lasso(&mut r, 4, 5, 5);
            assert_eq!(parts.1.eval_lasso(&l).unwrap(), p.bottom());
        }
    }

    #[test]
    fn gf_a_cosafety_coliveness_passes() {
        let p = gf_a::<f64>();
        let parts = cosafety_coliveness(&p).unwrap();
        let rep = verify_decomposition(&p, &parts, Mode::CosafetyColiveness, &VerifyOptions::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn live_live_parts() {
        let p = multilive_not_live::<f64>();
        let (p1, p2) = liveness_liveness(&p, "a", "b").unwrap();
        assert_eq!(p1.eval_lasso(&lasso(&[1, 0], &[0])).unwrap(), p.top());
        assert_eq!(p2.eval_lasso(&lasso(&[1, 0], &[0])).unwrap(), p.eval_lasso(&lasso(&[1], &[0])).unwrap());
        let rep =
            verify_decomposition(&p, &(p1, p2), Mode::LivenessLiveness, &VerifyOptions::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(liveness_liveness(&p, "a", "a").unwrap_err(), Error::UnaryAlphabet);
    }

    #[test]
    fn tampered_part_is_caught() {
        let p = min_response::<f64>(8).unwrap();
        let (safe, live) = safety_liveness(&p).unwrap();
        let g = ConfigGraph::build(&p).unwrap();
        let (c, a) = g.value_pairs()[0];
        let bad = g.atom_lasso(&g.components()[c].atoms[a]);
        let (inner, target, bottom) = (live.clone(), bad.clone(), p.bottom());
        let tampered = Derived {
            rule: "tampered".into(),
            lasso: Arc::new(move |l: &Lasso| if *l == target { Ok(bottom.clone()) } else { inner.eval_lasso(l) }),
            finitary: None,
            hints: None,
        };
        let live = Property::from_derived("tampered", p.alphabet().clone(), p.domain().clone(), p.value_function(), tampered);
        let opts = VerifyOptions { classify: None, ..VerifyOptions::default() };
        let rep = verify_decomposition(&p, &(safe, live), Mode::SafetyLiveness, &opts).unwrap();
        assert!(!rep.passed());
        assert!(rep.mismatches.iter().all(|m| m.lasso == bad));
        assert!(!rep.mismatches.is_empty());
    }
}
