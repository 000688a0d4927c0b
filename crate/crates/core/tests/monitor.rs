use std::time::Instant;

use rand::Rng;

use qsl_core::monitor::{ghost_step, monitor_run, s_delta, synthesize, GhostState, HypKind, RunOutput, Status, DEFAULT_MAX_DEPTH};
use qsl_core::props::builtins::{avg_response, discounted_never, max_response, min_response, GR, RQ, TK};
use qsl_core::sample::{random_lasso, random_word, rng, words_up_to};
use qsl_core::traces::{Alphabet, FiniteTrace, Lasso, Trace};
use qsl_core::{Property, Value, ValueDomain};

fn never_b() -> Property<f64> {
    discounted_never(Alphabet::new(["a", "b"]).unwrap(), "b").unwrap()
}

fn real(v: &Value<f64>) -> f64 {
    match v {
        Value::Real(x) => *x,
        other => panic!("not a real: {other:?}"),
    }
}

#[test]
fn s_delta_is_the_live_traces_below_k() {
    let p = never_b();
    for k in 1..=6 {
        let delta = 0.5f64.powi(k);
        let mut expected: Vec<Vec<usize>> =
            words_up_to(2, k as usize - 1).into_iter().filter(|w| !w.contains(&1)).collect();
        let mut got = s_delta(&p, delta, DEFAULT_MAX_DEPTH).unwrap();
        expected.sort();
        got.sort();
        assert_eq!(got, expected, "delta = {delta}");
    }
}

#[test]
fn synthesized_monitors_meet_error_bounds() {
    let start = Instant::now();
    let p = never_b();
    for delta in [0.5, 0.25, 0.125] {
        let m = synthesize(&p, delta, DEFAULT_MAX_DEPTH).unwrap();
        let s = s_delta(&p, delta, DEFAULT_MAX_DEPTH).unwrap();
        assert!(m.len() <= s.len() * 2 + 1);
        for c in m.classes.iter().filter(|c| !c.frozen) {
            assert!(s.contains(&c.representative));
        }
        let mut r = rng(7);
        for _ in 0..1000 {
            let len = r.gen_range(0..12);
            let w = random_word(&mut r, 2, len);
            let truth = real(&p.eval_finitary(&w).unwrap());
            let RunOutput::Finite(out) = monitor_run(&m, &Trace::Finite(FiniteTrace::new(w.clone()))).unwrap() else {
                panic!("finite run")
            };
            assert_eq!(out.len(), w.len() + 1);
            assert!((truth - real(out.last().unwrap())).abs() <= delta, "{w:?}");
        }
        for _ in 0..200 {
            let l = random_lasso(&mut r, 2, 6, 4);
            let truth = real(&p.eval_lasso(&l).unwrap());
            let RunOutput::Limit(v) = monitor_run(&m, &Trace::Lasso(l.clone())).unwrap() else { panic!("limit run") };
            assert!((truth - real(&v)).abs() <= delta, "{l:?}");
        }
        let mut triples = 0;
        while triples < 1000 {
            let (n1, n2, n3) = (r.gen_range(0..6), r.gen_range(0..6), r.gen_range(0..6));
            let s1 = random_word(&mut r, 2, n1);
            let s2 = random_word(&mut r, 2, n2);
            if m.class_of(&s1) != m.class_of(&s2) {
                continue;
            }
            triples += 1;
            let t = random_word(&mut r, 2, n3);
            let (a, b) = ([s1, t.clone()].concat(), [s2, t].concat());
            assert_eq!(m.class_of(&a), m.class_of(&b));
        }
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn every_lasso_has_a_determined_prefix() {
    let p = never_b();
    let mut r = rng(11);
    for delta in [0.5, 0.25, 0.125] {
        for _ in 0..50 {
            let l = random_lasso(&mut r, 2, 4, 4);
            let found = (0..40).any(|n| {
                let s = l.unroll(n).symbols().to_vec();
                let base = real(&p.eval_finitary(&s).unwrap());
                let mut rr = rng(n as u64);
                (0..100).all(|_| {
                    let len = rr.gen_range(0..10);
                    let w = [s.clone(), random_word(&mut rr, 2, len)].concat();
                    (real(&p.eval_finitary(&w).unwrap()) - base).abs() < delta
                })
            });
            assert!(found, "{l:?} at {delta}");
        }
    }
}

#[test]
fn ghost_rejects_min_response_at_first_grant() {
    let p: Property<f64> = min_response(8).unwrap();
    let mut g = GhostState::new(&p).unwrap();
    let h = g.add_hypothesis(HypKind::Ge, Value::Nat(qsl_core::ExtNat::Fin(2)));
    for (i, &a) in [RQ, TK, GR].iter().enumerate() {
        let rep = ghost_step(&mut g, a).unwrap();
        if i < 2 {
            assert!(rep.rejected.is_empty());
        }
    }
    assert_eq!(g.hypotheses()[h].status, Status::Rejected(3));
}

#[test]
fn ghost_keeps_avg_response_hypotheses_open() {
    let p: Property<f64> = avg_response();
    let mut g = GhostState::new(&p).unwrap();
    g.add_hypothesis(HypKind::Ge, Value::Real(1.0));
    g.add_hypothesis(HypKind::Le, Value::Real(1.0));
    let mut r = rng(5);
    for _ in 0..10_000 {
        let a = r.gen_range(0..p.alphabet().len());
        ghost_step(&mut g, a).unwrap();
    }
    assert!(g.hypotheses().iter().all(|h| h.status == Status::Open));
}

#[test]
fn rejected_hypotheses_are_never_satisfied_later() {
    let mut r = rng(13);
    let props: Vec<Property<f64>> = vec![min_response(8).unwrap(), max_response(8).unwrap()];
    for p in &props {
        let d: &ValueDomain = p.domain();
        let k = p.alphabet().len();
        let mut rejections = 0;
        for _ in 0..60 {
            let mut g = GhostState::new(p).unwrap();
            let v: Value<f64> = d.nat(r.gen_range(0..5));
            let ge = g.add_hypothesis(HypKind::Ge, v.clone());
            let le = g.add_hypothesis(HypKind::Le, v.clone());
            let len = r.gen_range(1..14);
            let w = random_word(&mut r, k, len);
            let mut upper_prev = g.upper();
            for &a in &w {
                ghost_step(&mut g, a).unwrap();
                assert!(d.leq(&g.upper(), &upper_prev));
                upper_prev = g.upper();
            }
            for (idx, kind) in [(ge, HypKind::Ge), (le, HypKind::Le)] {
                if let Status::Rejected(step) = g.hypotheses()[idx].status {
                    rejections += 1;
                    let prefix = &w[..step];
                    for _ in 0..100 {
                        let tail = random_lasso(&mut r, k, 4, 4);
                        let l = Lasso::new([prefix, tail.stem()].concat(), tail.cycle().to_vec()).unwrap();
                        let value = p.eval_lasso(&l).unwrap();
                        match kind {
                            HypKind::Ge => assert!(!d.geq(&value, &v), "{l:?}"),
                            HypKind::Le => assert!(!d.leq(&value, &v), "{l:?}"),
                        }
                    }
                }
            }
        }
        assert!(rejections > 0, "{}", p.name());
    }
}
