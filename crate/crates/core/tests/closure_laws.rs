mod common;

use common::{all_lassos, brute_closure, brute_predictions, brute_value, same_set};
use qsl_core::classify::{classify, Check, Verdict};
use qsl_core::closure::{bottom_value, cosafety_closure, prediction_set, safety_closure, top_value};
use qsl_core::props::Property;
use qsl_core::sample::{random_lasso, random_property, random_word, rng};

fn machines() -> Vec<Property<f64>> {
    let mut r = rng(2024);
    (0..20).map(|i| random_property(&mut r, i)).collect()
}

#[test]
fn lasso_evaluation_matches_unrolling() {
    let mut r = rng(11);
    for p in machines() {
        let k = p.alphabet().len();
        for _ in 0..100 {
            let l = random_lasso(&mut r, k, 6, 6);
            assert_eq!(p.eval_lasso(&l).unwrap(), brute_value(&p, &[], &l), "{} on {l:?}", p.name());
        }
    }
}

#[test]
fn closure_laws_on_random_machines() {
    let mut r = rng(12);
    for p in machines() {
        let d = p.domain().clone();
        let k = p.alphabet().len();
        let up = safety_closure(&p).unwrap();
        let up2 = safety_closure(&up).unwrap();
        let lo = cosafety_closure(&p).unwrap();
        let lo2 = cosafety_closure(&lo).unwrap();
        let report = classify(&p, 6).unwrap();
        let mut all_equal_up = true;
        let mut all_equal_lo = true;
        for _ in 0..100 {
            let l = random_lasso(&mut r, k, 5, 5);
            let x = p.eval_lasso(&l).unwrap();
            let (u, u2) = (up.eval_lasso(&l).unwrap(), up2.eval_lasso(&l).unwrap());
            let (w, w2) = (lo.eval_lasso(&l).unwrap(), lo2.eval_lasso(&l).unwrap());
            assert!(d.geq(&u, &x), "{}: closure below value on {l:?}", p.name());
            assert!(d.leq(&w, &x), "{}: co-closure above value on {l:?}", p.name());
            assert!(d.eq_values(&u, &u2), "{}: closure not idempotent on {l:?}", p.name());
            assert!(d.eq_values(&w, &w2), "{}: co-closure not idempotent on {l:?}", p.name());
            all_equal_up &= d.eq_values(&u, &x);
            all_equal_lo &= d.eq_values(&w, &x);
        }
        // safe iff Φ = Φ*: a No comes with a lasso separating them, a Yes
        // means no sampled lasso does
        match report.verdict(Check::Safe).unwrap() {
            Verdict::Yes => assert!(all_equal_up, "{} classified safe", p.name()),
            _ => {
                let l = report.witness(Check::Safe).unwrap().lasso.clone().unwrap();
                assert!(!d.eq_values(&p.eval_lasso(&l).unwrap(), &up.eval_lasso(&l).unwrap()));
            }
        }
        match report.verdict(Check::Cosafe).unwrap() {
            Verdict::Yes => assert!(all_equal_lo, "{} classified co-safe", p.name()),
            _ => {
                let l = report.witness(Check::Cosafe).unwrap().lasso.clone().unwrap();
                assert!(!d.eq_values(&p.eval_lasso(&l).unwrap(), &lo.eval_lasso(&l).unwrap()));
            }
        }
        // the closures themselves are safe (resp. co-safe)
        assert_eq!(classify(&up, 6).unwrap().verdict(Check::Safe), Some(Verdict::Yes));
        assert_eq!(classify(&lo, 6).unwrap().verdict(Check::Cosafe), Some(Verdict::Yes));
    }
}

#[test]
fn closure_values_match_brute_force() {
    let mut r = rng(13);
    for p in machines() {
        let k = p.alphabet().len();
        let conts = all_lassos(k, 5, 5);
        let d = p.domain();
        for len in 0..4 {
            let s = random_word(&mut r, k, len);
            let ps = brute_predictions(&p, &s, &conts);
            let lib = prediction_set(&p, &s).unwrap();
            assert!(same_set(d, lib.values().unwrap(), &ps), "{}: prediction set after {s:?}", p.name());
            assert!(d.eq_values(&top_value(&p, &s).unwrap(), &d.join_all(ps.iter())), "{} top", p.name());
            assert!(d.eq_values(&bottom_value(&p, &s).unwrap(), &d.meet_all(ps.iter())), "{} bottom", p.name());
        }
    }
}

#[test]
fn closure_lasso_values_match_brute_force() {
    let mut r = rng(14);
    for p in machines().into_iter().take(8) {
        let k = p.alphabet().len();
        let conts = all_lassos(k, 3, 3);
        let up = safety_closure(&p).unwrap();
        let lo = cosafety_closure(&p).unwrap();
        let d = p.domain();
        for _ in 0..5 {
            let l = random_lasso(&mut r, k, 3, 3);
            assert!(d.eq_values(&up.eval_lasso(&l).unwrap(), &brute_closure(&p, &l, &conts, true)), "{}", p.name());
            assert!(d.eq_values(&lo.eval_lasso(&l).unwrap(), &brute_closure(&p, &l, &conts, false)), "{}", p.name());
        }
    }
}
