mod common;

use qsl_core::classify::{classify, replay, Check, Verdict};
use qsl_core::props::builtins::{avg_response, discounted_never, gf_a, max_response, min_response};
use qsl_core::props::fixtures::fixture;
use qsl_core::traces::{Alphabet, Lasso};
use qsl_core::{Property, Value};

fn holds(v: Option<Verdict>) -> bool {
    v.is_some_and(|v| v.holds_so_far())
}

#[test]
fn golden_classification() {
    let ab = Alphabet::new(["a", "b"]).unwrap();
    let table: Vec<(Property<f64>, [Check; 2])> = vec![
        (min_response(8).unwrap(), [Check::Safe, Check::Colive]),
        (max_response(8).unwrap(), [Check::Cosafe, Check::Live]),
        (avg_response(), [Check::Live, Check::Colive]),
        (discounted_never(ab, "b").unwrap(), [Check::Safe, Check::Cosafe]),
        (gf_a(), [Check::Live, Check::Colive]),
    ];
    for (p, checks) in table {
        let r = classify(&p, 6).unwrap();
        for c in checks {
            assert!(holds(r.verdict(c)), "{} {c}: {:?}", p.name(), r.verdict(c));
        }
    }
    let r = classify(&min_response::<f64>(8).unwrap(), 6).unwrap();
    assert_eq!(r.verdict(Check::Safe), Some(Verdict::Yes));
    assert_eq!(r.verdict(Check::Live), Some(Verdict::No));
    let r = classify(&avg_response::<f64>(), 6).unwrap();
    assert_eq!(r.verdict(Check::Safe), Some(Verdict::No));
    assert_eq!(r.verdict(Check::Cosafe), Some(Verdict::No));
}

#[test]
fn separating_fixtures() {
    let p: Property<f64> = fixture("vsafe_not_safe").unwrap();
    let r = classify(&p, 6).unwrap();
    assert!(holds(r.verdict(Check::VerdictSafe)));
    assert_eq!(r.verdict(Check::Safe), Some(Verdict::No));
    assert!(replay(&p, Check::Safe, r.witness(Check::Safe).unwrap()).unwrap());

    let p: Property<f64> = fixture("multilive_not_live").unwrap();
    let r = classify(&p, 6).unwrap();
    assert!(holds(r.verdict(Check::Multilive)));
    assert_eq!(r.verdict(Check::Live), Some(Verdict::No));

    let p: Property<f64> = fixture("live_not_verdictlive").unwrap();
    let r = classify(&p, 6).unwrap();
    assert!(holds(r.verdict(Check::Live)));
    assert_eq!(r.verdict(Check::VerdictLive), Some(Verdict::No));
    let w = r.witness(Check::VerdictLive).unwrap();
    assert_eq!(w.lasso, Some(Lasso::new(vec![0, 1], vec![0]).unwrap()));
    assert_eq!(w.bound, Some(Value::Real(0.5)));
    assert!(replay(&p, Check::VerdictLive, w).unwrap());
}

#[test]
fn witnesses_of_negative_verdicts_replay() {
    for p in common::corpus() {
        let r = classify(&p, 5).unwrap();
        for e in &r.entries {
            if let (Verdict::No, Some(w)) = (e.verdict, &e.witness) {
                assert!(replay(&p, e.check, w).unwrap(), "{} {}", p.name(), e.check);
            }
        }
    }
}

#[test]
fn classification_is_deterministic() {
    for p in common::corpus() {
        let a = format!("{:?}", classify(&p, 4).unwrap());
        let b = format!("{:?}", classify(&p, 4).unwrap());
        assert_eq!(a, b);
    }
}
