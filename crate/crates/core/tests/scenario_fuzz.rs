//! Mutated scenario files must produce structured errors, never panics.

use fracap::scenario::{parse_scenario, parse_scenario_str};
use fracap::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn seeds() -> Vec<Value> {
    vec![
        json!({"domain": {"kind": "interval", "bounds": [0, 1]}, "resolution": 8, "s": 0.5,
               "q": 2, "p": 2, "task": "capacity", "payload": {"set": {"cells": [1, 2]}}}),
        json!({"domain": {"kind": "rectangle", "lower": [0, 0], "upper": [1, 1],
                          "holes": [{"lower": [0.25, 0.25], "upper": [0.5, 0.5]}]},
               "resolution": [4, 4], "s": 0.3, "q": "2 + x0", "p": {"expr": "2 + 0.5 * dist"},
               "task": "norm", "payload": {"function": {"expr": "x0 * x1"}}}),
        json!({"domain": {"kind": "interval", "bounds": [0, 1]}, "resolution": 4, "s": 0.5,
               "q": {"table": [2, 2.5, 3, 2]}, "p": 2, "task": "axioms", "seed": 3,
               "payload": {"sets": [{"cells": "all"}], "random_sets": 2}}),
        json!({"domain": {"kind": "interval", "bounds": [0, 1]}, "resolution": 6, "s": 0.5,
               "q": 2, "p": 2, "task": "removability",
               "payload": {"removed": {"cells": [3]}, "tests": [{"cells": [0]}], "tolerance": 1e-6}}),
        json!({"domain": {"kind": "interval", "bounds": [0, 1]}, "resolution": 4, "s": 0.5,
               "q": 2, "p": 2, "task": "certificate",
               "payload": {"sequence": [{"constant": 0}, {"values": {"cells": [0, 0, 0, 0], "boundary": [0, 0]}}]}}),
        json!({"domain": {"kind": "interval", "bounds": [0, 1]}, "resolution": 4, "s": 0.5,
               "q": 2, "p": 2, "task": "boundary", "payload": {"resolutions": [4, 8, 12]}}),
    ]
}

fn random_leaf(rng: &mut ChaCha8Rng) -> Value {
    match rng.gen_range(0..10) {
        0 => Value::Null,
        1 => json!(rng.gen_bool(0.5)),
        2 => json!(rng.gen_range(-5i64..5)),
        3 => json!(rng.gen_range(-2.0..4.0)),
        4 => json!(u64::MAX),
        5 => json!(1e308),
        6 => json!("all"),
        7 => json!("x + y"),
        8 => json!([rng.gen_range(0..20), 1]),
        _ => json!({}),
    }
}

fn mutate_value(v: &mut Value, rng: &mut ChaCha8Rng) {
    match v {
        Value::Object(map) if !map.is_empty() && rng.gen_bool(0.7) => {
            let keys: Vec<String> = map.keys().cloned().collect();
            let key = keys.choose(rng).unwrap().clone();
            match rng.gen_range(0..4) {
                0 => {
                    map.remove(&key);
                }
                1 => {
                    map.insert(key, random_leaf(rng));
                }
                2 => {
                    map.insert(format!("{key}_x"), random_leaf(rng));
                }
                _ => mutate_value(map.get_mut(&key).unwrap(), rng),
            }
        }
        Value::Array(items) if !items.is_empty() && rng.gen_bool(0.7) => {
            let k = rng.gen_range(0..items.len());
            if rng.gen_bool(0.3) {
                items.remove(k);
            } else if rng.gen_bool(0.3) {
                items.push(random_leaf(rng));
            } else {
                mutate_value(&mut items[k], rng);
            }
        }
        _ => *v = random_leaf(rng),
    }
}

fn mutate_text(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut bytes = text.as_bytes().to_vec();
    for _ in 0..rng.gen_range(1..4) {
        let k = rng.gen_range(0..bytes.len());
        match rng.gen_range(0..3) {
            0 => bytes[k] = b"{}[]\",:0123456789.-ex "[rng.gen_range(0..22)],
            1 => {
                bytes.remove(k);
            }
            _ => bytes.insert(k, b"0123456789-"[rng.gen_range(0..11)]),
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

#[test]
fn thousand_mutations_never_panic() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let seeds = seeds();
    for s in &seeds {
        parse_scenario_str(&s.to_string())
            .unwrap_or_else(|e| panic!("seed scenario invalid: {e}\n{s}"));
    }
    let mut rejected = 0;
    for k in 0..1000 {
        let mut v = seeds[k % seeds.len()].clone();
        let text = if k % 3 == 0 {
            mutate_text(&v.to_string(), &mut rng)
        } else {
            for _ in 0..rng.gen_range(1..4) {
                mutate_value(&mut v, &mut rng);
            }
            v.to_string()
        };
        let path = dir.path().join(format!("m{k}.json"));
        std::fs::write(&path, &text).unwrap();
        match parse_scenario(&path) {
            Ok(_) => {}
            Err(Error::Validation(errors)) => {
                assert!(!errors.is_empty());
                rejected += 1;
            }
            Err(other) => panic!("unexpected error kind for {text}: {other}"),
        }
    }
    assert!(rejected > 500, "only {rejected} mutations rejected");
}
