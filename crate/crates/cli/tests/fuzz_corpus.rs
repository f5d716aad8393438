//! Replays the checked-in fuzz corpus, plus seeded byte mutations of it,
//! through the same properties the fuzz targets assert.

use std::fs;
use std::path::PathBuf;

use nestprox::rng::seeded;
use nestprox::SolveTrace;
use nestprox_cli::spec::{parse_instance_arg, parse_oracle, parse_run_spec};
use rand::Rng;

const MUTATIONS_PER_SEED: usize = 300;

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut seeds: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read(e.unwrap().path()).unwrap())
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "empty corpus for {target}");
    seeds
}

fn mutate(seed: &[u8], rng: &mut impl Rng) -> Vec<u8> {
    let mut out = seed.to_vec();
    for _ in 0..rng.random_range(1..4) {
        let op = rng.random_range(0..3);
        let at = if out.is_empty() {
            0
        } else {
            rng.random_range(0..out.len())
        };
        match op {
            0 if !out.is_empty() => out[at] = rng.random(),
            1 if !out.is_empty() => {
                out.remove(at);
            }
            _ => {
                let b = *b"0123456789.,:-=e[]{}\"\n".get(rng.random_range(0..22)).unwrap();
                out.insert(at, b);
            }
        }
    }
    out
}

fn inputs(target: &str, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = seeded(seed);
    let seeds = corpus(target);
    let mut all = seeds.clone();
    for s in &seeds {
        for _ in 0..MUTATIONS_PER_SEED {
            all.push(mutate(s, &mut rng));
        }
    }
    all
}

#[test]
fn run_spec_corpus() {
    let mut accepted = 0;
    for data in inputs("parse_run_spec", 1) {
        let Ok(text) = std::str::from_utf8(&data) else { continue };
        if let Ok(spec) = parse_run_spec(text) {
            accepted += 1;
            assert_eq!(parse_run_spec(&spec.to_json()).unwrap(), spec);
        }
    }
    assert!(accepted >= 4);
}

#[test]
fn instance_arg_corpus() {
    for data in inputs("parse_instance_arg", 2) {
        let Ok(text) = std::str::from_utf8(&data) else { continue };
        if let Ok(spec) = parse_instance_arg(text) {
            assert!(parse_instance_arg(spec.name()).is_ok());
        }
    }
}

#[test]
fn oracle_corpus() {
    for data in inputs("parse_oracle", 3) {
        if let Ok(u) = parse_oracle(&data) {
            assert!(u.is_finite());
        }
    }
}

#[test]
fn trace_csv_corpus() {
    let mut accepted = 0;
    for data in inputs("parse_trace_csv", 4) {
        let Ok(trace) = SolveTrace::read_csv(data.as_slice()) else {
            continue;
        };
        accepted += 1;
        let text = trace.to_csv_string();
        let again = SolveTrace::from_csv_str(&text).unwrap();
        assert_eq!(again.to_csv_string(), text);
    }
    assert!(accepted >= 2);
}
