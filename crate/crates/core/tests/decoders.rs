//! Replays the fuzz corpus through every decoder and mutates it with
//! proptest, checking the same round-trip properties as the fuzz targets.

use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;

use knice::cache::{seal, unseal};
use knice::lattice::{is_k_nice, NiceSet};
use knice::lp::gamma::parse_gamma_cache;
use knice::lp::{DualCertificate, GammaCache};
use knice::numtheory::{density, parse_density_cache, DensityTable};
use knice::rational::{parse_fraction, to_decimal, to_fraction_string};
use knice::search::SearchOutcome;

fn nice_set_json(s: &str) -> bool {
    let Ok(q) = NiceSet::from_json(s) else {
        return false;
    };
    assert!(is_k_nice(q.points(), q.k()));
    assert_eq!(NiceSet::from_json(&q.to_json()).unwrap(), q);
    true
}

fn nice_set_text(data: &[u8]) -> bool {
    let Some((&k, rest)) = data.split_first() else {
        return false;
    };
    let Ok(s) = std::str::from_utf8(rest) else {
        return false;
    };
    let Ok(q) = NiceSet::from_text(s, u64::from(k)) else {
        return false;
    };
    assert!(is_k_nice(q.points(), q.k()));
    assert_eq!(NiceSet::from_text(&q.to_text(), q.k()).unwrap(), q);
    true
}

fn density_cache(s: &str) -> bool {
    let Ok(rows) = parse_density_cache(s) else {
        return false;
    };
    for r in rows.iter().take(64) {
        assert_eq!(*r, density(r.ell));
    }
    assert_eq!(DensityTable::from_cache_text(s).unwrap().len(), rows.len());
    true
}

fn gamma_cache(s: &str) -> bool {
    if parse_gamma_cache(s).is_err() {
        return false;
    }
    let Ok(c) = GammaCache::from_cache_text(s, 24, true) else {
        return false;
    };
    let again = GammaCache::from_cache_text(&c.to_cache_text(), 24, true).unwrap();
    assert_eq!(again.len(), c.len());
    true
}

fn outcome_json(s: &str) -> bool {
    let Ok(o) = SearchOutcome::from_json(s) else {
        return false;
    };
    if let Some(w) = &o.witness {
        assert!(is_k_nice(w.points(), o.k));
        assert_eq!(w.len() as u64, o.max_size);
    }
    assert_eq!(SearchOutcome::from_json(&o.to_json()).unwrap(), o);
    true
}

fn fraction(s: &str) -> bool {
    let Ok(q) = parse_fraction(s) else {
        return false;
    };
    assert_eq!(parse_fraction(&to_fraction_string(&q)).unwrap(), q);
    let _ = to_decimal(&q, 6);
    true
}

fn certificate_json(s: &str) -> bool {
    let Ok(c) = DualCertificate::from_json(s) else {
        return false;
    };
    c.verify().unwrap();
    assert_eq!(DualCertificate::from_json(&c.to_json()).unwrap(), c);
    true
}

fn sealed_cache(s: &str) -> bool {
    let (tag, body) = s.split_once('\n').unwrap_or((s, ""));
    let Ok(recs) = unseal(tag, body) else {
        return false;
    };
    let recs: Vec<&str> = recs.into_iter().map(|(_, r)| r).collect();
    let resealed = seal(tag, &recs);
    let again: Vec<&str> = unseal(tag, &resealed)
        .unwrap()
        .into_iter()
        .map(|(_, r)| r)
        .collect();
    assert_eq!(again, recs);
    true
}

/// Runs one target on raw bytes; returns whether the input was accepted.
fn run(target: &str, data: &[u8]) -> bool {
    if target == "nice_set_text" {
        return nice_set_text(data);
    }
    let Ok(s) = std::str::from_utf8(data) else {
        return false;
    };
    match target {
        "nice_set_json" => nice_set_json(s),
        "density_cache" => density_cache(s),
        "gamma_cache" => gamma_cache(s),
        "outcome_json" => outcome_json(s),
        "fraction" => fraction(s),
        "certificate_json" => certificate_json(s),
        "sealed_cache" => sealed_cache(s),
        other => panic!("unknown target {other}"),
    }
}

const TARGETS: [&str; 8] = [
    "nice_set_json",
    "nice_set_text",
    "density_cache",
    "gamma_cache",
    "outcome_json",
    "fraction",
    "certificate_json",
    "sealed_cache",
];

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus")
}

fn seeds() -> Vec<(&'static str, String, Vec<u8>)> {
    let mut out = Vec::new();
    for t in TARGETS {
        let mut files: Vec<_> = fs::read_dir(corpus_dir().join(t))
            .unwrap_or_else(|e| panic!("corpus for {t}: {e}"))
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        for f in files {
            let name = f.file_name().unwrap().to_string_lossy().into_owned();
            out.push((t, name, fs::read(&f).unwrap()));
        }
    }
    out
}

#[test]
fn every_target_has_seeds() {
    let s = seeds();
    for t in TARGETS {
        assert!(s.iter().any(|(st, _, _)| *st == t), "no seeds for {t}");
    }
}

#[test]
fn seeds_decode_as_expected() {
    let rejected = [
        "antipodal",
        "zero_den",
        "huge",
        "size_mismatch",
        "bad_footer",
    ];
    for (t, name, data) in seeds() {
        let accepted = run(t, &data);
        assert_eq!(accepted, !rejected.contains(&name.as_str()), "{t}/{name}");
    }
}

#[derive(Clone, Debug)]
enum Edit {
    Flip(usize, u8),
    Cut(usize),
    Insert(usize, u8),
    Dup(usize, usize),
}

fn apply(data: &[u8], edits: &[Edit]) -> Vec<u8> {
    let mut d = data.to_vec();
    for e in edits {
        let n = d.len().max(1);
        match *e {
            Edit::Flip(i, b) => {
                if !d.is_empty() {
                    d[i % n] ^= b;
                }
            }
            Edit::Cut(i) => d.truncate(i % n),
            Edit::Insert(i, b) => d.insert(i % (d.len() + 1), b),
            Edit::Dup(i, len) => {
                let start = i % n;
                let end = (start + len).min(d.len());
                let chunk = d[start.min(d.len())..end].to_vec();
                d.splice(end..end, chunk);
            }
        }
    }
    d
}

fn edit() -> impl Strategy<Value = Edit> {
    prop_oneof![
        (any::<usize>(), 1u8..=255).prop_map(|(i, b)| Edit::Flip(i, b)),
        any::<usize>().prop_map(Edit::Cut),
        (
            any::<usize>(),
            prop::sample::select(b"0123456789-/,[]{}: \n#\"ek".to_vec())
        )
            .prop_map(|(i, b)| Edit::Insert(i, b)),
        (any::<usize>(), 1usize..16).prop_map(|(i, l)| Edit::Dup(i, l)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn mutated_seeds_never_panic(pick in any::<prop::sample::Index>(), edits in prop::collection::vec(edit(), 1..6)) {
        let all = seeds();
        let (t, _, data) = &all[pick.index(all.len())];
        run(t, &apply(data, &edits));
    }

    #[test]
    fn arbitrary_bytes_never_panic(data in prop::collection::vec(any::<u8>(), 0..128)) {
        for t in TARGETS {
            run(t, &data);
        }
    }
}
