mod common;

use common::*;
use offload_weaver::frontend::parse_unit;
use offload_weaver::pattern_db::PatternDb;
use offload_weaver::similarity::{
    characteristic_vector, find_similar_blocks, similarity, CharVector, Threshold,
};
use proptest::prelude::*;
use std::collections::BTreeSet;

/// Function definitions lifted from the corpus, used as building blocks.
fn snippets() -> Vec<String> {
    let mut out = Vec::new();
    for (_, text) in corpus() {
        let m = parse_unit(&text).unwrap();
        for f in &m.functions {
            // Self-contained pieces only: prototypes and typedefs are not carried along.
            let piece = text[f.span.start..f.span.end].to_string();
            if parse_unit(&piece).is_ok_and(|p| p.diagnostics.is_empty() && p.functions.len() == 1) {
                out.push(piece);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn program() -> impl Strategy<Value = String> {
    let pieces = snippets();
    let trivia = prop_oneof![
        Just("\n".to_string()),
        Just("\n\n".to_string()),
        Just("\n/* between */\n".to_string()),
        Just("\n// line comment\n".to_string()),
        Just("\n#include <stdio.h>\n".to_string()),
        Just("\r\n".to_string()),
    ];
    prop::collection::vec((prop::sample::select(pieces), trivia), 0..6)
        .prop_map(|parts| parts.into_iter().map(|(p, t)| format!("{t}{p}")).collect::<String>())
}

fn vector() -> impl Strategy<Value = CharVector> {
    prop::array::uniform15(0u32..50).prop_map(|counts| CharVector { counts })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn parse_is_deterministic_and_round_trips(src in program()) {
        prop_assert_eq!(check_frontend("generated", &src), Ok(()));
    }

    #[test]
    fn renaming_preserves_vectors(src in prop::sample::select(snippets())) {
        let a = parse_unit(&src).unwrap();
        let b = parse_unit(&rename_and_comment(&src)).unwrap();
        prop_assert_eq!(
            characteristic_vector(&a.functions[0].body),
            characteristic_vector(&b.functions[0].body)
        );
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(u in vector(), v in vector()) {
        let a = similarity(&u, &v);
        let b = similarity(&v, &u);
        prop_assert_eq!(a, b);
        if let Ok(s) = a {
            prop_assert!((0.0..=1.0).contains(&s));
        }
        if !u.is_zero() {
            prop_assert_eq!(similarity(&u, &u), Ok(1.0));
        }
    }

    #[test]
    fn scaled_vectors_score_one(u in vector(), k in 1u32..20) {
        prop_assume!(!u.is_zero());
        let scaled = CharVector { counts: u.counts.map(|c| c * k) };
        prop_assert_eq!(similarity(&u, &scaled), Ok(1.0));
    }

    #[test]
    fn hits_shrink_as_threshold_rises(src in program(), lo in 0.05f64..1.0, hi in 0.05f64..1.0) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let db = golden_db();
        let m = parse_unit(&src).unwrap();
        let at = |t: f64| -> BTreeSet<usize> {
            find_similar_blocks(&m, &db, Threshold::new(t).unwrap()).iter().map(|h| h.candidate.0).collect()
        };
        prop_assert!(at(hi).is_subset(&at(lo)));
        for h in find_similar_blocks(&m, &db, Threshold::new(lo).unwrap()) {
            prop_assert!(h.score >= lo);
        }
    }

    #[test]
    fn library_calls_monotone_in_list(src in program(), names in prop::collection::btree_set("[a-z]{1,6}", 0..6), extra in prop::collection::btree_set("[a-z]{1,6}", 0..6)) {
        let m = parse_unit(&src).unwrap();
        let callees: BTreeSet<String> = m.call_sites.iter().map(|c| c.callee_name.clone()).collect();
        let small: BTreeSet<String> = names.iter().cloned().chain(callees.iter().take(1).cloned()).collect();
        let big: BTreeSet<String> = small.iter().cloned().chain(extra).chain(callees.iter().cloned()).collect();
        let a: Vec<_> = m.detect_library_calls(&small).into_iter().map(|c| c.id).collect();
        let b: Vec<_> = m.detect_library_calls(&big).into_iter().map(|c| c.id).collect();
        prop_assert!(a.iter().all(|id| b.contains(id)));
        prop_assert!(m.detect_library_calls(&BTreeSet::new()).is_empty());
    }

    #[test]
    fn db_reload_is_identity(mask in 0u8..8, extra in prop::collection::btree_set("[a-z_]{1,8}", 0..4)) {
        let base = golden_db();
        let records: Vec<_> = base.records().iter().enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, r)| r.clone())
            .collect();
        let db = PatternDb::from_records(records, extra).unwrap();
        let again = PatternDb::from_json(&db.to_json()).unwrap();
        prop_assert_eq!(again.records(), db.records());
        prop_assert_eq!(again.external_list(), db.external_list());
        prop_assert_eq!(again.to_json(), db.to_json());
    }
}

#[test]
fn snippet_pool_is_varied() {
    assert!(snippets().len() >= 10, "{}", snippets().len());
}
