mod common;

use common::*;
use offload_weaver::verify::OffloadPattern;

#[test]
fn golden_corpus_is_large_enough() {
    assert!(golden_cases().len() >= 6);
}

#[test]
fn rewrites_match_golden_files() {
    let db = golden_db();
    for case in golden_cases() {
        let got = rewrite_golden(&db, &read(&case.input), &case.pattern);
        let want = read(&case.expected);
        assert!(got == want, "{} differs:\n{got}", case.expected.display());
    }
}

#[test]
fn empty_pattern_reproduces_input() {
    let db = golden_db();
    for case in golden_cases() {
        let input = read(&case.input);
        assert_eq!(rewrite_golden(&db, &input, &OffloadPattern::baseline()), input);
    }
}

#[test]
fn prelude_appears_once_for_two_blocks() {
    let case = golden_cases().into_iter().find(|c| c.pattern.len() == 2 && c.input.ends_with("two_calls.c")).unwrap();
    let out = read(&case.expected);
    assert_eq!(out.matches("#include \"gpu_fft.h\"").count(), 1);
    assert_eq!(out.matches("gpu_fft_forward(").count(), 2);
}
