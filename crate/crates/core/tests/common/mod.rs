#![allow(dead_code)]

use offload_weaver::frontend::{parse_unit, SourceModel, TopItemKind};
use offload_weaver::loop_ga::Chromosome;
use offload_weaver::pattern_db::PatternDb;
use offload_weaver::replace::{build_candidates, confirm_all, rewrite, AssumeYes};
use offload_weaver::similarity::{find_similar_blocks, Threshold};
use offload_weaver::verify::{CostModel, Executor, ExecutorError, OffloadPattern, SimulatedExecutor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn read(path: impl AsRef<Path>) -> String {
    let path = path.as_ref();
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn apps_db() -> PatternDb {
    PatternDb::load(fixtures().join("apps/db.json")).unwrap()
}

pub fn golden_db() -> PatternDb {
    PatternDb::load(fixtures().join("golden/db.json")).unwrap()
}

/// Sorted `(file name, text)` for every corpus file.
pub fn corpus() -> Vec<(String, String)> {
    let mut files: Vec<_> = std::fs::read_dir(fixtures().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "c"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), read(&p)))
        .collect()
}

/// True if `text` holds only whitespace, comments and preprocessor lines.
/// Written independently of the crate's lexer.
pub fn is_trivia(text: &str) -> bool {
    let b = text.as_bytes();
    let mut i = 0;
    let mut line_start = true;
    while i < b.len() {
        match b[i] {
            b'\n' => {
                line_start = true;
                i += 1;
            }
            b' ' | b'\t' | b'\r' | b'\x0c' | b'\x0b' => i += 1,
            b'/' if b.get(i + 1) == Some(&b'/') => {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
            }
            b'/' if b.get(i + 1) == Some(&b'*') => match text[i + 2..].find("*/") {
                Some(k) => {
                    i += k + 4;
                    line_start = false;
                }
                None => return false,
            },
            b'#' if line_start => {
                // Through end of line, honoring backslash continuations.
                while i < b.len() && !(b[i] == b'\n' && b[i - 1] != b'\\') {
                    i += 1;
                }
            }
            _ => return false,
        }
    }
    true
}

/// Round-trip, determinism and span invariants for one unit.
pub fn check_frontend(name: &str, text: &str) -> Result<(), String> {
    let fail = |m: String| Err(format!("{name}: {m}"));
    let m1 = parse_unit(text).map_err(|e| format!("{name}: parse failed: {e}"))?;
    let m2 = parse_unit(text).unwrap();
    if m1 != m2 {
        return fail("two parses differ".into());
    }
    let mut rebuilt = String::new();
    let mut last_end = 0;
    for item in &m1.items {
        if item.span.start < last_end || item.span.end > text.len() || item.span.is_empty() {
            return fail(format!("item span {:?} out of order or bounds", item.span));
        }
        let gap = &text[last_end..item.span.start];
        if !is_trivia(gap) {
            return fail(format!("gap before {:?} is not trivia: {gap:?}", item.span));
        }
        let body = &text[item.span.start..item.span.end];
        let ok = match item.kind {
            TopItemKind::Function(_) => body.ends_with('}'),
            TopItemKind::Struct(_) | TopItemKind::Declaration => body.ends_with(';'),
            TopItemKind::Directive => body.starts_with('#'),
            TopItemKind::Skipped => body.ends_with(';') || body.ends_with('}'),
        };
        if !ok {
            return fail(format!("{:?} item has unexpected text {body:?}", item.kind));
        }
        rebuilt.push_str(gap);
        rebuilt.push_str(body);
        last_end = item.span.end;
    }
    if !is_trivia(&text[last_end..]) {
        return fail("trailing text is not trivia".into());
    }
    rebuilt.push_str(&text[last_end..]);
    if rebuilt != text {
        return fail("items plus gaps do not reproduce the text".into());
    }
    let skipped = m1.items.iter().filter(|i| i.kind == TopItemKind::Skipped).count();
    if skipped != m1.diagnostics.len() {
        return fail(format!("{skipped} skipped items but {} diagnostics", m1.diagnostics.len()));
    }
    for c in &m1.call_sites {
        if !text[c.span.start..c.span.end].starts_with(&c.callee_name) {
            return fail(format!("call span does not start with `{}`", c.callee_name));
        }
        if !c.statement_span.contains(c.span) {
            return fail(format!("statement span of `{}` does not contain its call", c.callee_name));
        }
    }
    for l in &m1.loops {
        let parent = m1
            .loops
            .iter()
            .filter(|o| o.loop_id != l.loop_id && o.span.contains(l.span))
            .max_by_key(|o| o.span.start);
        let expected = parent.map_or(0, |p| p.nesting_depth + 1);
        if l.nesting_depth != expected {
            return fail(format!("loop {} depth {} expected {expected}", l.loop_id, l.nesting_depth));
        }
    }
    Ok(())
}

pub struct GoldenCase {
    pub input: PathBuf,
    pub pattern: OffloadPattern,
    pub expected: PathBuf,
}

/// `<name>.<pattern-id>.expected.c` next to `<name>.c`.
pub fn golden_cases() -> Vec<GoldenCase> {
    let dir = fixtures().join("golden");
    let mut cases: Vec<GoldenCase> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter_map(|p| {
            let name = p.file_name()?.to_str()?.strip_suffix(".expected.c")?.to_string();
            let (stem, pattern) = name.split_once('.')?;
            Some(GoldenCase {
                input: dir.join(format!("{stem}.c")),
                pattern: OffloadPattern::parse_id(pattern)?,
                expected: p,
            })
        })
        .collect();
    cases.sort_by(|a, b| a.expected.cmp(&b.expected));
    cases
}

/// Rewrite a golden input with every candidate approved.
pub fn rewrite_golden(db: &PatternDb, input: &str, pattern: &OffloadPattern) -> String {
    let model = parse_unit(input).unwrap();
    let hits = find_similar_blocks(&model, db, Threshold::default());
    let mut cands = build_candidates(&model, db, &hits);
    confirm_all(&mut cands, &mut AssumeYes);
    rewrite(&model, db, &cands, pattern).unwrap()
}

const C_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else", "enum",
    "extern", "float", "for", "goto", "if", "int", "long", "register", "return", "short", "signed",
    "sizeof", "static", "struct", "switch", "typedef", "union", "unsigned", "void", "volatile",
    "while", "size_t",
];

/// Clone of `src` with every non-keyword identifier renamed and a comment
/// after every statement terminator.
pub fn rename_and_comment(src: &str) -> String {
    let mut out = String::from("/* cloned and edited */\n");
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if C_KEYWORDS.contains(&word.as_str()) {
                out.push_str(&word);
            } else {
                out.push_str("renamed_");
                out.push_str(&word);
            }
            continue;
        }
        if c.is_ascii_digit() {
            // Keep numeric literals (including exponents) intact.
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '.') {
                out.push(chars[i]);
                i += 1;
            }
            continue;
        }
        out.push(c);
        if c == ';' {
            out.push_str(" /* step */");
        }
        i += 1;
    }
    out
}

/// Counts measurements while delegating to a simulated executor.
pub struct CountingExecutor {
    pub inner: SimulatedExecutor,
    pub calls: usize,
}

impl Executor for CountingExecutor {
    fn tag(&self) -> String {
        self.inner.tag()
    }

    fn measure(&mut self, p: &OffloadPattern, reps: usize) -> Result<Vec<f64>, ExecutorError> {
        self.calls += 1;
        self.inner.measure(p, reps)
    }
}

pub fn all_patterns(n: usize) -> Vec<OffloadPattern> {
    (0u32..1 << n)
        .map(|mask| OffloadPattern::from_ids((0..n).filter(|b| mask >> b & 1 == 1)))
        .collect()
}

/// Exhaustive argmin with the same tie rule as the search: fewer blocks,
/// then lexicographically smaller ids.
pub fn brute_force_best(table: &BTreeMap<String, f64>, n: usize) -> OffloadPattern {
    all_patterns(n)
        .into_iter()
        .min_by(|a, b| {
            table[&a.id()].total_cmp(&table[&b.id()]).then_with(|| {
                let ka = (a.len(), a.selected().iter().copied().collect::<Vec<_>>());
                let kb = (b.len(), b.selected().iter().copied().collect::<Vec<_>>());
                ka.cmp(&kb)
            })
        })
        .unwrap()
}

/// A random full table over `n` blocks whose optimum lies among the
/// patterns the search measures (baseline, singles, union of winners).
pub fn generated_table(seed: u64, n: usize) -> BTreeMap<String, f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: f64 = rng.gen_range(50.0..150.0);
    let mut table = BTreeMap::new();
    table.insert("base".to_string(), base);
    let mut winners = Vec::new();
    for b in 0..n {
        // Distinct values: roughly half the singles beat the baseline.
        let t = base * rng.gen_range(0.3..1.7) + b as f64 * 1e-6;
        if t < base {
            winners.push(b);
        }
        table.insert(OffloadPattern::from_ids([b]).id(), t);
    }
    let measured_min = table.values().copied().fold(f64::INFINITY, f64::min);
    let union = OffloadPattern::from_ids(winners.iter().copied());
    if winners.len() >= 2 {
        // Either synergy (union best) or antagonism (union worse than best single).
        let t = if seed.is_multiple_of(3) { measured_min * rng.gen_range(1.05..1.5) } else { measured_min * rng.gen_range(0.2..0.95) };
        table.insert(union.id(), t);
    }
    let floor = table.values().copied().fold(f64::INFINITY, f64::min);
    for p in all_patterns(n) {
        table.entry(p.id()).or_insert_with(|| floor + rng.gen_range(0.5..200.0));
    }
    table
}

pub fn exact_model(table: &BTreeMap<String, f64>) -> CostModel {
    CostModel::exact(table.clone(), 0.0).unwrap()
}

/// Six-loop fitness table with a unique best and a deceptive neighbour.
pub fn six_loop_table() -> BTreeMap<String, f64> {
    let gain = [1.8, 0.7, 1.3, 1.05, 2.2, 0.9];
    (0u64..64)
        .map(|i| {
            let c = Chromosome::nth(6, i);
            let mut f: f64 = c.offloaded().map(|g| gain[g]).product();
            // Loops 0 and 4 share data; offloading both costs a transfer.
            if c.0[0] && c.0[4] {
                f *= 0.6;
            }
            (c.bitstring(), f)
        })
        .collect()
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_offload-weaver")
}

/// Run the CLI; returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin())
        .args(args)
        .env_remove("OFFLOAD_WEAVER_WORKDIR")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Source model of a fixture app.
pub fn app_model(name: &str) -> SourceModel {
    parse_unit(&read(fixtures().join("apps").join(name))).unwrap()
}
