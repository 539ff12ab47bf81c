use crate::frontend::ast::LoopKind;
use crate::frontend::SourceModel;
use crate::span::line_col;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionEntry {
    pub name: String,
    pub line: usize,
    pub params: usize,
    #[serde(rename = "return")]
    pub ret: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructEntry {
    pub name: String,
    pub line: usize,
    pub fields: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopEntry {
    pub loop_id: usize,
    pub kind: LoopKind,
    pub depth: usize,
    pub function: String,
    pub line: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exec_count: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CallEntry {
    pub callee: String,
    pub args: usize,
    pub function: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticEntry {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// What the analyzer found in one unit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Analysis {
    pub functions: Vec<FunctionEntry>,
    pub structs: Vec<StructEntry>,
    pub loops: Vec<LoopEntry>,
    pub external_calls: Vec<CallEntry>,
    pub skipped: Vec<DiagnosticEntry>,
}

/// Summarize `model`. External calls are calls to names in `external_list`
/// or, without a list, to any function not defined in the unit.
pub fn analyze(model: &SourceModel, external_list: Option<&BTreeSet<String>>) -> Analysis {
    let text = &model.raw_text;
    let line = |offset: usize| line_col(text, offset).0;
    let fname = |id: crate::frontend::FunctionId| model.function(id).name.clone();
    let defined: BTreeSet<String> = model.functions.iter().map(|f| f.name.clone()).collect();
    let undefined: BTreeSet<String> = model
        .call_sites
        .iter()
        .map(|c| c.callee_name.clone())
        .filter(|n| !defined.contains(n))
        .collect();
    let calls = model.detect_library_calls(external_list.unwrap_or(&undefined));
    Analysis {
        functions: model
            .functions
            .iter()
            .map(|f| FunctionEntry {
                name: f.name.clone(),
                line: line(f.span.start),
                params: f.params.len(),
                ret: f.return_type.to_string(),
            })
            .collect(),
        structs: model
            .structs
            .iter()
            .map(|s| StructEntry {
                name: s.name.clone().unwrap_or_else(|| "<anonymous>".into()),
                line: line(s.span.start),
                fields: s.fields.len(),
            })
            .collect(),
        loops: model
            .loops
            .iter()
            .map(|l| LoopEntry {
                loop_id: l.loop_id,
                kind: l.kind,
                depth: l.nesting_depth,
                function: fname(l.function),
                line: line(l.span.start),
                exec_count: l.exec_count,
            })
            .collect(),
        external_calls: calls
            .into_iter()
            .map(|c| {
                let (line, column) = line_col(text, c.span.start);
                CallEntry {
                    callee: c.callee_name.clone(),
                    args: c.arg_count,
                    function: fname(c.enclosing_function),
                    line,
                    column,
                }
            })
            .collect(),
        skipped: model
            .diagnostics
            .iter()
            .map(|d| DiagnosticEntry {
                line: d.line,
                column: d.column,
                message: d.message.clone(),
            })
            .collect(),
    }
}

impl Analysis {
    /// One line per finding.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for f in &self.functions {
            let _ = writeln!(
                out,
                "function {} line={} params={} return={}",
                f.name, f.line, f.params, f.ret
            );
        }
        for s in &self.structs {
            let _ = writeln!(out, "struct {} line={} fields={}", s.name, s.line, s.fields);
        }
        for l in &self.loops {
            let kind = match l.kind {
                LoopKind::For => "for",
                LoopKind::While => "while",
            };
            let _ = write!(
                out,
                "loop {} {kind} depth={} function={} line={}",
                l.loop_id, l.depth, l.function, l.line
            );
            if let Some(n) = l.exec_count {
                let _ = write!(out, " count={n}");
            }
            out.push('\n');
        }
        for c in &self.external_calls {
            let _ = writeln!(
                out,
                "call {} args={} function={} at={}:{}",
                c.callee, c.args, c.function, c.line, c.column
            );
        }
        for d in &self.skipped {
            let _ = writeln!(out, "skipped {}:{} {}", d.line, d.column, d.message);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_unit;

    #[test]
    fn fft_fixture_listing() {
        let m = parse_unit(
            "void fft(double *a, int n);\nint main(){ double a[8]; fft(a, 8); return 0; }\n",
        )
        .unwrap();
        let a = analyze(&m, None);
        assert_eq!(a.external_calls.len(), 1);
        assert_eq!(a.render(), "function main line=2 params=0 return=int-like\ncall fft args=2 function=main at=2:26\n");
    }

    #[test]
    fn empty_unit() {
        let m = parse_unit("").unwrap();
        assert_eq!(analyze(&m, None).render(), "");
    }

    #[test]
    fn list_restricts_external_calls() {
        let m = parse_unit("int main(){ printf(\"x\"); fft(a, 8); return 0; }").unwrap();
        let list: BTreeSet<String> = ["fft".to_string()].into();
        let a = analyze(&m, Some(&list));
        assert_eq!(
            a.external_calls
                .iter()
                .map(|c| c.callee.as_str())
                .collect::<Vec<_>>(),
            ["fft"]
        );
        assert_eq!(analyze(&m, None).external_calls.len(), 2);
    }
}
