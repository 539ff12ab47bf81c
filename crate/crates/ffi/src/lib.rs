//! C ABI over `offload_weaver`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free`. Every call returns an [`OwStatus`]; on failure the
//! message is available from [`ow_last_error`] on the same thread. Strings
//! handed out by the library are freed with [`ow_string_free`].

use offload_weaver::cli::analyze;
use offload_weaver::frontend::{parse_unit, SourceModel};
use offload_weaver::pattern_db::{DbError, PatternDb};
use offload_weaver::replace::{
    build_candidates, confirm_all, rewrite, AssumeNo, AssumeYes, CandidateBlock, Responder,
};
use offload_weaver::similarity::{find_similar_blocks, Threshold};
use offload_weaver::verify::{explore, speedup_report, CostModel, OffloadPattern, SimulatedExecutor};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OwStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Parse = 5,
    Database = 6,
    Rewrite = 7,
    CostModel = 8,
    Executor = 9,
    Panic = 100,
}

/// A loaded pattern database.
pub struct OwDb {
    db: PatternDb,
}

/// A parsed C translation unit.
pub struct OwModel {
    model: SourceModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(OwStatus, String);

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Run `f`, record any error or panic, and map it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OwStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_error(format!("internal panic: {msg}"));
            OwStatus::Panic
        }
    }
}

fn fail<T>(status: OwStatus, msg: impl ToString) -> Result<T, Failure> {
    Err(Failure(status, msg.to_string()))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(OwStatus::NullArgument, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(OwStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(OwStatus::NullArgument, format!("{what} is null")))
}

fn out_arg<T>(p: *mut T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        fail(OwStatus::NullArgument, format!("{what} is null"))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .or_else(|_| fail(OwStatus::InvalidArgument, "output contains a nul byte"))
}

fn candidates(
    model: &SourceModel,
    db: &PatternDb,
    threshold: f64,
    approve_mismatches: bool,
) -> Result<Vec<CandidateBlock>, Failure> {
    let threshold = Threshold::new(threshold).or_else(|e| fail(OwStatus::InvalidArgument, e))?;
    let hits = find_similar_blocks(model, db, threshold);
    let mut blocks = build_candidates(model, db, &hits);
    let mut responder: Box<dyn Responder> = if approve_mismatches {
        Box::new(AssumeYes)
    } else {
        Box::new(AssumeNo)
    };
    confirm_all(&mut blocks, responder.as_mut());
    Ok(blocks)
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ow_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ow_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a pattern database from a JSON file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ow_db_load(path: *const c_char, out: *mut *mut OwDb) -> OwStatus {
    guard(|| {
        out_arg(out, "out")?;
        let path = str_arg(path, "path")?;
        let db = PatternDb::load(path).or_else(|e| {
            let status = match e {
                DbError::Io { .. } => OwStatus::Io,
                _ => OwStatus::Database,
            };
            fail(status, e)
        })?;
        *out = Box::into_raw(Box::new(OwDb { db }));
        Ok(())
    })
}

/// Build a pattern database from JSON text.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ow_db_from_json(json: *const c_char, out: *mut *mut OwDb) -> OwStatus {
    guard(|| {
        out_arg(out, "out")?;
        let json = str_arg(json, "json")?;
        let db = PatternDb::from_json(json).or_else(|e| fail(OwStatus::Database, e))?;
        *out = Box::into_raw(Box::new(OwDb { db }));
        Ok(())
    })
}

/// Number of records in the database, or 0 for null.
///
/// # Safety
/// `db` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ow_db_len(db: *const OwDb) -> usize {
    db.as_ref().map_or(0, |d| d.db.len())
}

/// # Safety
/// `db` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ow_db_free(db: *mut OwDb) {
    if !db.is_null() {
        drop(Box::from_raw(db));
    }
}

/// Parse C source text.
///
/// # Safety
/// `source` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ow_model_parse(source: *const c_char, out: *mut *mut OwModel) -> OwStatus {
    guard(|| {
        out_arg(out, "out")?;
        let source = str_arg(source, "source")?;
        let model = parse_unit(source).or_else(|e| fail(OwStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(OwModel { model }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn ow_model_free(model: *mut OwModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Functions, structs, loops, external calls and skipped items as JSON.
/// `db` may be null, in which case every call to an undefined function is
/// listed as external.
///
/// # Safety
/// `model` must be live, `db` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ow_analysis_json(
    model: *const OwModel,
    db: *const OwDb,
    out: *mut *mut c_char,
) -> OwStatus {
    guard(|| {
        out_arg(out, "out")?;
        let model = ref_arg(model, "model")?;
        let list = db.as_ref().map(|d| d.db.external_list());
        let json = serde_json::to_string(&analyze(&model.model, list))
            .or_else(|e| fail(OwStatus::InvalidArgument, e))?;
        *out = into_c_string(json)?;
        Ok(())
    })
}

/// Candidate blocks as a JSON array. Interface mismatches are approved
/// when `approve_mismatches` is true and rejected otherwise.
///
/// # Safety
/// `model` and `db` must be live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ow_candidates_json(
    model: *const OwModel,
    db: *const OwDb,
    threshold: f64,
    approve_mismatches: bool,
    out: *mut *mut c_char,
) -> OwStatus {
    guard(|| {
        out_arg(out, "out")?;
        let (model, db) = (ref_arg(model, "model")?, ref_arg(db, "db")?);
        let blocks = candidates(&model.model, &db.db, threshold, approve_mismatches)?;
        let json = serde_json::to_string(&blocks).or_else(|e| fail(OwStatus::InvalidArgument, e))?;
        *out = into_c_string(json)?;
        Ok(())
    })
}

/// Source text with the blocks of `pattern_id` (for example `"0-2"`, or
/// `"base"` for none) replaced by their accelerator calls.
///
/// # Safety
/// `model` and `db` must be live, `pattern_id` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ow_rewrite(
    model: *const OwModel,
    db: *const OwDb,
    threshold: f64,
    approve_mismatches: bool,
    pattern_id: *const c_char,
    out: *mut *mut c_char,
) -> OwStatus {
    guard(|| {
        out_arg(out, "out")?;
        let (model, db) = (ref_arg(model, "model")?, ref_arg(db, "db")?);
        let id = str_arg(pattern_id, "pattern_id")?;
        let pattern = OffloadPattern::parse_id(id)
            .ok_or_else(|| Failure(OwStatus::InvalidArgument, format!("bad pattern id `{id}`")))?;
        let blocks = candidates(&model.model, &db.db, threshold, approve_mismatches)?;
        let text = rewrite(&model.model, &db.db, &blocks, &pattern)
            .or_else(|e| fail(OwStatus::Rewrite, e))?;
        *out = into_c_string(text)?;
        Ok(())
    })
}

/// Search offload patterns against a simulated cost model given as JSON.
/// The result is `{"selected": id, "ratio": x, "report": [rows]}`.
///
/// # Safety
/// `model` and `db` must be live, `cost_model_json` nul-terminated, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ow_explore_simulated(
    model: *const OwModel,
    db: *const OwDb,
    threshold: f64,
    approve_mismatches: bool,
    cost_model_json: *const c_char,
    seed: u64,
    repetitions: usize,
    out: *mut *mut c_char,
) -> OwStatus {
    guard(|| {
        out_arg(out, "out")?;
        let (model, db) = (ref_arg(model, "model")?, ref_arg(db, "db")?);
        let cost = CostModel::from_json(str_arg(cost_model_json, "cost_model_json")?)
            .or_else(|e| fail(OwStatus::CostModel, e))?;
        let blocks: Vec<CandidateBlock> = candidates(&model.model, &db.db, threshold, approve_mismatches)?
            .into_iter()
            .filter(CandidateBlock::is_eligible)
            .collect();
        let mut executor = SimulatedExecutor::new(cost, seed);
        let found = explore(&blocks, &mut executor, repetitions)
            .or_else(|e| fail(OwStatus::Executor, e))?;
        let rows = speedup_report(&found.report).or_else(|e| fail(OwStatus::Executor, e))?;
        let ratio = rows
            .iter()
            .find(|r| r.pattern == found.best)
            .map_or(1.0, |r| r.ratio);
        let json = serde_json::json!({
            "selected": found.best.id(),
            "ratio": ratio,
            "report": rows,
        });
        *out = into_c_string(json.to_string())?;
        Ok(())
    })
}
