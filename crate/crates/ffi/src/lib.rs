//! C interface to limeout.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`LimeoutStatus`]; on failure the message is available from
//! [`limeout_last_error`] on the same thread.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use limeout::classifiers::{self, Algorithm, ClassifierSpec, FeatureMask, ModelFile, ProbabilisticClassifier, TrainedModel};
use limeout::data::{self, Dataset, FeatureStats, DEFAULT_BINS};
use limeout::fairness::{build_pool, EnsembleModel, SensitiveSet};
use limeout::lime::{explain_instance, KernelConfig, SurrogateConfig};
use limeout::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimeoutStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Data = 4,
    InvalidArgument = 5,
    DegenerateTraining = 6,
    DegenerateNeighborhood = 7,
    ModelFormat = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// A loaded table with its schema.
pub struct LimeoutDataset(Dataset);

/// A trained model plus the training statistics used to explain it.
pub struct LimeoutModel {
    model: TrainedModel,
    stats: Option<FeatureStats>,
}

/// An averaged feature-dropout pool.
pub struct LimeoutEnsemble(EnsembleModel);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> LimeoutStatus {
    match e {
        Error::Io { .. } => LimeoutStatus::Io,
        Error::Config(_) | Error::InvalidHyperparameter(_) => LimeoutStatus::Config,
        Error::Data(_) | Error::DataLine { .. } | Error::Schema(_) => LimeoutStatus::Data,
        Error::InvalidArgument(_) => LimeoutStatus::InvalidArgument,
        Error::DegenerateTraining(_) => LimeoutStatus::DegenerateTraining,
        Error::DegenerateNeighborhood(_) => LimeoutStatus::DegenerateNeighborhood,
        Error::ModelFormat(_) => LimeoutStatus::ModelFormat,
    }
}

enum Fail {
    Lib(Error),
    Status(LimeoutStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LimeoutStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LimeoutStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            LimeoutStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(LimeoutStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(LimeoutStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn texts<'a>(p: *const *const c_char, n: usize, what: &str) -> Result<Vec<&'a str>, Fail> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(null(what));
    }
    std::slice::from_raw_parts(p, n).iter().map(|&s| text(s, what)).collect()
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn write_out(out: *mut f64, cap: usize, values: &[f64]) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if cap < values.len() {
        return Err(Fail::Status(
            LimeoutStatus::BufferTooSmall,
            format!("output buffer holds {cap} values, {} needed", values.len()),
        ));
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to fit) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn limeout_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn limeout_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a CSV with kinds inferred per column.
///
/// # Safety
/// `path` and `target` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn limeout_dataset_load_csv(
    path: *const c_char,
    target: *const c_char,
    out: *mut *mut LimeoutDataset,
) -> LimeoutStatus {
    guard(|| {
        let ds = data::load_csv(text(path, "path")?, text(target, "target")?, &BTreeMap::new())?;
        put(out, LimeoutDataset(ds))
    })
}

/// # Safety
/// `ds` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn limeout_dataset_n_rows(ds: *const LimeoutDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.n_rows())
}

/// # Safety
/// `ds` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn limeout_dataset_n_features(ds: *const LimeoutDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.n_features())
}

/// Copies row `index` (categorical values as level codes) into `out`.
///
/// # Safety
/// `ds` must be a handle from this library; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn limeout_dataset_row(
    ds: *const LimeoutDataset,
    index: usize,
    out: *mut f64,
    len: usize,
) -> LimeoutStatus {
    guard(|| {
        let d = &handle(ds, "dataset")?.0;
        if index >= d.n_rows() {
            return Err(Error::InvalidArgument(format!("row {index} out of range")).into());
        }
        write_out(out, len, d.row(index))
    })
}

/// # Safety
/// `ds` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn limeout_dataset_free(ds: *mut LimeoutDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Trains `algorithm` (`logistic`, `tree`, `random_forest`, `bagging`,
/// `adaboost`) with default hyperparameters on the whole dataset, never
/// reading the `n_masked` features named in `masked`.
///
/// # Safety
/// Strings must be NUL-terminated; `masked` must hold `n_masked` strings.
#[no_mangle]
pub unsafe extern "C" fn limeout_model_train(
    ds: *const LimeoutDataset,
    algorithm: *const c_char,
    seed: u64,
    masked: *const *const c_char,
    n_masked: usize,
    out: *mut *mut LimeoutModel,
) -> LimeoutStatus {
    guard(|| {
        let d = &handle(ds, "dataset")?.0;
        let alg: Algorithm = text(algorithm, "algorithm")?.parse()?;
        let mask = FeatureMask::new(texts(masked, n_masked, "masked")?, d.schema())?;
        let model = classifiers::train(&ClassifierSpec::new(alg, seed), d, &mask)?;
        let stats = FeatureStats::compute(d, DEFAULT_BINS)?;
        put(out, LimeoutModel { model, stats: Some(stats) })
    })
}

/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn limeout_model_load(path: *const c_char, out: *mut *mut LimeoutModel) -> LimeoutStatus {
    guard(|| {
        let f = classifiers::load_model(text(path, "path")?)?;
        put(out, LimeoutModel { model: f.model, stats: f.stats })
    })
}

/// # Safety
/// `model` must be a handle from this library; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn limeout_model_save(model: *const LimeoutModel, path: *const c_char) -> LimeoutStatus {
    guard(|| {
        let m = handle(model, "model")?;
        classifiers::save_model(&ModelFile::new(m.model.clone(), m.stats.clone()), text(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn limeout_model_n_classes(model: *const LimeoutModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.schema().n_classes())
}

/// Class probabilities for one row of `n_features` values.
///
/// # Safety
/// `row` must hold `n_features` doubles and `out` `n_out` doubles.
#[no_mangle]
pub unsafe extern "C" fn limeout_model_predict_proba(
    model: *const LimeoutModel,
    row: *const f64,
    n_features: usize,
    out: *mut f64,
    n_out: usize,
) -> LimeoutStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let p = m.model.predict_proba(slice(row, n_features, "row")?)?;
        write_out(out, n_out, &p)
    })
}

/// Local explanation of the model's predicted class at `row`: one
/// coefficient per feature in schema order, plus intercept and local R².
///
/// # Safety
/// `row` must hold `n_features` doubles, `coefficients` `n_features`
/// doubles; `intercept` and `local_r2` may be null.
#[no_mangle]
pub unsafe extern "C" fn limeout_model_explain(
    model: *const LimeoutModel,
    row: *const f64,
    n_features: usize,
    n_samples: usize,
    seed: u64,
    coefficients: *mut f64,
    intercept: *mut f64,
    local_r2: *mut f64,
) -> LimeoutStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let stats = m.stats.as_ref().ok_or_else(|| {
            Fail::Lib(Error::InvalidArgument("model carries no training statistics".into()))
        })?;
        let cfg = SurrogateConfig { n_samples, ..SurrogateConfig::with_seed(seed) };
        let e = explain_instance(&m.model, slice(row, n_features, "row")?, stats, &cfg, &KernelConfig::for_dimension(n_features))?;
        write_out(coefficients, n_features, &e.coefficients)?;
        if !intercept.is_null() {
            *intercept = e.intercept;
        }
        if !local_r2.is_null() {
            *local_r2 = e.local_r2;
        }
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn limeout_model_free(model: *mut LimeoutModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Trains the dropout pool for the `n_sensitive` named features (one member
/// per feature plus one dropping all of them) and averages it.
///
/// # Safety
/// Strings must be NUL-terminated; `sensitive` must hold `n_sensitive` strings.
#[no_mangle]
pub unsafe extern "C" fn limeout_ensemble_build(
    ds: *const LimeoutDataset,
    algorithm: *const c_char,
    seed: u64,
    sensitive: *const *const c_char,
    n_sensitive: usize,
    out: *mut *mut LimeoutEnsemble,
) -> LimeoutStatus {
    guard(|| {
        let d = &handle(ds, "dataset")?.0;
        let alg: Algorithm = text(algorithm, "algorithm")?.parse()?;
        let sens = SensitiveSet::new(texts(sensitive, n_sensitive, "sensitive")?, d.schema())?;
        let pool = build_pool(&ClassifierSpec::new(alg, seed), d, &sens)?;
        put(out, LimeoutEnsemble(EnsembleModel::new(pool)?))
    })
}

/// # Safety
/// `ens` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn limeout_ensemble_n_members(ens: *const LimeoutEnsemble) -> usize {
    ens.as_ref().map_or(0, |e| e.0.pool.members.len())
}

/// # Safety
/// `row` must hold `n_features` doubles and `out` `n_out` doubles.
#[no_mangle]
pub unsafe extern "C" fn limeout_ensemble_predict_proba(
    ens: *const LimeoutEnsemble,
    row: *const f64,
    n_features: usize,
    out: *mut f64,
    n_out: usize,
) -> LimeoutStatus {
    guard(|| {
        let e = handle(ens, "ensemble")?;
        let p = e.0.predict_proba(slice(row, n_features, "row")?)?;
        write_out(out, n_out, &p)
    })
}

/// # Safety
/// `ens` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn limeout_ensemble_free(ens: *mut LimeoutEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}
