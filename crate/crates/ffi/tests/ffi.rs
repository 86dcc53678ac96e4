use std::ffi::{c_char, CString};
use std::ptr;

use limeout::data::{generate_planted_bias, write_csv, PlantedBiasConfig};
use limeout_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { limeout_last_error(buf.as_mut_ptr().cast::<c_char>(), buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8(buf).unwrap()
}

fn dataset(dir: &std::path::Path) -> *mut LimeoutDataset {
    let data = generate_planted_bias(&PlantedBiasConfig { n_rows: 300, seed: 3, ..Default::default() }).unwrap();
    let path = dir.join("d.csv");
    write_csv(&data, &path).unwrap();
    let mut ds = ptr::null_mut();
    let st = unsafe { limeout_dataset_load_csv(cstr(path.to_str().unwrap()).as_ptr(), cstr("label").as_ptr(), &mut ds) };
    assert_eq!(st, LimeoutStatus::Ok);
    ds
}

#[test]
fn train_predict_explain_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dataset(dir.path());
    unsafe {
        assert_eq!(limeout_dataset_n_rows(ds), 300);
        let d = limeout_dataset_n_features(ds);
        let mut row = vec![0.0; d];
        assert_eq!(limeout_dataset_row(ds, 0, row.as_mut_ptr(), d), LimeoutStatus::Ok);

        let mut model = ptr::null_mut();
        let masked = [cstr("s")];
        let masked_ptrs: Vec<*const c_char> = masked.iter().map(|s| s.as_ptr()).collect();
        let st = limeout_model_train(ds, cstr("logistic").as_ptr(), 1, masked_ptrs.as_ptr(), 1, &mut model);
        assert_eq!(st, LimeoutStatus::Ok, "{}", last_error());
        assert_eq!(limeout_model_n_classes(model), 2);

        let mut p = [0.0; 2];
        assert_eq!(limeout_model_predict_proba(model, row.as_ptr(), d, p.as_mut_ptr(), 2), LimeoutStatus::Ok);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-12);

        let path = cstr(dir.path().join("m.json").to_str().unwrap());
        assert_eq!(limeout_model_save(model, path.as_ptr()), LimeoutStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(limeout_model_load(path.as_ptr(), &mut loaded), LimeoutStatus::Ok);
        let mut q = [0.0; 2];
        assert_eq!(limeout_model_predict_proba(loaded, row.as_ptr(), d, q.as_mut_ptr(), 2), LimeoutStatus::Ok);
        assert_eq!(p.map(f64::to_bits), q.map(f64::to_bits));

        let mut coefs = vec![0.0; d];
        let (mut b, mut r2) = (0.0, 0.0);
        let st = limeout_model_explain(loaded, row.as_ptr(), d, 500, 7, coefs.as_mut_ptr(), &mut b, &mut r2);
        assert_eq!(st, LimeoutStatus::Ok, "{}", last_error());
        assert!(coefs.iter().all(|c| c.is_finite()));

        limeout_model_free(model);
        limeout_model_free(loaded);
        limeout_dataset_free(ds);
    }
}

#[test]
fn ensemble_averages_dropout_pool() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dataset(dir.path());
    unsafe {
        let d = limeout_dataset_n_features(ds);
        let sens = [cstr("s")];
        let ptrs: Vec<*const c_char> = sens.iter().map(|s| s.as_ptr()).collect();
        let mut ens = ptr::null_mut();
        assert_eq!(limeout_ensemble_build(ds, cstr("tree").as_ptr(), 2, ptrs.as_ptr(), 1, &mut ens), LimeoutStatus::Ok);
        assert_eq!(limeout_ensemble_n_members(ens), 2);
        let mut row = vec![0.0; d];
        limeout_dataset_row(ds, 5, row.as_mut_ptr(), d);
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        limeout_ensemble_predict_proba(ens, row.as_ptr(), d, a.as_mut_ptr(), 2);
        row[0] = 1.0 - row[0];
        limeout_ensemble_predict_proba(ens, row.as_ptr(), d, b.as_mut_ptr(), 2);
        assert_eq!(a, b);
        limeout_ensemble_free(ens);
        limeout_dataset_free(ds);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dataset(dir.path());
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(limeout_dataset_load_csv(ptr::null(), cstr("label").as_ptr(), &mut out), LimeoutStatus::NullPointer);
        let missing = cstr(dir.path().join("nope.csv").to_str().unwrap());
        assert_eq!(limeout_dataset_load_csv(missing.as_ptr(), cstr("label").as_ptr(), &mut out), LimeoutStatus::Io);
        assert!(last_error().contains("nope.csv"));

        let mut model = ptr::null_mut();
        assert_eq!(limeout_model_train(ds, cstr("svm").as_ptr(), 0, ptr::null(), 0, &mut model), LimeoutStatus::Config);
        assert!(last_error().contains("svm"));

        let sens = [cstr("nobody")];
        let ptrs: Vec<*const c_char> = sens.iter().map(|s| s.as_ptr()).collect();
        let mut ens = ptr::null_mut();
        assert_eq!(limeout_ensemble_build(ds, cstr("tree").as_ptr(), 0, ptrs.as_ptr(), 1, &mut ens), LimeoutStatus::Config);

        assert_eq!(limeout_model_train(ds, cstr("tree").as_ptr(), 0, ptr::null(), 0, &mut model), LimeoutStatus::Ok);
        let d = limeout_dataset_n_features(ds);
        let row = vec![0.0; d];
        let mut small = [0.0; 1];
        assert_eq!(limeout_model_predict_proba(model, row.as_ptr(), d, small.as_mut_ptr(), 1), LimeoutStatus::BufferTooSmall);
        assert_eq!(limeout_model_predict_proba(model, row.as_ptr(), d - 1, small.as_mut_ptr(), 2), LimeoutStatus::Data);
        let mut r = vec![0.0; d];
        assert_eq!(limeout_dataset_row(ds, 10_000, r.as_mut_ptr(), d), LimeoutStatus::InvalidArgument);

        let bad = dir.path().join("bad.json");
        std::fs::write(&bad, "{}").unwrap();
        let mut loaded = ptr::null_mut();
        assert_eq!(limeout_model_load(cstr(bad.to_str().unwrap()).as_ptr(), &mut loaded), LimeoutStatus::ModelFormat);

        assert_eq!(limeout_model_n_classes(ptr::null()), 0);
        limeout_model_free(ptr::null_mut());
        limeout_model_free(model);
        limeout_dataset_free(ds);
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/limeout.h")).unwrap();
    for name in [
        "limeout_dataset_load_csv",
        "limeout_model_train",
        "limeout_model_predict_proba",
        "limeout_model_explain",
        "limeout_ensemble_build",
        "limeout_last_error",
        "LIMEOUT_STATUS_BUFFER_TOO_SMALL",
        "typedef struct LimeoutModel LimeoutModel",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/limeout.h"))
        .status()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}
