use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use lamb_toa::estimators::{aic_pick, mer_pick, sla_pick_windows, tc_pick, AicParams, AicVariant};
use lamb_toa::signal::Waveform;
use lamb_toa_ffi::*;

fn last_error() -> String {
    let p = lt_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn burst(n: usize, onset: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let base = 1e-3 * ((i as f64) * 0.37).sin();
            if i >= onset {
                base + ((i - onset) as f64 * 0.3).sin() * (-((i - onset) as f64) / 400.0).exp()
            } else {
                base
            }
        })
        .collect()
}

fn handle(samples: &[f64]) -> *mut LtWaveform {
    let mut w = ptr::null_mut();
    let s = unsafe { lt_waveform_new(samples.as_ptr(), samples.len(), 1e-7, 0.0, &mut w) };
    assert_eq!(s, LtStatus::Ok);
    w
}

#[test]
fn null_pointers_are_reported() {
    let mut out = LtEstimate { found: 0, index: 0, time: 0.0 };
    let s = unsafe { lt_pick_tc(ptr::null(), 0.1, &mut out) };
    assert_eq!(s, LtStatus::NullPointer);
    assert!(last_error().contains("`w`"));
    assert_eq!(unsafe { lt_waveform_len(ptr::null()) }, 0);
    assert_eq!(unsafe { lt_curve_len(ptr::null()) }, 0);
    unsafe {
        lt_waveform_free(ptr::null_mut());
        lt_curve_free(ptr::null_mut());
    }
}

#[test]
fn waveform_round_trip() {
    let data = burst(300, 100);
    let w = handle(&data);
    assert_eq!(unsafe { lt_waveform_len(w) }, 300);
    let mut back = vec![0.0; 500];
    let mut n = 0;
    assert_eq!(unsafe { lt_waveform_copy_samples(w, back.as_mut_ptr(), back.len(), &mut n) }, LtStatus::Ok);
    assert_eq!(n, 300);
    assert_eq!(&back[..n], &data[..]);
    assert!(lt_last_error_message().is_null());
    unsafe { lt_waveform_free(w) };
}

#[test]
fn invalid_waveform_maps_to_status() {
    let data = [0.0, 1.0, 0.0];
    let mut w = ptr::null_mut();
    let s = unsafe { lt_waveform_new(data.as_ptr(), 1, 1e-7, 0.0, &mut w) };
    assert_eq!(s, LtStatus::InvalidWaveform);
    assert!(w.is_null());
    assert!(last_error().contains("at least 2"));
    let s = unsafe { lt_waveform_new(data.as_ptr(), data.len(), -1.0, 0.0, &mut w) };
    assert_eq!(s, LtStatus::InvalidWaveform);
    assert!(last_error().contains("dt"));
}

#[test]
fn pickers_agree_with_library() {
    let data = burst(4000, 1500);
    let wf = Waveform::new(data.clone(), 1e-7, 0.0).unwrap();
    let w = handle(&data);
    let mut e = LtEstimate { found: 0, index: 0, time: 0.0 };

    assert_eq!(unsafe { lt_pick_tc(w, 0.1, &mut e) }, LtStatus::Ok);
    assert_eq!(e.found, 1);
    assert_eq!(Some(e.index), tc_pick(&wf, 0.1).unwrap().index);

    assert_eq!(unsafe { lt_pick_sla(w, 20, 200, &mut e) }, LtStatus::Ok);
    assert_eq!(Some(e.index), sla_pick_windows(&wf, 20, 200).unwrap().0.index);

    assert_eq!(unsafe { lt_pick_mer(w, 50, &mut e) }, LtStatus::Ok);
    assert_eq!(Some(e.index), mer_pick(&wf, 50).unwrap().0.index);

    assert_eq!(unsafe { lt_pick_aic(w, ptr::null(), LtAicVariant::GlobalMin, &mut e) }, LtStatus::Ok);
    let lib = aic_pick(&wf, &AicParams::default(), AicVariant::Gm, None).unwrap();
    assert_eq!(Some(e.index), lib.index);
    assert_eq!(e.found == 1, lib.index.is_some());

    let p = lt_aic_params_default();
    assert_eq!(unsafe { lt_pick_aic(w, &p, LtAicVariant::LocalMin, &mut e) }, LtStatus::Ok);
    let lib = aic_pick(&wf, &AicParams::default(), AicVariant::Lm, None).unwrap();
    assert_eq!(e.found == 1, lib.index.is_some());
    if e.found == 1 {
        assert_eq!(Some(e.index), lib.index);
    }
    unsafe { lt_waveform_free(w) };
}

#[test]
fn tc_not_found_is_not_an_error() {
    let w = handle(&[0.0; 64]);
    let mut e = LtEstimate { found: 1, index: 7, time: 0.0 };
    assert_eq!(unsafe { lt_pick_tc(w, 0.5, &mut e) }, LtStatus::Ok);
    assert_eq!(e.found, 0);
    assert!(e.time.is_nan());
    unsafe { lt_waveform_free(w) };
}

#[test]
fn oversized_window_reports_window_too_long() {
    let w = handle(&burst(100, 50));
    let mut e = LtEstimate { found: 0, index: 0, time: 0.0 };
    let s = unsafe { lt_pick_sla(w, 10, 1000, &mut e) };
    assert_ne!(s, LtStatus::Ok);
    assert!(!last_error().is_empty());
    unsafe { lt_waveform_free(w) };
}

#[test]
fn processing_returns_new_handles() {
    let data = burst(2048, 500);
    let w = handle(&data);
    let mut noisy = ptr::null_mut();
    assert_eq!(unsafe { lt_add_noise(w, 20.0, 3, &mut noisy) }, LtStatus::Ok);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { lt_add_noise(w, 20.0, 3, &mut again) }, LtStatus::Ok);
    let read = |h| {
        let mut v = vec![0.0; 2048];
        let mut n = 0;
        unsafe { lt_waveform_copy_samples(h, v.as_mut_ptr(), v.len(), &mut n) };
        v
    };
    assert_eq!(read(noisy), read(again));
    assert_ne!(read(noisy), data);

    let mut low = ptr::null_mut();
    assert_eq!(unsafe { lt_lowpass(w, 1e5, &mut low) }, LtStatus::Ok);
    assert_eq!(unsafe { lt_waveform_len(low) }, 2048);
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { lt_lowpass(w, 1e9, &mut bad) }, LtStatus::OutOfRange);
    assert!(bad.is_null());
    unsafe {
        lt_waveform_free(w);
        lt_waveform_free(noisy);
        lt_waveform_free(again);
        lt_waveform_free(low);
    }
}

#[test]
fn dispersion_through_handles() {
    let m = lt_material_aluminum_2mm();
    let mut b = LtBulkSpeeds { pressure: 0.0, shear: 0.0 };
    assert_eq!(unsafe { lt_bulk_speeds(&m, &mut b) }, LtStatus::Ok);
    assert!(b.pressure > b.shear && b.shear > 0.0);

    let mut c = ptr::null_mut();
    assert_eq!(unsafe { lt_trace_mode(&m, LtMode::S0, 10.0, 1000.0, &mut c) }, LtStatus::Ok);
    let n = unsafe { lt_curve_len(c) };
    assert!(n > 50);
    let mut s = LtDispersionSample { fd: 0.0, k: 0.0, c_phase: 0.0, c_group: 0.0 };
    assert_eq!(unsafe { lt_curve_sample(c, 0, &mut s) }, LtStatus::Ok);
    assert!(s.fd > 0.0 && s.c_phase > 5000.0);
    assert_eq!(unsafe { lt_curve_sample(c, n, &mut s) }, LtStatus::OutOfRange);
    let (mut speed, mut fd) = (0.0, 0.0);
    assert_eq!(unsafe { lt_curve_fastest_group_speed(c, 0.0, 1000.0, &mut speed, &mut fd) }, LtStatus::Ok);
    assert!(speed > 5000.0 && speed < b.pressure);
    unsafe { lt_curve_free(c) };

    let mut bad = m;
    bad.poisson_ratio = 0.7;
    assert_eq!(unsafe { lt_bulk_speeds(&bad, &mut b) }, LtStatus::InvalidArgument);
    assert_eq!(unsafe { lt_trace_mode(&m, LtMode::A0, -1.0, 10.0, &mut c) }, LtStatus::InvalidArgument);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(lt_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/lamb_toa.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["lt_waveform_new", "lt_pick_aic", "lt_trace_mode", "lt_last_error_message", "typedef struct LtWaveform LtWaveform"] {
        assert!(text.contains(f), "{f}");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"lamb_toa.h\"\n\
         int probe(void) {\n\
           double x[4] = {0, 0, 1, 0};\n\
           LtWaveform *w = NULL; LtEstimate e;\n\
           if (lt_waveform_new(x, 4, 1e-7, 0.0, &w) != LT_STATUS_OK) return 1;\n\
           LtStatus s = lt_pick_tc(w, 0.5, &e);\n\
           lt_waveform_free(w);\n\
           return s == LT_STATUS_OK && e.found ? 0 : 2;\n\
         }\n",
    )
    .unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match Command::new(&cc).arg("-std=c99").arg("-Wall").arg("-Werror").arg("-fsyntax-only").arg("-I").arg(dir.join("include")).arg(&src).output() {
        Ok(o) => assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr)),
        Err(e) => {
            eprintln!("skipping C checks, `{cc}` unavailable: {e}");
            return;
        }
    }

    // `cargo test` only rebuilds the rlib; link only against a fresh `cargo build` archive
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().and_then(Path::parent).unwrap().join("liblamb_toa_ffi.a");
    let modified = |p: &Path| std::fs::metadata(p).and_then(|m| m.modified()).ok();
    if modified(&lib).is_none() || modified(&lib) < modified(&dir.join("src/lib.rs")) {
        eprintln!("skipping C link check, {} missing or stale", lib.display());
        return;
    }
    let main = tmp.path().join("main.c");
    std::fs::write(&main, "int probe(void);\nint main(void) { return probe(); }\n").unwrap();
    let bin = tmp.path().join("probe");
    let o = Command::new(&cc)
        .arg("-std=c99")
        .arg("-I")
        .arg(dir.join("include"))
        .args([&src, &main, &lib])
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(Command::new(&bin).status().unwrap().code(), Some(0));
}
