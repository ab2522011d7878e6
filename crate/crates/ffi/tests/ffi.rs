use std::ffi::CString;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use xxchain_ffi::*;

struct Handles {
    params: *mut XxParams,
    liouvillian: *mut XxLiouvillian,
}

impl Handles {
    fn new(g: f64, t_left: f64, t_right: f64, approach: XxApproach) -> Self {
        let mut params = ptr::null_mut();
        let mut liouvillian = ptr::null_mut();
        unsafe {
            assert_eq!(xx_params_new(g, 15.0, 1.0, 1.0, t_left, t_right, &mut params), XxStatus::Ok);
            assert_eq!(xx_liouvillian_new(params, approach, false, &mut liouvillian), XxStatus::Ok);
        }
        Self { params, liouvillian }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            xx_liouvillian_free(self.liouvillian);
            xx_params_free(self.params);
        }
    }
}

fn last_error() -> String {
    let mut buf = vec![0u8; 512];
    let n = unsafe { xx_last_error(buf.as_mut_ptr().cast(), buf.len()) };
    buf.truncate(n.min(511));
    String::from_utf8(buf).unwrap()
}

fn entries(state: *const XxState) -> (Vec<f64>, Vec<f64>) {
    let (mut re, mut im) = (vec![0.0; 64], vec![0.0; 64]);
    unsafe {
        assert_eq!(xx_state_entries(state, re.as_mut_ptr(), im.as_mut_ptr(), 64), XxStatus::Ok);
    }
    (re, im)
}

#[test]
fn analytic_and_numeric_global_states_agree() {
    let h = Handles::new(1.0, 10.0, 20.0, XxApproach::Global);
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(xx_steady_global_analytic(h.params, &mut a), XxStatus::Ok);
        assert_eq!(xx_steady_numeric(h.liouvillian, &mut b), XxStatus::Ok);
    }
    let ((ra, ia), (rb, ib)) = (entries(a), entries(b));
    let diff = ra.iter().zip(&rb).chain(ia.iter().zip(&ib)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-9, "{diff}");
    let trace: f64 = (0..8).map(|k| ra[9 * k]).sum();
    assert!((trace - 1.0).abs() < 1e-12);
    let mut t = XxTransport::default();
    unsafe {
        assert_eq!(xx_transport(h.liouvillian, a, &mut t), XxStatus::Ok);
        xx_state_free(a);
        xx_state_free(b);
    }
    assert!((t.q_left + t.q_right).abs() < 1e-10 && t.sigma_z2_rate.abs() < 1e-10);
    assert!(t.heat_left > 0.0, "colder left bath absorbs heat");
}

#[test]
fn status_codes_and_messages() {
    let mut p = ptr::null_mut();
    let mut l = ptr::null_mut();
    unsafe {
        assert_eq!(xx_params_new(1.0, -1.0, 1.0, 1.0, 1.0, 1.0, &mut p), XxStatus::InvalidParams);
        assert!(p.is_null());
        assert!(last_error().contains("delta"));
        assert_eq!(xx_params_new(12.0, 15.0, 1.0, 1.0, 1.0, 1.0, &mut p), XxStatus::Ok);
        assert_eq!(xx_liouvillian_new(p, XxApproach::Global, false, &mut l), XxStatus::DegenerateSpectrum);
        assert!(last_error().contains("sqrt(2)"));
        assert_eq!(xx_liouvillian_new(p, XxApproach::Local, false, &mut l), XxStatus::Ok);
        assert!(last_error().is_empty());
        assert_eq!(xx_params_set_local_frequency(p, 7), XxStatus::InvalidArgument);
        assert_eq!(xx_steady_numeric(ptr::null(), ptr::null_mut()), XxStatus::NullPointer);
        xx_liouvillian_free(l);
        xx_params_free(p);
        assert_eq!(xx_params_new(1.0, 15.0, 0.0, 1.0, 1.0, 2.0, &mut p), XxStatus::Ok);
        assert_eq!(xx_liouvillian_new(p, XxApproach::Local, false, &mut l), XxStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(xx_steady_numeric(l, &mut s), XxStatus::NonUniqueKernel);
        xx_liouvillian_free(l);
        xx_params_free(p);
    }
}

#[test]
fn truncated_error_buffer() {
    let mut p = ptr::null_mut();
    unsafe {
        xx_params_new(1.0, f64::NAN, 1.0, 1.0, 1.0, 1.0, &mut p);
        let mut buf = [0x7fu8; 4];
        let n = xx_last_error(buf.as_mut_ptr().cast(), buf.len());
        assert!(n > 3);
        assert_eq!(buf[3], 0);
        assert_eq!(xx_last_error(ptr::null_mut(), 0), n);
    }
}

#[test]
fn evolution_reaches_local_steady_state() {
    let h = Handles::new(1.0, 10.0, 20.0, XxApproach::Local);
    let bits = CString::new("011").unwrap();
    let (mut rho0, mut ss) = (ptr::null_mut(), ptr::null_mut());
    let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
    let mut out = vec![XxTransport::default(); times.len()];
    let mut steady = XxTransport::default();
    unsafe {
        assert_eq!(xx_state_basis(bits.as_ptr(), &mut rho0), XxStatus::Ok);
        assert_eq!(xx_evolve(h.liouvillian, rho0, times.as_ptr(), times.len(), out.as_mut_ptr()), XxStatus::Ok);
        assert_eq!(xx_steady_numeric(h.liouvillian, &mut ss), XxStatus::Ok);
        assert_eq!(xx_transport(h.liouvillian, ss, &mut steady), XxStatus::Ok);
        let bad = [1.0, 0.5];
        assert_eq!(xx_evolve(h.liouvillian, rho0, bad.as_ptr(), 2, out.as_mut_ptr()), XxStatus::InvalidParams);
        xx_state_free(rho0);
        xx_state_free(ss);
    }
    assert_eq!(out[0].j12, 0.0);
    let last = out.last().unwrap();
    assert!((last.j12 - steady.j12).abs() < 1e-6 && (last.j23 - steady.j23).abs() < 1e-6);
    assert!(steady.j12.abs() > 1e-3);
}

#[test]
fn state_round_trip_and_superoperator_export() {
    let h = Handles::new(0.5, 5.0, 8.0, XxApproach::Global);
    let mut rho = ptr::null_mut();
    let (mut re, mut im) = (vec![0.0; 64], vec![0.0; 64]);
    for k in 0..8 {
        re[9 * k] = 0.125;
    }
    re[1] = 0.05;
    re[8] = 0.05;
    im[2] = 0.02;
    im[16] = -0.02;
    unsafe {
        assert_eq!(xx_state_from_entries(re.as_ptr(), im.as_ptr(), &mut rho), XxStatus::Ok);
    }
    assert_eq!(entries(rho), (re.clone(), im.clone()));
    unsafe { xx_state_free(rho) };
    re[1] = 0.3;
    unsafe {
        assert_eq!(xx_state_from_entries(re.as_ptr(), im.as_ptr(), &mut rho), XxStatus::InvalidState);
    }
    let (mut lr, mut li) = (vec![0.0; 4096], vec![0.0; 4096]);
    unsafe {
        assert_eq!(
            xx_liouvillian_matrix(h.liouvillian, lr.as_mut_ptr(), li.as_mut_ptr(), 100),
            XxStatus::InvalidArgument
        );
        assert_eq!(xx_liouvillian_matrix(h.liouvillian, lr.as_mut_ptr(), li.as_mut_ptr(), 4096), XxStatus::Ok);
    }
    // Trace preservation: the diagonal positions of vec(ρ) sum each column to zero.
    for col in 0..64 {
        let s: f64 = (0..8).map(|k| lr[(9 * k) * 64 + col]).sum();
        let t: f64 = (0..8).map(|k| li[(9 * k) * 64 + col]).sum();
        assert!(s.abs() < 1e-12 && t.abs() < 1e-12);
    }
    let mut w = [0.0; 3];
    unsafe { assert_eq!(xx_params_omegas(h.params, w.as_mut_ptr()), XxStatus::Ok) };
    assert!((w[0] - 30.0).abs() < 1e-14 && w[1] > w[0] && w[0] > w[2]);
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("xxchain.h").exists());
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; header not compiled");
        return;
    }
    let lib = target_dir().join("libxxchain_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok 0.1.0"));
}
