use std::ffi::CStr;
use std::ptr;

use groundstate_ffi::*;

fn last_error() -> String {
    let p = gs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solve_roundtrip() {
    let mut h: *mut GsGroundState = ptr::null_mut();
    unsafe {
        assert_eq!(gs_solve(5, 2.0, 1.0, &mut h), GsStatus::Ok);
        assert!(!h.is_null());
        let mut m = 0.0;
        assert_eq!(gs_ground_state_m_star(h, &mut m), GsStatus::Ok);
        let mut n = 0usize;
        assert_eq!(gs_ground_state_len(h, &mut n), GsStatus::Ok);
        assert!(n > 100);

        let (mut r, mut u, mut du) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        assert_eq!(
            gs_ground_state_copy_profile(h, r.as_mut_ptr(), u.as_mut_ptr(), du.as_mut_ptr(), n - 1),
            GsStatus::BufferTooSmall
        );
        assert!(last_error().contains(&n.to_string()));
        assert_eq!(gs_ground_state_copy_profile(h, r.as_mut_ptr(), u.as_mut_ptr(), du.as_mut_ptr(), n), GsStatus::Ok);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
        assert!(u.windows(2).all(|w| w[0] >= w[1]));
        assert!((u[0] / m - 1.0).abs() < 1e-6);

        let (mut u0, mut du0) = (0.0, 0.0);
        assert_eq!(gs_ground_state_eval(h, 0.0, &mut u0, &mut du0), GsStatus::Ok);
        assert!((u0 / m - 1.0).abs() < 1e-9);
        assert_eq!(gs_ground_state_eval(h, -1.0, &mut u0, &mut du0), GsStatus::InvalidArgument);

        let mut f = GsFunctionals::default();
        assert_eq!(gs_ground_state_functionals(h, &mut f), GsStatus::Ok);
        let scale = f.grad_sq + f.mass + f.lp1 + f.l2s;
        assert!(f.nehari.abs() / scale < 1e-6);
        assert!(f.pohozaev.abs() / scale < 1e-6);

        let mut s = GsRescaled::default();
        assert_eq!(gs_ground_state_rescaled(h, &mut s), GsStatus::Ok);
        assert!(s.alpha > 0.0 && s.beta > 0.0 && s.h1dot_dist > 0.0);
        gs_ground_state_free(h);
        gs_ground_state_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_reported_per_thread() {
    let mut h: *mut GsGroundState = ptr::null_mut();
    unsafe {
        assert_eq!(gs_solve(3, 2.0, 1.0, &mut h), GsStatus::InvalidArgument);
        assert!(h.is_null());
        assert!(last_error().contains("3 < p < 5"));
        assert_eq!(gs_solve(2, 2.0, 1.0, &mut h), GsStatus::InvalidArgument);
        assert!(last_error().contains("d = 2"));
        assert_eq!(gs_solve(5, 2.0, 1.0, ptr::null_mut()), GsStatus::NullPointer);
        assert_eq!(gs_ground_state_m_star(ptr::null(), ptr::null_mut()), GsStatus::NullPointer);
    }
    // A fresh thread has no error yet.
    std::thread::spawn(|| assert!(gs_last_error_message().is_null())).join().unwrap();
}

#[test]
fn closed_forms_and_constants() {
    unsafe {
        let mut w = 0.0;
        assert_eq!(gs_talenti(5, 15f64.sqrt(), &mut w), GsStatus::Ok);
        assert!((w - 2f64.powf(-1.5)).abs() < 1e-15);
        assert_eq!(gs_lambda_w(5, 0.0, &mut w), GsStatus::Ok);
        assert!((w - 1.5).abs() < 1e-15);
        assert_eq!(gs_talenti(2, 1.0, &mut w), GsStatus::InvalidArgument);
        assert_eq!(gs_limit_constant(5, 2.0, &mut w), GsStatus::Ok);
        assert!((w / 61.8501 - 1.0).abs() < 1e-5);
        assert_eq!(gs_limit_constant(4, 2.0, &mut w), GsStatus::InvalidArgument);
    }
    let v = unsafe { CStr::from_ptr(gs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn pucci_serrin_summary() {
    let mut s = std::mem::MaybeUninit::<GsPsSummary>::uninit();
    unsafe {
        assert_eq!(gs_pscheck(4, 2.0, 10.0, s.as_mut_ptr()), GsStatus::Ok);
        let s = s.assume_init();
        assert_eq!(s.verdict, GsVerdict::Holds);
        assert!(!s.has_witness);
        assert_eq!(s.coefficients[0], 1.0);
    }
    let mut s = std::mem::MaybeUninit::<GsPsSummary>::uninit();
    unsafe {
        assert_eq!(gs_pscheck(7, 1.5, 1e4, s.as_mut_ptr()), GsStatus::Ok);
        let s = s.assume_init();
        assert_eq!(s.verdict, GsVerdict::Fails);
        assert!(s.has_witness && s.witness_g < 0.0);
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/groundstate.h");
    for name in [
        "gs_solve",
        "gs_ground_state_free",
        "gs_ground_state_m_star",
        "gs_ground_state_len",
        "gs_ground_state_copy_profile",
        "gs_ground_state_eval",
        "gs_ground_state_functionals",
        "gs_ground_state_rescaled",
        "gs_talenti",
        "gs_lambda_w",
        "gs_limit_constant",
        "gs_pscheck",
        "gs_last_error_message",
        "gs_version",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct GsGroundState GsGroundState;"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = std::env::temp_dir().join(format!("gs_hdr_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("t.c");
    std::fs::write(
        &src,
        "#include \"groundstate.h\"\nint main(void) { GsGroundState *h = 0; double m; \
         return gs_ground_state_m_star(h, &m) == GS_STATUS_NULL_POINTER ? 0 : 1; }\n",
    )
    .unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", include])
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}
