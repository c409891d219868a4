use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use mdlnet_ffi::*;

const XY: &str = "network xy
var X 2
var Y 2
parents Y X
cpt X : 0.7 0.3
cpt Y | X=0 : 0.8 0.2
cpt Y | X=1 : 0.1 0.9
";

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(mdlnet_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

fn parse(text: &str) -> *mut MdlnetNetwork {
    let mut net = ptr::null_mut();
    let st = unsafe { mdlnet_network_parse(c(text).as_ptr(), &mut net) };
    assert_eq!(st, MdlnetStatus::Ok, "{}", last_error());
    net
}

fn take_string(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { mdlnet_string_free(p) };
    s
}

#[test]
fn network_round_trip() {
    let net = parse(XY);
    let mut out = ptr::null_mut();
    let name = c("xy");
    assert_eq!(
        unsafe { mdlnet_network_to_string(net, name.as_ptr(), &mut out) },
        MdlnetStatus::Ok
    );
    let text = take_string(out);
    assert_eq!(text, XY);
    let mut n = 0usize;
    assert_eq!(
        unsafe { mdlnet_network_num_vars(net, &mut n) },
        MdlnetStatus::Ok
    );
    assert_eq!(n, 2);
    let mut p = 0.0;
    let a = [1usize, 0];
    assert_eq!(
        unsafe { mdlnet_network_joint_prob(net, a.as_ptr(), 2, &mut p) },
        MdlnetStatus::Ok
    );
    assert!((p - 0.03).abs() < 1e-12);
    let bad = [2usize, 0];
    assert_eq!(
        unsafe { mdlnet_network_joint_prob(net, bad.as_ptr(), 2, &mut p) },
        MdlnetStatus::Input
    );
    unsafe { mdlnet_network_free(net) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut net = ptr::null_mut();
    let st = unsafe { mdlnet_network_parse(c("network a\nvar X two\n").as_ptr(), &mut net) };
    assert_eq!(st, MdlnetStatus::Input);
    assert!(net.is_null());
    assert!(last_error().contains("line 2"), "{}", last_error());

    assert_eq!(
        unsafe { mdlnet_network_parse(ptr::null(), &mut net) },
        MdlnetStatus::NullPointer
    );
    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { mdlnet_network_parse(invalid.as_ptr() as *const c_char, &mut net) },
        MdlnetStatus::InvalidUtf8
    );

    let csv = c("X0,X1,X2,X3,X4,X5\n0,0,0,0,0,0\n");
    let mut data = ptr::null_mut();
    assert_eq!(
        unsafe { mdlnet_dataset_parse_csv(csv.as_ptr(), ptr::null(), &mut data) },
        MdlnetStatus::Ok
    );
    let mut learned = ptr::null_mut();
    let st = unsafe {
        mdlnet_learn(
            data,
            c("bic").as_ptr(),
            MdlnetLearnMode::Exhaustive,
            1,
            0.0,
            0.0,
            0,
            &mut learned,
            ptr::null_mut(),
        )
    };
    assert_eq!(st, MdlnetStatus::Capacity);
    assert!(learned.is_null());
    unsafe { mdlnet_dataset_free(data) };
}

#[test]
fn sample_learn_and_score() {
    let net = parse(XY);
    let mut data = ptr::null_mut();
    assert_eq!(
        unsafe { mdlnet_network_sample(net, 5000, 11, &mut data) },
        MdlnetStatus::Ok
    );
    let mut rows = 0usize;
    assert_eq!(
        unsafe { mdlnet_dataset_num_rows(data, &mut rows) },
        MdlnetStatus::Ok
    );
    assert_eq!(rows, 5000);

    let mut learned = ptr::null_mut();
    let mut learned_score = 0.0;
    let st = unsafe {
        mdlnet_learn(
            data,
            c("bic").as_ptr(),
            MdlnetLearnMode::Greedy,
            2,
            0.0,
            0.0,
            5,
            &mut learned,
            &mut learned_score,
        )
    };
    assert_eq!(st, MdlnetStatus::Ok, "{}", last_error());
    let mut params = 0u64;
    assert_eq!(
        unsafe { mdlnet_network_param_count(learned, &mut params) },
        MdlnetStatus::Ok
    );
    assert_eq!(params, 3);

    let (mut s_xy, mut s_yx, mut ll) = (0.0, 0.0, 0.0);
    let bic = c("bic");
    unsafe {
        assert_eq!(
            mdlnet_score(data, c("X->Y").as_ptr(), bic.as_ptr(), &mut s_xy, &mut ll),
            MdlnetStatus::Ok
        );
        assert_eq!(
            mdlnet_score(
                data,
                c("Y->X").as_ptr(),
                bic.as_ptr(),
                &mut s_yx,
                ptr::null_mut()
            ),
            MdlnetStatus::Ok
        );
    }
    assert_eq!(s_xy, s_yx);
    assert_eq!(s_xy, learned_score);
    assert!(ll < 0.0);

    let mut csv = ptr::null_mut();
    assert_eq!(
        unsafe { mdlnet_dataset_to_csv(data, &mut csv) },
        MdlnetStatus::Ok
    );
    let csv = take_string(csv);
    assert!(csv.starts_with("X,Y\n"));
    let mut again = ptr::null_mut();
    let csv_c = c(&csv);
    assert_eq!(
        unsafe { mdlnet_dataset_parse_csv(csv_c.as_ptr(), net, &mut again) },
        MdlnetStatus::Ok
    );
    unsafe {
        mdlnet_dataset_free(again);
        mdlnet_network_free(learned);
        mdlnet_dataset_free(data);
        mdlnet_network_free(net);
    }
}

#[test]
fn bound_functions() {
    assert!((mdlnet_sanov_bound(100, 4, 0.5) - 101f64.powi(4) * 2f64.powi(-50)).abs() < 1e-20);
    assert!(mdlnet_skew_bound(10_000, 4, 0.25) > 1.0);
    let mut n = 0u64;
    let bic = c("bic");
    assert_eq!(
        unsafe { mdlnet_ideal_case_n(2, 0.1, bic.as_ptr(), &mut n) },
        MdlnetStatus::Ok
    );
    assert_eq!(n, 59);
    let mut x = 0.0;
    assert_eq!(unsafe { mdlnet_f_inverse(2.0, &mut x) }, MdlnetStatus::Ok);
    assert!((x - 4.0).abs() < 1e-9);
    assert_eq!(
        unsafe { mdlnet_f_inverse(1.0, &mut x) },
        MdlnetStatus::Input
    );

    let (mut e, mut valid) = (0.0, -1);
    assert_eq!(
        unsafe { mdlnet_lemma37_e(1e-3, 1e-4, 4.0, 0.2, &mut e, &mut valid) },
        MdlnetStatus::Ok
    );
    assert_eq!(valid, 0);
    assert_eq!(
        unsafe { mdlnet_lemma37_e(0.0, 0.0, 4.0, 0.2, &mut e, &mut valid) },
        MdlnetStatus::Ok
    );
    assert_eq!((valid, e), (1, 0.0));

    assert_eq!(
        unsafe { mdlnet_family_sample_size(2, 0.5, 0.2, 0.1, &mut n) },
        MdlnetStatus::Ok
    );
    assert_eq!(
        n,
        mdlnet::learn::family_sample_size(2, 0.5, 0.2, 0.1).unwrap()
    );

    let (mut feasible, mut a, mut b) = (-1, 0.0, 0.0);
    let st = unsafe {
        mdlnet_sample_complexity(
            0.1,
            0.1,
            2,
            4,
            0.2,
            2,
            bic.as_ptr(),
            &mut feasible,
            &mut n,
            &mut a,
            &mut b,
        )
    };
    assert_eq!(st, MdlnetStatus::Ok, "{}", last_error());
    assert_eq!(feasible, 1);
    assert!(n > 0 && a > 0.0 && b > 0.0);
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mdlnet.h"))
            .unwrap();
    let source =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20, "{exports:?}");
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    for status in [
        "MDLNET_STATUS_OK = 0",
        "MDLNET_STATUS_INPUT = 1",
        "MDLNET_STATUS_CAPACITY = 2",
    ] {
        assert!(header.contains(status), "{status}");
    }
    assert!(header.contains("typedef struct MdlnetNetwork MdlnetNetwork;"));
}

#[test]
fn c_program_links_and_runs() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libmdlnet_ffi.a");
    assert!(
        lib.exists(),
        "static library not found at {}",
        lib.display()
    );
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("mdlnet_smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), "c smoke test ok\n");
}
