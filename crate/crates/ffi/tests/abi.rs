use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use steady_glimm_ffi::*;

const BACKGROUND: &str = r#"
[upstream]
y0 = -0.5
pieces = [
  { y_hi = 0.0, u = 2.4, p = 1.0, rho = 0.8 },
  { y_hi = -0.5, u = 2.0, p = 1.0, rho = 1.0 },
]
[scheme]
h = 0.02
x_max = 0.2
"#;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sg_last_error()) }.to_string_lossy().into_owned()
}

fn parse(text: &str) -> (SgStatus, *mut SgConfig) {
    let c = CString::new(text).unwrap();
    let mut cfg = ptr::null_mut();
    let st = unsafe { sg_config_parse(c.as_ptr(), &mut cfg) };
    (st, cfg)
}

#[test]
fn background_round_trip() {
    let (st, cfg) = parse(BACKGROUND);
    assert_eq!(st, SgStatus::Ok, "{}", last_error());
    let mut field = ptr::null_mut();
    unsafe {
        assert_eq!(sg_run(cfg, &mut field), SgStatus::Ok, "{}", last_error());
        let n = sg_field_column_count(field);
        assert_eq!(n, 11);
        let m = sg_field_cell_count(field, n - 1);
        assert!(m > 2);
        let mut top = SgCell::default();
        assert_eq!(sg_field_cell(field, n - 1, m - 1, &mut top), SgStatus::Ok);
        assert_eq!((top.u, top.p, top.rho), (2.4, 1.0, 0.8));
        let (mut x, mut chi) = (0.0, 0.0);
        assert_eq!(sg_field_contact(field, n - 1, &mut x, &mut chi), SgStatus::Ok);
        assert!((x - 0.2).abs() < 1e-12 && (chi + 0.5).abs() < 1e-12);
        let mut sup = f64::NAN;
        assert_eq!(sg_field_compare_sup(field, &mut sup), SgStatus::Ok, "{}", last_error());
        assert!(sup < 1e-10, "{sup}");
        assert_eq!(sg_field_cell(field, n, 0, &mut top), SgStatus::OutOfRange);
        assert!(last_error().contains("no cell"));
        sg_field_free(field);
        sg_config_free(cfg);
    }
}

#[test]
fn probe_matches_closed_forms() {
    let (_, cfg) = parse(BACKGROUND);
    let mut p = SgProbe::default();
    unsafe {
        assert_eq!(sg_probe(cfg, &mut p), SgStatus::Ok);
        sg_config_free(cfg);
    }
    assert!(((p.k_b - p.k_b_closed) / p.k_b_closed).abs() < 1e-3);
    assert!((p.k25 - p.k25_closed).abs() < 1e-3 && p.k25.abs() < 1.0);
}

#[test]
fn error_codes() {
    let (st, cfg) = parse("[scheme");
    assert_eq!(st, SgStatus::Parse);
    assert!(cfg.is_null());
    assert!(last_error().contains("line 1"));

    let (st, _) = parse(&BACKGROUND.replace("u = 2.0", "u = 0.5"));
    assert_eq!(st, SgStatus::Validation);
    assert!(last_error().contains("(H2)"));

    let (_, cfg) = parse(BACKGROUND);
    unsafe {
        assert_eq!(sg_config_set_h(cfg, -1.0), SgStatus::Validation);
        assert_eq!(sg_config_set_seed(cfg, 3), SgStatus::Ok);
        assert_eq!(last_error(), "");
        assert_eq!(sg_run(cfg, ptr::null_mut()), SgStatus::NullPointer);
        assert_eq!(sg_run(ptr::null(), &mut ptr::null_mut()), SgStatus::NullPointer);
        assert_eq!(sg_field_column_count(ptr::null()), 0);
        sg_config_free(cfg);
        sg_config_free(ptr::null_mut());
        sg_field_free(ptr::null_mut());
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(sg_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/steady_glimm.h");
    assert!(header.exists());
    let src = std::env::temp_dir().join(format!("sg_header_{}.c", std::process::id()));
    std::fs::write(
        &src,
        "#include \"steady_glimm.h\"\n\
         int main(void) {\n\
           SgConfig *c = 0; SgField *f = 0; SgCell cell; SgProbe p; double x, chi;\n\
           if (sg_config_parse(\"\", &c) != SG_STATUS_OK) return 1;\n\
           sg_config_set_seed(c, 1); sg_config_set_h(c, 0.01);\n\
           sg_run(c, &f); sg_field_cell(f, 0, 0, &cell); sg_field_contact(f, 0, &x, &chi);\n\
           sg_field_compare_sup(f, &x); sg_probe(c, &p);\n\
           (void)sg_field_column_count(f); (void)sg_field_cell_count(f, 0);\n\
           (void)sg_last_error(); (void)sg_version();\n\
           sg_field_free(f); sg_config_free(c); return 0;\n\
         }\n",
    )
    .unwrap();
    let status = match Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status()
    {
        Ok(s) => s,
        Err(_) => {
            eprintln!("no C compiler; skipping");
            return;
        }
    };
    let _ = std::fs::remove_file(&src);
    assert!(status.success());
}
