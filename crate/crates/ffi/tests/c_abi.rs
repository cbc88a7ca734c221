//! Compiles `examples/smoke.c` against the generated header and the shared library.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let libdir = exe.parent().unwrap().parent().unwrap();
    if !libdir.join("liblbm_quartic_ffi.so").exists() {
        eprintln!("skipped: no shared library in {}", libdir.display());
        return;
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = std::env::temp_dir().join(format!("lq_smoke_{}", std::process::id()));
    let build = match Command::new(&cc)
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(libdir)
        .arg(format!("-Wl,-rpath,{}", libdir.display()))
        .args(["-llbm_quartic_ffi", "-lm", "-Wall", "-Werror", "-o"])
        .arg(&out)
        .output()
    {
        Ok(o) => o,
        Err(e) => {
            eprintln!("skipped: cannot run {cc}: {e}");
            return;
        }
    };
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    let text = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{text}{}", String::from_utf8_lossy(&run.stderr));
    assert!(text.contains("mu 0.013000000"), "{text}");
    assert!(text.contains("error singular parameter combination"), "{text}");
}
