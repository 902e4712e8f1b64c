use std::process::Command;

fn main() {
    println!("cargo:rerun-if-env-changed=STEADY_GLIMM_GIT");
    let version = std::env::var("STEADY_GLIMM_GIT")
        .ok()
        .filter(|v| !v.is_empty())
        .or_else(|| {
            let out = Command::new("git").args(["describe", "--always", "--dirty", "--tags"]).output().ok()?;
            out.status.success().then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
        })
        .filter(|v| !v.is_empty())
        .unwrap_or_else(|| std::env::var("CARGO_PKG_VERSION").unwrap());
    println!("cargo:rustc-env=STEADY_GLIMM_VERSION={version}");
}
