use std::env;
use std::path::Path;

// The netlib backend links `-lcblas`, which Debian does not ship as a separate
// library; OpenBLAS exports the full CBLAS interface, so alias it.
fn main() {
    let out = env::var("OUT_DIR").unwrap();
    let alias = Path::new(&out).join("libcblas.so");
    if !alias.exists() {
        let _ = std::os::unix::fs::symlink("/usr/lib/x86_64-linux-gnu/libopenblas.so", &alias);
    }
    println!("cargo:rustc-link-search=native={out}");
}
