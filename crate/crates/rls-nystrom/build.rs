fn main() {
    // LAPACK/BLAS come from the system OpenBLAS; no vendored build.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
