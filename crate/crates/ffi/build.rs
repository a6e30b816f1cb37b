use std::env;

fn main() {
    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    cbindgen::generate_with_config(
        &crate_dir,
        cbindgen::Config::from_file(format!("{crate_dir}/cbindgen.toml")).unwrap(),
    )
    .expect("unable to generate the C header")
    .write_to_file(format!("{crate_dir}/include/bibc.h"));
}
