use std::path::PathBuf;
use std::process::Command;

fn header() -> String {
    std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/qtopo.h"))
        .unwrap()
}

#[test]
fn header_declares_the_api() {
    let h = header();
    for name in [
        "qtopo_last_error",
        "qtopo_distance_matrix_new",
        "qtopo_euclidean_distances",
        "qtopo_encoded_distances",
        "qtopo_rips_persistence",
        "qtopo_diagram_intervals",
        "qtopo_bottleneck",
        "qtopo_diagrams_free",
        "QTOPO_STATUS_NUMERIC",
        "typedef struct QtopoDistanceMatrix QtopoDistanceMatrix",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("t.c");
    std::fs::write(
        &src,
        "#include \"qtopo.h\"\nint main(void) { return qtopo_version() == 0; }\n",
    )
    .unwrap();
    let inc = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg("-I")
        .arg(&inc)
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success()),
        Err(e) => eprintln!("no C compiler available: {e}"),
    }
}
