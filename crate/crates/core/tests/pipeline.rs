use std::f64::consts::PI;
use std::process::Command;

use qtopo::encode::EncodingKind;
use qtopo::experiment::{
    bloch_plane_residual, compute_pipeline, compute_qmds, run_pipeline, Dataset, EncodingSpec,
    ExperimentConfig,
};
use qtopo::mds::{fs_distance_matrix, qmds, surrogate_objective, Coordinates, Schedule};
use qtopo::metric::{diameter, DistanceMatrix};
use qtopo::ph::barcodes_from_csv;
use qtopo::PureState;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qtopo"))
}

#[test]
fn pipeline_is_deterministic() {
    let cfg = ExperimentConfig::new(
        Dataset::NoisyCircle {
            n: 40,
            r: 1.0,
            sigma: 0.05,
            seed: 9,
        },
        EncodingSpec::new(EncodingKind::Iqp),
    );
    let a = compute_pipeline(&cfg).unwrap();
    let b = compute_pipeline(&cfg).unwrap();
    assert_eq!(a.encoded.entries(), b.encoded.entries());
    assert_eq!(a.comparison.to_csv(), b.comparison.to_csv());
}

#[test]
fn pipeline_writes_readable_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(
        Dataset::RootsOfUnity { n: 12, r: 1.0 },
        EncodingSpec::new(EncodingKind::Utd),
    );
    cfg.output_dir = Some(dir.path().to_path_buf());
    let (rep, files) = run_pipeline(&cfg).unwrap();
    assert!(files.iter().all(|f| f.exists()));
    let d = DistanceMatrix::from_csv(
        &std::fs::read_to_string(dir.path().join("encoded_distances.csv")).unwrap(),
    )
    .unwrap();
    assert_eq!(d.entries(), rep.encoded.entries());
    let bars = barcodes_from_csv(
        &std::fs::read_to_string(dir.path().join("original_barcodes.csv")).unwrap(),
    )
    .unwrap();
    assert_eq!(bars.len(), rep.original_diagrams.len());
    assert!(rep.comparison.bottleneck.iter().all(|b| *b < 1e-9));
}

#[test]
fn equator_is_an_exact_solution() {
    // equally spaced states on a Bloch great circle have 1 - F = sin^2(pi k / n)
    let n = 16;
    let d = DistanceMatrix::from_fn(n, |i, j| {
        let gap = (i as isize - j as isize).unsigned_abs();
        (PI * gap as f64 / n as f64).sin().powi(2)
    })
    .unwrap();
    let schedule = Schedule {
        rates: vec![1e-2, 1e-3],
        max_iter: 50_000,
        ..Schedule::default()
    };
    let res = qmds(&d, 2, Some(1.0), &schedule, 4).unwrap();
    let q = res.quantum.unwrap();
    assert!(q.normalized_distortion < 1e-3, "{q:?}");
    let Coordinates::Quantum(states) = &res.coordinates else {
        unreachable!()
    };
    let plane = bloch_plane_residual(states).unwrap();
    assert!(plane < 1e-2, "{plane}");
}

#[test]
fn ideal_circle_optimum_leaves_the_great_circle() {
    let n = 60;
    let cfg = ExperimentConfig::new(
        Dataset::RootsOfUnity { n, r: 1.0 },
        EncodingSpec::new(EncodingKind::Angle),
    );
    let d = cfg.base_distances(&cfg.dataset.cloud().unwrap()).unwrap();
    let w = diameter(&d);
    let planar: Vec<PureState> = (0..n)
        .map(|i| {
            let t = PI * i as f64 / n as f64;
            PureState::from_real(&[t.cos(), t.sin()]).unwrap()
        })
        .collect();
    let planar_value = surrogate_objective(&planar, &d, w).unwrap();
    let rep = compute_qmds(&cfg, 2, &Schedule::default(), &[0, 1]).unwrap();
    for (run, plane) in rep.runs.iter().zip(&rep.plane_residuals) {
        let Coordinates::Quantum(states) = &run.coordinates else {
            unreachable!()
        };
        let value = surrogate_objective(states, &d, w).unwrap();
        assert!(
            value < 0.9 * planar_value,
            "{value} vs great circle {planar_value}"
        );
        assert!(plane.unwrap() > 0.05);
        assert_eq!(fs_distance_matrix(states).unwrap().len(), n);
    }
}

#[test]
fn cli_roundtrip_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.csv");
    let y = dir.path().join("y.csv");
    let ok = bin()
        .args([
            "gen",
            "--dataset",
            "roots",
            "--n",
            "10",
            "--distances",
            "-o",
        ])
        .arg(&x)
        .status()
        .unwrap();
    assert!(ok.success());
    let ok = bin()
        .args([
            "encode",
            "--dataset",
            "roots",
            "--n",
            "10",
            "--encoding",
            "utd",
            "-o",
        ])
        .arg(&y)
        .status()
        .unwrap();
    assert!(ok.success());
    let out = bin().arg("compare").arg(&x).arg(&y).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,value\n"));

    let bars = dir.path().join("bars.csv");
    assert!(bin()
        .arg("ph")
        .arg("--input")
        .arg(&x)
        .arg("-o")
        .arg(&bars)
        .status()
        .unwrap()
        .success());
    let out = bin()
        .arg("bottleneck")
        .arg(&bars)
        .arg(&bars)
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("degree,distance"));
    for (k, line) in lines.enumerate() {
        let (deg, v) = line.split_once(',').unwrap();
        assert_eq!(deg.parse::<usize>().unwrap(), k);
        assert_eq!(v.parse::<f64>().unwrap(), 0.0);
    }

    assert_eq!(bin().arg("frobnicate").status().unwrap().code(), Some(1));
    assert_eq!(
        bin()
            .args(["ph", "--input"])
            .arg(dir.path().join("missing.csv"))
            .status()
            .unwrap()
            .code(),
        Some(1)
    );
    let dup = dir.path().join("dup.csv");
    std::fs::write(&dup, "0.5,0.5\n0.5,0.5\n0.5,0.5\n").unwrap();
    let code = bin()
        .args([
            "qmds",
            "--dataset",
            "file",
            "--encoding",
            "angle",
            "--input",
        ])
        .arg(&dup)
        .arg("--out-dir")
        .arg(dir.path())
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(2));
}
