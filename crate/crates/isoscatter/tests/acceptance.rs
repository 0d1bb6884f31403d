//! Acceptance suite: the ideal-model identities the artifact must
//! reproduce, one test per criterion, each printing a PASS line with the
//! measured figure (visible with `cargo test -- --nocapture`).

use std::process::Command;
use std::time::Instant;

use nalgebra::{Complex, ComplexField};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use isoscatter::analysis::{
    check_transplantation, compare_isoscattering, sweep, TransplantationMatrix,
};
use isoscatter::graph::{
    builtin_graph, builtin_source, Bond, BoundaryCondition, BuiltinGraph, Lead, MetricGraph, Vertex,
};
use isoscatter::io::{parse_graph, serialize_graph, sweep_csv_string};
use isoscatter::solver::{eigenvalues, find_poles, scattering_matrix, wavenumber, LossModel};

const NU_MIN: f64 = 0.01e9;
const NU_MAX: f64 = 1.7e9;
const POINTS: usize = 2048;

fn pair() -> (MetricGraph<f64>, MetricGraph<f64>) {
    (
        builtin_graph::<f64>(BuiltinGraph::I),
        builtin_graph::<f64>(BuiltinGraph::II),
    )
}

#[test]
fn a1_isoscattering_determinants_agree() {
    let (a, b) = pair();
    let started = Instant::now();
    let sweep_a = sweep(&a, NU_MIN, NU_MAX, POINTS, &LossModel::Lossless).unwrap();
    let sweep_b = sweep(&b, NU_MIN, NU_MAX, POINTS, &LossModel::Lossless).unwrap();
    let elapsed = started.elapsed();
    let report = compare_isoscattering(&sweep_a, &sweep_b, 1e-9, 1e-9).unwrap();

    assert!(
        report.max_det_abs_diff < 1e-9,
        "max |det difference| = {}",
        report.max_det_abs_diff
    );
    assert!(
        report.max_phase_diff < 1e-9,
        "max phase difference = {}",
        report.max_phase_diff
    );
    assert!(report.verdict_isoscattering);
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "two {POINTS}-point sweeps took {elapsed:?}"
    );
    // lossless unitarity keeps |det| pinned to 1 on the whole grid
    for record in [&sweep_a, &sweep_b] {
        assert!(record.gaps.is_empty());
        for amp in record.det_amplitude.iter().flatten() {
            assert!((amp - 1.0).abs() < 1e-10, "|det| = {amp}");
        }
    }
    println!(
        "A1 isoscattering: PASS (max det diff {:.2e}, max phase diff {:.2e}, {} pts in {:.2?})",
        report.max_det_abs_diff, report.max_phase_diff, POINTS, elapsed
    );
}

#[test]
fn a2_transplantation_lossless_and_lossy() {
    let (a, b) = pair();
    let t = TransplantationMatrix::default();
    let mut figures = Vec::new();
    for loss in [LossModel::Lossless, LossModel::Constant { im_k: 0.02 }] {
        let sweep_a = sweep(&a, NU_MIN, NU_MAX, POINTS, &loss).unwrap();
        let sweep_b = sweep(&b, NU_MIN, NU_MAX, POINTS, &loss).unwrap();
        let residual = check_transplantation(&sweep_a, &sweep_b, &t).unwrap();
        assert!(residual < 1e-9, "residual {residual} with loss {loss}");
        figures.push(residual);
    }
    println!(
        "A2 transplantation: PASS (residual lossless {:.2e}, with Im k = 0.02: {:.2e})",
        figures[0], figures[1]
    );
}

#[test]
fn a3_unitarity_and_subunitarity() {
    let (a, b) = pair();
    let mut rng = StdRng::seed_from_u64(0x5ca77e12);
    let mut worst_defect = 0.0f64;
    let mut worst_sv = 0.0f64;
    for _ in 0..512 {
        let nu = rng.gen_range(NU_MIN..NU_MAX);
        for graph in [&a, &b] {
            let s = scattering_matrix(graph, nu, &LossModel::Lossless).unwrap();
            worst_defect = worst_defect.max(s.unitarity_defect());
            for loss in [
                LossModel::Constant { im_k: 0.02 },
                LossModel::SqrtFrequency {
                    beta: 0.01,
                    nu_ref: 1e9,
                },
            ] {
                let s = scattering_matrix(graph, nu, &loss).unwrap();
                let top = s.singular_values()[0];
                assert!(top <= 1.0, "singular value {top} > 1 at nu = {nu}");
                worst_sv = worst_sv.max(top);
            }
        }
    }
    assert!(worst_defect < 1e-10, "unitarity defect {worst_defect}");
    println!(
        "A3 unitarity: PASS (max lossless defect {:.2e}, max lossy singular value {:.6})",
        worst_defect, worst_sv
    );
}

#[test]
fn a4_broken_symmetry_departs() {
    let (a, b) = pair();
    let broken = b
        .with_boundary_override(5, BoundaryCondition::Dirichlet)
        .unwrap();
    let sweep_a = sweep(&a, NU_MIN, NU_MAX, POINTS, &LossModel::Lossless).unwrap();
    let sweep_b = sweep(&broken, NU_MIN, NU_MAX, POINTS, &LossModel::Lossless).unwrap();
    let report = compare_isoscattering(&sweep_a, &sweep_b, 1e-8, 1e-8).unwrap();

    assert!(!report.verdict_isoscattering, "verdict must be false");
    assert!(
        report.max_det_abs_diff > 0.1,
        "max det diff {} not > 0.1",
        report.max_det_abs_diff
    );
    assert!(
        report.max_phase_diff > 0.1,
        "max phase diff {} not > 0.1",
        report.max_phase_diff
    );
    println!(
        "A4 broken symmetry: PASS (det diff {:.3}, phase diff {:.3}, verdict false)",
        report.max_det_abs_diff, report.max_phase_diff
    );
}

#[test]
fn a5_closed_graphs_are_isospectral() {
    let (a, b) = pair();
    let spectrum_a = eigenvalues(&a.without_leads(), 0.05, 62.0, 0.02).unwrap();
    let spectrum_b = eigenvalues(&b.without_leads(), 0.05, 62.0, 0.02).unwrap();
    let ka = spectrum_a.eigen_k();
    let kb = spectrum_b.eigen_k();
    assert!(ka.len() >= 20, "found only {} eigenvalues", ka.len());
    assert!(kb.len() >= 20, "found only {} eigenvalues", kb.len());
    let mut worst = 0.0f64;
    for (x, y) in ka.iter().zip(kb.iter()).take(20) {
        let rel = (x - y).abs() / x.abs();
        worst = worst.max(rel);
        assert!(rel < 1e-6, "eigenvalues {x} vs {y}: relative {rel}");
    }
    println!(
        "A5 isospectrality: PASS (first 20 closed-graph eigenvalues, worst relative {:.2e})",
        worst
    );
}

#[test]
fn a6_wavelength_count() {
    let (a, b) = pair();
    for (name, graph) in [("I", &a), ("II", &b)] {
        let count = graph.wavelength_count(1.7e9).unwrap();
        assert!(
            (count - 5.96).abs() < 0.01,
            "graph {name}: {count} wavelengths"
        );
    }
    println!(
        "A6 wavelength count: PASS ({:.4} wavelengths at 1.7 GHz, both graphs)",
        a.wavelength_count(1.7e9).unwrap()
    );
}

#[test]
fn a7_analytic_stub_identities() {
    let stub = |far: BoundaryCondition| -> MetricGraph<f64> {
        MetricGraph::new(
            vec![
                Vertex {
                    id: 0,
                    bc: BoundaryCondition::Neumann,
                },
                Vertex { id: 1, bc: far },
            ],
            vec![Bond {
                id: 0,
                endpoint_a: 0,
                endpoint_b: 1,
                optical_length: 0.3,
            }],
            vec![Lead { port: 0, vertex: 0 }],
        )
    };
    let mut worst = 0.0f64;
    for i in 0..=256 {
        let nu = NU_MIN + (NU_MAX - NU_MIN) * i as f64 / 256.0;
        let k = wavenumber(nu, &LossModel::Lossless).unwrap().k;
        let phase = (Complex::new(0.0, 2.0 * 0.3) * k).exp();
        for (far, expected) in [
            (BoundaryCondition::Dirichlet, -phase),
            (BoundaryCondition::Neumann, phase),
        ] {
            let s = scattering_matrix(&stub(far), nu, &LossModel::Lossless).unwrap();
            let deviation = (s.entry(0, 0) - expected).modulus();
            worst = worst.max(deviation);
            assert!(deviation < 1e-12, "stub deviation {deviation} at nu = {nu}");
        }
    }
    println!(
        "A7 analytic stubs: PASS (worst deviation {:.2e} across the band)",
        worst
    );
}

#[test]
fn a8_pole_sets_coincide() {
    let (a, b) = pair();
    let poles_a = find_poles(&a, (0.0, 40.0), (-3.0, 0.0), (400, 60)).unwrap();
    let poles_b = find_poles(&b, (0.0, 40.0), (-3.0, 0.0), (400, 60)).unwrap();
    assert_eq!(
        poles_a.poles.len(),
        poles_b.poles.len(),
        "pole counts differ: {} vs {}",
        poles_a.poles.len(),
        poles_b.poles.len()
    );
    assert!(!poles_a.poles.is_empty(), "no poles found in the rectangle");
    let mut worst = 0.0f64;
    for (pa, pb) in poles_a.poles.iter().zip(&poles_b.poles) {
        let distance = (pa.k - pb.k).modulus();
        worst = worst.max(distance);
        assert!(distance < 1e-6, "poles {:?} vs {:?}", pa.k, pb.k);
    }
    println!(
        "A8 pole coincidence: PASS ({} poles each, worst pairwise distance {:.2e})",
        poles_a.poles.len(),
        worst
    );
}

#[test]
fn a9_determinism_round_trip_and_exit_codes() {
    // byte-identical CSV across repeated in-process runs
    let (a, _) = pair();
    let first = sweep_csv_string(&sweep(&a, NU_MIN, NU_MAX, 256, &LossModel::Lossless).unwrap());
    let second = sweep_csv_string(&sweep(&a, NU_MIN, NU_MAX, 256, &LossModel::Lossless).unwrap());
    assert_eq!(first, second, "sweep CSV not deterministic");

    // parse . serialize is the identity on the bundled graphs
    for which in [BuiltinGraph::I, BuiltinGraph::II] {
        let parsed = parse_graph::<f64>(builtin_source(which)).unwrap();
        assert_eq!(parsed, builtin_graph::<f64>(which));
        assert_eq!(serialize_graph(&parsed), builtin_source(which));
    }

    // exit-code contract: 0 success, 2 property violated, 1 error
    let binary = env!("CARGO_BIN_EXE_isoscatter");
    let run = |args: &[&str]| {
        Command::new(binary)
            .args(args)
            .output()
            .expect("binary runs")
    };

    let ok = run(&["compare", "paper-I", "paper-II", "--points", "64"]);
    assert_eq!(ok.status.code(), Some(0), "stdout: {:?}", ok.stdout);

    let violated = run(&[
        "compare",
        "paper-I",
        "paper-II",
        "--points",
        "64",
        "--set-bc",
        "5:dirichlet@b",
    ]);
    assert_eq!(violated.status.code(), Some(2));

    let error = run(&["sweep", "missing.json"]);
    assert_eq!(error.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&error.stderr);
    assert!(
        stderr.contains("file not found: missing.json"),
        "stderr: {stderr}"
    );

    // byte-identical CSV across repeated binary runs
    let csv_a = run(&["sweep", "paper-I", "--points", "128"]);
    let csv_b = run(&["sweep", "paper-I", "--points", "128"]);
    assert_eq!(csv_a.status.code(), Some(0));
    assert_eq!(csv_a.stdout, csv_b.stdout);

    println!("A9 determinism, round-trip, exit codes: PASS");
}
