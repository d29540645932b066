use std::fs;
use std::path::{Path, PathBuf};

use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use sha2::{Digest, Sha256};

use netmap_core::harness::{expand_sweep, parse_config, run_job, serialize_config, JobKind, Manifest, METRICS_FILE};
use netmap_core::Error;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn with_dir(text: &str, dir: &Path) -> String {
    format!("{text}\n[output]\ndir = {}\n", dir.display())
}

#[test]
fn every_shipped_config_parses() {
    let mut seen = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("cfg") {
            continue;
        }
        let text = fs::read_to_string(&path).unwrap();
        let spec = parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(parse_config(&serialize_config(&spec)).unwrap(), spec, "{}", path.display());
        if spec.kind == JobKind::Sweep {
            assert!(!expand_sweep(&spec).unwrap().is_empty());
        }
        seen += 1;
    }
    assert!(seen >= 30, "only {seen} configs");
}

const EQUI_M: &str = "[job]\nid = demo\nkind = equi-m\n[model]\nmodel = feedback\na = -2/3\nb = 1/3\nf = -1\n\
                      [render]\nresolution = 40, 30\n";

#[test]
fn render_job_writes_images_metrics_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let spec = parse_config(&with_dir(EQUI_M, dir.path())).unwrap();
    let report = run_job(&spec).unwrap();

    let names: Vec<&str> = report.manifest.entries.iter().map(|(name, _)| name.to_str().unwrap()).collect();
    for expected in ["demo-z1.pgm", "demo-z2.pgm", "demo-z3.pgm", "demo-intersection.pgm", METRICS_FILE] {
        assert!(names.contains(&expected), "{expected} missing from {names:?}");
    }
    let image = fs::read(dir.path().join("demo-intersection.pgm")).unwrap();
    let header = b"P5 40 30 255\n";
    assert_eq!(&image[..header.len()], header);
    assert_eq!(image.len(), header.len() + 40 * 30);

    for (name, digest) in &report.manifest.entries {
        let bytes = fs::read(dir.path().join(name)).unwrap();
        assert_eq!(&hex::encode(Sha256::digest(&bytes)), digest, "{}", name.display());
    }
    let listed = fs::read_to_string(dir.path().join(Manifest::FILE_NAME)).unwrap();
    assert_eq!(listed, report.manifest.to_text());

    let metrics = fs::read_to_string(dir.path().join(METRICS_FILE)).unwrap();
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("job_id,model,a,b,f,c,L,R,resolution"));
    assert!(lines[1].starts_with("demo,feedback,"));
}

#[test]
fn repeated_runs_give_identical_checksums() {
    let texts = [
        EQUI_M.to_string(),
        "[job]\nkind = multi-j-real\n[model]\nmodel = self-drive\na = 1/2\nb = 1\n[render]\nc = -0.5, -0.7, -0.6\nresolution = 16\n"
            .to_string(),
        "[job]\nkind = uni-j\nseed = 4\n[model]\nmodel = bipartite-random\nhalf = 3\nnxy = 4\nnyx = 2\ng = 1/4\n\
         [render]\nc = -0.62-0.62i\nresolution = 24\n"
            .to_string(),
    ];
    for text in texts {
        let (first, second) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let a = run_job(&parse_config(&with_dir(&text, first.path())).unwrap()).unwrap();
        let b = run_job(&parse_config(&with_dir(&text, second.path())).unwrap()).unwrap();
        assert_eq!(a.manifest, b.manifest);
        assert_eq!(
            fs::read(first.path().join(Manifest::FILE_NAME)).unwrap(),
            fs::read(second.path().join(Manifest::FILE_NAME)).unwrap()
        );
    }
}

#[test]
fn grid_sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[job]\nid = grid\nkind = sweep\ntarget = equi-m\n[model]\nmodel = self-drive\na = 0\nb = 0\n\
                [render]\nresolution = 16\n[sweep]\na = -2/3, -1/3, 0, 1/3, 2/3\nb = -1, -2/3, -1/3, 0, 1/3, 2/3, 1\n";
    let report = run_job(&parse_config(&with_dir(text, dir.path())).unwrap()).unwrap();
    assert_eq!(report.metrics.len(), 35);
    let metrics = fs::read_to_string(dir.path().join(METRICS_FILE)).unwrap();
    assert_eq!(metrics.lines().count(), 36);
    assert!(metrics.lines().nth(1).unwrap().starts_with("grid-000,self-drive,"));
    assert!(dir.path().join("grid-034-intersection.pgm").exists());
    assert_eq!(report.manifest.entries.len(), 35 * 4 + 1);
}

#[test]
fn analyze_job_lists_component_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[job]\nid = parts\nkind = analyze\ntarget = uni-j\n[model]\nmodel = self-drive\na = 0\nb = -1\n\
                [render]\nc = 0.25\nresolution = 64\n";
    let report = run_job(&parse_config(&with_dir(text, dir.path())).unwrap()).unwrap();
    let sizes = fs::read_to_string(dir.path().join("parts-components.csv")).unwrap();
    assert_eq!(sizes.lines().next(), Some("component,cells"));
    assert_eq!(sizes.lines().count(), report.metrics[0].component_count + 1);
}

#[test]
fn config_errors_name_their_line() {
    let cases = [
        ("[job]\nkind = equi-m\n[model]\nmodel = simple-dual\na = 0\n[render]\nradius = -1\n", 7),
        ("[job]\nkind = equi-m\n[model]\nmodel = simple-dual\na = 0\nwidth = 3\n", 6),
        ("[job]\nkind = uni-j\n[model]\nmodel = simple-dual\na = 0\n[render]\nc = 1+\n", 7),
        ("[job]\nkind = equi-m\nkind = uni-j\n", 3),
    ];
    for (text, line) in cases {
        match parse_config(text) {
            Err(Error::Parse { line: found, .. }) => assert_eq!(found, line, "{text}"),
            other => panic!("expected a parse error for {text:?}, got {other:?}"),
        }
    }
}

fn fraction() -> impl Strategy<Value = String> {
    (-9i32..=9, 1i32..=9).prop_map(|(p, q)| format!("{p}/{q}"))
}

fn decimal() -> impl Strategy<Value = String> {
    (-2.0f64..2.0).prop_map(|x| format!("{x}"))
}

fn real() -> impl Strategy<Value = String> {
    prop_oneof![fraction(), decimal()]
}

fn complex() -> impl Strategy<Value = String> {
    (real(), -2.0f64..2.0).prop_map(|(re, im)| if im < 0.0 { format!("{re}{im}i") } else { format!("{re}+{im}i") })
}

fn model_block() -> impl Strategy<Value = String> {
    prop_oneof![
        real().prop_map(|a| format!("model = simple-dual\na = {a}\n")),
        (real(), real()).prop_map(|(a, b)| format!("model = self-drive\na = {a}\nb = {b}\n")),
        (real(), real(), real()).prop_map(|(a, b, f)| format!("model = feedback\na = {a}\nb = {b}\nf = {f}\n")),
        (0u8..16, 0u8..16, real()).prop_map(|(x, y, g)| {
            let bits = |v: u8| (0..4).map(|k| ((v >> k) & 1).to_string()).collect::<Vec<_>>().join(", ");
            format!("model = bipartite\nhalf = 2\na1 = {}\na2 = {}\ng = {g}\n", bits(x), bits(y))
        }),
        (0usize..=9, 0usize..=9, real()).prop_map(|(x, y, g)| format!(
            "model = bipartite-random\nhalf = 3\nnxy = {x}\nnyx = {y}\ng = {g}\n"
        )),
    ]
}

fn job_text() -> impl Strategy<Value = String> {
    (
        prop_oneof![Just("equi-m"), Just("uni-j")],
        model_block(),
        complex(),
        (1usize..500, 1usize..500),
        1u32..400,
        0.5f64..50.0,
        prop_oneof![Just(4u32), Just(8u32)],
        any::<u64>(),
    )
        .prop_map(|(kind, model, c, (nx, ny), budget, radius, conn, seed)| {
            let c_line = if kind == "uni-j" { format!("c = {c}\n") } else { String::new() };
            format!(
                "[job]\nkind = {kind}\nseed = {seed}\n[model]\n{model}[render]\n{c_line}resolution = {nx}, {ny}\n\
                 iterations = {budget}\nradius = {radius}\nconnectivity = {conn}\n"
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        rng_seed: RngSeed::Fixed(23),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn configs_survive_a_round_trip(text in job_text()) {
        let spec = parse_config(&text).unwrap();
        let written = serialize_config(&spec);
        let again = parse_config(&written).unwrap();
        prop_assert_eq!(&again, &spec);
        prop_assert_eq!(serialize_config(&again), written);
    }
}
