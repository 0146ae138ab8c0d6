use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cafewall::experiments::{self, ExperimentConfig};
use cafewall::hough::HoughParams;
use cafewall::stimulus::StimulusSpec;

fn small_cfg(seed: u64, jobs: usize) -> ExperimentConfig {
    ExperimentConfig {
        stimulus: StimulusSpec::with_geometry(8, 12, 50, 2),
        hough: HoughParams { fill_gap: 10.0, min_length: 112.5, ..HoughParams::default() },
        crops: vec![(4, 5), (5, 6)],
        samples: 4,
        seed,
        jobs: Some(jobs),
        overlay: true,
        ..ExperimentConfig::default()
    }
}

fn run_into(cfg: &ExperimentConfig, root: &Path) -> BTreeMap<String, Vec<u8>> {
    let r1 = experiments::run_experiment1(cfg, None).unwrap();
    let mut files = experiments::write_experiment1(&r1, root).unwrap();
    experiments::update_manifest(root, "exp1", cfg, &files).unwrap();
    let r2 = experiments::run_experiment2(cfg, None).unwrap();
    let f2 = experiments::write_experiment2(&r2, root).unwrap();
    experiments::update_manifest(root, "exp2", cfg, &f2).unwrap();
    files.extend(f2);
    files.push(root.join("manifest.json"));
    files
        .into_iter()
        .map(|p| (p.strip_prefix(root).unwrap().display().to_string(), fs::read(&p).unwrap()))
        .collect()
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_into(&small_cfg(5, 1), a.path());
    let second = run_into(&small_cfg(5, 1), b.path());
    assert!(first.keys().any(|k| k.ends_with(".png")), "overlays missing: {:?}", first.keys());
    assert_eq!(first.keys().collect::<Vec<_>>(), second.keys().collect::<Vec<_>>());
    for (name, bytes) in &first {
        assert!(bytes == &second[name], "{name} differs between runs");
    }
}

#[test]
fn thread_count_does_not_change_outputs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let one = run_into(&small_cfg(5, 1), a.path());
    let three = run_into(&small_cfg(5, 3), b.path());
    assert_eq!(one, three);
}

#[test]
fn different_seeds_move_the_crops() {
    let a = experiments::run_experiment1(&small_cfg(1, 1), None).unwrap();
    let b = experiments::run_experiment1(&small_cfg(2, 1), None).unwrap();
    let pos = |r: &experiments::Experiment1Result| r.all_samples().map(|s| (s.top, s.left)).collect::<Vec<_>>();
    assert_ne!(pos(&a), pos(&b));
}

#[test]
fn crop_samples_step_by_the_offset() {
    let res = experiments::run_experiment1(&small_cfg(9, 1), None).unwrap();
    for set in &res.sets {
        let first = &set.samples[0];
        for (k, s) in set.samples.iter().enumerate() {
            assert_eq!(s.index, k);
            assert_eq!(s.top, first.top);
            assert_eq!(s.left, first.left + 4 * k);
        }
    }
}
