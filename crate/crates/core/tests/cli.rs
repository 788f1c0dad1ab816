mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::write_fixture_tree;
use rsh_augment::cli::preview_cell_seed;
use rsh_augment::imgio;
use rsh_augment::pipeline::{digest_hex, Manifest};
use rsh_augment::Image;

fn rsh(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsh"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn sample(dir: &Path) {
    let data = (0..32 * 24 * 3).map(|i| (i * 7 % 256) as u8).collect();
    imgio::save_image(&Image::new(32, 24, 3, data).unwrap(), &dir.join("a.png")).unwrap();
}

#[test]
fn apply_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path());
    let args = [
        "apply", "--op", "rsh", "--force", "--seed", "7", "-i", "a.png", "-o", "b.png",
    ];
    assert_eq!(code(&rsh(&args, dir.path())), 0);
    let first = fs::read(dir.path().join("b.png")).unwrap();
    assert_eq!(code(&rsh(&args, dir.path())), 0);
    assert_eq!(first, fs::read(dir.path().join("b.png")).unwrap());
    assert_ne!(first, fs::read(dir.path().join("a.png")).unwrap());
}

#[test]
fn apply_with_p_zero_re_encodes_the_input() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path());
    fs::write(dir.path().join("p0.json"), r#"{"rsh": {"p": 0}}"#).unwrap();
    let o = rsh(
        &[
            "apply", "--op", "rsh", "--config", "p0.json", "-i", "a.png", "-o", "b.png",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let input = imgio::load_image(&dir.path().join("a.png")).unwrap();
    let expected = imgio::encode_image(&input, imgio::FileFormat::Png).unwrap();
    assert_eq!(fs::read(dir.path().join("b.png")).unwrap(), expected);
}

#[test]
fn apply_verbose_prints_draws() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path());
    let o = rsh(
        &[
            "apply", "--op", "rsh", "--force", "-v", "-i", "a.png", "-o", "b.png",
        ],
        dir.path(),
    );
    let text = stdout(&o);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("draw ")).count(),
        7,
        "{text}"
    );
    assert!(text.contains("shadow_factor"));
    assert!(text.contains("mask area fraction"));
}

#[test]
fn bad_config_exits_two_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path());
    fs::write(
        dir.path().join("bad.json"),
        r#"{"rsh": {"shadow_range": [0.8, 0.2]}}"#,
    )
    .unwrap();
    let o = rsh(
        &[
            "apply", "--op", "rsh", "--config", "bad.json", "-i", "a.png", "-o", "b.png",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("shadow_range"), "{}", stderr(&o));

    fs::write(
        dir.path().join("typo.json"),
        r#"{"rsh": {"shadow_rnage": [0, 1]}}"#,
    )
    .unwrap();
    let o = rsh(
        &[
            "apply",
            "--op",
            "rsh",
            "--config",
            "typo.json",
            "-i",
            "a.png",
            "-o",
            "b.png",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("shadow_rnage"));
}

#[test]
fn apply_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path());
    assert_eq!(
        code(&rsh(
            &["apply", "--op", "blur", "-i", "a.png", "-o", "b.png"],
            dir.path()
        )),
        2
    );
    assert_eq!(
        code(&rsh(
            &["apply", "--op", "rsh", "-i", "missing.png", "-o", "b.png"],
            dir.path()
        )),
        1
    );
    let o = rsh(
        &["apply", "--op", "rsh", "-i", "a.png", "-o", "b.jpg"],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("lossy"));
}

#[test]
fn dataset_corrupts_every_image_at_p_one() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture_tree(&dir.path().join("in"), 10, None, 11);
    let o = rsh(
        &[
            "dataset", "--input", "in", "--output", "out", "--op", "rsh", "--p", "1",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("gating rate:  1.0000"));
    let m = Manifest::read(&dir.path().join("out/manifest.json")).unwrap();
    assert_eq!(m.records.len(), 10);
    assert!(m.records.iter().all(|r| r.applied));
}

#[test]
fn dataset_jobs_do_not_change_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture_tree(&dir.path().join("in"), 30, None, 12);
    for (jobs, out) in [("1", "o1"), ("4", "o4")] {
        let o = rsh(
            &[
                "dataset",
                "-i",
                "in",
                "-o",
                out,
                "--op",
                "disk",
                "--jobs",
                jobs,
                "--seed",
                "5",
                "--manifest",
                &format!("{out}.json"),
            ],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    assert_eq!(
        fs::read(dir.path().join("o1.json")).unwrap(),
        fs::read(dir.path().join("o4.json")).unwrap()
    );
}

#[test]
fn dataset_passthrough_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture_tree(&dir.path().join("in"), 6, None, 13);
    let o = rsh(
        &["dataset", "-i", "in", "-o", "out", "--op", "none"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let m = Manifest::read(&dir.path().join("out/manifest.json")).unwrap();
    assert!(m.records.iter().all(|r| r.input_digest == r.output_digest));

    fs::create_dir(dir.path().join("empty")).unwrap();
    assert_eq!(
        code(&rsh(
            &["dataset", "-i", "empty", "-o", "x", "--op", "rsh"],
            dir.path()
        )),
        1
    );
    assert_eq!(
        code(&rsh(
            &["dataset", "-i", "in", "-o", "x", "--op", "rsh", "--p", "1.5"],
            dir.path()
        )),
        2
    );
    assert_eq!(
        code(&rsh(
            &["dataset", "-i", "in", "-o", "x", "--op", "rsh", "--jobs", "0"],
            dir.path()
        )),
        2
    );
}

#[test]
fn preview_cell_matches_forced_apply() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path());
    let o = rsh(
        &[
            "preview", "-i", "a.png", "--grid", "1x1", "--seed", "9", "-o", "grid.png",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let cell_seed = preview_cell_seed(9, 0).to_string();
    let o = rsh(
        &[
            "apply", "--op", "rsh", "--force", "--seed", &cell_seed, "-i", "a.png", "-o", "one.png",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(dir.path().join("grid.png")).unwrap(),
        fs::read(dir.path().join("one.png")).unwrap()
    );
}

#[test]
fn preview_montage_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    imgio::save_image(
        &Image::filled(64, 64, 3, 100).unwrap(),
        &dir.path().join("sq.png"),
    )
    .unwrap();
    let o = rsh(
        &["preview", "-i", "sq.png", "--grid", "3x3", "-o", "m.png"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let m = imgio::load_image(&dir.path().join("m.png")).unwrap();
    assert_eq!((m.width(), m.height()), (192, 192));
    assert_eq!(
        code(&rsh(
            &["preview", "-i", "sq.png", "--grid", "0x3"],
            dir.path()
        )),
        2
    );
}

#[test]
fn stats_reads_manifests() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture_tree(&dir.path().join("in"), 8, None, 14);
    rsh(
        &[
            "dataset", "-i", "in", "-o", "out", "--op", "rsh", "--p", "1",
        ],
        dir.path(),
    );
    let o = rsh(&["stats", "--manifest", "out/manifest.json"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("gating rate:  1.0000"));
    assert!(stdout(&o).contains("area histogram"));
    let o = rsh(
        &["stats", "--manifest", "out/manifest.json", "--json"],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["gating_rate"], 1.0);

    let mut m = Manifest::read(&dir.path().join("out/manifest.json")).unwrap();
    m.records.clear();
    m.write(&dir.path().join("empty.json")).unwrap();
    let o = rsh(&["stats", "--manifest", "empty.json"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("no records"));
    fs::write(dir.path().join("junk.json"), "{").unwrap();
    assert_eq!(
        code(&rsh(&["stats", "--manifest", "junk.json"], dir.path())),
        1
    );
    assert_eq!(
        code(&rsh(&["stats", "--manifest", "nope.json"], dir.path())),
        1
    );
}

#[test]
fn stats_gating_rate_on_half_probability_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let img = Image::filled(1, 1, 1, 3).unwrap();
    for i in 0..1000 {
        imgio::save_image(&img, &dir.path().join(format!("in/{i:04}.pgm"))).unwrap();
    }
    rsh(
        &[
            "dataset", "-i", "in", "-o", "out", "--op", "rsh", "--p", "0.5", "--jobs", "4",
        ],
        dir.path(),
    );
    let o = rsh(
        &["stats", "--manifest", "out/manifest.json", "--json"],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rate = v["gating_rate"].as_f64().unwrap();
    assert!((0.45..=0.55).contains(&rate), "{rate}");
}

#[test]
fn help_shows_flags_and_published_defaults() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, flags) in [
        (
            "apply",
            &[
                "--input",
                "--output",
                "--op",
                "--seed",
                "--force",
                "--config",
                "--verbose",
            ][..],
        ),
        (
            "dataset",
            &[
                "--input",
                "--output",
                "--op",
                "--p",
                "--seed",
                "--jobs",
                "--manifest",
                "--config",
            ][..],
        ),
        (
            "preview",
            &["--input", "--grid", "--output", "--seed", "--config"][..],
        ),
        ("stats", &["--manifest", "--json"][..]),
    ] {
        let o = rsh(&[cmd, "--help"], dir.path());
        assert_eq!(code(&o), 0);
        let text = stdout(&o);
        for f in flags {
            assert!(text.contains(f), "{cmd} help lacks {f}");
        }
        if cmd != "stats" {
            assert!(text.contains(r#""highlight_range":[1.0,2.0]"#), "{text}");
            assert!(text.contains(r#""left_lower":[0.4,0.8]"#));
            assert!(text.contains(r#""gamma_range":[0.0,1.5]"#));
        }
    }
    let o = rsh(&["apply", "--help"], dir.path());
    assert!(stdout(&o).contains("[default: 0]"));
}

#[test]
fn digest_line_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    sample(dir.path());
    let o = rsh(
        &[
            "apply", "--op", "gamma", "--force", "-i", "a.png", "-o", "g.ppm",
        ],
        dir.path(),
    );
    let line = stdout(&o);
    let digest = digest_hex(&fs::read(dir.path().join("g.ppm")).unwrap());
    assert!(line.contains(&digest), "{line}");
}
