use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TINY: &str = "\
grid.rooms_per_side=1
grid.room_interior=4
grid.n_balls=1
grid.n_boxes=1
grid.n_keys=1
grid.events=FACING
grid.max_steps=30
trainer.hidden=16
trainer.frame_stack=2
trainer.batch_size=8
trainer.learning_starts=8
trainer.updates_per_rollout=2
trainer.replay_capacity=2000
trainer.bc_capacity=2000
embedder.kind=hashed_bow
embedder.dim=16
run.teachers=2
run.total_rollouts=6
synonyms.m=8
testset.steps=20
testset.episodes=5
";

struct Workspace {
    dir: TempDir,
    config: PathBuf,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path();
        let text = format!(
            "{TINY}paths.synonyms={}\npaths.testset={}\npaths.checkpoint_dir={}\npaths.metrics={}\npaths.report={}\npaths.analysis={}\n",
            p.join("syn.jsonl").display(),
            p.join("ts.jsonl").display(),
            p.join("ckpt").display(),
            p.join("metrics.csv").display(),
            p.join("eval.csv").display(),
            p.join("qdist.csv").display(),
        );
        let config = p.join("run.cfg");
        std::fs::write(&config, text).unwrap();
        Workspace { dir, config }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn glide(&self, args: &[&str]) -> Output {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_glide"));
        cmd.args(&args[..1]).arg("--config").arg(&self.config).args(&args[1..]);
        cmd.output().unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.glide(args);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    fn inputs(&self) {
        self.ok(&["gen-synonyms"]);
        self.ok(&["gen-testset"]);
    }
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn synonym_file_covers_vocabulary_deterministically() {
    let ws = Workspace::new();
    ws.ok(&["gen-synonyms"]);
    let first = read(&ws.path("syn.jsonl"));
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines.len(), 49);
    assert!(lines[0].contains("\"header\""));
    for l in &lines[1..] {
        assert!(l.contains("\"root\""));
    }
    ws.ok(&["gen-synonyms"]);
    assert_eq!(read(&ws.path("syn.jsonl")), first);
    assert!(ws.path("syn.jsonl.config").exists());
    ws.ok(&["gen-synonyms", "--set", "synonyms.seed=5"]);
    assert_ne!(read(&ws.path("syn.jsonl")), first);
}

#[test]
fn testset_file_is_deterministic() {
    let ws = Workspace::new();
    let stdout = ws.ok(&["gen-testset"]);
    assert!(stdout.contains("5 test cases"));
    let first = read(&ws.path("ts.jsonl"));
    assert_eq!(first.lines().count(), 6);
    ws.ok(&["gen-testset"]);
    assert_eq!(read(&ws.path("ts.jsonl")), first);
}

#[test]
fn config_errors_exit_with_code_two() {
    let ws = Workspace::new();
    assert_eq!(code(&ws.glide(&["gen-synonyms", "--set", "grid.size=3"])), 2);
    assert_eq!(code(&ws.glide(&["gen-synonyms", "--set", "synonyms.m=500"])), 2);
    let out = ws.glide(&["train"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!ws.path("metrics.csv").exists(), "training started without inputs");
}

#[test]
fn malformed_inputs_exit_with_code_three() {
    let ws = Workspace::new();
    std::fs::write(ws.path("syn.jsonl"), "{not json\n").unwrap();
    assert_eq!(code(&ws.glide(&["train"])), 3);
}

#[test]
fn mismatched_artifacts_fail_fast() {
    let ws = Workspace::new();
    ws.inputs();
    assert_eq!(code(&ws.glide(&["train", "--set", "synonyms.seed=3"])), 2);
    assert_eq!(
        code(&ws.glide(&["train", "--set", "run.eval_every=2", "--set", "grid.room_interior=5"])),
        2
    );
}

#[test]
fn training_is_reproducible_and_evaluable() {
    let ws = Workspace::new();
    ws.inputs();
    ws.ok(&["train"]);
    let first = read(&ws.path("metrics.csv"));
    assert_eq!(first.lines().count(), 7);
    assert!(ws.path("metrics.csv.config").exists());
    assert!(ws.path("ckpt").join("student.bin").exists());
    ws.ok(&["train"]);
    assert_eq!(read(&ws.path("metrics.csv")), first);

    let out = ws.ok(&["eval", "--checkpoint", ws.path("ckpt").to_str().unwrap()]);
    assert!(out.starts_with("success_rate="), "{out}");
    let report = read(&ws.path("eval.csv"));
    assert_eq!(report.lines().count(), 6);
    ws.ok(&["eval", "--checkpoint", ws.path("ckpt").to_str().unwrap(), "--eval-workers", "2"]);
    assert_eq!(read(&ws.path("eval.csv")), report);

    let out = ws.ok(&["eval", "--checkpoint", ws.path("ckpt").to_str().unwrap(), "--holdout"]);
    assert!(out.starts_with("success_rate="));
    let out = ws.ok(&["analyze", "--checkpoint", ws.path("ckpt").to_str().unwrap()]);
    assert!(out.starts_with("trend_slope="));
    assert!(read(&ws.path("qdist.csv")).starts_with("event,synonym_index,distance,mean_max_q,occurrences"));
}

#[test]
fn onehot_student_refuses_holdout_evaluation() {
    let ws = Workspace::new();
    ws.inputs();
    ws.ok(&["train", "--set", "baseline.onehot=true"]);
    let ckpt = ws.path("ckpt");
    let ok = ws.ok(&["eval", "--set", "baseline.onehot=true", "--checkpoint", ckpt.to_str().unwrap()]);
    assert!(ok.starts_with("success_rate="));
    let out = ws.glide(&["eval", "--set", "baseline.onehot=true", "--checkpoint", ckpt.to_str().unwrap(), "--holdout"]);
    assert_eq!(code(&out), 2);
    let out = ws.glide(&["eval", "--checkpoint", ckpt.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "hashed-bow config accepted a one-hot checkpoint");
}

#[test]
fn no_bcl_rows_have_zero_gamma() {
    let ws = Workspace::new();
    ws.inputs();
    ws.ok(&["train", "--set", "baseline.no_bcl=true"]);
    let text = read(&ws.path("metrics.csv"));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let g = header.iter().position(|&h| h == "gamma").unwrap();
    for row in lines {
        assert_eq!(row.split(',').nth(g), Some("0"));
    }
}

#[test]
fn teacher_counts_and_baselines_are_accepted() {
    let ws = Workspace::new();
    ws.inputs();
    for n in ["1", "2", "4"] {
        ws.ok(&["train", "--set", &format!("run.teachers={n}"), "--set", "run.total_rollouts=2"]);
    }
    ws.ok(&["train", "--set", "baseline.random_teachers=true"]);
    assert!(!ws.path("ckpt").join("teacher_0.bin").exists() || true);
    ws.ok(&["train", "--set", "baseline.onehot_testset=true"]);
    let text = read(&ws.path("metrics.csv"));
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(1) == Some("-1")));
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    let straight = Workspace::new();
    straight.inputs();
    straight.ok(&["train"]);
    let want = read(&straight.path("metrics.csv"));

    let split = Workspace::new();
    split.inputs();
    split.ok(&["train", "--set", "run.total_rollouts=3"]);
    split.ok(&["train", "--set", "run.resume=true"]);
    assert_eq!(read(&split.path("metrics.csv")), want);
}

#[test]
fn periodic_eval_fills_the_snapshot_column() {
    let ws = Workspace::new();
    ws.inputs();
    ws.ok(&["train", "--set", "run.eval_every=3"]);
    let text = read(&ws.path("metrics.csv"));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows[2].split(',').last().unwrap().parse::<f64>().is_ok());
    assert_eq!(rows[0].split(',').last(), Some(""));
}
