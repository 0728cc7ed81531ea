use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{GlideError, Result};

/// One metrics row per rollout.
#[derive(Clone, Debug, PartialEq)]
pub struct RolloutMetrics {
    pub rollout: u64,
    /// -1 when the curriculum has no teachers.
    pub teacher_id: i64,
    pub n_events: usize,
    pub n_reached: usize,
    pub teacher_reward_sum: f64,
    pub student_reward_sum: f64,
    pub l_rl: Option<f64>,
    pub l_bc: Option<f64>,
    pub bc_weight: f64,
    pub epsilon_student: f64,
    pub wall_ms: u64,
    pub env_steps: u64,
    pub eval_success: Option<f64>,
}

pub const METRICS_HEADER: &str = "rollout,teacher_id,n_events,n_reached,teacher_reward_sum,student_reward_sum,\
L_RL,L_BC,gamma,epsilon_student,wall_ms,env_steps,eval_success";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl RolloutMetrics {
    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.rollout,
            self.teacher_id,
            self.n_events,
            self.n_reached,
            self.teacher_reward_sum,
            self.student_reward_sum,
            opt(self.l_rl),
            opt(self.l_bc),
            self.bc_weight,
            self.epsilon_student,
            self.wall_ms,
            self.env_steps,
            opt(self.eval_success),
        )
        .expect("writing to a string");
        s
    }
}

/// Append-only metrics CSV.
pub struct MetricsWriter {
    path: PathBuf,
    file: File,
}

impl MetricsWriter {
    /// Starts a new file with a header.
    pub fn create(path: &Path) -> Result<Self> {
        let mut file = File::create(path).map_err(|e| GlideError::io(path, e))?;
        writeln!(file, "{METRICS_HEADER}").map_err(|e| GlideError::io(path, e))?;
        Ok(MetricsWriter {
            path: path.to_owned(),
            file,
        })
    }

    /// Continues an existing file, dropping rows past `rollout` left by an
    /// interrupted run.
    pub fn resume(path: &Path, rollout: u64) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| GlideError::io(path, e))?;
        let mut lines = text.lines();
        if lines.next() != Some(METRICS_HEADER) {
            return Err(GlideError::Format(format!("{} is not a metrics file", path.display())));
        }
        let mut kept = format!("{METRICS_HEADER}\n");
        for line in lines {
            let r: u64 = line
                .split(',')
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| GlideError::Format(format!("bad metrics row {line:?}")))?;
            if r <= rollout {
                kept.push_str(line);
                kept.push('\n');
            }
        }
        std::fs::write(path, kept).map_err(|e| GlideError::io(path, e))?;
        let file = OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(|e| GlideError::io(path, e))?;
        Ok(MetricsWriter {
            path: path.to_owned(),
            file,
        })
    }

    pub fn write(&mut self, m: &RolloutMetrics) -> Result<()> {
        writeln!(self.file, "{}", m.csv_row()).map_err(|e| GlideError::io(&self.path, e))
    }
}
