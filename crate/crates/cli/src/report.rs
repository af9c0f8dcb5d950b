use std::collections::BTreeMap;
use std::fmt;

use dsarray::RuntimeStats;
use serde::Serialize;

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub verdict: Verdict,
    pub detail: String,
}

impl Verification {
    pub fn check(ok: bool, detail: impl Into<String>) -> Verification {
        Verification { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, detail: detail.into() }
    }

    pub fn skipped(detail: impl Into<String>) -> Verification {
        Verification { verdict: Verdict::Skipped, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskStats {
    pub total_submitted: u64,
    pub submitted: BTreeMap<String, u64>,
    pub completed: BTreeMap<String, u64>,
}

impl From<&RuntimeStats> for TaskStats {
    fn from(s: &RuntimeStats) -> TaskStats {
        TaskStats {
            total_submitted: s.total_submitted(),
            submitted: s.tasks_submitted.clone(),
            completed: s.tasks_completed.clone(),
        }
    }
}

/// Fields that depend on scheduling and so differ between identical runs.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub wall_time_ms: f64,
    pub max_graph_width: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub operation: String,
    /// `ds-array` or `dataset`.
    pub structure: String,
    pub shape: [usize; 2],
    pub block: [usize; 2],
    pub workers: usize,
    pub seed: u64,
    pub tasks: TaskStats,
    pub verification: Verification,
    pub timing: Timing,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "operation   {} ({})", self.operation, self.structure)?;
        writeln!(f, "shape       {}x{}", self.shape[0], self.shape[1])?;
        writeln!(f, "block       {}x{}", self.block[0], self.block[1])?;
        writeln!(f, "workers     {}", self.workers)?;
        writeln!(f, "wall time   {:.3} ms", self.timing.wall_time_ms)?;
        writeln!(f, "tasks       {}", self.tasks.total_submitted)?;
        for (tag, n) in &self.tasks.submitted {
            writeln!(f, "  {tag:<20} {n}")?;
        }
        writeln!(f, "graph width {}", self.timing.max_graph_width)?;
        let verdict = match self.verification.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        };
        write!(f, "verdict     {verdict} ({})", self.verification.detail)
    }
}
