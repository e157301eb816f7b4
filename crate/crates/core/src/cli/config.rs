use crate::error::Result;
use crate::field::{FieldMode, FieldParams};

/// Version string carried by every report and summary.
pub const FORMAT_VERSION: &str = "lrs-report v1";

/// The parameters of one CLI run. Echoed into every artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub p: u64,
    pub n: usize,
    pub seed: u64,
    pub mode: FieldMode,
    pub trials: u64,
    pub restart_cap: u32,
}

impl RunConfig {
    pub fn params(&self) -> Result<FieldParams> {
        FieldParams::with_mode(self.p, self.n, self.mode)
    }

    /// `# run ...` line embedded in data files.
    pub fn comment_line(&self) -> String {
        format!(
            "# run p={} n={} seed={} mode={} trials={} restart-cap={}",
            self.p, self.n, self.seed, self.mode, self.trials, self.restart_cap
        )
    }
}
