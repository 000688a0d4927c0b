//! Runtime monitoring: a streaming ghost monitor that tracks prediction
//! bounds and hypotheses, and finite-state approximate monitors.

mod export;
mod ghost;
mod synth;

pub use export::{export_dot, export_json, import_json, MonitorFile};
pub use ghost::{ghost_step, GhostState, HypKind, Hypothesis, Status, StepReport};
pub use synth::{monitor_run, s_delta, synthesize, width, AbstractMonitor, MonitorClass, RunOutput, DEFAULT_MAX_DEPTH};
