//! Command implementations. Each returns a [`Report`] listing the images or
//! files that failed; fatal problems come back as errors.

mod eval;
mod labelgen;
mod misc;
mod propose;
mod sweep;

pub use eval::{cmd_eval, evaluate, read_proposals, EvalSummary, Mismatch};
pub use labelgen::{cmd_labelgen, parse_size, LabelgenOptions};
pub use misc::{cmd_gen_weights, cmd_ifa, cmd_losscheck, cmd_synth};
pub use propose::{cmd_propose, propose_dir, proposals_json, ProposeOptions};
pub use sweep::{cmd_sweep, parse_k_list, sweep, sweep_csv, SweepRow, DEFAULT_K_LIST};

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Report {
    pub failures: Vec<String>,
}

impl Report {
    pub fn fail(&mut self, what: impl std::fmt::Display) {
        let msg = what.to_string();
        log::error!("{msg}");
        self.failures.push(msg);
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}
