//! Experiment harness: run configuration, output files and the commands
//! exposed by the CLI.

mod config;
mod facts;
mod manifest;
mod records;
mod run;

pub use config::{EvaluationConfig, PolicyConfig, RunConfig};
pub use facts::{check_law_of_demand, check_rate_inflation_relation, spearman, Status, Verdict};
pub use manifest::{inventory, sha256_file, FileEntry, RunManifest, StageRecord, MANIFEST_FILE};
pub use records::{
    agent_rows, read_csv, write_csv, AgentStepRow, CurveRow, DeviationRow, QuarterRecord,
    QuarterRow, RegretRow, ReturnRow, UtilityRow, LOG_SCHEMA_VERSION,
};
pub use run::{
    evaluate_candidate, evaluate_command, export_game_command, facts_command, load_quarters,
    regret_command, train_imarl_command, train_psro_command, Candidate, EvalSummary,
    EvaluatedEpisode, ImarlSummary, PsroSummary, RegretOutcome, IMARL_POLICY_DIR,
    PSRO_STATE_FILE, PSRO_STRATEGY_DIR,
};
