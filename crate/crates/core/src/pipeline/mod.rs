//! File-driven commands behind the `glide` executable: configuration,
//! artifact generation, training, evaluation and analysis.

mod commands;
mod config;

pub use commands::{
    build_embedder, cmd_analyze, cmd_eval, cmd_gen_synonyms, cmd_gen_testset, cmd_train, load_synonyms, load_testset,
    resolved_path, train_settings, TrainSummary,
};
pub use config::RunConfig;
