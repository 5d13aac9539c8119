use serde::Deserialize;

use schn_network::{param_count, CountMode, SchConfig};

use crate::errors::CliError;
use crate::ParamsArgs;

#[derive(Deserialize)]
struct WrappedConfig {
    model: SchConfig,
}

pub fn run(args: ParamsArgs) -> Result<(), CliError> {
    let raw = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read config: {e}")))?;
    // accept either a bare architecture config or a full training config
    let config: SchConfig = serde_json::from_str(&raw).or_else(|_| {
        serde_json::from_str::<WrappedConfig>(&raw)
            .map(|w| w.model)
            .map_err(|e| CliError::Config(format!("not a model config: {e}")))
    })?;
    config.validate()?;
    let mode = if args.test_bypass {
        CountMode::TestBypassed
    } else {
        CountMode::Full
    };
    println!("{}", param_count(&config, mode));
    Ok(())
}
