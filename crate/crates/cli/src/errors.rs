use std::fmt;

/// CLI error with a stable exit-code contract: configuration problems exit
/// 2, runtime/numerical problems exit 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime: {msg}"),
        }
    }
}

impl From<schn_degradation::DegradationError> for CliError {
    fn from(e: schn_degradation::DegradationError) -> Self {
        use schn_degradation::DegradationError as E;
        match &e {
            E::InvalidConfig(_) | E::Manifest(_) => CliError::Config(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<schn_network::NetworkError> for CliError {
    fn from(e: schn_network::NetworkError) -> Self {
        use schn_network::NetworkError as E;
        match &e {
            E::Config(_) | E::Checkpoint(_) | E::Json(_) => CliError::Config(e.to_string()),
            E::Tensor(t) => match t {
                schn_tensor::TensorError::NonFinite { .. } => CliError::Runtime(e.to_string()),
                _ => CliError::Config(e.to_string()),
            },
            E::Io(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<schn_training::TrainError> for CliError {
    fn from(e: schn_training::TrainError) -> Self {
        use schn_training::TrainError as E;
        match &e {
            E::Config(_) | E::Json(_) => CliError::Config(e.to_string()),
            E::NonFinite { .. } => CliError::Runtime(e.to_string()),
            E::Degradation(d) => CliError::from_degradation_class(d, &e),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl CliError {
    fn from_degradation_class(
        d: &schn_degradation::DegradationError,
        outer: &dyn fmt::Display,
    ) -> Self {
        match d {
            schn_degradation::DegradationError::InvalidConfig(_) => {
                CliError::Config(outer.to_string())
            }
            _ => CliError::Runtime(outer.to_string()),
        }
    }
}

impl From<schn_metrics::MetricsError> for CliError {
    fn from(e: schn_metrics::MetricsError) -> Self {
        use schn_metrics::MetricsError as E;
        match &e {
            E::Config(_) => CliError::Config(e.to_string()),
            E::Degradation(schn_degradation::DegradationError::InvalidConfig(_)) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json: {e}"))
    }
}
