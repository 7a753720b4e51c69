use std::io;

/// Harness failures, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] varbonus_core::Error),
}

impl HarnessError {
    pub fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        Self::Io { path: path.as_ref().display().to_string(), source }
    }

    /// 2 for configuration and input problems, 3 for internal invariant violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io { .. } | HarnessError::Format(_) => 2,
            HarnessError::Core(varbonus_core::Error::InvalidParameter(_)) => 2,
            HarnessError::Core(_) => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use varbonus_core::Error;

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Config("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Core(Error::InvalidParameter("x".into())).exit_code(), 2);
        assert_eq!(HarnessError::Core(Error::BeliefContradiction("x".into())).exit_code(), 3);
        assert_eq!(HarnessError::Core(Error::InvalidModel("x".into())).exit_code(), 3);
    }
}
