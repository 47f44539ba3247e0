//! Process exit codes.

use amar_core::AmarError;

use crate::ingest::IngestError;

pub const SUCCESS: i32 = 0;
pub const USAGE: i32 = 2;
pub const DATA: i32 = 3;
pub const NUMERICAL: i32 = 4;

/// Errors raised by the front end itself.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

/// Maps an error chain to an exit code; the first recognised cause wins.
pub fn code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return match f {
                Failure::Usage(_) => USAGE,
                Failure::Data(_) => DATA,
            };
        }
        if let Some(e) = cause.downcast_ref::<AmarError>() {
            return match e {
                e if e.is_numerical() => NUMERICAL,
                AmarError::UnknownPreset(_) => USAGE,
                _ => DATA,
            };
        }
        if cause.downcast_ref::<IngestError>().is_some()
            || cause.downcast_ref::<std::io::Error>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
            || cause.downcast_ref::<csv::Error>().is_some()
        {
            return DATA;
        }
    }
    DATA
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::Context;

    #[test]
    fn classification() {
        let e: anyhow::Error = AmarError::SingularDesign("x".into()).into();
        assert_eq!(code_for(&e), NUMERICAL);
        let e = Err::<(), _>(AmarError::InsufficientData { needed: 3, got: 1 })
            .context("fitting")
            .unwrap_err();
        assert_eq!(code_for(&e), DATA);
        let e: anyhow::Error = Failure::Usage("bad".into()).into();
        assert_eq!(code_for(&e), USAGE);
        let e: anyhow::Error = AmarError::UnknownPreset("M0".into()).into();
        assert_eq!(code_for(&e), USAGE);
    }
}
