//! Process exit codes. These are a stable contract.

pub const OK: i32 = 0;
pub const CONFIG: i32 = 2;
pub const NO_INFORMATION: i32 = 3;
pub const VERIFICATION_FAILED: i32 = 4;
pub const TRUNCATION: i32 = 5;
pub const IO: i32 = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(CONFIG, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(IO, message)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}
