//! Checks shared by the integration tests and the acceptance report. Each
//! returns `Err(description)` on failure instead of panicking.
#![allow(dead_code)]

pub mod dsp;
pub mod importance;
pub mod pipeline;

pub type Check = Result<(), String>;

#[macro_export]
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn run_all(checks: &[(&str, fn() -> Check)]) -> Check {
    let failures: Vec<String> = checks
        .iter()
        .filter_map(|(name, f)| f().err().map(|e| format!("{name}: {e}")))
        .collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("; "))
    }
}
