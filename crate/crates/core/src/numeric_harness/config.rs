use serde::Serialize;

/// Finite-difference settings shared by every numeric check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FDConfig {
    pub step: f64,
    pub richardson: bool,
    pub max_retries: u32,
}

impl Default for FDConfig {
    fn default() -> Self {
        FDConfig { step: 1e-4, richardson: true, max_retries: 1000 }
    }
}

impl FDConfig {
    pub const MIN_STEP: f64 = 1e-8;
    pub const MAX_STEP: f64 = 1e-1;

    pub fn with_step(step: f64) -> Self {
        FDConfig { step, ..FDConfig::default() }
    }

    pub fn validate(&self) -> Result<(), StepError> {
        if !(self.step >= Self::MIN_STEP) {
            return Err(StepError::Underflow(self.step));
        }
        if self.step > Self::MAX_STEP {
            return Err(StepError::TooLarge(self.step));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StepError {
    #[error("finite-difference step {0:e} is below the 1e-8 floor")]
    Underflow(f64),
    #[error("finite-difference step {0:e} is above the 1e-1 ceiling")]
    TooLarge(f64),
}
